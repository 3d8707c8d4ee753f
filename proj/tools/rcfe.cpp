// rcfe: annealed free energy of random-code output distributions.
//
// Subcommands: boundaries, branches, phase, simulate, oracle, applications.
// Exit codes: 0 success, 2 channel validation, 3 solver nonconvergence,
// 4 enumeration feasibility, 64 usage.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcfe/applications.hpp"
#include "rcfe/ensemble.hpp"
#include "rcfe/io.hpp"
#include "rcfe/oracle.hpp"
#include "rcfe/phase.hpp"

namespace {

using namespace rcfe;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitFeasibility = 4;
constexpr int kExitUsage = 64;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_range(const std::string& text, const char* what) {
  // "a:b:step", inclusive of b up to rounding.
  double lo = 0, hi = 0, step = 0;
  std::istringstream is(text);
  char c1 = 0, c2 = 0;
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      !is.eof()) {
    throw UsageError(std::string(what) + ": expected '<lo>:<hi>:<step>'");
  }
  if (!(step > 0.0)) {
    throw UsageError(std::string(what) + ": step must be > 0");
  }
  if (hi < lo) {
    throw UsageError(std::string(what) + ": upper end below lower end");
  }
  std::vector<double> grid;
  for (double v = lo; v <= hi + step * 1e-9; v += step) grid.push_back(v);
  return grid;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string nats_str(const Nats& v) {
  if (v.is_pos_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  return format_sig(v.value());
}

struct OutputDir {
  std::filesystem::path dir;
  explicit OutputDir(const std::string& path) : dir(path) {
    std::filesystem::create_directories(dir);
  }
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

struct Stopwatch {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

KeyValueDoc manifest_header(const std::string& subcommand,
                            const std::string& channel_path,
                            const Channel& ch) {
  KeyValueDoc doc;
  doc.add("tool", "rcfe");
  doc.add("version", version_string());
  doc.add("subcommand", subcommand);
  doc.add("channel", channel_path);
  doc.add("channel_hash", hash_hex(ch.hash()));
  return doc;
}

void write_boundaries_plot(const OutputDir& out, double triple_beta,
                           double triple_rate) {
  std::ostringstream gp;
  gp << "set datafile separator comma\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'beta'\n"
     << "set ylabel 'rate [nats]'\n"
     << "plot 'boundaries.csv' using 1:2 with lines lw 2, \\\n"
     << "     'boundaries.csv' using 1:3 with lines lw 2, \\\n"
     << "     'boundaries.csv' using 1:4 with lines lw 2, \\\n"
     << "     '-' with points pt 7 ps 1.5 title 'triple point'\n"
     << format_sig(triple_beta) << " " << format_sig(triple_rate) << "\n"
     << "e\n";
  write_text_atomic(out.file("boundaries.gp"), gp.str());
}

void write_branches_plot(const OutputDir& out) {
  std::ostringstream gp;
  gp << "set datafile separator comma\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'beta'\n"
     << "set ylabel 'free energy [nats]'\n"
     << "plot 'branches.csv' using 1:2 with lines lw 2, \\\n"
     << "     'branches.csv' using 1:3 with lines lw 2, \\\n"
     << "     'branches.csv' using 1:4 with lines lw 2, \\\n"
     << "     'branches.csv' using 1:5 with lines dt 2 lw 2\n";
  write_text_atomic(out.file("branches.gp"), gp.str());
}

int cmd_boundaries(const std::string& channel_path,
                   const std::string& beta_range, const std::string& out_path,
                   int threads) {
  Stopwatch watch;
  const Channel ch = load_channel(channel_path);
  const std::vector<double> grid = parse_range(beta_range, "--beta-range");
  if (grid.front() < 1.0 || grid.back() > kBetaMaxNumeric) {
    throw UsageError("--beta-range: boundaries require 1 <= beta <= 64");
  }
  SolverConfig cfg;
  cfg.threads = threads;
  const OutputDir out(out_path);

  CurveTable table;
  try {
    table = boundary_curves(ch, grid, cfg);
  } catch (const SolverError& e) {
    throw SolverError(std::string(e.what()) + " (beta grid " + beta_range +
                      ")");
  }
  write_curve_csv(out.file("boundaries.csv"), table);
  write_boundaries_plot(out, grid.front(), table.columns[1].front());

  KeyValueDoc manifest = manifest_header("boundaries", channel_path, ch);
  manifest.add("beta_range", beta_range);
  manifest.add("threads", std::to_string(threads));
  manifest.add("out", out_path);
  manifest.add("duration_ms", std::to_string(watch.ms()));
  write_manifest(out.file("manifest.txt"), manifest);
  return 0;
}

int cmd_branches(const std::string& channel_path, double rate,
                 const std::string& beta_range, const std::string& out_path,
                 int threads) {
  Stopwatch watch;
  const Channel ch = load_channel(channel_path);
  const std::vector<double> grid = parse_range(beta_range, "--beta-range");
  if (grid.front() <= 0.0 || grid.back() > kBetaMaxNumeric) {
    throw UsageError("--beta-range: need 0 < beta <= 64");
  }
  if (!(rate > 0.0)) throw UsageError("--rate must be > 0");
  SolverConfig cfg;
  cfg.threads = threads;
  const OutputDir out(out_path);

  const CurveTable table = branch_curves(ch, rate, grid, cfg);
  write_curve_csv(out.file("branches.csv"), table);
  write_branches_plot(out);

  // Largest distance between the bulk branch and the iid reference over the
  // grid, a figure-level summary of how closely the two track.
  double max_gap = 0.0;
  for (std::size_t i = 0; i < table.axis.size(); ++i) {
    max_gap = std::max(max_gap,
                       std::abs(table.columns[0][i] - table.columns[3][i]));
  }

  KeyValueDoc manifest = manifest_header("branches", channel_path, ch);
  manifest.add("rate", format_sig(rate));
  manifest.add("beta_range", beta_range);
  manifest.add("threads", std::to_string(threads));
  manifest.add("max_abs_gap_bulk_vs_iid", format_sig(max_gap));
  manifest.add("out", out_path);
  manifest.add("duration_ms", std::to_string(watch.ms()));
  write_manifest(out.file("manifest.txt"), manifest);
  return 0;
}

int cmd_phase(const std::string& channel_path, double beta, double rate,
              int threads) {
  const Channel ch = load_channel(channel_path);
  if (!(beta > 0.0)) throw UsageError("--beta must be > 0");
  if (beta > kBetaMaxNumeric) throw UsageError("--beta must be <= 64");
  if (!(rate > 0.0)) throw UsageError("--rate must be > 0");
  SolverConfig cfg;
  cfg.threads = threads;

  const PhasePoint pt = psi_total(ch, beta, rate, cfg);
  const double i_xy =
      mutual_info(JointDistribution::make(ch, ch.transition())).value();

  std::cout << "channel: " << channel_path << "\n"
            << "channel_hash: " << hash_hex(ch.hash()) << "\n"
            << "beta: " << format_sig(beta) << "\n"
            << "rate: " << format_sig(rate) << "\n"
            << "mutual_information: " << format_sig(i_xy) << "\n"
            << "psi_bulk: " << nats_str(pt.psi_bulk) << "\n"
            << "psi_sparse: " << nats_str(pt.psi_sparse) << "\n"
            << "psi_total: " << nats_str(pt.psi_total) << "\n"
            << "psi_iid: " << nats_str(psi_iid(ch, beta)) << "\n"
            << "i_bulk: " << nats_str(pt.i_bulk) << "\n"
            << "i_sparse: " << nats_str(pt.i_sparse) << "\n"
            << "r_star: "
            << (pt.r_star ? nats_str(*pt.r_star)
                          : std::string("undefined for beta < 1"))
            << "\n"
            << "region: " << to_string(pt.region) << "\n";
  return 0;
}

Eigen::MatrixXi canonical_joint_type(const Channel& ch,
                                     const std::vector<int>& composition) {
  // Row-wise largest-remainder rounding of composition[x] * W(x, .): the
  // integer joint type closest to the channel joint law.
  const Index nx = ch.input_size();
  const Index ny = ch.output_size();
  Eigen::MatrixXi counts(nx, ny);
  for (Index x = 0; x < nx; ++x) {
    Vector row = ch.transition().row(x);
    const std::vector<int> c =
        composition_counts(row, composition[static_cast<std::size_t>(x)]);
    for (Index y = 0; y < ny; ++y) {
      counts(x, y) = c[static_cast<std::size_t>(y)];
    }
  }
  return counts;
}

Codeword canonical_y_ref(const Eigen::MatrixXi& counts) {
  Codeword y;
  for (Index col = 0; col < counts.cols(); ++col) {
    const int total = counts.col(col).sum();
    y.insert(y.end(), static_cast<std::size_t>(total),
             static_cast<int>(col));
  }
  return y;
}

int cmd_simulate(const std::string& channel_path, const std::string& mode,
                 int n, const std::string& n_range, double rate,
                 long long codewords, double beta, long long trials,
                 std::uint64_t seed, const std::string& out_path,
                 int threads) {
  Stopwatch watch;
  const Channel ch = load_channel(channel_path);
  if (!(beta > 0.0)) throw UsageError("--beta must be > 0");
  if (trials < 1) throw UsageError("--trials must be >= 1");
  if (rate <= 0.0 && codewords < 1) {
    throw UsageError("need --rate > 0 or --codewords >= 1");
  }
  const OutputDir out(out_path);

  auto make_spec = [&](int block) {
    return codewords >= 1 ? CodebookSpec::from_count(ch, block, codewords)
                          : CodebookSpec::from_rate(ch, block, rate);
  };

  CurveTable table;
  table.channel_hash = ch.hash();
  table.seed = seed;
  SolverConfig cfg;
  table.config_summary = solver_config_summary(cfg);

  KeyValueDoc manifest = manifest_header("simulate", channel_path, ch);
  manifest.add("mode", mode);
  manifest.add("beta", format_sig(beta));
  manifest.add("trials", std::to_string(trials));
  manifest.add("seed", std::to_string(seed));
  if (codewords >= 1) {
    manifest.add("codewords", std::to_string(codewords));
  } else {
    manifest.add("rate", format_sig(rate));
  }

  if (mode == "annealed" || mode == "quenched") {
    if (n < 1) throw UsageError("--n must be >= 1");
    const CodebookSpec spec = make_spec(n);
    if (spec.codeword_count < 2) {
      throw UsageError(
          "annealed/quenched contrast needs M >= 2; raise --rate or "
          "--codewords");
    }
    const EnsembleReport report =
        mode == "annealed" ? estimate_annealed(spec, beta, trials, seed, threads)
                           : estimate_quenched(spec, beta, trials, seed, threads);
    table.axis_name = "trial";
    table.column_names = {"log_z_over_n"};
    table.columns.assign(1, report.per_trial);
    for (long long t = 0; t < trials; ++t) {
      table.axis.push_back(static_cast<double>(t));
    }
    write_curve_csv(out.file("report.csv"), table);

    manifest.add("n", std::to_string(n));
    manifest.add("codeword_count", std::to_string(report.codeword_count));
    manifest.add("annealed_exponent", format_sig(report.annealed_exponent));
    manifest.add("annealed_stderr", format_sig(report.annealed_stderr));
    manifest.add("quenched_mean", format_sig(report.quenched_mean));
    manifest.add("quenched_std", format_sig(report.quenched_std));
    manifest.add("quenched_stderr", format_sig(report.quenched_stderr));
  } else if (mode == "enumerator") {
    std::vector<double> ns;
    if (!n_range.empty()) {
      ns = parse_range(n_range, "--n-range");
    } else {
      if (n < 1) throw UsageError("--n must be >= 1");
      ns = {static_cast<double>(n)};
    }
    table.axis_name = "n";
    table.column_names = {"codewords",          "single_draw_prob",
                          "mutual_info_q",      "empirical_exponent",
                          "exact_exponent",     "lemma_exponent"};
    table.columns.assign(6, {});
    for (const double nd : ns) {
      const int block = static_cast<int>(std::llround(nd));
      const CodebookSpec spec = make_spec(block);
      const Eigen::MatrixXi counts =
          canonical_joint_type(ch, spec.composition);
      const Codeword y_ref = canonical_y_ref(counts);
      const EnumeratorReport r = enumerator_moment(spec, y_ref, counts, beta,
                                                   trials, seed, threads);
      table.axis.push_back(nd);
      table.columns[0].push_back(static_cast<double>(r.codeword_count));
      table.columns[1].push_back(r.single_draw_prob);
      table.columns[2].push_back(r.mutual_info_q);
      table.columns[3].push_back(r.empirical_moment > 0.0
                                     ? std::log(r.empirical_moment) / block
                                     : -std::numeric_limits<double>::infinity());
      table.columns[4].push_back(std::log(r.exact_moment) / block);
      table.columns[5].push_back(r.lemma_exponent);
    }
    write_curve_csv(out.file("report.csv"), table);
    manifest.add("n_range", n_range.empty() ? std::to_string(n) : n_range);
  } else {
    throw UsageError("--mode must be annealed, quenched or enumerator");
  }

  manifest.add("threads", std::to_string(threads));
  manifest.add("out", out_path);
  manifest.add("duration_ms", std::to_string(watch.ms()));
  write_manifest(out.file("manifest.txt"), manifest);
  return 0;
}

int cmd_oracle(const std::string& channel_path, int n, long long codewords,
               double beta) {
  const Channel ch = load_channel(channel_path);
  if (n < 1) throw UsageError("--n must be >= 1");
  if (codewords < 1) throw UsageError("--codewords must be >= 1");
  if (!(beta > 0.0)) throw UsageError("--beta must be > 0");

  const CodebookSpec spec = CodebookSpec::from_count(ch, n, codewords);
  const double via_enum = exact_annealed_enum(spec, beta).value();
  const double via_atoms = exact_annealed_atoms(spec, beta).value();
  const double gap = std::abs(via_enum - via_atoms);

  std::cout << "n: " << n << "\n"
            << "codewords: " << codewords << "\n"
            << "beta: " << format_sig(beta) << "\n"
            << "exact_annealed_enum: " << format_sig(via_enum) << "\n"
            << "exact_annealed_atoms: " << format_sig(via_atoms) << "\n"
            << "abs_difference: " << format_sig(gap) << "\n"
            << "agreement_1e-10: " << (gap < 1e-10 ? "yes" : "NO") << "\n";
  return gap < 1e-10 ? 0 : 1;
}

int cmd_applications(const std::string& channel_path, const std::string& kind,
                     double rate, const std::string& rate_range, double s,
                     double beta, const std::string& out_path, int threads) {
  Stopwatch watch;
  const Channel ch = load_channel(channel_path);
  SolverConfig cfg;
  cfg.threads = threads;

  const bool sweep = !rate_range.empty();
  std::vector<double> rates;
  if (sweep) {
    rates = parse_range(rate_range, "--rate-range");
    if (out_path.empty()) {
      throw UsageError("--rate-range needs --out for the CSV sweep");
    }
  } else {
    if (!(rate > 0.0)) throw UsageError("--rate must be > 0");
    rates = {rate};
  }

  CurveTable table;
  table.axis_name = "rate";
  table.channel_hash = ch.hash();
  table.config_summary = solver_config_summary(cfg);

  if (kind == "chernoff") {
    table.column_names = {"xi", "beta_star"};
    table.columns.assign(2, {});
    for (const double r : rates) {
      const ChernoffResult res = chernoff_exponent(ch, r, cfg);
      table.axis.push_back(r);
      table.columns[0].push_back(res.xi.value());
      table.columns[1].push_back(res.beta_star);
      if (!sweep) {
        std::cout << "rate: " << format_sig(r) << "\n"
                  << "xi: " << format_sig(res.xi.value()) << "\n"
                  << "beta_star: " << format_sig(res.beta_star) << "\n";
      }
    }
  } else if (kind == "guesswork") {
    if (!(s > 0.0)) throw UsageError("guesswork needs --s > 0");
    table.column_names = {"exponent", "beta"};
    table.columns.assign(2, {});
    for (const double r : rates) {
      const GuessworkResult res = guesswork_exponent(ch, s, r, cfg);
      table.axis.push_back(r);
      table.columns[0].push_back(res.exponent.value());
      table.columns[1].push_back(res.beta);
      if (!sweep) {
        std::cout << "s: " << format_sig(s) << "\n"
                  << "beta: " << format_sig(res.beta) << "\n"
                  << "exponent: " << format_sig(res.exponent.value()) << "\n";
      }
    }
  } else if (kind == "renyi") {
    if (!(beta > 0.0)) throw UsageError("renyi needs --beta > 0");
    table.column_names = {"renyi_rate", "heuristic"};
    table.columns.assign(2, {});
    for (const double r : rates) {
      const RenyiRateResult res = renyi_rate(ch, beta, r, cfg);
      table.axis.push_back(r);
      table.columns[0].push_back(res.value.as_double());
      table.columns[1].push_back(res.heuristic ? 1.0 : 0.0);
      if (!sweep) {
        std::cout << "beta: " << format_sig(beta) << "\n"
                  << "rate: " << format_sig(r) << "\n"
                  << "renyi_rate: " << nats_str(res.value) << "\n"
                  << "heuristic: " << (res.heuristic ? "yes" : "no") << "\n";
      }
    }
  } else {
    throw UsageError("--kind must be chernoff, guesswork or renyi");
  }

  if (sweep) {
    const OutputDir out(out_path);
    write_curve_csv(out.file(kind + ".csv"), table);
    KeyValueDoc manifest = manifest_header("applications", channel_path, ch);
    manifest.add("kind", kind);
    manifest.add("rate_range", rate_range);
    if (kind == "guesswork") manifest.add("s", format_sig(s));
    if (kind == "renyi") manifest.add("beta", format_sig(beta));
    manifest.add("threads", std::to_string(threads));
    manifest.add("out", out_path);
    manifest.add("duration_ms", std::to_string(watch.ms()));
    write_manifest(out.file("manifest.txt"), manifest);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annealed free energy of random-code output distributions"};
  app.require_subcommand(1);

  std::string channel_path, beta_range, rate_range, n_range, out_path;
  std::string mode = "annealed", kind = "chernoff", format = "csv";
  double beta = 1.0, rate = 0.0, s_moment = 0.0;
  int n = 0, threads = 0;
  long long trials = 1000, codewords = 0;
  std::uint64_t seed = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--channel", channel_path, "channel spec file")
        ->required();
    cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    cmd->add_option("--format", format, "output format (csv)")
        ->check(CLI::IsMember({"csv"}));
    if (needs_out) {
      cmd->add_option("--out", out_path, "output directory")->required();
    }
  };

  CLI::App* boundaries = app.add_subcommand(
      "boundaries", "phase boundary curves i_bulk, r_star, i_sparse");
  add_common(boundaries, true);
  boundaries->add_option("--beta-range", beta_range, "beta grid a:b:step")
      ->required();

  CLI::App* branches = app.add_subcommand(
      "branches", "branch curves psi_bulk, psi_sparse, psi_total, psi_iid");
  add_common(branches, true);
  branches->add_option("--rate", rate, "code rate R in nats")->required();
  branches->add_option("--beta-range", beta_range, "beta grid a:b:step")
      ->required();

  CLI::App* phase =
      app.add_subcommand("phase", "single (beta, R) phase point");
  add_common(phase, false);
  phase->add_option("--beta", beta, "inverse temperature")->required();
  phase->add_option("--rate", rate, "code rate R in nats")->required();

  CLI::App* simulate = app.add_subcommand(
      "simulate", "finite-n Monte Carlo over random codebooks");
  add_common(simulate, true);
  simulate->add_option("--mode", mode, "annealed | quenched | enumerator");
  simulate->add_option("--n", n, "block length");
  simulate->add_option("--n-range", n_range, "block length grid a:b:step");
  simulate->add_option("--rate", rate, "code rate (M = floor(e^{nR}))");
  simulate->add_option("--codewords", codewords, "explicit codeword count M");
  simulate->add_option("--beta", beta, "inverse temperature")->required();
  simulate->add_option("--trials", trials, "Monte Carlo trials");
  simulate->add_option("--seed", seed, "RNG seed");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "exact tiny-scale E[Z] by two independent routes");
  add_common(oracle, false);
  oracle->add_option("--n", n, "block length")->required();
  oracle->add_option("--codewords", codewords, "codeword count M")->required();
  oracle->add_option("--beta", beta, "inverse temperature")->required();

  CLI::App* applications = app.add_subcommand(
      "applications", "chernoff / guesswork / renyi exponents");
  add_common(applications, false);
  applications->add_option("--kind", kind, "chernoff | guesswork | renyi");
  applications->add_option("--rate", rate, "code rate R in nats");
  applications->add_option("--rate-range", rate_range, "rate grid a:b:step");
  applications->add_option("--s", s_moment, "guesswork moment order");
  applications->add_option("--beta", beta, "renyi order");
  applications->add_option("--out", out_path, "output directory for sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (boundaries->parsed()) {
      return cmd_boundaries(channel_path, beta_range, out_path, threads);
    }
    if (branches->parsed()) {
      return cmd_branches(channel_path, rate, beta_range, out_path, threads);
    }
    if (phase->parsed()) {
      return cmd_phase(channel_path, beta, rate, threads);
    }
    if (simulate->parsed()) {
      return cmd_simulate(channel_path, mode, n, n_range, rate, codewords,
                          beta, trials, seed, out_path, threads);
    }
    if (oracle->parsed()) {
      return cmd_oracle(channel_path, n, codewords, beta);
    }
    if (applications->parsed()) {
      return cmd_applications(channel_path, kind, rate, rate_range, s_moment,
                              beta, out_path, threads);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const FeasibilityError& e) {
    std::cerr << "feasibility error: " << e.what() << "\n";
    return kExitFeasibility;
  }
  return kExitUsage;
}
