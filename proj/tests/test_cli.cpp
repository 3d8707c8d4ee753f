#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = RCFE_CLI_PATH;
const std::string kData = std::string(RCFE_SOURCE_DIR) + "/data";

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const std::string out_file = "/tmp/rcfe_cli_out.txt";
  const std::string command =
      kCli + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(command.c_str());
  std::ifstream in(out_file);
  std::ostringstream os;
  os << in.rdbuf();
  return {WEXITSTATUS(status), os.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void shell(const std::string& command) {
  const int rc = std::system(command.c_str());
  (void)rc;
}

double grep_value(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + ": ");
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size() + 2));
}

}  // namespace

TEST_CASE("phase command reports the worked example") {
  const RunResult r =
      run("phase --channel " + kData + "/zchannel.spec --beta 1 --rate 0.3");
  CHECK(r.exit_code == 0);
  CHECK(std::abs(grep_value(r.stdout_text, "mutual_information") - 0.2441) <
        5e-4);
  CHECK(std::abs(grep_value(r.stdout_text, "psi_total")) < 1e-8);
  CHECK(r.stdout_text.find("region: A") != std::string::npos);

  const RunResult d =
      run("phase --channel " + kData + "/zchannel.spec --beta 2 --rate 0.05");
  CHECK(d.exit_code == 0);
  CHECK(d.stdout_text.find("region: D") != std::string::npos);

  const RunResult sub =
      run("phase --channel " + kData + "/zchannel.spec --beta 0.5 --rate 0.2");
  CHECK(sub.exit_code == 0);
  CHECK(sub.stdout_text.find("r_star: undefined for beta < 1") !=
        std::string::npos);
  CHECK(sub.stdout_text.find("region: undefined for beta < 1") !=
        std::string::npos);
}

TEST_CASE("boundaries command writes curves, plot script and manifest") {
  const std::string out = "/tmp/rcfe_cli_boundaries";
  shell("rm -rf " + out);
  const RunResult r = run("boundaries --channel " + kData +
                          "/zchannel.spec --beta-range 1:2:0.5 --out " + out);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out + "/boundaries.csv");
  CHECK(csv.find("beta,i_bulk,r_star,i_sparse\n") == 0);
  CHECK(slurp(out + "/boundaries.gp").find("triple point") !=
        std::string::npos);
  const std::string manifest = slurp(out + "/manifest.txt");
  CHECK(manifest.find("subcommand: boundaries") != std::string::npos);
  CHECK(manifest.find("channel_hash: ") != std::string::npos);
  CHECK(slurp(out + "/boundaries.csv.meta").find("solver_config") !=
        std::string::npos);

  // Triple point row at beta = 1.
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  double beta0, ib, rs, is;
  char comma;
  std::istringstream(row) >> beta0 >> comma >> ib >> comma >> rs >> comma >> is;
  CHECK(beta0 == 1.0);
  CHECK(std::abs(ib - 0.2441) < 1e-3);
  CHECK(std::abs(rs - 0.2441) < 5e-4);
  CHECK(std::abs(is - 0.2441) < 5e-4);
}

TEST_CASE("branches command covers the three figure rates") {
  const std::string out = "/tmp/rcfe_cli_branches";
  shell("rm -rf " + out);
  const RunResult r =
      run("branches --channel " + kData +
          "/zchannel.spec --rate 0.12 --beta-range 1:2:0.25 --out " + out);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out + "/branches.csv");
  CHECK(csv.find("beta,psi_bulk,psi_sparse,psi_total,psi_iid\n") == 0);
  CHECK(slurp(out + "/manifest.txt").find("max_abs_gap_bulk_vs_iid") !=
        std::string::npos);
}

TEST_CASE("usage errors exit 64") {
  CHECK(run("boundaries --channel " + kData +
            "/zchannel.spec --beta-range 1:2:0 --out /tmp/rcfe_usage")
            .exit_code == 64);
  CHECK(run("boundaries --channel " + kData +
            "/zchannel.spec --beta-range 0.5:2:0.5 --out /tmp/rcfe_usage")
            .exit_code == 64);
  CHECK(run("applications --channel " + kData +
            "/zchannel.spec --kind renyi --beta 1 --rate 0.3")
            .exit_code == 64);
  CHECK(run("nonsense").exit_code == 64);
  CHECK(run("phase --beta 1 --rate 0.3").exit_code == 64);  // missing channel
}

TEST_CASE("validation errors exit 2") {
  const std::string bad = "/tmp/rcfe_bad_channel.spec";
  std::ofstream(bad) << "input_alphabet: a b\noutput_alphabet: 0 1\n"
                     << "P_X: 0.5 0.5\nW: 0.7 0.7\nW: 0.5 0.5\n";
  CHECK(run("phase --channel " + bad + " --beta 1 --rate 0.3").exit_code == 2);
  CHECK(run("phase --channel /tmp/does_not_exist.spec --beta 1 --rate 0.3")
            .exit_code == 2);
}

TEST_CASE("oracle command agreement and feasibility exit 4") {
  const RunResult ok = run("oracle --channel " + kData +
                           "/zchannel.spec --n 2 --codewords 2 --beta 2");
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("agreement_1e-10: yes") != std::string::npos);

  const RunResult trivial = run("oracle --channel " + kData +
                                "/zchannel.spec --n 2 --codewords 2 --beta 1");
  CHECK(trivial.exit_code == 0);
  CHECK(std::abs(grep_value(trivial.stdout_text, "exact_annealed_enum")) <
        1e-12);

  CHECK(run("oracle --channel " + kData +
            "/zchannel.spec --n 20 --codewords 3 --beta 2")
            .exit_code == 4);
}

TEST_CASE("simulate determinism: identical seeds give byte-identical CSVs") {
  const std::string out_a = "/tmp/rcfe_cli_sim_a";
  const std::string out_b = "/tmp/rcfe_cli_sim_b";
  shell("rm -rf " + out_a + " " + out_b);
  const std::string args = "simulate --channel " + kData +
                           "/zchannel.spec --mode annealed --n 6 --codewords "
                           "4 --beta 2 --trials 200 --seed 31 --out ";
  CHECK(run(args + out_a).exit_code == 0);
  CHECK(run(args + out_b + " --threads 4").exit_code == 0);
  const std::string a = slurp(out_a + "/report.csv");
  CHECK(!a.empty());
  CHECK(a == slurp(out_b + "/report.csv"));

  // A different seed changes the report.
  const std::string out_c = "/tmp/rcfe_cli_sim_c";
  shell("rm -rf " + out_c);
  const std::string args_c = "simulate --channel " + kData +
                             "/zchannel.spec --mode annealed --n 6 "
                             "--codewords 4 --beta 2 --trials 200 --seed 32 "
                             "--out " + out_c;
  CHECK(run(args_c).exit_code == 0);
  CHECK(a != slurp(out_c + "/report.csv"));
}

TEST_CASE("simulate enumerator mode emits the two-regime table") {
  const std::string out = "/tmp/rcfe_cli_sim_enum";
  shell("rm -rf " + out);
  const RunResult r = run("simulate --channel " + kData +
                          "/zchannel.spec --mode enumerator --n-range 4:8:4 "
                          "--codewords 3 --beta 2 --trials 2000 --seed 7 "
                          "--out " + out);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out + "/report.csv");
  CHECK(csv.find("n,codewords,single_draw_prob,mutual_info_q,"
                 "empirical_exponent,exact_exponent,lemma_exponent\n") == 0);
  // Two data rows.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("applications command single-point outputs") {
  const RunResult g = run("applications --channel " + kData +
                          "/zchannel.spec --kind guesswork --s 1 --rate 0.35");
  CHECK(g.exit_code == 0);
  CHECK(grep_value(g.stdout_text, "beta") == 0.5);

  const RunResult c = run("applications --channel " + kData +
                          "/bsc.spec --kind chernoff --rate 0.7");
  CHECK(c.exit_code == 0);
  CHECK(grep_value(c.stdout_text, "xi") <= 1e-4);

  const RunResult n = run("applications --channel " + kData +
                          "/zchannel.spec --kind renyi --beta 2 --rate 0.35");
  CHECK(n.exit_code == 0);
  CHECK(n.stdout_text.find("heuristic: no") != std::string::npos);
}
