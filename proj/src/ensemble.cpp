#include "rcfe/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcfe/logsum.hpp"
#include "rcfe/oracle.hpp"
#include "rcfe/parallel.hpp"

namespace rcfe {

std::vector<int> composition_counts(const Vector& px, int n) {
  const Index k = px.size();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  std::vector<std::pair<double, Index>> remainders;
  int assigned = 0;
  for (Index i = 0; i < k; ++i) {
    const double quota = px[i] * n;
    const int base = static_cast<int>(std::floor(quota));
    counts[static_cast<std::size_t>(i)] = base;
    assigned += base;
    remainders.emplace_back(quota - base, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return a.second < b.second;
                   });
  for (int extra = 0; extra < n - assigned; ++extra) {
    counts[static_cast<std::size_t>(
        remainders[static_cast<std::size_t>(extra)].second)] += 1;
  }
  return counts;
}

CodebookSpec CodebookSpec::from_count(const Channel& ch, int n, long long m) {
  if (n < 1) throw ValidationError("codebook spec: block length must be >= 1");
  if (m < 1) throw ValidationError("codebook spec: M must be >= 1");
  CodebookSpec spec;
  spec.channel = &ch;
  spec.block_length = n;
  spec.codeword_count = m;
  spec.rate = std::log(static_cast<double>(m)) / n;
  spec.composition = composition_counts(ch.input_dist(), n);
  return spec;
}

CodebookSpec CodebookSpec::from_rate(const Channel& ch, int n, double rate) {
  if (!(rate > 0.0)) throw ValidationError("codebook spec: rate must be > 0");
  const double m_real = std::exp(rate * n);
  if (m_real >= 9.0e18) {
    throw FeasibilityError("codebook spec: floor(e^{nR}) overflows");
  }
  CodebookSpec spec = from_count(
      ch, n, std::max<long long>(1, static_cast<long long>(std::floor(m_real))));
  spec.rate = rate;
  return spec;
}

Vector CodebookSpec::effective_input_dist() const {
  Vector p(static_cast<Index>(composition.size()));
  for (std::size_t i = 0; i < composition.size(); ++i) {
    p[static_cast<Index>(i)] =
        static_cast<double>(composition[i]) / block_length;
  }
  return p;
}

Codeword sample_codeword(const CodebookSpec& spec, SplitMix64& rng) {
  Codeword word;
  word.reserve(static_cast<std::size_t>(spec.block_length));
  for (std::size_t letter = 0; letter < spec.composition.size(); ++letter) {
    word.insert(word.end(),
                static_cast<std::size_t>(spec.composition[letter]),
                static_cast<int>(letter));
  }
  for (std::size_t i = word.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(word[i - 1], word[j]);
  }
  return word;
}

Codebook sample_codebook(const CodebookSpec& spec, SplitMix64& rng) {
  Codebook book;
  book.reserve(static_cast<std::size_t>(spec.codeword_count));
  for (long long m = 0; m < spec.codeword_count; ++m) {
    book.push_back(sample_codeword(spec, rng));
  }
  return book;
}

Nats partition_function(const Channel& ch, const Codebook& codebook,
                        double beta, std::int64_t cap) {
  if (codebook.empty()) {
    throw ValidationError("partition_function: empty codebook");
  }
  if (!(beta > 0.0)) {
    throw std::domain_error("partition_function: beta must be > 0");
  }
  const int n = static_cast<int>(codebook.front().size());
  const Index ny = ch.output_size();
  std::int64_t total_outputs = 1;
  for (int i = 0; i < n; ++i) {
    if (total_outputs > cap / ny) {
      throw FeasibilityError(
          "partition_function: |Y|^n exceeds the enumeration cap " +
          std::to_string(cap));
    }
    total_outputs *= ny;
  }
  const Index m_count = static_cast<Index>(codebook.size());
  const double log_m = std::log(static_cast<double>(m_count));

  // Per-codeword likelihoods factor over positions. The depth-first walk
  // below keeps them in the linear domain when the smallest per-letter
  // factor cannot underflow over n letters, and falls back to log-domain
  // accumulation otherwise. The outer sum over outputs is a streaming
  // log-sum-exp either way.
  double min_log_w = 0.0;
  for (Index x = 0; x < ch.input_size(); ++x) {
    for (Index y : ch.row_support()[static_cast<std::size_t>(x)]) {
      min_log_w = std::min(min_log_w, ch.log_transition()(x, y));
    }
  }
  const bool linear_ok = n * (-min_log_w) < 600.0;

  LogSumAccumulator acc;
  std::vector<Index> digit(static_cast<std::size_t>(n), 0);
  if (linear_ok) {
    // inc(y, m) = W(y | x_i(m)) per position.
    std::vector<Matrix> increments(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Matrix inc(ny, m_count);
      for (Index m = 0; m < m_count; ++m) {
        const int x = codebook[static_cast<std::size_t>(m)]
                              [static_cast<std::size_t>(i)];
        for (Index y = 0; y < ny; ++y) inc(y, m) = ch.transition()(x, y);
      }
      increments[static_cast<std::size_t>(i)] = std::move(inc);
    }
    std::vector<Vector> levels(static_cast<std::size_t>(n) + 1,
                               Vector(m_count));
    levels[0].setOnes();
    int depth = 0;
    while (depth >= 0) {
      if (depth == n) {
        const double total = levels[static_cast<std::size_t>(n)].sum();
        if (total > 0.0) acc.add(beta * (std::log(total) - log_m));
        --depth;
        continue;
      }
      Index& y = digit[static_cast<std::size_t>(depth)];
      if (y >= ny) {
        y = 0;
        --depth;
        continue;
      }
      levels[static_cast<std::size_t>(depth) + 1] =
          levels[static_cast<std::size_t>(depth)].cwiseProduct(
              increments[static_cast<std::size_t>(depth)].row(y).transpose());
      ++y;
      ++depth;
    }
  } else {
    std::vector<Matrix> increments(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Matrix inc(ny, m_count);
      for (Index m = 0; m < m_count; ++m) {
        const int x = codebook[static_cast<std::size_t>(m)]
                              [static_cast<std::size_t>(i)];
        for (Index y = 0; y < ny; ++y) inc(y, m) = ch.log_transition()(x, y);
      }
      increments[static_cast<std::size_t>(i)] = std::move(inc);
    }
    std::vector<Vector> levels(static_cast<std::size_t>(n) + 1,
                               Vector(m_count));
    levels[0].setZero();
    int depth = 0;
    while (depth >= 0) {
      if (depth == n) {
        const double lse = log_sum_exp(levels[static_cast<std::size_t>(n)]);
        if (std::isfinite(lse)) acc.add(beta * (lse - log_m));
        --depth;
        continue;
      }
      Index& y = digit[static_cast<std::size_t>(depth)];
      if (y >= ny) {
        y = 0;
        --depth;
        continue;
      }
      levels[static_cast<std::size_t>(depth) + 1] =
          levels[static_cast<std::size_t>(depth)] +
          increments[static_cast<std::size_t>(depth)].row(y).transpose();
      ++y;
      ++depth;
    }
  }
  return Nats(acc.result());
}

namespace {

EnsembleReport run_ensemble(const CodebookSpec& spec, double beta,
                            long long trials, std::uint64_t seed,
                            int threads) {
  if (trials < 1) throw ValidationError("ensemble: trials must be >= 1");
  const int n = spec.block_length;
  std::vector<double> log_z(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    SplitMix64 rng = trial_stream(seed, t);
    const Codebook book = sample_codebook(spec, rng);
    log_z[t] = partition_function(*spec.channel, book, beta).value();
  });

  EnsembleReport report;
  report.block_length = n;
  report.codeword_count = spec.codeword_count;
  report.rate = spec.rate;
  report.beta = beta;
  report.trials = trials;
  report.seed = seed;
  report.per_trial.resize(log_z.size());
  for (std::size_t t = 0; t < log_z.size(); ++t) {
    report.per_trial[t] = log_z[t] / n;
  }

  const double log_mean =
      log_sum_exp_pairwise(log_z) - std::log(static_cast<double>(trials));
  report.annealed_exponent = log_mean / n;

  CompensatedSum var_ratio;
  CompensatedSum mean_u;
  for (std::size_t t = 0; t < log_z.size(); ++t) {
    const double r = std::exp(log_z[t] - log_mean) - 1.0;
    var_ratio.add(r * r);
    mean_u.add(report.per_trial[t]);
  }
  if (trials > 1) {
    const double var =
        var_ratio.result() / static_cast<double>(trials - 1);
    report.annealed_stderr =
        std::sqrt(var / static_cast<double>(trials)) / n;
  }
  report.quenched_mean = mean_u.result() / static_cast<double>(trials);
  if (trials > 1) {
    CompensatedSum ss;
    for (const double u : report.per_trial) {
      const double d = u - report.quenched_mean;
      ss.add(d * d);
    }
    report.quenched_std =
        std::sqrt(ss.result() / static_cast<double>(trials - 1));
    report.quenched_stderr =
        report.quenched_std / std::sqrt(static_cast<double>(trials));
  }
  return report;
}

}  // namespace

EnsembleReport estimate_annealed(const CodebookSpec& spec, double beta,
                                 long long trials, std::uint64_t seed,
                                 int threads) {
  return run_ensemble(spec, beta, trials, seed, threads);
}

EnsembleReport estimate_quenched(const CodebookSpec& spec, double beta,
                                 long long trials, std::uint64_t seed,
                                 int threads) {
  return run_ensemble(spec, beta, trials, seed, threads);
}

EnumeratorReport enumerator_moment(const CodebookSpec& spec,
                                   const Codeword& y_ref,
                                   const Eigen::MatrixXi& joint_counts,
                                   double beta, long long trials,
                                   std::uint64_t seed, int threads) {
  const Channel& ch = *spec.channel;
  const int n = spec.block_length;
  if (static_cast<int>(y_ref.size()) != n) {
    throw ValidationError("enumerator: y_ref length differs from n");
  }
  if (joint_counts.rows() != ch.input_size() ||
      joint_counts.cols() != ch.output_size()) {
    throw ValidationError("enumerator: joint count shape mismatch");
  }
  std::vector<long long> y_type(static_cast<std::size_t>(ch.output_size()), 0);
  for (const int y : y_ref) {
    if (y < 0 || y >= ch.output_size()) {
      throw ValidationError("enumerator: y_ref letter out of range");
    }
    y_type[static_cast<std::size_t>(y)] += 1;
  }
  long long total = 0;
  for (Index x = 0; x < joint_counts.rows(); ++x) {
    long long row_sum = 0;
    for (Index y = 0; y < joint_counts.cols(); ++y) {
      if (joint_counts(x, y) < 0) {
        throw ValidationError("enumerator: negative joint count");
      }
      row_sum += joint_counts(x, y);
      total += joint_counts(x, y);
    }
    if (row_sum != spec.composition[static_cast<std::size_t>(x)]) {
      throw ValidationError(
          "enumerator: joint type X-marginal differs from the composition");
    }
  }
  if (total != n) {
    throw ValidationError("enumerator: joint counts do not sum to n");
  }
  for (Index y = 0; y < joint_counts.cols(); ++y) {
    long long col_sum = 0;
    for (Index x = 0; x < joint_counts.rows(); ++x) {
      col_sum += joint_counts(x, y);
    }
    if (col_sum != y_type[static_cast<std::size_t>(y)]) {
      throw ValidationError(
          "enumerator: joint type Y-marginal differs from the type of y_ref");
    }
  }

  // Exact single-draw probability: |T(Q_{X|Y} | y_ref)| / |T(P_X)|.
  double log_conditional = 0.0;
  for (Index y = 0; y < joint_counts.cols(); ++y) {
    log_conditional +=
        std::lgamma(static_cast<double>(y_type[static_cast<std::size_t>(y)]) +
                    1.0);
    for (Index x = 0; x < joint_counts.rows(); ++x) {
      log_conditional -=
          std::lgamma(static_cast<double>(joint_counts(x, y)) + 1.0);
    }
  }
  double log_type_class = std::lgamma(static_cast<double>(n) + 1.0);
  for (const int c : spec.composition) {
    log_type_class -= std::lgamma(static_cast<double>(c) + 1.0);
  }
  const double p = std::exp(log_conditional - log_type_class);

  // Empirical moment of N over random codebooks.
  std::vector<double> moments(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    SplitMix64 rng = trial_stream(seed, t);
    long long count = 0;
    Eigen::MatrixXi c(ch.input_size(), ch.output_size());
    for (long long m = 0; m < spec.codeword_count; ++m) {
      const Codeword word = sample_codeword(spec, rng);
      c.setZero();
      for (int i = 0; i < n; ++i) {
        c(word[static_cast<std::size_t>(i)],
          y_ref[static_cast<std::size_t>(i)]) += 1;
      }
      if (c == joint_counts) ++count;
    }
    moments[t] =
        count == 0 ? 0.0
                   : std::exp(beta * std::log(static_cast<double>(count)));
  });
  CompensatedSum sum;
  for (const double m : moments) sum.add(m);
  const double empirical = sum.result() / static_cast<double>(trials);
  double stderr_emp = 0.0;
  if (trials > 1) {
    CompensatedSum ss;
    for (const double m : moments) {
      const double d = m - empirical;
      ss.add(d * d);
    }
    stderr_emp = std::sqrt(ss.result() / static_cast<double>(trials - 1) /
                           static_cast<double>(trials));
  }

  // I_Q from the joint type itself.
  double mi_q = 0.0;
  for (Index x = 0; x < joint_counts.rows(); ++x) {
    for (Index y = 0; y < joint_counts.cols(); ++y) {
      if (joint_counts(x, y) == 0) continue;
      const double q = static_cast<double>(joint_counts(x, y)) / n;
      const double qx =
          static_cast<double>(spec.composition[static_cast<std::size_t>(x)]) /
          n;
      const double qy =
          static_cast<double>(y_type[static_cast<std::size_t>(y)]) / n;
      mi_q += q * std::log(q / (qx * qy));
    }
  }

  EnumeratorReport report;
  report.block_length = n;
  report.codeword_count = spec.codeword_count;
  report.beta = beta;
  report.trials = trials;
  report.seed = seed;
  report.joint_counts = joint_counts;
  report.mutual_info_q = mi_q;
  report.single_draw_prob = p;
  report.empirical_moment = empirical;
  report.empirical_stderr = stderr_emp;
  report.exact_moment = exact_binomial_moment(spec.codeword_count, p, beta);
  const double a = std::log(static_cast<double>(spec.codeword_count)) / n;
  report.lemma_exponent = a > mi_q ? beta * (a - mi_q) : -(mi_q - a);
  return report;
}

}  // namespace rcfe
