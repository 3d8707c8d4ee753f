#ifndef RCFE_ENSEMBLE_HPP
#define RCFE_ENSEMBLE_HPP

#include <cstdint>
#include <vector>

#include "rcfe/channel.hpp"
#include "rcfe/rng.hpp"
#include "rcfe/types.hpp"

namespace rcfe {

using Codeword = std::vector<int>;
using Codebook = std::vector<Codeword>;

// Largest-remainder rounding of n * px to integer counts summing to n;
// remainder ties break toward the lower letter index.
std::vector<int> composition_counts(const Vector& px, int n);

/// Fixed-composition random-codebook ensemble at block length n: M codewords
/// drawn independently and uniformly from the type class of the rounded
/// composition. When built from a rate, M = floor(e^{nR}).
///
/// The effective input distribution is composition/n; asymptotic formulas
/// should be evaluated there, not at the user's P_X, to avoid O(1/n) bias.
struct CodebookSpec {
  const Channel* channel = nullptr;
  int block_length = 0;
  long long codeword_count = 0;
  double rate = 0.0;
  std::vector<int> composition;

  static CodebookSpec from_count(const Channel& ch, int n, long long m);
  static CodebookSpec from_rate(const Channel& ch, int n, double rate);

  Vector effective_input_dist() const;
};

// Uniform draw from the type class: a Fisher-Yates shuffle of the fixed
// composition multiset.
Codeword sample_codeword(const CodebookSpec& spec, SplitMix64& rng);
Codebook sample_codebook(const CodebookSpec& spec, SplitMix64& rng);

inline constexpr std::int64_t kOutputEnumerationCap = std::int64_t{1} << 24;

// Exact log Z_n(beta | codebook): a streaming log-sum-exp over all |Y|^n
// output sequences. Refuses (FeasibilityError) above the enumeration cap.
Nats partition_function(const Channel& ch, const Codebook& codebook,
                        double beta,
                        std::int64_t cap = kOutputEnumerationCap);

struct EnsembleReport {
  int block_length = 0;
  long long codeword_count = 0;
  double rate = 0.0;
  double beta = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
  double annealed_exponent = 0.0;  // (1/n) log (sample mean of Z)
  double annealed_stderr = 0.0;    // delta-method stderr of that exponent
  double quenched_mean = 0.0;      // sample mean of (1/n) log Z
  double quenched_std = 0.0;
  double quenched_stderr = 0.0;
  std::vector<double> per_trial;   // (1/n) log Z, one entry per trial
};

EnsembleReport estimate_annealed(const CodebookSpec& spec, double beta,
                                 long long trials, std::uint64_t seed,
                                 int threads = 1);
EnsembleReport estimate_quenched(const CodebookSpec& spec, double beta,
                                 long long trials, std::uint64_t seed,
                                 int threads = 1);

struct EnumeratorReport {
  int block_length = 0;
  long long codeword_count = 0;
  double beta = 0.0;
  long long trials = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXi joint_counts;   // n * Q_XY, margins = composition / y-type
  double mutual_info_q = 0.0;     // I_Q of the joint type
  double single_draw_prob = 0.0;  // |T(Q_{X|Y}|y_ref)| / |T(P_X)|
  double empirical_moment = 0.0;  // sample mean of N(Q|y_ref)^beta
  double empirical_stderr = 0.0;
  double exact_moment = 0.0;      // exact binomial moment at (M, p)
  double lemma_exponent = 0.0;    // two-regime prediction, A = (1/n) log M
};

// Moments of the type-class enumerator N(Q_XY | y_ref) over random
// codebooks, against the exact Binomial(M, p) law.
EnumeratorReport enumerator_moment(const CodebookSpec& spec,
                                   const Codeword& y_ref,
                                   const Eigen::MatrixXi& joint_counts,
                                   double beta, long long trials,
                                   std::uint64_t seed, int threads = 1);

}  // namespace rcfe

#endif  // RCFE_ENSEMBLE_HPP
