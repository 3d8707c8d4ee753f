#ifndef RCFE_ORACLE_HPP
#define RCFE_ORACLE_HPP

#include <vector>

#include "rcfe/ensemble.hpp"

namespace rcfe {

// Brute-force ground truth at tiny scale. Two independent exact routes to
// E[Z_n(beta)] are provided on purpose: full codebook enumeration and the
// per-output atom-law expansion. Neither shares math with the other, so
// agreement between them anchors every asymptotic claim downstream.

/// Distribution of a single-codeword likelihood W^n(y^n | X^n) for X^n
/// uniform on the type class, grouped by conditional joint type.
struct AtomLaw {
  std::vector<double> values;  // possible W^n(y^n | x^n)
  std::vector<double> probs;   // exact type-class count ratios
};

// All sequences of the composition multiset, in lexicographic order.
std::vector<Codeword> enumerate_type_class(const std::vector<int>& composition);

double log_type_class_size(const std::vector<int>& composition);

AtomLaw atom_law(const Channel& ch, const std::vector<int>& composition,
                 const Codeword& y_ref);

inline constexpr double kEnumCodebookCap = 1e7;
inline constexpr double kAtomAllocationCap = 1e7;
inline constexpr long long kBinomialTrialCap = 1000000;

// (1/n) log of the exact average of Z_n(beta) over all |T(P_X)|^M
// equiprobable codebooks. FeasibilityError above kEnumCodebookCap.
Nats exact_annealed_enum(const CodebookSpec& spec, double beta);

// Same expectation through E[S(y^n)^beta] expanded over multinomial
// allocations of the M draws to atom-law classes.
Nats exact_annealed_atoms(const CodebookSpec& spec, double beta);

// sum_k C(trials, k) p^k (1-p)^{trials-k} k^beta, truncated at cumulative
// probability 1 - 1e-15 (terms beyond that are negligible at the cap).
double exact_binomial_moment(long long trials, double p, double beta);

}  // namespace rcfe

#endif  // RCFE_ORACLE_HPP
