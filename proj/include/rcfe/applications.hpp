#ifndef RCFE_APPLICATIONS_HPP
#define RCFE_APPLICATIONS_HPP

#include "rcfe/phase.hpp"

namespace rcfe {

/// Chernoff exponent for testing the code-induced output mixture against the
/// uniform i.i.d. reference on Y^n:
///   xi(R) = max_{0 <= beta <= 1} [(1-beta) log|Y| - psi(beta, R)].
struct ChernoffResult {
  Nats xi;           // >= 0; tiny negatives are clamped
  double beta_star;  // maximizing beta in [0, 1]
  double rate;
};

ChernoffResult chernoff_exponent(const Channel& ch, double rate,
                                 const SolverConfig& cfg = {});

/// Per-letter Renyi entropy rate of the typical-codebook output mixture,
/// psi_b(beta, R) / (1 - beta). Outside beta >= 1, R > R*(beta) the
/// self-averaging identification is unproven and the value is flagged
/// heuristic.
struct RenyiRateResult {
  Nats value;
  bool heuristic = false;
  double beta = 0.0;
  double rate = 0.0;
};

RenyiRateResult renyi_rate(const Channel& ch, double beta, double rate,
                           const SolverConfig& cfg = {});

/// Guesswork moment exponent: E[G^s] grows like exp(n * exponent) with
/// exponent = (s / (1-beta)) psi(beta, R) = (1+s) psi(beta, R) at
/// beta = 1/(1+s).
struct GuessworkResult {
  double s = 0.0;
  double beta = 0.0;  // 1 / (1 + s)
  Nats exponent;
};

GuessworkResult guesswork_exponent(const Channel& ch, double s, double rate,
                                   const SolverConfig& cfg = {});

}  // namespace rcfe

#endif  // RCFE_APPLICATIONS_HPP
