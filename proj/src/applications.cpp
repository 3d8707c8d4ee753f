#include "rcfe/applications.hpp"

#include <cmath>

namespace rcfe {

namespace {

// psi(beta, R) can have kinks at branch crossings, so the maximization is
// derivative-free: a fixed grid bracket followed by golden-section.
constexpr int kChernoffGridPoints = 101;
constexpr double kChernoffBetaTol = 1e-6;
// The branch formulas need beta > 0; the beta = 0 endpoint is evaluated just
// inside the domain (the objective is continuous there).
constexpr double kBetaFloor = 1e-9;

double total_free_energy(const Channel& ch, double beta, double rate,
                         const SolverConfig& cfg) {
  const double b = std::max(beta, kBetaFloor);
  const BranchResult bulk = psi_bulk(ch, b, rate, cfg);
  const BranchResult sparse = psi_sparse(ch, b, rate, cfg);
  return max(bulk.value, sparse.value).as_double();
}

}  // namespace

ChernoffResult chernoff_exponent(const Channel& ch, double rate,
                                 const SolverConfig& cfg) {
  if (!(rate > 0.0)) {
    throw std::domain_error("chernoff_exponent: rate must be > 0");
  }
  const double log_y = std::log(static_cast<double>(ch.output_size()));
  auto objective = [&](double beta) {
    return (1.0 - beta) * log_y - total_free_energy(ch, beta, rate, cfg);
  };

  double best_beta = 1.0;
  double best_value = objective(1.0);
  int best_index = kChernoffGridPoints - 1;
  std::vector<double> grid_values(kChernoffGridPoints);
  for (int i = 0; i < kChernoffGridPoints; ++i) {
    const double beta =
        static_cast<double>(i) / static_cast<double>(kChernoffGridPoints - 1);
    grid_values[i] = (i == kChernoffGridPoints - 1) ? best_value
                                                    : objective(beta);
    if (grid_values[i] > best_value) {
      best_value = grid_values[i];
      best_beta = beta;
      best_index = i;
    }
  }

  // Golden-section refinement on the bracketing interval.
  const double step = 1.0 / static_cast<double>(kChernoffGridPoints - 1);
  double lo = std::max(best_beta - step, 0.0);
  double hi = std::min(best_beta + step, 1.0);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  while (hi - lo > kChernoffBetaTol) {
    if (fa > fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = objective(b);
    }
  }
  const double refined = 0.5 * (lo + hi);
  const double refined_value = objective(refined);
  if (refined_value > best_value) {
    best_value = refined_value;
    best_beta = refined;
  }
  (void)best_index;

  ChernoffResult out;
  out.xi = Nats(std::max(best_value, 0.0));
  out.beta_star = best_beta;
  out.rate = rate;
  return out;
}

RenyiRateResult renyi_rate(const Channel& ch, double beta, double rate,
                           const SolverConfig& cfg) {
  if (std::abs(beta - 1.0) < 1e-9) {
    throw std::domain_error("renyi_rate: beta = 1 is excluded (0/0)");
  }
  if (!(beta > 0.0)) throw std::domain_error("renyi_rate: beta must be > 0");
  if (!(rate > 0.0)) throw std::domain_error("renyi_rate: rate must be > 0");

  const BranchResult bulk = psi_bulk(ch, beta, rate, cfg);
  RenyiRateResult out;
  out.beta = beta;
  out.rate = rate;
  if (!bulk.feasible) {
    out.value = beta > 1.0 ? Nats::pos_inf() : Nats::neg_inf();
    out.heuristic = true;
    return out;
  }
  out.value = Nats(bulk.value.value() / (1.0 - beta));
  if (beta >= 1.0) {
    const Nats rs = r_star(ch, beta, cfg);
    out.heuristic = !(rate > rs.value());
  } else {
    out.heuristic = true;
  }
  return out;
}

GuessworkResult guesswork_exponent(const Channel& ch, double s, double rate,
                                   const SolverConfig& cfg) {
  if (!(s > 0.0)) throw std::domain_error("guesswork_exponent: s must be > 0");
  if (!(rate > 0.0)) {
    throw std::domain_error("guesswork_exponent: rate must be > 0");
  }
  GuessworkResult out;
  out.s = s;
  out.beta = 1.0 / (1.0 + s);
  // s/(1-beta) = 1+s at beta = 1/(1+s).
  out.exponent =
      Nats((1.0 + s) * total_free_energy(ch, out.beta, rate, cfg));
  return out;
}

}  // namespace rcfe
