#ifndef RCFE_LOGSUM_HPP
#define RCFE_LOGSUM_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "rcfe/types.hpp"

namespace rcfe {

// log(sum_i exp(v_i)), guarded against empty/-inf inputs.
inline double log_sum_exp(const Eigen::Ref<const Vector>& v) {
  if (v.size() == 0) return -std::numeric_limits<double>::infinity();
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

/// Streaming log-sum-exp accumulator: keeps a running maximum and rescales,
/// so exponentially spread terms can be folded in one at a time.
class LogSumAccumulator {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (empty_) {
      max_ = log_term;
      sum_ = 1.0;
      empty_ = false;
      return;
    }
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }

  double result() const {
    if (empty_) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  bool empty_ = true;
  double max_ = 0.0;
  double sum_ = 0.0;
};

// Pairwise reduction of log-terms in a fixed tree; deterministic regardless
// of how the inputs were produced (e.g. by parallel workers writing slots).
inline double log_sum_exp_pairwise(std::vector<double> terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  while (terms.size() > 1) {
    std::vector<double> next;
    next.reserve((terms.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2) {
      const double a = terms[i], b = terms[i + 1];
      const double m = a > b ? a : b;
      if (!std::isfinite(m)) {
        next.push_back(m);
      } else {
        next.push_back(m + std::log(std::exp(a - m) + std::exp(b - m)));
      }
    }
    if (terms.size() % 2 == 1) next.push_back(terms.back());
    terms.swap(next);
  }
  return terms[0];
}

/// Neumaier-compensated summation for plain (linear-domain) accumulation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace rcfe

#endif  // RCFE_LOGSUM_HPP
