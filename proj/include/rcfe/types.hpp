#ifndef RCFE_TYPES_HPP
#define RCFE_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rcfe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Probability-vector tolerance at load time (user input).
inline constexpr double kProbTolLoad = 1e-12;
// Row tolerance for distributions produced by optimization steps.
inline constexpr double kProbTolDerived = 1e-10;
// Mutual-information constraint tolerance for constrained branch solves.
inline constexpr double kTolMi = 1e-7;
// Numeric optimization paths refuse beta beyond this; closed forms do not.
inline constexpr double kBetaMaxNumeric = 64.0;

/// A scalar in natural-log units with an explicit infinity flag, so that
/// divergences off the channel support are represented deterministically
/// rather than through floating-point specials.
class Nats {
 public:
  constexpr Nats() = default;
  constexpr explicit Nats(double v) : value_(v), inf_(0) {}

  static constexpr Nats pos_inf() { return Nats(0.0, +1); }
  static constexpr Nats neg_inf() { return Nats(0.0, -1); }

  constexpr bool is_finite() const { return inf_ == 0; }
  constexpr bool is_pos_inf() const { return inf_ > 0; }
  constexpr bool is_neg_inf() const { return inf_ < 0; }

  // Finite value. Call only after checking is_finite().
  constexpr double value() const { return value_; }

  // Mapping with the usual IEEE infinities, handy for comparisons.
  double as_double() const {
    if (inf_ > 0) return std::numeric_limits<double>::infinity();
    if (inf_ < 0) return -std::numeric_limits<double>::infinity();
    return value_;
  }

  friend bool operator<(const Nats& a, const Nats& b) {
    return a.as_double() < b.as_double();
  }
  friend bool operator>(const Nats& a, const Nats& b) { return b < a; }

 private:
  constexpr Nats(double v, int inf) : value_(v), inf_(inf) {}
  double value_ = 0.0;
  int inf_ = 0;
};

inline Nats max(const Nats& a, const Nats& b) { return a < b ? b : a; }

// Error taxonomy shared by the library and the command-line front end.

/// Malformed input: channel files or distributions violating invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric refinement failed to reach the configured tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested exact computation exceeds a hard enumeration cap.
class FeasibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rcfe

#endif  // RCFE_TYPES_HPP
