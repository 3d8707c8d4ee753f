#ifndef RCFE_TESTS_GRID_ORACLE_HPP
#define RCFE_TESTS_GRID_ORACLE_HPP

// Brute-force reference values for the branch objectives, independent of the
// production solver: exhaustive grids over the conditional rows at 1e-3
// resolution with local refinement. Only the raw channel matrix and input
// distribution are consumed; every formula is restated here on purpose.
//
// Supports channels whose rows have at most two support letters (each free
// row is then a single scalar), which covers the binary test channels.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "rcfe/channel.hpp"

namespace rcfe::testing {

struct OracleChannel {
  std::vector<double> px;
  std::vector<std::vector<double>> w;            // w[x][y]
  std::vector<std::vector<int>> support;         // per row
  std::vector<int> free_rows;                    // rows with 2 support letters

  explicit OracleChannel(const Channel& ch) {
    const auto& mat = ch.transition();
    for (Eigen::Index x = 0; x < mat.rows(); ++x) {
      px.push_back(ch.input_dist()[x]);
      std::vector<double> row;
      std::vector<int> sup;
      for (Eigen::Index y = 0; y < mat.cols(); ++y) {
        row.push_back(mat(x, y));
        if (mat(x, y) > 0.0) sup.push_back(static_cast<int>(y));
      }
      if (sup.size() > 2) {
        throw std::runtime_error("grid oracle: rows must have <= 2 support letters");
      }
      if (sup.size() == 2) free_rows.push_back(static_cast<int>(x));
      w.push_back(row);
      support.push_back(sup);
    }
  }

  std::size_t ny() const { return w.front().size(); }

  // params[i] = probability of the first support letter in free row i.
  std::vector<std::vector<double>> build(const std::vector<double>& params) const {
    std::vector<std::vector<double>> q(w.size(), std::vector<double>(ny(), 0.0));
    std::size_t k = 0;
    for (std::size_t x = 0; x < w.size(); ++x) {
      if (support[x].size() == 1) {
        q[x][static_cast<std::size_t>(support[x][0])] = 1.0;
      } else {
        const double p = params[k++];
        q[x][static_cast<std::size_t>(support[x][0])] = p;
        q[x][static_cast<std::size_t>(support[x][1])] = 1.0 - p;
      }
    }
    return q;
  }
};

inline double oracle_h(const std::vector<double>& p) {
  double h = 0.0;
  for (const double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

inline double oracle_mi(const OracleChannel& oc,
                        const std::vector<std::vector<double>>& q) {
  std::vector<double> m(oc.ny(), 0.0);
  double h_rows = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    for (std::size_t y = 0; y < oc.ny(); ++y) m[y] += oc.px[x] * q[x][y];
    h_rows += oc.px[x] * oracle_h(q[x]);
  }
  return oracle_h(m) - h_rows;
}

inline double oracle_d(const OracleChannel& oc,
                       const std::vector<std::vector<double>>& q) {
  double d = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    for (std::size_t y = 0; y < oc.ny(); ++y) {
      if (q[x][y] > 0.0) d += oc.px[x] * q[x][y] * std::log(q[x][y] / oc.w[x][y]);
    }
  }
  return d;
}

// (1-beta) H_Q(Y) - beta D, the bulk objective.
inline double oracle_bulk_obj(const OracleChannel& oc, double beta,
                              const std::vector<std::vector<double>>& q) {
  std::vector<double> m(oc.ny(), 0.0);
  for (std::size_t x = 0; x < q.size(); ++x) {
    for (std::size_t y = 0; y < oc.ny(); ++y) m[y] += oc.px[x] * q[x][y];
  }
  return (1.0 - beta) * oracle_h(m) - beta * oracle_d(oc, q);
}

// F(Q) = (1-beta) H_Q(Y|X) - beta D.
inline double oracle_f(const OracleChannel& oc, double beta,
                       const std::vector<std::vector<double>>& q) {
  double f = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    double d_row = 0.0;
    for (std::size_t y = 0; y < oc.ny(); ++y) {
      if (q[x][y] > 0.0) d_row += q[x][y] * std::log(q[x][y] / oc.w[x][y]);
    }
    f += oc.px[x] * ((1.0 - beta) * oracle_h(q[x]) - beta * d_row);
  }
  return f;
}

enum class MiConstraint { none, at_most, at_least };

struct OracleBest {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> params;
  bool found = false;
};

template <typename Objective>
void oracle_scan(const OracleChannel& oc, const Objective& objective,
                 MiConstraint kind, double rate, std::vector<double>& params,
                 std::size_t coord, double lo, double hi, double step,
                 OracleBest& best) {
  if (coord == params.size()) {
    const auto q = oc.build(params);
    if (kind == MiConstraint::at_most && oracle_mi(oc, q) > rate) return;
    if (kind == MiConstraint::at_least && oracle_mi(oc, q) < rate) return;
    const double v = objective(q);
    if (!best.found || v > best.value) {
      best.value = v;
      best.params = params;
      best.found = true;
    }
    return;
  }
  for (double p = lo; p <= hi + 0.5 * step; p += step) {
    params[coord] = std::min(std::max(p, 0.0), 1.0);
    oracle_scan(oc, objective, kind, rate, params, coord + 1, lo, hi, step,
                best);
  }
}

// Exhaustive 1e-3 grid over all free rows, then three rounds of local
// refinement (100x finer window around the incumbent each round).
template <typename Objective>
OracleBest oracle_maximize(const OracleChannel& oc, const Objective& objective,
                           MiConstraint kind = MiConstraint::none,
                           double rate = 0.0) {
  std::vector<double> params(oc.free_rows.size(), 0.0);
  OracleBest best;
  oracle_scan(oc, objective, kind, rate, params, 0, 0.0, 1.0, 1e-3, best);
  double step = 1e-3;
  for (int round = 0; round < 3 && best.found; ++round) {
    const double fine = step / 100.0;
    OracleBest refined = best;
    std::vector<double> scratch = best.params;
    for (std::size_t coord = 0; coord < scratch.size(); ++coord) {
      const double center = refined.params[coord];
      for (double p = std::max(center - step, 0.0);
           p <= std::min(center + step, 1.0) + 0.5 * fine; p += fine) {
        scratch = refined.params;
        scratch[coord] = std::min(std::max(p, 0.0), 1.0);
        const auto q = oc.build(scratch);
        if (kind == MiConstraint::at_most && oracle_mi(oc, q) > rate) continue;
        if (kind == MiConstraint::at_least && oracle_mi(oc, q) < rate) continue;
        const double v = objective(q);
        if (v > refined.value) {
          refined.value = v;
          refined.params = scratch;
        }
      }
    }
    best = refined;
    step = fine;
  }
  return best;
}

inline OracleBest oracle_bulk(const Channel& ch, double beta,
                              MiConstraint kind = MiConstraint::none,
                              double rate = 0.0) {
  OracleChannel oc(ch);
  return oracle_maximize(
      oc, [&](const auto& q) { return oracle_bulk_obj(oc, beta, q); }, kind,
      rate);
}

inline OracleBest oracle_sparse_f(const Channel& ch, double beta,
                                  MiConstraint kind = MiConstraint::none,
                                  double rate = 0.0) {
  OracleChannel oc(ch);
  return oracle_maximize(
      oc, [&](const auto& q) { return oracle_f(oc, beta, q); }, kind, rate);
}

}  // namespace rcfe::testing

#endif  // RCFE_TESTS_GRID_ORACLE_HPP
