#include "rcfe/phase.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rcfe/parallel.hpp"

namespace rcfe {

namespace {

constexpr double kBetaOneTol = 1e-9;

bool is_sorted_grid(const std::vector<double>& grid) {
  return std::is_sorted(grid.begin(), grid.end()) && !grid.empty();
}

Region classify(double rate, double i_bulk, double r_star_v, double i_sparse_v) {
  if (rate <= i_bulk) return Region::D;
  if (rate <= r_star_v) return Region::C;
  if (rate <= i_sparse_v) return Region::B;
  return Region::A;
}

Nats r_star_from(const Channel& ch, double beta,
                 const BranchResult& unconstrained) {
  if (std::abs(beta - 1.0) <= kBetaOneTol) {
    return mutual_info(JointDistribution::make(ch, ch.transition()));
  }
  return Nats((c_beta(ch, beta).value() - unconstrained.value.value()) /
              (beta - 1.0));
}

}  // namespace

const char* to_string(Region r) {
  switch (r) {
    case Region::A: return "A";
    case Region::B: return "B";
    case Region::C: return "C";
    case Region::D: return "D";
    case Region::undefined_beta_lt_1: return "undefined for beta < 1";
  }
  return "?";
}

PhasePoint psi_total(const Channel& ch, double beta, double rate,
                     const SolverConfig& cfg) {
  if (!(beta > 0.0)) throw std::domain_error("psi_total: beta must be > 0");
  if (!(rate > 0.0)) throw std::domain_error("psi_total: rate must be > 0");

  PhasePoint pt;
  pt.beta = beta;
  pt.rate = rate;

  const BranchResult unconstrained = bulk_unconstrained(ch, beta, cfg);
  pt.i_bulk = unconstrained.optimizer_mi;
  pt.i_sparse = i_sparse(ch, beta);

  const BranchResult bulk = unconstrained.optimizer_mi.value() <= rate
                                ? unconstrained
                                : psi_bulk(ch, beta, rate, cfg);
  const BranchResult sparse = psi_sparse(ch, beta, rate, cfg);
  pt.psi_bulk = bulk.value;
  pt.psi_sparse = sparse.value;
  pt.psi_total = max(bulk.value, sparse.value);

  if (beta >= 1.0 - kBetaOneTol) {
    const Nats rs = r_star_from(ch, beta, unconstrained);
    pt.r_star = rs;
    pt.region = classify(rate, pt.i_bulk.value(), rs.value(),
                         pt.i_sparse.value());
  } else {
    pt.r_star.reset();
    pt.region = Region::undefined_beta_lt_1;
  }
  return pt;
}

Nats r_star(const Channel& ch, double beta, const SolverConfig& cfg) {
  if (beta < 1.0 - kBetaOneTol) {
    throw std::domain_error("r_star: defined for beta >= 1 only");
  }
  if (std::abs(beta - 1.0) <= kBetaOneTol) {
    return mutual_info(JointDistribution::make(ch, ch.transition()));
  }
  return r_star_from(ch, beta, bulk_unconstrained(ch, beta, cfg));
}

Region classify_region(const Channel& ch, double beta, double rate,
                       const SolverConfig& cfg) {
  if (beta < 1.0 - kBetaOneTol) {
    throw std::domain_error("classify_region: defined for beta >= 1 only");
  }
  const BranchResult unconstrained = bulk_unconstrained(ch, beta, cfg);
  const Nats rs = r_star_from(ch, beta, unconstrained);
  return classify(rate, unconstrained.optimizer_mi.value(), rs.value(),
                  i_sparse(ch, beta).value());
}

std::string solver_config_summary(const SolverConfig& cfg) {
  std::ostringstream os;
  os << "grid_points=" << cfg.coarse_grid_points_per_row
     << ";refine_iterations=" << cfg.refine_iterations
     << ";refine_step_init=" << cfg.refine_step_init
     << ";convergence_tol=" << cfg.convergence_tol << ";penalty_weights=";
  for (std::size_t i = 0; i < cfg.penalty_weight_schedule.size(); ++i) {
    if (i) os << ",";
    os << cfg.penalty_weight_schedule[i];
  }
  os << ";threads=" << cfg.threads;
  return os.str();
}

CurveTable boundary_curves(const Channel& ch,
                           const std::vector<double>& beta_grid,
                           const SolverConfig& cfg) {
  if (!is_sorted_grid(beta_grid) || beta_grid.front() < 1.0 - kBetaOneTol ||
      beta_grid.back() > kBetaMaxNumeric) {
    throw std::domain_error(
        "boundary_curves: beta grid must be sorted within [1, 64]");
  }
  CurveTable table;
  table.axis_name = "beta";
  table.axis = beta_grid;
  table.column_names = {"i_bulk", "r_star", "i_sparse"};
  table.columns.assign(3, std::vector<double>(beta_grid.size(), 0.0));
  table.channel_hash = ch.hash();
  table.config_summary = solver_config_summary(cfg);

  SolverConfig point_cfg = cfg;
  point_cfg.threads = 1;  // grid points are the parallel unit
  parallel_for(beta_grid.size(), cfg.threads, [&](std::size_t i) {
    const double beta = beta_grid[i];
    try {
      const BranchResult unconstrained =
          bulk_unconstrained(ch, beta, point_cfg);
      table.columns[0][i] = unconstrained.optimizer_mi.value();
      table.columns[1][i] = r_star_from(ch, beta, unconstrained).value();
      table.columns[2][i] = i_sparse(ch, beta).value();
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at beta = " +
                        std::to_string(beta));
    }
  });
  return table;
}

CurveTable branch_curves(const Channel& ch, double rate,
                         const std::vector<double>& beta_grid,
                         const SolverConfig& cfg) {
  if (!is_sorted_grid(beta_grid) || beta_grid.front() <= 0.0 ||
      beta_grid.back() > kBetaMaxNumeric) {
    throw std::domain_error(
        "branch_curves: beta grid must be sorted within (0, 64]");
  }
  if (!(rate > 0.0)) throw std::domain_error("branch_curves: rate must be > 0");

  CurveTable table;
  table.axis_name = "beta";
  table.axis = beta_grid;
  table.column_names = {"psi_bulk", "psi_sparse", "psi_total", "psi_iid"};
  table.columns.assign(4, std::vector<double>(beta_grid.size(), 0.0));
  table.channel_hash = ch.hash();
  table.config_summary = solver_config_summary(cfg);

  SolverConfig point_cfg = cfg;
  point_cfg.threads = 1;
  parallel_for(beta_grid.size(), cfg.threads, [&](std::size_t i) {
    const double beta = beta_grid[i];
    try {
      const BranchResult bulk = psi_bulk(ch, beta, rate, point_cfg);
      const BranchResult sparse = psi_sparse(ch, beta, rate, point_cfg);
      table.columns[0][i] = bulk.value.as_double();
      table.columns[1][i] = sparse.value.as_double();
      table.columns[2][i] = max(bulk.value, sparse.value).as_double();
      table.columns[3][i] = psi_iid(ch, beta).value();
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at beta = " +
                        std::to_string(beta));
    }
  });
  return table;
}

}  // namespace rcfe
