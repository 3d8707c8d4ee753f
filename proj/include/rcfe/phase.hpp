#ifndef RCFE_PHASE_HPP
#define RCFE_PHASE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcfe/solver.hpp"

namespace rcfe {

// Quadrant regions for beta >= 1, split by the three boundary curves.
// Ties go to the lower region: R <= i_bulk -> D, then R <= r_star -> C,
// then R <= i_sparse -> B, else A.
enum class Region { A, B, C, D, undefined_beta_lt_1 };

const char* to_string(Region r);

struct PhasePoint {
  double beta = 0.0;
  double rate = 0.0;
  Nats psi_bulk;
  Nats psi_sparse;
  Nats psi_total;  // max of the two branches, exactly
  Region region = Region::undefined_beta_lt_1;
  Nats i_bulk;
  Nats i_sparse;
  std::optional<Nats> r_star;  // defined for beta >= 1 only
};

/// Total free energy at one (beta, R) point. Both branches are computed for
/// any beta > 0; the boundary fields and the region label are populated only
/// for beta >= 1 (detected within 1e-9).
PhasePoint psi_total(const Channel& ch, double beta, double rate,
                     const SolverConfig& cfg = {});

// R*(beta) = (C(beta) - psi_bu(beta)) / (beta - 1) for beta > 1, and the
// channel mutual information at beta = 1. Domain error for beta < 1.
Nats r_star(const Channel& ch, double beta, const SolverConfig& cfg = {});

Region classify_region(const Channel& ch, double beta, double rate,
                       const SolverConfig& cfg = {});

/// Column-oriented sample table, the carrier for boundary and branch curves.
struct CurveTable {
  std::string axis_name;
  std::vector<double> axis;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> columns;  // column-major, axis-aligned
  std::uint64_t channel_hash = 0;
  std::string config_summary;
  std::uint64_t seed = 0;
};

// Columns i_bulk, r_star, i_sparse over a sorted beta grid in [1, 64].
CurveTable boundary_curves(const Channel& ch,
                           const std::vector<double>& beta_grid,
                           const SolverConfig& cfg = {});

// Columns psi_bulk, psi_sparse, psi_total, psi_iid at fixed R over a sorted
// positive beta grid.
CurveTable branch_curves(const Channel& ch, double rate,
                         const std::vector<double>& beta_grid,
                         const SolverConfig& cfg = {});

std::string solver_config_summary(const SolverConfig& cfg);

}  // namespace rcfe

#endif  // RCFE_PHASE_HPP
