#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rcfe/measures.hpp"
#include "rcfe/phase.hpp"
#include "support/fixtures.hpp"

using namespace rcfe;
using namespace rcfe::testing;

namespace {

std::vector<double> linspace(double lo, double hi, double step) {
  std::vector<double> grid;
  for (double v = lo; v <= hi + 0.5 * step; v += step) grid.push_back(v);
  return grid;
}

double channel_mi(const Channel& ch) {
  return mutual_info(JointDistribution::make(ch, ch.transition())).value();
}

}  // namespace

TEST_CASE("psi_total basics") {
  const Channel z = z_channel();

  // Normalization: the total free energy vanishes on the beta = 1 line.
  for (const double rate : {0.05, 0.12, 0.2441, 0.35}) {
    const PhasePoint pt = psi_total(z, 1.0, rate);
    CHECK(std::abs(pt.psi_total.value()) < 1e-8);
  }

  // max relation holds exactly.
  for (const double beta : {0.5, 1.3, 2.0, 4.0}) {
    for (const double rate : {0.05, 0.12, 0.35}) {
      const PhasePoint pt = psi_total(z, beta, rate);
      CHECK(pt.psi_total.as_double() ==
            std::max(pt.psi_bulk.as_double(), pt.psi_sparse.as_double()));
    }
  }

  // Sparse-dominant vs bulk-dominant examples on the worked channel.
  const PhasePoint low = psi_total(z, 2.0, 0.12);
  CHECK(low.psi_total.value() == low.psi_sparse.value());
  CHECK(low.psi_sparse.value() > low.psi_bulk.value());

  const PhasePoint high = psi_total(z, 2.0, 0.35);
  CHECK(high.psi_total.value() == high.psi_bulk.value());
  CHECK(high.psi_bulk.value() > high.psi_sparse.value());
}

TEST_CASE("psi_total below beta = 1 computes branches, leaves region undefined") {
  const Channel z = z_channel();
  const PhasePoint pt = psi_total(z, 0.5, 0.2);
  CHECK(pt.region == Region::undefined_beta_lt_1);
  CHECK(!pt.r_star.has_value());
  CHECK(std::isfinite(pt.psi_total.value()));
  // C(beta) > 0 for beta < 1 on a noisy row and R(1-beta) > 0, so the sparse
  // closed form is strictly positive here.
  CHECK(pt.psi_sparse.value() > 0.0);
}

TEST_CASE("r_star closed form and special cases") {
  const Channel z = z_channel();
  const double i_xy = channel_mi(z);

  CHECK(r_star(z, 1.0).value() == doctest::Approx(i_xy).epsilon(1e-14));
  CHECK(r_star(z, 1.0 + 5e-10).value() == doctest::Approx(i_xy).epsilon(1e-14));

  // Deterministic channel: C(beta) = 0 and psi_bu = (1-beta) I_W give I_W.
  const Channel id = identity2();
  for (const double beta : {1.5, 2.0, 4.0}) {
    CHECK(r_star(id, beta).value() ==
          doctest::Approx(std::log(2.0)).epsilon(1e-9));
  }

  // Strictly between the two optimizer boundaries for beta > 1.
  const double rs2 = r_star(z, 2.0).value();
  const double ib2 = bulk_unconstrained(z, 2.0).optimizer_mi.value();
  const double is2 = i_sparse(z, 2.0).value();
  CHECK(rs2 > ib2 + 1e-5);
  CHECK(rs2 < is2 - 1e-5);
  CHECK(rs2 == doctest::Approx(0.2025827616).epsilon(1e-5));

  CHECK_THROWS_AS(r_star(z, 0.9), std::domain_error);
}

TEST_CASE("region classification") {
  const Channel z = z_channel();

  // Near the triple point everything above I(X;Y) is region A.
  CHECK(classify_region(z, 1.0, channel_mi(z) + 0.1) == Region::A);
  CHECK(classify_region(z, 1.001, channel_mi(z) + 0.1) == Region::A);

  // At beta = 2 the computed boundaries are
  // I^b = 0.1479 < R* = 0.2026 < I^s = 0.2737.
  CHECK(classify_region(z, 2.0, 0.05) == Region::D);
  CHECK(classify_region(z, 2.0, 0.12) == Region::D);
  CHECK(classify_region(z, 2.0, 0.17) == Region::C);
  CHECK(classify_region(z, 2.0, 0.22) == Region::B);
  CHECK(classify_region(z, 2.0, 0.30) == Region::A);

  CHECK_THROWS_AS(classify_region(z, 0.5, 0.2), std::domain_error);

  // Boundary ties resolve to the closed lower side.
  const double ib2 = bulk_unconstrained(z, 2.0).optimizer_mi.value();
  CHECK(classify_region(z, 2.0, ib2) == Region::D);
}

TEST_CASE("psi_total populates region per the tie convention") {
  const Channel z = z_channel();
  const PhasePoint pt = psi_total(z, 2.0, 0.12);
  CHECK(pt.region == Region::D);
  CHECK(pt.r_star.has_value());
  CHECK(pt.i_bulk.value() == doctest::Approx(0.1478768981).epsilon(1e-4));
  CHECK(pt.i_sparse.value() == doctest::Approx(0.2737387260).epsilon(1e-9));
}

TEST_CASE("boundary curves") {
  const Channel z = z_channel();
  const double i_xy = channel_mi(z);

  // Triple point: a single-point grid at beta = 1.
  const CurveTable at1 = boundary_curves(z, {1.0});
  CHECK(at1.columns[0][0] == doctest::Approx(i_xy).epsilon(1e-4));
  CHECK(at1.columns[1][0] == doctest::Approx(i_xy).epsilon(1e-4));
  CHECK(at1.columns[2][0] == doctest::Approx(i_xy).epsilon(1e-4));
  CHECK(at1.columns[0][0] == doctest::Approx(0.2441).epsilon(2e-3));

  // Column-wise ordering over a coarse grid.
  const CurveTable curves = boundary_curves(z, linspace(1.0, 5.0, 0.25));
  for (std::size_t i = 0; i < curves.axis.size(); ++i) {
    CHECK(curves.columns[0][i] <= curves.columns[1][i] + 1e-6);
    CHECK(curves.columns[1][i] <= curves.columns[2][i] + 1e-6);
  }

  // r_star is non-increasing in beta.
  for (std::size_t i = 0; i + 1 < curves.axis.size(); ++i) {
    CHECK(curves.columns[1][i + 1] <= curves.columns[1][i] + 1e-8);
  }

  // Deterministic channel: three identical flat curves.
  const CurveTable flat = boundary_curves(identity2(), linspace(1.0, 4.0, 0.5));
  for (std::size_t i = 0; i < flat.axis.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      CHECK(flat.columns[static_cast<std::size_t>(c)][i] ==
            doctest::Approx(std::log(2.0)).epsilon(1e-9));
    }
  }

  CHECK_THROWS_AS(boundary_curves(z, {0.5, 2.0}), std::domain_error);
  CHECK_THROWS_AS(boundary_curves(z, std::vector<double>{}),
                  std::domain_error);
}

TEST_CASE("branch curves at the soft-covering threshold") {
  const Channel z = z_channel();
  const CurveTable table = branch_curves(z, 0.2441, linspace(1.0, 3.0, 0.25));
  // At beta = 1 every column vanishes for R = I(X;Y).
  CHECK(std::abs(table.columns[0][0]) < 1e-6);
  CHECK(std::abs(table.columns[1][0]) < 1e-6);
  CHECK(std::abs(table.columns[2][0]) < 1e-6);
  CHECK(std::abs(table.columns[3][0]) < 1e-6);
}

TEST_CASE("branch curves orderings at representative rates") {
  const Channel z = z_channel();
  const auto grid = linspace(1.0, 5.0, 0.2);

  const CurveTable low = branch_curves(z, 0.12, grid);
  for (std::size_t i = 0; i < low.axis.size(); ++i) {
    CHECK(low.columns[1][i] >= low.columns[0][i] - 1e-9);  // sparse >= bulk
  }

  const CurveTable high = branch_curves(z, 0.35, grid);
  for (std::size_t i = 0; i < high.axis.size(); ++i) {
    CHECK(high.columns[0][i] >= high.columns[1][i] - 1e-9);  // bulk >= sparse
  }
}

TEST_CASE("single crossing of the branches along R at fixed beta") {
  const Channel z = z_channel();
  const double beta = 2.0;
  const double rs = r_star(z, beta).value();
  int sign_changes = 0;
  int prev_sign = 0;
  double crossing_lo = 0.0, crossing_hi = 0.0;
  for (double rate = 0.02; rate <= 0.6 + 1e-12; rate += 0.005) {
    const PhasePoint pt = psi_total(z, beta, rate);
    const double delta = pt.psi_sparse.value() - pt.psi_bulk.value();
    const int sign = delta > 0 ? 1 : (delta < 0 ? -1 : 0);
    if (prev_sign != 0 && sign != 0 && sign != prev_sign) {
      ++sign_changes;
      crossing_lo = rate - 0.005;
      crossing_hi = rate;
    }
    if (sign != 0) prev_sign = sign;
  }
  CHECK(sign_changes == 1);
  CHECK(rs >= crossing_lo - 1e-9);
  CHECK(rs <= crossing_hi + 1e-9);
}

TEST_CASE("total free energy follows the branch selected by r_star") {
  const Channel z = z_channel();
  for (const double beta : {1.5, 2.0, 3.0}) {
    const double rs = r_star(z, beta).value();
    for (const double rate : {rs - 0.05, rs + 0.05}) {
      const PhasePoint pt = psi_total(z, beta, rate);
      if (rate < rs) {
        CHECK(pt.psi_total.value() ==
              doctest::Approx(pt.psi_sparse.value()).epsilon(1e-9));
      } else {
        CHECK(pt.psi_total.value() ==
              doctest::Approx(pt.psi_bulk.value()).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("gap to the iid reference is non-increasing in R at fixed beta") {
  const Channel z = z_channel();
  for (const double beta : {1.5, 2.0}) {
    const double ref = psi_iid(z, beta).value();
    double prev_gap = 1e300;
    for (double rate = 0.02; rate <= 0.6 + 1e-12; rate += 0.02) {
      const PhasePoint pt = psi_total(z, beta, rate);
      const double gap = pt.psi_total.value() - ref;
      CHECK(gap <= prev_gap + 1e-8);
      prev_gap = gap;
    }
  }
}

TEST_CASE("curve tables carry deterministic metadata") {
  const Channel z = z_channel();
  const CurveTable a = boundary_curves(z, linspace(1.0, 2.0, 0.5));
  const CurveTable b = boundary_curves(z, linspace(1.0, 2.0, 0.5));
  CHECK(a.channel_hash == b.channel_hash);
  CHECK(a.channel_hash != 0);
  CHECK(a.column_names ==
        std::vector<std::string>{"i_bulk", "r_star", "i_sparse"});
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < a.axis.size(); ++i) {
      CHECK(a.columns[static_cast<std::size_t>(c)][i] ==
            b.columns[static_cast<std::size_t>(c)][i]);
    }
  }
}
