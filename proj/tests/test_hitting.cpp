#include <doctest.h>

#include <cmath>

#include "origami/error.hpp"
#include "origami/hitting.hpp"
#include "test_util.hpp"

using namespace origami;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Parse;  // sentinel: nothing thrown
}

// Brute-force covering time on the torus: the first time after t0 by which every point of
// an h-spaced grid lies within rho of the orbit, for the flow along (p, q) from (x0, y0).
double torus_grid_time(double x0, double y0, double p, double q, double rho, double t0, double h) {
  double norm = std::hypot(p, q), ux = p / norm, uy = q / norm;
  double worst = 0;
  int steps = static_cast<int>(std::round(1 / h));
  for (int i = 0; i < steps; ++i)
    for (int k = 0; k < steps; ++k) {
      double zx = (i + 0.5) * h, zy = (k + 0.5) * h;
      double best = INFINITY;
      // translate z by integer rows until the orbit reaches it
      for (int b = -1; b < 100000 && best == INFINITY; ++b) {
        double Y = zy + b;
        double s_row = (Y - y0) / uy;  // orbit parameter at that height
        if (s_row + rho / uy < t0) continue;
        double xline = x0 + s_row * ux;
        for (int a = static_cast<int>(std::floor(xline - zx)) - 1; a <= static_cast<int>(std::floor(xline - zx)) + 2;
             ++a) {
          double X = zx + a;
          double s_star = (X - x0) * ux + (Y - y0) * uy;
          double perp = std::abs((X - x0) * uy - (Y - y0) * ux);
          if (perp > rho) continue;
          double half = std::sqrt(rho * rho - perp * perp);
          double lo = s_star - half, hi = s_star + half;
          if (hi <= t0) continue;
          best = std::min(best, std::max(lo, t0));
        }
      }
      worst = std::max(worst, best);
    }
  return worst;
}

}  // namespace

TEST_CASE("cell counts") {
  // smallest m with m^2 (0.9 r)^2 > 2
  CHECK(cells_per_side(make_rational(1, 100)) == 16);
  for (long inv = 3; inv < 400; inv += 7) {
    Rational r2(1, inv * inv);
    Integer m = cells_per_side(r2);
    CHECK(Rational(m * m) * make_rational(81, 100) * r2 > 2);
    CHECK(Rational((m - 1) * (m - 1)) * make_rational(81, 100) * r2 <= 2);
  }
  CHECK(sqrt_lower(2) < sqrt_upper(2));
  CHECK(sqrt_lower(2) * sqrt_lower(2) <= 2);
  CHECK(sqrt_upper(2) * sqrt_upper(2) >= 2);
  CHECK(sqrt_upper(2) - sqrt_lower(2) < make_rational(1, 100000000000L));
}

TEST_CASE("torus oracle sandwich") {
  Origami t = builtin_torus();
  SurfacePoint p{0, make_rational(123, 1000), make_rational(457, 1000)};
  for (long inv : {5, 10}) {
    Rational r2(1, inv * inv);
    HittingRecord rec = r_dense_time(t, golden_slope(), p, r2, HittingOptions{});
    REQUIRE_FALSE(rec.capped);
    CHECK(rec.shadow_ok);
    double r = 1.0 / inv, m = static_cast<double>(rec.cells), h = 1.0 / 400;
    double pN = rec.pN.get_d(), qN = rec.qN.get_d();
    // every cell visited puts each point within a cell diameter of the orbit
    double lower = torus_grid_time(0.123, 0.457, pN, qN, std::sqrt(2.0) / m, r, h);
    // a point within the inner radius of the cell around every grid point enters that cell
    double upper = torus_grid_time(0.123, 0.457, pN, qN, 0.5 / m - h / std::sqrt(2.0), r, h);
    INFO("T=" << rec.T << " lower=" << lower << " upper=" << upper);
    CHECK(lower <= rec.T * (1 + 1e-12));
    CHECK(rec.T <= upper * (1 + 1e-12));
    CHECK(rec.T * r > 0.3);
    CHECK(rec.T * r < 6);
  }
}

TEST_CASE("rational slopes never become dense") {
  HittingOptions opt;
  opt.time_cap = 1000;
  HittingRecord rec = r_dense_time(builtin_ornithorynque(), rational_slope(make_rational(1, 3)),
                                   {0, make_rational(1, 7), make_rational(2, 7)}, make_rational(1, 400), opt);
  CHECK(rec.capped);
}

TEST_CASE("nested grids are monotone") {
  // r chosen so the grid doubles: m and 2m cells per side
  Origami x = builtin_ornithorynque();
  CFSlope s = rational_slope(golden_slope().convergent(24));
  SurfacePoint p{4, make_rational(311, 1000), make_rational(77, 1000)};
  HittingOptions opt;
  opt.check_backward = false;
  for (long m : {6, 10, 20}) {
    auto r2_for = [](long cells) -> Rational { return Rational(200) / (Rational(81) * make_rational(2 * cells - 1, 2) * make_rational(2 * cells - 1, 2)); };
    Rational coarse = r2_for(m), fine = r2_for(2 * m);
    REQUIRE(cells_per_side(coarse) == m);
    REQUIRE(cells_per_side(fine) == 2 * m);
    HittingRecord a = r_dense_time(x, s, p, coarse, opt), b = r_dense_time(x, s, p, fine, opt);
    REQUIRE_FALSE(a.capped);
    REQUIRE_FALSE(b.capped);
    CHECK(b.T_s >= a.T_s);
  }
}

TEST_CASE("hitting errors") {
  Origami x = builtin_ornithorynque();
  SurfacePoint p{0, make_rational(1, 3), make_rational(1, 5)};
  HittingOptions small;
  small.time_cap = make_rational(1, 20);
  CHECK(kind_of([&] { r_dense_time(x, golden_slope(), p, make_rational(1, 100), small); }) == ErrorKind::CapTooSmall);
  HittingOptions tight;
  tight.mem_budget = 16;
  CHECK(kind_of([&] { r_dense_time(x, golden_slope(), p, make_rational(1, 100), tight); }) == ErrorKind::BudgetExceeded);
  std::size_t cone_square = cone_data(x).cones.front().cycle.front();
  CHECK(kind_of([&] {
          r_dense_time(x, golden_slope(), {cone_square, 1, 1}, make_rational(1, 100), HittingOptions{});
        }) == ErrorKind::StartOnSingularLeaf);
  CHECK(kind_of([&] { lower_bound_experiment(x, golden_slope(), 1, p, 1, 100, HittingOptions{}); }) ==
        ErrorKind::ExponentTooSmall);
}

TEST_CASE("special times on the golden slope") {
  SurfacePoint p{1, make_rational(271, 1000), make_rational(828, 1000)};
  auto rows = special_times_check(builtin_ornithorynque(), golden_slope(), p, 6, 11, 17, HittingOptions{});
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.passed);
    CHECK(r.ratio <= 1);
    CHECK(r.bound == 4 * 17 * Rational(r.qn));
  }
}

TEST_CASE("torus control for special times") {
  // with K = 1 the ratio T / q_n stays bounded
  SurfacePoint p{0, make_rational(271, 1000), make_rational(828, 1000)};
  auto rows = special_times_check(builtin_torus(), golden_slope(), p, 5, 14, 1, HittingOptions{});
  for (const auto& r : rows) {
    CHECK_FALSE(r.record.capped);
    CHECK(r.record.T / r.qn.get_d() < 4);
  }
}

TEST_CASE("lower bound at a small level") {
  CFSlope s = slope_with_type(2, {1, 1});
  SurfacePoint p{2, make_rational(389, 1000), make_rational(611, 1000)};
  auto rows = lower_bound_experiment(builtin_ornithorynque(), s, 2, p, 50, 100, HittingOptions{});
  REQUIRE(rows.size() == 1);
  const auto& r = rows[0];
  CHECK(r.q2k == 61);
  CHECK(r.measured_passed);
  CHECK(r.certified_passed);
  CHECK(r.kappa_passed);
  CHECK(r.trapping_passed);
  CHECK(r.tube_passed);
  REQUIRE(r.record.tube.has_value());
  CHECK(r.record.tube->band_cells > 0);
  CHECK(r.record.tube->band_cells_visited == 0);
  CHECK(r.record.shadow_ok);
}

TEST_CASE("exponent fit") {
  std::vector<ExponentPoint> pts;
  for (int k = 0; k < 8; ++k) {
    double r = std::pow(10.0, -0.3 * k - 0.5);
    pts.push_back({r, 1 / (r * r)});
  }
  ExponentFit f = exponent_estimate(pts);
  CHECK(std::abs(f.H - 2) < 1e-9);
  CHECK(f.per_point.size() == 8);
  CHECK(f.span_decades == doctest::Approx(2.1));

  // points under the envelope do not pull the fit down
  auto noisy = pts;
  noisy.push_back({std::pow(10.0, -1.25), 10});
  CHECK(std::abs(exponent_estimate(noisy).H - 2) < 1e-9);

  std::vector<ExponentPoint> few(pts.begin(), pts.begin() + 4);
  CHECK(kind_of([&] { exponent_estimate(few); }) == ErrorKind::InsufficientSpan);
  std::vector<ExponentPoint> narrow;
  for (int k = 0; k < 6; ++k) narrow.push_back({0.1 / (1 + k), 100.0 * (1 + k)});
  CHECK(kind_of([&] { exponent_estimate(narrow); }) == ErrorKind::InsufficientSpan);

  std::string svg = exponent_svg(pts, f, "synthetic");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("H = 2") != std::string::npos);
}
