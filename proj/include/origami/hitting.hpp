#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "origami/continued_fraction.hpp"
#include "origami/cylinders.hpp"
#include "origami/flow.hpp"
#include "origami/rng.hpp"

namespace origami {

struct HittingOptions {
  Rational time_cap = 1000000;
  std::size_t mem_budget = std::size_t(256) << 20;  // bytes for the visited-cell flags
  bool check_backward = true;
  std::uint64_t seed = 0;  // recorded only
};

/// Avoided band in u = q x - p y (mod 1), checked on the visited cells at time tau.
struct TubeAudit {
  Integer p = 0, q = 1;
  Rational tau;              // time of the snapshot
  Rational u_range;          // length of the orbit's u-arc up to tau
  std::uint64_t band_cells = 0;
  std::uint64_t band_cells_visited = 0;
  bool performed = false;
  bool passed = false;
};

struct HittingRecord {
  std::string slope_spec;
  std::size_t depth = 0;  // N of the convergent p_N / q_N driving the flow
  Integer pN = 0, qN = 1;
  SurfacePoint start;
  Rational r_squared;
  double r = 0.0;
  std::uint64_t cells = 0;  // per side of a square
  Rational T_s;             // motion parameter at density; time is T_s |d|
  double T = 0.0;
  bool capped = false;
  std::uint64_t crossings = 0;
  std::uint64_t seed = 0;
  bool shadow_ok = false;   // |alpha - pN/qN| T_cap < r/10 and cone clearance
  std::optional<TubeAudit> tube;

  /// T^2 as an exact rational.
  Rational T_squared(const Direction& d) const;
};

/// Time for the forward orbit to visit every cell of side < 0.9 r / sqrt(2), counted
/// from time r. Slopes lie in (0, 1) and flow upward. Throws StartOnSingularLeaf,
/// CapTooSmall, BudgetExceeded.
HittingRecord r_dense_time(const Origami& o, const CFSlope& slope, const SurfacePoint& p, const Rational& r_squared,
                           const HittingOptions& opt, const std::optional<TubeAudit>& tube = std::nullopt);

/// Smallest m with m^2 (0.9 r)^2 > 2.
Integer cells_per_side(const Rational& r_squared);

struct SpecialTimeRow {
  std::size_t n = 0;
  Integer qn = 0;
  HittingRecord record;
  Rational bound;     // 4 K q_n
  double ratio = 0.0;  // T / bound
  bool passed = false;
};

/// T at r_n = 2 (K + 1) / q_n against 4 K q_n.
std::vector<SpecialTimeRow> special_times_check(const Origami& o, const CFSlope& slope, const SurfacePoint& p,
                                                std::size_t n_first, std::size_t n_last, const Rational& K,
                                                const HittingOptions& opt);

struct LowerBoundRow {
  std::size_t k = 0;
  Integer q2k = 0, p2k = 0;
  HittingRecord record;
  double bound = 0.0;            // q_{2k}^w / sqrt(8)
  bool measured_passed = false;  // cell-measured T >= bound
  Rational certified_T;          // lower bound on the true T
  bool certified_passed = false;
  bool kappa_passed = false;     // kappa^2 > q_{2k}^2 / 2
  Rational kappa_squared;
  bool trapping_passed = false;
  Rational trapping_window_s;
  bool tube_passed = false;
};

/// Levels k with a_{2k+1} >= q_{2k}^{w-1} and q_{2k} in [q_min, q_max],
/// measured at r_k = 1 / (q_{2k} sqrt 32). Throws ExponentTooSmall unless w > 1.
std::vector<LowerBoundRow> lower_bound_experiment(const Origami& o, const CFSlope& slope, const Rational& w,
                                                  const SurfacePoint& p, const Integer& q_min, const Integer& q_max,
                                                  const HittingOptions& opt);

/// Interior point with coordinates k / den, 0 < k < den.
SurfacePoint random_start(const Origami& o, Rng& rng, long den = 1000);

/// Rational upper bound of sqrt(x) with absolute error below 10^-12.
Rational sqrt_upper(const Rational& x);
Rational sqrt_lower(const Rational& x);

struct ExponentFit {
  double H = 0.0;
  double intercept = 0.0;
  std::vector<std::size_t> envelope;  // indices into the input, sorted by -log r
  std::vector<double> per_point;      // log T / -log r for every input
  double span_decades = 0.0;
  std::size_t used = 0;
};

struct ExponentPoint {
  double r = 0.0;
  double T = 0.0;
};

/// Least-squares slope through the upper convex envelope of (-log r, log T).
/// Throws InsufficientSpan with fewer than 5 points or under 1.5 decades of r.
ExponentFit exponent_estimate(const std::vector<ExponentPoint>& points);

/// Log-log scatter with the envelope and fitted line.
std::string exponent_svg(const std::vector<ExponentPoint>& points, const ExponentFit& fit, const std::string& title);

}  // namespace origami
