#include <doctest.h>

#include <algorithm>

#include "origami/continued_fraction.hpp"
#include "origami/cylinders.hpp"
#include "origami/error.hpp"
#include "test_util.hpp"

using namespace origami;

namespace {

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("vertical cylinders of the builtins") {
  Origami x = builtin_ornithorynque();
  auto cyl = vertical_cylinders(x);
  REQUIRE(cyl.size() == 2);
  std::vector<std::vector<std::size_t>> expected(2);
  for (int i = 0; i < 3; ++i) {
    expected[0].push_back(ornithorynque_index(i, 1, 1));
    expected[0].push_back(ornithorynque_index(i, 1, 0));
    expected[1].push_back(ornithorynque_index(i, 0, 1));
    expected[1].push_back(ornithorynque_index(i, 0, 0));
  }
  std::vector<std::vector<std::size_t>> got;
  Integer area = 0;
  for (const auto& c : cyl) {
    CHECK(c.L == 6);
    CHECK(c.W == 1);
    got.push_back(sorted(c.squares));
    area += c.L * c.W;
  }
  for (auto& e : expected) e = sorted(e);
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  CHECK(got == expected);
  CHECK(area == 12);

  auto t = vertical_cylinders(builtin_torus());
  REQUIRE(t.size() == 1);
  CHECK(t[0].L == 1);
  CHECK(t[0].W == 1);

  // L: v-cycles {0, 2} and {1} merge across the cone-free side line into one cylinder
  Integer l_area = 0;
  for (const auto& c : vertical_cylinders(builtin_genus2_L())) l_area += c.L * c.W;
  CHECK(l_area == 3);
  Integer h_area = 0;
  for (const auto& c : horizontal_cylinders(x)) h_area += c.L * c.W;
  CHECK(h_area == 12);
}

TEST_CASE("induced decompositions") {
  Origami x = builtin_ornithorynque();
  CylinderDecomposition id = induced_cylinders(x, IntMatrix2::identity());
  CHECK(id.chart == x);
  CHECK(id.cylinders.size() == 2);
  CHECK(id.p == 0);
  CHECK(id.q == 1);

  CylinderDecomposition v = induced_cylinders(x, g_matrix({1}), true);
  CHECK(v.slope == ProjectiveSlope{1});
  CHECK(v.area() == 12);
  REQUIRE(v.cylinders.size() == 2);
  for (const auto& c : v.cylinders) {
    CHECK(c.L == 6);
    CHECK(c.W == 1);
  }
  CHECK_THROWS_AS(induced_cylinders(x, IntMatrix2{2, 1, 1, 2}), Error);
}

TEST_CASE("closed geodesics map to closed geodesics") {
  Origami x = builtin_ornithorynque();
  Rng rng(47, 11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Integer> qs;
    for (long k = 0, n = rng.uniform(1, 4); k < n; ++k) qs.push_back(rng.uniform(1, 4));
    IntMatrix2 A = g_matrix(qs);
    CylinderDecomposition D = induced_cylinders(x, A);
    const Origami& Y = D.chart;
    std::size_t j = std::size_t(rng.uniform(0, 11));
    SurfacePoint p{j, make_rational(rng.uniform(1, 999), 1000), make_rational(1, 2)};
    const Cylinder& c = D.cylinders[D.cylinder_of_square[j]];
    AffineChart psi(decompose(A), Y);
    const Origami& X = psi.target();
    REQUIRE(is_isomorphic(X, x).has_value());
    SurfacePoint P = psi.map(p);
    Direction d = Direction::make(A.b, A.d);
    CHECK(d.slope() == D.slope);
    Segment loop = make_segment(X, P, d, Rational(c.L));
    CHECK(X.normalize(loop.end) == X.normalize(P));
  }
}

TEST_CASE("transversal bounds") {
  Origami x = builtin_ornithorynque();
  CylinderDecomposition D = induced_cylinders(x, IntMatrix2::identity());
  // horizontal segment across both cylinders
  Segment H = make_segment(x, {ornithorynque_index(0, 1, 0), 0, make_rational(1, 2)}, Direction::make(1, 0), 2);
  TransversalBound b = transversal_bound(H, D);
  CHECK(b.visits.size() == 2);
  CHECK(b.width_sum == 2);
  CHECK(b.bound_squared == 4);
  CHECK(b.holds);
  // orthogonal case: bound equals the width sum
  Segment one = make_segment(x, {ornithorynque_index(0, 1, 0), make_rational(1, 4), make_rational(1, 2)},
                             Direction::make(1, 0), make_rational(1, 2));
  TransversalBound ob = transversal_bound(one, D);
  CHECK(ob.bound_squared == Rational(ob.width_sum * ob.width_sum));
  // at 45 degrees the bound is sqrt 2 times the width sum
  Segment diag = make_segment(x, {3, make_rational(1, 3), make_rational(1, 7)}, Direction::make(1, 1), 5);
  TransversalBound db = transversal_bound(diag, D);
  CHECK(db.bound_squared == 2 * Rational(db.width_sum * db.width_sum));
  CHECK(db.holds);

  Segment up = make_segment(x, {3, make_rational(1, 3), make_rational(1, 7)}, Direction::make(0, 1), 1);
  try {
    transversal_bound(up, D);
    FAIL("expected ParallelToDecomposition");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParallelToDecomposition);
  }

  TransversalReport r = transversal_harness(x, 300, 50, 13);
  CHECK(r.trials == 300);
  CHECK(r.violations.empty());
}

TEST_CASE("trapping windows") {
  Origami x = builtin_ornithorynque();
  auto D = vertical_cylinders(x);
  std::size_t first = D[0].strips.front().front();
  TrappingWindow w = trapping_window(x, D, make_rational(1, 10), {first, 0, make_rational(1, 2)});
  CHECK(w.window_s == 1);  // time sqrt(101) along (1, 10)
  CHECK(w.trapped);

  CHECK_THROWS_AS(trapping_window(x, D, make_rational(1, 6), {first, 0, make_rational(1, 2)}), Error);

  Origami t = builtin_torus();
  auto Dt = vertical_cylinders(t);
  TrappingWindow tw = trapping_window(t, Dt, make_rational(1, 3), {0, 0, make_rational(1, 3)});
  CHECK(tw.trapped);
  CHECK_FALSE(tw.exit_s.has_value());

  Rng rng(53, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const Cylinder& c = D[std::size_t(rng.uniform(0, 1))];
    const auto& strip = c.strips.front();
    std::size_t j = strip[std::size_t(rng.uniform(0, long(strip.size()) - 1))];
    Rational alpha(1, rng.uniform(7, 40));
    TrappingWindow tr = trapping_window(x, D, alpha, {j, 0, make_rational(rng.uniform(1, 999), 1000)});
    CHECK(tr.trapped);
    if (tr.exit_s) CHECK(*tr.exit_s >= tr.window_s);
  }
}
