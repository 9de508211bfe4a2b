#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "origami/error.hpp"
#include "origami/origami.hpp"
#include "origami/sl2.hpp"
#include "test_util.hpp"

using namespace origami;
using namespace testutil;

namespace {

// Vertex classes by gluing corners across shared edges; independent of the commutator.
struct CornerOracle {
  std::vector<std::size_t> parent;
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }

  // returns the multiset of corner counts per vertex
  std::vector<std::size_t> vertex_sizes(const Origami& o) {
    std::size_t n = o.size();
    parent.resize(4 * n);
    for (std::size_t i = 0; i < 4 * n; ++i) parent[i] = i;
    enum { BL, BR, TL, TR };
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t r = o.h()(j), t = o.v()(j);
      unite(4 * j + TR, 4 * r + TL);
      unite(4 * j + BR, 4 * r + BL);
      unite(4 * j + TL, 4 * t + BL);
      unite(4 * j + TR, 4 * t + BR);
    }
    std::map<std::size_t, std::size_t> count;
    for (std::size_t i = 0; i < 4 * n; ++i) ++count[find(i)];
    std::vector<std::size_t> out;
    for (auto& [root, c] : count) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
  }
};

std::vector<std::size_t> cone_orders(const ConeData& d) {
  std::vector<std::size_t> out;
  for (auto& c : d.cones) out.push_back(c.order);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("permutation basics") {
  Permutation a({1, 2, 0}), b = Permutation::from_cycles(3, {{0, 1}});
  CHECK((a * a.inverse()).is_identity());
  CHECK((a * b)(0) == a(b(0)));
  CHECK(a.cycles() == std::vector<std::vector<std::size_t>>{{0, 1, 2}});
  CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
  // v^-1 h^-1 v h
  Permutation c = commutator(b, a);
  for (std::size_t x = 0; x < 3; ++x) CHECK(c(x) == b.inverse()(a.inverse()(b(a(x)))));
}

TEST_CASE("construction errors") {
  CHECK_NOTHROW(make_origami(1, {0}, {0}));
  try {
    make_origami(2, {0, 1}, {0, 1});
    FAIL("expected NotTransitive");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotTransitive);
  }
  try {
    make_origami(2, {0, 0}, {1, 0});
    FAIL("expected NotBijective");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotBijective);
  }
  CHECK_THROWS_AS(make_origami(3, {1, 0}, {0, 2, 1}), Error);
}

TEST_CASE("ornithorynque tables") {
  Origami o = builtin_ornithorynque();
  REQUIRE(o.size() == 12);
  auto idx = ornithorynque_index;
  for (int i = 0; i < 3; ++i) {
    // the four within-tile gluings
    CHECK(o.v()(idx(i, 1, 1)) == idx(i, 1, 0));
    CHECK(o.v()(idx(i, 0, 1)) == idx(i, 0, 0));
    CHECK(o.h()(idx(i, 1, 0)) == idx(i, 0, 0));
    CHECK(o.h()(idx(i, 1, 1)) == idx(i, 0, 1));
  }
  std::size_t labelled = 0, dotted = 0;
  for (const auto& e : o.edge_classes()) {
    if (e.label) ++labelled;
    if (e.dotted) ++dotted;
  }
  CHECK(labelled == 12);
  CHECK(dotted == 12);
  // dotted sides join squares of the same tile
  for (const auto& e : o.edge_classes())
    if (e.dotted) CHECK(e.lower_square / 4 == e.upper_square / 4);
  for (const char* name : {"A0", "B1", "C2", "D0"}) CHECK(o.edge_with_label(name).has_value());
}

TEST_CASE("cone data of the builtins") {
  ConeData x = cone_data(builtin_ornithorynque());
  CHECK(cone_orders(x) == std::vector<std::size_t>{2, 2, 2});
  CHECK(x.regular_vertices == 3);
  CHECK(x.genus == 4);

  ConeData t = cone_data(builtin_torus());
  CHECK(t.cones.empty());
  CHECK(t.regular_vertices == 1);
  CHECK(t.genus == 1);

  ConeData l = cone_data(builtin_genus2_L());
  CHECK(cone_orders(l) == std::vector<std::size_t>{2});
  CHECK(l.genus == 2);

  CornerOracle oracle;
  CHECK(oracle.vertex_sizes(builtin_genus2_L()) == std::vector<std::size_t>{12});
  CHECK(oracle.vertex_sizes(builtin_ornithorynque()) == std::vector<std::size_t>{4, 4, 4, 12, 12, 12});
}

TEST_CASE("automorphisms and isomorphism") {
  CHECK(automorphism_group(builtin_ornithorynque()).size() == 3);
  CHECK(automorphism_group(builtin_torus()).size() == 1);
  CHECK(automorphism_group(builtin_genus2_L()).size() == 1);
  CHECK_FALSE(is_isomorphic(builtin_torus(), builtin_genus2_L()).has_value());
  CHECK(is_isomorphic(act(IntMatrix2::T(), builtin_ornithorynque()), builtin_ornithorynque()).has_value());

  // brute-force automorphisms of the L over all of Sym(3)
  Origami L = builtin_genus2_L();
  std::vector<std::size_t> p{0, 1, 2};
  std::size_t commuting = 0;
  do {
    Permutation s(p);
    if (s * L.h() == L.h() * s && s * L.v() == L.v() * s) ++commuting;
  } while (std::next_permutation(p.begin(), p.end()));
  CHECK(commuting == 1);
}

TEST_CASE("property: random origamis") {
  Rng rng(7, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.uniform(1, 9));
    Origami o = random_origami(rng, n);
    ConeData d = cone_data(o);

    // vertex structure against the corner oracle
    CornerOracle oracle;
    auto sizes = oracle.vertex_sizes(o);
    CHECK(sizes.size() == d.cones.size() + d.regular_vertices);
    CHECK(sizes.size() == o.vertex_count());
    std::vector<std::size_t> from_cones;
    for (auto& c : d.cones) from_cones.push_back(4 * (c.order + 1));
    for (std::size_t k = 0; k < d.regular_vertices; ++k) from_cones.push_back(4);
    std::sort(from_cones.begin(), from_cones.end());
    CHECK(from_cones == sizes);

    // Euler characteristic: V - 2n + n = 2 - 2g
    long V = static_cast<long>(sizes.size());
    CHECK(V - static_cast<long>(n) == 2 - 2 * d.genus);

    // relabeling invariance
    Permutation s(random_images(rng, n));
    Origami r(o.h().conjugated_by(s), o.v().conjugated_by(s));
    auto iso = is_isomorphic(o, r);
    REQUIRE(iso.has_value());
    CHECK(iso->operator*(o.h()) == r.h() * *iso);
    CHECK(canonical_form(o) == canonical_form(r));
    CHECK(automorphism_group(o).size() == automorphism_group(r).size());

    // the automorphism group size divides n and every element commutes with h, v
    auto aut = automorphism_group(o);
    CHECK(n % aut.size() == 0);
    for (auto& a : aut) CHECK((a * o.h() == o.h() * a && a * o.v() == o.v() * a));
  }
}

TEST_CASE("normalize and representations") {
  Origami o = builtin_ornithorynque();
  for (std::size_t j = 0; j < o.size(); ++j) {
    SurfacePoint right{j, 1, make_rational(1, 3)};
    SurfacePoint n = o.normalize(right);
    CHECK(n.square == o.h()(j));
    CHECK(n.x == 0);
    SurfacePoint top{j, make_rational(1, 5), 1};
    CHECK(o.normalize(top).square == o.v()(j));
    CHECK(o.representations(SurfacePoint{j, make_rational(1, 2), make_rational(1, 2)}).size() == 1);
    CHECK(o.representations(SurfacePoint{j, 0, make_rational(1, 2)}).size() == 2);
  }
  // a cone corner has 12 corner incidences
  std::size_t cones = 0;
  for (std::size_t v = 0; v < o.vertex_count(); ++v) {
    if (o.is_cone(v)) {
      ++cones;
      CHECK(o.vertex_order(v) == 2);
      CHECK(o.vertex_corners(v).size() == 12);
    }
  }
  CHECK(cones == 3);
}

TEST_CASE("origami file round trip") {
  Origami o = builtin_ornithorynque();
  std::stringstream s;
  write_origami(s, o);
  Origami back = read_origami(s);
  CHECK(back == o);
  std::stringstream bad("not an origami");
  CHECK_THROWS_AS(read_origami(bad), Error);
}
