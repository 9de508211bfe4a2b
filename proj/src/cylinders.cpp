#include "origami/cylinders.hpp"

#include <algorithm>
#include <map>

#include "origami/error.hpp"
#include "origami/rng.hpp"

namespace origami {

namespace {

// Vertical: strips are v-cycles, the next strip lies across the right sides.
// Horizontal: strips are h-cycles, the next strip lies across the top sides.
std::vector<Cylinder> strip_cylinders(const Origami& o, bool horizontal) {
  const Permutation& along = horizontal ? o.h() : o.v();
  const Permutation& across = horizontal ? o.v() : o.h();
  Side far_side = horizontal ? Side::Top : Side::Right;
  Side near_side = horizontal ? Side::Bottom : Side::Left;
  Corner far_corner = Corner::TopRight;

  auto strips = along.cycles();
  std::vector<std::size_t> strip_of(o.size());
  for (std::size_t s = 0; s < strips.size(); ++s)
    for (auto j : strips[s]) strip_of[j] = s;

  // next[s]: strip across a cone-free far line
  std::vector<std::optional<std::size_t>> next(strips.size());
  std::vector<bool> has_prev(strips.size(), false);
  for (std::size_t s = 0; s < strips.size(); ++s) {
    bool regular = std::none_of(strips[s].begin(), strips[s].end(),
                                [&](std::size_t j) { return o.is_cone(o.vertex_of(j, far_corner)); });
    if (!regular) continue;
    next[s] = strip_of[across(strips[s].front())];
    has_prev[*next[s]] = true;
  }

  std::vector<Cylinder> out;
  std::vector<bool> used(strips.size(), false);
  auto build = [&](std::size_t first) {
    Cylinder c;
    std::size_t s = first;
    while (!used[s]) {
      used[s] = true;
      c.strips.push_back(strips[s]);
      c.squares.insert(c.squares.end(), strips[s].begin(), strips[s].end());
      if (!next[s]) break;
      s = *next[s];
    }
    c.L = static_cast<unsigned long>(c.strips.front().size());
    c.W = static_cast<unsigned long>(c.strips.size());
    for (auto j : c.strips.front()) c.boundary_start_edges.push_back(o.edge_of(j, near_side));
    for (auto j : c.strips.back()) c.boundary_end_edges.push_back(o.edge_of(j, far_side));
    out.push_back(std::move(c));
  };
  for (std::size_t s = 0; s < strips.size(); ++s)
    if (!has_prev[s] && !used[s]) build(s);
  for (std::size_t s = 0; s < strips.size(); ++s)
    if (!used[s]) build(s);  // cone-free closed chains (tori)
  return out;
}

}  // namespace

std::vector<Cylinder> vertical_cylinders(const Origami& o) { return strip_cylinders(o, false); }
std::vector<Cylinder> horizontal_cylinders(const Origami& o) { return strip_cylinders(o, true); }

Integer CylinderDecomposition::area() const {
  Integer a = 0;
  for (const auto& c : cylinders) a += c.L * c.W;
  return a;
}

CylinderDecomposition induced_cylinders(const Origami& X, const IntMatrix2& A, bool horizontal_base) {
  if (A.det() != 1) throw Error(ErrorKind::NotUnimodular, "determinant " + A.det().get_str());
  Origami Y = act(A.inverse(), X);
  CylinderDecomposition D{A, horizontal_base, {}, 0, 1, Y, {}, {}};
  D.slope = projective_slope(A, horizontal_base ? ProjectiveSlope::inf() : ProjectiveSlope{0, false});
  D.p = horizontal_base ? A.a : A.b;
  D.q = horizontal_base ? A.c : A.d;
  D.cylinders = horizontal_base ? horizontal_cylinders(Y) : vertical_cylinders(Y);
  D.cylinder_of_square.assign(Y.size(), 0);
  for (std::size_t i = 0; i < D.cylinders.size(); ++i)
    for (auto j : D.cylinders[i].squares) D.cylinder_of_square[j] = i;
  return D;
}

TransversalBound transversal_bound(const Segment& H, const CylinderDecomposition& D) {
  const Direction& d = H.direction;
  Integer dot = d.dx * D.q - d.dy * D.p;  // <d, (q, -p)>
  if (dot == 0) throw Error(ErrorKind::ParallelToDecomposition, "segment is parallel to the cylinders");
  // Pull H back to the chart, where the cylinders are vertical or horizontal.
  IntMatrix2 Ainv = D.A.inverse();
  AffineChart back(decompose(Ainv), *H.surface);
  if (!(back.target() == D.chart)) throw Error(ErrorKind::PreconditionViolated, "decomposition chart mismatch");
  Direction d2 = Direction::make(Ainv.a * d.dx + Ainv.b * d.dy, Ainv.c * d.dx + Ainv.d * d.dy);
  Segment H2 = make_segment(D.chart, back.map(H.start), d2, H.s_len);
  TransversalBound out;
  const Origami& Y = D.chart;
  for (std::size_t k = 0; k < H2.pieces.size(); ++k) {
    const auto& piece = H2.pieces[k];
    std::size_t c = D.cylinder_of_square[piece.square];
    if (out.visits.empty() || out.visits.back() != c) {
      out.visits.push_back(c);
      continue;
    }
    // same cylinder: a new visit only if the step crossed one of its boundary sides
    const auto& prev = H2.pieces[k - 1];
    std::optional<std::size_t> edge;
    if (!D.horizontal_base) {
      if (prev.x1 == 1) edge = Y.vertical_edge(prev.square);
      else if (prev.x1 == 0) edge = Y.vertical_edge(Y.h_inv()(prev.square));
    } else {
      if (prev.y1 == 1) edge = Y.horizontal_edge(prev.square);
      else if (prev.y1 == 0) edge = Y.horizontal_edge(Y.v_inv()(prev.square));
    }
    const Cylinder& cyl = D.cylinders[c];
    auto in = [&](const std::vector<std::size_t>& v) { return edge && std::find(v.begin(), v.end(), *edge) != v.end(); };
    if (in(cyl.boundary_start_edges) || in(cyl.boundary_end_edges)) out.visits.push_back(c);
  }
  for (auto c : out.visits) out.width_sum += D.cylinders[c].W;
  Rational dot2 = Rational(dot * dot);
  out.bound_squared = Rational(out.width_sum * out.width_sum * d.norm_squared()) / dot2;
  out.length_squared = H.length_squared();
  out.holds = out.length_squared <= out.bound_squared;
  return out;
}

TransversalReport transversal_harness(const Origami& X, std::size_t trials, long q_max, std::uint64_t seed) {
  TransversalReport rep;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(seed, k);
    for (;;) {
      // primitive (p, q), completed to A with A * 0 = p / q
      long q = rng.uniform(1, q_max), p = rng.uniform(-q_max, q_max);
      Integer g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), Integer(p).get_mpz_t(), Integer(q).get_mpz_t());
      if (g != 1) continue;
      // a q - p c = 1 with a = t, c = -s
      IntMatrix2 A{t, Integer(p), -s, Integer(q)};
      long a = rng.uniform(-20, 20), b = rng.uniform(1, 20);
      if (a * q == b * p) continue;
      Direction d = Direction::make(a, b);
      SurfacePoint start{static_cast<std::size_t>(rng.uniform(0, static_cast<long>(X.size()) - 1)),
                         make_rational(rng.uniform(1, 999), 1000), make_rational(rng.uniform(1, 999), 1000)};
      Rational len = make_rational(rng.uniform(1000, 20000), 1000);
      Rational s_len = parameter_for_length(d, len);
      try {
        Segment H = make_segment(X, start, d, s_len);
        CylinderDecomposition D = induced_cylinders(X, A);
        TransversalBound b2 = transversal_bound(H, D);
        ++rep.trials;
        if (!b2.holds) rep.violations.push_back({start, d, s_len});
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ConeVertexInInterior && e.kind() != ErrorKind::StartAtConeVertex) throw;
        ++rep.rejected;
      }
    }
  }
  return rep;
}

TrappingWindow trapping_window(const Origami& o, const std::vector<Cylinder>& D, const Rational& alpha,
                               const SurfacePoint& boundary_point) {
  if (alpha <= 0) throw Error(ErrorKind::PreconditionViolated, "slope must be positive");
  for (const auto& c : D)
    if (alpha * Rational(c.L) >= 1)
      throw Error(ErrorKind::PreconditionViolated, "slope " + to_string(alpha) + " is not below 1/L");
  if (boundary_point.x != 0 && boundary_point.x != 1)
    throw Error(ErrorKind::PreconditionViolated, "start must lie on a vertical side");
  SurfacePoint p = o.normalize(boundary_point);
  // the start is the left side of p.square, which must open the first strip of a cylinder
  std::optional<std::size_t> index;
  for (std::size_t i = 0; i < D.size(); ++i)
    if (std::find(D[i].strips.front().begin(), D[i].strips.front().end(), p.square) != D[i].strips.front().end())
      index = i;
  if (!index) throw Error(ErrorKind::PreconditionViolated, "start is not on the left boundary of a cylinder");
  const Cylinder& cyl = D[*index];
  Direction d = Direction::make(alpha.get_num(), alpha.get_den());
  TrappingWindow out;
  out.cylinder = *index;
  out.window_s = Rational(cyl.W) / Rational(d.dx);
  LinearTracer tr(o, p, d, out.window_s.get_den());
  i128 L = tr.scale();
  i128 window = to_i128(Rational(out.window_s * Rational(from_i128(L))).get_num());
  i128 cap = 2 * window;
  std::vector<bool> inside(o.size(), false);
  for (auto j : cyl.squares) inside[j] = true;
  LinearTracer::Piece piece;
  std::optional<LinearTracer::Crossing> c;
  while (!tr.stopped() && tr.s() < cap) {
    tr.advance(cap, piece, c);
    if (piece.s1 > piece.s0 && !inside[piece.square]) {
      out.exit_s = make_rational(from_i128(piece.s0), from_i128(L));
      break;
    }
  }
  out.trapped = !out.exit_s || *out.exit_s >= out.window_s;
  return out;
}

}  // namespace origami
