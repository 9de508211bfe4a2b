#include "origami/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "origami/error.hpp"

namespace origami {

namespace {

constexpr i128 kHuge = static_cast<i128>(1) << 124;

Integer lcm(const Integer& a, const Integer& b) {
  Integer out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

Integer isqrt(const Integer& z) {
  Integer out;
  mpz_sqrt(out.get_mpz_t(), z.get_mpz_t());
  return out;
}

Rational ratio(i128 num, i128 den) { return make_rational(from_i128(num), from_i128(den)); }

}  // namespace

i128 to_i128(const Integer& z) {
  if (mpz_sizeinbase(z.get_mpz_t(), 2) > 120)
    throw Error(ErrorKind::ArithmeticOverflow, "integer exceeds 120 bits: " + z.get_str());
  Integer mag = abs(z);
  i128 hi = static_cast<i128>(Integer(mag >> 60).get_ui());
  Integer low = mag - (Integer(mag >> 60) << 60);
  i128 out = (hi << 60) | static_cast<i128>(low.get_ui());
  return z < 0 ? -out : out;
}

Integer from_i128(i128 z) {
  bool neg = z < 0;
  unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-(z + 1)) + 1 : static_cast<unsigned __int128>(z);
  Integer hi(static_cast<unsigned long>(mag >> 64));
  Integer lo(static_cast<unsigned long>(mag & 0xffffffffffffffffULL));
  Integer out = (hi << 64) + lo;
  return neg ? Integer(-out) : out;
}

Direction Direction::make(Integer dx, Integer dy) {
  if (dx == 0 && dy == 0) throw Error(ErrorKind::OutOfRange, "zero direction");
  Integer g = gcd(dx, dy);
  return {dx / g, dy / g};
}

Direction Direction::from_slope(const ProjectiveSlope& s, bool up) {
  if (s.infinite) return up ? Direction{1, 0} : Direction{-1, 0};
  Integer p = s.value.get_num(), q = s.value.get_den();
  return up ? make(p, q) : make(-p, -q);
}

ProjectiveSlope Direction::slope() const {
  if (dy == 0) return ProjectiveSlope::inf();
  return {make_rational(dx, dy), false};
}

LinearTracer::LinearTracer(const Origami& o, const SurfacePoint& start, const Direction& d,
                           const Integer& extra_denominator)
    : o_(&o) {
  if (start.square >= o.size()) throw Error(ErrorKind::OutOfRange, "square index out of range");
  if (start.x < 0 || start.x > 1 || start.y < 0 || start.y > 1)
    throw Error(ErrorKind::OutOfRange, "local coordinates must lie in [0, 1]");
  if (d.dx == 0 && d.dy == 0) throw Error(ErrorKind::OutOfRange, "zero direction");
  Integer D = lcm(lcm(start.x.get_den(), start.y.get_den()), extra_denominator);
  Integer ax = d.dx == 0 ? Integer(1) : Integer(abs(d.dx));
  Integer ay = d.dy == 0 ? Integer(1) : Integer(abs(d.dy));
  Integer L = D * ax * ay;
  if (mpz_sizeinbase(L.get_mpz_t(), 2) > 90)
    throw Error(ErrorKind::ArithmeticOverflow, "tracer scale exceeds 90 bits");
  L_ = to_i128(L);
  dx_ = to_i128(d.dx);
  dy_ = to_i128(d.dy);
  Rational X = start.x * Rational(L), Y = start.y * Rational(L);
  X_ = to_i128(X.get_num());
  Y_ = to_i128(Y.get_num());
  square_ = start.square;
  if (X_ == L_ && dx_ >= 0) {
    square_ = o.h()(square_);
    X_ = 0;
  }
  if (Y_ == L_ && dy_ >= 0) {
    square_ = o.v()(square_);
    Y_ = 0;
  }
}

bool LinearTracer::at_cone() const {
  bool cx = X_ == 0 || X_ == L_, cy = Y_ == 0 || Y_ == L_;
  if (!cx || !cy) return false;
  Corner c = X_ == 0 ? (Y_ == 0 ? Corner::BottomLeft : Corner::TopLeft)
                     : (Y_ == 0 ? Corner::BottomRight : Corner::TopRight);
  return o_->is_cone(o_->vertex_of(square_, c));
}

i128 LinearTracer::wall_x() const {
  if (dx_ > 0) return (L_ - X_) / dx_;
  if (dx_ < 0) return X_ / -dx_;
  return kHuge;
}

i128 LinearTracer::wall_y() const {
  if (dy_ > 0) return (L_ - Y_) / dy_;
  if (dy_ < 0) return Y_ / -dy_;
  return kHuge;
}

void LinearTracer::cross(Exit kind, Crossing& c) {
  const Origami& o = *o_;
  c.s = s_;
  c.from = square_;
  c.kind = kind;
  std::size_t j = square_;
  if (kind == Exit::Vertical || kind == Exit::Corner) {
    c.side = dx_ > 0 ? Side::Right : Side::Left;
    c.pos = Y_;
    j = dx_ > 0 ? o.h()(j) : o.h_inv()(j);
    X_ = dx_ > 0 ? 0 : L_;
  } else {
    c.side = dy_ > 0 ? Side::Top : Side::Bottom;
    c.pos = X_;
  }
  if (kind == Exit::Horizontal || kind == Exit::Corner) {
    j = dy_ > 0 ? o.v()(j) : o.v_inv()(j);
    Y_ = dy_ > 0 ? 0 : L_;
  }
  square_ = j;
  c.to = j;
}

bool LinearTracer::advance(i128 s_limit, Piece& piece, std::optional<Crossing>& crossing) {
  crossing.reset();
  if (stopped_ || s_ > s_limit) return false;
  i128 wx = wall_x(), wy = wall_y();
  i128 w = std::min(wx, wy);
  i128 step = std::min(w, s_limit - s_);
  piece.square = square_;
  piece.x0 = X_;
  piece.y0 = Y_;
  piece.s0 = s_;
  X_ += step * dx_;
  Y_ += step * dy_;
  s_ += step;
  piece.x1 = X_;
  piece.y1 = Y_;
  piece.s1 = s_;
  if (step < w) return true;

  Exit kind = wx == wy ? Exit::Corner : (wx < wy ? Exit::Vertical : Exit::Horizontal);
  // Motion along a side reaches a square corner on its way across the perpendicular wall.
  bool on_vertex = kind == Exit::Corner || (kind == Exit::Horizontal && (X_ == 0 || X_ == L_)) ||
                   (kind == Exit::Vertical && (Y_ == 0 || Y_ == L_));
  std::optional<std::size_t> vertex;
  if (on_vertex) {
    Corner c = X_ == 0 ? (Y_ == 0 ? Corner::BottomLeft : Corner::TopLeft)
                       : (Y_ == 0 ? Corner::BottomRight : Corner::TopRight);
    vertex = o_->vertex_of(square_, c);
    if (o_->is_cone(*vertex)) {
      stopped_ = true;
      cone_ = vertex;
      return true;
    }
  }
  Crossing c;
  cross(kind, c);
  c.vertex = vertex;
  crossing = c;
  return true;
}

SurfacePoint LinearTracer::position() const {
  return o_->normalize({square_, ratio(X_, L_), ratio(Y_, L_)});
}

namespace {

FlowEvent make_event(const Origami& o, const LinearTracer::Crossing& c, i128 L, const Integer& norm2,
                     std::size_t k) {
  FlowEvent e;
  e.k = k;
  e.s = ratio(c.s, L);
  e.t = e.s.get_d() * std::sqrt(norm2.get_d());
  e.square = c.from;
  e.next_square = c.to;
  e.side = c.side;
  e.corner = c.kind == LinearTracer::Exit::Corner;
  e.vertex = c.vertex;
  e.edge_class = o.edge_of(c.from, c.side);
  e.label = o.edge_classes()[e.edge_class].label;
  e.pos = ratio(c.pos, L);
  return e;
}

i128 limit_for_time(const Rational& T, i128 L, const Integer& norm2) {
  if (T < 0) throw Error(ErrorKind::OutOfRange, "negative time");
  // largest integer sigma with (sigma / L)^2 |d|^2 <= T^2
  Rational x = T * T * Rational(from_i128(L) * from_i128(L)) / Rational(norm2);
  return to_i128(isqrt(floor_of(x)));
}

}  // namespace

FlowTrace flow_trace(const Origami& o, const Direction& d, const SurfacePoint& start,
                     const StopCondition& stop, bool allow_singular_start) {
  if (!stop.time && !stop.crossings)
    throw Error(ErrorKind::PreconditionViolated, "flow_trace needs a time or crossing limit");
  LinearTracer tr(o, start, d);
  if (tr.at_cone() && !allow_singular_start)
    throw Error(ErrorKind::StartAtConeVertex, "start point is a cone vertex");
  Integer norm2 = d.norm_squared();
  i128 limit = stop.time ? limit_for_time(*stop.time, tr.scale(), norm2) : kHuge;
  FlowTrace out;
  LinearTracer::Piece piece;
  std::optional<LinearTracer::Crossing> c;
  while (!tr.stopped() && tr.s() <= limit) {
    if (stop.crossings && out.events.size() >= *stop.crossings) break;
    if (!tr.advance(limit, piece, c)) break;
    if (c) out.events.push_back(make_event(o, *c, tr.scale(), norm2, out.events.size()));
    else if (!tr.stopped() && tr.s() == limit) break;
  }
  out.hit_cone = tr.stopped();
  out.cone_vertex = tr.cone_hit();
  out.s_end = ratio(tr.s(), tr.scale());
  out.end = tr.position();
  return out;
}

Segment make_segment(const Origami& o, const SurfacePoint& start, const Direction& d, const Rational& s_len) {
  if (s_len <= 0) throw Error(ErrorKind::OutOfRange, "segment parameter must be positive");
  LinearTracer tr(o, start, d, s_len.get_den());
  Integer norm2 = d.norm_squared();
  i128 L = tr.scale();
  i128 end = to_i128(Rational(s_len * Rational(from_i128(L))).get_num());
  Segment seg;
  seg.surface = &o;
  seg.direction = d;
  seg.s_len = s_len;
  seg.start = {tr.square(), ratio(tr.x(), L), ratio(tr.y(), L)};
  LinearTracer::Piece piece;
  std::optional<LinearTracer::Crossing> c;
  while (!tr.stopped() && tr.s() < end) {
    tr.advance(end, piece, c);
    if (piece.s1 > piece.s0)
      seg.pieces.push_back({piece.square, ratio(piece.x0, L), ratio(piece.y0, L), ratio(piece.x1, L),
                            ratio(piece.y1, L), ratio(piece.s0, L), ratio(piece.s1, L)});
    if (c) seg.crossings.push_back(make_event(o, *c, L, norm2, seg.crossings.size()));
  }
  if (tr.stopped() && tr.s() < end) {
    if (tr.s() == 0)
      throw Error(ErrorKind::StartAtConeVertex, "direction leaves the cone vertex outside the start square");
    throw Error(ErrorKind::ConeVertexInInterior,
                "cone vertex at parameter " + to_string(ratio(tr.s(), L)) + " inside the segment");
  }
  // A segment starting on a side it immediately leaves still needs a piece for its endpoint.
  if (seg.pieces.empty()) throw Error(ErrorKind::PreconditionViolated, "segment has no pieces");
  const auto& last = seg.pieces.back();
  seg.end = {last.square, last.x1, last.y1};
  seg.start = {seg.pieces.front().square, seg.pieces.front().x0, seg.pieces.front().y0};
  return seg;
}

Rational parameter_for_length(const Direction& d, const Rational& length, const Integer& den) {
  Rational x = length * length * Rational(den * den) / Rational(d.norm_squared());
  Integer k = isqrt(floor_of(x));
  if (Rational(k * k) < x) k += 1;
  return make_rational(k, den);
}

Segment reverse_segment(const Segment& s) {
  return make_segment(*s.surface, s.end, s.direction.reversed(), s.s_len);
}

CuttingSequence cutting_sequence(const Segment& seg) {
  const Origami& o = *seg.surface;
  CuttingSequence out;
  auto push = [&](std::size_t edge, const Rational& s) {
    if (o.edge_classes()[edge].label) {
      out.letters.push_back(edge);
      out.s.push_back(s);
    }
  };
  bool right = seg.direction.dx > 0;
  bool up = seg.direction.dy > 0;
  for (const auto& e : seg.crossings) {
    if (!e.corner) {
      push(e.edge_class, e.s);
      continue;
    }
    // Resolve a vertex pass by shifting the line slightly in +x.
    std::size_t j = e.square;
    if (right) {
      std::size_t k = o.h()(j);
      push(o.edge_of(j, Side::Right), e.s);
      push(o.edge_of(k, up ? Side::Top : Side::Bottom), e.s);
    } else {
      std::size_t k = up ? o.v()(j) : o.v_inv()(j);
      push(o.edge_of(j, up ? Side::Top : Side::Bottom), e.s);
      push(o.edge_of(k, Side::Left), e.s);
    }
  }
  return out;
}

std::vector<std::string> letter_names(const Origami& o, const CuttingSequence& c) {
  std::vector<std::string> out;
  for (auto id : c.letters) out.push_back(*o.edge_classes()[id].label);
  return out;
}

namespace {

struct P2 {
  Rational x, y;
};

int orient(const P2& a, const P2& b, const P2& c) {
  Rational v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return sgn(v);
}

bool on_closed(const P2& a, const P2& b, const P2& p) {
  if (orient(a, b, p) != 0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

std::optional<P2> closed_intersection(const P2& a, const P2& b, const P2& c, const P2& d) {
  if (std::max(a.x, b.x) < std::min(c.x, d.x) || std::max(c.x, d.x) < std::min(a.x, b.x) ||
      std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y))
    return std::nullopt;
  int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) {
    Rational rx = b.x - a.x, ry = b.y - a.y, sx = d.x - c.x, sy = d.y - c.y;
    Rational den = rx * sy - ry * sx;
    Rational t = ((c.x - a.x) * sy - (c.y - a.y) * sx) / den;
    return P2{a.x + t * rx, a.y + t * ry};
  }
  if (on_closed(a, b, c)) return c;
  if (on_closed(a, b, d)) return d;
  if (on_closed(c, d, a)) return a;
  if (on_closed(c, d, b)) return b;
  return std::nullopt;
}

std::optional<SurfacePoint> endpoints_against(const Segment& a,
                                              const std::multimap<std::size_t, const SegmentPiece*>& b_by_square) {
  const Origami& o = *a.surface;
  for (const auto& pa : a.pieces) {
    for (const P2& end : {P2{pa.x0, pa.y0}, P2{pa.x1, pa.y1}}) {
      bool boundary = end.x == 0 || end.x == 1 || end.y == 0 || end.y == 1;
      if (!boundary) continue;
      for (const auto& rep : o.representations({pa.square, end.x, end.y})) {
        auto range = b_by_square.equal_range(rep.square);
        for (auto it = range.first; it != range.second; ++it) {
          const SegmentPiece& pb = *it->second;
          if (on_closed({pb.x0, pb.y0}, {pb.x1, pb.y1}, {rep.x, rep.y})) return o.normalize(rep);
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<SurfacePoint> segments_intersect(const Segment& a, const Segment& b) {
  if (a.surface != b.surface && !(*a.surface == *b.surface))
    throw Error(ErrorKind::PreconditionViolated, "segments live on different origamis");
  const Origami& o = *a.surface;
  std::multimap<std::size_t, const SegmentPiece*> a_by, b_by;
  for (const auto& p : a.pieces) a_by.emplace(p.square, &p);
  for (const auto& p : b.pieces) b_by.emplace(p.square, &p);
  for (const auto& pa : a.pieces) {
    auto range = b_by.equal_range(pa.square);
    for (auto it = range.first; it != range.second; ++it) {
      const SegmentPiece& pb = *it->second;
      if (auto hit = closed_intersection({pa.x0, pa.y0}, {pa.x1, pa.y1}, {pb.x0, pb.y0}, {pb.x1, pb.y1}))
        return o.normalize({pa.square, hit->x, hit->y});
    }
  }
  if (auto hit = endpoints_against(a, b_by)) return hit;
  return endpoints_against(b, a_by);
}

bool segment_contains(const Segment& s, const SurfacePoint& p) {
  for (const auto& rep : s.surface->representations(p))
    for (const auto& piece : s.pieces)
      if (piece.square == rep.square && on_closed({piece.x0, piece.y0}, {piece.x1, piece.y1}, {rep.x, rep.y}))
        return true;
  return false;
}

SurfacePoint SReflection::point(const SurfacePoint& p) const {
  SurfacePoint q = surface->normalize(p);
  return surface->normalize({sigma(q.square), 1 - q.x, q.y});
}

std::size_t SReflection::edge(std::size_t edge_class) const {
  std::size_t n = surface->size();
  if (edge_class < n) return surface->h_inv()(sigma(edge_class));
  return n + sigma(edge_class - n);
}

std::optional<SReflection> s_reflection(const Origami& o) {
  auto sigma = is_isomorphic(reflect_S(o), o);
  if (!sigma) return std::nullopt;
  return SReflection{*sigma, &o};
}

}  // namespace origami
