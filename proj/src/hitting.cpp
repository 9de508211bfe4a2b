#include "origami/hitting.hpp"

#include <algorithm>
#include <cmath>

#include "origami/error.hpp"

namespace origami {

namespace {

Integer isqrt(const Integer& z) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
  return r;
}

const Integer kSqrtScale("1000000000000");

Rational ratio(i128 num, i128 den) { return make_rational(from_i128(num), from_i128(den)); }

// Largest sigma with (sigma / L)^2 |d|^2 <= T^2.
i128 sigma_for_time(const Rational& T, i128 L, const Integer& norm2) {
  Rational x = T * T * Rational(from_i128(L) * from_i128(L)) / Rational(norm2);
  return to_i128(isqrt(floor_of(x)));
}

// z^e for rational e = u / v compared as (lhs)^v >= z^(2u) / 8^v, lhs = T^2.
bool square_at_least_power(const Rational& T2, const Integer& z, const Rational& w) {
  // T >= z^w / sqrt 8  <=>  (8 T^2)^v >= z^(2u)
  Integer u = w.get_num(), v = w.get_den();
  Rational lhs = 8 * T2;
  Rational l = 1;
  for (Integer i = 0; i < v; ++i) l *= lhs;
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), z.get_mpz_t(), 2 * u.get_ui());
  return l >= Rational(r);
}

double power_over_sqrt8(const Integer& z, const Rational& w) {
  return std::exp(w.get_d() * log_of(z)) / std::sqrt(8.0);
}

struct CellGrid {
  std::size_t n = 0;
  std::uint64_t m = 0;
  std::vector<std::uint64_t> bits;
  std::uint64_t unvisited = 0;

  CellGrid(std::size_t squares, std::uint64_t per_side) : n(squares), m(per_side) {
    std::uint64_t total = static_cast<std::uint64_t>(n) * m * m;
    bits.assign((total + 63) / 64, 0);
    unvisited = total;
  }
  // Returns true when the cell was new.
  bool stamp(std::size_t j, std::uint64_t b, std::uint64_t c) {
    std::uint64_t k = (static_cast<std::uint64_t>(j) * m + c) * m + b;  // column-major: flow is mostly upward
    std::uint64_t mask = std::uint64_t(1) << (k & 63);
    std::uint64_t& w = bits[k >> 6];
    if (w & mask) return false;
    w |= mask;
    --unvisited;
    return true;
  }
  bool visited(std::size_t j, std::uint64_t b, std::uint64_t c) const {
    std::uint64_t k = (static_cast<std::uint64_t>(j) * m + c) * m + b;  // column-major: flow is mostly upward
    return (bits[k >> 6] >> (k & 63)) & 1;
  }
};

// Orbit band audit on the cells stamped so far.
void audit_band(const CellGrid& g, TubeAudit& a, i128 sigma_tau, i128 L, i128 dx, i128 dy, const SurfacePoint& p0) {
  a.performed = true;
  Rational incr = (Rational(a.q) * Rational(from_i128(dx)) - Rational(a.p) * Rational(from_i128(dy))) /
                  Rational(from_i128(L));
  a.u_range = abs(incr) * Rational(from_i128(sigma_tau));
  if (a.u_range >= Rational(1, 2)) {
    a.passed = false;
    return;
  }
  Rational u0 = Rational(a.q) * p0.x - Rational(a.p) * p0.y;
  Rational lo = incr >= 0 ? u0 : u0 - a.u_range;
  Rational band_lo = lo + a.u_range;
  band_lo -= floor_of(band_lo);
  const long double eps = 1e-9L;
  long double blo = band_lo.get_d() + eps;
  long double blen = Rational(1 - a.u_range).get_d() - 2 * eps;
  long double m = static_cast<long double>(g.m);
  long double qd = a.q.get_d(), pd = a.p.get_d();
  long double width = (qd + pd) / m;
  std::uint64_t cells = 0, hit = 0;
  for (std::uint64_t b = 0; b < g.m; ++b) {
    for (std::uint64_t c = 0; c < g.m; ++c) {
      long double ulo = (qd * c - pd * (b + 1)) / m;
      long double off = ulo - blo;
      off -= std::floor(off);
      if (off + width >= blen) continue;
      for (std::size_t j = 0; j < g.n; ++j) {
        ++cells;
        if (g.visited(j, b, c)) ++hit;
      }
    }
  }
  a.band_cells = cells;
  a.band_cells_visited = hit;
  a.passed = cells > 0 && hit == 0;
}

}  // namespace

Rational sqrt_lower(const Rational& x) {
  if (x < 0) throw Error(ErrorKind::OutOfRange, "negative argument");
  return make_rational(isqrt(floor_of(x * Rational(kSqrtScale * kSqrtScale))), kSqrtScale);
}

Rational sqrt_upper(const Rational& x) {
  if (x < 0) throw Error(ErrorKind::OutOfRange, "negative argument");
  return make_rational(isqrt(ceil_of(x * Rational(kSqrtScale * kSqrtScale))) + 1, kSqrtScale);
}

Integer cells_per_side(const Rational& r_squared) {
  if (r_squared <= 0) throw Error(ErrorKind::OutOfRange, "radius must be positive");
  Rational X = Rational(200) / (Rational(81) * r_squared);
  return isqrt(floor_of(X)) + 1;
}

SurfacePoint random_start(const Origami& o, Rng& rng, long den) {
  if (den < 2) throw Error(ErrorKind::OutOfRange, "denominator must be at least 2");
  SurfacePoint p;
  p.square = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(o.size()) - 1));
  p.x = make_rational(rng.uniform(1, den - 1), den);
  p.y = make_rational(rng.uniform(1, den - 1), den);
  return p;
}

Rational HittingRecord::T_squared(const Direction& d) const { return T_s * T_s * Rational(d.norm_squared()); }

HittingRecord r_dense_time(const Origami& o, const CFSlope& slope, const SurfacePoint& p, const Rational& r_squared,
                           const HittingOptions& opt, const std::optional<TubeAudit>& tube) {
  if (r_squared <= 0) throw Error(ErrorKind::OutOfRange, "radius must be positive");
  if (opt.time_cap * opt.time_cap <= r_squared)
    throw Error(ErrorKind::CapTooSmall, "time cap does not exceed r");
  Integer m_big = cells_per_side(r_squared);
  Integer total_bits = Integer(static_cast<unsigned long>(o.size())) * m_big * m_big;
  if (total_bits / 8 > Integer(static_cast<unsigned long>(opt.mem_budget)))
    throw Error(ErrorKind::BudgetExceeded, "cell flags need " + to_string(Integer(total_bits / 8)) + " bytes");
  const std::uint64_t m = m_big.get_ui();

  SurfacePoint start = o.normalize(p);
  if (auto v = o.vertex_at(start); v && o.is_cone(*v))
    throw Error(ErrorKind::StartOnSingularLeaf, "start is a cone vertex");

  Rational r_low = sqrt_lower(r_squared);
  if (r_low <= 0) throw Error(ErrorKind::OutOfRange, "radius too small");
  std::size_t N = slope.finite() ? slope.length() : depth_for_error(slope, 10 * opt.time_cap / r_low);

  for (int attempt = 0;; ++attempt, N += 1) {
    Integer pN = slope.p(N), qN = slope.q(N);
    if (pN <= 0 || pN >= qN) throw Error(ErrorKind::OutOfRange, "slope must lie in (0, 1)");
    Direction d = Direction::make(pN, qN);
    Integer norm2 = d.norm_squared();

    HittingRecord rec;
    rec.slope_spec = slope.spec();
    rec.depth = N;
    rec.pN = pN;
    rec.qN = qN;
    rec.start = start;
    rec.r_squared = r_squared;
    rec.r = std::sqrt(r_squared.get_d());
    rec.cells = m;
    rec.seed = opt.seed;

    LinearTracer tr(o, start, d);
    const i128 L = tr.scale();
    const i128 dx = to_i128(d.dx), dy = to_i128(d.dy);
    const i128 sigma_cap = sigma_for_time(opt.time_cap, L, norm2);
    // stamping counts only times t > r
    const i128 sigma_r =
        to_i128(isqrt(floor_of(r_squared * Rational(from_i128(L) * from_i128(L)) / Rational(norm2)))) + 1;
    const i128 ML = static_cast<i128>(m) * L;
    if (ML / L != static_cast<i128>(m) || ML > (static_cast<i128>(1) << 100) / std::max<i128>(dy, dx))
      throw Error(ErrorKind::ArithmeticOverflow, "cell grid too fine for the tracer scale");
    const i128 DL = dy * L;

    if (opt.check_backward) {
      LinearTracer back(o, start, d.reversed());
      LinearTracer::Piece pc;
      std::optional<LinearTracer::Crossing> cr;
      while (!back.stopped() && back.s() < sigma_cap) back.advance(sigma_cap, pc, cr);
      if (back.stopped()) throw Error(ErrorKind::StartOnSingularLeaf, "backward orbit reaches a cone vertex");
    }

    CellGrid grid(o.size(), m);
    std::optional<TubeAudit> audit = tube;
    i128 sigma_tau = 0;
    if (audit) sigma_tau = sigma_for_time(audit->tau, L, norm2) + 1;

    i128 clearance = -1;  // min over crossings of (distance to a cone endpoint) * sine, scaled by L |d|
    bool done = false;
    LinearTracer::Piece piece;
    std::optional<LinearTracer::Crossing> cr;
    while (!done && tr.s() < sigma_cap) {
      if (!tr.advance(sigma_cap, piece, cr)) break;
      if (tr.stopped()) throw Error(ErrorKind::StartOnSingularLeaf, "forward orbit reaches a cone vertex");
      if (audit && !audit->performed && piece.s0 >= sigma_tau)
        audit_band(grid, *audit, sigma_tau, L, dx, dy, start);
      if (cr) {
        ++rec.crossings;
        bool vertical = cr->kind != LinearTracer::Exit::Horizontal;
        Corner lo = vertical ? Corner::BottomRight : Corner::TopLeft;
        Corner hi = Corner::TopRight;
        i128 sine = vertical ? dx : dy;
        i128 e = -1;
        if (o.is_cone(o.vertex_of(cr->from, lo))) e = cr->pos;
        if (o.is_cone(o.vertex_of(cr->from, hi))) e = e < 0 ? L - cr->pos : std::min(e, L - cr->pos);
        if (e >= 0 && (clearance < 0 || e * sine < clearance)) clearance = e * sine;
      }
      if (piece.s1 < sigma_r || piece.s1 == piece.s0) continue;
      i128 s0 = piece.s0, X0 = piece.x0, Y0 = piece.y0;
      if (s0 < sigma_r) {
        X0 += (sigma_r - s0) * dx;
        Y0 += (sigma_r - s0) * dy;
        s0 = sigma_r;
      }
      const i128 U0 = X0 * static_cast<i128>(m), V0 = Y0 * static_cast<i128>(m);
      const i128 V1 = piece.y1 * static_cast<i128>(m);
      if (V1 <= V0) continue;
      const i128 mi = static_cast<i128>(m);
      i128 b = V0 / L;
      const i128 b_last = std::min<i128>((V1 - 1) / L, mi - 1);
      i128 Vs = V0;
      i128 num = U0 * dy;  // U(V) * dy
      i128 col = num / DL, rem = num % DL;
      for (; b <= b_last; ++b) {
        i128 Ve = std::min<i128>(V1, (b + 1) * L);
        i128 rem_e = rem + (Ve - Vs) * dx;
        i128 col_e = col;
        while (rem_e >= DL) {
          rem_e -= DL;
          ++col_e;
        }
        i128 c_hi = std::min<i128>(col_e, mi - 1);
        for (i128 c = col; c <= c_hi; ++c) {
          if (grid.stamp(piece.square, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(c)) &&
              grid.unvisited == 0) {
            Rational entry = c == col ? ratio(Vs - V0, mi * dy) : ratio(c * L - U0, mi * dx);
            if (entry < 0) entry = 0;
            rec.T_s = (Rational(from_i128(s0)) + entry) / Rational(from_i128(L));
            done = true;
            break;
          }
        }
        if (done) break;
        Vs = Ve;
        col = col_e;
        rem = rem_e;
      }
    }
    if (!done) {
      rec.capped = true;
      rec.T_s = ratio(tr.s(), L);
    }
    rec.T = rec.T_s.get_d() * std::sqrt(norm2.get_d());
    if (audit && !audit->performed) audit_band(grid, *audit, sigma_tau, L, dx, dy, start);
    rec.tube = audit;

    // the true orbit stays within delta * t of the simulated one while no cone vertex
    // falls between them
    if (slope.finite()) {
      rec.shadow_ok = true;
    } else {
      Integer qq = qN * slope.q(N + 1);
      Rational end_sigma = rec.T_s * Rational(from_i128(L));
      rec.shadow_ok = clearance < 0 || Rational(from_i128(clearance)) * Rational(qq) > end_sigma * Rational(norm2);
    }
    if (rec.shadow_ok || attempt >= 3 || slope.finite()) return rec;
  }
}

std::vector<SpecialTimeRow> special_times_check(const Origami& o, const CFSlope& slope, const SurfacePoint& p,
                                                std::size_t n_first, std::size_t n_last, const Rational& K,
                                                const HittingOptions& opt) {
  std::vector<SpecialTimeRow> out;
  for (std::size_t n = n_first; n <= n_last; ++n) {
    SpecialTimeRow row;
    row.n = n;
    row.qn = slope.q(n);
    Rational rn = 2 * (K + 1) / Rational(row.qn);
    row.bound = 4 * K * Rational(row.qn);
    HittingOptions o2 = opt;
    o2.time_cap = 2 * row.bound;
    row.record = r_dense_time(o, slope, p, rn * rn, o2);
    Direction d = Direction::make(row.record.pN, row.record.qN);
    row.ratio = row.record.T / row.bound.get_d();
    row.passed = !row.record.capped && row.record.T_squared(d) <= row.bound * row.bound;
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<LowerBoundRow> lower_bound_experiment(const Origami& o, const CFSlope& slope, const Rational& w,
                                                  const SurfacePoint& p, const Integer& q_min, const Integer& q_max,
                                                  const HittingOptions& opt) {
  if (w <= 1) throw Error(ErrorKind::ExponentTooSmall, "the lower-bound construction needs w > 1");
  if (slope.finite()) throw Error(ErrorKind::PreconditionViolated, "irrational slope required");
  std::vector<LowerBoundRow> out;
  for (std::size_t k = 1;; ++k) {
    Integer q = slope.q(2 * k);
    if (q > q_max) break;
    if (q < q_min) continue;
    Integer a_next = slope.quotient(2 * k + 1);
    if (a_next < ceil_power(q, w - 1)) continue;

    LowerBoundRow row;
    row.k = k;
    row.q2k = q;
    row.p2k = slope.p(2 * k);
    row.bound = power_over_sqrt8(q, w);
    Rational r2 = Rational(1) / (Rational(32) * Rational(q * q));

    TubeAudit tube;
    tube.p = row.p2k;
    tube.q = q;
    // window end q^w / sqrt 8, rounded up
    Integer qw2;
    mpz_pow_ui(qw2.get_mpz_t(), q.get_mpz_t(), 2 * w.get_num().get_ui());
    tube.tau = w.get_den() == 1 ? sqrt_upper(Rational(qw2) / 8) : Rational(row.bound * 1.000001);
    row.record = r_dense_time(o, slope, p, r2, opt, tube);
    Direction d = Direction::make(row.record.pN, row.record.qN);
    row.measured_passed = square_at_least_power(row.record.T_squared(d), q, w);
    row.tube_passed = row.record.tube && row.record.tube->passed;

    // |q alpha - p| <= |q pN/qN - p| + q / (qN qN+1)
    std::size_t N = row.record.depth;
    Rational gap = abs(Rational(q) * make_rational(row.record.pN, row.record.qN) - Rational(row.p2k)) +
                   Rational(q) / Rational(row.record.qN * slope.q(N + 1));
    Rational lip = 1 - 2 * sqrt_upper(r2 * Rational(row.p2k * row.p2k + q * q));
    row.certified_T = lip > 0 ? lip / gap : Rational(0);
    row.certified_passed = lip > 0 && square_at_least_power(row.certified_T * row.certified_T, q, w);

    IntMatrix2 A = g_matrix(slope.quotients(2 * k));
    Rational tail = slope.tail(2 * k, N + 1);
    row.kappa_squared = stretch_factor_squared(A, ProjectiveSlope{tail, false});
    row.kappa_passed = 2 * row.kappa_squared > Rational(q * q);

    Origami X0 = act(A.inverse(), o);
    auto cyl = vertical_cylinders(X0);
    bool all = true;
    Rational window;
    for (std::size_t i = 0; i < cyl.size() && all; ++i) {
      SurfacePoint b{cyl[i].strips.front().front(), 0, Rational(1, 2)};
      try {
        TrappingWindow tw = trapping_window(X0, cyl, tail, b);
        all = tw.trapped;
        if (i == 0 || tw.window_s < window) window = tw.window_s;
      } catch (const Error& e) {
        // the level is too shallow for the window argument
        if (e.kind() != ErrorKind::PreconditionViolated) throw;
        all = false;
      }
    }
    row.trapping_passed = all;
    row.trapping_window_s = window;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace origami
