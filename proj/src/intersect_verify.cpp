#include "origami/intersect_verify.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include "origami/error.hpp"
#include "origami/rng.hpp"

namespace origami {

SlopeCone SlopeCone::between(const Rational& lo, const Rational& hi) {
  return {{lo, false}, {hi, false}, "(" + to_string(lo) + "," + to_string(hi) + ")"};
}

SlopeCone SlopeCone::below(const Rational& hi) {
  return {ProjectiveSlope::inf(), {hi, false}, "(-inf," + to_string(hi) + ")"};
}

SlopeCone SlopeCone::above(const Rational& lo) {
  return {{lo, false}, ProjectiveSlope::inf(), "(" + to_string(lo) + ",inf)"};
}

bool SlopeCone::contains(const Rational& s) const {
  bool above_lo = lo.infinite || s > lo.value;
  bool below_hi = hi.infinite || s < hi.value;
  return above_lo && below_hi;
}

Rational SlopeCone::at(const Rational& u) const {
  if (u <= 0 || u >= 1) throw Error(ErrorKind::OutOfRange, "cone parameter must lie in (0, 1)");
  if (lo.infinite && hi.infinite) return (2 * u - 1) / (u * (1 - u));
  if (lo.infinite) return hi.value + 1 - 1 / u;
  if (hi.infinite) return lo.value - 1 + 1 / (1 - u);
  return lo.value + u * (hi.value - lo.value);
}

std::optional<std::size_t> next_letter(const Origami& o, std::size_t letter, const Rational& t,
                                       const Rational& slope, std::size_t max_crossings) {
  const EdgeClass& ec = o.edge_classes().at(letter);
  Direction d = Direction::from_slope({slope, false}, true);
  SurfacePoint start;
  if (ec.vertical) {
    if (d.dx == 0) return std::nullopt;
    start = d.dx > 0 ? SurfacePoint{ec.upper_square, 0, t} : SurfacePoint{ec.lower_square, 1, t};
  } else {
    start = {ec.upper_square, t, 0};
  }
  LinearTracer tr(o, start, d);
  LinearTracer::Piece piece;
  std::optional<LinearTracer::Crossing> c;
  const i128 unlimited = static_cast<i128>(1) << 120;
  for (std::size_t k = 0; k < max_crossings && !tr.stopped();) {
    tr.advance(unlimited, piece, c);
    if (!c) continue;
    ++k;
    if (c->vertex) return std::nullopt;
    std::size_t edge = o.edge_of(c->from, c->side);
    if (o.edge_classes()[edge].label) return edge;
  }
  return std::nullopt;
}

namespace {

struct Sample {
  Rational t, u;
  std::optional<std::size_t> next;
};

void record(TransitionRelation& rel, std::size_t letter, const Rational& t, const Rational& slope,
            const std::optional<std::size_t>& next) {
  ++rel.samples;
  if (!next) {
    ++rel.skipped;
    return;
  }
  rel.successors[letter].insert(*next);
  auto [it, fresh] = rel.evidence.try_emplace({letter, *next});
  PairEvidence& ev = it->second;
  if (fresh || slope < ev.min_slope) {
    ev.min_slope = slope;
    ev.t_min_slope = t;
  }
  if (fresh || slope > ev.max_slope) {
    ev.max_slope = slope;
    ev.t_max_slope = t;
  }
  ++ev.count;
}

}  // namespace

TransitionRelation next_letter_relation(const Origami& o, const SlopeCone& cone, std::size_t grid,
                                        std::size_t refine_rounds) {
  if (grid == 0) throw Error(ErrorKind::OutOfRange, "grid must be positive");
  TransitionRelation rel;
  rel.cone = cone;
  constexpr std::size_t kMaxPairs = 200000;
  for (const auto& ec : o.edge_classes()) {
    if (!ec.label) continue;
    std::size_t letter = ec.id;
    rel.successors[letter];
    auto eval = [&](const Rational& t, const Rational& u) {
      Rational slope = cone.at(u);
      auto next = next_letter(o, letter, t, slope);
      record(rel, letter, t, slope, next);
      return Sample{t, u, next};
    };
    std::vector<Sample> cells(grid * grid);
    for (std::size_t i = 0; i < grid; ++i)
      for (std::size_t k = 0; k < grid; ++k)
        cells[i * grid + k] = eval(make_rational(2 * i + 1, 2 * grid), make_rational(2 * k + 1, 2 * grid));
    std::vector<std::pair<Sample, Sample>> pairs;
    for (std::size_t i = 0; i < grid; ++i)
      for (std::size_t k = 0; k < grid; ++k) {
        const Sample& s = cells[i * grid + k];
        if (i + 1 < grid && cells[(i + 1) * grid + k].next != s.next) pairs.emplace_back(s, cells[(i + 1) * grid + k]);
        if (k + 1 < grid && cells[i * grid + k + 1].next != s.next) pairs.emplace_back(s, cells[i * grid + k + 1]);
      }
    for (std::size_t round = 0; round < refine_rounds && !pairs.empty(); ++round) {
      std::size_t before = rel.successors[letter].size();
      std::vector<std::pair<Sample, Sample>> next_pairs;
      for (const auto& [a, b] : pairs) {
        Sample m = eval((a.t + b.t) / 2, (a.u + b.u) / 2);
        if (next_pairs.size() < kMaxPairs && m.next != a.next) next_pairs.emplace_back(a, m);
        if (next_pairs.size() < kMaxPairs && m.next != b.next) next_pairs.emplace_back(m, b);
      }
      pairs = std::move(next_pairs);
      bool last = round + 1 == refine_rounds || pairs.empty();
      if (last && rel.successors[letter].size() != before) rel.non_converged.insert(letter);
    }
  }
  return rel;
}

std::set<int> tiles_crossed(const Segment& s) {
  const Origami& o = *s.surface;
  if (o.size() != 12) throw Error(ErrorKind::PreconditionViolated, "tiles are defined on the 12-square origami");
  std::set<int> out;
  for (const auto& p : s.pieces) {
    out.insert(static_cast<int>(p.square / 4));
    for (const auto& [x, y] : {std::pair{p.x0, p.y0}, std::pair{p.x1, p.y1}}) {
      if (x != 0 && x != 1 && y != 0 && y != 1) continue;
      for (const auto& rep : o.representations({p.square, x, y})) out.insert(static_cast<int>(rep.square / 4));
    }
  }
  return out;
}

Letter parse_letter(const std::string& name) {
  if (name.size() != 2 || name[0] < 'A' || name[0] > 'D' || name[1] < '0' || name[1] > '2')
    throw Error(ErrorKind::Parse, "not a letter of the alphabet: '" + name + "'");
  return {name[0], name[1] - '0'};
}

std::string letter_name(char kind, int index) {
  return std::string(1, kind) + std::to_string(((index % 3) + 3) % 3);
}

std::string to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Triple: return "triple";
    case VerdictKind::Pair: return "pair";
    case VerdictKind::Unclassified: return "unclassified";
  }
  return "?";
}

Verdict criterion_classify(const std::vector<std::string>& wordH, const std::vector<std::string>& wordV,
                           const Rational& slopeH) {
  if (wordH.size() < 12 || wordV.size() < 12)
    throw Error(ErrorKind::WordTooShort, "need at least 12 letters in each word, got " +
                                             std::to_string(wordH.size()) + " and " + std::to_string(wordV.size()));
  std::vector<Letter> g;
  for (const auto& s : wordH) g.push_back(parse_letter(s));
  for (const auto& s : wordV) parse_letter(s);
  auto is = [](const Letter& l, char kind, int i) { return l.kind == kind && l.index == ((i % 3) + 3) % 3; };
  Verdict v;
  v.slope_in_audit_range = slopeH > -6 && slopeH < -1;
  std::size_t n = g.size();
  for (std::size_t k = 0; k + 2 < n; ++k)
    for (int i = 0; i < 3; ++i) {
      bool c = is(g[k], 'C', i + 2) && is(g[k + 1], 'C', i) && is(g[k + 2], 'C', i + 1);
      bool d = is(g[k], 'D', i) && is(g[k + 1], 'D', i + 2) && is(g[k + 2], 'D', i + 1);
      if (c || d) {
        v.kind = VerdictKind::Triple;
        v.position = k + 1;
        v.i = i;
        return v;
      }
    }
  // 1-based 2 <= k <= n - 1
  for (std::size_t k = 1; k + 1 < n; ++k)
    for (int i = 0; i < 3; ++i) {
      bool first = is(g[k], 'C', i + 2) || is(g[k], 'A', i);
      bool second = is(g[k + 1], 'B', i + 1) || is(g[k + 1], 'D', i);
      if (first && second) {
        v.kind = VerdictKind::Pair;
        v.position = k + 1;
        v.i = i;
        return v;
      }
    }
  return v;
}

namespace {

struct TrialResult {
  std::size_t rejected = 0;
  std::optional<HarnessFailure> failure;
  std::string verdict;
  bool short_words = false;
  bool classified = false;
  bool classified_intersecting = false;
  bool outside_range = false;
  bool recheck_failed = false;
};

enum class Role { H, V };

Direction random_direction(Rng& rng, ConePair cones, Role role, long max_component) {
  for (;;) {
    long a = rng.uniform(1, max_component), b = rng.uniform(1, max_component);
    if (cones == ConePair::Standard) {
      // H: slope < -1, V: 0 < slope < 1
      if (role == Role::H && a > b) return Direction::make(-a, b);
      if (role == Role::V && a < b) return Direction::make(a, b);
    } else {
      // H: -1 < slope < 0, V: slope > 1
      if (role == Role::H && a < b) return Direction::make(-a, b);
      if (role == Role::V && a > b) return Direction::make(a, b);
    }
  }
}

std::optional<Segment> random_segment(const Origami& o, Rng& rng, const HarnessOptions& opt, Role role,
                                      SegmentSpec& spec, std::size_t& rejected) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Direction d = random_direction(rng, opt.cones, role, opt.max_component);
    std::size_t square = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(o.size()) - 1));
    Rational x = make_rational(rng.uniform(1, opt.denominator - 1), opt.denominator);
    Rational y = make_rational(rng.uniform(1, opt.denominator - 1), opt.denominator);
    Rational s = parameter_for_length(d, opt.K, opt.denominator);
    try {
      Segment seg = make_segment(o, {square, x, y}, d, s);
      spec = {{square, x, y}, d, s};
      return seg;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ConeVertexInInterior) throw;
      ++rejected;
    }
  }
  return std::nullopt;
}

TrialResult run_trial(const Origami& o, const HarnessOptions& opt, const std::optional<SReflection>& refl,
                      std::size_t index) {
  Rng rng(opt.seed, index);
  TrialResult r;
  SegmentSpec hs, vs;
  auto H = random_segment(o, rng, opt, Role::H, hs, r.rejected);
  auto V = random_segment(o, rng, opt, Role::V, vs, r.rejected);
  if (!H || !V) throw Error(ErrorKind::CapExceeded, "could not place a segment avoiding cone vertices");
  auto w = segments_intersect(*H, *V);
  if (!w) {
    r.failure = HarnessFailure{index, hs, vs};
  } else if (!segment_contains(*H, *w) || !segment_contains(*V, *w)) {
    r.recheck_failed = true;
  }
  if (!o.has_labels()) return r;
  // Classify in the standard configuration, reflecting the other cone pair first.
  std::vector<std::string> wh, wv;
  Rational slopeH;
  if (opt.cones == ConePair::Standard) {
    wh = letter_names(o, cutting_sequence(*H));
    wv = letter_names(o, cutting_sequence(*V));
    slopeH = H->direction.slope().value;
  } else {
    if (!refl) return r;
    Segment h2 = make_segment(o, refl->point(vs.start), refl->direction(vs.direction), vs.s_len);
    Segment v2 = make_segment(o, refl->point(hs.start), refl->direction(hs.direction), hs.s_len);
    wh = letter_names(o, cutting_sequence(h2));
    wv = letter_names(o, cutting_sequence(v2));
    slopeH = h2.direction.slope().value;
  }
  std::reverse(wh.begin(), wh.end());  // the lemmas read H with increasing x
  if (wh.size() < 12 || wv.size() < 12) {
    r.short_words = true;
    return r;
  }
  Verdict v = criterion_classify(wh, wv, slopeH);
  r.verdict = to_string(v.kind);
  if (v.kind != VerdictKind::Unclassified) {
    r.classified = true;
    r.classified_intersecting = w.has_value();
  } else if (!v.slope_in_audit_range) {
    r.outside_range = true;
  }
  return r;
}

}  // namespace

HarnessReport intersection_property_harness(const Origami& o, const HarnessOptions& opt) {
  if (opt.trials == 0) throw Error(ErrorKind::OutOfRange, "trials must be >= 1");
  std::optional<SReflection> refl = s_reflection(o);
  std::vector<TrialResult> results(opt.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < opt.trials;) {
      try {
        results[k] = run_trial(o, opt, refl, k);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  unsigned jobs = std::max(1u, opt.jobs);
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  HarnessReport rep;
  rep.trials = opt.trials;
  for (const auto& r : results) {
    rep.rejected += r.rejected;
    if (r.failure) rep.failures.push_back(*r.failure);
    if (!r.verdict.empty()) ++rep.verdicts[r.verdict];
    rep.short_words += r.short_words;
    rep.classified += r.classified;
    rep.classified_intersecting += r.classified_intersecting;
    rep.unclassified_outside_range += r.outside_range;
    rep.witness_rechecks_failed += r.recheck_failed;
  }
  return rep;
}

std::vector<TransitionClaim> ornithorynque_transition_claims() {
  std::vector<TransitionClaim> out;
  for (int r = 0; r < 3; ++r) {
    auto L = [&](char k, int i) { return letter_name(k, ((i + r) % 3 + 3) % 3); };
    out.push_back({L('C', 1), {L('A', 2)}, {}});
    std::set<std::string> tile;
    for (char k : {'A', 'B', 'C', 'D'}) tile.insert(L(k, 0));
    for (auto x : {L('C', 2), L('D', 1), L('A', 2), L('B', 1)}) tile.insert(x);
    out.push_back({L('B', 2), {L('D', 1), L('C', 1)}, tile});
    out.push_back({L('A', 1), {L('A', 2), L('B', 2), L('C', 2)}, {}});
    out.push_back({L('D', 2), {L('A', 1), L('B', 1)}, {}});
  }
  return out;
}

std::vector<ClaimCheck> check_transition_claims(const Origami& o, const TransitionRelation& rel) {
  std::vector<ClaimCheck> out;
  for (const auto& c : ornithorynque_transition_claims()) {
    ClaimCheck ck;
    ck.claim = c;
    auto id = o.edge_with_label(c.from);
    if (!id) throw Error(ErrorKind::PreconditionViolated, "surface has no letter " + c.from);
    if (auto it = rel.successors.find(*id); it != rel.successors.end())
      for (auto s : it->second) ck.sampled.insert(*o.edge_classes()[s].label);
    ck.contained = true;
    for (const auto& s : ck.sampled)
      if (!c.excluded.count(s) && !c.allowed.count(s)) ck.contained = false;
    ck.realized = std::all_of(c.allowed.begin(), c.allowed.end(), [&](const std::string& a) { return ck.sampled.count(a) > 0; });
    out.push_back(std::move(ck));
  }
  return out;
}

TileReport tile_lemma_harness(const Origami& o, TileCone cone, std::size_t trials, std::uint64_t seed,
                              long max_component, long denominator) {
  TileReport rep;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng(seed, k);
    for (;;) {
      long a = rng.uniform(1, max_component), b = rng.uniform(1, max_component);
      if (a == b) continue;
      Direction d = cone == TileCone::Shallow ? Direction::make(std::min(a, b), std::max(a, b))
                                              : Direction::make(-std::max(a, b), std::min(a, b));
      SurfacePoint p{static_cast<std::size_t>(rng.uniform(0, static_cast<long>(o.size()) - 1)),
                     make_rational(rng.uniform(1, denominator - 1), denominator),
                     make_rational(rng.uniform(1, denominator - 1), denominator)};
      Rational len = make_rational(rng.uniform(4 * denominator, 16 * denominator), denominator);
      Rational s = parameter_for_length(d, len, denominator);
      std::optional<Segment> seg;
      try {
        seg = make_segment(o, p, d, s);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ConeVertexInInterior && e.kind() != ErrorKind::StartAtConeVertex) throw;
        ++rep.cone_rejected;
        continue;
      }
      if (cutting_sequence(*seg).letters.size() < 6) {
        ++rep.short_rejected;
        continue;
      }
      ++rep.trials;
      if (tiles_crossed(*seg).size() != 3) rep.violations.push_back({p, d, s});
      break;
    }
  }
  return rep;
}

std::optional<std::pair<SegmentSpec, SegmentSpec>> disjoint_cylinder_pair(const Origami& o, const Rational& K) {
  auto vcycles = o.v().cycles();
  auto hcycles = o.h().cycles();
  Integer N = ceil_of(4 * K) + 1;
  for (const auto& vc : vcycles)
    for (const auto& hc : hcycles) {
      bool disjoint = true;
      for (auto a : vc)
        for (auto b : hc) disjoint = disjoint && a != b;
      if (!disjoint) continue;
      Direction dv = Direction::make(1, N);
      Direction dh = Direction::make(-N, 1);
      SegmentSpec V{{vc.front(), make_rational(1, 8), make_rational(1, 2)}, dv, parameter_for_length(dv, K)};
      SegmentSpec H{{hc.front(), make_rational(1, 2), make_rational(1, 8)}, dh, parameter_for_length(dh, K)};
      Segment sv = make_segment(o, V.start, V.direction, V.s_len);
      Segment sh = make_segment(o, H.start, H.direction, H.s_len);
      if (!segments_intersect(sh, sv)) return std::pair{H, V};
    }
  return std::nullopt;
}

std::optional<bool> lines_meet_in_adjacent_squares(const Rational& xV, const Rational& yV, const Direction& dV,
                                                   const Rational& xH, const Rational& yH, const Direction& dH) {
  ProjectiveSlope sv = dV.slope(), sh = dH.slope();
  if (sv.infinite || sh.infinite || !(sv.value > 0 && sv.value < 1) || !(sh.value < -1)) return std::nullopt;
  // both lines are graphs over x (dx != 0)
  Rational mV = Rational(dV.dy) / Rational(dV.dx), mH = Rational(dH.dy) / Rational(dH.dx);
  Rational yV1 = yV + (1 - xV) * mV, yH1 = yH + (1 - xH) * mH;
  if (yV1 < 0 || yV1 > 1 || yH1 < 0 || yH1 > 1) return std::nullopt;
  // yV + (x - xV) mV = yH + (x - xH) mH
  Rational x = (yH - yV + xV * mV - xH * mH) / (mV - mH);
  Rational y = yV + (x - xV) * mV;
  return x >= 0 && x <= 2 && y >= 0 && y <= 1;
}

std::optional<bool> same_square_predicate(const Segment& H, const Segment& V, std::size_t j) {
  const Origami& o = *H.surface;
  ProjectiveSlope sh = H.direction.slope(), sv = V.direction.slope();
  if (sh.infinite || sv.infinite || !(sh.value < -1) || !(sv.value > 0 && sv.value < 1)) return std::nullopt;
  // endpoints on square sides, off the closed square j
  auto endpoint_ok = [&](const SurfacePoint& p) {
    auto reps = o.representations(p);
    if (reps.size() < 2) return false;
    for (const auto& rep : reps)
      if (rep.square == j) return false;
    return true;
  };
  for (const Segment* s : {&H, &V})
    if (!endpoint_ok(s->start) || !endpoint_ok(s->end)) return std::nullopt;
  auto meets = [&](const Segment& s) {
    for (const auto& p : s.pieces)
      if (p.square == j) return true;
    return false;
  };
  if (!meets(H) || !meets(V)) return std::nullopt;
  return segments_intersect(H, V).has_value();
}

}  // namespace origami
