#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "origami/flow.hpp"

namespace origami {

/// Open slope interval (lo, hi) in the x/y convention, traversed upward. lo may be -inf
/// (ProjectiveSlope::inf() as lower end) and hi may be +inf.
struct SlopeCone {
  ProjectiveSlope lo;
  ProjectiveSlope hi;
  std::string name;

  static SlopeCone between(const Rational& lo, const Rational& hi);
  static SlopeCone below(const Rational& hi);  // (-inf, hi)
  static SlopeCone above(const Rational& lo);  // (lo, +inf)

  bool contains(const Rational& slope) const;
  /// Monotone map from u in (0, 1) onto the cone.
  Rational at(const Rational& u) const;
};

struct PairEvidence {
  std::size_t count = 0;
  Rational t_min_slope, min_slope;
  Rational t_max_slope, max_slope;
};

struct TransitionRelation {
  SlopeCone cone;
  std::map<std::size_t, std::set<std::size_t>> successors;
  std::map<std::pair<std::size_t, std::size_t>, PairEvidence> evidence;
  std::set<std::size_t> non_converged;  // letters whose successor set grew in the last round
  std::size_t samples = 0;
  std::size_t skipped = 0;  // samples reaching a vertex before the next letter
};

/// Next labelled edge class met by the upward straight line leaving the edge class
/// `letter` at relative position t in (0, 1) with the given slope; absent if a vertex
/// intervenes or no letter follows within max_crossings.
std::optional<std::size_t> next_letter(const Origami& o, std::size_t letter, const Rational& t,
                                       const Rational& slope, std::size_t max_crossings = 64);

/// Stratified grid of grid x grid samples per letter followed by bisection rounds
/// between neighbouring samples with different successors.
TransitionRelation next_letter_relation(const Origami& o, const SlopeCone& cone, std::size_t grid = 100,
                                        std::size_t refine_rounds = 12);

/// Successor claim for one letter of the Ornithorynque in cone (0, 1) upward. Letters in
/// `excluded` are dropped from the sampled set before the containment test.
struct TransitionClaim {
  std::string from;
  std::set<std::string> allowed;
  std::set<std::string> excluded;
};

/// C_i -> {A_{i+1}}, B_i -> {D_{i+2}, C_{i+2}} (off tile i+1), A_i -> {A,B,C}_{i+1},
/// D_i -> {A,B}_{i+2}, for i = 0, 1, 2.
std::vector<TransitionClaim> ornithorynque_transition_claims();

struct ClaimCheck {
  TransitionClaim claim;
  std::set<std::string> sampled;
  bool contained = false;  // sampled minus excluded is inside allowed
  bool realized = false;   // every allowed letter was sampled
};

std::vector<ClaimCheck> check_transition_claims(const Origami& o, const TransitionRelation& rel);

/// Tiles of the Ornithorynque whose closed squares meet the segment.
std::set<int> tiles_crossed(const Segment& s);

/// "A0" style letter parsing for the Ornithorynque alphabet.
struct Letter {
  char kind = 'A';
  int index = 0;
  friend bool operator==(const Letter&, const Letter&) = default;
};
Letter parse_letter(const std::string& name);
std::string letter_name(char kind, int index);

enum class VerdictKind { Triple, Pair, Unclassified };
std::string to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Unclassified;
  std::size_t position = 0;  // 1-based k of the matching letters
  int i = 0;
  bool slope_in_audit_range = false;  // -6 < Slope(H) < -1
};

/// wordH from a segment of slope < -1 read with increasing x, wordV from one of slope
/// in (0, 1) read upward.
/// Throws WordTooShort unless both words have at least 12 letters.
Verdict criterion_classify(const std::vector<std::string>& wordH, const std::vector<std::string>& wordV,
                           const Rational& slopeH);

enum class ConePair { Standard, Reflected };  // (H < -1, 0 < V < 1) or (-1 < H < 0, V > 1)

struct HarnessFailure {
  std::size_t trial = 0;
  SegmentSpec H, V;
};

struct HarnessReport {
  std::size_t trials = 0;
  std::size_t rejected = 0;  // candidate segments through a cone vertex
  std::vector<HarnessFailure> failures;
  std::map<std::string, std::size_t> verdicts;
  std::size_t short_words = 0;
  std::size_t classified = 0;
  std::size_t classified_intersecting = 0;
  std::size_t unclassified_outside_range = 0;
  std::size_t witness_rechecks_failed = 0;
};

struct HarnessOptions {
  Rational K = 17;
  std::size_t trials = 1000;
  ConePair cones = ConePair::Standard;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  long max_component = 40;  // direction components drawn from [1, max_component]
  long denominator = 1000;  // start coordinates k / denominator
};

HarnessReport intersection_property_harness(const Origami& o, const HarnessOptions& opt);

enum class TileCone { Shallow, Steep };  // 0 < slope < 1 upward, slope < -1

struct TileReport {
  std::size_t trials = 0;         // segments with at least 6 letters
  std::size_t short_rejected = 0; // draws with fewer letters
  std::size_t cone_rejected = 0;  // draws through a cone vertex
  std::vector<SegmentSpec> violations;
};

/// Random segments in the cone with at least 6 labelled letters must meet all three tiles.
TileReport tile_lemma_harness(const Origami& o, TileCone cone, std::size_t trials, std::uint64_t seed,
                              long max_component = 40, long denominator = 1000);

/// A pair of segments of length >= K, slopes in the standard cones, that do not meet,
/// built inside a vertical and a horizontal cylinder with disjoint squares.
std::optional<std::pair<SegmentSpec, SegmentSpec>> disjoint_cylinder_pair(const Origami& o, const Rational& K);

/// Two-square line lemma: lines through pV, pH with the given directions, Q1 = [0,1]^2,
/// Q2 = [1,2]x[0,1]. Absent when the hypotheses fail, else whether P lies in Q1 u Q2.
std::optional<bool> lines_meet_in_adjacent_squares(const Rational& xV, const Rational& yV, const Direction& dV,
                                                   const Rational& xH, const Rational& yH, const Direction& dH);

/// Same-square lemma on a surface: absent when the hypotheses fail for square j (both
/// segments cross j, endpoints on sides of other squares and off the closed square j),
/// else whether the segments meet.
std::optional<bool> same_square_predicate(const Segment& H, const Segment& V, std::size_t j);

}  // namespace origami
