#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "origami/origami.hpp"
#include "origami/rational.hpp"
#include "origami/sl2.hpp"

namespace origami {

using i128 = __int128;

/// Primitive integer direction (dx, dy); the slope is dx / dy, so (0, 1) points straight up.
struct Direction {
  Integer dx = 0;
  Integer dy = 1;

  /// Reduces by the gcd. Throws OutOfRange for (0, 0).
  static Direction make(Integer dx, Integer dy);
  /// Finite slopes point up (dy > 0) unless `up` is false; infinity points right (left if !up).
  static Direction from_slope(const ProjectiveSlope& s, bool up = true);

  ProjectiveSlope slope() const;
  Integer norm_squared() const { return dx * dx + dy * dy; }
  Direction reversed() const { return {-dx, -dy}; }
  friend bool operator==(const Direction&, const Direction&) = default;
};

i128 to_i128(const Integer& z);
Integer from_i128(i128 z);

/// Exact straight-line motion on an origami in scaled integer coordinates.
/// Coordinates are multiplied by scale() = D |dx| |dy| (zero factors replaced by one),
/// where D clears the start point and the extra denominator; the motion parameter
/// sigma = s * scale() is an integer at every edge crossing.
class LinearTracer {
 public:
  enum class Exit { None, Vertical, Horizontal, Corner };

  struct Piece {
    std::size_t square = 0;
    i128 x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // scaled local coordinates
    i128 s0 = 0, s1 = 0;                  // scaled motion parameter
  };

  struct Crossing {
    i128 s = 0;
    std::size_t from = 0, to = 0;
    Exit kind = Exit::None;
    Side side = Side::Right;  // side of `from` that was crossed (vertical part for corners)
    i128 pos = 0;             // scaled coordinate along the crossed side
    std::optional<std::size_t> vertex;
  };

  /// The start representation decides the sheet when it lies on a boundary.
  LinearTracer(const Origami& o, const SurfacePoint& start, const Direction& d,
               const Integer& extra_denominator = 1);

  i128 scale() const { return L_; }
  std::size_t square() const { return square_; }
  i128 x() const { return X_; }
  i128 y() const { return Y_; }
  i128 s() const { return s_; }
  bool stopped() const { return stopped_; }
  /// Vertex id when the motion ended at a cone vertex.
  std::optional<std::size_t> cone_hit() const { return cone_; }
  /// Whether the current position is a cone vertex.
  bool at_cone() const;

  /// Moves to the next wall or to s_limit, whichever comes first. Returns the piece
  /// swept (possibly empty) and, when a wall was reached, the crossing performed.
  /// A cone vertex reached stops the tracer without crossing.
  bool advance(i128 s_limit, Piece& piece, std::optional<Crossing>& crossing);

  SurfacePoint position() const;

 private:
  i128 wall_x() const;  // parameter distance to the next vertical wall (huge if dx = 0)
  i128 wall_y() const;
  void cross(Exit kind, Crossing& c);

  const Origami* o_;
  i128 dx_, dy_, L_;
  std::size_t square_ = 0;
  i128 X_ = 0, Y_ = 0, s_ = 0;
  bool stopped_ = false;
  std::optional<std::size_t> cone_;
};

struct FlowEvent {
  std::size_t k = 0;
  Rational s;  // displacement parameter; time is s * |d|
  double t = 0.0;
  std::size_t square = 0;  // square being left
  std::size_t next_square = 0;
  Side side = Side::Right;
  bool corner = false;
  std::optional<std::size_t> vertex;
  std::size_t edge_class = 0;
  std::optional<std::string> label;
  Rational pos;
};

struct StopCondition {
  std::optional<Rational> time;        // stop once s |d| would exceed this
  std::optional<std::size_t> crossings;
};

struct FlowTrace {
  std::vector<FlowEvent> events;
  bool hit_cone = false;
  std::optional<std::size_t> cone_vertex;
  Rational s_end;
  SurfacePoint end;
};

/// Edge crossings of the straight flow from `start`. A cone vertex truncates the trace
/// (hit_cone). Throws StartAtConeVertex unless allow_singular_start.
FlowTrace flow_trace(const Origami& o, const Direction& d, const SurfacePoint& start,
                     const StopCondition& stop, bool allow_singular_start = false);

struct SegmentPiece {
  std::size_t square = 0;
  Rational x0, y0, x1, y1;
  Rational s0, s1;
};

/// Closed straight segment start + s (dx, dy), 0 <= s <= s_len. Euclidean length
/// squared is s_len^2 |d|^2.
struct Segment {
  const Origami* surface = nullptr;
  SurfacePoint start;  // representation whose square contains the first piece
  Direction direction;
  Rational s_len;
  std::vector<SegmentPiece> pieces;
  std::vector<FlowEvent> crossings;  // includes crossings at either endpoint
  SurfacePoint end;                  // representation in the last piece's square

  Rational length_squared() const { return s_len * s_len * Rational(direction.norm_squared()); }
};

/// Inputs of make_segment, kept for witnesses.
struct SegmentSpec {
  SurfacePoint start;
  Direction direction;
  Rational s_len;
};

/// Throws ConeVertexInInterior if a cone vertex lies strictly inside the segment.
Segment make_segment(const Origami& o, const SurfacePoint& start, const Direction& d, const Rational& s_len);

/// Smallest s = k / den with s^2 |d|^2 >= length^2.
Rational parameter_for_length(const Direction& d, const Rational& length, const Integer& den = 1000);

Segment reverse_segment(const Segment& s);

struct CuttingSequence {
  std::vector<std::size_t> letters;  // labelled edge class ids
  std::vector<Rational> s;           // crossing parameters
};

/// Labelled crossings in order; a pass through a regular vertex counts the vertical
/// side first, then the horizontal side of the square entered.
CuttingSequence cutting_sequence(const Segment& s);
std::vector<std::string> letter_names(const Origami& o, const CuttingSequence& c);

/// A common point in canonical form, or nothing.
std::optional<SurfacePoint> segments_intersect(const Segment& a, const Segment& b);
/// Whether the point lies on the closed segment.
bool segment_contains(const Segment& s, const SurfacePoint& p);

/// Horizontal reflection of an origami fixed by S: (j, x, y) -> (sigma(j), 1 - x, y).
struct SReflection {
  Permutation sigma;
  const Origami* surface = nullptr;

  SurfacePoint point(const SurfacePoint& p) const;
  std::size_t edge(std::size_t edge_class) const;
  Direction direction(const Direction& d) const { return {-d.dx, d.dy}; }
};

/// Absent when reflect_S(o) is not isomorphic to o.
std::optional<SReflection> s_reflection(const Origami& o);

}  // namespace origami
