#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "origami/flow.hpp"
#include "origami/sl2.hpp"

namespace origami {

/// A cylinder of the base (vertical or horizontal) decomposition of the chart surface Y.
struct Cylinder {
  std::vector<std::size_t> squares;               // strips listed from one boundary to the other
  std::vector<std::vector<std::size_t>> strips;   // unit-width strips in order
  Integer L = 0;                                  // closed-geodesic length in Y
  Integer W = 0;                                  // width in Y
  std::vector<std::size_t> boundary_start_edges;  // edge classes of the first strip's outer side
  std::vector<std::size_t> boundary_end_edges;    // edge classes of the last strip's outer side
};

/// Cylinders of an origami X in the slope A * 0 (or A * inf), carried from the base
/// decomposition of the chart Y = act(A^-1, X).
struct CylinderDecomposition {
  IntMatrix2 A;
  bool horizontal_base = false;
  ProjectiveSlope slope;
  Integer p = 0, q = 1;  // primitive direction (p, q) of the cylinders in X
  Origami chart;         // Y
  std::vector<Cylinder> cylinders;
  std::vector<std::size_t> cylinder_of_square;  // in Y

  Integer area() const;
};

/// Strips are v-cycles (h-cycles for horizontal); a strip is merged with its neighbour
/// across a side line free of cone vertices.
std::vector<Cylinder> vertical_cylinders(const Origami& o);
std::vector<Cylinder> horizontal_cylinders(const Origami& o);

/// Throws NotUnimodular unless det A = 1.
CylinderDecomposition induced_cylinders(const Origami& X, const IntMatrix2& A, bool horizontal_base = false);

struct TransversalBound {
  std::vector<std::size_t> visits;  // cylinder indices in crossing order
  Integer width_sum = 0;
  Rational bound_squared;           // (sum W)^2 |d|^2 / <d, (q, -p)>^2
  Rational length_squared;          // |H|^2
  bool holds = false;
};

/// Bound on |H| from the widths of the cylinders it crosses. Throws ParallelToDecomposition.
TransversalBound transversal_bound(const Segment& H, const CylinderDecomposition& D);

struct TransversalReport {
  std::size_t trials = 0;
  std::size_t rejected = 0;  // draws through a cone vertex
  std::vector<SegmentSpec> violations;
};

/// Random decompositions A * 0 = p / q with |p| <= q <= q_max and random transversal
/// segments of length 1..20; every bound must hold.
TransversalReport transversal_harness(const Origami& X, std::size_t trials, long q_max, std::uint64_t seed);

struct TrappingWindow {
  std::size_t cylinder = 0;
  Rational window_s;             // motion parameter W / a for slope a / b
  std::optional<Rational> exit_s;  // first parameter at which the orbit leaves the cylinder
  bool trapped = false;
};

/// Orbit of slope alpha = a / b > 0 from a point on the left boundary line of a vertical
/// cylinder of `o`. Throws PreconditionViolated unless alpha < 1 / L_i for every cylinder.
TrappingWindow trapping_window(const Origami& o, const std::vector<Cylinder>& D, const Rational& alpha,
                               const SurfacePoint& boundary_point);

}  // namespace origami
