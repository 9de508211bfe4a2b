#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "origami/permutation.hpp"
#include "origami/rational.hpp"

namespace origami {

enum class Side { Left, Right, Bottom, Top };
enum class Corner { BottomLeft = 0, BottomRight = 1, TopLeft = 2, TopRight = 3 };

std::string_view to_string(Side side);

/// One pair of identified square sides. Vertical classes are indexed by the square
/// whose right side they are (id = j), horizontal classes by the square whose top side
/// they are (id = n + j).
struct EdgeClass {
  std::size_t id = 0;
  bool vertical = false;
  std::size_t lower_square = 0;  // the side is Right (vertical) or Top (horizontal) of this square
  std::size_t upper_square = 0;  // the side is Left (vertical) or Bottom (horizontal) of this square
  std::optional<std::string> label;
  bool dotted = false;
};

/// A point given by local coordinates in a closed unit square.
struct SurfacePoint {
  std::size_t square = 0;
  Rational x;
  Rational y;

  friend bool operator==(const SurfacePoint&, const SurfacePoint&) = default;
};

struct Cone {
  std::size_t vertex = 0;
  std::size_t order = 0;  // k, cone angle 2 pi (k + 1)
  std::vector<std::size_t> cycle;
};

struct ConeData {
  std::vector<Cone> cones;
  std::size_t regular_vertices = 0;
  int genus = 1;
};

/// A square-tiled surface: square j has right neighbour h(j) and top neighbour v(j).
/// Immutable after construction.
class Origami {
 public:
  /// Throws NotBijective, SizeMismatch or NotTransitive.
  Origami(Permutation h, Permutation v, std::vector<std::string> names = {});

  std::size_t size() const noexcept { return h_.size(); }
  const Permutation& h() const noexcept { return h_; }
  const Permutation& v() const noexcept { return v_; }
  const Permutation& h_inv() const noexcept { return h_inv_; }
  const Permutation& v_inv() const noexcept { return v_inv_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::string square_name(std::size_t j) const;

  const std::vector<EdgeClass>& edge_classes() const noexcept { return edges_; }
  std::size_t vertical_edge(std::size_t j) const noexcept { return j; }
  std::size_t horizontal_edge(std::size_t j) const noexcept { return size() + j; }
  /// The edge class containing the given side of square j.
  std::size_t edge_of(std::size_t j, Side side) const;
  bool has_labels() const noexcept { return has_labels_; }
  std::optional<std::size_t> edge_with_label(const std::string& label) const;

  /// Returns a copy carrying letter names / dotted flags, indexed by edge class id.
  Origami with_labels(const std::vector<std::optional<std::string>>& labels) const;

  std::size_t vertex_count() const noexcept { return vertex_corners_.size(); }
  std::size_t vertex_of(std::size_t j, Corner c) const {
    return vertex_of_corner_[4 * j + static_cast<std::size_t>(c)];
  }
  /// Corner incidences (square, corner) of a vertex class.
  const std::vector<std::pair<std::size_t, Corner>>& vertex_corners(std::size_t vertex) const {
    return vertex_corners_[vertex];
  }
  /// k such that the angle is 2 pi (k + 1); zero for regular points.
  std::size_t vertex_order(std::size_t vertex) const { return vertex_corners_[vertex].size() / 4 - 1; }
  bool is_cone(std::size_t vertex) const { return vertex_corners_[vertex].size() > 4; }

  /// Canonical representative: x = 1 moves to the left side of h(j), y = 1 to the
  /// bottom of v(j). Coordinates must lie in [0, 1].
  SurfacePoint normalize(SurfacePoint p) const;
  /// Every (square, x, y) description of the point, each with x, y in [0, 1].
  std::vector<SurfacePoint> representations(const SurfacePoint& p) const;
  /// Vertex id if the point is a square corner.
  std::optional<std::size_t> vertex_at(const SurfacePoint& p) const;

  friend bool operator==(const Origami& a, const Origami& b) { return a.h_ == b.h_ && a.v_ == b.v_; }

 private:
  void build_vertices();

  Permutation h_, v_, h_inv_, v_inv_;
  std::vector<std::string> names_;
  std::vector<EdgeClass> edges_;
  bool has_labels_ = false;
  std::vector<std::size_t> vertex_of_corner_;
  std::vector<std::vector<std::pair<std::size_t, Corner>>> vertex_corners_;
};

Origami make_origami(std::size_t n, const std::vector<std::size_t>& h,
                     const std::vector<std::size_t>& v, std::vector<std::string> names = {});

/// Twelve squares (i, a, b), index 4i + 2a + b, with the letter labelling A_i..D_i.
Origami builtin_ornithorynque();
/// The three-square L: h = (0 1), v = (0 2).
Origami builtin_genus2_L();
Origami builtin_torus();
/// "ornithorynque", "genus2_L", "torus".
std::optional<Origami> builtin_by_name(const std::string& name);

ConeData cone_data(const Origami& o);

/// Square indices of the tile {(i,1,0),(i,0,0),(i,1,1),(i,0,1)} of the Ornithorynque.
std::array<std::size_t, 4> ornithorynque_tile(int i);
std::size_t ornithorynque_index(int i, int a, int b);

/// Translation automorphisms: permutations commuting with h and v.
std::vector<Permutation> automorphism_group(const Origami& o);

/// sigma with h2 = sigma h1 sigma^-1 and v2 = sigma v1 sigma^-1. Throws SizeMismatch.
std::optional<Permutation> is_isomorphic(const Origami& a, const Origami& b);

/// Lexicographically least (h, v) image list over all relabelings; equal iff isomorphic.
std::vector<std::size_t> canonical_form(const Origami& o);

Origami read_origami(std::istream& in);
Origami read_origami_file(const std::string& path);
void write_origami(std::ostream& out, const Origami& o);

}  // namespace origami
