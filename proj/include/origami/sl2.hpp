#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "origami/origami.hpp"
#include "origami/rational.hpp"

namespace origami {

/// [[a, b], [c, d]] acting on column vectors (x, y).
struct IntMatrix2 {
  Integer a = 1, b = 0, c = 0, d = 1;

  static IntMatrix2 identity() { return {}; }
  static IntMatrix2 T() { return {1, 1, 0, 1}; }
  static IntMatrix2 V() { return {1, 0, 1, 1}; }
  static IntMatrix2 R() { return {0, -1, 1, 0}; }

  Integer det() const { return a * d - b * c; }
  /// Inverse of a determinant +-1 matrix.
  IntMatrix2 inverse() const;
  IntMatrix2 operator*(const IntMatrix2& rhs) const;
  IntMatrix2 pow(long k) const;
  std::string to_string() const;

  friend bool operator==(const IntMatrix2& x, const IntMatrix2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
};

/// Parses "a,b,c,d".
IntMatrix2 parse_matrix(const std::string& text);

enum class Token { T, TInv, V, VInv };
using GeneratorWord = std::vector<Token>;

std::string to_string(Token t);
std::string to_string(const GeneratorWord& w);
Token inverse(Token t);
GeneratorWord inverse(const GeneratorWord& w);
IntMatrix2 matrix_of(Token t);
/// Product t_1 t_2 ... t_k.
IntMatrix2 evaluate(const GeneratorWord& w);

/// Word in T^{+-1}, V^{+-1} evaluating to A. Throws NotUnimodular unless det A = 1.
GeneratorWord decompose(const IntMatrix2& A);

/// T: (h, v) -> (h, v h^-1); V: (h, v) -> (h v^-1, v); inverses accordingly.
Origami act_generator(Token t, const Origami& o);
/// Applies the rightmost token first, so act_word(w1 w2, O) = act_word(w1, act_word(w2, O)).
Origami act_word(const GeneratorWord& w, const Origami& o);
Origami act(const IntMatrix2& A, const Origami& o);

/// Horizontal reflection: (h, v) -> (h^-1, v).
Origami reflect_S(const Origami& o);

/// A point of R u {infinity}.
struct ProjectiveSlope {
  Rational value;
  bool infinite = false;

  static ProjectiveSlope inf() { return {Rational(0), true}; }
  friend bool operator==(const ProjectiveSlope& x, const ProjectiveSlope& y) {
    return x.infinite == y.infinite && (x.infinite || x.value == y.value);
  }
};

std::string to_string(const ProjectiveSlope& s);
ProjectiveSlope parse_projective_slope(const std::string& text);

/// (a s + b) / (c s + d).
ProjectiveSlope projective_slope(const IntMatrix2& A, const ProjectiveSlope& s);

/// Squared length of A applied to the unit vector of the given slope (x/y convention).
Rational stretch_factor_squared(const IntMatrix2& A, const ProjectiveSlope& s);

/// Image of a point under the affine map psi_t : O -> t . O.
SurfacePoint affine_image(Token t, const Origami& source, const SurfacePoint& p);
/// Image under psi : O -> act_word(w, O), composed right to left.
SurfacePoint affine_image(const GeneratorWord& w, const Origami& source, const SurfacePoint& p);

/// The affine map psi : source -> act_word(w, source) with the intermediate surfaces cached.
class AffineChart {
 public:
  AffineChart(GeneratorWord w, const Origami& source);
  const Origami& source() const { return chain_.front(); }
  const Origami& target() const { return chain_.back(); }
  const GeneratorWord& word() const { return word_; }
  SurfacePoint map(const SurfacePoint& p) const;

 private:
  GeneratorWord word_;
  std::vector<Origami> chain_;  // chain_[k] = surface after applying the last k tokens
};

struct StabilizerReport {
  bool fixed_by_T = false;
  bool fixed_by_R = false;
  bool certified = false;
  std::vector<std::string> moving_generators;
  std::size_t orbit_size = 0;
  bool orbit_complete = false;
};

StabilizerReport stabilizer_certificate(const Origami& o, std::size_t orbit_cap = 1000);

struct OrbitResult {
  std::vector<Origami> classes;
  /// adjacency[k][g] = class reached from class k by token g (T, TInv, V, VInv).
  std::vector<std::array<std::size_t, 4>> adjacency;
  bool complete = false;
};

/// Breadth-first closure under T^{+-1}, V^{+-1} up to isomorphism, stopping at `cap` classes.
OrbitResult orbit_enumerate(const Origami& o, std::size_t cap);

}  // namespace origami
