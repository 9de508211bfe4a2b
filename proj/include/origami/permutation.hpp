#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace origami {

/// A bijection of {0, ..., n-1}. Composition follows function notation:
/// (a * b)(x) = a(b(x)).
class Permutation {
 public:
  Permutation() = default;

  /// Validates bijectivity; throws Error(NotBijective) otherwise.
  explicit Permutation(std::vector<std::size_t> images);

  static Permutation identity(std::size_t n);

  /// Builds a permutation of size n from disjoint cycles, e.g. {{0, 1}}.
  static Permutation from_cycles(std::size_t n,
                                 const std::vector<std::vector<std::size_t>>& cycles);

  std::size_t size() const noexcept { return images_.size(); }
  std::size_t operator()(std::size_t x) const { return images_[x]; }
  std::span<const std::size_t> images() const noexcept { return images_; }

  Permutation inverse() const;
  Permutation operator*(const Permutation& rhs) const;
  /// rho * this * rho^-1, i.e. the same map written in labels relabeled by rho.
  Permutation conjugated_by(const Permutation& rho) const;

  bool is_identity() const;
  /// Cycles in order of their smallest element, each starting at that element.
  std::vector<std::vector<std::size_t>> cycles() const;

  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> images_;
};

/// v^-1 h^-1 v h, applied right to left.
Permutation commutator(const Permutation& v, const Permutation& h);

}  // namespace origami
