#include "origami/permutation.hpp"

#include <sstream>

#include "origami/error.hpp"

namespace origami {

Permutation::Permutation(std::vector<std::size_t> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    std::size_t y = images_[i];
    if (y >= images_.size() || seen[y]) {
      throw Error(ErrorKind::NotBijective,
                  "image " + std::to_string(y) + " at index " + std::to_string(i));
    }
    seen[y] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> images(n);
  for (std::size_t i = 0; i < n; ++i) images[i] = i;
  Permutation p;
  p.images_ = std::move(images);
  return p;
}

Permutation Permutation::from_cycles(std::size_t n,
                                     const std::vector<std::vector<std::size_t>>& cycles) {
  std::vector<std::size_t> images(n);
  for (std::size_t i = 0; i < n; ++i) images[i] = i;
  std::vector<bool> used(n, false);
  for (const auto& cycle : cycles) {
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      std::size_t x = cycle[k];
      if (x >= n || used[x]) {
        throw Error(ErrorKind::NotBijective, "bad cycle element " + std::to_string(x));
      }
      used[x] = true;
      images[x] = cycle[(k + 1) % cycle.size()];
    }
  }
  return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i]] = i;
  Permutation p;
  p.images_ = std::move(inv);
  return p;
}

Permutation Permutation::operator*(const Permutation& rhs) const {
  if (rhs.size() != size()) throw Error(ErrorKind::SizeMismatch, "composing permutations");
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = images_[rhs.images_[i]];
  Permutation p;
  p.images_ = std::move(out);
  return p;
}

Permutation Permutation::conjugated_by(const Permutation& rho) const {
  return rho * (*this) * rho.inverse();
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

std::vector<std::vector<std::size_t>> Permutation::cycles() const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(size(), false);
  for (std::size_t start = 0; start < size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> cycle;
    for (std::size_t x = start; !seen[x]; x = images_[x]) {
      seen[x] = true;
      cycle.push_back(x);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < images_.size(); ++i) os << (i ? " " : "") << images_[i];
  return os.str();
}

Permutation commutator(const Permutation& v, const Permutation& h) {
  return v.inverse() * h.inverse() * v * h;
}

}  // namespace origami
