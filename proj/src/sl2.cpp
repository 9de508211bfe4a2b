#include "origami/sl2.hpp"

#include <map>
#include <queue>
#include <sstream>

#include "origami/error.hpp"

namespace origami {

IntMatrix2 IntMatrix2::inverse() const {
  Integer dt = det();
  if (dt != 1 && dt != -1) throw Error(ErrorKind::NotUnimodular, "determinant " + dt.get_str());
  return {d * dt, -b * dt, -c * dt, a * dt};
}

IntMatrix2 IntMatrix2::operator*(const IntMatrix2& r) const {
  return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
}

IntMatrix2 IntMatrix2::pow(long k) const {
  IntMatrix2 base = k < 0 ? inverse() : *this;
  unsigned long e = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  IntMatrix2 out;
  while (e) {
    if (e & 1) out = out * base;
    base = base * base;
    e >>= 1;
  }
  return out;
}

std::string IntMatrix2::to_string() const {
  return a.get_str() + "," + b.get_str() + "," + c.get_str() + "," + d.get_str();
}

IntMatrix2 parse_matrix(const std::string& text) {
  std::vector<Integer> entries;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      entries.emplace_back(item);
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::Parse, "bad matrix entry '" + item + "'");
    }
  }
  if (entries.size() != 4) throw Error(ErrorKind::Parse, "matrix needs four entries a,b,c,d");
  return {entries[0], entries[1], entries[2], entries[3]};
}

std::string to_string(Token t) {
  switch (t) {
    case Token::T: return "T";
    case Token::TInv: return "T^-1";
    case Token::V: return "V";
    case Token::VInv: return "V^-1";
  }
  return "?";
}

std::string to_string(const GeneratorWord& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) out += (i ? " " : "") + to_string(w[i]);
  return out;
}

Token inverse(Token t) {
  switch (t) {
    case Token::T: return Token::TInv;
    case Token::TInv: return Token::T;
    case Token::V: return Token::VInv;
    case Token::VInv: return Token::V;
  }
  return t;
}

GeneratorWord inverse(const GeneratorWord& w) {
  GeneratorWord out(w.rbegin(), w.rend());
  for (auto& t : out) t = inverse(t);
  return out;
}

IntMatrix2 matrix_of(Token t) {
  switch (t) {
    case Token::T: return IntMatrix2::T();
    case Token::TInv: return {1, -1, 0, 1};
    case Token::V: return IntMatrix2::V();
    case Token::VInv: return {1, 0, -1, 1};
  }
  return {};
}

IntMatrix2 evaluate(const GeneratorWord& w) {
  IntMatrix2 out;
  for (Token t : w) out = out * matrix_of(t);
  return out;
}

namespace {

void append_power(GeneratorWord& w, Token positive, const Integer& k) {
  Token tok = k < 0 ? inverse(positive) : positive;
  Integer count = abs(k);
  for (Integer i = 0; i < count; ++i) w.push_back(tok);
}

}  // namespace

GeneratorWord decompose(const IntMatrix2& A) {
  if (A.det() != 1) throw Error(ErrorKind::NotUnimodular, "decompose needs det = 1, got " + A.det().get_str());
  // Left-multiply by T^k / V^k until the lower-left entry vanishes. Each applied
  // factor G is recorded; A = G_1^-1 G_2^-1 ... M.
  IntMatrix2 m = A;
  GeneratorWord prefix;
  while (m.c != 0) {
    if (m.a == 0) {
      // T m has a = c.
      m = IntMatrix2::T() * m;
      prefix.push_back(Token::TInv);
    } else if (abs(m.c) >= abs(m.a)) {
      Integer k = m.c / m.a;  // truncating
      m = IntMatrix2{1, 0, -k, 1} * m;
      append_power(prefix, Token::V, k);
    } else {
      Integer k = m.a / m.c;
      m = IntMatrix2{1, -k, 0, 1} * m;
      append_power(prefix, Token::T, k);
    }
  }
  // m = [[e, b], [0, e]] with e = +-1.
  GeneratorWord word = prefix;
  if (m.a == 1) {
    append_power(word, Token::T, m.b);
  } else {
    // -T^{-b'} with m = [[-1, b], [0, -1]] = -I . T^{-b}; -I = R^2, R = T^-1 V T^-1.
    const GeneratorWord r{Token::TInv, Token::V, Token::TInv};
    word.insert(word.end(), r.begin(), r.end());
    word.insert(word.end(), r.begin(), r.end());
    append_power(word, Token::T, -m.b);
  }
  return word;
}

Origami act_generator(Token t, const Origami& o) {
  switch (t) {
    case Token::T: return Origami(o.h(), o.v() * o.h_inv());
    case Token::TInv: return Origami(o.h(), o.v() * o.h());
    case Token::V: return Origami(o.h() * o.v_inv(), o.v());
    case Token::VInv: return Origami(o.h() * o.v(), o.v());
  }
  return o;
}

Origami act_word(const GeneratorWord& w, const Origami& o) {
  Origami out = o;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out = act_generator(*it, out);
  return out;
}

Origami act(const IntMatrix2& A, const Origami& o) { return act_word(decompose(A), o); }

Origami reflect_S(const Origami& o) { return Origami(o.h_inv(), o.v(), o.names()); }

std::string to_string(const ProjectiveSlope& s) { return s.infinite ? "inf" : to_string(s.value); }

ProjectiveSlope parse_projective_slope(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return ProjectiveSlope::inf();
  return {parse_rational(text), false};
}

ProjectiveSlope projective_slope(const IntMatrix2& A, const ProjectiveSlope& s) {
  Rational num, den;
  if (s.infinite) {
    num = A.a;
    den = A.c;
  } else {
    num = A.a * s.value + A.b;
    den = A.c * s.value + A.d;
  }
  if (den == 0) return ProjectiveSlope::inf();
  Rational out = num / den;
  return {out, false};
}

Rational stretch_factor_squared(const IntMatrix2& A, const ProjectiveSlope& s) {
  if (s.infinite) return Rational(A.a * A.a + A.c * A.c);
  Rational x = A.a * s.value + A.b;
  Rational y = A.c * s.value + A.d;
  return (x * x + y * y) / (1 + s.value * s.value);
}

SurfacePoint affine_image(Token t, const Origami& source, const SurfacePoint& raw) {
  SurfacePoint p = source.normalize(raw);
  SurfacePoint q = p;
  switch (t) {
    case Token::T:
      q.x = p.x + p.y;
      if (q.x >= 1) {
        q.x -= 1;
        q.square = source.h()(p.square);
      }
      break;
    case Token::TInv:
      q.x = p.x - p.y;
      if (q.x < 0) {
        q.x += 1;
        q.square = source.h_inv()(p.square);
      }
      break;
    case Token::V:
      q.y = p.x + p.y;
      if (q.y >= 1) {
        q.y -= 1;
        q.square = source.v()(p.square);
      }
      break;
    case Token::VInv:
      q.y = p.y - p.x;
      if (q.y < 0) {
        q.y += 1;
        q.square = source.v_inv()(p.square);
      }
      break;
  }
  return act_generator(t, source).normalize(q);
}

SurfacePoint affine_image(const GeneratorWord& w, const Origami& source, const SurfacePoint& p) {
  Origami current = source;
  SurfacePoint q = source.normalize(p);
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    q = affine_image(*it, current, q);
    current = act_generator(*it, current);
  }
  return q;
}

AffineChart::AffineChart(GeneratorWord w, const Origami& source) : word_(std::move(w)) {
  chain_.push_back(source);
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) chain_.push_back(act_generator(*it, chain_.back()));
}

SurfacePoint AffineChart::map(const SurfacePoint& p) const {
  SurfacePoint q = source().normalize(p);
  std::size_t k = 0;
  for (auto it = word_.rbegin(); it != word_.rend(); ++it, ++k) q = affine_image(*it, chain_[k], q);
  return q;
}

OrbitResult orbit_enumerate(const Origami& o, std::size_t cap) {
  if (cap == 0) throw Error(ErrorKind::PreconditionViolated, "orbit cap must be >= 1");
  OrbitResult out;
  std::map<std::vector<std::size_t>, std::size_t> index;
  index.emplace(canonical_form(o), 0);
  out.classes.push_back(o);
  out.adjacency.push_back({0, 0, 0, 0});
  constexpr Token tokens[] = {Token::T, Token::TInv, Token::V, Token::VInv};
  bool overflow = false;
  for (std::size_t k = 0; k < out.classes.size(); ++k) {
    for (std::size_t g = 0; g < 4; ++g) {
      Origami image = act_generator(tokens[g], out.classes[k]);
      auto form = canonical_form(image);
      auto it = index.find(form);
      if (it == index.end()) {
        if (out.classes.size() >= cap) {
          overflow = true;
          out.adjacency[k][g] = static_cast<std::size_t>(-1);
          continue;
        }
        it = index.emplace(std::move(form), out.classes.size()).first;
        out.classes.push_back(std::move(image));
        out.adjacency.push_back({0, 0, 0, 0});
      }
      out.adjacency[k][g] = it->second;
    }
  }
  out.complete = !overflow;
  return out;
}

StabilizerReport stabilizer_certificate(const Origami& o, std::size_t orbit_cap) {
  StabilizerReport rep;
  rep.fixed_by_T = is_isomorphic(act_generator(Token::T, o), o).has_value();
  rep.fixed_by_R = is_isomorphic(act(IntMatrix2::R(), o), o).has_value();
  rep.certified = rep.fixed_by_T && rep.fixed_by_R;
  if (!rep.fixed_by_T) rep.moving_generators.push_back("T");
  if (!rep.fixed_by_R) rep.moving_generators.push_back("R");
  OrbitResult orbit = orbit_enumerate(o, orbit_cap);
  rep.orbit_size = orbit.classes.size();
  rep.orbit_complete = orbit.complete;
  return rep;
}

}  // namespace origami
