#include <cmath>
#include <limits>

#include "origami/error.hpp"
#include "origami/rational.hpp"

namespace origami {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotBijective: return "NotBijective";
    case ErrorKind::NotTransitive: return "NotTransitive";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NonPositiveQuotient: return "NonPositiveQuotient";
    case ErrorKind::ConeVertexInInterior: return "ConeVertexInInterior";
    case ErrorKind::StartAtConeVertex: return "StartAtConeVertex";
    case ErrorKind::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorKind::WordTooShort: return "WordTooShort";
    case ErrorKind::ParallelToDecomposition: return "ParallelToDecomposition";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::StartOnSingularLeaf: return "StartOnSingularLeaf";
    case ErrorKind::CapTooSmall: return "CapTooSmall";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ExponentTooSmall: return "ExponentTooSmall";
    case ErrorKind::InsufficientSpan: return "InsufficientSpan";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (c != ' ' && c != '\t') text.push_back(c);
  }
  if (text.empty()) throw Error(ErrorKind::Parse, "empty rational");
  try {
    if (auto dot = text.find('.'); dot != std::string::npos) {
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      if (digits.empty() || digits == "-" || digits == "+") {
        throw Error(ErrorKind::Parse, "bad decimal '" + raw + "'");
      }
      Integer num(digits.front() == '+' ? digits.substr(1) : digits, 10);
      Integer den = 1;
      for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
      return make_rational(num, den);
    }
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      return Rational(Integer(text.front() == '+' ? text.substr(1) : text, 10));
    }
    Integer num(text.substr(0, slash), 10);
    Integer den(text.substr(slash + 1), 10);
    if (den == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + raw + "'");
    return make_rational(num, den);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::Parse, "bad rational '" + raw + "'");
  }
}

std::string to_string(const Integer& z) { return z.get_str(); }

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Integer floor_of(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Integer ceil_of(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

bool fits_int64(const Integer& z) {
  static_assert(sizeof(long) == sizeof(std::int64_t));
  return mpz_fits_slong_p(z.get_mpz_t()) != 0;
}

std::int64_t to_int64(const Integer& z) {
  if (!fits_int64(z)) throw Error(ErrorKind::ArithmeticOverflow, "integer exceeds 64 bits");
  return static_cast<std::int64_t>(z.get_si());
}

double log_of(const Integer& z) {
  if (z <= 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace origami
