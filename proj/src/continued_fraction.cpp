#include "origami/continued_fraction.hpp"

#include <cmath>
#include <regex>

#include "origami/error.hpp"

namespace origami {

CFSlope::CFSlope(std::vector<Integer> prefix, Rule rule, std::string spec)
    : prefix_(std::move(prefix)), rule_(std::move(rule)), spec_(std::move(spec)),
      cache_(std::make_shared<Cache>()) {
  for (const auto& a : prefix_)
    if (a <= 0) throw Error(ErrorKind::NonPositiveQuotient, "quotient " + a.get_str());
  if (!rule_ && prefix_.empty()) throw Error(ErrorKind::OutOfRange, "empty continued fraction");
}

void CFSlope::ensure(std::size_t n) const {
  std::lock_guard lock(cache_->mutex);
  auto& c = *cache_;
  while (c.a.size() <= n) {
    std::size_t k = c.a.size();
    Integer a;
    if (k <= prefix_.size()) {
      a = prefix_[k - 1];
    } else if (rule_) {
      a = rule_(k, c.q);
      if (a <= 0) throw Error(ErrorKind::NonPositiveQuotient, "rule produced " + a.get_str());
    } else {
      throw Error(ErrorKind::OutOfRange, "finite expansion has " + std::to_string(prefix_.size()) +
                                             " quotients, asked for a_" + std::to_string(k));
    }
    Integer pm2 = k >= 2 ? c.p[k - 2] : Integer(1);
    Integer qm2 = k >= 2 ? c.q[k - 2] : Integer(0);
    c.p.push_back(a * c.p[k - 1] + pm2);
    c.q.push_back(a * c.q[k - 1] + qm2);
    c.a.push_back(std::move(a));
  }
}

Integer CFSlope::quotient(std::size_t n) const {
  if (n == 0) throw Error(ErrorKind::OutOfRange, "quotients start at a_1");
  ensure(n);
  std::lock_guard lock(cache_->mutex);
  return cache_->a[n];
}

Integer CFSlope::p(std::size_t n) const {
  ensure(n);
  std::lock_guard lock(cache_->mutex);
  return cache_->p[n];
}

Integer CFSlope::q(std::size_t n) const {
  ensure(n);
  std::lock_guard lock(cache_->mutex);
  return cache_->q[n];
}

Rational CFSlope::convergent(std::size_t n) const { return make_rational(p(n), q(n)); }

Rational CFSlope::tail(std::size_t n, std::size_t depth) const {
  if (depth < n) throw Error(ErrorKind::OutOfRange, "tail depth below index");
  Rational x = 0;
  for (std::size_t k = depth; k > n; --k) x = 1 / (Rational(quotient(k)) + x);
  return x;
}

Rational CFSlope::value() const {
  if (!finite()) throw Error(ErrorKind::PreconditionViolated, "infinite expansion has no exact value");
  return convergent(length());
}

std::vector<Integer> CFSlope::quotients(std::size_t n) const {
  std::vector<Integer> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(quotient(k));
  return out;
}

std::vector<Integer> cf_expand(const Rational& x, std::size_t depth) {
  if (x <= 0 || x >= 1) throw Error(ErrorKind::OutOfRange, "cf_expand needs 0 < x < 1, got " + to_string(x));
  std::vector<Integer> out;
  Rational y = x;
  while (out.size() < depth && y != 0) {
    Rational inv = 1 / y;
    Integer a = floor_of(inv);
    out.push_back(a);
    y = inv - a;
  }
  return out;
}

IntMatrix2 g_matrix(const std::vector<Integer>& quotients) {
  IntMatrix2 m;
  for (std::size_t k = 0; k < quotients.size(); ++k) {
    const Integer& a = quotients[k];
    if (a <= 0) throw Error(ErrorKind::NonPositiveQuotient, "quotient " + a.get_str());
    // positions are 1-based: odd -> V, even -> T
    if (k % 2 == 0)
      m = m * IntMatrix2{1, 0, a, 1};
    else
      m = m * IntMatrix2{1, a, 0, 1};
  }
  return m;
}

Integer ceil_power(const Integer& z, const Rational& e) {
  if (z < 1 || e < 0) throw Error(ErrorKind::OutOfRange, "ceil_power needs z >= 1, e >= 0");
  // z^(u/v) = (z^u)^(1/v)
  Integer u = e.get_num(), v = e.get_den();
  if (!u.fits_ulong_p() || !v.fits_ulong_p()) throw Error(ErrorKind::ArithmeticOverflow, "exponent too large");
  Integer base;
  mpz_pow_ui(base.get_mpz_t(), z.get_mpz_t(), u.get_ui());
  Integer root;
  int exact = mpz_root(root.get_mpz_t(), base.get_mpz_t(), v.get_ui());
  if (!exact) root += 1;
  return root;
}

CFSlope slope_with_type(const Rational& w, std::vector<Integer> prefix) {
  if (w < 1) throw Error(ErrorKind::OutOfRange, "type must be >= 1, got " + to_string(w));
  std::string spec = "type:w=" + to_string(w) + ";prefix=[";
  for (std::size_t k = 0; k < prefix.size(); ++k) spec += (k ? "," : "") + prefix[k].get_str();
  spec += "]";
  Rational e = w - 1;
  auto rule = [e](std::size_t n, const std::vector<Integer>& q) -> Integer {
    std::size_t prev = n - 1;
    if (prev % 2 != 0) return 1;
    Integer a = ceil_power(q[prev], e);
    return a < 1 ? Integer(1) : a;
  };
  return CFSlope(std::move(prefix), rule, spec);
}

CFSlope golden_slope() {
  return CFSlope({}, [](std::size_t, const std::vector<Integer>&) { return Integer(1); }, "golden");
}

CFSlope rational_slope(const Rational& x) {
  return CFSlope(cf_expand(x, static_cast<std::size_t>(-1)), {}, "rational:" + to_string(x));
}

CFSlope slope_from_quotients(std::vector<Integer> quotients) {
  std::string spec = "quotients:[";
  for (std::size_t k = 0; k < quotients.size(); ++k) spec += (k ? "," : "") + quotients[k].get_str();
  spec += "]";
  return CFSlope(std::move(quotients), {}, spec);
}

TypeEstimate diophantine_type_estimate(const CFSlope& cf, std::size_t depth) {
  if (depth < 2) throw Error(ErrorKind::OutOfRange, "depth must be >= 2");
  if (cf.finite()) depth = std::min(depth, cf.length());
  TypeEstimate best;
  for (std::size_t n = 1; n < depth; ++n) {
    Integer qn = cf.q(n);
    if (qn <= 1) continue;
    double est = 1.0 + log_of(cf.quotient(n + 1)) / log_of(qn);
    if (best.n == 0 || est > best.value) best = {est, n};
  }
  return best;
}

namespace {

std::vector<Integer> parse_integer_list(const std::string& body) {
  std::vector<Integer> out;
  static const std::regex item(R"(\s*(-?\d+)\s*)");
  std::string s = body;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::smatch m;
    if (!std::regex_match(part, m, item)) throw Error(ErrorKind::Parse, "bad quotient '" + part + "'");
    out.emplace_back(m[1].str());
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CFSlope parse_slope_spec(const std::string& spec) {
  if (spec == "golden") return golden_slope();
  std::smatch m;
  static const std::regex type_re(R"(type:w=([0-9./]+)(;prefix=\[([^\]]*)\])?)");
  static const std::regex quot_re(R"(quotients:\[([^\]]*)\])");
  static const std::regex rat_re(R"(rational:(.+))");
  if (std::regex_match(spec, m, type_re)) {
    Rational w = parse_rational(m[1].str());
    if (m[2].matched) return slope_with_type(w, parse_integer_list(m[3].str()));
    return slope_with_type(w);
  }
  if (std::regex_match(spec, m, quot_re)) return slope_from_quotients(parse_integer_list(m[1].str()));
  if (std::regex_match(spec, m, rat_re)) return rational_slope(parse_rational(m[1].str()));
  throw Error(ErrorKind::Parse, "unknown slope spec '" + spec + "'");
}

std::size_t depth_for_error(const CFSlope& cf, const Rational& bound, std::size_t max_depth) {
  if (cf.finite()) return cf.length();
  for (std::size_t n = 1; n < max_depth; ++n)
    if (Rational(cf.q(n) * cf.q(n + 1)) > bound) return n;
  throw Error(ErrorKind::CapExceeded, "no convergent within depth " + std::to_string(max_depth));
}

}  // namespace origami
