#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "origami/rational.hpp"
#include "origami/sl2.hpp"

namespace origami {

/// alpha = [0; a_1, a_2, ...] in (0, 1), given by an explicit prefix and an optional
/// rule producing further quotients. Convergents are cached lazily; copies share the cache.
class CFSlope {
 public:
  /// rule(n, q) returns a_n given q_0..q_{n-1} (q[k] = q_k).
  using Rule = std::function<Integer(std::size_t n, const std::vector<Integer>& q)>;

  CFSlope(std::vector<Integer> prefix, Rule rule, std::string spec);

  /// Finite expansion (a rational number).
  bool finite() const { return !rule_; }
  /// Number of quotients of a finite expansion.
  std::size_t length() const { return prefix_.size(); }
  const std::string& spec() const { return spec_; }

  /// a_n, n >= 1. Throws OutOfRange past the end of a finite expansion.
  Integer quotient(std::size_t n) const;
  /// p_n, q_n for n >= 0 (p_0 = 0, q_0 = 1).
  Integer p(std::size_t n) const;
  Integer q(std::size_t n) const;
  Rational convergent(std::size_t n) const;
  /// alpha_n = [0; a_{n+1}, ..., a_depth], exact for finite slopes when depth = length().
  Rational tail(std::size_t n, std::size_t depth) const;
  /// The exact value of a finite expansion.
  Rational value() const;
  /// First quotients a_1..a_n.
  std::vector<Integer> quotients(std::size_t n) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::vector<Integer> a{0};  // a[0] unused
    std::vector<Integer> p{0};
    std::vector<Integer> q{1};
  };
  void ensure(std::size_t n) const;

  std::vector<Integer> prefix_;
  Rule rule_;
  std::string spec_;
  std::shared_ptr<Cache> cache_;
};

/// Partial quotients of x in (0, 1) by the Gauss map; stops early when x is reached.
std::vector<Integer> cf_expand(const Rational& x, std::size_t depth);

/// V^{a_1} T^{a_2} V^{a_3} ... (odd positions V, even positions T).
IntMatrix2 g_matrix(const std::vector<Integer>& quotients);

/// Quotients a_{n+1} = max(1, ceil(q_n^{w-1})) at even n past the prefix, 1 at odd n.
CFSlope slope_with_type(const Rational& w, std::vector<Integer> prefix = {1, 1});
CFSlope golden_slope();
CFSlope rational_slope(const Rational& x);
CFSlope slope_from_quotients(std::vector<Integer> quotients);

/// ceil(z^e) for z >= 1 and rational e >= 0, exactly.
Integer ceil_power(const Integer& z, const Rational& e);

struct TypeEstimate {
  double value = 1.0;
  std::size_t n = 0;  // index attaining the maximum
};

/// max over 1 <= n < depth with q_n > 1 of 1 + log a_{n+1} / log q_n.
TypeEstimate diophantine_type_estimate(const CFSlope& cf, std::size_t depth);

/// "golden", "type:w=2", "type:w=2;prefix=[1,1]", "quotients:[1,2,3]", "rational:p/q".
CFSlope parse_slope_spec(const std::string& spec);

/// Smallest N with q_N q_{N+1} > bound (or the full length of a finite slope).
std::size_t depth_for_error(const CFSlope& cf, const Rational& bound, std::size_t max_depth = 200);

}  // namespace origami
