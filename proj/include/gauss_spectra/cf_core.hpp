#pragma once

// Exact continued-fraction arithmetic for x in (0,1):
//   x = [a1, a2, ...] = 1/(a1 + 1/(a2 + ...)),  T(x) = 1/x mod 1.
// Convergents and cylinders use GMP integers so the classical identities hold
// exactly at any depth; floating point only appears in Birkhoff averages,
// which are accumulated from logs of digits rather than from q_n.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <gmp.h>
#include <mpfr.h>

#include <boost/multiprecision/gmp.hpp>

#include "errors.hpp"

namespace gauss_spectra {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Natural log of a positive big integer without converting it to double.
inline double log_of(const BigInt& v) {
  if (v <= 0) throw domain_error("log_of requires a positive integer");
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, v.backend().data());
  return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

/// Finite digit sequence (a1, ..., an), every digit >= 1, n >= 1.
class PartialQuotients {
 public:
  explicit PartialQuotients(std::vector<BigInt> digits) : digits_(std::move(digits)) { validate(); }

  PartialQuotients(std::initializer_list<std::uint64_t> digits) {
    digits_.reserve(digits.size());
    for (auto d : digits) digits_.emplace_back(d);
    validate();
  }

  std::size_t size() const noexcept { return digits_.size(); }
  const BigInt& operator[](std::size_t i) const { return digits_[i]; }
  std::span<const BigInt> digits() const noexcept { return digits_; }
  auto begin() const noexcept { return digits_.begin(); }
  auto end() const noexcept { return digits_.end(); }

  PartialQuotients reversed() const { return PartialQuotients(std::vector<BigInt>(digits_.rbegin(), digits_.rend())); }

  friend bool operator==(const PartialQuotients&, const PartialQuotients&) = default;

 private:
  void validate() const {
    if (digits_.empty()) throw domain_error("partial quotients need at least one digit");
    for (const auto& d : digits_)
      if (d < 1) throw domain_error("partial quotients must be >= 1");
  }

  std::vector<BigInt> digits_;
};

struct Convergent {
  BigInt p;
  BigInt q;
};

struct Cylinder {
  PartialQuotients digits;
  Rational left_endpoint;
  Rational right_endpoint;
  Rational length;
};

struct OrbitStats {
  std::size_t n = 0;
  double sum_log_digits = 0.0;  // sum_{j<=n} log a_j
  double sum_log_deriv = 0.0;   // sum_{j<n} log|T'(T^j x)|
  double khintchine_estimate = 0.0;
  double lyapunov_estimate = 0.0;
};

inline double gauss_map(double x) {
  if (x == 0.0) return 0.0;
  if (!(x > 0.0 && x < 1.0)) throw domain_error("gauss_map requires 0 <= x < 1");
  const double inv = 1.0 / x;
  return inv - std::floor(inv);
}

inline Rational gauss_map(const Rational& x) {
  if (x == 0) return Rational(0);
  if (x < 0 || x >= 1) throw domain_error("gauss_map requires 0 <= x < 1");
  const Rational inv = 1 / x;
  const BigInt whole = numerator(inv) / denominator(inv);
  return inv - whole;
}

/// Exact expansion of a rational in (0,1). Throws expansion_terminated when
/// x has fewer than `depth` digits.
inline PartialQuotients expand(const Rational& x, std::size_t depth) {
  if (depth == 0) throw domain_error("expand requires depth >= 1");
  if (!(x > 0 && x < 1)) throw domain_error("expand requires 0 < x < 1");
  std::vector<BigInt> digits;
  digits.reserve(depth);
  // Euclid on the pair (num, den) of 1/x.
  BigInt num = denominator(x);
  BigInt den = numerator(x);
  while (digits.size() < depth) {
    if (den == 0) throw expansion_terminated(digits.size(), depth);
    BigInt quotient = num / den;
    BigInt rest = num - quotient * den;
    digits.push_back(std::move(quotient));
    num = std::move(den);
    den = std::move(rest);
  }
  return PartialQuotients(std::move(digits));
}

/// Expansion of the real number a double stands for. The double is read as
/// the open half-ulp interval around it; both ends are expanded exactly in
/// lockstep and a digit is only emitted when the whole interval agrees on it.
/// Throws precision_exhausted once the interval straddles a digit boundary.
inline PartialQuotients expand(double x, std::size_t depth) {
  if (depth == 0) throw domain_error("expand requires depth >= 1");
  if (!(x > 0.0 && x < 1.0)) throw domain_error("expand requires 0 < x < 1");
  const Rational center(x);
  const Rational half_ulp = (Rational(std::nextafter(x, 1.0)) - center) / 2;
  Rational lo = center - half_ulp;
  Rational hi = center + half_ulp;

  std::vector<BigInt> digits;
  digits.reserve(depth);
  while (digits.size() < depth) {
    if (lo <= 0) throw precision_exhausted(digits.size(), depth);
    const Rational inv_hi = 1 / hi;  // smallest value of 1/x on the interval
    const Rational inv_lo = 1 / lo;
    const BigInt digit = numerator(inv_hi) / denominator(inv_hi);
    if (inv_lo > digit + 1) throw precision_exhausted(digits.size(), depth);
    digits.push_back(digit);
    Rational next_lo = inv_hi - digit;
    Rational next_hi = inv_lo - digit;
    lo = std::move(next_lo);
    hi = std::move(next_hi);
  }
  return PartialQuotients(std::move(digits));
}

/// Q_n(e1..en) with Q_{-1} = 0, Q_0 = 1, Q_n = e_n Q_{n-1} + Q_{n-2}.
inline BigInt continuant(std::span<const BigInt> digits) {
  BigInt prev = 0;
  BigInt cur = 1;
  for (const auto& d : digits) {
    BigInt next = d * cur + prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

inline BigInt continuant(const PartialQuotients& digits) { return continuant(digits.digits()); }

/// p_n/q_n for n = 1..len, from p_{-1}/q_{-1} = 1/0 and p_0/q_0 = 0/1.
inline std::vector<Convergent> convergents(const PartialQuotients& digits) {
  std::vector<Convergent> out;
  out.reserve(digits.size());
  BigInt p_prev = 1, q_prev = 0;
  BigInt p = 0, q = 1;
  for (const auto& a : digits) {
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
    out.push_back({p, q});
  }
  return out;
}

/// Value of the finite continued fraction [a1, ..., an].
inline Rational evaluate(const PartialQuotients& digits) {
  Rational value = 0;
  for (auto it = digits.end(); it != digits.begin();) {
    --it;
    value = 1 / (Rational(*it) + value);
  }
  return value;
}

inline Cylinder cylinder(const PartialQuotients& digits) {
  const auto conv = convergents(digits);
  const std::size_t n = conv.size();
  const BigInt p_prev = n >= 2 ? conv[n - 2].p : BigInt(0);
  const BigInt q_prev = n >= 2 ? conv[n - 2].q : BigInt(1);
  const Rational a(conv.back().p, conv.back().q);
  const Rational b(conv.back().p + p_prev, conv.back().q + q_prev);
  const Rational length(BigInt(1), conv.back().q * (conv.back().q + q_prev));
  if (n % 2 == 0) return {digits, a, b, length};
  return {digits, b, a, length};
}

/// Birkhoff sums of log a_j and of log|T'(T^j x)| = 2 log(a_{j+1} + T^{j+1} x)
/// from a digit string. T^n x is unknown past the last digit; `tail_point`
/// stands in for it and its influence decays geometrically going backwards.
inline OrbitStats exponent_estimates(const PartialQuotients& digits, double tail_point = std::numbers::phi - 1.0) {
  const std::size_t n = digits.size();
  OrbitStats out;
  out.n = n;
  double r = tail_point;  // T^j x, walking j from n down to 1
  for (std::size_t j = n; j-- > 0;) {
    const double log_a = log_of(digits[j]);
    out.sum_log_digits += log_a;
    const double a = digits[j].convert_to<double>();
    const double log_sum = std::isfinite(a) ? std::log(a + r) : log_a;
    out.sum_log_deriv += 2.0 * log_sum;
    r = std::exp(-log_sum);
  }
  out.khintchine_estimate = out.sum_log_digits / static_cast<double>(n);
  out.lyapunov_estimate = out.sum_log_deriv / static_cast<double>(n);
  return out;
}

/// Exact rational input; T^depth x is known exactly and seeds the tail.
inline OrbitStats exponent_estimates(const Rational& x, std::size_t depth) {
  const auto digits = expand(x, depth);
  Rational r = x;
  for (std::size_t j = 0; j < depth; ++j) r = gauss_map(r);
  return exponent_estimates(digits, r.convert_to<double>());
}

inline OrbitStats exponent_estimates(double x, std::size_t depth) {
  return exponent_estimates(expand(x, depth));
}

inline double gauss_density(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("gauss_density requires 0 <= x <= 1");
  return 1.0 / ((1.0 + x) * std::numbers::ln2);
}

namespace detail {

// ceil(exp(y)) for y >= 0, exact as an integer: rounding exp upward at
// y/log 2 + 64 bits keeps the result inside [e^y, e^y + 1].
inline BigInt ceil_exp(double y) {
  const auto bits = static_cast<mpfr_prec_t>(std::max(0.0, y) / std::numbers::ln2) + 64;
  mpfr_t v;
  mpfr_init2(v, bits);
  mpfr_set_d(v, y, MPFR_RNDN);
  mpfr_exp(v, v, MPFR_RNDU);
  mpfr_ceil(v, v);
  BigInt out;
  mpfr_get_z(out.backend().data(), v, MPFR_RNDU);
  mpfr_clear(v);
  return out;
}

}  // namespace detail

/// Block boundaries n_k (k >= 1) of a constructed point; n_0 = 0.
using BlockRule = std::function<std::uint64_t(std::uint64_t)>;

inline std::uint64_t square_blocks(std::uint64_t k) { return k * k; }

/// Pull-based digit stream of a point with Khintchine exponent xi: digit
/// ceil(e^{(n_k - n_{k-1}) xi}) at every block end n_k, digit 1 elsewhere.
/// Its Lyapunov exponent is 2 xi + gamma0.
class ConstructedPoint {
 public:
  explicit ConstructedPoint(double xi, BlockRule rule = square_blocks) : xi_(xi), rule_(std::move(rule)) {
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw domain_error("construct_point requires xi >= 0");
    block_end_ = rule_(1);
    if (block_end_ == 0) throw domain_error("block rule must start at n_1 >= 1");
  }

  BigInt next() {
    ++position_;
    if (position_ < block_end_) return BigInt(1);
    const std::uint64_t length = block_end_ - block_start_;
    block_start_ = block_end_;
    ++block_;
    const std::uint64_t following = rule_(block_ + 1);
    if (following <= block_end_) throw domain_error("block rule must be strictly increasing");
    block_end_ = following;
    return detail::ceil_exp(static_cast<double>(length) * xi_);
  }

  PartialQuotients take(std::size_t count) {
    std::vector<BigInt> digits;
    digits.reserve(count);
    for (std::size_t i = 0; i < count; ++i) digits.push_back(next());
    return PartialQuotients(std::move(digits));
  }

  std::uint64_t position() const noexcept { return position_; }

 private:
  double xi_;
  BlockRule rule_;
  std::uint64_t position_ = 0;
  std::uint64_t block_ = 0;
  std::uint64_t block_start_ = 0;
  std::uint64_t block_end_ = 0;
};

inline ConstructedPoint construct_point(double xi, BlockRule rule = square_blocks) {
  return ConstructedPoint(xi, std::move(rule));
}

}  // namespace gauss_spectra
