#pragma once

// Riemann and Hurwitz zeta on the real axis s > 1, and the constants of the
// Gauss map: the Khintchine constant xi0 = int log a1 dmu_G, the Lyapunov
// constant lambda0 = int log|T'| dmu_G and the Lyapunov floor gamma0 attained
// at the golden-mean fixed point.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "errors.hpp"

namespace gauss_spectra {

namespace detail {

// B_{2k} / (2k)!, k = 1..12
inline constexpr std::array<double, 12> kBernoulliOverFactorial = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -1.0 / 1892437580.3183593,  // 691/2730 / 12!
    1.0 / 74724249600.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
};

}  // namespace detail

// zeta(s, a) together with sum_{n>=0} log(n+a) (n+a)^{-s} = -d/ds zeta(s, a).
struct HurwitzValue {
  double zeta = 0.0;
  double log_moment = 0.0;
};

/// Hurwitz zeta sum_{n>=0} (n+a)^{-s} and its log-weighted companion, by
/// direct summation to a shift U = N + a followed by Euler-Maclaurin with
/// twelve Bernoulli corrections. N is chosen so that (s + 24) / (2 pi U)
/// stays below 1/4, which bounds the last correction near 1e-15 relative.
inline HurwitzValue hurwitz_zeta_with_log(double s, double a) {
  if (!(s > 1.0)) throw domain_error("hurwitz_zeta requires s > 1");
  if (!(a > 0.0)) throw domain_error("hurwitz_zeta requires a > 0");

  const double needed = 0.64 * (s + 24.0);
  const int n_direct = std::max(0, static_cast<int>(std::ceil(needed - a)));
  HurwitzValue out;
  for (int n = 0; n < n_direct; ++n) {
    const double u = n + a;
    const double term = std::pow(u, -s);
    out.zeta += term;
    out.log_moment += std::log(u) * term;
  }

  const double u = n_direct + a;
  const double log_u = std::log(u);
  const double head = std::pow(u, -s);
  const double sm1 = s - 1.0;
  out.zeta += u * head / sm1 + 0.5 * head;
  out.log_moment += u * head * (log_u / sm1 + 1.0 / (sm1 * sm1)) + 0.5 * log_u * head;

  // (s)_m and its s-derivative for m = 2k - 1, built up two factors at a time.
  double rising = s;
  double rising_ds = 1.0;
  double power = head / u;  // u^{-s-1}
  for (std::size_t k = 0; k < detail::kBernoulliOverFactorial.size(); ++k) {
    const double coeff = detail::kBernoulliOverFactorial[k];
    out.zeta += coeff * rising * power;
    out.log_moment += coeff * (rising * log_u - rising_ds) * power;

    const double m = 2.0 * static_cast<double>(k) + 1.0;
    const double f1 = s + m;
    const double f2 = s + m + 1.0;
    rising_ds = rising_ds * f1 * f2 + rising * (f1 + f2);
    rising *= f1 * f2;
    power /= u * u;
    if (power == 0.0) break;
  }
  return out;
}

inline double hurwitz_zeta(double s, double a) { return hurwitz_zeta_with_log(s, a).zeta; }

inline double riemann_zeta(double s) {
  if (!(s > 1.0)) throw domain_error("riemann_zeta requires s > 1");
  return hurwitz_zeta(s, 1.0);
}

// Khintchine series split into the explicit head and the Euler-Maclaurin tail.
struct KhintchineSeries {
  double value = 0.0;           // xi0 in nats
  double head = 0.0;            // sum_{n=2}^{N-1} log n log(1 + 1/(n(n+2))) / log 2
  double tail = 0.0;            // remainder from n = N on, estimated
  double tail_bound = 0.0;      // crude bound sum_{n>=N} log n/(n(n+2)) <= (log(N-1)+1)/(N-1)
  double error_estimate = 0.0;  // size of the first neglected correction
  int cutoff = 0;
};

inline KhintchineSeries khintchine_series(int cutoff = 2000) {
  if (cutoff < 16) throw domain_error("khintchine_series cutoff must be >= 16");
  const auto term = [](double u) { return std::log(u) * std::log1p(1.0 / (u * (u + 2.0))); };
  const auto term_d1 = [](double u) {
    return std::log1p(1.0 / (u * (u + 2.0))) / u - 2.0 * std::log(u) / (u * (u + 1.0) * (u + 2.0));
  };

  KhintchineSeries out;
  out.cutoff = cutoff;
  for (int n = 2; n < cutoff; ++n) out.head += term(n);

  const double big_n = cutoff;
  boost::math::quadrature::exp_sinh<double> integrator;
  double quad_error = 0.0;
  const double integral =
      integrator.integrate([&](double v) { return term(big_n + v); }, 0.0,
                           std::numeric_limits<double>::infinity(), 1e-14, &quad_error);
  out.tail = integral + 0.5 * term(big_n) - term_d1(big_n) / 12.0;

  const double log2 = std::numbers::ln2;
  out.head /= log2;
  out.tail /= log2;
  out.value = out.head + out.tail;
  // next Euler-Maclaurin term is f'''(N)/720 with |f'''| <= 24 log N / N^5
  out.error_estimate = (24.0 * std::log(big_n) / std::pow(big_n, 5) / 720.0 + quad_error) / log2;
  out.tail_bound = (std::log(big_n - 1.0) + 1.0) / (big_n - 1.0) / log2;
  return out;
}

inline double khintchine_constant() { return khintchine_series().value; }

inline double lyapunov_constant() {
  return std::numbers::pi * std::numbers::pi / (6.0 * std::numbers::ln2);
}

inline double golden_constant() { return 2.0 * std::log(std::numbers::phi); }

struct ConstantsTable {
  double xi0;
  double lambda0;
  double gamma0;
  double dimE2_reference;
};

inline const ConstantsTable& constants() {
  static const ConstantsTable table{
      khintchine_constant(),
      lyapunov_constant(),
      golden_constant(),
      0.531280506277205141624468647368471785493059109018398779,
  };
  return table;
}

}  // namespace gauss_spectra
