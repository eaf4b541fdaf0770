#pragma once

// Independent oracles and the acceptance criteria. The oracles avoid the
// collocation machinery: cylinder sums on a fine uniform grid, direct
// enumeration, quadrature, and boost's zeta.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "cf_core.hpp"
#include "special_fn.hpp"
#include "spectrum.hpp"
#include "transfer_op.hpp"

namespace gauss_spectra::oracle {

/// (1/n) log sum over digit strings w in {1..max_digit}^n of
/// sup_x prod_j w_j^q [w_j, ..., w_n + x]^{2t}. Every term is monotone in x,
/// so the sup sits at x = 0 (t >= 0) or x = 1 (t < 0); the sum is carried
/// as a function of x on a uniform grid with cubic interpolation.
inline double cylinder_sum_pressure(double t, double q, int n, int max_digit, int grid = 2000) {
  if (n < 1 || max_digit < 1 || grid < 8) throw domain_error("cylinder_sum_pressure: bad arguments");
  std::vector<double> z(grid + 1, 1.0), next(grid + 1);
  const auto interp = [&](double y) {
    const double u = y * grid;
    const int k = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, grid - 3);
    const double s = u - k;
    const double l0 = -(s - 1) * (s - 2) * (s - 3) / 6.0;
    const double l1 = s * (s - 2) * (s - 3) / 2.0;
    const double l2 = -s * (s - 1) * (s - 3) / 2.0;
    const double l3 = s * (s - 1) * (s - 2) / 6.0;
    return l0 * z[k] + l1 * z[k + 1] + l2 * z[k + 2] + l3 * z[k + 3];
  };
  const std::size_t probe = t >= 0.0 ? 0 : static_cast<std::size_t>(grid);
  double log_scale = 0.0;
  for (int step = 0; step < n; ++step) {
    for (int j = 0; j <= grid; ++j) {
      const double x = static_cast<double>(j) / grid;
      double acc = 0.0;
      for (int i = 1; i <= max_digit; ++i) acc += std::exp(q * std::log(i) - 2.0 * t * std::log(i + x)) * interp(1.0 / (i + x));
      next[j] = acc;
    }
    const double scale = next[probe];
    for (auto& v : next) v /= scale;
    log_scale += std::log(scale);
    z.swap(next);
  }
  return log_scale / n;
}

/// Same quantity by explicit enumeration of all max_digit^n strings, the sup
/// taken over x in {0, 1/4, 1/2, 3/4, 1}, with the nested fraction evaluated
/// directly. Only for small n.
inline double brute_force_cylinder_sum(double t, double q, int n, int max_digit) {
  if (n < 1 || n > 4) throw domain_error("brute_force_cylinder_sum: n must be in [1, 4]");
  std::vector<int> w(n, 1);
  double total = 0.0;
  while (true) {
    double best = -std::numeric_limits<double>::infinity();
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      double log_prod = 0.0;
      for (int j = 0; j < n; ++j) {
        double v = w[n - 1] + x;  // [w_j, ..., w_n + x]
        for (int k = n - 2; k >= j; --k) v = w[k] + 1.0 / v;
        log_prod += q * std::log(w[j]) - 2.0 * t * std::log(v);
      }
      best = std::max(best, log_prod);
    }
    total += std::exp(best);
    int pos = n - 1;
    while (pos >= 0 && w[pos] == max_digit) w[pos--] = 1;
    if (pos < 0) break;
    ++w[pos];
  }
  return std::log(total) / n;
}

/// mu_G(a_1 = a) by quadrature of the Gauss density over [1/(a+1), 1/a].
inline double gauss_digit_mass(std::uint64_t a) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double lo = 1.0 / (static_cast<double>(a) + 1.0);
  const double hi = 1.0 / static_cast<double>(a);
  return integrator.integrate([](double x) { return gauss_density(x); }, lo, hi);
}

/// int log a_1 dmu_G: cylinder masses by quadrature for a <= cylinders, the
/// remainder as int_A^inf log y / (y(y+1)) dy / log 2 corrected by the mean
/// of log(floor(y)/y) ~ -1/(2y), which leaves O(A^{-3}).
inline double khintchine_cylinder_oracle(int cylinders = 1000) {
  double head = 0.0;
  for (int a = 2; a <= cylinders; ++a) head += std::log(a) * gauss_digit_mass(a);
  const double big_a = cylinders + 1.0;
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral = integrator.integrate(
      [&](double v) {
        const double y = big_a + v;
        return std::log(y) / (y * (y + 1.0));
      },
      0.0, std::numeric_limits<double>::infinity());
  // sum_{a >= A} int_a^{a+1} (log a - log y) / y^2 dy, closed form per cylinder
  double fluct = 0.0;
  for (long a = static_cast<long>(big_a); a < static_cast<long>(big_a) + 200000; ++a) {
    const double ad = static_cast<double>(a);
    // int_a^{a+1} log y / y^2 dy = [-(log y + 1)/y]_a^{a+1}
    const double log_part = (std::log(ad) + 1.0) / ad - (std::log(ad + 1.0) + 1.0) / (ad + 1.0);
    const double flat = std::log(ad) * (1.0 / ad - 1.0 / (ad + 1.0));
    fluct += flat - log_part;
  }
  return head + (integral + fluct) / std::numbers::ln2;
}

/// int -2 log x dmu_G(x) by tanh-sinh quadrature.
inline double lyapunov_quadrature_oracle() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate([](double x) { return -2.0 * std::log(x) * gauss_density(x); }, 0.0, 1.0);
}

inline double log_zeta(double s) { return std::log(boost::math::zeta(s)); }

}  // namespace gauss_spectra::oracle

namespace gauss_spectra::verify {

struct VerifyConfig {
  int cutoff = 64;
  int collocation_order = 16;
  double tolerance = 1e-10;  // spectrum residual tolerance
  std::uint64_t seed = 0;

  PressureModel model() const {
    return PressureModel{Alphabet::full(cutoff), Discretization(collocation_order), OperatorSettings{}};
  }
  SolverConfig solver() const {
    SolverConfig s;
    s.residual_tolerance = std::max(tolerance, 1e-8);
    return s;
  }
};

struct Outcome {
  bool passed = false;
  std::string measured;
  std::string expected;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_seconds;
  std::function<Outcome(const VerifyConfig&)> run;
};

struct Report {
  int id = 0;
  std::string name;
  bool passed = false;  // check passed and within the time limit
  bool check_passed = false;
  double seconds = 0.0;
  double time_limit_seconds = 0.0;
  std::string measured;
  std::string expected;
  std::string error;
};

namespace detail {

inline std::string num(double v, int precision = 10) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

inline Outcome khintchine_constant_check(const VerifyConfig&) {
  const auto series = khintchine_series();
  const double oracle = oracle::khintchine_cylinder_oracle();
  const double k0 = std::exp(series.value);
  const double printed = 2.6854;
  const bool decimals = std::abs(k0 - printed) < 1e-4;
  const bool agree = std::abs(series.value - oracle) < 1e-6;
  return {decimals && agree,
          "exp(xi0) = " + num(k0, 12) + ", xi0 series = " + num(series.value, 15) + ", cylinder oracle = " +
              num(oracle, 15) + " (diff " + num(std::abs(series.value - oracle), 3) + ")",
          "|exp(xi0) - 2.6854| < 1e-4, |series - oracle| < 1e-6"};
}

inline Outcome lyapunov_constant_check(const VerifyConfig&) {
  const double closed = lyapunov_constant();
  const double quad = oracle::lyapunov_quadrature_oracle();
  const bool ok = std::abs(closed - 2.37314) < 1e-5 && std::abs(closed - quad) < 1e-10;
  return {ok, "lambda0 = " + num(closed, 15) + ", quadrature = " + num(quad, 15),
          "|lambda0 - 2.37314| < 1e-5, |lambda0 - quadrature| < 1e-10"};
}

inline Outcome normalization_check(const VerifyConfig& c) {
  const double p = c.model()(1.0, 0.0).value;
  return {std::abs(p) < 1e-6, "P(1,0) = " + num(p, 6), "|P(1,0)| < 1e-6"};
}

inline Outcome boundary_identity_check(const VerifyConfig& c) {
  const auto model = c.model();
  double worst = 0.0;
  for (double q : {-1.5, -2.0, -3.0, -4.0}) worst = std::max(worst, std::abs(model(0.0, q).value - oracle::log_zeta(-q)));
  return {worst < 1e-6, "max |P(0,q) - log zeta(-q)| = " + num(worst, 4), "< 1e-6"};
}

inline Outcome derivative_anchor_check(const VerifyConfig& c) {
  const auto r = c.model()(1.0, 0.0);
  const double dq = std::abs(r.dP_dq - constants().xi0);
  const double dt = std::abs(r.dP_dt + constants().lambda0);
  return {dq < 1e-3 && dt < 1e-3,
          "dP/dq(1,0) = " + num(r.dP_dq, 12) + ", dP/dt(1,0) = " + num(r.dP_dt, 12),
          "xi0 = " + num(constants().xi0, 12) + ", -lambda0 = " + num(-constants().lambda0, 12) + " within 1e-3"};
}

inline Outcome sandwich_convexity_check(const VerifyConfig& c) {
  const auto model = c.model();
  const double h = 1e-3;
  double worst_sandwich = 0.0;  // positive = violation
  double min_eigen = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double t = 0.6 + 0.4 * i / 6.0;
      const double q = -1.5 + 1.5 * j / 6.0;
      const auto r = model(t, q);
      const double eps = r.tail_error_bound + 1e-8;
      const double upper = oracle::log_zeta(2.0 * t - q);
      const double lower = upper - t * std::log(4.0);
      worst_sandwich = std::max({worst_sandwich, lower - eps - r.value, r.value - upper - eps});
      const double f = r.value;
      const double ftt = (model(t + h, q).value - 2.0 * f + model(t - h, q).value) / (h * h);
      const double fqq = (model(t, q + h).value - 2.0 * f + model(t, q - h).value) / (h * h);
      const double ftq = (model(t + h, q + h).value - model(t + h, q - h).value - model(t - h, q + h).value +
                          model(t - h, q - h).value) /
                         (4.0 * h * h);
      const double mean = 0.5 * (ftt + fqq);
      const double radius = std::sqrt(0.25 * (ftt - fqq) * (ftt - fqq) + ftq * ftq);
      min_eigen = std::min(min_eigen, mean - radius);
    }
  return {worst_sandwich <= 0.0 && min_eigen >= -1e-6,
          "worst sandwich excess = " + num(worst_sandwich, 4) + ", min Hessian eigenvalue = " + num(min_eigen, 6),
          "excess <= 0, eigenvalue >= -1e-6"};
}

inline Outcome oracle_equivalence_check(const VerifyConfig& c) {
  const auto model = c.model();
  std::vector<std::uint64_t> digits;
  for (std::uint64_t i = 1; i <= 64; ++i) digits.push_back(i);
  const auto restricted = Alphabet::restricted(digits);
  const std::vector<std::pair<double, double>> points = {{1.0, 0.0}, {0.8, 0.1}, {0.9, -0.5}, {0.6, -0.5}, {0.75, -0.25}};
  double worst = 0.0;
  std::ostringstream measured;
  measured.precision(5);
  for (const auto& [t, q] : points) {
    const double op = model(t, q).value;
    const double same_alphabet = pressure({t, q}, restricted, model.disc).value;
    const double sum12 = oracle::cylinder_sum_pressure(t, q, 12, 64);
    // ratio of consecutive sums removes the O(1/n) prefactor bias
    const double sum11 = oracle::cylinder_sum_pressure(t, q, 11, 64);
    const double ratio = 12.0 * sum12 - 11.0 * sum11;
    worst = std::max(worst, std::abs(op - sum12));
    measured << "(" << t << "," << q << "): |P - S12| = " << std::abs(op - sum12)
             << " [digits<=64 operator " << std::abs(same_alphabet - sum12) << ", log(Z12/Z11) vs digits<=64 operator "
             << std::abs(ratio - same_alphabet) << "]; ";
  }
  measured << "max = " << worst;
  return {worst < 0.02, measured.str(), "max |P - (1/12) log Z12| < 0.02"};
}

inline Outcome spectrum_peak_check(const VerifyConfig& c) {
  const auto model = c.model();
  const auto solver = c.solver();
  const auto k = khintchine_point(constants().xi0, model, solver);
  const auto l = lyapunov_point(constants().lambda0, model, solver);
  const double worst = std::max({std::abs(k.dimension - 1.0), std::abs(k.q_value), std::abs(l.dimension - 1.0),
                                 std::abs(l.q_value)});
  return {worst < 1e-4,
          "khintchine (" + num(k.dimension, 12) + ", " + num(k.q_value, 6) + "), lyapunov (" + num(l.dimension, 12) +
              ", " + num(l.q_value, 6) + ")",
          "(1, 0) within 1e-4"};
}

inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
  g.back() = hi;
  return g;
}

inline Outcome spectrum_shape_check(const VerifyConfig& c) {
  const auto curve = khintchine_curve(log_grid(0.3, 40.0, 60), c.model(), c.solver(), true);
  if (!curve.failures.empty())
    return {false, std::to_string(curve.failures.size()) + " points failed: " + curve.failures.front().message,
            "all 60 points solved"};
  const auto r = spectrum_shape_report(curve);
  const double t40 = curve.points.back().dimension;
  const bool ok = r.single_peak() && r.q_changes_at_peak() && r.curvature_at_peak < 0.0 && r.convexity_witness &&
                  t40 > 0.5 && t40 < 0.56;
  std::ostringstream m;
  m.precision(6);
  m << "peak xi = " << r.peak_exponent << ", t' sign changes = " << r.slope_sign_changes
    << ", q sign changes = " << r.q_sign_changes << (r.q_changes_at_peak() ? " (at peak)" : " (away from peak)")
    << ", t''(peak) = " << r.curvature_at_peak << ", t'' > 0 witness = ";
  if (r.convexity_witness)
    m << "[" << r.convexity_witness->first << ", " << r.convexity_witness->second << "]";
  else
    m << "none";
  m << ", t(40) = " << t40;
  return {ok, m.str(), "one t' sign change at peak, q sign change at peak, t''(peak) < 0, witness, t(40) in (0.5, 0.56)"};
}

inline Outcome lyapunov_routes_check(const VerifyConfig& c) {
  const auto model = c.model();
  const auto solver = c.solver();
  const auto betas = log_grid(golden_constant() + 0.06, 29.9, 10);
  double worst = 0.0;
  for (double beta : betas) {
    const auto a = lyapunov_point(beta, model, solver);
    const auto b = lyapunov_point_2d(beta, model, solver);
    worst = std::max({worst, std::abs(a.dimension - b.dimension), std::abs(a.q_value - b.q_value)});
  }
  return {worst < 1e-8, "max route difference over 10 beta = " + num(worst, 4), "< 1e-8"};
}

inline Outcome bounded_digit_check(const VerifyConfig& c) {
  const double d = bounded_digit_dimension({1, 2}, Discretization(c.collocation_order));
  return {std::abs(d - 0.5312805) < 1e-5, "dim E2 = " + num(d, 15), "0.5312805 within 1e-5"};
}

inline Outcome fast_spectrum_check(const VerifyConfig&) {
  bool exact = true;
  for (double b : {1.0, 2.0, 3.0}) exact = exact && fast_spectrum_dim(b) == 1.0 / (b + 1.0);
  const auto doubly = cantor_dimension([](std::uint64_t n) { return std::ldexp(std::numbers::ln2, static_cast<int>(n)); }, 40);
  const auto linear = cantor_dimension([](std::uint64_t n) { return std::log(static_cast<double>(n) + 2.0); }, 10000);
  const bool ok = exact && std::abs(doubly.value - 1.0 / 3.0) < 1e-3 && std::abs(linear.value - 0.5) < 1e-3;
  return {ok,
          std::string("1/(b+1) exact: ") + (exact ? "yes" : "no") + ", s_n = 2^(2^n): " + num(doubly.value, 10) +
              ", s_n = n+2: " + num(linear.value, 10),
          "exact; 1/3 and 1/2 within 1e-3"};
}

inline Outcome constructed_point_check(const VerifyConfig&) {
  auto point = construct_point(1.0);
  const auto stats = exponent_estimates(point.take(10000));
  const double target = 2.0 + golden_constant();
  const bool ok = std::abs(stats.khintchine_estimate - 1.0) < 0.05 && std::abs(stats.lyapunov_estimate - target) < 0.05;
  return {ok,
          "gamma_n = " + num(stats.khintchine_estimate, 8) + ", lambda_n = " + num(stats.lyapunov_estimate, 8),
          "1 and " + num(target, 8) + " within 0.05"};
}

inline Outcome sampling_check(const VerifyConfig& c) {
  const auto model = c.model();
  const GibbsApprox g({1.0, 0.0}, model.alphabet, model.disc);
  const auto digits = sample_digits(g, 100000, c.seed);
  double sum = 0.0;
  for (const auto& d : digits) sum += log_of(d);
  const double mean = sum / static_cast<double>(digits.size());
  return {std::abs(mean - constants().xi0) < 0.05, "mean log digit = " + num(mean, 8) + " (seed " + std::to_string(c.seed) + ")",
          "xi0 = " + num(constants().xi0, 8) + " within 0.05"};
}

inline Outcome exact_property_check(const VerifyConfig& c) {
  std::mt19937_64 rng(c.seed + 15);
  std::uniform_int_distribution<int> length(1, 30);
  std::uniform_int_distribution<int> small(1, 9);
  std::uniform_int_distribution<int> large(1, 100000);
  std::bernoulli_distribution pick_large(0.2);
  const double k_window = std::exp(4.0);
  int det = 0, mirror = 0, sandwich = 0, jacobian = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = length(rng);
    std::vector<BigInt> raw;
    for (int i = 0; i < n + 8; ++i) raw.emplace_back(pick_large(rng) ? large(rng) : small(rng));
    const PartialQuotients all(raw);
    const PartialQuotients digits(std::vector<BigInt>(raw.begin(), raw.begin() + n));
    const auto conv = convergents(digits);
    BigInt p_prev = 0, q_prev = 1;
    BigInt lower = 1, upper = 1;
    bool det_ok = true;
    for (std::size_t k = 0; k < conv.size(); ++k) {
      const BigInt sign = (k + 1) % 2 == 0 ? 1 : -1;
      det_ok = det_ok && p_prev * conv[k].q - conv[k].p * q_prev == sign;
      p_prev = conv[k].p;
      q_prev = conv[k].q;
      lower *= digits[k];
      upper *= digits[k] + 1;
    }
    det += det_ok;
    mirror += continuant(digits) == continuant(digits.reversed());
    sandwich += lower <= conv.back().q && conv.back().q <= upper;
    // x inside I_n(digits): the value of the longer expansion
    Rational x = evaluate(all);
    double log_deriv = 0.0;
    for (int k = 0; k < n; ++k) {
      log_deriv -= 2.0 * std::log(x.convert_to<double>());
      x = gauss_map(x);
    }
    const double ratio = std::exp(2.0 * log_of(conv.back().q) - log_deriv);
    jacobian += ratio >= 1.0 / (2.0 * k_window) && ratio <= k_window;
  }
  const bool ok = det == 1000 && mirror == 1000 && sandwich == 1000 && jacobian == 1000;
  return {ok,
          "determinant " + std::to_string(det) + ", mirror " + std::to_string(mirror) + ", sandwich " +
              std::to_string(sandwich) + ", Jacobian " + std::to_string(jacobian) + " of 1000",
          "all 1000"};
}

}  // namespace detail

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "Khintchine constant", 1.0, detail::khintchine_constant_check},
      {2, "Lyapunov constant", 1.0, detail::lyapunov_constant_check},
      {3, "Pressure normalization", 1.0, detail::normalization_check},
      {4, "Pressure boundary identity", 2.0, detail::boundary_identity_check},
      {5, "Derivative anchors", 2.0, detail::derivative_anchor_check},
      {6, "Pressure sandwich and convexity", 30.0, detail::sandwich_convexity_check},
      {7, "Oracle equivalence", 60.0, detail::oracle_equivalence_check},
      {8, "Spectrum peak", 10.0, detail::spectrum_peak_check},
      {9, "Spectrum shape", 300.0, detail::spectrum_shape_check},
      {10, "Lyapunov route equivalence", 60.0, detail::lyapunov_routes_check},
      {11, "Bounded-digit dimension", 5.0, detail::bounded_digit_check},
      {12, "Fast spectrum", 2.0, detail::fast_spectrum_check},
      {13, "Constructed points", 1.0, detail::constructed_point_check},
      {14, "Gibbs sampling ergodicity", 5.0, detail::sampling_check},
      {15, "Exact-arithmetic property suite", 5.0, detail::exact_property_check},
  };
  return list;
}

inline Report run(const Criterion& criterion, const VerifyConfig& config) {
  Report r;
  r.id = criterion.id;
  r.name = criterion.name;
  r.time_limit_seconds = criterion.time_limit_seconds;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto outcome = criterion.run(config);
    r.check_passed = outcome.passed;
    r.measured = outcome.measured;
    r.expected = outcome.expected;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.passed = r.check_passed && r.seconds < r.time_limit_seconds;
  return r;
}

inline std::string format(const Report& r) {
  std::ostringstream s;
  s.precision(3);
  s << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " (" << r.seconds << " s, limit "
    << r.time_limit_seconds << " s)";
  if (!r.error.empty())
    s << "\n      error: " << r.error;
  else
    s << "\n      measured: " << r.measured << "\n      expected: " << r.expected;
  if (r.check_passed && !r.passed) s << "\n      time limit exceeded";
  return s.str();
}

}  // namespace gauss_spectra::verify
