#pragma once

// Dimension spectra built on the pressure surface.
//
// Khintchine: dim{gamma(x) = xi} = t where (t,q) solves
//   P(t,q) = q xi,   dP/dq(t,q) = xi.
// Lyapunov: dim{lambda(x) = beta} = t~ where, with P1(t~,q) = P(t~ - q, 0),
//   P1(t~,q) = q beta,   dP1/dq(t~,q) = beta,
// which reduces to P'(u) = -beta, q = P(u)/beta, t~ = u + q.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "errors.hpp"
#include "special_fn.hpp"
#include "transfer_op.hpp"

namespace gauss_spectra {

/// Alphabet, discretization and operator settings bundled as a pressure surface.
struct PressureModel {
  Alphabet alphabet = Alphabet::full();
  Discretization disc{};
  OperatorSettings settings{};

  PressureResult operator()(double t, double q) const { return pressure({t, q}, alphabet, disc, settings); }
};

struct SolverConfig {
  double xi_min = 0.05;
  double xi_max = 50.0;
  double beta_margin = 1e-3;  // beta must exceed gamma0 + beta_margin
  double beta_max = 1000.0;
  double t_floor = 0.02;          // outer search interval (t_floor, 1]
  double residual_tolerance = 1e-8;
  int max_iterations = 200;
};

enum class SpectrumKind { khintchine, lyapunov };

inline const char* to_string(SpectrumKind kind) { return kind == SpectrumKind::khintchine ? "khintchine" : "lyapunov"; }

struct SpectrumPoint {
  double exponent = 0.0;  // xi or beta, nats
  double dimension = 0.0;
  double q_value = 0.0;
  std::array<double, 2> residuals{};  // P - q*exponent, dP/dq - exponent
  double dP_dt = 0.0;                 // dP/dt (Khintchine) or P'(t~ - q) (Lyapunov) at the solution
  double slope = 0.0;                 // q / dP_dt, the implicit-function derivative of the dimension
};

struct PointFailure {
  double exponent = 0.0;
  std::string message;
};

struct SpectrumCurve {
  SpectrumKind kind = SpectrumKind::khintchine;
  std::vector<SpectrumPoint> points;  // increasing exponent
  std::vector<PointFailure> failures;
  std::vector<std::pair<std::string, std::string>> metadata;
};

namespace detail {

inline bool tight(double a, double b) {
  return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
}

// Root of an increasing function on [lo_limit, hi_limit], bracketed by
// doubling steps outward from `guess`, then refined with TOMS 748.
template <class F>
double solve_increasing(F&& f, double guess, double step, double lo_limit, double hi_limit, int max_iterations,
                        const char* what) {
  guess = std::clamp(guess, lo_limit, hi_limit);
  double a = std::max(lo_limit, guess - step);
  double b = std::min(hi_limit, guess + step);
  double fa = f(a);
  double fb = f(b);
  while (fa > 0.0) {
    if (a <= lo_limit) {
      std::ostringstream msg;
      msg.precision(10);
      msg << what << ": no sign change; f(" << a << ") = " << fa << " > 0 at the lower limit";
      throw bracket_failure(msg.str());
    }
    b = a;
    fb = fa;
    step *= 2.0;
    a = std::max(lo_limit, a - step);
    fa = f(a);
  }
  while (fb < 0.0) {
    if (b >= hi_limit) {
      std::ostringstream msg;
      msg.precision(10);
      msg << what << ": no sign change; f(" << b << ") = " << fb << " < 0 at the upper limit";
      throw bracket_failure(msg.str());
    }
    a = b;
    fa = fb;
    step *= 2.0;
    b = std::min(hi_limit, b + step);
    fb = f(b);
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t iterations = static_cast<std::uintmax_t>(max_iterations);
  const auto root = boost::math::tools::toms748_solve(f, a, b, fa, fb, tight, iterations);
  // the endpoint with the smaller residual
  const double fr = f(root.first);
  const double fs = f(root.second);
  return std::abs(fr) <= std::abs(fs) ? root.first : root.second;
}

}  // namespace detail

/// Warm-start data for continuation: the neighbouring solution.
struct SpectrumGuess {
  double dimension = 1.0;
  double q_value = 0.0;
};

namespace detail {

inline void check_residuals(const SpectrumPoint& p, const SolverConfig& config, const char* what) {
  const double worst = std::max(std::abs(p.residuals[0]), std::abs(p.residuals[1]));
  if (!(worst <= config.residual_tolerance)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << what << " at " << p.exponent << ": residual " << worst << " exceeds " << config.residual_tolerance;
    throw non_convergence(msg.str());
  }
}

}  // namespace detail

// -------- Khintchine --------

namespace detail {

// q(t) with dP/dq(t, q) = xi.
inline double khintchine_inner(const PressureModel& model, double t, double xi, double q_guess,
                               const SolverConfig& config) {
  const double hi = 2.0 * t - 1.0 - 2.0 * model.settings.domain_margin;
  const auto f = [&](double q) { return model(t, q).dP_dq - xi; };
  return solve_increasing(f, std::min(q_guess, hi), 0.25, -500.0, hi, config.max_iterations,
                          "khintchine inner solve for q");
}

}  // namespace detail

inline SpectrumPoint khintchine_point(double xi, const PressureModel& model = {}, const SolverConfig& config = {},
                                      std::optional<SpectrumGuess> guess = std::nullopt) {
  if (!(xi >= config.xi_min && xi <= config.xi_max)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "xi = " << xi << " outside the solver window [" << config.xi_min << ", " << config.xi_max << "]";
    throw window_error(msg.str());
  }
  double q_last = guess ? guess->q_value : 0.0;
  const auto q_of = [&](double t) {
    q_last = detail::khintchine_inner(model, t, xi, q_last, config);
    return q_last;
  };
  // W(t) = P(t, q(t)) - xi q(t), strictly decreasing in t
  const auto minus_w = [&](double t) {
    const double q = q_of(t);
    return xi * q - model(t, q).value;
  };

  double t = 1.0;
  const double at_one = minus_w(1.0);
  if (at_one > 0.0) {
    const double t_guess = guess ? guess->dimension : 1.0;
    t = detail::solve_increasing(minus_w, t_guess, 0.02, config.t_floor, 1.0, config.max_iterations,
                                 "khintchine outer solve for t");
  }
  const double q = q_of(t);
  const auto r = model(t, q);
  SpectrumPoint p;
  p.exponent = xi;
  p.dimension = t;
  p.q_value = q;
  p.residuals = {r.value - q * xi, r.dP_dq - xi};
  p.dP_dt = r.dP_dt;
  p.slope = q / r.dP_dt;
  detail::check_residuals(p, config, "khintchine point");
  return p;
}

// -------- Lyapunov --------

/// P1(t~, q) = P(t~ - q, 0) with dP1/dq = -P'(t~ - q) and dP1/dt~ = P'(t~ - q).
struct LyapunovPressure {
  double value, dP1_dq, dP1_dt;
};

inline LyapunovPressure lyapunov_pressure(const PressureModel& model, double t_tilde, double q) {
  const auto r = model(t_tilde - q, 0.0);
  return {r.value, -r.dP_dt, r.dP_dt};
}

namespace detail {

inline void check_beta_window(double beta, const SolverConfig& config) {
  const double lo = golden_constant() + config.beta_margin;
  if (!(beta > lo && beta <= config.beta_max)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "beta = " << beta << " outside the solver window (" << lo << ", " << config.beta_max
        << "]; beta must exceed gamma0 = " << golden_constant();
    throw window_error(msg.str());
  }
}

// u > 1/2 with P'(u) = -beta.
inline double lyapunov_u(const PressureModel& model, double beta, double u_guess, const SolverConfig& config) {
  const double lo = 0.5 + model.settings.domain_margin;
  const auto f = [&](double u) { return model(u, 0.0).dP_dt + beta; };
  return solve_increasing(f, u_guess, 0.1, lo, 1000.0, config.max_iterations, "lyapunov solve for u");
}

}  // namespace detail

inline SpectrumPoint lyapunov_point(double beta, const PressureModel& model = {}, const SolverConfig& config = {},
                                    std::optional<SpectrumGuess> guess = std::nullopt) {
  detail::check_beta_window(beta, config);
  const double u_guess = guess ? guess->dimension - guess->q_value : 1.0;
  const double u = detail::lyapunov_u(model, beta, u_guess, config);
  const auto at_u = model(u, 0.0);
  const double q = at_u.value / beta;
  const double t_tilde = u + q;

  const auto p1 = lyapunov_pressure(model, t_tilde, q);
  SpectrumPoint p;
  p.exponent = beta;
  p.dimension = t_tilde;
  p.q_value = q;
  p.residuals = {p1.value - q * beta, p1.dP1_dq - beta};
  p.dP_dt = p1.dP1_dt;
  p.slope = q / p1.dP1_dt;
  detail::check_residuals(p, config, "lyapunov point");
  return p;
}

/// Nested solve of the two-parameter Lyapunov system directly in (t~, q):
/// inner root of dP1/dq = beta in q, outer root of P1 - q beta in t~.
inline SpectrumPoint lyapunov_point_2d(double beta, const PressureModel& model = {},
                                       const SolverConfig& config = {}) {
  detail::check_beta_window(beta, config);
  double q_last = 0.0;
  const auto q_of = [&](double t_tilde) {
    const double hi = t_tilde - 0.5 - 2.0 * model.settings.domain_margin;
    const auto f = [&](double q) { return lyapunov_pressure(model, t_tilde, q).dP1_dq - beta; };
    q_last = detail::solve_increasing(f, std::min(q_last, hi), 0.25, -1000.0, hi, config.max_iterations,
                                      "lyapunov inner solve for q");
    return q_last;
  };
  const auto minus_w = [&](double t_tilde) {
    const double q = q_of(t_tilde);
    return q * beta - lyapunov_pressure(model, t_tilde, q).value;
  };
  double t_tilde = 1.0;
  if (minus_w(1.0) > 0.0)
    t_tilde = detail::solve_increasing(minus_w, 1.0, 0.05, config.t_floor, 1.0, config.max_iterations,
                                       "lyapunov outer solve for t");
  const double q = q_of(t_tilde);
  const auto p1 = lyapunov_pressure(model, t_tilde, q);
  SpectrumPoint p;
  p.exponent = beta;
  p.dimension = t_tilde;
  p.q_value = q;
  p.residuals = {p1.value - q * beta, p1.dP1_dq - beta};
  p.dP_dt = p1.dP1_dt;
  p.slope = q / p1.dP1_dt;
  detail::check_residuals(p, config, "lyapunov point");
  return p;
}

// -------- curves --------

namespace detail {

using PointSolver = std::function<SpectrumPoint(double, std::optional<SpectrumGuess>)>;

inline void solve_branch(const std::vector<double>& grid, std::vector<std::size_t> order, const PointSolver& solve,
                         std::vector<std::optional<SpectrumPoint>>& out, std::vector<std::string>& errors) {
  std::optional<SpectrumGuess> guess;
  for (const auto index : order) {
    try {
      const auto p = solve(grid[index], guess);
      out[index] = p;
      guess = SpectrumGuess{p.dimension, p.q_value};
    } catch (const std::exception& e) {
      errors[index] = e.what();
    }
  }
}

// Solve outward from the grid point nearest `peak`, each branch warm-started
// from its previous solution. The two branches run concurrently when
// `parallel` is set; the result does not depend on it.
inline SpectrumCurve solve_curve(SpectrumKind kind, const std::vector<double>& grid, double peak,
                                 const PointSolver& solve, bool parallel) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw domain_error("spectrum grid must be strictly increasing");
  std::size_t start = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] - peak) < std::abs(grid[start] - peak)) start = i;

  std::vector<std::size_t> up, down;
  for (std::size_t i = start; i < grid.size(); ++i) up.push_back(i);
  for (std::size_t i = start; i-- > 0;) down.push_back(i);

  std::vector<std::optional<SpectrumPoint>> solved(grid.size());
  std::vector<std::string> errors(grid.size());
  if (parallel && !down.empty()) {
    auto lower = std::async(std::launch::async, [&] { solve_branch(grid, down, solve, solved, errors); });
    solve_branch(grid, up, solve, solved, errors);
    lower.get();
  } else {
    solve_branch(grid, up, solve, solved, errors);
    solve_branch(grid, down, solve, solved, errors);
  }

  SpectrumCurve curve;
  curve.kind = kind;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (solved[i])
      curve.points.push_back(*solved[i]);
    else
      curve.failures.push_back({grid[i], errors[i]});
  }
  return curve;
}

inline std::vector<std::pair<std::string, std::string>> model_metadata(const PressureModel& model,
                                                                        const SolverConfig& config) {
  const auto num = [](double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
  };
  return {
      {"cutoff", std::to_string(model.alphabet.cutoff())},
      {"collocation_order", std::to_string(model.disc.order())},
      {"operator_tolerance", num(model.settings.tolerance)},
      {"domain_margin", num(model.settings.domain_margin)},
      {"residual_tolerance", num(config.residual_tolerance)},
  };
}

}  // namespace detail

inline SpectrumCurve khintchine_curve(const std::vector<double>& grid, const PressureModel& model = {},
                                      const SolverConfig& config = {}, bool parallel = false) {
  for (double xi : grid)
    if (!(xi >= config.xi_min && xi <= config.xi_max)) {
      std::ostringstream msg;
      msg.precision(10);
      msg << "xi = " << xi << " outside the solver window [" << config.xi_min << ", " << config.xi_max << "]";
      throw window_error(msg.str());
    }
  auto curve = detail::solve_curve(
      SpectrumKind::khintchine, grid, constants().xi0,
      [&](double xi, std::optional<SpectrumGuess> g) { return khintchine_point(xi, model, config, g); }, parallel);
  curve.metadata = detail::model_metadata(model, config);
  return curve;
}

inline SpectrumCurve lyapunov_curve(const std::vector<double>& grid, const PressureModel& model = {},
                                    const SolverConfig& config = {}, bool parallel = false) {
  for (double beta : grid) detail::check_beta_window(beta, config);
  auto curve = detail::solve_curve(
      SpectrumKind::lyapunov, grid, constants().lambda0,
      [&](double beta, std::optional<SpectrumGuess> g) { return lyapunov_point(beta, model, config, g); },
      parallel);
  curve.metadata = detail::model_metadata(model, config);
  return curve;
}

/// Central finite-difference slope of dimension against exponent along the
/// curve (one-sided at the ends).
inline std::vector<double> finite_difference_slopes(const SpectrumCurve& curve) {
  const auto& p = curve.points;
  std::vector<double> out(p.size(), std::numeric_limits<double>::quiet_NaN());
  if (p.size() < 2) return out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i + 1 == p.size() ? i : i + 1;
    if (a == i || b == i) {
      out[i] = (p[b].dimension - p[a].dimension) / (p[b].exponent - p[a].exponent);
      continue;
    }
    // derivative of the quadratic through three points
    const double h1 = p[i].exponent - p[a].exponent;
    const double h2 = p[b].exponent - p[i].exponent;
    out[i] = (-h2 / (h1 * (h1 + h2))) * p[a].dimension + ((h2 - h1) / (h1 * h2)) * p[i].dimension +
             (h1 / (h2 * (h1 + h2))) * p[b].dimension;
  }
  return out;
}

// -------- shape --------

struct ShapeReport {
  std::size_t peak_index = 0;
  double peak_exponent = 0.0;
  double peak_dimension = 0.0;
  int slope_sign_changes = 0;
  std::optional<std::size_t> slope_change_index;  // grid point where t' changes sign
  double curvature_at_peak = 0.0;
  std::optional<std::pair<double, double>> convexity_witness;  // interval beyond the peak with t'' > 0
  int q_sign_changes = 0;
  std::optional<std::size_t> q_change_index;  // q changes sign between index and index + 1
  std::vector<double> slopes;
  std::vector<double> curvatures;

  bool single_peak() const {
    return slope_sign_changes == 1 && slope_change_index == peak_index;
  }
  bool q_changes_at_peak() const {
    return q_sign_changes == 1 && q_change_index && (*q_change_index == peak_index || *q_change_index + 1 == peak_index);
  }
};

inline ShapeReport spectrum_shape_report(const SpectrumCurve& curve) {
  const auto& p = curve.points;
  if (p.size() < 20) throw domain_error("spectrum_shape_report needs at least 20 solved points");
  ShapeReport r;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i].dimension > p[r.peak_index].dimension) r.peak_index = i;
  if (r.peak_index == 0 || r.peak_index + 1 == p.size())
    throw domain_error("spectrum_shape_report needs points on both sides of the peak");
  r.peak_exponent = p[r.peak_index].exponent;
  r.peak_dimension = p[r.peak_index].dimension;

  const std::size_t n = p.size();
  // secant slopes between neighbours decide the monotonicity pattern
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    secant[i] = (p[i + 1].dimension - p[i].dimension) / (p[i + 1].exponent - p[i].exponent);
  for (std::size_t i = 0; i + 1 < secant.size(); ++i)
    if ((secant[i] > 0.0) != (secant[i + 1] > 0.0)) {
      ++r.slope_sign_changes;
      if (!r.slope_change_index) r.slope_change_index = i + 1;
    }

  r.slopes = finite_difference_slopes(curve);
  r.curvatures.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = p[i].exponent - p[i - 1].exponent;
    const double h2 = p[i + 1].exponent - p[i].exponent;
    r.curvatures[i] = 2.0 * (h1 * p[i + 1].dimension - (h1 + h2) * p[i].dimension + h2 * p[i - 1].dimension) /
                      (h1 * h2 * (h1 + h2));
  }
  r.curvature_at_peak = r.curvatures[r.peak_index];
  for (std::size_t i = r.peak_index + 1; i + 1 < n; ++i)
    if (r.curvatures[i] > 0.0) {
      r.convexity_witness = std::make_pair(p[i - 1].exponent, p[i + 1].exponent);
      break;
    }

  for (std::size_t i = 0; i + 1 < n; ++i)
    if ((p[i].q_value > 0.0) != (p[i + 1].q_value > 0.0)) {
      ++r.q_sign_changes;
      if (!r.q_change_index) r.q_change_index = i;
    }
  return r;
}

// -------- fast spectra and Cantor sets --------

inline double fast_spectrum_dim(double b) {
  if (!(b >= 1.0)) throw domain_error("fast_spectrum_dim requires b >= 1");
  return 1.0 / (b + 1.0);
}

struct GrowthRatio {
  double estimate = 0.0;    // extrapolated lim phi(n+1)/phi(n)
  double last_ratio = 0.0;  // raw phi(N)/phi(N-1)
  bool increments_increasing = true;
  std::vector<std::string> diagnostics;
};

/// Estimate b = lim phi(n+1)/phi(n) from samples phi(1..N). The raw ratio
/// r_n = b + c/n + O(1/n^2) is extrapolated as (n+1) r_{n+1} - n r_n.
inline GrowthRatio growth_ratio(std::span<const double> phi) {
  if (phi.size() < 16) throw domain_error("growth_ratio needs at least 16 samples");
  GrowthRatio g;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] > 0.0) || !std::isfinite(phi[i])) throw domain_error("growth_ratio samples must be positive and finite");
    if (i > 0 && !(phi[i] > phi[i - 1])) throw domain_error("growth_ratio samples must be increasing");
  }
  for (std::size_t i = 2; i < phi.size(); ++i) {
    const double prev = phi[i - 1] - phi[i - 2];
    const double next = phi[i] - phi[i - 1];
    if (!(next > prev)) {
      if (g.increments_increasing)
        g.diagnostics.push_back("increments phi(n+1)-phi(n) not increasing at n = " + std::to_string(i));
      g.increments_increasing = false;
    }
  }
  const std::size_t n = phi.size();
  const double r_last = phi[n - 1] / phi[n - 2];
  const double r_prev = phi[n - 2] / phi[n - 3];
  g.last_ratio = r_last;
  const double k = static_cast<double>(n - 2);  // r_prev = r_k with 1-based samples
  g.estimate = (k + 1.0) * r_last - k * r_prev;
  g.estimate = std::max(1.0, g.estimate);
  return g;
}

struct CantorEstimate {
  double value = 0.0;           // liminf proxy: minimum over the tail window [N/2, N]
  std::size_t argmin = 0;       // n attaining it
  std::size_t horizon = 0;      // N
  std::vector<double> last_values;  // quotient at n = N-9..N
};

/// Dimension of {x : s_n <= a_n(x) < N s_n} as the liminf over n of
/// S_n / (2 S_n + log s_{n+1}), S_n = log(s_1 ... s_n). `log_s(n)` returns
/// log s_n for n >= 1.
inline CantorEstimate cantor_dimension(const std::function<double(std::uint64_t)>& log_s, std::size_t horizon) {
  if (horizon < 32) throw domain_error("cantor_dimension requires horizon >= 32");
  const double floor = std::log(3.0) * (1.0 - 1e-15);
  CantorEstimate est;
  est.horizon = horizon;
  est.value = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  double next = log_s(1);
  for (std::size_t n = 1; n <= horizon; ++n) {
    const double current = next;
    if (!(current >= floor)) throw domain_error("cantor_dimension requires s_n >= 3 (n = " + std::to_string(n) + ")");
    sum += current;
    next = log_s(n + 1);
    if (!(next >= floor)) throw domain_error("cantor_dimension requires s_n >= 3 (n = " + std::to_string(n + 1) + ")");
    const double quotient = sum / (2.0 * sum + next);
    if (2 * n >= horizon && quotient < est.value) {
      est.value = quotient;
      est.argmin = n;
    }
    if (n + 10 > horizon) est.last_values.push_back(quotient);
  }
  return est;
}

/// Hausdorff dimension of the continued fractions with all digits in `digits`:
/// the zero of the restricted pressure t -> P(t, 0).
inline double bounded_digit_dimension(std::vector<std::uint64_t> digits, const Discretization& disc = Discretization(),
                                      const OperatorSettings& settings = {}) {
  const auto alphabet = Alphabet::restricted(std::move(digits));
  if (alphabet.explicit_digits().size() == 1) return 0.0;
  const auto f = [&](double t) { return -pressure_1d(t, alphabet, disc, settings).value; };
  return detail::solve_increasing(f, 0.5, 0.5, 0.0, 1.0, 200, "bounded digit dimension");
}

}  // namespace gauss_spectra
