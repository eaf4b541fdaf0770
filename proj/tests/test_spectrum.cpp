#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gauss_spectra/spectrum.hpp>
#include <gauss_spectra/verify.hpp>

using namespace gauss_spectra;
using Catch::Approx;

namespace {

const double xi0 = constants().xi0;
const double lambda0 = constants().lambda0;
const double gamma0 = constants().gamma0;

void check_khintchine_contract(const SpectrumPoint& p, const PressureModel& model = {}) {
  INFO("xi = " << p.exponent);
  const auto r = model(p.dimension, p.q_value);
  CHECK(std::abs(r.value - p.q_value * p.exponent) < 1e-8);
  CHECK(std::abs(r.dP_dq - p.exponent) < 1e-8);
  CHECK(2.0 * p.dimension - p.q_value > 1.0);
  CHECK(p.dimension >= 0.0);
  CHECK(p.dimension <= 1.0 + 1e-12);
}

double local_slope(double xi, double h = 1e-4) {
  return (khintchine_point(xi + h).dimension - khintchine_point(xi - h).dimension) / (2.0 * h);
}

const SpectrumCurve& khintchine_60() {
  static const SpectrumCurve curve = khintchine_curve(verify::detail::log_grid(0.3, 40.0, 60));
  return curve;
}

const SpectrumCurve& lyapunov_40() {
  static const SpectrumCurve curve = lyapunov_curve(verify::detail::log_grid(1.0, 30.0, 40));
  return curve;
}

}  // namespace

TEST_CASE("khintchine_point examples") {
  const auto at_peak = khintchine_point(xi0);
  CHECK(at_peak.dimension == Approx(1.0).margin(1e-4));
  CHECK(at_peak.q_value == Approx(0.0).margin(1e-4));

  // xi = 1 sits just above xi0 = 0.98785, so its q is small and positive.
  const auto half = khintchine_point(0.5);
  CHECK(half.q_value < 0.0);
  const auto one = khintchine_point(1.0);
  CHECK(one.q_value > 0.0);
  CHECK(one.q_value < 0.05);

  const auto ten = khintchine_point(10.0);
  CHECK(ten.q_value > 0.0);
  CHECK(ten.dimension > 0.5);
  CHECK(ten.dimension < 1.0);

  for (const auto& p : {at_peak, half, one, ten}) check_khintchine_contract(p);
}

TEST_CASE("khintchine_point window") {
  CHECK_THROWS_AS(khintchine_point(0.01), window_error);
  CHECK_THROWS_AS(khintchine_point(80.0), window_error);
  SolverConfig wide;
  wide.xi_max = 100.0;
  CHECK_NOTHROW(khintchine_point(60.0, {}, wide));
}

TEST_CASE("khintchine curve examples") {
  const auto curve = khintchine_curve({0.5, xi0, 10.0});
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.failures.empty());
  CHECK(curve.points[0].dimension < 1.0);
  CHECK(curve.points[1].dimension == Approx(1.0).margin(1e-6));
  CHECK(curve.points[2].dimension < 1.0);
  CHECK(curve.kind == SpectrumKind::khintchine);
  CHECK_FALSE(curve.metadata.empty());
}

TEST_CASE("khintchine tail at 40 agrees across discretizations") {
  const auto coarse = khintchine_point(40.0);
  const PressureModel fine{Alphabet::full(128), Discretization(24), {}};
  const auto refined = khintchine_point(40.0, fine);
  CHECK(coarse.dimension > 0.5);
  CHECK(coarse.dimension < 0.56);
  CHECK(std::abs(coarse.dimension - refined.dimension) < 1e-4);
}

TEST_CASE("khintchine spectrum near the bottom of the window") {
  // A Bernoulli measure on digits {1, 2} with P(2) = p has Khintchine exponent
  // p log 2 and entropy h, and bounds the dimension from below by h / lambda.
  const double xi = 0.05;
  const double p = xi / std::numbers::ln2;
  const double h = -p * std::log(p) - (1.0 - p) * std::log1p(-p);
  std::mt19937_64 rng(17);
  std::bernoulli_distribution two(p);
  std::vector<BigInt> digits;
  for (int i = 0; i < 200000; ++i) digits.emplace_back(two(rng) ? 2 : 1);
  const double lambda = exponent_estimates(PartialQuotients(std::move(digits))).lyapunov_estimate;
  const auto point = khintchine_point(xi);
  INFO("t(0.05) = " << point.dimension << ", bernoulli bound = " << h / lambda);
  CHECK(point.dimension > h / lambda - 0.01);
  CHECK(point.dimension < 0.5);
  // t'(0+) = +inf: the forward slope at the bottom dwarfs the slope in the bulk.
  const double forward = (khintchine_point(0.06).dimension - point.dimension) / 0.01;
  CHECK(forward > 3.0);
  CHECK(forward > 5.0 * std::abs(local_slope(5.0)));
  check_khintchine_contract(point);
}

TEST_CASE("q-sign law along the curve") {
  for (const auto& p : khintchine_60().points) {
    INFO("xi = " << p.exponent);
    if (p.exponent < xi0 - 0.01) CHECK(p.q_value < 0.0);
    if (p.exponent > xi0 + 0.01) CHECK(p.q_value > 0.0);
  }
  CHECK(std::abs(khintchine_point(xi0).q_value) < 1e-3);
}

TEST_CASE("every curve point meets the residual contract") {
  const auto& curve = khintchine_60();
  CHECK(curve.points.size() == 60);
  CHECK(curve.failures.empty());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    check_khintchine_contract(curve.points[i]);
    if (i > 0) CHECK(curve.points[i].exponent > curve.points[i - 1].exponent);
    if (curve.points[i].exponent > 1.5) CHECK(curve.points[i].dimension > 0.5);
  }
}

TEST_CASE("slope identity") {
  for (double xi : {0.4, 0.7, 1.5, 3.0, 8.0, 20.0}) {
    const auto p = khintchine_point(xi);
    INFO("xi = " << xi);
    CHECK(p.slope == Approx(p.q_value / p.dP_dt).epsilon(1e-12));
    CHECK(std::abs(local_slope(xi) - p.slope) < 1e-3);
  }
}

TEST_CASE("parallel and sequential curves are identical") {
  const auto grid = verify::detail::log_grid(0.5, 10.0, 12);
  const auto a = khintchine_curve(grid, {}, {}, true);
  const auto b = khintchine_curve(grid, {}, {}, false);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].dimension == b.points[i].dimension);
    CHECK(a.points[i].q_value == b.points[i].q_value);
  }
}

TEST_CASE("curve grids outside the window are rejected") {
  CHECK_THROWS_AS(khintchine_curve({0.01, 1.0, 2.0}), window_error);
  CHECK_THROWS_AS(lyapunov_curve({0.5, 2.0}), window_error);
}

TEST_CASE("unconverged points are reported as failures") {
  SolverConfig strict;
  strict.residual_tolerance = 1e-300;
  const auto curve = khintchine_curve({1.0, 2.0}, {}, strict);
  CHECK(curve.points.empty());
  REQUIRE(curve.failures.size() == 2);
  CHECK(curve.failures[0].exponent == 1.0);
  CHECK_FALSE(curve.failures[0].message.empty());
}

TEST_CASE("khintchine shape report") {
  const auto r = spectrum_shape_report(khintchine_60());
  CHECK(r.single_peak());
  CHECK(r.q_changes_at_peak());
  CHECK(r.curvature_at_peak < 0.0);
  REQUIRE(r.convexity_witness.has_value());
  CHECK(r.convexity_witness->first > xi0);
  CHECK(std::abs(r.peak_exponent - xi0) < 0.15);
  CHECK(r.peak_dimension > 0.999);
}

TEST_CASE("shape report needs enough points on both sides") {
  const auto small = khintchine_curve({0.5, 1.0, 2.0});
  CHECK_THROWS_AS(spectrum_shape_report(small), domain_error);
  const auto one_sided = khintchine_curve(verify::detail::log_grid(2.0, 30.0, 20));
  CHECK_THROWS_AS(spectrum_shape_report(one_sided), domain_error);
}

TEST_CASE("lyapunov_point examples") {
  const auto at_peak = lyapunov_point(lambda0);
  CHECK(at_peak.dimension == Approx(1.0).margin(1e-4));
  CHECK(at_peak.q_value == Approx(0.0).margin(1e-4));

  const auto twice = lyapunov_point(2.0 * lambda0);
  CHECK(twice.dimension > 0.5);
  CHECK(twice.dimension < 1.0);
  const PressureModel fine{Alphabet::full(128), Discretization(24), {}};
  CHECK(std::abs(twice.dimension - lyapunov_point(2.0 * lambda0, fine).dimension) < 1e-6);

  const auto low = lyapunov_point(gamma0 + 0.02);
  CHECK(low.dimension < 0.2);
  const double forward = (lyapunov_point(gamma0 + 0.03).dimension - low.dimension) / 0.01;
  CHECK(forward > 1.0);

  CHECK_THROWS_AS(lyapunov_point(gamma0), window_error);
  CHECK_THROWS_AS(lyapunov_point(gamma0 + 1e-4), window_error);
}

TEST_CASE("lyapunov spectrum for large beta") {
  // The large-digit regime has lambda close to 2 xi, so F_beta tracks E_{beta/2}.
  const auto p30 = lyapunov_point(30.0);
  CHECK(p30.dimension > 0.5);
  CHECK(std::abs(p30.dimension - khintchine_point(15.0).dimension) < 1e-3);
  const auto p100 = lyapunov_point(100.0);
  CHECK(p100.dimension > 0.5);
  CHECK(p100.dimension < 0.56);
  CHECK(p100.dimension < p30.dimension);
}

TEST_CASE("lyapunov residuals through the two-variable system") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> beta_dist(gamma0 + 0.05, 30.0);
  const PressureModel model;
  for (int i = 0; i < 10; ++i) {
    const double beta = beta_dist(rng);
    const auto p = lyapunov_point(beta);
    INFO("beta = " << beta);
    CHECK(std::abs(p.residuals[0]) < 1e-8);
    CHECK(std::abs(p.residuals[1]) < 1e-8);
    const auto lp = lyapunov_pressure(model, p.dimension, p.q_value);
    CHECK(std::abs(lp.value - p.q_value * beta) < 1e-8);
    CHECK(std::abs(lp.dP1_dq - beta) < 1e-8);
    CHECK(p.dimension - p.q_value > 0.5);
    CHECK(p.dimension <= 1.0 + 1e-12);
  }
}

TEST_CASE("lyapunov routes agree") {
  for (double beta : verify::detail::log_grid(gamma0 + 0.06, 29.9, 6)) {
    INFO("beta = " << beta);
    const auto a = lyapunov_point(beta);
    const auto b = lyapunov_point_2d(beta);
    CHECK(std::abs(a.dimension - b.dimension) < 1e-8);
    CHECK(std::abs(a.q_value - b.q_value) < 1e-8);
  }
}

TEST_CASE("lyapunov shape report") {
  const auto& curve = lyapunov_40();
  CHECK(curve.failures.empty());
  const auto r = spectrum_shape_report(curve);
  CHECK(r.single_peak());
  CHECK(r.q_changes_at_peak());
  CHECK(std::abs(r.peak_exponent - lambda0) < 0.2);
  CHECK(r.curvature_at_peak < 0.0);
  CHECK(r.convexity_witness.has_value());
}

TEST_CASE("fast spectrum") {
  CHECK(fast_spectrum_dim(1.0) == 0.5);
  CHECK(fast_spectrum_dim(2.0) == Approx(1.0 / 3.0));
  CHECK(fast_spectrum_dim(1e6) < 2e-6);
  CHECK_THROWS_AS(fast_spectrum_dim(0.5), domain_error);
}

TEST_CASE("growth ratio") {
  std::vector<double> squares, powers, nlogn, linear;
  for (int n = 1; n <= 64; ++n) {
    squares.push_back(static_cast<double>(n) * n);
    powers.push_back(std::pow(3.0, n));
    nlogn.push_back((n + 1.0) * std::log(n + 1.0));
    linear.push_back(5.0 * n);
  }
  const auto sq = growth_ratio(squares);
  CHECK(std::abs(sq.estimate - 1.0) < 0.02);
  CHECK(sq.increments_increasing);
  const auto pw = growth_ratio(powers);
  CHECK(std::abs(pw.estimate - 3.0) < 1e-9);
  const auto nl = growth_ratio(nlogn);
  CHECK(nl.increments_increasing);
  CHECK(nl.diagnostics.empty());
  CHECK(std::abs(nl.estimate - 1.0) < 0.02);
  const auto lin = growth_ratio(linear);
  CHECK_FALSE(lin.increments_increasing);
  CHECK_FALSE(lin.diagnostics.empty());
  CHECK_THROWS_AS(growth_ratio(std::vector<double>(10, 1.0)), domain_error);
  auto bad = squares;
  bad[20] = bad[19];
  CHECK_THROWS_AS(growth_ratio(bad), domain_error);
}

TEST_CASE("cantor dimension examples") {
  const auto linear = [](std::uint64_t n) { return std::log(n + 2.0); };
  const auto doubly = [](std::uint64_t n) { return std::ldexp(1.0, static_cast<int>(n)) * std::numbers::ln2; };
  CHECK(std::abs(cantor_dimension(linear, 10000).value - 0.5) < 1e-3);
  const auto d = cantor_dimension(doubly, 40);
  CHECK(std::abs(d.value - 1.0 / 3.0) < 1e-3);
  CHECK(d.last_values.size() == 10);
  CHECK(d.horizon == 40);
  CHECK(d.argmin >= 20);
  // Direct evaluation of the closed form at the argmin.
  const double m = std::ldexp(1.0, static_cast<int>(d.argmin) + 1);
  CHECK(d.value == Approx((m - 2.0) / (2.0 * (m - 2.0) + m)).epsilon(1e-12));
}

TEST_CASE("cantor dimension stabilizes when the horizon doubles") {
  const auto doubly = [](std::uint64_t n) { return std::ldexp(1.0, static_cast<int>(n)) * std::numbers::ln2; };
  CHECK(std::abs(cantor_dimension(doubly, 40).value - cantor_dimension(doubly, 80).value) < 1e-6);
  // s_n = n + 2 converges like 1/(4N), so the doubling test needs N ~ 2^19.
  const auto linear = [](std::uint64_t n) { return std::log(n + 2.0); };
  CHECK(std::abs(cantor_dimension(linear, 1u << 19).value - cantor_dimension(linear, 1u << 20).value) < 1e-6);
}

TEST_CASE("cantor dimension agrees with the fast spectrum formula") {
  // s_n = 3 * 2^n: phi(n) = sum_{k<=n} log s_k grows quadratically, b = 1.
  const auto log_s = [](std::uint64_t n) { return std::log(3.0) + static_cast<double>(n) * std::numbers::ln2; };
  std::vector<double> phi;
  double acc = 0.0;
  for (std::uint64_t n = 1; n <= 4000; ++n) phi.push_back(acc += log_s(n));
  const auto b = growth_ratio(phi);
  CHECK(b.increments_increasing);
  const double cantor = cantor_dimension(log_s, 4000).value;
  CHECK(std::abs(cantor - fast_spectrum_dim(b.estimate)) < 1e-3);
}

TEST_CASE("cantor dimension rejects small s_n") {
  CHECK_THROWS_AS(cantor_dimension([](std::uint64_t) { return std::log(2.0); }, 64), domain_error);
  CHECK_THROWS_AS(cantor_dimension([](std::uint64_t n) { return std::log(n + 2.0); }, 16), domain_error);
}

TEST_CASE("bounded digit dimensions") {
  const double e2 = bounded_digit_dimension({1, 2});
  CHECK(std::abs(e2 - 0.5312805) < 1e-5);
  CHECK(std::abs(e2 - constants().dimE2_reference) < 1e-10);
  CHECK(bounded_digit_dimension({1}) == 0.0);
  const double e3 = bounded_digit_dimension({1, 2, 3});
  CHECK(e3 > 0.5313);
  CHECK(e3 < 1.0);
  CHECK(e2 < e3);
  CHECK(bounded_digit_dimension({1, 2, 3, 4}) > e3);
}
