#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gauss_spectra/cf_core.hpp>
#include <gauss_spectra/special_fn.hpp>

using namespace gauss_spectra;
using Catch::Approx;

namespace {

const double theta0 = std::numbers::phi - 1.0;
const double gamma0 = 2.0 * std::log(std::numbers::phi);

std::vector<BigInt> random_digits(std::mt19937_64& rng, std::size_t n, std::uint64_t max_digit) {
  std::uniform_int_distribution<std::uint64_t> d(1, max_digit);
  std::vector<BigInt> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(d(rng));
  return out;
}

// Uniform rational in (0,1) with a `bits`-bit denominator.
Rational random_rational(std::mt19937_64& rng, std::size_t bits) {
  BigInt num = 0;
  for (std::size_t i = 0; i < bits / 64; ++i) num = (num << 64) | BigInt(rng());
  BigInt den = BigInt(1) << static_cast<unsigned>(bits);
  if (num == 0) num = 1;
  return Rational(num, den);
}

// log |(T^n)'(x)| = -2 sum_{j<n} log T^j x, with T^j x exact.
double log_derivative(Rational x, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s += -2.0 * std::log(x.convert_to<double>());
    x = gauss_map(x);
  }
  return s;
}

}  // namespace

TEST_CASE("gauss_map examples") {
  CHECK(gauss_map(0.5) == 0.0);
  CHECK(gauss_map(theta0) == Approx(theta0).margin(1e-15));
  CHECK(gauss_map(Rational(7, 10)) == Rational(3, 7));
  CHECK(gauss_map(0.7) == Approx(3.0 / 7.0).margin(1e-15));
  CHECK(gauss_map(0.0) == 0.0);
  CHECK_THROWS_AS(gauss_map(1.0), domain_error);
  CHECK_THROWS_AS(gauss_map(-0.1), domain_error);
  CHECK_THROWS_AS(gauss_map(Rational(1)), domain_error);
}

TEST_CASE("expand examples") {
  CHECK(expand(theta0, 5) == PartialQuotients{1, 1, 1, 1, 1});
  CHECK(expand(std::numbers::pi - 3.0, 3) == PartialQuotients{7, 15, 1});
  CHECK(expand(Rational(2, 5), 2) == PartialQuotients{2, 2});
  CHECK_THROWS_AS(expand(Rational(2, 5), 3), expansion_terminated);
  CHECK_THROWS_AS(expand(0.0, 1), domain_error);
  CHECK_THROWS_AS(expand(0.5, 0), domain_error);
}

TEST_CASE("expand of a double stops before digits become unreliable") {
  // A double carries about 53 bits; the golden mean's q_n reaches 2^26.5 near n = 38.
  CHECK_THROWS_AS(expand(theta0, 60), precision_exhausted);
  const auto digits = [] {
    for (std::size_t depth = 60; depth > 0; --depth) {
      try {
        return expand(theta0, depth);
      } catch (const precision_exhausted&) {
      }
    }
    return PartialQuotients{1};
  }();
  CHECK(digits.size() >= 30);
  for (const auto& d : digits) CHECK(d == 1);
  // The reconstructed value lies inside the cylinder and reproduces the double.
  CHECK(std::abs(evaluate(digits).convert_to<double>() - theta0) < 1e-15);
}

TEST_CASE("expanded digits place x in their cylinder") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Rational x = random_rational(rng, 256);
    const auto digits = expand(x, 20);
    const auto c = cylinder(digits);
    CHECK(x > c.left_endpoint);
    CHECK(x <= c.right_endpoint);
  }
}

TEST_CASE("continuant examples") {
  CHECK(continuant(PartialQuotients{1, 1, 1}) == 3);
  CHECK(continuant(PartialQuotients{1, 2, 3}) == 10);
  CHECK(continuant(PartialQuotients{3, 2, 1}) == 10);
}

TEST_CASE("continuant mirror symmetry") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> len(1, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const PartialQuotients d(random_digits(rng, len(rng), 1000));
    CHECK(continuant(d) == continuant(d.reversed()));
  }
}

TEST_CASE("convergents examples") {
  const auto fib = convergents(PartialQuotients{1, 1, 1, 1, 1});
  const std::vector<int> expected_q = {1, 2, 3, 5, 8};
  REQUIRE(fib.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(fib[i].q == expected_q[i]);

  const auto c = convergents(PartialQuotients{2, 2});
  CHECK(c[0].p == 1);
  CHECK(c[0].q == 2);
  CHECK(c[1].p == 2);
  CHECK(c[1].q == 5);
}

TEST_CASE("convergent identities on random digits") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> len(1, 40);
  for (int trial = 0; trial < 200; ++trial) {
    const PartialQuotients d(random_digits(rng, len(rng), trial % 2 ? 5 : 100000));
    const auto conv = convergents(d);
    BigInt p_prev = 0, q_prev = 1;
    BigInt lower = 1, upper = 1;
    for (std::size_t n = 1; n <= conv.size(); ++n) {
      const auto& [p, q] = conv[n - 1];
      CHECK(p_prev * q - p * q_prev == (n % 2 ? -1 : 1));
      lower *= d[n - 1];
      upper *= d[n - 1] + 1;
      CHECK(lower <= q);
      CHECK(q <= upper);
      CHECK(2.0 * log_of(q) >= (static_cast<double>(n) - 1.0) * std::numbers::ln2 - 1e-12);
      p_prev = p;
      q_prev = q;
    }
    CHECK(continuant(d) == conv.back().q);
    CHECK(Rational(conv.back().p, conv.back().q) == evaluate(d));
  }
}

TEST_CASE("insertion bound") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(1, 25);
  std::uniform_int_distribution<std::uint64_t> digit(1, 500);
  for (int trial = 0; trial < 300; ++trial) {
    auto base = random_digits(rng, len(rng), 50);
    const BigInt q = continuant(base);
    const std::uint64_t b = digit(rng);
    std::uniform_int_distribution<std::size_t> pos(0, base.size());
    auto inserted = base;
    inserted.insert(inserted.begin() + static_cast<std::ptrdiff_t>(pos(rng)), BigInt(b));
    const BigInt q_ins = continuant(inserted);
    // (b+1)/2 <= q_ins/q <= b+1, cross-multiplied.
    CHECK(BigInt(b + 1) * q <= 2 * q_ins);
    CHECK(q_ins <= BigInt(b + 1) * q);
  }
}

TEST_CASE("cylinder examples") {
  for (std::uint64_t a : {1, 2, 7, 1000}) {
    const auto c = cylinder(PartialQuotients{a});
    CHECK(c.length == Rational(BigInt(1), BigInt(a * (a + 1))));
  }
  const auto c11 = cylinder(PartialQuotients{1, 1});
  CHECK(c11.left_endpoint == Rational(1, 2));
  CHECK(c11.right_endpoint == Rational(2, 3));
  CHECK(c11.length == Rational(1, 6));
  const auto c2 = cylinder(PartialQuotients{2});
  CHECK(c2.left_endpoint == Rational(1, 3));
  CHECK(c2.right_endpoint == Rational(1, 2));
}

TEST_CASE("cylinder length equals endpoint distance and contains the value") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const PartialQuotients d(random_digits(rng, 1 + trial % 15, 30));
    const auto c = cylinder(d);
    CHECK(c.right_endpoint - c.left_endpoint == c.length);
    const Rational v = evaluate(d);
    CHECK(v >= c.left_endpoint);
    CHECK(v <= c.right_endpoint);
  }
}

TEST_CASE("Jacobian bound and Lyapunov as growth of q_n") {
  const double K = std::exp(4.0);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Rational x = random_rational(rng, 512);
    for (std::size_t n : {1u, 5u, 17u, 30u}) {
      const auto conv = convergents(expand(x, n));
      const double log_q = log_of(conv.back().q);
      const double log_dt = log_derivative(x, n);
      const double log_ratio = 2.0 * log_q - log_dt;  // log(q_n^2 / |(T^n)'|)
      CHECK(log_ratio >= -std::log(2.0 * K));
      CHECK(log_ratio <= std::log(K));
      CHECK(std::abs(log_dt / n - 2.0 * log_q / n) <= std::log(2.0 * K) / n);
    }
  }
}

TEST_CASE("exponent_estimates examples") {
  const auto golden = exponent_estimates(PartialQuotients(std::vector<BigInt>(200, BigInt(1))));
  CHECK(golden.khintchine_estimate == 0.0);
  CHECK(golden.lyapunov_estimate == Approx(gamma0).margin(1e-12));

  const auto twos = exponent_estimates(PartialQuotients(std::vector<BigInt>(50, BigInt(2))));
  CHECK(twos.khintchine_estimate == Approx(std::log(2.0)).margin(1e-15));
  // x = sqrt2 - 1; the default tail point costs O(1/n), the true one is exact.
  const double silver = 2.0 * std::log(1.0 + std::sqrt(2.0));
  CHECK(twos.lyapunov_estimate == Approx(silver).margin(0.01));
  const auto exact = exponent_estimates(PartialQuotients(std::vector<BigInt>(50, BigInt(2))), std::sqrt(2.0) - 1.0);
  CHECK(exact.lyapunov_estimate == Approx(silver).margin(1e-12));

  const auto from_double = exponent_estimates(theta0, 20);
  CHECK(from_double.khintchine_estimate == 0.0);
  CHECK(from_double.lyapunov_estimate == Approx(gamma0).margin(1e-12));

  CHECK_THROWS_AS(exponent_estimates(Rational(2, 5), 3), expansion_terminated);
}

TEST_CASE("exponent_estimates of a rational agree with the exact derivative") {
  std::mt19937_64 rng(6);
  const Rational x = random_rational(rng, 1024);
  const auto stats = exponent_estimates(x, 40);
  CHECK(stats.sum_log_deriv == Approx(log_derivative(x, 40)).epsilon(1e-12));
}

TEST_CASE("random uniform x has Khintchine estimate near the Khintchine exponent") {
  const double xi0 = constants().xi0;
  std::mt19937_64 rng(7);
  int close = 0;
  const int trials = 5;
  for (int trial = 0; trial < trials; ++trial) {
    const auto digits = expand(random_rational(rng, 24000), 10000);
    const auto stats = exponent_estimates(digits);
    if (std::abs(stats.khintchine_estimate - xi0) < 0.15) ++close;
    CHECK(stats.khintchine_estimate >= 0.0);
    CHECK(stats.lyapunov_estimate >= gamma0);
    // Typical Lyapunov exponent pi^2/(6 log 2).
    CHECK(stats.lyapunov_estimate == Approx(constants().lambda0).margin(0.1));
  }
  CHECK(close >= trials - 1);
}

TEST_CASE("construct_point examples") {
  auto zero = construct_point(0.0);
  const auto d0 = zero.take(500);
  for (const auto& d : d0) CHECK(d == 1);

  auto ln2 = construct_point(std::log(2.0));
  const auto s = exponent_estimates(ln2.take(10000));
  CHECK(std::abs(s.khintchine_estimate - std::log(2.0)) < 0.05);

  auto one = construct_point(1.0);
  const auto s1 = exponent_estimates(one.take(10000));
  CHECK(std::abs(s1.lyapunov_estimate - (2.0 + gamma0)) < 0.05);
  CHECK(one.position() == 10000);

  CHECK_THROWS_AS(construct_point(-1.0), domain_error);
}

TEST_CASE("construct_point digits sit in the prescribed window") {
  const double xi = 1.7;
  auto gen = construct_point(xi);
  std::uint64_t prev_end = 0;
  for (std::uint64_t n = 1; n <= 400; ++n) {
    const BigInt d = gen.next();
    const std::uint64_t k = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    if (k * k == n) {
      const double y = static_cast<double>(n - prev_end) * xi;
      CHECK(log_of(d) >= y - 1e-12);
      CHECK(log_of(d - 1) <= y + 1e-12);
      prev_end = n;
    } else {
      CHECK(d == 1);
    }
  }
}

TEST_CASE("gauss_density") {
  CHECK(gauss_density(0.0) == Approx(1.0 / std::numbers::ln2));
  CHECK(gauss_density(1.0) == Approx(1.0 / (2.0 * std::numbers::ln2)));
  CHECK_THROWS_AS(gauss_density(1.5), domain_error);
  // Simpson on a fine grid.
  const int n = 2000;
  double s = gauss_density(0.0) + gauss_density(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * gauss_density(static_cast<double>(i) / n);
  CHECK(std::abs(s / (3.0 * n) - 1.0) < 1e-10);
}

TEST_CASE("partial quotients validation") {
  CHECK_THROWS_AS(PartialQuotients(std::vector<BigInt>{}), domain_error);
  CHECK_THROWS_AS(PartialQuotients({1, 0, 2}), domain_error);
  CHECK_THROWS_AS(log_of(BigInt(0)), domain_error);
  CHECK(log_of(BigInt(1) << 5000) == Approx(5000 * std::numbers::ln2));
}
