#pragma once

// Ruelle operator of the Gauss system psi_i(x) = 1/(i+x) for the potential
// t log|psi_i'| + q log i:
//
//   (L g)(x) = sum_i i^q (i+x)^{-2t} g(1/(i+x)),   P(t,q) = log spectral radius.
//
// Discretization: collocation at Chebyshev extrema (see chebyshev.hpp) applied
// to the conjugated operator rho^{-1} L rho with rho(x) = (1 + theta x)^{-2t},
// theta = (sqrt5-1)/2, rescaled by e^{t gamma0}. Under that conjugation the
// i = 1 branch has constant weight theta^{2t}, so the eigenfunction stays flat
// when t is large. Digits i > M are summed analytically: with w = 1/i,
//
//   i^q (i+x+theta)^{-2t} f(1/(i+x)) = i^{-s} (1+(x+theta)w)^{-2t} F(w/(1+xw)),
//
// s = 2t - q, expanded in powers of w and summed term by term against Hurwitz
// zeta values zeta(s+n, M+1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cf_core.hpp"
#include "chebyshev.hpp"
#include "errors.hpp"
#include "special_fn.hpp"

namespace gauss_spectra {

struct PressureParams {
  double t = 1.0;
  double q = 0.0;
};

struct FullAlphabet {
  int cutoff = 64;
  bool tail_handling = true;
};

struct RestrictedAlphabet {
  std::vector<std::uint64_t> digits;
};

class Alphabet {
 public:
  static Alphabet full(int cutoff = 64, bool tail_handling = true) {
    if (cutoff < 8) throw domain_error("alphabet cutoff must be >= 8");
    return Alphabet(FullAlphabet{cutoff, tail_handling});
  }

  static Alphabet restricted(std::vector<std::uint64_t> digits) {
    if (digits.empty()) throw domain_error("restricted alphabet must be nonempty");
    std::sort(digits.begin(), digits.end());
    digits.erase(std::unique(digits.begin(), digits.end()), digits.end());
    if (digits.front() < 1) throw domain_error("alphabet digits must be >= 1");
    return Alphabet(RestrictedAlphabet{std::move(digits)});
  }

  bool is_full() const noexcept { return std::holds_alternative<FullAlphabet>(kind_); }
  bool has_tail() const noexcept { return is_full() && std::get<FullAlphabet>(kind_).tail_handling; }
  int cutoff() const noexcept { return is_full() ? std::get<FullAlphabet>(kind_).cutoff : 0; }

  // Digits summed explicitly.
  std::vector<std::uint64_t> explicit_digits() const {
    if (const auto* r = std::get_if<RestrictedAlphabet>(&kind_)) return r->digits;
    std::vector<std::uint64_t> out(static_cast<std::size_t>(cutoff()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i + 1;
    return out;
  }

  const std::variant<FullAlphabet, RestrictedAlphabet>& kind() const noexcept { return kind_; }

 private:
  explicit Alphabet(std::variant<FullAlphabet, RestrictedAlphabet> kind) : kind_(std::move(kind)) {}
  std::variant<FullAlphabet, RestrictedAlphabet> kind_;
};

struct OperatorSettings {
  double tolerance = 1e-13;
  int max_iterations = 10000;
  // smallest admitted 2t - q - 1 for alphabets with an infinite tail
  double domain_margin = 1e-4;
};

struct PressureResult {
  double value = 0.0;                        // P(t,q), nats
  std::vector<double> eigenfunction_values;  // h at the nodes, max normalized to 1
  std::vector<double> left_eigen_weights;    // nu at the nodes, sum nu_j h_j = 1
  double tail_error_bound = 0.0;
  int iterations = 0;
  double dP_dt = 0.0;  // Gibbs integral -int log|T'| dmu_{t,q}
  double dP_dq = 0.0;  // Gibbs integral  int log a1 dmu_{t,q}
};

inline void check_domain(const PressureParams& p, const Alphabet& alphabet, const OperatorSettings& settings = {}) {
  if (!std::isfinite(p.t) || !std::isfinite(p.q)) throw domain_error("pressure parameters must be finite");
  if (!alphabet.has_tail()) return;
  if (!(2.0 * p.t - p.q > 1.0 + settings.domain_margin)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "(t,q) = (" << p.t << ", " << p.q << ") outside D: 2t-q = " << 2.0 * p.t - p.q
        << " must exceed 1 + " << settings.domain_margin;
    throw domain_error(msg.str());
  }
}

namespace detail {

inline constexpr double kTheta = std::numbers::phi - 1.0;
inline constexpr int kTailTerms = Discretization::kTaylorTerms;

struct TailZeta {
  std::vector<HurwitzValue> values;  // zeta(s+n, M+1), n < kTailTerms
};

inline TailZeta tail_zeta(double s, int cutoff) {
  TailZeta z;
  z.values.reserve(kTailTerms);
  for (int n = 0; n < kTailTerms; ++n) z.values.push_back(hurwitz_zeta_with_log(s + n, cutoff + 1.0));
  return z;
}

// For every basis polynomial l_m, with Phi_m(w) = (1 + shift w)^{-two_t} l_m(w/(1+xw)):
//   value[m]   = sum_n Phi_m[n] zeta(s+n)
//   log_u[m]   = sum_n Phi_m[n] sum_u log u u^{-s-n}
//   log_fac[m] = sum_n (log(1 + shift w) Phi_m)[n] zeta(s+n)
//   last[m]    = |Phi_m[N-1]| zeta(s+N-1), size of the truncated term
struct TailRows {
  std::vector<double> value, log_u, log_fac, last;
};

inline TailRows tail_rows(double x, double shift, double two_t, const Discretization& disc, const TailZeta& zeta,
                          bool want_log_fac) {
  const int K = disc.order();
  constexpr int N = kTailTerms;
  // (1 + shift w)^{-two_t}
  std::vector<double> e(N);
  e[0] = 1.0;
  for (int n = 1; n < N; ++n) e[n] = e[n - 1] * (-two_t - (n - 1)) / n * shift;
  // log(1 + shift w)
  std::vector<double> lg(N, 0.0);
  for (int n = 1, sign = 1; n < N; ++n, sign = -sign) lg[n] = sign * std::pow(shift, n) / n;
  // w^k (1+xw)^{-k}: coefficient of w^n is binom(-k, n-k) x^{n-k}
  std::vector<double> b(static_cast<std::size_t>(N) * N, 0.0);
  b[0] = 1.0;
  for (int k = 1; k < N; ++k) {
    double c = 1.0;
    for (int n = k; n < N; ++n) {
      b[static_cast<std::size_t>(k) * N + n] = c;
      const int j = n - k;
      c *= (-static_cast<double>(k) - j) / (j + 1) * x;
    }
  }

  TailRows rows;
  rows.value.assign(K, 0.0);
  rows.log_u.assign(K, 0.0);
  rows.log_fac.assign(K, 0.0);
  rows.last.assign(K, 0.0);
  std::vector<double> sm(N), phi(N), psi(N);
  for (int m = 0; m < K; ++m) {
    std::fill(sm.begin(), sm.end(), 0.0);
    for (int k = 0; k < N; ++k) {
      const double d = disc.taylor(k, m);
      if (d == 0.0) continue;
      for (int n = k; n < N; ++n) sm[n] += d * b[static_cast<std::size_t>(k) * N + n];
    }
    for (int n = 0; n < N; ++n) {
      double acc = 0.0;
      for (int j = 0; j <= n; ++j) acc += e[j] * sm[n - j];
      phi[n] = acc;
    }
    double value = 0.0, log_u = 0.0, log_fac = 0.0;
    for (int n = 0; n < N; ++n) {
      value += phi[n] * zeta.values[n].zeta;
      log_u += phi[n] * zeta.values[n].log_moment;
    }
    if (want_log_fac) {
      for (int n = 0; n < N; ++n) {
        double acc = 0.0;
        for (int j = 1; j <= n; ++j) acc += lg[j] * phi[n - j];
        psi[n] = acc;
        log_fac += psi[n] * zeta.values[n].zeta;
      }
    }
    rows.value[m] = value;
    rows.log_u[m] = log_u;
    rows.log_fac[m] = log_fac;
    rows.last[m] = std::abs(phi[N - 1]) * zeta.values[N - 1].zeta;
  }
  return rows;
}

// Conjugated, rescaled collocation matrix and its t/q derivatives (row-major,
// row = node, column = basis polynomial).
struct CollocationMatrix {
  int order = 0;
  std::vector<double> a, a_t, a_q;
  std::vector<double> rho;  // (1 + theta x_j)^{-2t}
  std::vector<double> tail_size;
};

inline CollocationMatrix build_matrix(const PressureParams& p, const Alphabet& alphabet, const Discretization& disc) {
  const int K = disc.order();
  const double gamma0 = golden_constant();
  const auto digits = alphabet.explicit_digits();
  const auto nodes = disc.nodes();
  const double s = 2.0 * p.t - p.q;
  const bool tail = alphabet.has_tail();
  const TailZeta zeta = tail ? tail_zeta(s, alphabet.cutoff()) : TailZeta{};

  CollocationMatrix mat;
  mat.order = K;
  const std::size_t size = static_cast<std::size_t>(K) * K;
  mat.a.assign(size, 0.0);
  mat.a_t.assign(size, 0.0);
  mat.a_q.assign(size, 0.0);
  mat.rho.resize(K);
  mat.tail_size.assign(K, 0.0);

  std::vector<double> basis(K);
  for (int j = 0; j < K; ++j) {
    const double x = nodes[j];
    const double log_conj = std::log1p(kTheta * x);
    mat.rho[j] = std::exp(-2.0 * p.t * log_conj);
    double* row = &mat.a[static_cast<std::size_t>(j) * K];
    double* row_t = &mat.a_t[static_cast<std::size_t>(j) * K];
    double* row_q = &mat.a_q[static_cast<std::size_t>(j) * K];
    for (const auto digit : digits) {
      const double i = static_cast<double>(digit);
      const double log_i = std::log(i);
      const double log_ratio = std::log(i + x + kTheta) - log_conj;
      const double weight = std::exp(p.q * log_i - 2.0 * p.t * log_ratio + p.t * gamma0);
      if (weight == 0.0) continue;
      disc.basis_at(1.0 / (i + x), basis);
      const double dt = -2.0 * log_ratio + gamma0;
      for (int m = 0; m < K; ++m) {
        const double v = weight * basis[m];
        row[m] += v;
        row_t[m] += v * dt;
        row_q[m] += v * log_i;
      }
    }
    if (tail) {
      const double pref = std::exp(p.t * gamma0 + 2.0 * p.t * log_conj);
      const auto rows = tail_rows(x, x + kTheta, 2.0 * p.t, disc, zeta, true);
      const double dpref = gamma0 + 2.0 * log_conj;
      for (int m = 0; m < K; ++m) {
        const double v = pref * rows.value[m];
        row[m] += v;
        row_q[m] += pref * rows.log_u[m];
        row_t[m] += dpref * v - 2.0 * pref * (rows.log_u[m] + rows.log_fac[m]);
        mat.tail_size[j] += pref * rows.last[m];
      }
    }
  }
  return mat;
}

struct PowerResult {
  double eigenvalue = 0.0;
  std::vector<double> vector;
  int iterations = 0;
};

// Dominant eigenpair by power iteration from the positive vector, sup-norm
// normalized; `transpose` iterates with A^T.
inline PowerResult power_iteration(const std::vector<double>& a, int K, bool transpose,
                                   const OperatorSettings& settings) {
  std::vector<double> v(K, 1.0), w(K);
  double lambda = 0.0;
  const double vector_tol = std::max(settings.tolerance, 1e-15) * 100.0;
  for (int it = 1; it <= settings.max_iterations; ++it) {
    for (int r = 0; r < K; ++r) {
      double acc = 0.0;
      for (int c = 0; c < K; ++c)
        acc += (transpose ? a[static_cast<std::size_t>(c) * K + r] : a[static_cast<std::size_t>(r) * K + c]) * v[c];
      w[r] = acc;
    }
    double norm = 0.0;
    for (double x : w)
      if (std::abs(x) > std::abs(norm)) norm = x;
    if (!(norm != 0.0) || !std::isfinite(norm)) throw non_convergence("power iteration collapsed to zero");
    double change = 0.0;
    for (int r = 0; r < K; ++r) {
      w[r] /= norm;
      change = std::max(change, std::abs(w[r] - v[r]));
    }
    const double lambda_change = std::abs(norm - lambda);
    lambda = norm;
    v.swap(w);
    if (lambda_change <= settings.tolerance * std::abs(lambda) && change <= vector_tol)
      return {lambda, v, it};
  }
  throw non_convergence("power iteration did not converge in " + std::to_string(settings.max_iterations) +
                        " iterations");
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double bilinear(const std::vector<double>& left, const std::vector<double>& m, const std::vector<double>& right,
                       int K) {
  double acc = 0.0;
  for (int r = 0; r < K; ++r) {
    double row = 0.0;
    for (int c = 0; c < K; ++c) row += m[static_cast<std::size_t>(r) * K + c] * right[c];
    acc += left[r] * row;
  }
  return acc;
}

// Conjugated eigendata shared by pressure() and gibbs().
struct Eigendata {
  PressureResult result;
  std::vector<double> conj_right;  // eigenvector of the conjugated matrix
  double scaled_eigenvalue = 0.0;  // e^{P + t gamma0}
};

inline Eigendata solve_eigen(const PressureParams& p, const Alphabet& alphabet, const Discretization& disc,
                             const OperatorSettings& settings) {
  check_domain(p, alphabet, settings);
  const int K = disc.order();
  const auto mat = build_matrix(p, alphabet, disc);
  const auto right = power_iteration(mat.a, K, false, settings);
  const auto left = power_iteration(mat.a, K, true, settings);
  const double lambda = right.eigenvalue;
  if (!(lambda > 0.0)) throw non_convergence("dominant eigenvalue is not positive");

  Eigendata out;
  out.scaled_eigenvalue = lambda;
  out.conj_right = right.vector;
  auto& res = out.result;
  res.value = std::log(lambda) - p.t * golden_constant();
  res.iterations = right.iterations + left.iterations;

  const double norm = dot(left.vector, right.vector);
  res.dP_dq = bilinear(left.vector, mat.a_q, right.vector, K) / (lambda * norm);
  res.dP_dt = bilinear(left.vector, mat.a_t, right.vector, K) / (lambda * norm) - golden_constant();

  res.eigenfunction_values.resize(K);
  res.left_eigen_weights.resize(K);
  double h_max = 0.0;
  for (int j = 0; j < K; ++j) {
    res.eigenfunction_values[j] = mat.rho[j] * right.vector[j];
    h_max = std::max(h_max, std::abs(res.eigenfunction_values[j]));
  }
  for (int j = 0; j < K; ++j) {
    res.eigenfunction_values[j] /= h_max;
    res.left_eigen_weights[j] = left.vector[j] / mat.rho[j];
  }
  const double pairing = dot(res.left_eigen_weights, res.eigenfunction_values);
  for (auto& v : res.left_eigen_weights) v /= pairing;

  double tail_rel = 0.0;
  for (int j = 0; j < K; ++j) tail_rel = std::max(tail_rel, mat.tail_size[j] / lambda);
  res.tail_error_bound = tail_rel;
  return out;
}

}  // namespace detail

/// (L g)(x_j) at every node for the unconjugated operator, g given by its node
/// values and interpolated off-node.
inline std::vector<double> apply_operator(const PressureParams& p, const Alphabet& alphabet, const Discretization& disc,
                                          std::span<const double> g, const OperatorSettings& settings = {}) {
  check_domain(p, alphabet, settings);
  const int K = disc.order();
  if (static_cast<int>(g.size()) != K) throw domain_error("apply_operator: node value count must equal K");
  const auto digits = alphabet.explicit_digits();
  const auto nodes = disc.nodes();
  const bool tail = alphabet.has_tail();
  const auto zeta = tail ? detail::tail_zeta(2.0 * p.t - p.q, alphabet.cutoff()) : detail::TailZeta{};

  std::vector<double> out(K, 0.0);
  for (int j = 0; j < K; ++j) {
    const double x = nodes[j];
    double acc = 0.0;
    for (const auto digit : digits) {
      const double i = static_cast<double>(digit);
      acc += std::exp(p.q * std::log(i) - 2.0 * p.t * std::log(i + x)) * disc.interpolate(g, 1.0 / (i + x));
    }
    if (tail) {
      const auto rows = detail::tail_rows(x, x, 2.0 * p.t, disc, zeta, false);
      acc += detail::dot(rows.value, g);
    }
    out[j] = acc;
  }
  return out;
}

inline PressureResult pressure(const PressureParams& p, const Alphabet& alphabet, const Discretization& disc,
                               const OperatorSettings& settings = {}) {
  return detail::solve_eigen(p, alphabet, disc, settings).result;
}

inline PressureResult pressure_1d(double t, const Alphabet& alphabet, const Discretization& disc,
                                  const OperatorSettings& settings = {}) {
  return pressure({t, 0.0}, alphabet, disc, settings);
}

inline double dP_dq(const PressureParams& p, const Alphabet& alphabet, const Discretization& disc,
                    const OperatorSettings& settings = {}) {
  return pressure(p, alphabet, disc, settings).dP_dq;
}

inline double dP_dt(const PressureParams& p, const Alphabet& alphabet, const Discretization& disc,
                    const OperatorSettings& settings = {}) {
  return pressure(p, alphabet, disc, settings).dP_dt;
}

struct DerivativeCheck {
  double gibbs_dt = 0.0, fd_dt = 0.0;
  double gibbs_dq = 0.0, fd_dq = 0.0;
  double max_deviation() const { return std::max(std::abs(gibbs_dt - fd_dt), std::abs(gibbs_dq - fd_dq)); }
};

/// Gibbs-integral derivatives against central differences of the pressure
/// with step h_fd. Throws consistency_error above `tolerance` when asked to.
inline DerivativeCheck checked_derivatives(const PressureParams& p, const Alphabet& alphabet,
                                           const Discretization& disc, double h_fd = 1e-5, double tolerance = 1e-4,
                                           bool throw_on_mismatch = false, const OperatorSettings& settings = {}) {
  const auto base = pressure(p, alphabet, disc, settings);
  const auto at = [&](double t, double q) { return pressure({t, q}, alphabet, disc, settings).value; };
  DerivativeCheck c;
  c.gibbs_dt = base.dP_dt;
  c.gibbs_dq = base.dP_dq;
  c.fd_dt = (at(p.t + h_fd, p.q) - at(p.t - h_fd, p.q)) / (2.0 * h_fd);
  c.fd_dq = (at(p.t, p.q + h_fd) - at(p.t, p.q - h_fd)) / (2.0 * h_fd);
  if (throw_on_mismatch && c.max_deviation() > tolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "Gibbs derivative mismatch at (" << p.t << ", " << p.q << "): dt " << c.gibbs_dt << " vs " << c.fd_dt
        << ", dq " << c.gibbs_dq << " vs " << c.fd_dq;
    throw consistency_error(msg.str());
  }
  return c;
}

/// Discrete Gibbs state: pressure plus the conjugated eigenfunction, enough to
/// evaluate the digit law p(i|x) = e^{-P} i^q (i+x)^{-2t} h(1/(i+x)) / h(x) at
/// any x in [0,1].
class GibbsApprox {
 public:
  GibbsApprox(const PressureParams& params, Alphabet alphabet, Discretization disc,
              const OperatorSettings& settings = {})
      : params_(params), alphabet_(std::move(alphabet)), disc_(std::move(disc)) {
    auto eig = detail::solve_eigen(params_, alphabet_, disc_, settings);
    result_ = std::move(eig.result);
    conj_ = std::move(eig.conj_right);
    scaled_eigenvalue_ = eig.scaled_eigenvalue;
    h_scale_ = result_.eigenfunction_values[0] / conj_[0];  // rho(0) = 1
    digits_ = alphabet_.explicit_digits();
    if (alphabet_.has_tail()) zeta_ = detail::tail_zeta(2.0 * params_.t - params_.q, alphabet_.cutoff());
  }

  const PressureParams& params() const noexcept { return params_; }
  double pressure() const noexcept { return result_.value; }
  const PressureResult& result() const noexcept { return result_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const Discretization& discretization() const noexcept { return disc_; }
  std::span<const std::uint64_t> explicit_digits() const noexcept { return digits_; }

  // Eigenfunction h, normalized to max 1 over the nodes.
  double eigenfunction(double x) const {
    const double rho = std::exp(-2.0 * params_.t * std::log1p(detail::kTheta * x));
    return rho * disc_.interpolate(conj_, x) * h_scale_;
  }

  struct DigitLaw {
    std::vector<double> explicit_probabilities;  // p(i|x) for explicit_digits()
    double tail_probability = 0.0;               // total mass of digits > M
    double total = 0.0;                          // sum of all, 1 up to discretization error
  };

  DigitLaw digit_law(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("digit_law requires 0 <= x <= 1");
    const double gamma0 = golden_constant();
    const double log_conj = std::log1p(detail::kTheta * x);
    const double fx = disc_.interpolate(conj_, x);
    const double scale = 1.0 / (scaled_eigenvalue_ * fx);
    DigitLaw law;
    law.explicit_probabilities.reserve(digits_.size());
    for (const auto digit : digits_) {
      const double i = static_cast<double>(digit);
      const double weight =
          std::exp(params_.q * std::log(i) - 2.0 * params_.t * (std::log(i + x + detail::kTheta) - log_conj) +
                   params_.t * gamma0);
      const double prob = weight == 0.0 ? 0.0 : weight * disc_.interpolate(conj_, 1.0 / (i + x)) * scale;
      law.explicit_probabilities.push_back(prob);
      law.total += prob;
    }
    if (alphabet_.has_tail()) {
      const double pref = std::exp(params_.t * gamma0 + 2.0 * params_.t * log_conj);
      const auto rows = detail::tail_rows(x, x + detail::kTheta, 2.0 * params_.t, disc_, zeta_, false);
      law.tail_probability = pref * detail::dot(rows.value, conj_) * scale;
      law.total += law.tail_probability;
    }
    return law;
  }

  // p(i|x) for the k-th explicit digit.
  double probability(std::size_t k, double x) const {
    const double i = static_cast<double>(digits_[k]);
    const double log_conj = std::log1p(detail::kTheta * x);
    const double weight = std::exp(params_.q * std::log(i) -
                                   2.0 * params_.t * (std::log(i + x + detail::kTheta) - log_conj) +
                                   params_.t * golden_constant());
    if (weight == 0.0) return 0.0;
    return weight * disc_.interpolate(conj_, 1.0 / (i + x)) / (scaled_eigenvalue_ * disc_.interpolate(conj_, x));
  }

  // Stationary mass of digit i under the discrete Gibbs measure mu = h nu.
  double digit_mass(std::uint64_t digit) const {
    const auto nodes = disc_.nodes();
    const auto it = std::find(digits_.begin(), digits_.end(), digit);
    if (it == digits_.end()) throw domain_error("digit_mass: digit not summed explicitly");
    const auto index = static_cast<std::size_t>(it - digits_.begin());
    double acc = 0.0;
    for (int j = 0; j < disc_.order(); ++j) {
      const double mu_j = result_.left_eigen_weights[j] * result_.eigenfunction_values[j];
      acc += mu_j * digit_law(nodes[j]).explicit_probabilities[index];
    }
    return acc;
  }

 private:
  PressureParams params_;
  Alphabet alphabet_;
  Discretization disc_;
  PressureResult result_;
  std::vector<double> conj_;
  double scaled_eigenvalue_ = 0.0;
  double h_scale_ = 1.0;
  std::vector<std::uint64_t> digits_;
  detail::TailZeta zeta_;
};

inline GibbsApprox gibbs(const PressureParams& p, const Alphabet& alphabet, const Discretization& disc,
                         const OperatorSettings& settings = {}) {
  return GibbsApprox(p, alphabet, disc, settings);
}

/// Markov chain x -> 1/(i + x) with digit law p(i|x). Keeps its own PRNG, so
/// one sampler must not be shared between threads mid-stream.
class DigitSampler {
 public:
  DigitSampler(const GibbsApprox& gibbs, std::uint64_t seed, int burn_in = 64)
      : gibbs_(&gibbs), rng_(seed), x_(0.5) {
    for (int i = 0; i < burn_in; ++i) step();
  }

  BigInt next() { return step(); }

  double state() const noexcept { return x_; }

 private:
  double uniform() {
    // 53 random bits, identical on every standard library
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  BigInt step() {
    // inverse-CDF walk; the law sums to 1 up to discretization error, so the
    // walk stops early and the tail mass is evaluated only when reached
    const double target = uniform();
    double acc = 0.0;
    const auto digits = gibbs_->explicit_digits();
    for (std::size_t k = 0; k < digits.size(); ++k) {
      acc += gibbs_->probability(k, x_);
      if (target < acc) return advance(static_cast<double>(digits[k]), BigInt(digits[k]));
    }
    if (gibbs_->alphabet().has_tail()) {
      // P(i >= k) ~ (k - 1/2)^{1-s}: inverse power law above the cutoff
      const double s = 2.0 * gibbs_->params().t - gibbs_->params().q;
      const double start = gibbs_->alphabet().cutoff() + 0.5;
      const double v = 1.0 - uniform();
      const double u = start * std::exp(-std::log(v) / (s - 1.0));
      const double capped = std::min(u + 0.5, 1e300);
      BigInt digit(std::floor(capped));
      if (digit <= gibbs_->alphabet().cutoff()) digit = gibbs_->alphabet().cutoff() + 1;
      return advance(std::floor(capped), std::move(digit));
    }
    // rounding left the target just past the last explicit digit
    return advance(static_cast<double>(digits.back()), BigInt(digits.back()));
  }

  BigInt advance(double i, BigInt digit) {
    x_ = 1.0 / (i + x_);
    return digit;
  }

  const GibbsApprox* gibbs_;
  std::mt19937_64 rng_;
  double x_;
};

inline PartialQuotients sample_digits(const GibbsApprox& g, std::size_t length, std::uint64_t seed) {
  if (length == 0) throw domain_error("sample_digits requires length >= 1");
  DigitSampler sampler(g, seed);
  std::vector<BigInt> digits;
  digits.reserve(length);
  for (std::size_t i = 0; i < length; ++i) digits.push_back(sampler.next());
  return PartialQuotients(std::move(digits));
}

}  // namespace gauss_spectra
