#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace gauss_spectra {

/// Collocation grid on [0, 1]: K Chebyshev extrema x_j = (1 - cos(j pi/(K-1)))/2
/// in increasing order, with barycentric weights for the interpolant through
/// them. Also carries the first few Taylor coefficients at 0 of every Lagrange
/// basis polynomial, which the operator tail expansion needs.
class Discretization {
 public:
  static constexpr int kTaylorTerms = 24;

  explicit Discretization(int order = 16) : order_(order) {
    if (order < 4) throw domain_error("collocation order must be >= 4");
    const int last = order - 1;
    nodes_.resize(order);
    weights_.resize(order);
    for (int j = 0; j < order; ++j) {
      nodes_[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * j / last));
      weights_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == last) ? 0.5 : 1.0);
    }
    nodes_.front() = 0.0;
    nodes_.back() = 1.0;
    build_taylor();
  }

  int order() const noexcept { return order_; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  // Lagrange basis values l_m(y), m = 0..K-1.
  void basis_at(double y, std::span<double> out) const {
    double denom = 0.0;
    for (int j = 0; j < order_; ++j) {
      const double diff = y - nodes_[j];
      if (diff == 0.0) {
        for (int m = 0; m < order_; ++m) out[m] = (m == j) ? 1.0 : 0.0;
        return;
      }
      out[j] = weights_[j] / diff;
      denom += out[j];
    }
    for (int m = 0; m < order_; ++m) out[m] /= denom;
  }

  double interpolate(std::span<const double> values, double y) const {
    double num = 0.0;
    double denom = 0.0;
    for (int j = 0; j < order_; ++j) {
      const double diff = y - nodes_[j];
      if (diff == 0.0) return values[j];
      const double c = weights_[j] / diff;
      num += c * values[j];
      denom += c;
    }
    return num / denom;
  }

  // Taylor coefficient of y^k at y = 0 of basis polynomial m.
  double taylor(int k, int m) const noexcept { return taylor_[static_cast<std::size_t>(k) * order_ + m]; }

  // Taylor coefficients at 0 of the interpolant through `values`.
  std::vector<double> taylor_of(std::span<const double> values) const {
    std::vector<double> out(kTaylorTerms, 0.0);
    for (int k = 0; k < kTaylorTerms; ++k)
      for (int m = 0; m < order_; ++m) out[k] += taylor(k, m) * values[m];
    return out;
  }

 private:
  void build_taylor() {
    const int last = order_ - 1;
    // shifted[n][k]: coefficient of y^k in T_n(2y - 1); integer valued.
    std::vector<std::vector<double>> shifted(order_, std::vector<double>(kTaylorTerms, 0.0));
    shifted[0][0] = 1.0;
    if (order_ > 1) {
      shifted[1][0] = -1.0;
      shifted[1][1] = 2.0;
    }
    for (int n = 2; n < order_; ++n) {
      for (int k = 0; k < kTaylorTerms; ++k) {
        double v = -2.0 * shifted[n - 1][k] - shifted[n - 2][k];
        if (k > 0) v += 4.0 * shifted[n - 1][k - 1];
        shifted[n][k] = v;
      }
    }
    // Chebyshev coefficients of the interpolant: c = C f.
    std::vector<double> cheb(static_cast<std::size_t>(order_) * order_);
    for (int n = 0; n < order_; ++n) {
      const double half_n = (n == 0 || n == last) ? 0.5 : 1.0;
      for (int m = 0; m < order_; ++m) {
        const double half_m = (m == 0 || m == last) ? 0.5 : 1.0;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const double t_nm = sign * std::cos(std::numbers::pi * n * m / last);
        cheb[static_cast<std::size_t>(n) * order_ + m] = 2.0 / last * half_n * half_m * t_nm;
      }
    }
    taylor_.assign(static_cast<std::size_t>(kTaylorTerms) * order_, 0.0);
    for (int k = 0; k < kTaylorTerms; ++k)
      for (int n = 0; n < order_; ++n) {
        const double p = shifted[n][k];
        if (p == 0.0) continue;
        for (int m = 0; m < order_; ++m)
          taylor_[static_cast<std::size_t>(k) * order_ + m] += p * cheb[static_cast<std::size_t>(n) * order_ + m];
      }
  }

  int order_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> taylor_;
};

}  // namespace gauss_spectra
