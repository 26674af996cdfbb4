#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "polyschwarz/errors.hpp"

namespace polyschwarz {

/// Truncated Taylor jet of order 3 for a holomorphic function of n complex
/// variables: value, gradient, Hessian and third derivatives at one point.
/// Symmetric coefficients are stored once (i <= j, resp. i <= j <= k);
/// accessors sort indices, so callers never deal with packing.
class Jet3 {
 public:
  using cx = std::complex<double>;

  explicit Jet3(int n)
      : n_(n),
        grad_(static_cast<std::size_t>(n)),
        hess_(static_cast<std::size_t>(n) * (n + 1) / 2),
        third_(static_cast<std::size_t>(n) * (n + 1) * (n + 2) / 6) {
    if (n < 1) throw precondition_error("Jet3: dimension must be >= 1");
  }

  static Jet3 constant(int n, cx value) {
    Jet3 j(n);
    j.value = value;
    return j;
  }

  /// Jet of the coordinate function z_index at a point with that coordinate
  /// equal to `value`.
  static Jet3 variable(int n, int index, cx value) {
    Jet3 j(n);
    j.value = value;
    j.grad(index) = 1.0;
    return j;
  }

  int dim() const { return n_; }

  cx value{};

  cx& grad(int i) { return grad_[static_cast<std::size_t>(i)]; }
  const cx& grad(int i) const { return grad_[static_cast<std::size_t>(i)]; }

  cx& hess(int i, int j) { return hess_[hess_index(i, j)]; }
  const cx& hess(int i, int j) const { return hess_[hess_index(i, j)]; }

  cx& third(int i, int j, int k) { return third_[third_index(i, j, k)]; }
  const cx& third(int i, int j, int k) const { return third_[third_index(i, j, k)]; }

  Jet3& operator+=(const Jet3& o) {
    check_dim(o);
    value += o.value;
    for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] += o.grad_[i];
    for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] += o.hess_[i];
    for (std::size_t i = 0; i < third_.size(); ++i) third_[i] += o.third_[i];
    return *this;
  }

  Jet3& operator-=(const Jet3& o) {
    check_dim(o);
    value -= o.value;
    for (std::size_t i = 0; i < grad_.size(); ++i) grad_[i] -= o.grad_[i];
    for (std::size_t i = 0; i < hess_.size(); ++i) hess_[i] -= o.hess_[i];
    for (std::size_t i = 0; i < third_.size(); ++i) third_[i] -= o.third_[i];
    return *this;
  }

  Jet3& operator*=(cx s) {
    value *= s;
    for (auto& c : grad_) c *= s;
    for (auto& c : hess_) c *= s;
    for (auto& c : third_) c *= s;
    return *this;
  }

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator*(Jet3 a, cx s) { return a *= s; }
  friend Jet3 operator*(cx s, Jet3 a) { return a *= s; }
  friend Jet3 operator-(Jet3 a) { return a *= cx{-1.0}; }

  friend Jet3 operator+(Jet3 a, cx s) {
    a.value += s;
    return a;
  }
  friend Jet3 operator+(cx s, Jet3 a) { return std::move(a) + s; }
  friend Jet3 operator-(Jet3 a, cx s) { return std::move(a) + (-s); }
  friend Jet3 operator-(cx s, Jet3 a) { return (-std::move(a)) + s; }

  /// Truncated Leibniz product.
  friend Jet3 operator*(const Jet3& a, const Jet3& b) {
    a.check_dim(b);
    const int n = a.n_;
    Jet3 r(n);
    r.value = a.value * b.value;
    for (int i = 0; i < n; ++i) r.grad(i) = a.grad(i) * b.value + a.value * b.grad(i);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        r.hess(i, j) = a.hess(i, j) * b.value + a.grad(i) * b.grad(j) + a.grad(j) * b.grad(i) +
                       a.value * b.hess(i, j);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k)
          r.third(i, j, k) = a.third(i, j, k) * b.value + a.value * b.third(i, j, k) +
                             a.hess(i, j) * b.grad(k) + a.hess(i, k) * b.grad(j) +
                             a.hess(j, k) * b.grad(i) + a.grad(k) * b.hess(i, j) +
                             a.grad(j) * b.hess(i, k) + a.grad(i) * b.hess(j, k);
    return r;
  }

  friend Jet3 operator/(const Jet3& a, const Jet3& b) {
    if (std::abs(b.value) < 1e-13 * (1.0 + std::abs(a.value)))
      throw singular_error("jet division: denominator value below threshold", std::abs(b.value));
    return a * compose_series(b, 1.0 / b.value, -1.0 / (b.value * b.value),
                              2.0 / (b.value * b.value * b.value),
                              -6.0 / (b.value * b.value * b.value * b.value));
  }

  friend Jet3 operator/(Jet3 a, cx s) { return a *= (1.0 / s); }

  /// Composition with a scalar analytic function given by its derivatives
  /// d0..d3 at a.value (multivariate Faa di Bruno truncated at order 3).
  static Jet3 compose_series(const Jet3& a, cx d0, cx d1, cx d2, cx d3) {
    const int n = a.n_;
    Jet3 r(n);
    r.value = d0;
    for (int i = 0; i < n; ++i) r.grad(i) = d1 * a.grad(i);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) r.hess(i, j) = d2 * a.grad(i) * a.grad(j) + d1 * a.hess(i, j);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k)
          r.third(i, j, k) =
              d3 * a.grad(i) * a.grad(j) * a.grad(k) +
              d2 * (a.hess(i, j) * a.grad(k) + a.hess(i, k) * a.grad(j) + a.hess(j, k) * a.grad(i)) +
              d1 * a.third(i, j, k);
    return r;
  }

 private:
  void check_dim(const Jet3& o) const {
    if (n_ != o.n_) throw precondition_error("jet arithmetic: dimension mismatch");
  }

  // Packed index of the pair (i, j) with i <= j after sorting.
  std::size_t hess_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
  }

  // Packed index of the sorted triple (i, j, k): tetrahedral layout, the
  // (j, k) block for fixed i is the pair layout of dimension n - i.
  std::size_t third_index(int i, int j, int k) const {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
    std::size_t base = 0;
    for (int a = 0; a < i; ++a) {
      const std::size_t m = static_cast<std::size_t>(n_ - a);
      base += m * (m + 1) / 2;
    }
    const int jj = j - i, kk = k - i, m = n_ - i;
    return base + static_cast<std::size_t>(jj) * m - static_cast<std::size_t>(jj) * (jj - 1) / 2 +
           (kk - jj);
  }

  int n_;
  std::vector<cx> grad_;
  std::vector<cx> hess_;
  std::vector<cx> third_;
};

/// log of a jet (principal branch at the value). The value must be nonzero.
inline Jet3 jet_log(const Jet3& a) {
  const double mag = std::abs(a.value);
  if (mag < 1e-300) throw singular_error("jet_log: zero value", mag);
  const Jet3::cx v = a.value;
  return Jet3::compose_series(a, std::log(v), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

/// Principal-branch power a^p for real exponent p.
inline Jet3 jet_pow(const Jet3& a, double p) {
  const double mag = std::abs(a.value);
  if (mag < 1e-300) throw singular_error("jet_pow: zero value", mag);
  const Jet3::cx v = a.value;
  const Jet3::cx f = std::pow(v, p);
  return Jet3::compose_series(a, f, p * f / v, p * (p - 1.0) * f / (v * v),
                              p * (p - 1.0) * (p - 2.0) * f / (v * v * v));
}

inline Jet3 jet_exp(const Jet3& a) {
  const Jet3::cx e = std::exp(a.value);
  return Jet3::compose_series(a, e, e, e, e);
}

}  // namespace polyschwarz
