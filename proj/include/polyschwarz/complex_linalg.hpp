#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "polyschwarz/errors.hpp"

namespace polyschwarz {

using cxd = std::complex<double>;

/// Dense row-major complex matrix. Everything in this library is tiny
/// (Jacobians and coefficient matrices of size <= 9), so the implementation
/// favors clarity over blocking.
class CMat {
 public:
  CMat() = default;
  CMat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}

  static CMat identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cxd& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const cxd& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  CMat operator*(const CMat& other) const {
    CMat out(rows_, other.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const cxd a = (*this)(i, k);
        if (a == cxd{}) continue;
        for (int j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
      }
    return out;
  }

  std::vector<cxd> operator*(const std::vector<cxd>& v) const {
    std::vector<cxd> out(rows_);
    for (int i = 0; i < rows_; ++i) {
      cxd acc = 0.0;
      for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * v[j];
      out[i] = acc;
    }
    return out;
  }

  CMat adjoint() const {
    CMat out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : data_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<cxd> data_;
};

/// LU factorization with partial pivoting of a square matrix.
struct LuFactors {
  CMat lu;
  std::vector<int> perm;
  int sign = 1;
  double min_pivot = 0.0;  // smallest |pivot| encountered

  cxd det() const {
    cxd d = static_cast<double>(sign);
    for (int i = 0; i < lu.rows(); ++i) d *= lu(i, i);
    return d;
  }
};

inline LuFactors lu_decompose(CMat a) {
  const int n = a.rows();
  if (n != a.cols()) throw precondition_error("lu_decompose: matrix must be square");
  LuFactors f;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  f.min_pivot = (n == 0) ? 1.0 : std::abs(a(0, 0));
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double mag = std::abs(a(r, col));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(f.perm[col], f.perm[pivot]);
      f.sign = -f.sign;
    }
    f.min_pivot = std::min(f.min_pivot, best);
    if (best == 0.0) continue;  // exactly singular; det() will be 0
    const cxd inv_pivot = 1.0 / a(col, col);
    for (int r = col + 1; r < n; ++r) {
      const cxd factor = a(r, col) * inv_pivot;
      a(r, col) = factor;
      for (int c = col + 1; c < n; ++c) a(r, c) -= factor * a(col, c);
    }
  }
  f.lu = std::move(a);
  return f;
}

inline std::vector<cxd> lu_solve(const LuFactors& f, const std::vector<cxd>& b) {
  const int n = f.lu.rows();
  std::vector<cxd> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    const double mag = std::abs(f.lu(i, i));
    if (mag < 1e-300) throw singular_error("lu_solve: singular matrix", mag);
    x[i] /= f.lu(i, i);
  }
  return x;
}

inline CMat lu_inverse(const LuFactors& f) {
  const int n = f.lu.rows();
  CMat inv(n, n);
  std::vector<cxd> e(n);
  for (int col = 0; col < n; ++col) {
    std::fill(e.begin(), e.end(), cxd{});
    e[col] = 1.0;
    const std::vector<cxd> x = lu_solve(f, e);
    for (int r = 0; r < n; ++r) inv(r, col) = x[r];
  }
  return inv;
}

inline CMat inverse(const CMat& a) { return lu_inverse(lu_decompose(a)); }

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Quadratic convergence; sizes here are <= 9 so a fixed sweep budget is safe.
inline std::vector<double> hermitian_eigenvalues(CMat h) {
  const int n = h.rows();
  if (n != h.cols()) throw precondition_error("hermitian_eigenvalues: matrix must be square");
  double scale = h.max_abs();
  if (scale == 0.0) return std::vector<double>(n, 0.0);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(h(p, q)));
    if (off <= 1e-15 * scale) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double mag = std::abs(h(p, q));
        if (mag <= 1e-18 * scale) continue;
        const double app = h(p, p).real();
        const double aqq = h(q, q).real();
        const cxd phase = h(p, q) / mag;  // h_pq = mag * phase
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Unitary U restricted to (p,q): [[c*w, s*w], [-s*conj(w), c*conj(w)]]
        // with w = sqrt(phase); equivalent to de-phasing then a real rotation.
        const cxd w = std::sqrt(phase);
        const cxd upp = c * w, upq = s * w;
        const cxd uqp = -s * std::conj(w), uqq = c * std::conj(w);
        for (int k = 0; k < n; ++k) {  // H <- H * U
          const cxd hp = h(k, p), hq = h(k, q);
          h(k, p) = hp * upp + hq * uqp;
          h(k, q) = hp * upq + hq * uqq;
        }
        for (int k = 0; k < n; ++k) {  // H <- U^H * H
          const cxd hp = h(p, k), hq = h(q, k);
          h(p, k) = std::conj(upp) * hp + std::conj(uqp) * hq;
          h(q, k) = std::conj(upq) * hp + std::conj(uqq) * hq;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = h(i, i).real();
  return eig;
}

/// Largest singular value.
inline double spectral_norm(const CMat& a) {
  const CMat gram = a.adjoint() * a;
  double m = 0.0;
  for (double e : hermitian_eigenvalues(gram)) m = std::max(m, e);
  return std::sqrt(std::max(0.0, m));
}

/// Smallest singular value (0 for singular matrices up to rounding).
inline double smallest_singular_value(const CMat& a) {
  const CMat gram = a.adjoint() * a;
  double m = std::numeric_limits<double>::infinity();
  for (double e : hermitian_eigenvalues(gram)) m = std::min(m, e);
  return std::sqrt(std::max(0.0, m));
}

}  // namespace polyschwarz
