#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <utility>
#include <vector>

#include "polyschwarz/complex_linalg.hpp"
#include "polyschwarz/errors.hpp"
#include "polyschwarz/jet.hpp"

namespace polyschwarz {

using Point = std::vector<cxd>;

inline Point origin(int n) { return Point(static_cast<std::size_t>(n)); }

inline double max_abs(const Point& z) {
  double m = 0.0;
  for (const auto& c : z) m = std::max(m, std::abs(c));
  return m;
}

enum class MapKind { identity, moebius, automorphism, normalizer, dilation, compose, polynomial };

/// One monomial coeff * z^exponents contributing to component `target` of a
/// polynomial map. The linear/identity part is spelled out as terms too.
struct PolyTerm {
  int target = 0;
  std::vector<int> exponents;
  cxd coeff{};
};

/// Immutable symbolic description of a holomorphic map of the polydisk.
/// Evaluation (values and order-3 jets) walks this tree; children are shared,
/// so copies are cheap.
class MapExpr {
 public:
  static MapExpr identity(int n) {
    MapExpr e(MapKind::identity, n);
    return e;
  }

  /// Moebius map with coefficient matrix m of size (n+1)x(n+1), row-major.
  /// Row r holds the affine form l_r(z) = m(r,0) + sum_j m(r,j+1) z_j and the
  /// map is z -> (l_1/l_0, ..., l_n/l_0). The matrix must be invertible.
  static MapExpr moebius(int n, CMat m) {
    if (m.rows() != n + 1 || m.cols() != n + 1)
      throw precondition_error("moebius: matrix must be (n+1)x(n+1)");
    const double top = spectral_norm(m);
    if (top == 0.0 || smallest_singular_value(m) < 1e-12 * top)
      throw precondition_error("moebius: coefficient matrix is singular");
    MapExpr e(MapKind::moebius, n);
    e.matrix_ = std::move(m);
    return e;
  }

  /// Product of disk automorphisms z_j -> (z_j - a_j) / (1 - conj(a_j) z_j).
  static MapExpr automorphism(std::vector<cxd> a) {
    const int n = static_cast<int>(a.size());
    for (const auto& c : a)
      if (!(std::abs(c) < 1.0))
        throw precondition_error("automorphism: parameters must lie in the open unit disk");
    MapExpr e(MapKind::automorphism, n);
    e.a_ = std::move(a);
    return e;
  }

  /// Renormalizing Moebius factor T_a(w) = w / (1 + a . w); T_{-a} inverts it.
  static MapExpr normalizer(std::vector<cxd> a) {
    MapExpr e(MapKind::normalizer, static_cast<int>(a.size()));
    e.a_ = std::move(a);
    return e;
  }

  /// Dilated map g(z) = f(s z) / s for 0 < s <= 1.
  static MapExpr dilation(double s, MapExpr inner) {
    if (!(s > 0.0) || s > 1.0) throw precondition_error("dilation: factor must be in (0, 1]");
    MapExpr e(MapKind::dilation, inner.n_);
    e.s_ = s;
    e.inner_ = wrap(std::move(inner));
    return e;
  }

  static MapExpr compose(MapExpr outer, MapExpr inner) {
    if (outer.n_ != inner.n_) throw precondition_error("compose: dimension mismatch");
    MapExpr e(MapKind::compose, inner.n_);
    e.outer_ = wrap(std::move(outer));
    e.inner_ = wrap(std::move(inner));
    return e;
  }

  static MapExpr polynomial(int n, std::vector<PolyTerm> terms, int max_degree = 6) {
    for (const auto& t : terms) {
      if (t.target < 0 || t.target >= n) throw precondition_error("polynomial: bad target index");
      if (static_cast<int>(t.exponents.size()) != n)
        throw precondition_error("polynomial: exponent list must have one entry per variable");
      int total = 0;
      for (int e : t.exponents) {
        if (e < 0) throw precondition_error("polynomial: negative exponent");
        total += e;
      }
      if (total > max_degree) throw precondition_error("polynomial: term exceeds the degree cap");
    }
    MapExpr e(MapKind::polynomial, n);
    e.terms_ = std::move(terms);
    return e;
  }

  MapKind kind() const { return kind_; }
  int dim() const { return n_; }
  const CMat& matrix() const { return matrix_; }
  const std::vector<cxd>& params() const { return a_; }
  double scale() const { return s_; }
  const MapExpr& inner() const { return *inner_; }
  const MapExpr& outer() const { return *outer_; }
  const std::vector<PolyTerm>& terms() const { return terms_; }

 private:
  MapExpr(MapKind kind, int n) : kind_(kind), n_(n) {
    if (n < 1) throw precondition_error("map: dimension must be >= 1");
  }

  static std::shared_ptr<const MapExpr> wrap(MapExpr e) {
    return std::make_shared<const MapExpr>(std::move(e));
  }

  MapKind kind_;
  int n_;
  CMat matrix_;
  std::vector<cxd> a_;
  double s_ = 1.0;
  std::shared_ptr<const MapExpr> inner_;
  std::shared_ptr<const MapExpr> outer_;
  std::vector<PolyTerm> terms_;
};

// ---------------------------------------------------------------------------
// Evaluation of values and jets. eval_jets(expr, args) returns the jets of
// expr composed with whatever functions the argument jets describe, so the
// same recursion serves both plain jets (seed arguments) and compositions.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
T eval_affine_row(const CMat& m, int row, const std::vector<T>& w, const T& one) {
  T acc = one * m(row, 0);
  for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * m(row, static_cast<int>(j) + 1);
  return acc;
}

}  // namespace detail

inline std::vector<cxd> eval_map(const MapExpr& f, const Point& z);

inline std::vector<cxd> eval_map_args(const MapExpr& f, const std::vector<cxd>& w) {
  const int n = f.dim();
  switch (f.kind()) {
    case MapKind::identity:
      return w;
    case MapKind::moebius: {
      const CMat& m = f.matrix();
      std::vector<cxd> l(static_cast<std::size_t>(n) + 1);
      double lmax = 0.0;
      for (int r = 0; r <= n; ++r) {
        l[r] = m(r, 0);
        for (int j = 0; j < n; ++j) l[r] += m(r, j + 1) * w[j];
        lmax = std::max(lmax, std::abs(l[r]));
      }
      if (std::abs(l[0]) < 1e-13 * (1.0 + lmax))
        throw singular_error("moebius: denominator form vanishes at the point", std::abs(l[0]));
      std::vector<cxd> out(n);
      for (int k = 0; k < n; ++k) out[k] = l[k + 1] / l[0];
      return out;
    }
    case MapKind::automorphism: {
      std::vector<cxd> out(n);
      for (int j = 0; j < n; ++j) {
        const cxd denom = 1.0 - std::conj(f.params()[j]) * w[j];
        if (std::abs(denom) < 1e-13)
          throw singular_error("automorphism: denominator vanishes", std::abs(denom));
        out[j] = (w[j] - f.params()[j]) / denom;
      }
      return out;
    }
    case MapKind::normalizer: {
      cxd denom = 1.0;
      for (int j = 0; j < n; ++j) denom += f.params()[j] * w[j];
      if (std::abs(denom) < 1e-13)
        throw singular_error("normalizer: denominator vanishes", std::abs(denom));
      std::vector<cxd> out(n);
      for (int j = 0; j < n; ++j) out[j] = w[j] / denom;
      return out;
    }
    case MapKind::dilation: {
      std::vector<cxd> scaled(w);
      for (auto& c : scaled) c *= f.scale();
      std::vector<cxd> inner = eval_map_args(f.inner(), scaled);
      for (auto& c : inner) c /= f.scale();
      return inner;
    }
    case MapKind::compose:
      return eval_map_args(f.outer(), eval_map_args(f.inner(), w));
    case MapKind::polynomial: {
      std::vector<cxd> out(n);
      for (const auto& t : f.terms()) {
        cxd mono = t.coeff;
        for (int i = 0; i < n; ++i)
          for (int e = 0; e < t.exponents[i]; ++e) mono *= w[i];
        out[t.target] += mono;
      }
      return out;
    }
  }
  throw precondition_error("eval_map: unknown node kind");
}

inline std::vector<cxd> eval_map(const MapExpr& f, const Point& z) {
  if (static_cast<int>(z.size()) != f.dim())
    throw precondition_error("eval_map: point dimension mismatch");
  return eval_map_args(f, z);
}

inline std::vector<Jet3> eval_jets(const MapExpr& f, const std::vector<Jet3>& w) {
  const int n = f.dim();
  if (static_cast<int>(w.size()) != n)
    throw precondition_error("eval_jets: argument count mismatch");
  const int jn = w[0].dim();
  switch (f.kind()) {
    case MapKind::identity:
      return w;
    case MapKind::moebius: {
      const CMat& m = f.matrix();
      const Jet3 one = Jet3::constant(jn, 1.0);
      std::vector<Jet3> l;
      l.reserve(static_cast<std::size_t>(n) + 1);
      for (int r = 0; r <= n; ++r) l.push_back(detail::eval_affine_row(m, r, w, one));
      double lmax = 0.0;
      for (const auto& j : l) lmax = std::max(lmax, std::abs(j.value));
      if (std::abs(l[0].value) < 1e-13 * (1.0 + lmax))
        throw singular_error("moebius: denominator form vanishes at the point",
                             std::abs(l[0].value));
      std::vector<Jet3> out;
      out.reserve(n);
      for (int k = 1; k <= n; ++k) out.push_back(l[k] / l[0]);
      return out;
    }
    case MapKind::automorphism: {
      std::vector<Jet3> out;
      out.reserve(n);
      for (int j = 0; j < n; ++j) {
        const cxd a = f.params()[j];
        out.push_back((w[j] - a) / (1.0 - (w[j] * std::conj(a))));
      }
      return out;
    }
    case MapKind::normalizer: {
      Jet3 denom = Jet3::constant(jn, 1.0);
      for (int j = 0; j < n; ++j) denom += w[j] * f.params()[j];
      std::vector<Jet3> out;
      out.reserve(n);
      for (int j = 0; j < n; ++j) out.push_back(w[j] / denom);
      return out;
    }
    case MapKind::dilation: {
      std::vector<Jet3> scaled(w);
      for (auto& j : scaled) j *= cxd{f.scale()};
      std::vector<Jet3> inner = eval_jets(f.inner(), scaled);
      for (auto& j : inner) j *= cxd{1.0 / f.scale()};
      return inner;
    }
    case MapKind::compose:
      return eval_jets(f.outer(), eval_jets(f.inner(), w));
    case MapKind::polynomial: {
      // Cache powers of each argument up to the largest exponent used.
      std::vector<int> max_exp(static_cast<std::size_t>(n), 0);
      for (const auto& t : f.terms())
        for (int i = 0; i < n; ++i) max_exp[i] = std::max(max_exp[i], t.exponents[i]);
      std::vector<std::vector<Jet3>> pows(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        pows[i].push_back(Jet3::constant(jn, 1.0));
        for (int e = 1; e <= max_exp[i]; ++e) pows[i].push_back(pows[i].back() * w[i]);
      }
      std::vector<Jet3> out(static_cast<std::size_t>(n), Jet3(jn));
      for (const auto& t : f.terms()) {
        Jet3 mono = Jet3::constant(jn, t.coeff);
        for (int i = 0; i < n; ++i)
          if (t.exponents[i] > 0) mono = mono * pows[i][t.exponents[i]];
        out[t.target] += mono;
      }
      return out;
    }
  }
  throw precondition_error("eval_jets: unknown node kind");
}

/// Coordinate seed jets at z: the jets of the identity map.
inline std::vector<Jet3> seed_jets(const Point& z) {
  const int n = static_cast<int>(z.size());
  std::vector<Jet3> s;
  s.reserve(n);
  for (int i = 0; i < n; ++i) s.push_back(Jet3::variable(n, i, z[i]));
  return s;
}

/// Full order-3 jet data of a map at a point.
struct MapJet {
  int n = 0;
  Point point;
  std::vector<Jet3> jets;
  CMat jacobian;
  cxd jacobian_det{};
  bool near_singular = false;  // |det DF| below 1e-10
};

inline MapJet map_jet(const MapExpr& f, const Point& z) {
  MapJet mj;
  mj.n = f.dim();
  mj.point = z;
  mj.jets = eval_jets(f, seed_jets(z));
  mj.jacobian = CMat(mj.n, mj.n);
  for (int i = 0; i < mj.n; ++i)
    for (int l = 0; l < mj.n; ++l) mj.jacobian(i, l) = mj.jets[i].grad(l);
  mj.jacobian_det = lu_decompose(mj.jacobian).det();
  mj.near_singular = std::abs(mj.jacobian_det) < 1e-10;
  return mj;
}

/// Order-2 jet of the partial derivative d f_component / d z_i. The third
/// derivatives of f_component would be needed for its own third order, so
/// those coefficients stay zero.
inline Jet3 jet_of_entry_derivative(const Jet3& jet, int i) {
  const int n = jet.dim();
  Jet3 d(n);
  d.value = jet.grad(i);
  for (int j = 0; j < n; ++j) d.grad(j) = jet.hess(i, j);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) d.hess(j, k) = jet.third(i, j, k);
  return d;
}

/// Jacobian determinant as a jet, valid through order 2 (see
/// jet_of_entry_derivative). Computed by LU elimination in jet arithmetic
/// with pivoting on jet values.
inline Jet3 jacobian_det_jet(const MapJet& mj) {
  const int n = mj.n;
  std::vector<std::vector<Jet3>> a;
  a.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Jet3> row;
    row.reserve(n);
    for (int l = 0; l < n; ++l) row.push_back(jet_of_entry_derivative(mj.jets[i], l));
    a.push_back(std::move(row));
  }
  Jet3 det = Jet3::constant(n, 1.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[col][col].value);
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col].value) > best) {
        best = std::abs(a[r][col].value);
        pivot = r;
      }
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det *= cxd{-1.0};
    }
    for (int r = col + 1; r < n; ++r) {
      const Jet3 factor = a[r][col] / a[col][col];
      for (int c = col + 1; c < n; ++c) a[r][c] -= factor * a[col][c];
    }
    det = det * a[col][col];
  }
  return det;
}

/// Jet of u0 = (det DF)^(-1/(n+1)), principal branch; valid through order 2.
inline Jet3 u0_jet(const MapJet& mj) {
  return jet_pow(jacobian_det_jet(mj), -1.0 / (mj.n + 1));
}

/// Gradient of log det DF at the jet's base point.
inline std::vector<cxd> grad_log_jacobian(const MapJet& mj) {
  const Jet3 det = jacobian_det_jet(mj);
  std::vector<cxd> g(static_cast<std::size_t>(mj.n));
  for (int i = 0; i < mj.n; ++i) g[i] = det.grad(i) / det.value;
  return g;
}

/// Renormalizing factor T_a with a = grad(det DF)(0) / (n+1), chosen so that
/// the composition T_a . f has Jacobian gradient 0 at the origin.
/// Precondition: f(0) = 0 and Df(0) = I within 1e-10.
inline MapExpr make_normalizer(const MapExpr& f) {
  const int n = f.dim();
  const MapJet mj = map_jet(f, origin(n));
  double dev = 0.0;
  for (int i = 0; i < n; ++i) {
    dev = std::max(dev, std::abs(mj.jets[i].value));
    for (int l = 0; l < n; ++l)
      dev = std::max(dev, std::abs(mj.jacobian(i, l) - (i == l ? cxd{1.0} : cxd{})));
  }
  if (dev > 1e-10)
    throw precondition_error("make_normalizer: map must satisfy f(0) = 0 and Df(0) = I");
  const Jet3 det = jacobian_det_jet(mj);
  std::vector<cxd> a(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) a[j] = det.grad(j) / (det.value * static_cast<double>(n + 1));
  return MapExpr::normalizer(std::move(a));
}

}  // namespace polyschwarz
