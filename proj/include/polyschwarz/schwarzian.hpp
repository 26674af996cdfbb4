#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "polyschwarz/complex_linalg.hpp"
#include "polyschwarz/errors.hpp"
#include "polyschwarz/jet.hpp"
#include "polyschwarz/maps.hpp"

namespace polyschwarz {

/// The Schwarzian tensor of a locally biholomorphic map at one interior
/// point, together with the Jacobian data it was built from.
///
///   S[k](i,j) = sum_l (d2 f_l / dz_i dz_j) (DF^-1)(k,l)
///               - 1/(n+1) (delta_ki d_j log det DF + delta_kj d_i log det DF)
///
/// S0 extends the tensor by the second-order coefficient acting on scalars:
/// with u0 = (det DF)^(-1/(n+1)),
///
///   S0(i,j) = (d2_ij u0 - sum_k (d_k u0) S[k](i,j)) / u0.
///
/// Both blocks are symmetric in (i,j), and sum_j S[j](i,j) = 0 for every i.
struct SchwarzianTensor {
  int n = 0;
  Point point;
  std::vector<CMat> S;   // n symmetric n x n blocks, S[k](i,j)
  CMat S0;               // symmetric n x n
  CMat jacobian;         // DF at the point
  cxd jacobian_det{};    // det DF
  std::vector<cxd> grad_log_jac;
};

inline SchwarzianTensor schwarzian_from_jet(const MapJet& mj) {
  const int n = mj.n;
  if (n < 2) throw precondition_error("schwarzian tensor: needs at least two variables");
  if (std::abs(mj.jacobian_det) < 1e-10)
    throw singular_error("schwarzian tensor: Jacobian is numerically singular at the point",
                         std::abs(mj.jacobian_det));

  SchwarzianTensor t;
  t.n = n;
  t.point = mj.point;
  t.jacobian = mj.jacobian;
  t.jacobian_det = mj.jacobian_det;

  const CMat inv = lu_inverse(lu_decompose(mj.jacobian));
  const Jet3 det = jacobian_det_jet(mj);
  t.grad_log_jac.resize(n);
  for (int i = 0; i < n; ++i) t.grad_log_jac[i] = det.grad(i) / det.value;

  const double w = 1.0 / (n + 1);
  t.S.assign(n, CMat(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        cxd acc = 0.0;
        for (int l = 0; l < n; ++l) acc += mj.jets[l].hess(i, j) * inv(k, l);
        if (k == i) acc -= w * t.grad_log_jac[j];
        if (k == j) acc -= w * t.grad_log_jac[i];
        t.S[k](i, j) = acc;
        t.S[k](j, i) = acc;
      }

  const Jet3 u0 = jet_pow(det, -w);
  t.S0 = CMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      cxd acc = u0.hess(i, j);
      for (int k = 0; k < n; ++k) acc -= u0.grad(k) * t.S[k](i, j);
      acc /= u0.value;
      t.S0(i, j) = acc;
      t.S0(j, i) = acc;
    }
  return t;
}

inline SchwarzianTensor schwarzian_tensor(const MapExpr& f, const Point& z) {
  if (static_cast<int>(z.size()) != f.dim())
    throw precondition_error("schwarzian_tensor: point dimension mismatch");
  return schwarzian_from_jet(map_jet(f, z));
}

/// Quadratic action: component k of S(v, v) is v^T S[k] v.
inline std::vector<cxd> apply_tensor(const SchwarzianTensor& t, const std::vector<cxd>& v) {
  std::vector<cxd> out(static_cast<std::size_t>(t.n));
  for (int k = 0; k < t.n; ++k) {
    cxd acc = 0.0;
    for (int i = 0; i < t.n; ++i)
      for (int j = 0; j < t.n; ++j) acc += v[i] * t.S[k](i, j) * v[j];
    out[k] = acc;
  }
  return out;
}

inline cxd apply_tensor0(const SchwarzianTensor& t, const std::vector<cxd>& v) {
  cxd acc = 0.0;
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) acc += v[i] * t.S0(i, j) * v[j];
  return acc;
}

inline double tensor_max_abs(const SchwarzianTensor& t) {
  double m = 0.0;
  for (const auto& block : t.S) m = std::max(m, block.max_abs());
  return m;
}

/// Residual of the trace normalization sum_j S[j](i,j) = 0, maximized over i.
inline double canonical_residual(const SchwarzianTensor& t) {
  double worst = 0.0;
  for (int i = 0; i < t.n; ++i) {
    cxd acc = 0.0;
    for (int j = 0; j < t.n; ++j) acc += t.S[j](i, j);
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

/// Max-entry residual of the cocycle rule
///   S(g . f) = S(f) + (f^* S(g)),
/// where the pullback contracts S(g) at f(z) with Df twice and (Df)^-1 once.
inline double chain_rule_residual(const MapExpr& g, const MapExpr& f, const Point& z) {
  const SchwarzianTensor tf = schwarzian_tensor(f, z);
  const SchwarzianTensor tgf = schwarzian_tensor(MapExpr::compose(g, f), z);
  const Point w = eval_map(f, z);
  const SchwarzianTensor tg = schwarzian_tensor(g, w);

  const int n = tf.n;
  const CMat& df = tf.jacobian;
  const CMat inv = lu_inverse(lu_decompose(df));

  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cxd pullback = 0.0;
        for (int r = 0; r < n; ++r) {
          cxd middle = 0.0;
          for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) middle += tg.S[r](l, m) * df(l, i) * df(m, j);
          pullback += middle * inv(k, r);
        }
        worst = std::max(worst, std::abs(tgf.S[k](i, j) - (tf.S[k](i, j) + pullback)));
      }
  return worst;
}

/// Residual of the scalar comparison identity
///   Hess(u0)(v, v) = S(v).grad(u0) + S0(v) u0   with u0 = (det DF)^(-1/(n+1)).
inline double hessian_residual(const MapExpr& f, const Point& z, const std::vector<cxd>& v) {
  const MapJet mj = map_jet(f, z);
  const SchwarzianTensor t = schwarzian_from_jet(mj);
  const Jet3 u0 = u0_jet(mj);

  cxd hess = 0.0;
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) hess += v[i] * u0.hess(i, j) * v[j];

  const std::vector<cxd> sv = apply_tensor(t, v);
  cxd rhs = apply_tensor0(t, v) * u0.value;
  for (int k = 0; k < t.n; ++k) rhs += sv[k] * u0.grad(k);
  return std::abs(hess - rhs);
}

}  // namespace polyschwarz
