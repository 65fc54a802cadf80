#pragma once

#include <algorithm>
#include <cmath>

#include "nullmorph/errors.hpp"
#include "nullmorph/jet.hpp"
#include "nullmorph/null_curve.hpp"
#include "nullmorph/spinor.hpp"

namespace nullmorph {

/// Twistor (omega^A, pi_{A'}): omega upper unprimed, pi lower primed.
template <class T>
struct Twistor {
  Vec2<T> omega;
  Vec2<T> pi;
};

/// Dual twistor (lambda_A, mu^{A'}): lambda lower unprimed, mu upper primed.
template <class T>
struct DualTwistor {
  Vec2<T> lambda;
  Vec2<T> mu;
};

using TwistorJet = Twistor<Jet>;

template <class T>
Vec4<T> as_vec4(const Twistor<T>& z) {
  return {z.omega[0], z.omega[1], z.pi[0], z.pi[1]};
}

template <class T>
Vec4<T> as_vec4(const DualTwistor<T>& w) {
  return {w.lambda[0], w.lambda[1], w.mu[0], w.mu[1]};
}

template <class T>
Twistor<T> twistor_from(const Vec4<T>& v) {
  return {{v[0], v[1]}, {v[2], v[3]}};
}

template <class T>
DualTwistor<T> dual_twistor_from(const Vec4<T>& v) {
  return {{v[0], v[1]}, {v[2], v[3]}};
}

inline Twistor<Complex> value_of(const TwistorJet& z) { return {value_of(z.omega), value_of(z.pi)}; }

template <class T>
Vec2<T> differentiate(const Vec2<T>& v) {
  return {v[0].differentiate(), v[1].differentiate()};
}

inline MatrixJet differentiate(const MatrixJet& m) {
  return map_values(m, [](const Jet& j) { return j.differentiate(); });
}

inline MatrixJet truncated(const MatrixJet& m, int order) {
  return map_values(m, [order](const Jet& j) { return j.truncated(order); });
}

inline Vec2<Complex> derivative_of(const Vec2<Jet>& v, int k) { return {v[0].derivative(k), v[1].derivative(k)}; }

inline SpacetimePoint coefficient_matrix(const MatrixJet& m, int k) {
  return {{{{m(0, 0).coeff(k), m(0, 1).coeff(k)}, {m(1, 0).coeff(k), m(1, 1).coeff(k)}}}};
}

inline SpacetimePoint derivative_matrix(const MatrixJet& m, int k) {
  return {{{{m(0, 0).derivative(k), m(0, 1).derivative(k)}, {m(1, 0).derivative(k), m(1, 1).derivative(k)}}}};
}

/// Twistor of the alpha-plane (x, pi): omega = i x pi.
inline Twistor<Complex> twistor_at(const FPoint& p) {
  return {scaled(p.x * p.pi, Complex(0.0, 1.0)), p.pi};
}

/// Tangent direction (i x psi, psi) inside the subspace cut out by the derivative of the incidence relation.
inline Twistor<Complex> twistor_tangent(const SpacetimePoint& x, const Vec2<Complex>& psi) {
  return {scaled(x * psi, Complex(0.0, 1.0)), psi};
}

/// A spinor independent of pi_{A'}: the Hermitian complement, max-modulus component 1.
inline Vec2<Complex> default_psi(const Vec2<Complex>& pi) {
  return normalize_projective(Vec2<Complex>{-std::conj(pi[1]), std::conj(pi[0])});
}

inline constexpr double kCorrespondenceTolerance = 1e-10;

/// The matrix K with a^A = K^{AA'} p_{A'} determined by a pair (a, p) and its derivative (a', p').
///
/// K = (a p'^T - a' p^T) / (p_{C'} p'^{C'}), with p, p' raised. For twistor
/// curves K = i chi; for dual twistor curves K = -i b^T.
template <class T>
Mat2<T> incidence_matrix(const Vec2<T>& a, const Vec2<T>& a_dot, const Vec2<T>& p, const Vec2<T>& p_dot) {
  const Vec2<T> p_up = raise_index(p);
  const Vec2<T> p_dot_up = raise_index(p_dot);
  const T denom = pair(p, p_dot_up);
  const Vec2<Complex> pv = value_of(p);
  const Vec2<Complex> pdv = value_of(p_dot);
  if (!(std::abs(value_of(denom)) > kCorrespondenceTolerance * norm2(pv) * norm2(pdv))) {
    throw Error(ErrorKind::singular_correspondence, "pi_{C'} dpi^{C'} vanishes");
  }
  const Mat2<T> num = outer(a, p_dot_up) - outer(a_dot, p_up);
  if constexpr (std::is_same_v<T, Complex>) {
    return num * (1.0 / denom);
  } else {
    const T inv = Complex(1.0) / denom;
    return num * inv;
  }
}

/// Shaw map: the jet of the chi-curve (order K+1) to the jet of its twistor curve (order K).
inline TwistorJet kappa(const MatrixJet& chi) {
  const int order = chi(0, 0).order() - 1;
  if (order < 0) throw Error(ErrorKind::insufficient_jet_order, "kappa needs at least a first-order jet");
  const MatrixJet chi_dot = differentiate(chi);
  const SpacetimePoint v0 = value_of(chi_dot);
  const double scale = std::max(1.0, frobenius_norm(value_of(chi)));
  if (frobenius_norm(v0) <= 1e-14 * scale) throw Error(ErrorKind::singular_tangent, "chi' vanishes");
  if (!is_null(v0)) throw Error(ErrorKind::not_null_tangent, "chi' is not null");
  // Pivot fixed at the expansion point so pi(s) stays on one holomorphic branch.
  const NullFactors<Jet> f = factor_along(chi_dot, select_pivot(v0));
  const Vec2<Jet> pi = lower_index(f.pi);
  const MatrixJet chi_k = truncated(chi, order);
  const Vec2<Jet> x_pi = chi_k * pi;
  const Complex i{0.0, 1.0};
  return {{x_pi[0] * i, x_pi[1] * i}, pi};
}

inline TwistorJet kappa(const NullCurve& c, Complex s0, int order = kDefaultJetOrder) {
  return kappa(c.jet(s0, order + 1));
}

struct InverseCorrespondence {
  SpacetimePoint point;
  MatrixJet jet;  // order one less than the twistor jet
};

/// Inverse Shaw map: i chi = (omega pi'^T - omega' pi^T) / (pi_{C'} pi'^{C'}).
inline InverseCorrespondence kappa_inverse(const TwistorJet& z) {
  const int order = z.pi[0].order();
  if (order < 1) throw Error(ErrorKind::insufficient_jet_order, "kappa_inverse needs a first-order jet");
  const Vec2<Jet> omega = {z.omega[0].truncated(order - 1), z.omega[1].truncated(order - 1)};
  const Vec2<Jet> pi = {z.pi[0].truncated(order - 1), z.pi[1].truncated(order - 1)};
  const MatrixJet k = incidence_matrix(omega, differentiate(z.omega), pi, differentiate(z.pi));
  const MatrixJet chi = k * Complex(0.0, -1.0);
  return {value_of(chi), chi};
}

/// Unprimed factor of chi' recovered from second derivatives:
/// i lambda^A = (i chi^{AA'} pi''_{A'} - omega''^A) / (pi_{C'} pi'^{C'}).
inline Vec2<Complex> lambda_inverse(const TwistorJet& z, const SpacetimePoint& chi) {
  if (z.pi[0].order() < 2) throw Error(ErrorKind::insufficient_jet_order, "lambda inversion needs second derivatives");
  const Vec2<Complex> pi = value_of(z.pi);
  const Vec2<Complex> pi_d = derivative_of(z.pi, 1);
  const Vec2<Complex> pi_dd = derivative_of(z.pi, 2);
  const Vec2<Complex> omega_dd = derivative_of(z.omega, 2);
  const Complex denom = pair(pi, raise_index(pi_d));
  if (!(std::abs(denom) > kCorrespondenceTolerance * norm2(pi) * norm2(pi_d))) {
    throw Error(ErrorKind::singular_correspondence, "pi_{C'} dpi^{C'} vanishes");
  }
  const Complex i{0.0, 1.0};
  const Vec2<Complex> x_pdd = chi * pi_dd;
  return {(i * x_pdd[0] - omega_dd[0]) / (denom * i), (i * x_pdd[1] - omega_dd[1]) / (denom * i)};
}

/// mu^{A'} = -i lambda_A b^{AA'}: the beta-plane lambda through b.
inline Vec2<Complex> beta_incidence(const Vec2<Complex>& lambda, const SpacetimePoint& b) {
  return scaled(left_multiply(lambda, b), Complex(0.0, -1.0));
}

/// The point b of a dual twistor curve w(t) with w' inside its incidence subspace: b = i K^T.
template <class T>
Mat2<T> dual_incidence_point(const Vec2<T>& lambda, const Vec2<T>& lambda_dot, const Vec2<T>& mu,
                             const Vec2<T>& mu_dot) {
  const Mat2<T> k = incidence_matrix(mu, mu_dot, lambda, lambda_dot);
  return transpose(k) * Complex(0.0, 1.0);
}

/// The intersection point of two distinct alpha-planes through x.
inline SpacetimePoint point_from_alpha_planes(const Twistor<Complex>& z1, const Twistor<Complex>& z2) {
  const SpacetimePoint omega{{{{z1.omega[0], z2.omega[0]}, {z1.omega[1], z2.omega[1]}}}};
  const SpacetimePoint pi{{{{z1.pi[0], z2.pi[0]}, {z1.pi[1], z2.pi[1]}}}};
  return omega * inverse(pi) * Complex(0.0, -1.0);
}

/// The intersection point of two distinct beta-planes through b.
inline SpacetimePoint point_from_beta_planes(const DualTwistor<Complex>& w1, const DualTwistor<Complex>& w2) {
  const SpacetimePoint mu{{{{w1.mu[0], w2.mu[0]}, {w1.mu[1], w2.mu[1]}}}};
  const SpacetimePoint lambda{{{{w1.lambda[0], w2.lambda[0]}, {w1.lambda[1], w2.lambda[1]}}}};
  return transpose(mu * inverse(lambda) * Complex(0.0, 1.0));
}

/// Rescale a twistor jet so its largest base-point component is 1.
inline TwistorJet normalized(const TwistorJet& z) {
  const Vec4<Complex> v{z.omega[0].value(), z.omega[1].value(), z.pi[0].value(), z.pi[1].value()};
  const auto it = std::max_element(v.begin(), v.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  if (std::abs(*it) == 0.0) throw Error(ErrorKind::zero_vector, "twistor vanishes at the base point");
  const Complex s = 1.0 / *it;
  TwistorJet r = z;
  for (auto* c : {&r.omega[0], &r.omega[1], &r.pi[0], &r.pi[1]}) *c *= s;
  return r;
}

/// Residual max|omega - i chi pi| over all jet coefficients, relative to |chi||pi|.
inline double incidence_residual(const TwistorJet& z, const MatrixJet& chi) {
  const int order = z.pi[0].order();
  const MatrixJet chi_k = truncated(chi, order);
  const Vec2<Jet> x_pi = chi_k * z.pi;
  double worst = 0.0;
  double scale = 1.0;
  for (int k = 0; k <= order; ++k) {
    for (int a = 0; a < 2; ++a) {
      worst = std::max(worst, std::abs(z.omega[a].coeff(k) - Complex(0.0, 1.0) * x_pi[a].coeff(k)));
      scale = std::max(scale, std::abs(x_pi[a].coeff(k)));
    }
  }
  return worst / scale;
}

}  // namespace nullmorph
