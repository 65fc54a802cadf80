#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "nullmorph/endomorphism.hpp"
#include "nullmorph/errors.hpp"
#include "nullmorph/jet.hpp"
#include "nullmorph/null_curve.hpp"
#include "nullmorph/selfdual.hpp"
#include "nullmorph/spinor.hpp"
#include "nullmorph/twistor.hpp"

namespace nullmorph {

/// Homogeneous coordinates [b0, b1] on BP^1, modulo (b0 u, b1 u).
struct BP1Point {
  SpacetimePoint b0 = identity_matrix();
  SpacetimePoint b1 = identity_matrix();
};

/// Alpha-plane through b0 and beta-plane through b1.
struct PlanePairLift {
  Twistor<Complex> z;      // omega = i b0 pi
  DualTwistor<Complex> w;  // mu = -i lambda b1
};

enum class Patch { U0, U1 };

/// (b0, b1) together with the plane spinors pi_{A'} and lambda_A (both lower).
template <class T>
struct CausalData {
  Mat2<T> b0;
  Mat2<T> b1;
  Vec2<T> pi;
  Vec2<T> lambda;
};

namespace detail {

template <class T>
Mat2<T> checked_inverse(const Mat2<T>& a, ErrorKind kind, const char* what) {
  const SpacetimePoint v = value_of(a);
  const double n = frobenius_norm(v);
  if (!(std::abs(det(v)) > kSingularTolerance * std::max(1e-300, n * n))) throw Error(kind, what);
  return inverse(a);
}

}  // namespace detail

inline SpacetimePoint patch_coordinates(const BP1Point& p, Patch patch = Patch::U1) {
  if (patch == Patch::U1) return p.b0 * detail::checked_inverse(p.b1, ErrorKind::singular_patch, "b1 is singular");
  return p.b1 * detail::checked_inverse(p.b0, ErrorKind::singular_patch, "b0 is singular");
}

inline PlanePairLift make_lift(const BP1Point& p, const Vec2<Complex>& pi, const Vec2<Complex>& lambda) {
  return {{scaled(p.b0 * pi, Complex(0.0, 1.0)), pi}, {lambda, beta_incidence(lambda, p.b1)}};
}

inline CausalData<Complex> causal_data(const BP1Point& p, const PlanePairLift& l) {
  return {p.b0, p.b1, l.z.pi, l.w.lambda};
}

/// Right action: (b0 u, b1 u), pi -> u^{-1} pi, mu -> mu u.
inline std::pair<BP1Point, PlanePairLift> right_act(const BP1Point& p, const PlanePairLift& l, const SpacetimePoint& u) {
  const SpacetimePoint u_inv = inverse(u);
  return {{p.b0 * u, p.b1 * u}, {{l.z.omega, u_inv * l.z.pi}, {l.w.lambda, left_multiply(l.w.mu, u)}}};
}

template <class T>
CausalData<T> right_act(const CausalData<T>& d, const SpacetimePoint& u) {
  const T proto = d.pi[0];
  const Mat2<T> uu = lift_matrix(u, proto);
  return {d.b0 * uu, d.b1 * uu, lift_matrix(inverse(u), proto) * d.pi, d.lambda};
}

/// Canonical lift (b0, b1) = (x, I) of a point of G.
inline std::pair<BP1Point, PlanePairLift> lift_g_point(const GPoint& g) {
  const double n = frobenius_norm(g.x);
  if (!(std::abs(det(g.x)) > kSingularTolerance * std::max(1e-300, n * n))) {
    throw Error(ErrorKind::singular_base_point, "x is not invertible");
  }
  const auto [mu_v, pi_up] = null_factorize(g.v);
  const Vec2<Complex> lambda_up = normalize_projective(inverse(g.x) * mu_v.c);
  const BP1Point p{g.x, identity_matrix()};
  return {p, make_lift(p, lower_index(pi_up.c), lower_index(lambda_up))};
}

/// The null direction v = (x lambda)(pi b1^{-1}) in U1, or lambda (pi b0^{-1}) in U0.
template <class T>
std::pair<Mat2<T>, Mat2<T>> extract_point(const CausalData<T>& d, Patch patch = Patch::U1) {
  const Vec2<T> lambda_up = raise_index(d.lambda);
  const Vec2<T> pi_up = raise_index(d.pi);
  Mat2<T> x;
  Vec2<T> left;
  Vec2<T> right;
  if (patch == Patch::U1) {
    const Mat2<T> b1_inv = detail::checked_inverse(d.b1, ErrorKind::singular_patch, "b1 is singular");
    x = d.b0 * b1_inv;
    left = x * lambda_up;
    right = left_multiply(pi_up, b1_inv);
  } else {
    const Mat2<T> b0_inv = detail::checked_inverse(d.b0, ErrorKind::singular_patch, "b0 is singular");
    x = d.b1 * b0_inv;
    left = lambda_up;
    right = left_multiply(pi_up, b0_inv);
  }
  if (norm2(value_of(left)) == 0.0 || norm2(value_of(right)) == 0.0) {
    throw Error(ErrorKind::degenerate_tangent, "null tangent factor vanishes");
  }
  return {x, outer(left, right)};
}

inline GPoint extract_g_point(const BP1Point& p, const PlanePairLift& l, Patch patch = Patch::U1) {
  const auto [x, v] = extract_point(causal_data(p, l), patch);
  return {x, v};
}

namespace detail {

/// t_{iBC} v^C as a matrix (i, B).
template <class T>
Mat2<T> contract_last(const Tensor3& t, const Vec2<T>& v) {
  Mat2<T> r = lift_matrix(zero_matrix(), v[0]);
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) r(i, b) += v[c] * t[i][b][c];
  return r;
}

/// t_{iBC} u^B as a matrix (i, C).
template <class T>
Mat2<T> contract_middle(const Tensor3& t, const Vec2<T>& u) {
  Mat2<T> r = lift_matrix(zero_matrix(), u[0]);
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) r(i, c) += u[b] * t[i][b][c];
  return r;
}

}  // namespace detail

/// Closed form of the causal morphism on lifted data.
///
///   i b0~ = (i A_lam b0 + B mu)(i C_lam b0 + D mu)^{-1},   pi~ = C_lam omega + D (mu.pi),
///   b1~ = i P^{-T} Q^T,                                  lambda~ = P lam,
/// where A_lam = A_{ABC} lam^C, P = E_{ABC} omega^B - i F (x) tau, Q = G omega - i H (x) tau
/// and tau_C = eps_{CD} (b1 pi)^D.
template <class T>
CausalData<T> apply_causal(const InvariantCausalMap& m, const CausalData<T>& d) {
  const Complex i{0.0, 1.0};
  const T proto = d.pi[0];
  const Vec2<T> lam_up = raise_index(d.lambda);
  const Vec2<T> omega = scaled(d.b0 * d.pi, constant_like(proto, i));
  const Vec2<T> mu = scaled(left_multiply(d.lambda, d.b1), constant_like(proto, -i));
  const T mu_pi = mu[0] * d.pi[0] + mu[1] * d.pi[1];

  const Mat2<T> a_lam = detail::contract_last(m.a, lam_up);
  const Mat2<T> c_lam = detail::contract_last(m.c, lam_up);
  const Mat2<T> num = a_lam * d.b0 * i + outer(lift_vector(m.b, proto), mu);
  const Mat2<T> den = c_lam * d.b0 * i + outer(lift_vector(m.d, proto), mu);
  const Mat2<T> b0_new = num * detail::checked_inverse(den, ErrorKind::singular_image, "alpha-slot denominator") * (-i);
  Vec2<T> pi_new = c_lam * omega;
  pi_new[0] += mu_pi * m.d[0];
  pi_new[1] += mu_pi * m.d[1];

  const Vec2<T> tau = lift_matrix(epsilon(), proto) * (d.b1 * d.pi);
  const Mat2<T> p = detail::contract_middle(m.e, omega) - outer(lift_vector(m.f, proto), tau) * i;
  const Mat2<T> q = detail::contract_middle(m.g, omega) - outer(lift_vector(m.h, proto), tau) * i;
  const Mat2<T> p_inv = detail::checked_inverse(p, ErrorKind::singular_image, "beta-slot denominator");
  const Mat2<T> b1_new = transpose(p_inv) * transpose(q) * i;
  return {b0_new, b1_new, pi_new, p * lam_up};
}

inline GPoint apply_causal(const InvariantCausalMap& m, const GPoint& g, Patch patch = Patch::U1) {
  const auto [p, l] = lift_g_point(g);
  const auto [x, v] = extract_point(apply_causal(m, causal_data(p, l)), patch);
  return {x, v};
}

/// Same morphism through eval_invariant_map and per-slot inversion: vary z along (i b0 psi, psi)
/// with w fixed and invert with the incidence formula; vary w along (psi', -i psi' b1) with z fixed
/// and invert with its dual.
inline CausalData<Complex> apply_causal_generic(const InvariantCausalMap& m, const CausalData<Complex>& d) {
  const Complex i{0.0, 1.0};
  auto line = [](const Vec2<Complex>& a, const Vec2<Complex>& da) {
    Vec2<Jet> r;
    for (int k = 0; k < 2; ++k) {
      r[k] = Jet(1, a[k]);
      r[k].coeff(1) = da[k];
    }
    return r;
  };
  const Vec2<Complex> zero{};
  const Vec2<Complex> omega = scaled(d.b0 * d.pi, i);
  const Vec2<Complex> mu = beta_incidence(d.lambda, d.b1);

  const Vec2<Complex> psi = default_psi(d.pi);
  const Twistor<Jet> z_line{line(omega, scaled(d.b0 * psi, i)), line(d.pi, psi)};
  const DualTwistor<Jet> w_fixed{line(d.lambda, zero), line(mu, zero)};
  const auto [zt, wt_unused] = eval_invariant_map(m, z_line, w_fixed);
  const SpacetimePoint k = detail::rethrow_as_singular_image([&] {
    return incidence_matrix(value_of(zt.omega), derivative_of(zt.omega, 1), value_of(zt.pi), derivative_of(zt.pi, 1));
  });

  const Vec2<Complex> psi_dual = default_psi(d.lambda);
  const Twistor<Jet> z_fixed{line(omega, zero), line(d.pi, zero)};
  const DualTwistor<Jet> w_line{line(d.lambda, psi_dual), line(mu, beta_incidence(psi_dual, d.b1))};
  const auto [zt_unused, wt] = eval_invariant_map(m, z_fixed, w_line);
  const SpacetimePoint b1_new = detail::rethrow_as_singular_image([&] {
    return dual_incidence_point(value_of(wt.lambda), derivative_of(wt.lambda, 1), value_of(wt.mu),
                                derivative_of(wt.mu, 1));
  });
  return {k * (-i), b1_new, value_of(zt.pi), value_of(wt.lambda)};
}

inline GPoint apply_causal_generic(const InvariantCausalMap& m, const GPoint& g, Patch patch = Patch::U1) {
  const auto [p, l] = lift_g_point(g);
  const auto [x, v] = extract_point(apply_causal_generic(m, causal_data(p, l)), patch);
  return {x, v};
}

/// Canonical lift of a curve as jets: (b0, b1) = (chi(s), I), pi and lambda from chi'(s).
inline CausalData<Jet> lift_curve(const NullCurve& c, Complex s, int order) {
  const MatrixJet x = c.jet(s, order);
  const MatrixJet v = c.tangent_jet(s, order);
  const SpacetimePoint x0 = value_of(x);
  const double n = frobenius_norm(x0);
  if (!(std::abs(det(x0)) > kSingularTolerance * std::max(1e-300, n * n))) {
    throw Error(ErrorKind::singular_base_point, "x is not invertible");
  }
  const SpacetimePoint v0 = value_of(v);
  if (frobenius_norm(v0) == 0.0) throw Error(ErrorKind::singular_tangent, "chi' vanishes");
  const NullFactors<Jet> f = factor_along(v, select_pivot(v0));
  const Vec2<Jet> lambda_up = inverse(x) * f.lambda;
  const Jet proto = x(0, 0);
  return {x, lift_matrix(identity_matrix(), proto), lower_index(f.pi), lower_index(lambda_up)};
}

struct CausalSample {
  Complex s{};
  bool ok = false;
  std::optional<ErrorKind> error;
  SpacetimePoint x{};        // image point
  SpacetimePoint tangent{};  // d/ds of the image point
  SpacetimePoint v{};        // image null direction from the morphism
  double null_residual = 0.0;
  double consistency = 0.0;  // projective distance between tangent and v
};

inline CausalSample causal_sample(const InvariantCausalMap& m, const NullCurve& c, Complex s,
                                  int order = kDefaultJetOrder) {
  CausalSample out;
  out.s = s;
  try {
    const auto [x, v] = extract_point(apply_causal(m, lift_curve(c, s, order)));
    out.x = value_of(x);
    out.tangent = derivative_matrix(x, 1);
    out.v = value_of(v);
    out.null_residual = relative_null_residual(out.tangent);
    out.consistency = projective_distance(out.tangent, out.v);
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.kind();
  }
  return out;
}

inline std::vector<CausalSample> apply_causal_to_curve(const InvariantCausalMap& m, const NullCurve& c,
                                                       const std::vector<Complex>& samples,
                                                       int order = kDefaultJetOrder) {
  std::vector<CausalSample> out;
  out.reserve(samples.size());
  for (const Complex s : samples) out.push_back(causal_sample(m, c, s, order));
  return out;
}

struct NonlocalityReport {
  /// Projective distance between the two reconstructed image tangents.
  double distance = 0.0;
  /// Distance between the two image points (expected to agree).
  double point_difference = 0.0;
  SpacetimePoint tangent_a{};
  SpacetimePoint tangent_b{};
};

/// Image tangent lambda~ (x) pi~ at s0 through kappa, the map, kappa^{-1} and lambda inversion.
inline std::pair<SpacetimePoint, SpacetimePoint> naive_image_tangent(const TwistorMap& m, const NullCurve& c,
                                                                     Complex s0) {
  const TwistorJet z = kappa(c, s0, kDefaultJetOrder);
  const TwistorJet y = twistor_from(eval_map(m, as_vec4(z)));
  const InverseCorrespondence inv = kappa_inverse(y);
  const Vec2<Complex> lambda = lambda_inverse(y, inv.point);
  return {inv.point, outer(lambda, raise_index(value_of(y.pi)))};
}

inline NonlocalityReport compare_image_tangents(const TwistorMap& m, const NullCurve& a, const NullCurve& b) {
  NonlocalityReport r;
  const auto [xa, ta] = naive_image_tangent(m, a, 0.0);
  const auto [xb, tb] = naive_image_tangent(m, b, 0.0);
  r.tangent_a = ta;
  r.tangent_b = tb;
  r.distance = projective_distance(ta, tb);
  r.point_difference = relative_difference(xa, xb);
  return r;
}

/// Two curves with equal (chi, chi') at s = 0 and different chi'' pushed through the naive route.
inline NonlocalityReport demonstrate_nonlocality(const TwistorMap& m, std::uint64_t seed) {
  CounterRng rng(seed, 0x6e6cULL);
  GPoint g;
  for (auto& row : g.x.m)
    for (auto& e : row) e = rng.complex_normal();
  const Vec2<Complex> l{rng.complex_normal(), rng.complex_normal()};
  const Vec2<Complex> p{rng.complex_normal(), rng.complex_normal()};
  g.v = outer(l, p);
  const std::vector<NullCurve> pair = make_tangent_family(g, derive_seed(seed, 1), 2);
  return compare_image_tangents(m, pair[0], pair[1]);
}

/// First-order beta-plane geometry in U1: exact x_w = b0 (b1 + lam delta^T)^{-1} against
/// x - (x lam)(delta^T b1^{-1}).
inline double beta_plane_residual(const BP1Point& p, const Vec2<Complex>& lambda_up, const Vec2<Complex>& delta) {
  const SpacetimePoint x = patch_coordinates(p);
  const SpacetimePoint exact = p.b0 * inverse(p.b1 + outer(lambda_up, delta));
  const SpacetimePoint first = x - outer(x * lambda_up, left_multiply(delta, inverse(p.b1)));
  return frobenius_norm(exact - first);
}

struct OrderCheck {
  double residual = 0.0;
  double residual_half = 0.0;
  double ratio = 0.0;
};

inline OrderCheck beta_order_check(const BP1Point& p, const Vec2<Complex>& lambda_up, const Vec2<Complex>& delta) {
  OrderCheck c;
  c.residual = beta_plane_residual(p, lambda_up, delta);
  c.residual_half = beta_plane_residual(p, lambda_up, scaled(delta, Complex(0.5)));
  c.ratio = c.residual / c.residual_half;
  return c;
}

}  // namespace nullmorph
