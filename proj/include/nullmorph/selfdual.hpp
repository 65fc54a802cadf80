#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "nullmorph/endomorphism.hpp"
#include "nullmorph/errors.hpp"
#include "nullmorph/jet.hpp"
#include "nullmorph/null_curve.hpp"
#include "nullmorph/spinor.hpp"
#include "nullmorph/twistor.hpp"

namespace nullmorph {

/// A twistor map acting on alpha-planes, with the rule for choosing psi.
struct SelfDualMorphism {
  TwistorMap map = Degree1Map{};
};

namespace detail {

inline Vec4<Jet> twistor_line(const Twistor<Complex>& z, const Twistor<Complex>& zdot) {
  const Vec4<Complex> a = as_vec4(z);
  const Vec4<Complex> b = as_vec4(zdot);
  Vec4<Jet> r;
  for (int k = 0; k < 4; ++k) {
    r[k] = Jet(1, a[k]);
    r[k].coeff(1) = b[k];
  }
  return r;
}

inline SpacetimePoint rethrow_as_singular_image(auto&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::singular_correspondence) throw Error(ErrorKind::singular_image, e.what());
    throw;
  }
}

}  // namespace detail

/// f1(x, pi): push z = (i x pi, pi) and zdot = (i x psi, psi) through the map, then invert.
inline FPoint apply_f1(const TwistorMap& m, const FPoint& p, std::optional<Vec2<Complex>> psi = std::nullopt) {
  const Vec2<Complex> dir = psi ? *psi : default_psi(p.pi);
  const Vec4<Jet> y = eval_map(m, detail::twistor_line(twistor_at(p), twistor_tangent(p.x, dir)));
  const Vec2<Complex> omega{y[0].value(), y[1].value()};
  const Vec2<Complex> omega_dot{y[0].coeff(1), y[1].coeff(1)};
  const Vec2<Complex> pi{y[2].value(), y[3].value()};
  const Vec2<Complex> pi_dot{y[2].coeff(1), y[3].coeff(1)};
  const SpacetimePoint k =
      detail::rethrow_as_singular_image([&] { return incidence_matrix(omega, omega_dot, pi, pi_dot); });
  return {k * Complex(0.0, -1.0), normalize_projective(pi)};
}

inline FPoint apply_f1(const SelfDualMorphism& m, const FPoint& p) { return apply_f1(m.map, p); }

/// iξ = (iAχ + B)(iCχ + D)^{-1}.
inline SpacetimePoint moebius_closed_form(const Degree1Map& m, const SpacetimePoint& chi) {
  const Complex i{0.0, 1.0};
  const SpacetimePoint num = m.a() * chi * i + m.b();
  const SpacetimePoint den = m.c() * chi * i + m.d();
  SpacetimePoint den_inv;
  try {
    den_inv = inverse(den);
  } catch (const Error&) {
    throw Error(ErrorKind::singular_denominator, "iC chi + D is singular");
  }
  return num * den_inv * (-i);
}

/// Rows M^{A B'} = pi_{C'} Q_A^{C' B'} with Q_A = chi^T a chi - i chi^T b - i b^T chi - c
/// for the blocks (a b; b^T c) of each quadratic form.
inline SpacetimePoint quadratic_rows(const std::array<Mat4, 2>& forms, const SpacetimePoint& chi,
                                     const Vec2<Complex>& pi) {
  const Complex i{0.0, 1.0};
  SpacetimePoint out = zero_matrix();
  for (int r = 0; r < 2; ++r) {
    const Mat4& t = forms[static_cast<size_t>(r)];
    const SpacetimePoint a{{{{t[0][0], t[0][1]}, {t[1][0], t[1][1]}}}};
    const SpacetimePoint b{{{{t[0][2], t[0][3]}, {t[1][2], t[1][3]}}}};
    const SpacetimePoint c{{{{t[2][2], t[2][3]}, {t[3][2], t[3][3]}}}};
    const SpacetimePoint ct = transpose(chi);
    const SpacetimePoint q = ct * a * chi - ct * b * i - transpose(b) * chi * i - c;
    const Vec2<Complex> row = left_multiply(pi, q);
    out(r, 0) = row[0];
    out(r, 1) = row[1];
  }
  return out;
}

struct MNPair {
  SpacetimePoint m;
  SpacetimePoint n;
};

inline MNPair degree2_mn(const Degree2Map& map, const SpacetimePoint& chi, const Vec2<Complex>& pi) {
  return {quadratic_rows(map.f, chi, pi), quadratic_rows(map.g, chi, pi)};
}

/// Degree-2 closed form iξ = M N^{-1}; π̃ ∝ N π.
inline FPoint degree2_closed_form(const Degree2Map& map, const FPoint& p) {
  const MNPair mn = degree2_mn(map, p.x, p.pi);
  SpacetimePoint n_inv;
  try {
    n_inv = inverse(mn.n);
  } catch (const Error&) {
    throw Error(ErrorKind::singular_denominator, "N is singular");
  }
  return {mn.m * n_inv * Complex(0.0, -1.0), normalize_projective(mn.n * p.pi)};
}

/// Unsimplified ratio before the two-spinor identities are applied:
/// iξ^{AA'} = G^{AB'} H^{A'C'} (π_{B'} ψ_{C'} - π_{C'} ψ_{B'}) / (ε^{D'E'} (Hπ)_{D'} (Hψ)_{E'}),
/// with H^{A'C'} = ε^{A'D'} H_{D'}^{C'}.
inline SpacetimePoint appendix_ratio(const SpacetimePoint& g, const SpacetimePoint& h, const Vec2<Complex>& pi,
                                     const Vec2<Complex>& psi) {
  const SpacetimePoint eps = epsilon();
  const SpacetimePoint h_up = eps * h;
  const SpacetimePoint wedge = outer(pi, psi) - outer(psi, pi);
  SpacetimePoint num = zero_matrix();
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < 2; ++ap)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) num(a, ap) += g(a, b) * h_up(ap, c) * wedge(b, c);
  const Vec2<Complex> hp = h * pi;
  const Vec2<Complex> hq = h * psi;
  Complex den{};
  for (int d = 0; d < 2; ++d)
    for (int e = 0; e < 2; ++e) den += eps(d, e) * hp[d] * hq[e];
  if (!(std::abs(den) > kCorrespondenceTolerance * frobenius_norm(h) * frobenius_norm(h) * norm2(pi) * norm2(psi))) {
    throw Error(ErrorKind::singular_denominator, "ratio denominator vanishes");
  }
  return num * (1.0 / den);
}

inline SpacetimePoint appendix_form(const Degree1Map& m, const FPoint& p, std::optional<Vec2<Complex>> psi = {}) {
  const Complex i{0.0, 1.0};
  const SpacetimePoint g = m.a() * p.x * i + m.b();
  const SpacetimePoint h = m.c() * p.x * i + m.d();
  return appendix_ratio(g, h, p.pi, psi ? *psi : default_psi(p.pi)) * (-i);
}

inline SpacetimePoint appendix_form(const Degree2Map& m, const FPoint& p, std::optional<Vec2<Complex>> psi = {}) {
  const MNPair mn = degree2_mn(m, p.x, p.pi);
  return appendix_ratio(mn.m, mn.n, p.pi, psi ? *psi : default_psi(p.pi)) * Complex(0.0, -1.0);
}

/// One sample of an image curve.
struct SampleImage {
  Complex s{};
  bool ok = false;
  std::optional<ErrorKind> error;
  SpacetimePoint xi{};
  MatrixJet xi_jet{};
  Vec2<Complex> pi_tilde{};
  double null_residual = 0.0;   // |det ξ'| / |ξ'|^2
  double alpha_residual = 0.0;  // |ξ' π̃| / (|ξ'| |π̃|)
};

inline Vec4<Jet> as_jets(const TwistorJet& z) { return as_vec4(z); }

/// Image of a null curve through κ, the twistor map and κ^{-1}, with jets at each sample.
inline SampleImage image_sample(const TwistorMap& m, const NullCurve& c, Complex s, int order = kDefaultJetOrder) {
  SampleImage out;
  out.s = s;
  try {
    const TwistorJet z = kappa(c, s, order);
    const TwistorJet y = twistor_from(eval_map(m, as_jets(z)));
    InverseCorrespondence inv;
    try {
      inv = kappa_inverse(y);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::singular_correspondence) throw Error(ErrorKind::singular_image, e.what());
      throw;
    }
    out.xi = inv.point;
    out.xi_jet = inv.jet;
    out.pi_tilde = normalize_projective(value_of(y.pi));
    const SpacetimePoint tangent = derivative_matrix(inv.jet, 1);
    out.null_residual = relative_null_residual(tangent);
    const double scale = frobenius_norm(tangent) * norm2(out.pi_tilde);
    out.alpha_residual = scale == 0.0 ? 0.0 : norm2(tangent * out.pi_tilde) / scale;
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.kind();
  }
  return out;
}

inline std::vector<SampleImage> apply_to_curve(const TwistorMap& m, const NullCurve& c,
                                               const std::vector<Complex>& samples, int order = kDefaultJetOrder) {
  std::vector<SampleImage> out;
  out.reserve(samples.size());
  for (const Complex s : samples) out.push_back(image_sample(m, c, s, order));
  return out;
}

struct LocalityReport {
  int curves = 0;
  int failures = 0;
  double point_spread = 0.0;
  double pi_spread = 0.0;
  /// Distance of the family's image from apply_f1 at the same point.
  double pipeline_distance = 0.0;
};

/// Images of n alpha-tangent curves through p must agree at s = 0.
inline LocalityReport verify_locality_F(const TwistorMap& m, const FPoint& p, int n_curves, std::uint64_t seed,
                                        FamilyOptions opts = {}) {
  LocalityReport r;
  const std::vector<NullCurve> family = make_tangent_family(p, seed, n_curves, opts);
  std::optional<SampleImage> first;
  const FPoint direct = apply_f1(m, p);
  for (const NullCurve& c : family) {
    const SampleImage img = image_sample(m, c, 0.0);
    ++r.curves;
    if (!img.ok) {
      ++r.failures;
      continue;
    }
    if (!first) first = img;
    r.point_spread = std::max(r.point_spread, relative_difference(img.xi, first->xi));
    r.pi_spread = std::max(r.pi_spread, projective_distance(img.pi_tilde, first->pi_tilde));
    r.pipeline_distance = std::max(r.pipeline_distance, relative_difference(img.xi, direct.x));
    r.pipeline_distance = std::max(r.pipeline_distance, projective_distance(img.pi_tilde, direct.pi));
  }
  return r;
}

}  // namespace nullmorph
