#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nullmorph/errors.hpp"
#include "nullmorph/jet.hpp"
#include "nullmorph/random.hpp"
#include "nullmorph/spinor.hpp"

namespace nullmorph {

using PolySpinor = std::array<Poly, 2>;
using PolyMatrix = std::array<std::array<Poly, 2>, 2>;

/// A point of the twistor correspondence space: x with an alpha-plane spinor pi_{A'} (lower, projective).
struct FPoint {
  SpacetimePoint x;
  Vec2<Complex> pi;
};

/// A point of the ambitwistor correspondence space: x with a null direction v (projective).
struct GPoint {
  SpacetimePoint x;
  SpacetimePoint v;
};

/// Polynomial null curve chi(s) = base + int_0^s lambda(t) pi(t)^T dt.
///
/// The tangent lambda^A pi^{A'} is rank one identically, so nullness holds by
/// construction; chi is stored as its exact polynomial antiderivative.
struct NullCurve {
  SpacetimePoint base;
  PolySpinor lambda;  // lambda^A(s)
  PolySpinor pi;      // pi^{A'}(s), upper index
  PolyMatrix chi;

  SpacetimePoint point(Complex s) const {
    SpacetimePoint r;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) r(a, b) = eval_poly(chi[a][b], s);
    return r;
  }

  Vec2<Complex> lambda_at(Complex s) const { return {eval_poly(lambda[0], s), eval_poly(lambda[1], s)}; }
  Vec2<Complex> pi_at(Complex s) const { return {eval_poly(pi[0], s), eval_poly(pi[1], s)}; }

  SpacetimePoint tangent(Complex s) const { return outer(lambda_at(s), pi_at(s)); }

  /// Jet of chi at s0.
  MatrixJet jet(Complex s0, int order) const {
    MatrixJet j;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) j(a, b) = eval_poly_jet(chi[a][b], s0, order);
    return j;
  }

  /// Jet of d chi / ds at s0, from lambda and pi directly.
  MatrixJet tangent_jet(Complex s0, int order) const {
    const Vec2<Jet> l{eval_poly_jet(lambda[0], s0, order), eval_poly_jet(lambda[1], s0, order)};
    const Vec2<Jet> p{eval_poly_jet(pi[0], s0, order), eval_poly_jet(pi[1], s0, order)};
    return outer(l, p);
  }

  FPoint f_point(Complex s) const { return {point(s), lower_index(pi_at(s))}; }
  GPoint g_point(Complex s) const { return {point(s), tangent(s)}; }
};

inline NullCurve make_null_curve(const SpacetimePoint& base, const PolySpinor& lambda, const PolySpinor& pi) {
  if ((poly_is_zero(lambda[0]) && poly_is_zero(lambda[1])) || (poly_is_zero(pi[0]) && poly_is_zero(pi[1]))) {
    throw Error(ErrorKind::degenerate_curve, "lambda or pi vanishes identically");
  }
  NullCurve c{base, lambda, pi, {}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      Poly p = poly_integral(poly_mul(lambda[a], pi[b]));
      if (p.empty()) p.resize(1);
      p[0] += base(a, b);
      c.chi[a][b] = std::move(p);
    }
  return c;
}

/// Eight fixed sample parameters in the disc |s| <= 0.9.
inline std::vector<Complex> default_sample_points() {
  CounterRng rng(0x5a3b1e5ULL);
  std::vector<Complex> pts;
  pts.reserve(8);
  for (int i = 0; i < 8; ++i) pts.push_back(rng.in_disc(0.9));
  return pts;
}

struct DegreeBounds {
  int lambda = 1;
  int pi = 1;
};

struct CurveOptions {
  std::vector<Complex> sample_points = default_sample_points();
  int max_retries = 64;
  double threshold = 1e-6;
  /// Also require pi_{A'} d(pi)^{A'} away from zero at the samples (needed by the inverse correspondence).
  bool require_invertible = true;
};

inline Poly random_poly(CounterRng& rng, int degree) {
  Poly p(static_cast<size_t>(degree) + 1);
  for (auto& c : p) c = rng.complex_normal();
  return p;
}

/// |pi_{A'} dpi^{A'}| / (|pi| |dpi|) along a curve; 0 where dpi vanishes.
inline double pi_rotation(const NullCurve& c, Complex s) {
  const Vec2<Complex> p = c.pi_at(s);
  const Vec2<Complex> dp{eval_poly(poly_derivative(c.pi[0]), s), eval_poly(poly_derivative(c.pi[1]), s)};
  const double scale = norm2(p) * norm2(dp);
  return scale == 0.0 ? 0.0 : std::abs(pair(lower_index(p), dp)) / scale;
}

inline bool is_nonsingular(const NullCurve& c, const CurveOptions& opts, bool check_rotation) {
  for (const Complex s : opts.sample_points) {
    if (frobenius_norm(c.tangent(s)) < opts.threshold) return false;
    if (check_rotation && pi_rotation(c, s) < opts.threshold) return false;
  }
  return true;
}

/// Seeded random polynomial null curve, resampled until nonsingular at every sample point.
inline NullCurve random_null_curve(std::uint64_t seed, DegreeBounds degrees = {}, const CurveOptions& opts = {}) {
  const bool check_rotation = opts.require_invertible && degrees.pi >= 1;
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    CounterRng rng(seed, static_cast<std::uint64_t>(attempt));
    SpacetimePoint base;
    for (auto& row : base.m)
      for (auto& e : row) e = rng.complex_normal();
    PolySpinor lambda{random_poly(rng, degrees.lambda), random_poly(rng, degrees.lambda)};
    PolySpinor pi{random_poly(rng, degrees.pi), random_poly(rng, degrees.pi)};
    NullCurve c = make_null_curve(base, lambda, pi);
    if (is_nonsingular(c, opts, check_rotation)) return c;
  }
  throw Error(ErrorKind::generation_exhausted, "no nonsingular null curve within the retry budget");
}

struct Tangency {
  bool same_point = false;
  bool tangent = false;        // chi' directions agree (first-order contact in G)
  bool alpha_tangent = false;  // alpha-plane spinors agree (contact in F)
  int order = -1;              // highest k with equal k-jets of chi; -1 if the points differ
};

inline Tangency tangent_pair_at(const NullCurve& a, const NullCurve& b, Complex s0, Complex t0, double tol = 1e-9) {
  Tangency t;
  const MatrixJet ja = a.jet(s0, 3);
  const MatrixJet jb = b.jet(t0, 3);
  auto coeff_matrix = [](const MatrixJet& j, int k) {
    SpacetimePoint m;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = j(r, c).coeff(k);
    return m;
  };
  t.same_point = relative_difference(coeff_matrix(ja, 0), coeff_matrix(jb, 0)) <= tol;
  if (!t.same_point) return t;
  t.order = 0;
  for (int k = 1; k <= 3; ++k) {
    if (relative_difference(coeff_matrix(ja, k), coeff_matrix(jb, k)) > tol) break;
    t.order = k;
  }
  const SpacetimePoint va = a.tangent(s0);
  const SpacetimePoint vb = b.tangent(t0);
  if (frobenius_norm(va) == 0.0 || frobenius_norm(vb) == 0.0) return t;
  t.tangent = projective_distance(va, vb) <= tol;
  t.alpha_tangent = projective_distance(null_factorize(va).second.c, null_factorize(vb).second.c) <= tol;
  return t;
}

struct FamilyOptions {
  int lambda_degree = 2;
  int pi_degree = 2;
  /// Scale of the coefficients beyond the prescribed data; 0 gives null lines.
  double higher_scale = 1.0;
};

namespace detail {

inline Poly with_constant(CounterRng& rng, Complex c0, int degree, double scale) {
  Poly p = random_poly(rng, degree);
  p[0] = c0;
  for (size_t i = 1; i < p.size(); ++i) p[i] *= scale;
  return p;
}

}  // namespace detail

/// Curves through p.x, all tangent to the alpha-plane p.pi at s = 0; lambda(0) is drawn per curve.
inline std::vector<NullCurve> make_tangent_family(const FPoint& p, std::uint64_t seed, int n, FamilyOptions opts = {}) {
  const Vec2<Complex> pi0 = raise_index(p.pi);
  std::vector<NullCurve> curves;
  curves.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    const Vec2<Complex> lambda0{rng.complex_normal(), rng.complex_normal()};
    PolySpinor lambda{detail::with_constant(rng, lambda0[0], opts.lambda_degree, opts.higher_scale),
                      detail::with_constant(rng, lambda0[1], opts.lambda_degree, opts.higher_scale)};
    PolySpinor pi{detail::with_constant(rng, pi0[0], opts.pi_degree, opts.higher_scale),
                  detail::with_constant(rng, pi0[1], opts.pi_degree, opts.higher_scale)};
    curves.push_back(make_null_curve(p.x, lambda, pi));
  }
  return curves;
}

/// Curves through g.x with tangent exactly g.v at s = 0, differing from second order on.
inline std::vector<NullCurve> make_tangent_family(const GPoint& g, std::uint64_t seed, int n, FamilyOptions opts = {}) {
  const auto [lambda0, pi0] = null_factorize(g.v);
  std::vector<NullCurve> curves;
  curves.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    PolySpinor lambda{detail::with_constant(rng, lambda0[0], opts.lambda_degree, opts.higher_scale),
                      detail::with_constant(rng, lambda0[1], opts.lambda_degree, opts.higher_scale)};
    PolySpinor pi{detail::with_constant(rng, pi0[0], opts.pi_degree, opts.higher_scale),
                  detail::with_constant(rng, pi0[1], opts.pi_degree, opts.higher_scale)};
    curves.push_back(make_null_curve(g.x, lambda, pi));
  }
  return curves;
}

}  // namespace nullmorph
