#pragma once

#include <algorithm>
#include <cmath>

#include "nullmorph/jet.hpp"
#include "nullmorph/spinor.hpp"

namespace nullmorph::identities {

// Residuals of the two-spinor identities used to simplify the self-dual
// morphism formulas. Each returns a scale-free number that vanishes when the
// identity holds.

/// max_{BC} |pi_B psi_C - pi_C psi_B - (pi_D psi^D) eps_{BC}|, relative to |pi||psi|.
inline double antisymmetrization_residual(const Vec2<Complex>& pi, const Vec2<Complex>& psi) {
  const Complex contraction = pair_lower(pi, psi);
  const SpacetimePoint eps = epsilon();
  double worst = 0.0;
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c) {
      const Complex lhs = pi[b] * psi[c] - pi[c] * psi[b];
      worst = std::max(worst, std::abs(lhs - contraction * eps(b, c)));
    }
  return worst / std::max(1.0, norm2(pi) * norm2(psi));
}

/// eps_{B'C'} eps^{D'E'} H^{B'}_{D'} H^{C'}_{E'}.
inline Complex double_epsilon_contraction(const SpacetimePoint& h) {
  const SpacetimePoint eps = epsilon();
  Complex sum{};
  for (int b = 0; b < 2; ++b)
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d)
        for (int e = 0; e < 2; ++e) sum += eps(b, c) * eps(d, e) * h(b, d) * h(c, e);
  return sum;
}

/// |2 det H + eps eps H H| / max(1, |H|^2): the determinant identity with the sign as printed.
inline double determinant_identity_residual(const SpacetimePoint& h) {
  const double n = frobenius_norm(h);
  return std::abs(2.0 * det(h) + double_epsilon_contraction(h)) / std::max(1.0, n * n);
}

/// Same contraction with the sign fixed by eps_{01} eps^{01} = +1: |2 det H - eps eps H H|.
inline double determinant_contraction_residual(const SpacetimePoint& h) {
  const double n = frobenius_norm(h);
  return std::abs(2.0 * det(h) - double_epsilon_contraction(h)) / std::max(1.0, n * n);
}

/// H^{B'}_{A'} obtained from H_{A'}^{B'} by raising the first and lowering the second index.
inline SpacetimePoint see_saw(const SpacetimePoint& h) {
  const SpacetimePoint eps = epsilon();
  SpacetimePoint x = zero_matrix();
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a)
      for (int d = 0; d < 2; ++d)
        for (int f = 0; f < 2; ++f) x(b, a) += eps(b, d) * h(d, f) * eps(f, a);
  return x;
}

/// (H^{-1})_{A'}^{B'} = -H^{B'}_{A'} / det H, relative to |H^{-1}|.
inline double inverse_identity_residual(const SpacetimePoint& h) {
  const SpacetimePoint inv = inverse(h);
  const SpacetimePoint raised = see_saw(h);
  const Complex d = det(h);
  SpacetimePoint rhs = zero_matrix();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) rhs(a, b) = -raised(b, a) / d;
  return frobenius_norm(inv - rhs) / std::max(1.0, frobenius_norm(inv));
}

/// d(b^{-1}) = -b^{-1} db b^{-1}, with the left side from the jet of (b + s db)^{-1}.
inline double inverse_differential_residual(const SpacetimePoint& b, const SpacetimePoint& db) {
  MatrixJet path;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      path(r, c) = Jet(1, b(r, c));
      path(r, c).coeff(1) = db(r, c);
    }
  const MatrixJet inv_path = inverse(path);
  SpacetimePoint derivative = zero_matrix();
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) derivative(r, c) = inv_path(r, c).coeff(1);
  const SpacetimePoint b_inv = inverse(b);
  const SpacetimePoint expected = -(b_inv * db * b_inv);
  return frobenius_norm(derivative - expected) / std::max(1.0, frobenius_norm(expected));
}

}  // namespace nullmorph::identities
