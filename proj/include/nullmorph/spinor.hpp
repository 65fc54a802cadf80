#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>

#include "nullmorph/errors.hpp"
#include "nullmorph/jet.hpp"

namespace nullmorph {

// Two-spinor conventions used throughout:
//   eps_{01} = eps^{01} = +1 for primed and unprimed indices alike,
//   raising  k^A = eps^{AB} k_B   ->  (k^0, k^1) = ( k_1, -k_0),
//   lowering k_B = k^A eps_{AB}   ->  (k_0, k_1) = (-k^1,  k^0).
// A point x^{AA'} of C^4 is a 2x2 matrix with row A and column A'.

template <class T>
using Vec2 = std::array<T, 2>;

template <class T>
using Vec4 = std::array<T, 4>;

/// 2x2 matrix over T, row-major: m[row][col].
template <class T>
struct Mat2 {
  std::array<std::array<T, 2>, 2> m;

  T& operator()(int r, int c) { return m[r][c]; }
  const T& operator()(int r, int c) const { return m[r][c]; }


  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r = a;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] += b.m[i][j];
    return r;
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r = a;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.m[i][j] -= b.m[i][j];
    return r;
  }
  friend Mat2 operator-(const Mat2& a) {
    Mat2 r = a;
    for (auto& row : r.m)
      for (auto& e : row) e = -e;
    return r;
  }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r{{{{a.m[0][0] * b.m[0][0] + a.m[0][1] * b.m[1][0], a.m[0][0] * b.m[0][1] + a.m[0][1] * b.m[1][1]},
             {a.m[1][0] * b.m[0][0] + a.m[1][1] * b.m[1][0], a.m[1][0] * b.m[0][1] + a.m[1][1] * b.m[1][1]}}}};
    return r;
  }
  template <class S>
  friend Mat2 operator*(const Mat2& a, const S& s) {
    Mat2 r = a;
    for (auto& row : r.m)
      for (auto& e : row) e = e * s;
    return r;
  }
  template <class S>
  friend Mat2 operator*(const S& s, const Mat2& a) {
    return a * s;
  }
  friend Vec2<T> operator*(const Mat2& a, const Vec2<T>& v) {
    return {a.m[0][0] * v[0] + a.m[0][1] * v[1], a.m[1][0] * v[0] + a.m[1][1] * v[1]};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

using SpacetimePoint = Mat2<Complex>;
using MatrixJet = Mat2<Jet>;

template <class T>
Mat2<T> transpose(const Mat2<T>& a) {
  return {{{{a.m[0][0], a.m[1][0]}, {a.m[0][1], a.m[1][1]}}}};
}

template <class T>
T det(const Mat2<T>& a) {
  return a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0];
}

template <class T>
Mat2<T> adjugate(const Mat2<T>& a) {
  return {{{{a.m[1][1], -a.m[0][1]}, {-a.m[1][0], a.m[0][0]}}}};
}

/// Row vector times matrix: (v^T a)_j.
template <class T>
Vec2<T> left_multiply(const Vec2<T>& v, const Mat2<T>& a) {
  return {v[0] * a.m[0][0] + v[1] * a.m[1][0], v[0] * a.m[0][1] + v[1] * a.m[1][1]};
}

/// Outer product u^A w^{A'}.
template <class T>
Mat2<T> outer(const Vec2<T>& u, const Vec2<T>& w) {
  return {{{{u[0] * w[0], u[0] * w[1]}, {u[1] * w[0], u[1] * w[1]}}}};
}

template <class T>
T dot(const Vec2<T>& a, const Vec2<T>& b) {
  return a[0] * b[0] + a[1] * b[1];
}

template <class T>
Vec2<T> scaled(const Vec2<T>& v, const T& s) {
  return {v[0] * s, v[1] * s};
}

template <class T>
Mat2<T> map_values(const Mat2<T>& a, auto&& f) {
  return {{{{f(a.m[0][0]), f(a.m[0][1])}, {f(a.m[1][0]), f(a.m[1][1])}}}};
}

inline SpacetimePoint value_of(const MatrixJet& a) {
  return {{{{a.m[0][0].value(), a.m[0][1].value()}, {a.m[1][0].value(), a.m[1][1].value()}}}};
}

inline SpacetimePoint value_of(const SpacetimePoint& a) { return a; }

inline Vec2<Complex> value_of(const Vec2<Jet>& v) { return {v[0].value(), v[1].value()}; }
inline Vec2<Complex> value_of(const Vec2<Complex>& v) { return v; }

/// A constant of the same kind (and jet order) as `proto`.
inline Complex constant_like(Complex, Complex c) { return c; }
inline Jet constant_like(const Jet& proto, Complex c) { return Jet::constant(proto.order(), c); }

template <class T>
Mat2<T> lift_matrix(const SpacetimePoint& a, const T& proto) {
  return {{{{constant_like(proto, a(0, 0)), constant_like(proto, a(0, 1))},
            {constant_like(proto, a(1, 0)), constant_like(proto, a(1, 1))}}}};
}

template <class T>
Vec2<T> lift_vector(const Vec2<Complex>& v, const T& proto) {
  return {constant_like(proto, v[0]), constant_like(proto, v[1])};
}

inline SpacetimePoint identity_matrix() { return {{{{1.0, 0.0}, {0.0, 1.0}}}}; }
inline SpacetimePoint zero_matrix() { return {{{{0.0, 0.0}, {0.0, 0.0}}}}; }

// --- norms ---------------------------------------------------------------

inline double frobenius_norm(const SpacetimePoint& a) {
  double s = 0.0;
  for (const auto& row : a.m)
    for (const auto& e : row) s += std::norm(e);
  return std::sqrt(s);
}

inline double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& e : v) s += std::norm(e);
  return std::sqrt(s);
}

inline double norm2(const Vec2<Complex>& v) { return norm2(std::span<const Complex>(v)); }

inline std::array<Complex, 4> flatten(const SpacetimePoint& a) {
  return {a.m[0][0], a.m[0][1], a.m[1][0], a.m[1][1]};
}

/// ||a - b||_F / max(1, ||b||_F).
inline double relative_difference(const SpacetimePoint& a, const SpacetimePoint& b) {
  return frobenius_norm(a - b) / std::max(1.0, frobenius_norm(b));
}

/// Index raising/lowering on raw components (see convention note above).
template <class T>
Vec2<T> raise_index(const Vec2<T>& lower) {
  return {lower[1], -lower[0]};
}

template <class T>
Vec2<T> lower_index(const Vec2<T>& upper) {
  return {-upper[1], upper[0]};
}

/// The matrix eps_{AB} (equal to eps^{AB} numerically).
inline SpacetimePoint epsilon() { return {{{{0.0, 1.0}, {-1.0, 0.0}}}}; }

/// a_A b^A for a lower-index a and upper-index b.
template <class T>
T pair(const Vec2<T>& a_lower, const Vec2<T>& b_upper) {
  return a_lower[0] * b_upper[0] + a_lower[1] * b_upper[1];
}

/// a_A b^A with both spinors given lower: equals a_0 b_1 - a_1 b_0.
template <class T>
T pair_lower(const Vec2<T>& a_lower, const Vec2<T>& b_lower) {
  return pair(a_lower, raise_index(b_lower));
}

// --- tagged spinors ------------------------------------------------------

enum class Variance { upper, lower };
enum class Priming { unprimed, primed };

/// Complex two-component spinor carrying its index type.
struct Spinor {
  Vec2<Complex> c{};
  Variance variance = Variance::upper;
  Priming priming = Priming::unprimed;

  Complex operator[](int i) const { return c[static_cast<size_t>(i)]; }
  friend bool operator==(const Spinor&, const Spinor&) = default;
};

inline Spinor raise(const Spinor& s) {
  if (s.variance != Variance::lower) throw Error(ErrorKind::contraction_error, "raise expects a lower-index spinor");
  return {raise_index(s.c), Variance::upper, s.priming};
}

inline Spinor lower(const Spinor& s) {
  if (s.variance != Variance::upper) throw Error(ErrorKind::contraction_error, "lower expects an upper-index spinor");
  return {lower_index(s.c), Variance::lower, s.priming};
}

/// a_A b^A, moving indices as needed. Antisymmetric in (a, b).
inline Complex contract(const Spinor& a, const Spinor& b) {
  if (a.priming != b.priming) throw Error(ErrorKind::contraction_error, "primed/unprimed mismatch");
  const Vec2<Complex> a_lower = a.variance == Variance::lower ? a.c : lower_index(a.c);
  const Vec2<Complex> b_upper = b.variance == Variance::upper ? b.c : raise_index(b.c);
  return pair(a_lower, b_upper);
}

// --- points of C^4 -------------------------------------------------------

inline constexpr double kNullTolerance = 1e-10;
inline constexpr double kSingularTolerance = 1e-12;

/// <v,v> = 2 det v.
inline Complex minkowski_norm(const SpacetimePoint& v) { return 2.0 * det(v); }

inline bool is_null(const SpacetimePoint& v, double tol = kNullTolerance) {
  const double n = frobenius_norm(v);
  return std::abs(det(v)) <= tol * std::max(1.0, n * n);
}

/// |det v| / ||v||^2, the scale-free nullness residual (0 for v = 0).
inline double relative_null_residual(const SpacetimePoint& v) {
  const double n = frobenius_norm(v);
  return n == 0.0 ? 0.0 : std::abs(det(v)) / (n * n);
}

template <class T>
Mat2<T> inverse(const Mat2<T>& a) {
  const T d = det(a);
  if constexpr (std::is_same_v<T, Complex>) {
    const double scale = std::max(1e-300, frobenius_norm(a) * frobenius_norm(a));
    if (!(std::abs(d) > kSingularTolerance * scale)) throw Error(ErrorKind::singular_matrix, "2x2 matrix is singular");
    return adjugate(a) * (1.0 / d);
  } else {
    const T inv_d = Complex(1.0) / d;
    return adjugate(a) * inv_d;
  }
}

inline SpacetimePoint invert2x2(const SpacetimePoint& b) { return inverse(b); }

/// Entry of largest modulus, first index on ties. Fixes the factorization branch.
struct Pivot {
  int row = 0;
  int col = 0;
};

inline Pivot select_pivot(const SpacetimePoint& v) {
  Pivot p;
  double best = -1.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      if (std::abs(v(r, c)) > best) {
        best = std::abs(v(r, c));
        p = {r, c};
      }
  return p;
}

template <class T>
struct NullFactors {
  Vec2<T> lambda;  // unprimed, upper
  Vec2<T> pi;      // primed, upper
};

/// Rank-1 factorization v = lambda (x) pi along a fixed pivot.
///
/// pi is row `pivot.row` scaled so pi[pivot.col] = 1; lambda is column
/// `pivot.col`. With the pivot chosen at the expansion point this is a
/// holomorphic branch, so it is applied unchanged to jets.
template <class T>
NullFactors<T> factor_along(const Mat2<T>& v, Pivot pivot) {
  const T& p = v(pivot.row, pivot.col);
  NullFactors<T> f;
  f.pi = {v(pivot.row, 0) / p, v(pivot.row, 1) / p};
  f.lambda = {v(0, pivot.col), v(1, pivot.col)};
  return f;
}

/// Factor a null vector v^{AA'} = lambda^A pi^{A'}; the max-modulus component of pi is 1.
inline std::pair<Spinor, Spinor> null_factorize(const SpacetimePoint& v, double tol = kNullTolerance) {
  if (frobenius_norm(v) == 0.0) throw Error(ErrorKind::zero_vector, "cannot factor the zero vector");
  if (!is_null(v, tol)) throw Error(ErrorKind::not_null, "vector is not null");
  const auto f = factor_along(v, select_pivot(v));
  return {Spinor{f.lambda, Variance::upper, Priming::unprimed}, Spinor{f.pi, Variance::upper, Priming::primed}};
}

/// Chordal distance between the complex lines through u and w, in [0, 1].
///
/// Evaluated through the Lagrange identity, sum_{i<j} |u_i w_j - u_j w_i|^2,
/// so it resolves distances near zero without cancellation.
inline double projective_distance(std::span<const Complex> u, std::span<const Complex> w) {
  const double nu = norm2(u);
  const double nw = norm2(w);
  if (nu == 0.0 || nw == 0.0) throw Error(ErrorKind::zero_vector, "projective distance of a zero vector");
  if (u.size() != w.size()) throw Error(ErrorKind::config_invalid, "projective distance of vectors of different length");
  double wedge = 0.0;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j) wedge += std::norm((u[i] / nu) * (w[j] / nw) - (u[j] / nu) * (w[i] / nw));
  return std::min(1.0, std::sqrt(wedge));
}

inline double projective_distance(const Vec2<Complex>& u, const Vec2<Complex>& w) {
  return projective_distance(std::span<const Complex>(u), std::span<const Complex>(w));
}

inline double projective_distance(const SpacetimePoint& u, const SpacetimePoint& w) {
  const auto a = flatten(u);
  const auto b = flatten(w);
  return projective_distance(std::span<const Complex>(a), std::span<const Complex>(b));
}

/// Rescale so the max-modulus component equals 1.
template <size_t N>
std::array<Complex, N> normalize_projective(std::array<Complex, N> v) {
  const auto it = std::max_element(v.begin(), v.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  if (std::abs(*it) == 0.0) throw Error(ErrorKind::zero_vector, "cannot normalize the zero vector");
  const Complex s = 1.0 / *it;
  for (auto& e : v) e *= s;
  return v;
}

inline bool all_finite(const SpacetimePoint& a) {
  for (const auto& row : a.m)
    for (const auto& e : row)
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  return true;
}

}  // namespace nullmorph
