#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>

#include "nullmorph/errors.hpp"
#include "nullmorph/jet.hpp"
#include "nullmorph/random.hpp"
#include "nullmorph/spinor.hpp"
#include "nullmorph/twistor.hpp"

namespace nullmorph {

using Mat4 = std::array<std::array<Complex, 4>, 4>;
using Tensor3 = std::array<std::array<std::array<Complex, 2>, 2>, 2>;  // t[i][B][C]

inline Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline Mat4 symmetrized(const Mat4& a) {
  Mat4 r{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r[i][j] = 0.5 * (a[i][j] + a[j][i]);
  return r;
}

inline bool is_symmetric(const Mat4& a) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j)
      if (a[i][j] != a[j][i]) return false;
  return true;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline Complex det4(Mat4 a) {
  Complex d = 1.0;
  for (int c = 0; c < 4; ++c) {
    int p = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == Complex{}) return 0.0;
    if (p != c) {
      std::swap(a[p], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const Complex f = a[r][c] / a[c][c];
      for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return d;
}

inline double frobenius_norm(const Mat4& a) {
  double s = 0.0;
  for (const auto& row : a)
    for (const auto& e : row) s += std::norm(e);
  return std::sqrt(s);
}

/// Projective transformation z -> F z, F in 2x2 blocks (A B; C D).
struct Degree1Map {
  Mat4 f = identity4();

  SpacetimePoint block(int r, int c) const {
    return {{{{f[2 * r][2 * c], f[2 * r][2 * c + 1]}, {f[2 * r + 1][2 * c], f[2 * r + 1][2 * c + 1]}}}};
  }
  SpacetimePoint a() const { return block(0, 0); }
  SpacetimePoint b() const { return block(0, 1); }
  SpacetimePoint c() const { return block(1, 0); }
  SpacetimePoint d() const { return block(1, 1); }

  static Degree1Map from_blocks(const SpacetimePoint& a, const SpacetimePoint& b, const SpacetimePoint& c,
                                const SpacetimePoint& d) {
    Degree1Map m;
    const SpacetimePoint* blocks[2][2] = {{&a, &b}, {&c, &d}};
    for (int r = 0; r < 4; ++r)
      for (int k = 0; k < 4; ++k) m.f[r][k] = (*blocks[r / 2][k / 2])(r % 2, k % 2);
    return m;
  }
};

/// Quadratic map y = (z^T F^0 z, z^T F^1 z, z^T G_0 z, z^T G_1 z) with symmetric F, G.
struct Degree2Map {
  std::array<Mat4, 2> f{};
  std::array<Mat4, 2> g{};

  Degree2Map() = default;
  Degree2Map(const std::array<Mat4, 2>& f_in, const std::array<Mat4, 2>& g_in)
      : f{symmetrized(f_in[0]), symmetrized(f_in[1])}, g{symmetrized(g_in[0]), symmetrized(g_in[1])} {}

  const Mat4& component(int k) const { return k < 2 ? f[static_cast<size_t>(k)] : g[static_cast<size_t>(k - 2)]; }
};

/// The right-action invariant family on (z, w):
///   z~ = (a w^B lam^C + b (mu.pi), c w^B lam^C + d (mu.pi)),
///   w~ = (e w^B lam^C + f (mu.pi), g w^B lam^C + h (mu.pi)),
/// with w^B = omega^B and lam^C the raised lambda_C.
struct InvariantCausalMap {
  Tensor3 a{}, c{}, e{}, g{};
  Vec2<Complex> b{}, d{}, f{}, h{};
};

using TwistorMap = std::variant<Degree1Map, Degree2Map>;

inline int degree(const TwistorMap& m) { return std::holds_alternative<Degree1Map>(m) ? 1 : 2; }

namespace detail {

template <class T>
void require_nonzero(const Vec4<T>& z) {
  double n = 0.0;
  for (const auto& c : z) n += std::norm(value_of(c));
  if (n == 0.0) throw Error(ErrorKind::zero_vector, "endomorphism applied to the zero vector");
}

template <class T>
T bilinear(const Mat4& m, const Vec4<T>& u, const Vec4<T>& v) {
  T s = constant_like(u[0], 0.0);
  for (int i = 0; i < 4; ++i) {
    T row = constant_like(u[0], 0.0);
    for (int j = 0; j < 4; ++j) row += v[j] * m[i][j];
    s += u[i] * row;
  }
  return s;
}

}  // namespace detail

template <class T>
Vec4<T> eval_map(const Degree1Map& m, const Vec4<T>& z) {
  detail::require_nonzero(z);
  Vec4<T> y;
  for (int i = 0; i < 4; ++i) {
    y[i] = constant_like(z[0], 0.0);
    for (int j = 0; j < 4; ++j) y[i] += z[j] * m.f[i][j];
  }
  return y;
}

template <class T>
Vec4<T> eval_map(const Degree2Map& m, const Vec4<T>& z) {
  detail::require_nonzero(z);
  Vec4<T> y;
  for (int k = 0; k < 4; ++k) y[k] = detail::bilinear(m.component(k), z, z);
  return y;
}

template <class T>
Vec4<T> eval_map(const TwistorMap& m, const Vec4<T>& z) {
  return std::visit([&](const auto& map) { return eval_map(map, z); }, m);
}

/// Pushforward of a tangent vector: F zdot, or 2 (z^T F zdot, z^T G zdot).
inline Vec4<Complex> push_tangent(const Degree1Map& m, const Vec4<Complex>&, const Vec4<Complex>& zdot) {
  Vec4<Complex> y{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) y[i] += m.f[i][j] * zdot[j];
  return y;
}

inline Vec4<Complex> push_tangent(const Degree2Map& m, const Vec4<Complex>& z, const Vec4<Complex>& zdot) {
  Vec4<Complex> y{};
  for (int k = 0; k < 4; ++k) y[k] = 2.0 * detail::bilinear(m.component(k), z, zdot);
  return y;
}

inline Degree1Map compose(const Degree1Map& outer_map, const Degree1Map& inner_map) {
  return {outer_map.f * inner_map.f};
}

struct BasePointReport {
  bool pass = false;
  /// min ||F(z)|| / ||z||^d found over the search.
  double min_ratio = 0.0;
  Vec4<Complex> argmin{};
  int samples = 0;
};

inline constexpr double kBasePointThreshold = 1e-6;

inline BasePointReport check_base_point_free(const Degree1Map& m, int = 0, std::uint64_t = 0) {
  BasePointReport r;
  const double n = frobenius_norm(m.f);
  const double rel = n == 0.0 ? 0.0 : std::abs(det4(m.f)) / std::pow(n, 4);
  r.min_ratio = rel;
  r.pass = rel > kSingularTolerance;
  r.samples = 1;
  return r;
}

namespace detail {

inline double unit_normalize(Vec4<Complex>& z) {
  const double n = norm2(std::span<const Complex>(z));
  for (auto& c : z) c /= n;
  return n;
}

inline double residual_sq(const Degree2Map& m, const Vec4<Complex>& z) {
  const Vec4<Complex> y = eval_map(m, z);
  return norm2(std::span<const Complex>(y)) * norm2(std::span<const Complex>(y));
}

}  // namespace detail

/// Random restarts plus projected Wirtinger gradient descent of ||F(z)||^2 on the unit sphere.
inline BasePointReport check_base_point_free(const Degree2Map& m, int trials = 32, std::uint64_t seed = 0) {
  BasePointReport r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    Vec4<Complex> z;
    for (auto& c : z) c = rng.complex_normal();
    detail::unit_normalize(z);
    double fz = detail::residual_sq(m, z);
    double step = 0.25;
    for (int it = 0; it < 200 && step > 1e-14; ++it) {
      // d||y||^2 / d conj(z) = sum_k y_k conj(2 T_k z).
      const Vec4<Complex> y = eval_map(m, z);
      Vec4<Complex> grad{};
      for (int k = 0; k < 4; ++k) {
        const Mat4& tk = m.component(k);
        for (int i = 0; i < 4; ++i) {
          Complex tz{};
          for (int j = 0; j < 4; ++j) tz += tk[i][j] * z[j];
          grad[i] += y[k] * std::conj(2.0 * tz);
        }
      }
      Vec4<Complex> trial;
      for (int i = 0; i < 4; ++i) trial[i] = z[i] - step * grad[i];
      detail::unit_normalize(trial);
      const double ft = detail::residual_sq(m, trial);
      if (ft < fz) {
        z = trial;
        fz = ft;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    ++r.samples;
    const double ratio = std::sqrt(fz);
    if (ratio < r.min_ratio) {
      r.min_ratio = ratio;
      r.argmin = z;
    }
  }
  r.pass = r.min_ratio > kBasePointThreshold;
  return r;
}

inline BasePointReport check_base_point_free(const TwistorMap& m, int trials = 32, std::uint64_t seed = 0) {
  return std::visit([&](const auto& map) { return check_base_point_free(map, trials, seed); }, m);
}

/// t_{iBC} v^C as a matrix (i, B).
inline SpacetimePoint contract_c(const Tensor3& t, const Vec2<Complex>& v) {
  SpacetimePoint r = zero_matrix();
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) r(i, b) += t[i][b][c] * v[c];
  return r;
}

/// t_{iBC} u^B as a matrix (i, C).
inline SpacetimePoint contract_b(const Tensor3& t, const Vec2<Complex>& u) {
  SpacetimePoint r = zero_matrix();
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) r(i, c) += t[i][b][c] * u[b];
  return r;
}

/// Contractions used by the invariant family: t_{iBC} u^B v^C.
template <class T>
Vec2<T> contract_bc(const Tensor3& t, const Vec2<T>& u, const Vec2<T>& v) {
  Vec2<T> r{constant_like(u[0], 0.0), constant_like(u[0], 0.0)};
  for (int i = 0; i < 2; ++i)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) r[i] += u[b] * v[c] * t[i][b][c];
  return r;
}

inline constexpr double kDegenerateImageTolerance = 1e-14;

template <class T>
std::pair<Twistor<T>, DualTwistor<T>> eval_invariant_map(const InvariantCausalMap& m, const Twistor<T>& z,
                                                         const DualTwistor<T>& w) {
  detail::require_nonzero(as_vec4(z));
  detail::require_nonzero(as_vec4(w));
  const Vec2<T> lam_up = raise_index(w.lambda);
  const T mu_pi = w.mu[0] * z.pi[0] + w.mu[1] * z.pi[1];
  auto term = [&](const Tensor3& t, const Vec2<Complex>& k) {
    Vec2<T> r = contract_bc(t, z.omega, lam_up);
    r[0] += mu_pi * k[0];
    r[1] += mu_pi * k[1];
    return r;
  };
  Twistor<T> zt{term(m.a, m.b), term(m.c, m.d)};
  DualTwistor<T> wt{term(m.e, m.f), term(m.g, m.h)};
  auto scale = [](const auto& v4) {
    double s = 0.0;
    for (const auto& c : v4) s += std::norm(value_of(c));
    return std::sqrt(s);
  };
  const double in_scale = scale(as_vec4(z)) * scale(as_vec4(w));
  if (scale(as_vec4(zt)) <= kDegenerateImageTolerance * in_scale ||
      scale(as_vec4(wt)) <= kDegenerateImageTolerance * in_scale) {
    throw Error(ErrorKind::degenerate_image, "invariant map output vanishes");
  }
  return {zt, wt};
}

// --- random maps -----------------------------------------------------------

inline Mat4 random_mat4(CounterRng& rng) {
  Mat4 m;
  for (auto& row : m)
    for (auto& e : row) e = rng.complex_normal();
  return m;
}

inline Degree1Map random_degree1(std::uint64_t seed, int max_retries = 64) {
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    CounterRng rng(seed, static_cast<std::uint64_t>(attempt));
    Degree1Map m{random_mat4(rng)};
    if (check_base_point_free(m).pass) return m;
  }
  throw Error(ErrorKind::generation_exhausted, "no invertible degree-1 map within the retry budget");
}

inline Degree2Map random_degree2(std::uint64_t seed, int max_retries = 16) {
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    CounterRng rng(seed, static_cast<std::uint64_t>(attempt));
    std::array<Mat4, 2> f{random_mat4(rng), random_mat4(rng)};
    std::array<Mat4, 2> g{random_mat4(rng), random_mat4(rng)};
    Degree2Map m(f, g);
    if (check_base_point_free(m, 8, derive_seed(seed, 0xba5eULL)).pass) return m;
  }
  throw Error(ErrorKind::generation_exhausted, "no base-point-free degree-2 map within the retry budget");
}

/// The map z -> (z_0^2, z_1^2, z_2^2, z_3^2).
inline Degree2Map coordinate_squares() {
  std::array<Mat4, 2> f{};
  std::array<Mat4, 2> g{};
  f[0][0][0] = 1.0;
  f[1][1][1] = 1.0;
  g[0][2][2] = 1.0;
  g[1][3][3] = 1.0;
  return Degree2Map(f, g);
}

inline InvariantCausalMap random_invariant(std::uint64_t seed) {
  CounterRng rng(seed);
  InvariantCausalMap m;
  for (Tensor3* t : {&m.a, &m.c, &m.e, &m.g})
    for (auto& i : *t)
      for (auto& b : i)
        for (auto& c : b) c = rng.complex_normal();
  for (Vec2<Complex>* v : {&m.b, &m.d, &m.f, &m.h})
    for (auto& c : *v) c = rng.complex_normal();
  return m;
}

}  // namespace nullmorph
