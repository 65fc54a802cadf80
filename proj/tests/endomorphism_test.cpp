#include <gtest/gtest.h>

#include "nullmorph/endomorphism.hpp"

namespace nullmorph {
namespace {

Vec4<Complex> random_vec4(CounterRng& rng) {
  return {rng.complex_normal(), rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
}

double vec_diff(const Vec4<Complex>& a, const Vec4<Complex>& b) {
  double d = 0.0;
  double s = 1.0;
  for (int i = 0; i < 4; ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return d / s;
}

Vec4<Jet> line_jet(const Vec4<Complex>& z, const Vec4<Complex>& zdot, const Vec4<Complex>& zddot, int order) {
  Vec4<Jet> r;
  for (int k = 0; k < 4; ++k) {
    r[k] = Jet(order, z[k]);
    r[k].coeff(1) = zdot[k];
    if (order >= 2) r[k].coeff(2) = zddot[k];
  }
  return r;
}

TEST(EvalMap, IdentityDegree1) {
  CounterRng rng(1);
  const Vec4<Complex> z = random_vec4(rng);
  EXPECT_EQ(eval_map(Degree1Map{}, z), z);
}

TEST(EvalMap, ZeroVector) {
  try {
    eval_map(Degree1Map{}, Vec4<Complex>{});
    FAIL() << "expected ZeroVector";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::zero_vector);
  }
  EXPECT_THROW(eval_map(random_degree2(1), Vec4<Complex>{}), Error);
}

TEST(EvalMap, Homogeneity) {
  CounterRng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Vec4<Complex> z = random_vec4(rng);
    const Complex c = rng.complex_normal();
    Vec4<Complex> cz = z;
    for (auto& e : cz) e *= c;
    const TwistorMap m1 = random_degree1(static_cast<std::uint64_t>(i));
    const TwistorMap m2 = random_degree2(static_cast<std::uint64_t>(i));
    Vec4<Complex> e1 = eval_map(m1, z);
    Vec4<Complex> e2 = eval_map(m2, z);
    for (auto& e : e1) e *= c;
    for (auto& e : e2) e *= c * c;
    EXPECT_LE(vec_diff(eval_map(m1, cz), e1), 1e-12);
    EXPECT_LE(vec_diff(eval_map(m2, cz), e2), 1e-12);
  }
}

TEST(EvalMap, Degree2DerivativeRule) {
  CounterRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Degree2Map m = random_degree2(static_cast<std::uint64_t>(i));
    const Vec4<Complex> z = random_vec4(rng);
    const Vec4<Complex> zdot = random_vec4(rng);
    const Vec4<Jet> y = eval_map(m, line_jet(z, zdot, {}, 2));
    Vec4<Complex> d1;
    for (int k = 0; k < 4; ++k) d1[k] = y[k].coeff(1);
    EXPECT_LE(vec_diff(d1, push_tangent(m, z, zdot)), 1e-12);
  }
}

TEST(EvalMap, JetMatchesFiniteDifferences) {
  CounterRng rng(4);
  const double h = 1e-4;
  for (int i = 0; i < 100; ++i) {
    const TwistorMap m = random_degree2(static_cast<std::uint64_t>(i));
    const Vec4<Complex> z = random_vec4(rng);
    const Vec4<Complex> zd = random_vec4(rng);
    const Vec4<Complex> zdd = random_vec4(rng);
    auto path = [&](double t) {
      Vec4<Complex> p;
      for (int k = 0; k < 4; ++k) p[k] = z[k] + t * zd[k] + t * t * zdd[k];
      return eval_map(m, p);
    };
    const Vec4<Jet> y = eval_map(m, line_jet(z, zd, zdd, 3));
    const Vec4<Complex> plus = path(h);
    const Vec4<Complex> minus = path(-h);
    const Vec4<Complex> mid = path(0.0);
    Vec4<Complex> fd1;
    Vec4<Complex> fd2;
    Vec4<Complex> j1;
    Vec4<Complex> j2;
    for (int k = 0; k < 4; ++k) {
      fd1[k] = (plus[k] - minus[k]) / (2.0 * h);
      fd2[k] = (plus[k] - 2.0 * mid[k] + minus[k]) / (h * h);
      j1[k] = y[k].derivative(1);
      j2[k] = y[k].derivative(2);
    }
    EXPECT_LE(vec_diff(fd1, j1), 1e-6);
    EXPECT_LE(vec_diff(fd2, j2), 1e-6);
  }
}

TEST(BasePoint, InvertibleDegree1Passes) {
  EXPECT_TRUE(check_base_point_free(Degree1Map{}).pass);
  EXPECT_TRUE(check_base_point_free(random_degree1(5)).pass);
}

TEST(BasePoint, SingularDegree1Fails) {
  Degree1Map m;
  m.f[3] = m.f[2];
  EXPECT_FALSE(check_base_point_free(m).pass);
}

TEST(BasePoint, CoordinateSquaresPass) {
  const BasePointReport r = check_base_point_free(coordinate_squares(), 32, 7);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.min_ratio, kBasePointThreshold);
}

TEST(BasePoint, SharedZeroIsFlagged) {
  std::array<Mat4, 2> f{};
  std::array<Mat4, 2> g{};
  f[0][0][1] = 1.0;
  f[1][1][2] = 1.0;
  g[0][2][3] = 1.0;
  g[1][0][3] = 1.0;
  const BasePointReport r = check_base_point_free(Degree2Map(f, g), 32, 8);
  EXPECT_FALSE(r.pass);
}

TEST(RandomMaps, Determinism) {
  EXPECT_EQ(random_degree1(9).f, random_degree1(9).f);
  const Degree2Map a = random_degree2(9);
  const Degree2Map b = random_degree2(9);
  EXPECT_EQ(a.f, b.f);
  EXPECT_EQ(a.g, b.g);
  const InvariantCausalMap c = random_invariant(9);
  const InvariantCausalMap d = random_invariant(9);
  EXPECT_EQ(c.a, d.a);
  EXPECT_EQ(c.h, d.h);
}

TEST(RandomMaps, Degree2IsSymmetric) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Degree2Map m = random_degree2(seed);
    for (int k = 0; k < 4; ++k) EXPECT_TRUE(is_symmetric(m.component(k)));
  }
}

TEST(RandomMaps, PassBasePointCheck) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_TRUE(check_base_point_free(random_degree1(seed)).pass);
    EXPECT_TRUE(check_base_point_free(random_degree2(seed), 32, seed).pass);
  }
}

TEST(Compose, MatrixProduct) {
  CounterRng rng(10);
  for (int i = 0; i < 100; ++i) {
    const Degree1Map f = random_degree1(static_cast<std::uint64_t>(2 * i));
    const Degree1Map g = random_degree1(static_cast<std::uint64_t>(2 * i + 1));
    const Vec4<Complex> z = random_vec4(rng);
    EXPECT_LE(vec_diff(eval_map(compose(f, g), z), eval_map(f, eval_map(g, z))), 1e-12);
  }
}

TEST(Blocks, RoundTrip) {
  const Degree1Map m = random_degree1(11);
  EXPECT_EQ(Degree1Map::from_blocks(m.a(), m.b(), m.c(), m.d()).f, m.f);
}

struct InvariantInput {
  Twistor<Complex> z;
  DualTwistor<Complex> w;
};

InvariantInput random_input(CounterRng& rng) {
  return {{{rng.complex_normal(), rng.complex_normal()}, {rng.complex_normal(), rng.complex_normal()}},
          {{rng.complex_normal(), rng.complex_normal()}, {rng.complex_normal(), rng.complex_normal()}}};
}

double twistor_pair_diff(const std::pair<Twistor<Complex>, DualTwistor<Complex>>& a,
                         const std::pair<Twistor<Complex>, DualTwistor<Complex>>& b) {
  return std::max(vec_diff(as_vec4(a.first), as_vec4(b.first)), vec_diff(as_vec4(a.second), as_vec4(b.second)));
}

TEST(InvariantMap, RightActionInvariance) {
  CounterRng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const InvariantCausalMap m = random_invariant(static_cast<std::uint64_t>(i));
    const InvariantInput in = random_input(rng);
    SpacetimePoint u;
    for (auto& row : u.m)
      for (auto& e : row) e = rng.complex_normal();
    const Twistor<Complex> z2{in.z.omega, inverse(u) * in.z.pi};
    const DualTwistor<Complex> w2{in.w.lambda, left_multiply(in.w.mu, u)};
    EXPECT_LE(twistor_pair_diff(eval_invariant_map(m, z2, w2), eval_invariant_map(m, in.z, in.w)), 1e-12);
  }
}

TEST(InvariantMap, IdentityActionIsExact) {
  CounterRng rng(13);
  const InvariantCausalMap m = random_invariant(13);
  const InvariantInput in = random_input(rng);
  const SpacetimePoint u = identity_matrix();
  const Twistor<Complex> z2{in.z.omega, inverse(u) * in.z.pi};
  const DualTwistor<Complex> w2{in.w.lambda, left_multiply(in.w.mu, u)};
  const auto a = eval_invariant_map(m, z2, w2);
  const auto b = eval_invariant_map(m, in.z, in.w);
  EXPECT_EQ(as_vec4(a.first), as_vec4(b.first));
  EXPECT_EQ(as_vec4(a.second), as_vec4(b.second));
}

TEST(InvariantMap, Bidegree) {
  CounterRng rng(14);
  for (int i = 0; i < 100; ++i) {
    const InvariantCausalMap m = random_invariant(static_cast<std::uint64_t>(i));
    const InvariantInput in = random_input(rng);
    const Complex c = rng.complex_normal();
    Twistor<Complex> cz = in.z;
    for (auto* e : {&cz.omega[0], &cz.omega[1], &cz.pi[0], &cz.pi[1]}) *e *= c;
    auto expected = eval_invariant_map(m, in.z, in.w);
    for (auto* e : {&expected.first.omega[0], &expected.first.omega[1], &expected.first.pi[0], &expected.first.pi[1],
                    &expected.second.lambda[0], &expected.second.lambda[1], &expected.second.mu[0],
                    &expected.second.mu[1]})
      *e *= c;
    EXPECT_LE(twistor_pair_diff(eval_invariant_map(m, cz, in.w), expected), 1e-12);
  }
}

TEST(InvariantMap, DegenerateImage) {
  const InvariantCausalMap zero{};
  CounterRng rng(15);
  const InvariantInput in = random_input(rng);
  try {
    eval_invariant_map(zero, in.z, in.w);
    FAIL() << "expected DegenerateImage";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_image);
  }
}

}  // namespace
}  // namespace nullmorph
