#include <gtest/gtest.h>

#include "nullmorph/causal.hpp"

namespace nullmorph {
namespace {

SpacetimePoint random_matrix(CounterRng& rng) {
  SpacetimePoint m;
  for (auto& row : m.m)
    for (auto& e : row) e = rng.complex_normal();
  return m;
}

Vec2<Complex> random_spinor(CounterRng& rng) { return {rng.complex_normal(), rng.complex_normal()}; }

GPoint random_gpoint(CounterRng& rng) { return {random_matrix(rng), outer(random_spinor(rng), random_spinor(rng))}; }

double gpoint_distance(const GPoint& a, const GPoint& b) {
  return std::max(relative_difference(a.x, b.x), projective_distance(a.v, b.v));
}

TEST(Patch, IdentityB1) {
  CounterRng rng(1);
  const SpacetimePoint b0 = random_matrix(rng);
  EXPECT_EQ(patch_coordinates({b0, identity_matrix()}).m, b0.m);
}

TEST(Patch, RightActionInvariance) {
  CounterRng rng(2);
  for (int i = 0; i < 100; ++i) {
    const BP1Point p{random_matrix(rng), random_matrix(rng)};
    const SpacetimePoint u = random_matrix(rng);
    const BP1Point q{p.b0 * u, p.b1 * u};
    EXPECT_LE(relative_difference(patch_coordinates(q), patch_coordinates(p)), 1e-12);
    EXPECT_LE(relative_difference(patch_coordinates(q, Patch::U0), patch_coordinates(p, Patch::U0)), 1e-12);
  }
}

TEST(Patch, PatchesAreInverse) {
  CounterRng rng(3);
  for (int i = 0; i < 100; ++i) {
    const BP1Point p{random_matrix(rng), random_matrix(rng)};
    EXPECT_LE(frobenius_norm(patch_coordinates(p) * patch_coordinates(p, Patch::U0) - identity_matrix()), 1e-12);
  }
}

TEST(Patch, SingularB1) {
  const BP1Point p{identity_matrix(), {{{{1.0, 1.0}, {1.0, 1.0}}}}};
  try {
    patch_coordinates(p);
    FAIL() << "expected SingularPatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_patch);
  }
  EXPECT_NO_THROW(patch_coordinates(p, Patch::U0));
}

TEST(LiftG, RoundTrip) {
  CounterRng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const GPoint g = random_gpoint(rng);
    const auto [p, l] = lift_g_point(g);
    EXPECT_LE(gpoint_distance(extract_g_point(p, l), g), 1e-10);
  }
}

TEST(LiftG, IdentityBasePoint) {
  const Vec2<Complex> l0{1.0, Complex(0.0, 2.0)};
  const Vec2<Complex> p0{0.5, -1.0};
  const auto [p, lift] = lift_g_point({identity_matrix(), outer(l0, p0)});
  EXPECT_LE(projective_distance(raise_index(lift.w.lambda), l0), 1e-15);
  EXPECT_LE(projective_distance(raise_index(lift.z.pi), p0), 1e-15);
  EXPECT_EQ(p.b1.m, identity_matrix().m);
}

TEST(LiftG, SingularBasePoint) {
  const GPoint g{{{{{1.0, 2.0}, {2.0, 4.0}}}}, outer(Vec2<Complex>{1.0, 0.0}, Vec2<Complex>{0.0, 1.0})};
  try {
    lift_g_point(g);
    FAIL() << "expected SingularBasePoint";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_base_point);
  }
}

TEST(Extract, IdentityB1GivesDirectTangent) {
  CounterRng rng(5);
  const SpacetimePoint x = random_matrix(rng);
  const Vec2<Complex> pi = random_spinor(rng);
  const Vec2<Complex> lambda = random_spinor(rng);
  const BP1Point p{x, identity_matrix()};
  const GPoint g = extract_g_point(p, make_lift(p, pi, lambda));
  EXPECT_LE(projective_distance(g.v, outer(x * raise_index(lambda), raise_index(pi))), 1e-15);
}

TEST(Extract, RightActionInvariance) {
  CounterRng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const BP1Point p{random_matrix(rng), random_matrix(rng)};
    const PlanePairLift l = make_lift(p, random_spinor(rng), random_spinor(rng));
    const auto [q, lq] = right_act(p, l, random_matrix(rng));
    EXPECT_LE(gpoint_distance(extract_g_point(q, lq), extract_g_point(p, l)), 1e-10);
  }
}

TEST(Extract, PatchesAgreeOnOverlap) {
  CounterRng rng(7);
  for (int i = 0; i < 100; ++i) {
    const BP1Point p{random_matrix(rng), random_matrix(rng)};
    const PlanePairLift l = make_lift(p, random_spinor(rng), random_spinor(rng));
    const GPoint a = extract_g_point(p, l, Patch::U1);
    const GPoint b = extract_g_point(p, l, Patch::U0);
    EXPECT_LE(frobenius_norm(a.x * b.x - identity_matrix()), 1e-10);
    EXPECT_LE(std::abs(det(a.v)) + std::abs(det(b.v)), 1e-12 * (1.0 + frobenius_norm(a.v) * frobenius_norm(a.v) +
                                                                 frobenius_norm(b.v) * frobenius_norm(b.v)));
  }
}

TEST(Extract, DegenerateTangent) {
  const BP1Point p{identity_matrix(), identity_matrix()};
  const PlanePairLift l = make_lift(p, {1.0, 0.0}, {0.0, 0.0});
  try {
    extract_g_point(p, l);
    FAIL() << "expected DegenerateTangent";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_tangent);
  }
}

TEST(BetaPlane, SecondOrderResidual) {
  CounterRng rng(8);
  for (int i = 0; i < 100; ++i) {
    const BP1Point p{random_matrix(rng), random_matrix(rng)};
    const Vec2<Complex> lambda = random_spinor(rng);
    const Vec2<Complex> delta = scaled(random_spinor(rng), Complex(1e-3));
    const OrderCheck c = beta_order_check(p, lambda, delta);
    EXPECT_GE(c.ratio, 3.5);
    EXPECT_LE(c.ratio, 4.5);
  }
}

TEST(ApplyCausal, ClosedFormMatchesGenericRoute) {
  CounterRng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const InvariantCausalMap m = random_invariant(static_cast<std::uint64_t>(i));
    const GPoint g = random_gpoint(rng);
    EXPECT_LE(gpoint_distance(apply_causal(m, g), apply_causal_generic(m, g)), 1e-9);
  }
}

TEST(ApplyCausal, RightActionInvariance) {
  CounterRng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const InvariantCausalMap m = random_invariant(static_cast<std::uint64_t>(i));
    const BP1Point p{random_matrix(rng), random_matrix(rng)};
    const PlanePairLift l = make_lift(p, random_spinor(rng), random_spinor(rng));
    const CausalData<Complex> d = causal_data(p, l);
    const CausalData<Complex> du = right_act(d, random_matrix(rng));
    const auto [x1, v1] = extract_point(apply_causal(m, d));
    const auto [x2, v2] = extract_point(apply_causal(m, du));
    EXPECT_LE(relative_difference(x2, x1), 1e-10);
    EXPECT_LE(projective_distance(v2, v1), 1e-10);
  }
}

TEST(ApplyCausal, SpinorRescaling) {
  CounterRng rng(11);
  for (int i = 0; i < 100; ++i) {
    const InvariantCausalMap m = random_invariant(static_cast<std::uint64_t>(i));
    const BP1Point p{random_matrix(rng), random_matrix(rng)};
    const Vec2<Complex> pi = random_spinor(rng);
    const Vec2<Complex> lambda = random_spinor(rng);
    const Complex c = rng.complex_normal();
    const auto [x1, v1] = extract_point(apply_causal(m, causal_data(p, make_lift(p, pi, lambda))));
    const auto [x2, v2] = extract_point(apply_causal(m, causal_data(p, make_lift(p, scaled(pi, c), lambda))));
    EXPECT_LE(relative_difference(x2, x1), 1e-10);
    EXPECT_LE(projective_distance(v2, v1), 1e-10);
  }
}

TEST(ApplyCausal, ImageDirectionIsNull) {
  CounterRng rng(12);
  for (int i = 0; i < 100; ++i) {
    const GPoint img = apply_causal(random_invariant(static_cast<std::uint64_t>(i)), random_gpoint(rng));
    EXPECT_LE(relative_null_residual(img.v), 1e-12);
  }
}

TEST(ApplyCausalToCurve, ImageTangentsAreNull) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NullCurve c = random_null_curve(seed, {2, 2});
    for (const CausalSample& s : apply_causal_to_curve(random_invariant(seed), c, default_sample_points())) {
      ASSERT_TRUE(s.ok);
      worst = std::max(worst, s.null_residual);
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(ApplyCausalToCurve, TangentConsistency) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const NullCurve c = random_null_curve(seed, {2, 2});
    for (const CausalSample& s : apply_causal_to_curve(random_invariant(seed), c, default_sample_points())) {
      ASSERT_TRUE(s.ok);
      worst = std::max(worst, s.consistency);
    }
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(ApplyCausalToCurve, LocalityOnG) {
  CounterRng rng(13);
  double point_spread = 0.0;
  double tangent_spread = 0.0;
  for (int i = 0; i < 100; ++i) {
    const InvariantCausalMap m = random_invariant(static_cast<std::uint64_t>(i));
    const std::vector<NullCurve> pair = make_tangent_family(random_gpoint(rng), static_cast<std::uint64_t>(i), 2);
    const CausalSample a = causal_sample(m, pair[0], 0.0);
    const CausalSample b = causal_sample(m, pair[1], 0.0);
    ASSERT_TRUE(a.ok && b.ok);
    point_spread = std::max(point_spread, relative_difference(a.x, b.x));
    tangent_spread = std::max(tangent_spread, projective_distance(a.tangent, b.tangent));
  }
  EXPECT_LE(point_spread, 1e-9);
  EXPECT_LE(tangent_spread, 1e-9);
}

TEST(ApplyCausalToCurve, SampleMatchesPointwiseMorphism) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const NullCurve c = random_null_curve(seed, {2, 2});
    const InvariantCausalMap m = random_invariant(seed);
    const Complex s = default_sample_points()[seed % 8];
    const CausalSample cs = causal_sample(m, c, s);
    ASSERT_TRUE(cs.ok);
    const GPoint direct = apply_causal(m, c.g_point(s));
    EXPECT_LE(relative_difference(cs.x, direct.x), 1e-10);
    EXPECT_LE(projective_distance(cs.v, direct.v), 1e-10);
  }
}

TEST(Nonlocality, GenericDegree2) {
  int witnessed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NonlocalityReport r = demonstrate_nonlocality(random_degree2(seed), seed);
    EXPECT_LE(r.point_difference, 1e-9);
    if (r.distance > 1e-3) ++witnessed;
  }
  EXPECT_GE(witnessed, 95);
}

TEST(Nonlocality, Degree1Control) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    EXPECT_LE(demonstrate_nonlocality(random_degree1(seed), seed).distance, 1e-10);
  }
}

TEST(Nonlocality, IdenticalCurves) {
  const NullCurve c = random_null_curve(14, {2, 2});
  EXPECT_EQ(compare_image_tangents(random_degree2(14), c, c).distance, 0.0);
}

TEST(Nonlocality, LambdaRecoveryDiffersAfterDegree2Map) {
  CounterRng rng(15);
  const std::vector<NullCurve> pair = make_tangent_family(random_gpoint(rng), 16, 2);
  const TwistorMap m = random_degree2(16);
  const auto [xa, ta] = naive_image_tangent(m, pair[0], 0.0);
  const auto [xb, tb] = naive_image_tangent(m, pair[1], 0.0);
  EXPECT_LE(relative_difference(xa, xb), 1e-9);
  EXPECT_GT(projective_distance(ta, tb), 1e-3);
}

}  // namespace
}  // namespace nullmorph
