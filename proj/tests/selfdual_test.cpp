#include <gtest/gtest.h>

#include "nullmorph/selfdual.hpp"

namespace nullmorph {
namespace {

const Complex I{0.0, 1.0};

SpacetimePoint random_matrix(CounterRng& rng) {
  SpacetimePoint m;
  for (auto& row : m.m)
    for (auto& e : row) e = rng.complex_normal();
  return m;
}

Vec2<Complex> random_spinor(CounterRng& rng) { return {rng.complex_normal(), rng.complex_normal()}; }

FPoint random_fpoint(CounterRng& rng) { return {random_matrix(rng), random_spinor(rng)}; }

TEST(ApplyF1, IdentityMap) {
  CounterRng rng(1);
  for (int i = 0; i < 100; ++i) {
    const FPoint p = random_fpoint(rng);
    const FPoint img = apply_f1(Degree1Map{}, p);
    EXPECT_LE(relative_difference(img.x, p.x), 1e-12);
    EXPECT_LE(projective_distance(img.pi, p.pi), 1e-12);
  }
}

TEST(ApplyF1, Translation) {
  CounterRng rng(2);
  for (int i = 0; i < 100; ++i) {
    const SpacetimePoint b = random_matrix(rng);
    const Degree1Map m = Degree1Map::from_blocks(identity_matrix(), b, zero_matrix(), identity_matrix());
    const FPoint p = random_fpoint(rng);
    EXPECT_LE(relative_difference(apply_f1(m, p).x, p.x - I * b), 1e-12);
  }
}

TEST(Moebius, Identity) {
  CounterRng rng(3);
  const SpacetimePoint x = random_matrix(rng);
  EXPECT_LE(relative_difference(moebius_closed_form(Degree1Map{}, x), x), 1e-15);
}

TEST(Moebius, Dilation) {
  CounterRng rng(4);
  const Degree1Map m =
      Degree1Map::from_blocks(identity_matrix() * Complex(2.0), zero_matrix(), zero_matrix(), identity_matrix());
  for (int i = 0; i < 100; ++i) {
    const FPoint p = random_fpoint(rng);
    EXPECT_LE(relative_difference(moebius_closed_form(m, p.x), p.x * Complex(2.0)), 1e-15);
    EXPECT_LE(relative_difference(apply_f1(m, p).x, p.x * Complex(2.0)), 1e-12);
  }
}

TEST(Moebius, SingularDenominator) {
  const Degree1Map m = Degree1Map::from_blocks(identity_matrix(), zero_matrix(), zero_matrix(), zero_matrix());
  try {
    moebius_closed_form(m, zero_matrix());
    FAIL() << "expected SingularDenominator";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_denominator);
  }
}

TEST(Moebius, MatchesPipelineForAllPi) {
  CounterRng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Degree1Map m = random_degree1(static_cast<std::uint64_t>(i));
    const SpacetimePoint x = random_matrix(rng);
    const SpacetimePoint closed = moebius_closed_form(m, x);
    for (int k = 0; k < 16; ++k) {
      const FPoint img = apply_f1(m, {x, random_spinor(rng)});
      EXPECT_LE(relative_difference(img.x, closed), 1e-10);
    }
  }
}

TEST(Degree2, ClosedFormMatchesPipeline) {
  CounterRng rng(6);
  for (int i = 0; i < 500; ++i) {
    const Degree2Map m = random_degree2(static_cast<std::uint64_t>(i));
    const FPoint p = random_fpoint(rng);
    const FPoint a = apply_f1(m, p);
    const FPoint b = degree2_closed_form(m, p);
    EXPECT_LE(relative_difference(a.x, b.x), 1e-9);
    EXPECT_LE(projective_distance(a.pi, b.pi), 1e-9);
  }
}

TEST(Degree2, RatioFormMatchesClosedForm) {
  CounterRng rng(7);
  for (int i = 0; i < 500; ++i) {
    const Degree2Map m = random_degree2(static_cast<std::uint64_t>(i));
    const FPoint p = random_fpoint(rng);
    EXPECT_LE(relative_difference(appendix_form(m, p, random_spinor(rng)), degree2_closed_form(m, p).x), 1e-9);
  }
}

TEST(Degree1, RatioFormMatchesMoebius) {
  CounterRng rng(8);
  for (int i = 0; i < 200; ++i) {
    const Degree1Map m = random_degree1(static_cast<std::uint64_t>(i));
    const FPoint p = random_fpoint(rng);
    EXPECT_LE(relative_difference(appendix_form(m, p), moebius_closed_form(m, p.x)), 1e-10);
  }
}

TEST(Degree2, DependsOnPi) {
  CounterRng rng(9);
  int witnessed = 0;
  for (int i = 0; i < 100; ++i) {
    const Degree2Map m = random_degree2(static_cast<std::uint64_t>(i));
    const SpacetimePoint x = random_matrix(rng);
    const FPoint a = apply_f1(m, {x, random_spinor(rng)});
    const FPoint b = apply_f1(m, {x, random_spinor(rng)});
    if (projective_distance(a.x, b.x) > 1e-3) ++witnessed;
  }
  EXPECT_GE(witnessed, 95);
}

TEST(Degree2, SingularDenominator) {
  const Degree2Map zero{};
  try {
    degree2_closed_form(zero, {identity_matrix(), {1.0, 0.0}});
    FAIL() << "expected SingularDenominator";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_denominator);
  }
}

TEST(PsiIndependence, RandomPsi) {
  CounterRng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const TwistorMap m = i % 2 == 0 ? TwistorMap{random_degree2(static_cast<std::uint64_t>(i))}
                                    : TwistorMap{random_degree1(static_cast<std::uint64_t>(i))};
    const FPoint p = random_fpoint(rng);
    const FPoint a = apply_f1(m, p, random_spinor(rng));
    const FPoint b = apply_f1(m, p, random_spinor(rng));
    EXPECT_LE(relative_difference(a.x, b.x), 1e-10);
    EXPECT_LE(projective_distance(a.pi, b.pi), 1e-10);
  }
}

TEST(PsiIndependence, ShiftAlongPi) {
  CounterRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const TwistorMap m = random_degree2(static_cast<std::uint64_t>(i));
    const FPoint p = random_fpoint(rng);
    const Vec2<Complex> psi = random_spinor(rng);
    const Complex r = rng.complex_normal();
    const Vec2<Complex> shifted{psi[0] + r * p.pi[0], psi[1] + r * p.pi[1]};
    const Complex c = rng.complex_normal();
    const Vec2<Complex> rescaled{c * psi[0], c * psi[1]};
    const FPoint base = apply_f1(m, p, psi);
    EXPECT_LE(relative_difference(apply_f1(m, p, shifted).x, base.x), 1e-10);
    EXPECT_LE(relative_difference(apply_f1(m, p, rescaled).x, base.x), 1e-10);
  }
}

TEST(PsiIndependence, PsiParallelToPiIsSingular) {
  CounterRng rng(12);
  const FPoint p = random_fpoint(rng);
  const Vec2<Complex> psi{3.0 * p.pi[0], 3.0 * p.pi[1]};
  try {
    apply_f1(random_degree2(12), p, psi);
    FAIL() << "expected SingularImage";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular_image);
  }
}

TEST(ApplyToCurve, IdentityReproducesInput) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const NullCurve c = random_null_curve(seed, {2, 2});
    for (const SampleImage& img : apply_to_curve(Degree1Map{}, c, default_sample_points())) {
      ASSERT_TRUE(img.ok);
      EXPECT_LE(relative_difference(img.xi, c.point(img.s)), 1e-12);
    }
  }
}

TEST(ApplyToCurve, Degree2ImagesAreNull) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NullCurve c = random_null_curve(seed, {2, 2});
    const TwistorMap m = random_degree2(seed);
    for (const SampleImage& img : apply_to_curve(m, c, default_sample_points())) {
      if (!img.ok) continue;
      ++checked;
      EXPECT_LE(img.null_residual, 1e-9);
      EXPECT_LE(img.alpha_residual, 1e-9);
    }
  }
  EXPECT_GE(checked, 700);
}

TEST(ApplyToCurve, ImageMatchesPointwiseMorphism) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const NullCurve c = random_null_curve(seed, {2, 2});
    const TwistorMap m = random_degree2(seed + 100);
    const Complex s = default_sample_points()[seed % 8];
    const SampleImage img = image_sample(m, c, s);
    if (!img.ok) continue;
    const FPoint direct = apply_f1(m, c.f_point(s));
    EXPECT_LE(relative_difference(img.xi, direct.x), 1e-9);
    EXPECT_LE(projective_distance(img.pi_tilde, direct.pi), 1e-9);
  }
}

TEST(ApplyToCurve, ConstantPiReportsSingular) {
  const NullCurve c = make_null_curve(identity_matrix(), {Poly{1.0, 2.0}, Poly{0.5, -1.0}}, {Poly{1.0}, Poly{I}});
  const SampleImage img = image_sample(Degree1Map{}, c, 0.3);
  EXPECT_FALSE(img.ok);
  ASSERT_TRUE(img.error.has_value());
  EXPECT_TRUE(*img.error == ErrorKind::singular_correspondence || *img.error == ErrorKind::singular_image);
}

TEST(Composition, MatchesComposedMatrix) {
  CounterRng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Degree1Map f = random_degree1(static_cast<std::uint64_t>(2 * i));
    const Degree1Map g = random_degree1(static_cast<std::uint64_t>(2 * i + 1));
    const FPoint p = random_fpoint(rng);
    const FPoint two_step = apply_f1(f, apply_f1(g, p));
    const FPoint one_step = apply_f1(compose(f, g), p);
    EXPECT_LE(relative_difference(two_step.x, one_step.x), 1e-10);
    EXPECT_LE(projective_distance(two_step.pi, one_step.pi), 1e-10);
  }
}

TEST(LocalityF, IdenticalCurves) {
  CounterRng rng(14);
  const FPoint p = random_fpoint(rng);
  const TwistorMap m = random_degree2(14);
  const LocalityReport r = verify_locality_F(m, p, 1, 15);
  EXPECT_EQ(r.failures, 0);
  EXPECT_EQ(r.point_spread, 0.0);
}

TEST(LocalityF, AlphaTangentFamily) {
  CounterRng rng(16);
  for (int i = 0; i < 50; ++i) {
    const FPoint p = random_fpoint(rng);
    const LocalityReport r = verify_locality_F(random_degree2(static_cast<std::uint64_t>(i)), p, 8,
                                               static_cast<std::uint64_t>(1000 + i));
    EXPECT_EQ(r.failures, 0);
    EXPECT_LE(r.point_spread, 1e-9);
    EXPECT_LE(r.pi_spread, 1e-9);
    EXPECT_LE(r.pipeline_distance, 1e-9);
  }
}

TEST(LocalityF, DifferentPiGivesDifferentImages) {
  CounterRng rng(17);
  int differ = 0;
  for (int i = 0; i < 20; ++i) {
    const TwistorMap m = random_degree2(static_cast<std::uint64_t>(i));
    const SpacetimePoint x = random_matrix(rng);
    const NullCurve a = make_tangent_family(FPoint{x, random_spinor(rng)}, 18, 1)[0];
    const NullCurve b = make_tangent_family(FPoint{x, random_spinor(rng)}, 19, 1)[0];
    const SampleImage ia = image_sample(m, a, 0.0);
    const SampleImage ib = image_sample(m, b, 0.0);
    if (ia.ok && ib.ok && relative_difference(ia.xi, ib.xi) > 1e-3) ++differ;
  }
  EXPECT_GE(differ, 19);
}

}  // namespace
}  // namespace nullmorph
