#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nullmorph/causal.hpp"
#include "nullmorph/endomorphism.hpp"
#include "nullmorph/errors.hpp"
#include "nullmorph/identities.hpp"
#include "nullmorph/null_curve.hpp"
#include "nullmorph/random.hpp"
#include "nullmorph/selfdual.hpp"
#include "nullmorph/twistor.hpp"

namespace nullmorph {

struct SuiteConfig {
  std::string suite_name;
  int trials = 100;
  std::uint64_t seed = 0;
  /// Overrides the suite default (and NULLMORPH_TOL) when set.
  std::optional<double> tolerance;
  int threads = 1;
  std::vector<Complex> sample_points = default_sample_points();
  DegreeBounds degree_bounds{2, 2};
};

struct TrialFailure {
  int seed_index = 0;
  double residual = 0.0;  // NaN when the trial raised
  std::string error_kind;
};

struct SuiteReport {
  std::string suite_name;
  int trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::string check;
  int pass_count = 0;
  double max_residual = 0.0;
  double min_residual = 0.0;
  std::vector<TrialFailure> failures;
  double wall_time = 0.0;
  double required_fraction = 1.0;

  bool all_passed() const { return pass_count >= std::ceil(required_fraction * trials - 1e-9); }
};

/// How a trial residual is compared with the tolerance.
enum class Check { at_most, above };

struct SuiteDef {
  std::string name;
  std::string description;
  double default_tolerance;
  Check check;
  std::function<double(std::uint64_t, const SuiteConfig&)> trial;
  double required_fraction = 1.0;
};

namespace suites {

inline SpacetimePoint random_matrix(CounterRng& rng) {
  SpacetimePoint m;
  for (auto& row : m.m)
    for (auto& e : row) e = rng.complex_normal();
  return m;
}

inline Vec2<Complex> random_spinor(CounterRng& rng) { return {rng.complex_normal(), rng.complex_normal()}; }

inline FPoint random_fpoint(CounterRng& rng) { return {random_matrix(rng), random_spinor(rng)}; }

inline GPoint random_gpoint(CounterRng& rng) {
  const SpacetimePoint x = random_matrix(rng);
  return {x, outer(random_spinor(rng), random_spinor(rng))};
}

inline NullCurve random_curve(std::uint64_t seed, const SuiteConfig& cfg) {
  CurveOptions opts;
  opts.sample_points = cfg.sample_points;
  return random_null_curve(seed, cfg.degree_bounds, opts);
}

inline Complex pick_sample(CounterRng& rng, const SuiteConfig& cfg) {
  const auto n = static_cast<std::uint64_t>(cfg.sample_points.size());
  return cfg.sample_points[static_cast<size_t>(rng.next_u64() % n)];
}

inline double fpoint_distance(const FPoint& a, const FPoint& b) {
  return std::max(relative_difference(a.x, b.x), projective_distance(a.pi, b.pi));
}

inline double gpoint_distance(const GPoint& a, const GPoint& b) {
  return std::max(relative_difference(a.x, b.x), projective_distance(a.v, b.v));
}

inline SpacetimePoint jet_coeff(const MatrixJet& m, int k) { return coefficient_matrix(m, k); }

struct IdentityResiduals {
  double antisymmetrization = 0.0;
  double determinant = 0.0;
  double determinant_contraction = 0.0;  // diagnostic: the contraction with the opposite sign
  double inverse = 0.0;
  double inverse_differential = 0.0;

  double battery_max() const { return std::max({antisymmetrization, determinant, inverse, inverse_differential}); }
};

inline IdentityResiduals identity_trial(std::uint64_t seed) {
  CounterRng rng(seed);
  IdentityResiduals r;
  const Vec2<Complex> pi = random_spinor(rng);
  const Vec2<Complex> psi = random_spinor(rng);
  const SpacetimePoint h = random_matrix(rng);
  const SpacetimePoint b = random_matrix(rng);
  const SpacetimePoint db = random_matrix(rng);
  r.antisymmetrization = identities::antisymmetrization_residual(pi, psi);
  r.determinant = identities::determinant_identity_residual(h);
  r.determinant_contraction = identities::determinant_contraction_residual(h);
  r.inverse = identities::inverse_identity_residual(h);
  r.inverse_differential = identities::inverse_differential_residual(b, db);
  return r;
}

inline double appendix_identities(std::uint64_t seed, const SuiteConfig&) { return identity_trial(seed).battery_max(); }

inline double roundtrip(std::uint64_t seed, const SuiteConfig& cfg) {
  const NullCurve c = random_curve(seed, cfg);
  CounterRng rng(seed, 1);
  const Complex s = pick_sample(rng, cfg);
  const TwistorJet z = kappa(c, s, kDefaultJetOrder);
  const InverseCorrespondence inv = kappa_inverse(z);
  const MatrixJet exact = c.jet(s, kDefaultJetOrder - 1);
  double r = 0.0;
  for (int k = 0; k <= 1; ++k) r = std::max(r, relative_difference(jet_coeff(inv.jet, k), jet_coeff(exact, k)));
  const TwistorJet again = kappa(inv.jet);
  r = std::max(r, projective_distance(as_vec4(value_of(again)), as_vec4(value_of(z))));
  return r;
}

inline double incidence(std::uint64_t seed, const SuiteConfig& cfg) {
  const NullCurve c = random_curve(seed, cfg);
  CounterRng rng(seed, 1);
  const Complex s = pick_sample(rng, cfg);
  const int order = kDefaultJetOrder;
  const TwistorJet z = kappa(c, s, order);
  double r = incidence_residual(z, c.jet(s, order + 1));
  // omega' = i chi pi' at the point.
  const SpacetimePoint x = c.point(s);
  const Vec2<Complex> pi_dot = derivative_of(z.pi, 1);
  const Vec2<Complex> lhs = derivative_of(z.omega, 1);
  const Vec2<Complex> rhs = scaled(x * pi_dot, Complex(0.0, 1.0));
  r = std::max(r, norm2(Vec2<Complex>{lhs[0] - rhs[0], lhs[1] - rhs[1]}) / std::max(1.0, norm2(rhs)));
  // chi'^{AA'} pi_{A'} = 0 as jets.
  const Vec2<Jet> t = c.tangent_jet(s, order) * z.pi;
  const double scale = std::max(1.0, frobenius_norm(c.tangent(s)) * norm2(value_of(z.pi)));
  for (int k = 0; k <= order; ++k) r = std::max(r, std::hypot(std::abs(t[0].coeff(k)), std::abs(t[1].coeff(k))) / scale);
  return r;
}

inline TwistorMap random_sd_map(std::uint64_t seed, bool allow_degree1) {
  CounterRng rng(seed, 7);
  if (allow_degree1 && rng.uniform() < 0.5) return random_degree1(derive_seed(seed, 1));
  return random_degree2(derive_seed(seed, 2));
}

inline double psi_independence(std::uint64_t seed, const SuiteConfig&) {
  const TwistorMap m = random_sd_map(seed, true);
  CounterRng rng(seed, 1);
  const FPoint p = random_fpoint(rng);
  const FPoint ref = apply_f1(m, p);
  const Vec2<Complex> psi1 = random_spinor(rng);
  const Complex a = rng.complex_normal();
  const Complex shift = rng.complex_normal();
  // psi -> a psi + r pi gives zdot -> a zdot + r z.
  const Vec2<Complex> psi2{a * psi1[0] + shift * p.pi[0], a * psi1[1] + shift * p.pi[1]};
  double r = fpoint_distance(apply_f1(m, p, psi1), ref);
  r = std::max(r, fpoint_distance(apply_f1(m, p, psi2), ref));
  return r;
}

inline double locality_f(std::uint64_t seed, const SuiteConfig&) {
  const TwistorMap m = random_degree2(derive_seed(seed, 2));
  CounterRng rng(seed, 1);
  const FPoint p = random_fpoint(rng);
  const LocalityReport rep = verify_locality_F(m, p, 8, derive_seed(seed, 3));
  if (rep.failures > 0) throw Error(ErrorKind::singular_image, "a family member could not be mapped");
  return std::max({rep.point_spread, rep.pi_spread, rep.pipeline_distance});
}

inline double conformal(std::uint64_t seed, const SuiteConfig&) {
  const Degree1Map m = random_degree1(derive_seed(seed, 1));
  CounterRng rng(seed, 1);
  const SpacetimePoint x = random_matrix(rng);
  const SpacetimePoint closed = moebius_closed_form(m, x);
  double r = 0.0;
  std::vector<SpacetimePoint> images;
  for (int k = 0; k < 16; ++k) {
    const FPoint img = apply_f1(TwistorMap{m}, FPoint{x, random_spinor(rng)});
    r = std::max(r, relative_difference(img.x, closed));
    images.push_back(img.x);
  }
  for (size_t i = 0; i < images.size(); ++i)
    for (size_t j = i + 1; j < images.size(); ++j) r = std::max(r, projective_distance(images[i], images[j]));
  return r;
}

inline double composition(std::uint64_t seed, const SuiteConfig&) {
  const Degree1Map f = random_degree1(derive_seed(seed, 1));
  const Degree1Map g = random_degree1(derive_seed(seed, 2));
  CounterRng rng(seed, 1);
  const FPoint p = random_fpoint(rng);
  const FPoint once = apply_f1(TwistorMap{compose(f, g)}, p);
  const FPoint twice = apply_f1(TwistorMap{f}, apply_f1(TwistorMap{g}, p));
  return fpoint_distance(once, twice);
}

inline double degree2_closed(std::uint64_t seed, const SuiteConfig&) {
  const Degree2Map m = random_degree2(derive_seed(seed, 2));
  CounterRng rng(seed, 1);
  const FPoint p = random_fpoint(rng);
  const FPoint pipeline = apply_f1(TwistorMap{m}, p);
  const FPoint closed = degree2_closed_form(m, p);
  const SpacetimePoint ratio = appendix_form(m, p, random_spinor(rng));
  return std::max(fpoint_distance(closed, pipeline), relative_difference(ratio, pipeline.x));
}

inline double pi_dependence(std::uint64_t seed, const SuiteConfig&) {
  const Degree2Map m = random_degree2(derive_seed(seed, 2));
  CounterRng rng(seed, 1);
  const SpacetimePoint x = random_matrix(rng);
  const FPoint a = degree2_closed_form(m, {x, random_spinor(rng)});
  const FPoint b = degree2_closed_form(m, {x, random_spinor(rng)});
  return projective_distance(a.x, b.x);
}

inline double null_preservation_sd(std::uint64_t seed, const SuiteConfig& cfg) {
  const TwistorMap m = random_sd_map(seed, true);
  const NullCurve c = random_curve(seed, cfg);
  double r = 0.0;
  for (const SampleImage& s : apply_to_curve(m, c, cfg.sample_points)) {
    if (!s.ok) throw Error(*s.error, "sample could not be mapped");
    r = std::max({r, s.null_residual, s.alpha_residual});
  }
  return r;
}

inline double null_preservation_causal(std::uint64_t seed, const SuiteConfig& cfg) {
  const InvariantCausalMap m = random_invariant(derive_seed(seed, 4));
  const NullCurve c = random_curve(seed, cfg);
  double r = 0.0;
  for (const CausalSample& s : apply_causal_to_curve(m, c, cfg.sample_points)) {
    if (!s.ok) throw Error(*s.error, "sample could not be mapped");
    r = std::max(r, s.null_residual);
  }
  return r;
}

inline double causal_routes(std::uint64_t seed, const SuiteConfig&) {
  const InvariantCausalMap m = random_invariant(derive_seed(seed, 4));
  CounterRng rng(seed, 1);
  const GPoint g = random_gpoint(rng);
  return gpoint_distance(apply_causal(m, g), apply_causal_generic(m, g));
}

inline double causal_invariance(std::uint64_t seed, const SuiteConfig&) {
  const InvariantCausalMap m = random_invariant(derive_seed(seed, 4));
  CounterRng rng(seed, 1);
  const GPoint g = random_gpoint(rng);
  const SpacetimePoint u = random_matrix(rng);
  const auto [p, l] = lift_g_point(g);
  const auto [pu, lu] = right_act(p, l, u);
  double r = relative_difference(patch_coordinates(pu), patch_coordinates(p));
  r = std::max(r, gpoint_distance(extract_g_point(pu, lu), extract_g_point(p, l)));
  r = std::max(r, gpoint_distance(extract_g_point(p, l), g));
  const auto [x0, v0] = extract_point(apply_causal(m, causal_data(p, l)));
  const auto [x1, v1] = extract_point(apply_causal(m, causal_data(pu, lu)));
  r = std::max(r, gpoint_distance({x1, v1}, {x0, v0}));
  CausalData<Complex> scaled_data = causal_data(p, l);
  scaled_data.pi = scaled(scaled_data.pi, rng.complex_normal());
  const auto [x2, v2] = extract_point(apply_causal(m, scaled_data));
  r = std::max(r, gpoint_distance({x2, v2}, {x0, v0}));
  return r;
}

inline double tangent_consistency(std::uint64_t seed, const SuiteConfig& cfg) {
  const InvariantCausalMap m = random_invariant(derive_seed(seed, 4));
  const NullCurve c = random_curve(seed, cfg);
  double r = 0.0;
  for (const CausalSample& s : apply_causal_to_curve(m, c, cfg.sample_points)) {
    if (!s.ok) throw Error(*s.error, "sample could not be mapped");
    r = std::max(r, s.consistency);
  }
  return r;
}

inline double locality_g(std::uint64_t seed, const SuiteConfig&) {
  const InvariantCausalMap m = random_invariant(derive_seed(seed, 4));
  CounterRng rng(seed, 1);
  const GPoint g = random_gpoint(rng);
  const std::vector<NullCurve> pair = make_tangent_family(g, derive_seed(seed, 5), 2);
  const CausalSample a = causal_sample(m, pair[0], 0.0);
  const CausalSample b = causal_sample(m, pair[1], 0.0);
  if (!a.ok) throw Error(*a.error, "sample could not be mapped");
  if (!b.ok) throw Error(*b.error, "sample could not be mapped");
  return std::max({relative_difference(a.x, b.x), projective_distance(a.v, b.v),
                   projective_distance(a.tangent, b.tangent)});
}

inline double nonlocality(std::uint64_t seed, const SuiteConfig&) {
  return demonstrate_nonlocality(TwistorMap{random_degree2(derive_seed(seed, 2))}, derive_seed(seed, 6)).distance;
}

inline double nonlocality_control(std::uint64_t seed, const SuiteConfig&) {
  return demonstrate_nonlocality(TwistorMap{random_degree1(derive_seed(seed, 1))}, derive_seed(seed, 6)).distance;
}

inline double beta_order(std::uint64_t seed, const SuiteConfig&) {
  CounterRng rng(seed, 1);
  const BP1Point p{random_matrix(rng), random_matrix(rng)};
  const Vec2<Complex> lambda = random_spinor(rng);
  Vec2<Complex> delta = random_spinor(rng);
  delta = scaled(delta, Complex(1e-3 / norm2(delta)));
  return std::abs(beta_order_check(p, lambda, delta).ratio - 4.0);
}

/// Richardson-extrapolated central differences against jet derivatives, for a curve and for
/// its self-dual image. The step is 1e-2 times the radius of convergence estimated from the jet.
inline double jet_fd(std::uint64_t seed, const SuiteConfig& cfg) {
  const NullCurve c = random_curve(seed, cfg);
  CounterRng rng(seed, 1);
  const Complex s = pick_sample(rng, cfg);
  auto compare = [&](auto&& point, const MatrixJet& jet) {
    double radius = 1.0;
    const double c1 = frobenius_norm(coefficient_matrix(jet, 1));
    for (int k = 2; k <= jet(0, 0).order(); ++k) {
      const double ck = frobenius_norm(coefficient_matrix(jet, k));
      if (ck > 0.0 && c1 > 0.0) radius = std::min(radius, std::pow(c1 / ck, 1.0 / (k - 1)));
    }
    const double h = 1e-2 * radius;
    const SpacetimePoint f0 = point(s);
    auto central = [&](double step) {
      const SpacetimePoint fp = point(s + step);
      const SpacetimePoint fm = point(s - step);
      return std::pair{(fp - fm) * (1.0 / (2.0 * step)), (fp - f0 * 2.0 + fm) * (1.0 / (step * step))};
    };
    const auto [a1, a2] = central(h);
    const auto [b1, b2] = central(h / 2.0);
    const SpacetimePoint d1 = (b1 * 4.0 - a1) * (1.0 / 3.0);
    const SpacetimePoint d2 = (b2 * 4.0 - a2) * (1.0 / 3.0);
    return std::max(relative_difference(d1, derivative_matrix(jet, 1)),
                    relative_difference(d2, derivative_matrix(jet, 2)));
  };
  double r = compare([&](Complex t) { return c.point(t); }, c.jet(s, 3));
  const TwistorMap m = random_degree2(derive_seed(seed, 2));
  auto image = [&](Complex t) {
    const SampleImage img = image_sample(m, c, t, 4);
    if (!img.ok) throw Error(*img.error, "sample could not be mapped");
    return img;
  };
  r = std::max(r, compare([&](Complex t) { return image(t).xi; }, image(s).xi_jet));
  return r;
}

}  // namespace suites

inline const std::vector<SuiteDef>& suite_registry() {
  static const std::vector<SuiteDef> registry = {
      {"appendix-identities", "two-spinor identity battery", 1e-12, Check::at_most, suites::appendix_identities},
      {"roundtrip", "kappa^{-1} o kappa on random null curves", 1e-9, Check::at_most, suites::roundtrip},
      {"incidence", "kappa output satisfies the incidence relations as jets", 1e-12, Check::at_most,
       suites::incidence},
      {"psi-independence", "self-dual image independent of psi", 1e-10, Check::at_most, suites::psi_independence},
      {"locality-F", "alpha-tangent curves share image point and alpha-plane", 1e-9, Check::at_most,
       suites::locality_f},
      {"conformal", "degree-1 pipeline equals the Moebius form, pi-independent", 1e-10, Check::at_most,
       suites::conformal},
      {"composition", "degree-1 morphisms compose like their matrices", 1e-10, Check::at_most, suites::composition},
      {"degree2-closed-form", "degree-2 pipeline, M N^{-1} form and ratio form agree", 1e-9, Check::at_most,
       suites::degree2_closed},
      {"pi-dependence", "degree-2 images depend on pi", 1e-3, Check::above, suites::pi_dependence, 0.95},
      {"null-preservation-sd", "self-dual image curves are null and alpha-consistent", 1e-9, Check::at_most,
       suites::null_preservation_sd},
      {"null-preservation-causal", "causal image curves are null", 1e-9, Check::at_most,
       suites::null_preservation_causal},
      {"causal-routes", "causal closed form equals the lift-map-invert route", 1e-9, Check::at_most,
       suites::causal_routes},
      {"causal-invariance", "causal outputs invariant under the right action and rescaling", 1e-10, Check::at_most,
       suites::causal_invariance},
      {"tangent-consistency", "causal image tangent proportional to the image direction", 1e-8, Check::at_most,
       suites::tangent_consistency},
      {"locality-G", "curves sharing a 1-jet have images sharing a 1-jet", 1e-9, Check::at_most, suites::locality_g},
      {"nonlocality", "naive route with lambda recovery depends on second derivatives", 1e-3, Check::above,
       suites::nonlocality, 0.95},
      {"nonlocality-control", "naive route is local for degree-1 maps", 1e-10, Check::at_most,
       suites::nonlocality_control},
      {"beta-order", "|ratio - 4| of first-order beta-plane residuals under halving", 0.5, Check::at_most,
       suites::beta_order},
      {"jet-fd", "jet derivatives against central differences", 1e-6, Check::at_most, suites::jet_fd},
  };
  return registry;
}

inline const SuiteDef& find_suite(const std::string& name) {
  for (const SuiteDef& s : suite_registry())
    if (s.name == name) return s;
  throw Error(ErrorKind::unknown_suite, "unknown suite: " + name);
}

/// Suite default, replaced by NULLMORPH_TOL if set, replaced by cfg.tolerance if set.
inline double resolve_tolerance(const SuiteConfig& cfg, const SuiteDef& def) {
  double tol = def.default_tolerance;
  if (const char* env = std::getenv("NULLMORPH_TOL"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    tol = std::strtod(env, &end);
    if (end == env || *end != '\0') throw Error(ErrorKind::config_invalid, "NULLMORPH_TOL is not a number");
  }
  if (cfg.tolerance) tol = *cfg.tolerance;
  if (!(tol > 0.0) || !std::isfinite(tol)) throw Error(ErrorKind::config_invalid, "tolerance must be positive");
  return tol;
}

inline SuiteReport run_suite(const SuiteConfig& cfg) {
  const SuiteDef& def = find_suite(cfg.suite_name);
  if (cfg.trials < 1) throw Error(ErrorKind::config_invalid, "trials must be at least 1");
  if (cfg.threads < 1) throw Error(ErrorKind::config_invalid, "threads must be at least 1");
  if (cfg.sample_points.empty()) throw Error(ErrorKind::config_invalid, "no sample points");
  const double tol = resolve_tolerance(cfg, def);

  struct Outcome {
    double residual = 0.0;
    std::optional<ErrorKind> error;
  };
  std::vector<Outcome> outcomes(static_cast<size_t>(cfg.trials));
  const auto start = std::chrono::steady_clock::now();
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < cfg.trials; i = next++) {
      Outcome& o = outcomes[static_cast<size_t>(i)];
      try {
        o.residual = def.trial(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)), cfg);
      } catch (const Error& e) {
        o.error = e.kind();
        o.residual = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };
  const int n_threads = std::min(cfg.threads, cfg.trials);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  SuiteReport r;
  r.suite_name = def.name;
  r.trials = cfg.trials;
  r.seed = cfg.seed;
  r.tolerance = tol;
  r.check = def.check == Check::at_most ? "at_most" : "above";
  r.required_fraction = def.required_fraction;
  r.max_residual = 0.0;
  r.min_residual = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.trials; ++i) {
    const Outcome& o = outcomes[static_cast<size_t>(i)];
    if (o.error) {
      r.failures.push_back({i, o.residual, std::string(to_string(*o.error))});
      continue;
    }
    r.max_residual = std::max(r.max_residual, o.residual);
    r.min_residual = std::min(r.min_residual, o.residual);
    const bool pass = def.check == Check::at_most ? o.residual <= tol : o.residual > tol;
    if (pass) {
      ++r.pass_count;
    } else {
      r.failures.push_back({i, o.residual, ""});
    }
  }
  if (r.pass_count + static_cast<int>(r.failures.size()) == 0) r.min_residual = 0.0;
  if (!std::isfinite(r.min_residual)) r.min_residual = 0.0;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline nlohmann::json to_json(const SuiteReport& r, bool include_wall_time = true) {
  nlohmann::json failures = nlohmann::json::array();
  for (const TrialFailure& f : r.failures) {
    nlohmann::json residual = std::isnan(f.residual) ? nlohmann::json(nullptr) : nlohmann::json(f.residual);
    failures.push_back({{"seed_index", f.seed_index}, {"residual", residual}, {"error_kind", f.error_kind}});
  }
  nlohmann::json j = {{"suite_name", r.suite_name}, {"trials", r.trials},         {"seed", r.seed},
                      {"tolerance", r.tolerance},   {"check", r.check},           {"pass_count", r.pass_count},
                      {"max_residual", r.max_residual}, {"min_residual", r.min_residual}, {"failures", failures},
                      {"required_fraction", r.required_fraction}, {"passed", r.all_passed()}};
  if (include_wall_time) j["wall_time"] = r.wall_time;
  return j;
}

}  // namespace nullmorph
