// Command-line front end: curve and map generation, the correspondence, morphism
// application and the verification suites.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nullmorph/nullmorph.hpp"

namespace {

using namespace nullmorph;
using io::json;

constexpr int kExitUsage = 1;
constexpr int kExitSingular = 2;
constexpr int kExitSuiteFailure = 3;

Complex parse_complex(const std::string& text) {
  std::stringstream ss(text);
  double re = 0.0;
  double im = 0.0;
  char sep = 0;
  if (!(ss >> re)) throw io::IoError("cannot parse complex number '" + text + "'");
  if (ss >> sep) {
    if (sep != ',' || !(ss >> im)) throw io::IoError("expected 're' or 're,im', got '" + text + "'");
  }
  return {re, im};
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    io::write_json(out, j);
  }
}

/// N real parameters evenly spaced in [-0.9, 0.9] (the origin alone for N = 1).
std::vector<Complex> sample_grid(int n) {
  if (n < 1) throw Error(ErrorKind::config_invalid, "--samples must be at least 1");
  std::vector<Complex> s;
  for (int k = 0; k < n; ++k) s.emplace_back(n == 1 ? 0.0 : -0.9 + 1.8 * k / (n - 1), 0.0);
  return s;
}

struct Options {
  std::uint64_t seed = 0;
  int degree = 2;
  int lambda_degree = -1;
  int pi_degree = -1;
  std::string out;
  std::string csv;
  std::string kind = "degree2";
  std::string curve;
  std::string map;
  std::string point;
  std::string at = "0";
  int order = kDefaultJetOrder;
  int samples = 8;
  std::string suite;
  int trials = 100;
  std::optional<double> tol;
  int threads = 1;
  bool json_out = false;
  bool no_wall_time = false;
};

int cmd_gen_curve(const Options& o) {
  DegreeBounds d{o.lambda_degree >= 0 ? o.lambda_degree : o.degree, o.pi_degree >= 0 ? o.pi_degree : o.degree};
  const NullCurve c = random_null_curve(o.seed, d);
  emit(io::to_json(c), o.out);
  if (!o.csv.empty()) {
    const std::vector<Complex> s = sample_grid(o.samples);
    std::vector<SpacetimePoint> pts;
    for (const Complex t : s) pts.push_back(c.point(t));
    std::ostringstream csv;
    io::write_curve_csv(csv, s, pts);
    io::write_text(o.csv, csv.str());
  }
  return 0;
}

int cmd_gen_map(const Options& o) {
  if (o.kind == "degree1") {
    emit(io::to_json(random_degree1(o.seed)), o.out);
  } else if (o.kind == "degree2") {
    emit(io::to_json(random_degree2(o.seed)), o.out);
  } else if (o.kind == "identity") {
    emit(io::to_json(Degree1Map{}), o.out);
  } else if (o.kind == "invariant") {
    emit(io::to_json(random_invariant(o.seed)), o.out);
  } else {
    throw io::IoError("unknown map kind '" + o.kind + "' (degree1, degree2, identity, invariant)");
  }
  return 0;
}

int cmd_kappa(const Options& o) {
  const NullCurve c = io::curve_from(io::read_json(o.curve));
  const Complex s0 = parse_complex(o.at);
  const TwistorJet z = kappa(c, s0, o.order);
  json j = io::to_json(z);
  j["at"] = io::to_json(s0);
  j["incidence_residual"] = incidence_residual(z, c.jet(s0, o.order + 1));
  emit(j, o.out);
  return 0;
}

json sd_point_report(const TwistorMap& m, const FPoint& p) {
  const FPoint img = apply_f1(m, p);
  json j = {{"xi", io::to_json(img.x)}, {"pi_tilde", io::to_json(img.pi)}};
  json residuals;
  if (const auto* d1 = std::get_if<Degree1Map>(&m)) {
    residuals["closed_form"] = relative_difference(moebius_closed_form(*d1, p.x), img.x);
  } else {
    const FPoint closed = degree2_closed_form(std::get<Degree2Map>(m), p);
    residuals["closed_form"] = std::max(relative_difference(closed.x, img.x), projective_distance(closed.pi, img.pi));
  }
  const Vec2<Complex> other{p.pi[0] + 1.0, p.pi[1] - Complex(0.0, 1.0)};
  residuals["psi_spread"] = relative_difference(apply_f1(m, p, other).x, img.x);
  j["residuals"] = residuals;
  return j;
}

int cmd_map_sd(const Options& o) {
  const TwistorMap m = io::twistor_map_from(io::read_json(o.map));
  if (!o.point.empty()) {
    emit(sd_point_report(m, io::fpoint_from(io::read_json(o.point))), o.out);
    return 0;
  }
  const NullCurve c = io::curve_from(io::read_json(o.curve));
  const std::vector<Complex> s = sample_grid(o.samples);
  const std::vector<SampleImage> imgs = apply_to_curve(m, c, s, o.order);
  json samples = json::array();
  std::vector<Complex> ok_s;
  std::vector<SpacetimePoint> ok_pts;
  bool any_error = false;
  for (const SampleImage& img : imgs) {
    json e = {{"s", io::to_json(img.s)}, {"ok", img.ok}};
    if (img.ok) {
      e["xi"] = io::to_json(img.xi);
      e["pi_tilde"] = io::to_json(img.pi_tilde);
      e["null_residual"] = img.null_residual;
      e["alpha_residual"] = img.alpha_residual;
      e["input_distance"] = relative_difference(img.xi, c.point(img.s));
      ok_s.push_back(img.s);
      ok_pts.push_back(img.xi);
    } else {
      e["error"] = std::string(to_string(*img.error));
      any_error = true;
    }
    samples.push_back(e);
  }
  emit({{"samples", samples}}, o.out);
  if (!o.csv.empty()) {
    std::ostringstream csv;
    io::write_curve_csv(csv, ok_s, ok_pts);
    io::write_text(o.csv, csv.str());
  }
  return any_error ? kExitSingular : 0;
}

int cmd_map_causal(const Options& o) {
  const InvariantCausalMap m = io::invariant_map_from(io::read_json(o.map));
  if (!o.point.empty()) {
    const GPoint g = io::gpoint_from(io::read_json(o.point));
    const GPoint img = apply_causal(m, g);
    const GPoint generic = apply_causal_generic(m, g);
    emit({{"x", io::to_json(img.x)},
          {"v", io::to_json(img.v)},
          {"residuals",
           {{"generic_route", std::max(relative_difference(generic.x, img.x), projective_distance(generic.v, img.v))},
            {"v_null", relative_null_residual(img.v)}}}},
         o.out);
    return 0;
  }
  const NullCurve c = io::curve_from(io::read_json(o.curve));
  const std::vector<Complex> s = sample_grid(o.samples);
  json samples = json::array();
  std::vector<Complex> ok_s;
  std::vector<SpacetimePoint> ok_pts;
  bool any_error = false;
  for (const CausalSample& cs : apply_causal_to_curve(m, c, s, o.order)) {
    json e = {{"s", io::to_json(cs.s)}, {"ok", cs.ok}};
    if (cs.ok) {
      e["x"] = io::to_json(cs.x);
      e["v"] = io::to_json(cs.v);
      e["tangent"] = io::to_json(cs.tangent);
      e["null_residual"] = cs.null_residual;
      e["consistency"] = cs.consistency;
      ok_s.push_back(cs.s);
      ok_pts.push_back(cs.x);
    } else {
      e["error"] = std::string(to_string(*cs.error));
      any_error = true;
    }
    samples.push_back(e);
  }
  emit({{"samples", samples}}, o.out);
  if (!o.csv.empty()) {
    std::ostringstream csv;
    io::write_curve_csv(csv, ok_s, ok_pts);
    io::write_text(o.csv, csv.str());
  }
  return any_error ? kExitSingular : 0;
}

int cmd_verify(const Options& o) {
  std::vector<std::string> names;
  if (o.suite == "all") {
    for (const SuiteDef& s : suite_registry()) names.push_back(s.name);
  } else {
    names.push_back(o.suite);
  }
  bool all = true;
  json reports = json::array();
  for (const std::string& name : names) {
    SuiteConfig cfg;
    cfg.suite_name = name;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.tolerance = o.tol;
    cfg.threads = o.threads;
    const SuiteReport r = run_suite(cfg);
    all = all && r.all_passed();
    if (o.json_out) {
      reports.push_back(to_json(r, !o.no_wall_time));
    } else {
      std::printf("%-26s %s  %d/%d  max %.3e  min %.3e  tol %.1e (%s)\n", r.suite_name.c_str(),
                  r.all_passed() ? "PASS" : "FAIL", r.pass_count, r.trials, r.max_residual, r.min_residual,
                  r.tolerance, r.check.c_str());
    }
  }
  if (o.json_out) std::cout << (names.size() == 1 ? reports[0] : reports).dump(2) << "\n";
  return all ? 0 : kExitSuiteFailure;
}

int cmd_identities(const Options& o) {
  suites::IdentityResiduals worst;
  for (int i = 0; i < o.trials; ++i) {
    const suites::IdentityResiduals r = suites::identity_trial(derive_seed(o.seed, static_cast<std::uint64_t>(i)));
    worst.antisymmetrization = std::max(worst.antisymmetrization, r.antisymmetrization);
    worst.determinant = std::max(worst.determinant, r.determinant);
    worst.determinant_contraction = std::max(worst.determinant_contraction, r.determinant_contraction);
    worst.inverse = std::max(worst.inverse, r.inverse);
    worst.inverse_differential = std::max(worst.inverse_differential, r.inverse_differential);
  }
  const double tol = o.tol.value_or(1e-12);
  const json j = {{"trials", o.trials},
                  {"tolerance", tol},
                  {"antisymmetrization", worst.antisymmetrization},
                  {"determinant", worst.determinant},
                  {"determinant_opposite_sign", worst.determinant_contraction},
                  {"inverse", worst.inverse},
                  {"inverse_differential", worst.inverse_differential}};
  std::cout << j.dump(2) << "\n";
  return worst.battery_max() <= tol ? 0 : kExitSuiteFailure;
}

int cmd_nonlocality(const Options& o) {
  const TwistorMap m = o.map.empty() ? TwistorMap{random_degree2(o.seed)} : io::twistor_map_from(io::read_json(o.map));
  const NonlocalityReport r = demonstrate_nonlocality(m, o.seed);
  const NonlocalityReport control = demonstrate_nonlocality(TwistorMap{random_degree1(o.seed)}, o.seed);
  emit({{"degree", degree(m)},
        {"distance", r.distance},
        {"image_point_difference", r.point_difference},
        {"tangent_a", io::to_json(r.tangent_a)},
        {"tangent_b", io::to_json(r.tangent_b)},
        {"degree1_control_distance", control.distance}},
       o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Null-curve morphisms: twistor correspondence, self-dual and causal morphisms"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-curve", "random nonsingular polynomial null curve (JSON)");
  gen->add_option("--seed", o.seed);
  gen->add_option("--degree", o.degree, "degree of both lambda and pi");
  gen->add_option("--lambda-degree", o.lambda_degree);
  gen->add_option("--pi-degree", o.pi_degree);
  gen->add_option("--out", o.out);
  gen->add_option("--csv", o.csv, "also write sampled points");
  gen->add_option("--samples", o.samples);

  auto* gmap = app.add_subcommand("gen-map", "random map (degree1, degree2, identity, invariant)");
  gmap->add_option("--kind", o.kind);
  gmap->add_option("--seed", o.seed);
  gmap->add_option("--out", o.out);

  auto* kap = app.add_subcommand("kappa", "twistor jet of a curve at a parameter");
  kap->add_option("--curve", o.curve)->required();
  kap->add_option("--at", o.at, "parameter as 're' or 're,im'");
  kap->add_option("--order", o.order);
  kap->add_option("--out", o.out);

  auto* sd = app.add_subcommand("map-sd", "apply a self-dual morphism to a point or a curve");
  sd->add_option("--map", o.map)->required();
  auto* sd_point = sd->add_option("--point", o.point, "FPoint JSON {x, pi}");
  auto* sd_curve = sd->add_option("--curve", o.curve);
  sd_point->excludes(sd_curve);
  sd->add_option("--samples", o.samples);
  sd->add_option("--order", o.order);
  sd->add_option("--out", o.out);
  sd->add_option("--csv", o.csv);

  auto* causal = app.add_subcommand("map-causal", "apply a causal morphism to a point of G or a curve");
  causal->add_option("--map", o.map)->required();
  auto* c_point = causal->add_option("--gpoint", o.point, "GPoint JSON {x, v}");
  auto* c_curve = causal->add_option("--curve", o.curve);
  c_point->excludes(c_curve);
  causal->add_option("--samples", o.samples);
  causal->add_option("--order", o.order);
  causal->add_option("--out", o.out);
  causal->add_option("--csv", o.csv);

  auto* ver = app.add_subcommand("verify", "run a property suite (or 'all')");
  ver->add_option("--suite", o.suite)->required();
  ver->add_option("--trials", o.trials);
  ver->add_option("--seed", o.seed);
  ver->add_option("--tol", o.tol);
  ver->add_option("--threads", o.threads);
  ver->add_flag("--json", o.json_out);
  ver->add_flag("--no-wall-time", o.no_wall_time, "omit wall_time from JSON reports");

  auto* ids = app.add_subcommand("identities", "two-spinor identity battery");
  ids->add_option("--trials", o.trials);
  ids->add_option("--seed", o.seed);
  ids->add_option("--tol", o.tol);

  auto* nl = app.add_subcommand("nonlocality-demo", "second-derivative dependence of the naive causal route");
  nl->add_option("--seed", o.seed);
  nl->add_option("--map", o.map, "twistor map JSON (default: random degree-2)");
  nl->add_option("--out", o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_curve(o);
    if (gmap->parsed()) return cmd_gen_map(o);
    if (kap->parsed()) return cmd_kappa(o);
    if (sd->parsed()) {
      if (o.point.empty() && o.curve.empty()) throw io::IoError("map-sd needs --point or --curve");
      return cmd_map_sd(o);
    }
    if (causal->parsed()) {
      if (o.point.empty() && o.curve.empty()) throw io::IoError("map-causal needs --gpoint or --curve");
      return cmd_map_causal(o);
    }
    if (ver->parsed()) return cmd_verify(o);
    if (ids->parsed()) return cmd_identities(o);
    if (nl->parsed()) return cmd_nonlocality(o);
  } catch (const io::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_singular_input(e.kind()) ? kExitSingular : kExitUsage;
  } catch (const io::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
