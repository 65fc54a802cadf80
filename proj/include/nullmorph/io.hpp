#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullmorph/causal.hpp"
#include "nullmorph/endomorphism.hpp"
#include "nullmorph/null_curve.hpp"
#include "nullmorph/spinor.hpp"
#include "nullmorph/twistor.hpp"

namespace nullmorph::io {

using json = nlohmann::json;

/// Malformed or unreadable input.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline Complex complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw IoError("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <size_t N>
json to_json(const std::array<Complex, N>& v) {
  json j = json::array();
  for (const Complex c : v) j.push_back(to_json(c));
  return j;
}

template <size_t N>
std::array<Complex, N> array_from(const json& j) {
  if (!j.is_array() || j.size() != N) throw IoError("expected an array of " + std::to_string(N) + " complex numbers");
  std::array<Complex, N> v;
  for (size_t i = 0; i < N; ++i) v[i] = complex_from(j[i]);
  return v;
}

inline Vec2<Complex> vec2_from(const json& j) { return array_from<2>(j); }

inline json to_json(const SpacetimePoint& m) {
  return json::array({to_json(Vec2<Complex>{m(0, 0), m(0, 1)}), to_json(Vec2<Complex>{m(1, 0), m(1, 1)})});
}

/// Accepts [[a, b], [c, d]] or the flat row-major [a, b, c, d].
inline SpacetimePoint matrix_from(const json& j) {
  if (!j.is_array()) throw IoError("expected a 2x2 complex matrix");
  if (j.size() == 4) {
    const auto f = array_from<4>(j);
    return {{{{f[0], f[1]}, {f[2], f[3]}}}};
  }
  if (j.size() != 2) throw IoError("expected a 2x2 complex matrix");
  const auto r0 = vec2_from(j[0]);
  const auto r1 = vec2_from(j[1]);
  return {{{{r0[0], r0[1]}, {r1[0], r1[1]}}}};
}

inline json to_json(const Mat4& m) {
  json j = json::array();
  for (const auto& row : m) j.push_back(to_json(row));
  return j;
}

inline Mat4 mat4_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw IoError("expected a 4x4 complex matrix");
  Mat4 m;
  for (size_t r = 0; r < 4; ++r) m[r] = array_from<4>(j[r]);
  return m;
}

inline json to_json(const Tensor3& t) {
  json j = json::array();
  for (const auto& slab : t) {
    json s = json::array();
    for (const auto& row : slab) s.push_back(to_json(row));
    j.push_back(s);
  }
  return j;
}

inline Tensor3 tensor3_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw IoError("expected a 2x2x2 complex tensor");
  Tensor3 t;
  for (size_t i = 0; i < 2; ++i) {
    if (!j[i].is_array() || j[i].size() != 2) throw IoError("expected a 2x2x2 complex tensor");
    for (size_t b = 0; b < 2; ++b) t[i][b] = array_from<2>(j[i][b]);
  }
  return t;
}

// --- curves ---------------------------------------------------------------

/// Spinor polynomial as a list of per-power coefficient pairs.
inline json poly_spinor_to_json(const PolySpinor& p) {
  const size_t n = std::max(p[0].size(), p[1].size());
  json j = json::array();
  for (size_t k = 0; k < n; ++k) {
    const Complex a = k < p[0].size() ? p[0][k] : Complex{};
    const Complex b = k < p[1].size() ? p[1][k] : Complex{};
    j.push_back(to_json(Vec2<Complex>{a, b}));
  }
  return j;
}

inline PolySpinor poly_spinor_from(const json& j) {
  if (!j.is_array() || j.empty()) throw IoError("expected a non-empty list of spinor coefficients");
  PolySpinor p;
  for (const auto& c : j) {
    const auto v = vec2_from(c);
    p[0].push_back(v[0]);
    p[1].push_back(v[1]);
  }
  return p;
}

inline json to_json(const NullCurve& c) {
  return {{"base", to_json(c.base)}, {"lambda", poly_spinor_to_json(c.lambda)}, {"pi", poly_spinor_to_json(c.pi)}};
}

inline NullCurve curve_from(const json& j) {
  if (!j.is_object() || !j.contains("base") || !j.contains("lambda") || !j.contains("pi")) {
    throw IoError("curve needs base, lambda and pi");
  }
  return make_null_curve(matrix_from(j.at("base")), poly_spinor_from(j.at("lambda")), poly_spinor_from(j.at("pi")));
}

// --- points ---------------------------------------------------------------

inline json to_json(const FPoint& p) { return {{"x", to_json(p.x)}, {"pi", to_json(p.pi)}}; }
inline FPoint fpoint_from(const json& j) { return {matrix_from(j.at("x")), vec2_from(j.at("pi"))}; }

inline json to_json(const GPoint& g) { return {{"x", to_json(g.x)}, {"v", to_json(g.v)}}; }
inline GPoint gpoint_from(const json& j) { return {matrix_from(j.at("x")), matrix_from(j.at("v"))}; }

inline json to_json(const BP1Point& p) { return {{"b0", to_json(p.b0)}, {"b1", to_json(p.b1)}}; }
inline BP1Point bp1_from(const json& j) { return {matrix_from(j.at("b0")), matrix_from(j.at("b1"))}; }

inline json to_json(const Jet& jet) {
  json j = json::array();
  for (int k = 0; k <= jet.order(); ++k) j.push_back(to_json(jet.coeff(k)));
  return j;
}

inline Jet jet_from(const json& j) {
  if (!j.is_array() || j.empty()) throw IoError("expected a list of jet coefficients");
  std::vector<Complex> c;
  for (const auto& e : j) c.push_back(complex_from(e));
  return Jet::from_coeffs(c);
}

/// Twistor jet: order and the Taylor coefficients of each of the four components.
inline json to_json(const TwistorJet& z) {
  json comps = json::array();
  for (const Jet& c : as_vec4(z)) comps.push_back(to_json(c));
  return {{"order", z.pi[0].order()}, {"components", comps}, {"value", to_json(as_vec4(value_of(z)))}};
}

inline TwistorJet twistor_jet_from(const json& j) {
  const json& c = j.at("components");
  if (!c.is_array() || c.size() != 4) throw IoError("twistor jet needs four components");
  return {{jet_from(c[0]), jet_from(c[1])}, {jet_from(c[2]), jet_from(c[3])}};
}

// --- maps -----------------------------------------------------------------

inline json to_json(const Degree1Map& m) { return {{"kind", "degree1"}, {"f", to_json(m.f)}}; }

inline json to_json(const Degree2Map& m) {
  return {{"kind", "degree2"},
          {"f", json::array({to_json(m.f[0]), to_json(m.f[1])})},
          {"g", json::array({to_json(m.g[0]), to_json(m.g[1])})}};
}

inline json to_json(const InvariantCausalMap& m) {
  return {{"kind", "invariant"}, {"a", to_json(m.a)}, {"b", to_json(m.b)}, {"c", to_json(m.c)}, {"d", to_json(m.d)},
          {"e", to_json(m.e)},   {"f", to_json(m.f)}, {"g", to_json(m.g)}, {"h", to_json(m.h)}};
}

inline json to_json(const TwistorMap& m) {
  return std::visit([](const auto& map) { return to_json(map); }, m);
}

inline std::string map_kind(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw IoError("map needs a kind");
  return j.at("kind").get<std::string>();
}

inline TwistorMap twistor_map_from(const json& j) {
  const std::string kind = map_kind(j);
  if (kind == "degree1") return Degree1Map{mat4_from(j.at("f"))};
  if (kind == "degree2") {
    const json& f = j.at("f");
    const json& g = j.at("g");
    if (f.size() != 2 || g.size() != 2) throw IoError("degree2 map needs two f and two g matrices");
    return Degree2Map({mat4_from(f[0]), mat4_from(f[1])}, {mat4_from(g[0]), mat4_from(g[1])});
  }
  throw IoError("unsupported twistor map kind: " + kind);
}

inline InvariantCausalMap invariant_map_from(const json& j) {
  if (map_kind(j) != "invariant") throw IoError("expected an invariant map");
  InvariantCausalMap m;
  m.a = tensor3_from(j.at("a"));
  m.c = tensor3_from(j.at("c"));
  m.e = tensor3_from(j.at("e"));
  m.g = tensor3_from(j.at("g"));
  m.b = vec2_from(j.at("b"));
  m.d = vec2_from(j.at("d"));
  m.f = vec2_from(j.at("f"));
  m.h = vec2_from(j.at("h"));
  return m;
}

// --- files ----------------------------------------------------------------

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// Sampled curve as CSV: s_re, s_im, then the four point components as re/im pairs.
inline void write_curve_csv(std::ostream& out, const std::vector<Complex>& s, const std::vector<SpacetimePoint>& pts) {
  out << "s_re,s_im,x00_re,x00_im,x01_re,x01_im,x10_re,x10_im,x11_re,x11_im\n";
  out << std::setprecision(17);
  for (size_t i = 0; i < s.size() && i < pts.size(); ++i) {
    out << s[i].real() << ',' << s[i].imag();
    for (const Complex c : flatten(pts[i])) out << ',' << c.real() << ',' << c.imag();
    out << '\n';
  }
}

}  // namespace nullmorph::io
