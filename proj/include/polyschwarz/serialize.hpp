#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polyschwarz/bergman.hpp"
#include "polyschwarz/comparison.hpp"
#include "polyschwarz/errors.hpp"
#include "polyschwarz/maps.hpp"
#include "polyschwarz/order.hpp"
#include "polyschwarz/schwarzian.hpp"
#include "polyschwarz/verify.hpp"

namespace polyschwarz {

/// Ordered keys keep emitted documents canonical: rerunning a command with
/// the same inputs yields byte-identical output.
using Json = nlohmann::ordered_json;

namespace serialize_detail {

/// JSON has no literals for non-finite reals; they appear as tagged strings.
inline Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace serialize_detail

// ---------------------------------------------------------------------------
// Complex scalars, points, and literals.
// ---------------------------------------------------------------------------

inline Json complex_to_json(cxd v) { return Json::array({v.real(), v.imag()}); }

inline cxd complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw parse_error("complex value must be a two-element array [re, im]");
  return cxd{j[0].get<double>(), j[1].get<double>()};
}

inline Json point_to_json(const Point& z) {
  Json out = Json::array();
  for (const cxd& c : z) out.push_back(complex_to_json(c));
  return out;
}

inline Point point_from_json(const Json& j) {
  if (!j.is_array()) throw parse_error("point must be an array of [re, im] pairs");
  Point z;
  for (const Json& c : j) z.push_back(complex_from_json(c));
  return z;
}

namespace serialize_detail {

inline double parse_real_token(const std::string& tok) {
  if (tok.empty()) throw parse_error("empty numeric literal");
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size())
    throw parse_error("malformed numeric literal '" + tok + "'");
  return v;
}

}  // namespace serialize_detail

/// Parses literals of the form "0.1", "-0.2i", "0.1+0.2i", "1e-3-2e-4i", "i".
inline cxd parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw parse_error("empty complex literal");

  const bool imag_tail = s.back() == 'i' || s.back() == 'I';
  if (!imag_tail) return cxd{serialize_detail::parse_real_token(s), 0.0};

  s.pop_back();
  // The last sign not opening the string and not part of an exponent splits
  // the real part from the imaginary coefficient.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag_coeff = [](const std::string& tok) {
    if (tok.empty() || tok == "+") return 1.0;
    if (tok == "-") return -1.0;
    return serialize_detail::parse_real_token(tok);
  };
  if (split == std::string::npos) return cxd{0.0, imag_coeff(s)};
  return cxd{serialize_detail::parse_real_token(s.substr(0, split)),
             imag_coeff(s.substr(split))};
}

/// Parses a comma-separated list of complex literals; checks the length when
/// expected_n >= 0.
inline Point parse_point(const std::string& text, int expected_n = -1) {
  Point z;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string tok =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    z.push_back(parse_complex(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (expected_n >= 0 && static_cast<int>(z.size()) != expected_n)
    throw parse_error("expected " + std::to_string(expected_n) + " coordinates, got " +
                      std::to_string(z.size()));
  return z;
}

// ---------------------------------------------------------------------------
// Map descriptions: {"n": int, "expr": node}, nodes mirroring MapExpr.
// ---------------------------------------------------------------------------

namespace serialize_detail {

inline Json node_to_json(const MapExpr& f) {
  Json node;
  switch (f.kind()) {
    case MapKind::identity:
      node["kind"] = "identity";
      break;
    case MapKind::moebius: {
      node["kind"] = "moebius";
      Json rows = Json::array();
      const CMat& m = f.matrix();
      for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
      }
      node["matrix"] = std::move(rows);
      break;
    }
    case MapKind::automorphism:
      node["kind"] = "automorphism";
      node["a"] = point_to_json(f.params());
      break;
    case MapKind::normalizer:
      node["kind"] = "normalizer";
      node["a"] = point_to_json(f.params());
      break;
    case MapKind::dilation:
      node["kind"] = "dilation";
      node["s"] = f.scale();
      node["inner"] = node_to_json(f.inner());
      break;
    case MapKind::compose:
      node["kind"] = "compose";
      node["outer"] = node_to_json(f.outer());
      node["inner"] = node_to_json(f.inner());
      break;
    case MapKind::polynomial: {
      node["kind"] = "polynomial";
      Json terms = Json::array();
      for (const PolyTerm& t : f.terms()) {
        Json jt;
        jt["target"] = t.target;
        jt["exponents"] = t.exponents;
        jt["coeff"] = complex_to_json(t.coeff);
        terms.push_back(std::move(jt));
      }
      node["terms"] = std::move(terms);
      break;
    }
  }
  return node;
}

inline MapExpr node_from_json(const Json& node, int n) {
  if (!node.is_object() || !node.contains("kind") || !node["kind"].is_string())
    throw parse_error("map node must be an object with a string field 'kind'");
  const std::string kind = node["kind"].get<std::string>();
  if (kind == "identity") return MapExpr::identity(n);
  if (kind == "moebius") {
    if (!node.contains("matrix") || !node["matrix"].is_array())
      throw parse_error("moebius node requires an array field 'matrix'");
    const Json& rows = node["matrix"];
    if (static_cast<int>(rows.size()) != n + 1)
      throw parse_error("moebius matrix must have n+1 rows");
    CMat m(n + 1, n + 1);
    for (int r = 0; r <= n; ++r) {
      if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n + 1)
        throw parse_error("moebius matrix row must have n+1 entries");
      for (int c = 0; c <= n; ++c) m(r, c) = complex_from_json(rows[r][c]);
    }
    return MapExpr::moebius(n, std::move(m));
  }
  if (kind == "automorphism" || kind == "normalizer") {
    if (!node.contains("a")) throw parse_error(kind + " node requires a field 'a'");
    Point a = point_from_json(node["a"]);
    if (static_cast<int>(a.size()) != n)
      throw parse_error(kind + " parameter list must have n entries");
    return kind == "automorphism" ? MapExpr::automorphism(std::move(a))
                                  : MapExpr::normalizer(std::move(a));
  }
  if (kind == "dilation") {
    if (!node.contains("s") || !node["s"].is_number() || !node.contains("inner"))
      throw parse_error("dilation node requires a real 's' and an 'inner' node");
    return MapExpr::dilation(node["s"].get<double>(), node_from_json(node["inner"], n));
  }
  if (kind == "compose") {
    if (!node.contains("outer") || !node.contains("inner"))
      throw parse_error("compose node requires 'outer' and 'inner' nodes");
    return MapExpr::compose(node_from_json(node["outer"], n),
                            node_from_json(node["inner"], n));
  }
  if (kind == "polynomial") {
    if (!node.contains("terms") || !node["terms"].is_array())
      throw parse_error("polynomial node requires an array field 'terms'");
    std::vector<PolyTerm> terms;
    for (const Json& jt : node["terms"]) {
      if (!jt.is_object() || !jt.contains("target") || !jt.contains("exponents") ||
          !jt.contains("coeff"))
        throw parse_error("polynomial term requires 'target', 'exponents', 'coeff'");
      PolyTerm t;
      t.target = jt["target"].get<int>();
      if (!jt["exponents"].is_array())
        throw parse_error("polynomial exponents must be an integer array");
      for (const Json& e : jt["exponents"]) t.exponents.push_back(e.get<int>());
      t.coeff = complex_from_json(jt["coeff"]);
      terms.push_back(std::move(t));
    }
    int degree_cap = 6;
    for (const PolyTerm& t : terms) {
      int total = 0;
      for (int e : t.exponents) total += std::max(e, 0);
      degree_cap = std::max(degree_cap, total);
    }
    return MapExpr::polynomial(n, std::move(terms), degree_cap);
  }
  throw parse_error("unknown map node kind '" + kind + "'");
}

}  // namespace serialize_detail

inline Json map_to_json(const MapExpr& f) {
  Json doc;
  doc["n"] = f.dim();
  doc["expr"] = serialize_detail::node_to_json(f);
  return doc;
}

inline MapExpr map_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer() ||
      !doc.contains("expr"))
    throw parse_error("map description must be {\"n\": int, \"expr\": node}");
  const int n = doc["n"].get<int>();
  if (n < 1) throw parse_error("map description: n must be >= 1");
  return serialize_detail::node_from_json(doc["expr"], n);
}

/// Parses a full map-description document; json syntax errors and schema
/// violations both surface as parse_error with a one-line diagnostic.
inline MapExpr parse_map_document(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("map description: ") + e.what());
  }
  try {
    return map_from_json(doc);
  } catch (const precondition_error& e) {
    throw parse_error(std::string("map description: ") + e.what());
  }
}

inline std::string write_map_document(const MapExpr& f) { return map_to_json(f).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Result documents.
// ---------------------------------------------------------------------------

inline Json to_json(const OperatorNormResult& r) {
  Json j;
  j["value"] = serialize_detail::num(r.value);
  j["argmax"] = point_to_json(r.argmax);
  j["converged"] = r.converged;
  j["starts"] = r.starts;
  j["iterations"] = r.iterations;
  return j;
}

inline Json to_json(const SchwarzianTensor& t) {
  Json j;
  j["n"] = t.n;
  j["z"] = point_to_json(t.point);
  Json blocks = Json::array();
  for (int k = 0; k < t.n; ++k) {
    Json rows = Json::array();
    for (int i = 0; i < t.n; ++i) {
      Json row = Json::array();
      for (int c = 0; c < t.n; ++c) row.push_back(complex_to_json(t.S[k](i, c)));
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::move(rows));
  }
  j["S"] = std::move(blocks);
  Json s0 = Json::array();
  for (int i = 0; i < t.n; ++i) {
    Json row = Json::array();
    for (int c = 0; c < t.n; ++c) row.push_back(complex_to_json(t.S0(i, c)));
    s0.push_back(std::move(row));
  }
  j["S0"] = std::move(s0);
  j["jacobian_det"] = complex_to_json(t.jacobian_det);
  j["max_entry"] = serialize_detail::num(tensor_max_abs(t));
  j["canonical_residual"] = serialize_detail::num(canonical_residual(t));
  return j;
}

inline Json to_json(const SupNormResult& r) {
  Json j;
  j["value"] = serialize_detail::num(r.value);
  j["witness"] = point_to_json(r.witness);
  j["at_witness"] = to_json(r.at_witness);
  j["grid"] = Json{{"radii", r.grid.radii}, {"phases", r.grid.phases}};
  j["refine"] = r.refine;
  j["points_evaluated"] = r.points_evaluated;
  j["points_skipped"] = r.points_skipped;
  j["lower_bound_only"] = r.lower_bound_only;
  return j;
}

inline Json to_json(const OdeStatus& s) {
  Json j;
  switch (s.kind) {
    case OdeStatusKind::completed:
      j["completed"] = serialize_detail::num(s.where);
      break;
    case OdeStatusKind::first_zero:
      j["first_zero"] = serialize_detail::num(s.where);
      break;
    case OdeStatusKind::blowup:
      j["blowup_at"] = serialize_detail::num(s.where);
      break;
  }
  if (s.kind != OdeStatusKind::completed)
    j["bracket"] = Json::array({s.bracket_lo, s.bracket_hi});
  if (s.warning) j["warning"] = true;
  return j;
}

inline Json to_json(const OdeOutcome& o) {
  Json j;
  j["status"] = to_json(o.status);
  j["value_names"] = o.value_names;
  j["envelope_ok"] = o.envelope_ok;
  j["worst_margin"] = serialize_detail::num(o.worst_margin);
  Json rows = Json::array();
  for (const OdeSample& s : o.samples) {
    Json row = Json::array({s.t});
    for (double v : s.v) row.push_back(serialize_detail::num(v));
    rows.push_back(std::move(row));
  }
  j["samples"] = std::move(rows);
  return j;
}

/// CSV rendering of the sampled curves: header "t,<name>,..." then one row
/// per accepted step, full double precision.
inline std::string ode_samples_csv(const OdeOutcome& o) {
  std::string out = "t";
  for (const std::string& name : o.value_names) out += "," + name;
  out += "\n";
  for (const OdeSample& s : o.samples) {
    out += serialize_detail::csv_num(s.t);
    for (double v : s.v) out += "," + serialize_detail::csv_num(v);
    out += "\n";
  }
  return out;
}

inline Json to_json(const BoundParams& p) {
  Json j;
  j["n"] = p.n;
  j["alpha"] = serialize_detail::num(p.alpha);
  j["gamma_variant"] = p.variant == GammaVariant::proof ? "proof" : "statement";
  j["a"] = serialize_detail::num(p.a);
  j["b"] = serialize_detail::num(p.b);
  j["c"] = serialize_detail::num(p.c);
  j["gamma"] = serialize_detail::num(p.gamma);
  j["tau"] = serialize_detail::num(p.tau);
  j["c1"] = serialize_detail::num(p.c1);
  j["c2"] = serialize_detail::num(p.c2);
  j["eps"] = serialize_detail::num(p.eps);
  j["delta"] = serialize_detail::num(p.delta);
  return j;
}

inline Json to_json(const EnvelopeReport& r) {
  Json j;
  j["applicable"] = r.applicable;
  j["n"] = r.n;
  j["alpha"] = serialize_detail::num(r.alpha);
  j["threshold_value"] = serialize_detail::num(r.threshold_value);
  j["rays"] = r.rays;
  j["t_end"] = serialize_detail::num(r.t_end);
  j["worst_ratio_margin"] = serialize_detail::num(r.worst_ratio_margin);
  j["worst_u_lower"] = serialize_detail::num(r.worst_u_lower);
  j["worst_u_upper"] = serialize_detail::num(r.worst_u_upper);
  j["worst_jac_lower"] = serialize_detail::num(r.worst_jac_lower);
  j["worst_jac_upper"] = serialize_detail::num(r.worst_jac_upper);
  j["consistency_error"] = serialize_detail::num(r.consistency_error);
  j["violations"] = r.violations;
  j["ok"] = r.ok;
  return j;
}

inline Json to_json(const MoebiusOrderResult& r) {
  Json j;
  j["value"] = serialize_detail::num(r.value);
  j["search_value"] = serialize_detail::num(r.search_value);
  j["argmax"] = r.argmax;
  return j;
}

inline Json to_json(const OrderReport& r) {
  Json j;
  j["n"] = r.n;
  j["alpha"] = serialize_detail::num(r.alpha);
  j["r"] = serialize_detail::num(r.r);
  j["lambda_lower"] = serialize_detail::num(r.lambda_lower);
  j["lower_bound_only"] = r.lower_bound_only;
  j["C_r"] = serialize_detail::num(r.C_r);
  Json growth = Json::array();
  for (const auto& [al, bound] : r.growth_bound_at)
    growth.push_back(Json::array({al, serialize_detail::num(bound)}));
  j["growth_bound_at"] = std::move(growth);
  j["evaluations"] = r.evaluations;
  if (r.witness) j["witness"] = map_to_json(*r.witness);
  return j;
}

inline Json to_json(const DilationReport& r) {
  Json j;
  j["r"] = serialize_detail::num(r.r);
  j["s"] = serialize_detail::num(r.s);
  j["factor"] = serialize_detail::num(r.factor);
  j["norm_f"] = serialize_detail::num(r.norm_f);
  j["norm_g"] = serialize_detail::num(r.norm_g);
  j["ratio"] = serialize_detail::num(r.ratio);
  j["grad_f"] = serialize_detail::num(r.grad_f);
  j["grad_g"] = serialize_detail::num(r.grad_g);
  j["contraction_ok"] = r.contraction_ok;
  j["grad_ok"] = r.grad_ok;
  j["ok"] = r.ok;
  return j;
}

inline Json to_json(const CoveringEstimate& r) {
  Json j;
  j["center"] = point_to_json(r.center);
  j["radius_lower"] = serialize_detail::num(r.radius_lower);
  j["boundary_samples"] = r.boundary_samples;
  j["skipped"] = r.skipped;
  j["s0_proxy"] = serialize_detail::num(r.s0_proxy);
  j["half_radius_min"] = serialize_detail::num(r.half_radius_min);
  j["half_radius_ok"] = r.half_radius_ok;
  return j;
}

inline Json to_json(const GradJacobianReport& r) {
  Json j;
  j["lhs"] = serialize_detail::num(r.lhs);
  j["rhs"] = serialize_detail::num(r.rhs);
  j["margin"] = serialize_detail::num(r.margin);
  j["eta"] = serialize_detail::num(r.eta);
  j["ok"] = r.ok;
  return j;
}

inline Json to_json(const Violation& v) {
  Json j;
  j["description"] = v.description;
  j["margin"] = serialize_detail::num(v.margin);
  j["detail"] = v.detail;
  return j;
}

inline Json to_json(const SuiteReport& r) {
  Json j;
  j["name"] = r.name;
  j["status"] = r.pass() ? "pass" : "fail";
  j["cases"] = r.cases;
  j["skipped"] = r.skipped;
  j["worst_margin"] = serialize_detail::num(r.worst_margin);
  Json v = Json::array();
  for (const Violation& viol : r.violations) v.push_back(to_json(viol));
  j["violations"] = std::move(v);
  return j;
}

inline Json to_json(const SuiteRun& r) {
  Json j;
  j["status"] = r.pass ? "pass" : "fail";
  j["total_cases"] = r.total_cases;
  j["total_violations"] = r.total_violations;
  j["worst_margin"] = serialize_detail::num(r.worst_margin);
  Json suites = Json::array();
  for (const SuiteReport& s : r.suites) suites.push_back(to_json(s));
  j["suites"] = std::move(suites);
  return j;
}

}  // namespace polyschwarz
