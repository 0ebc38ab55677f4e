#pragma once

#include <istream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "nsagree/classical.hpp"
#include "nsagree/reduction.hpp"

namespace nsagree::io {

using nlohmann::json;

namespace detail {
inline std::string setting_key(int x, int y) { return std::to_string(x) + "," + std::to_string(y); }

inline Rational entry_value(const json& v, const std::string& where) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  throw ParseError(where + ": expected a rational string or number, got " + std::string(v.type_name()));
}

inline int cardinality(const json& j, const char* key) {
  if (!j.contains(key)) throw StructuralError(std::string("missing field \"") + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw StructuralError(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

inline json rational_json(const Conditional& c) { return c.defined ? json(to_string(c.value)) : json(nullptr); }

inline json set_json(const OutputSet& s) { return members(s); }
}  // namespace detail

/// Parses JSON text, turning syntax errors into ParseError with the
/// parser's line and column.
inline json parse_json(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
}

inline Box box_from_json(const json& j) {
  if (!j.is_object()) throw StructuralError("box must be a JSON object");
  const Shape shape{detail::cardinality(j, "nA"), detail::cardinality(j, "nB"), detail::cardinality(j, "nX"),
                    detail::cardinality(j, "nY")};
  Box box(shape);
  if (!j.contains("p") || !j.at("p").is_object()) throw StructuralError("missing object field \"p\"");
  const json& p = j.at("p");
  for (int x = 0; x < shape.nX; ++x)
    for (int y = 0; y < shape.nY; ++y) {
      const std::string key = detail::setting_key(x, y);
      if (!p.contains(key)) throw StructuralError("missing entries for setting \"" + key + "\"");
      const json& rows = p.at(key);
      if (!rows.is_array() || static_cast<int>(rows.size()) != shape.nA)
        throw StructuralError("setting \"" + key + "\" needs " + std::to_string(shape.nA) + " rows");
      for (int a = 0; a < shape.nA; ++a) {
        const json& row = rows.at(static_cast<std::size_t>(a));
        if (!row.is_array() || static_cast<int>(row.size()) != shape.nB)
          throw StructuralError("setting \"" + key + "\" row " + std::to_string(a) + " needs " +
                                std::to_string(shape.nB) + " entries");
        for (int b = 0; b < shape.nB; ++b)
          box.set(a, b, x, y,
                  detail::entry_value(row.at(static_cast<std::size_t>(b)),
                                      "p(" + std::to_string(a) + std::to_string(b) + "|" + key + ")"));
      }
    }
  for (const auto& [key, value] : p.items()) {
    int x = -1, y = -1;
    char comma = 0;
    std::istringstream ks(key);
    if (!(ks >> x >> comma >> y) || comma != ',' || x < 0 || x >= shape.nX || y < 0 || y >= shape.nY)
      throw StructuralError("unexpected setting key \"" + key + "\" for shape " + to_string(shape));
  }
  return box;
}

inline json to_json(const Box& box) {
  const Shape& s = box.shape();
  json p = json::object();
  for (int x = 0; x < s.nX; ++x)
    for (int y = 0; y < s.nY; ++y) {
      json rows = json::array();
      for (int a = 0; a < s.nA; ++a) {
        json row = json::array();
        for (int b = 0; b < s.nB; ++b) row.push_back(to_string(box(a, b, x, y)));
        rows.push_back(std::move(row));
      }
      p[detail::setting_key(x, y)] = std::move(rows);
    }
  return {{"nA", s.nA}, {"nB", s.nB}, {"nX", s.nX}, {"nY", s.nY}, {"p", std::move(p)}};
}

inline json to_json(const ValidationResult& r) {
  json v = json::array();
  for (const Violation& viol : r.violations) v.push_back({{"kind", to_string(viol.kind)}, {"message", viol.message}});
  return {{"valid", r.ok()}, {"violations", std::move(v)}};
}

inline json to_json(const DisagreementReport& r) {
  return {{"qA", detail::rational_json(r.hierarchy.qA)},
          {"qB", detail::rational_json(r.hierarchy.qB)},
          {"ccd", r.ccd},
          {"sd", r.sd},
          {"depth", r.hierarchy.depth},
          {"alphaN", detail::set_json(r.hierarchy.alpha_final())},
          {"betaN", detail::set_json(r.hierarchy.beta_final())},
          {"reason", r.reason.empty() ? json(nullptr) : json(r.reason)}};
}

inline json to_json(const DeterministicStrategy& s) { return {{"alice", s.alice}, {"bob", s.bob}}; }

inline json to_json(const BellFunctional& f) {
  json coeffs = json::array();
  const Box probe(f.shape);
  for (int x = 0; x < f.shape.nX; ++x)
    for (int y = 0; y < f.shape.nY; ++y)
      for (int a = 0; a < f.shape.nA; ++a)
        for (int b = 0; b < f.shape.nB; ++b) {
          const Rational& c = f.coefficients[probe.index(a, b, x, y)];
          if (c != 0) coeffs.push_back({{"a", a}, {"b", b}, {"x", x}, {"y", y}, {"coefficient", to_string(c)}});
        }
  return {{"kind", f.kind},
          {"coefficients", std::move(coeffs)},
          {"local_bound", to_string(f.local_bound)},
          {"box_value", to_string(f.box_value)}};
}

inline json to_json(const LocalityVerdict& v) {
  json out{{"local", v.local}};
  if (v.local) {
    json dec = json::array();
    for (const auto& [strategy, weight] : v.decomposition)
      dec.push_back({{"strategy", to_json(strategy)}, {"weight", to_string(weight)}});
    out["decomposition"] = std::move(dec);
  } else if (v.certificate) {
    out["certificate"] = to_json(*v.certificate);
  }
  return out;
}

inline json to_json(const TableForm& f) {
  return {{"kind", to_string(f.kind)},
          {"params",
           {{"r", to_string(f.params.r)}, {"s", to_string(f.params.s)}, {"t", to_string(f.params.t)},
            {"u", to_string(f.params.u)}}},
          {"constraints_ok", f.constraints_ok},
          {"failures", f.failures}};
}

inline json to_json(const Relabeling& r) {
  return {{"alice_inputs", r.alice_inputs},
          {"bob_inputs", r.bob_inputs},
          {"alice_outputs", r.alice_outputs},
          {"bob_outputs", r.bob_outputs},
          {"swap_parties", r.swap_parties}};
}

inline json to_json(const ClassificationVerdict& v) {
  json out{{"conclusion", to_string(v.conclusion)},
           {"local", v.locality_decided ? json(v.local) : json(nullptr)},
           {"hardy", v.hardy},
           {"ccd_form", v.ccd_form ? to_json(*v.ccd_form) : json(nullptr)},
           {"sd_form", v.sd_form ? to_json(*v.sd_form) : json(nullptr)},
           {"tsirelson_gap", v.tsirelson_gap ? json(to_string(*v.tsirelson_gap)) : json(nullptr)},
           {"relabeling", v.relabeling ? to_json(*v.relabeling) : json(nullptr)}};
  if (v.locality_decided && (v.locality.local || v.locality.certificate)) out["locality"] = to_json(v.locality);
  return out;
}

inline json to_json(const ReductionPlan& p) {
  return {{"mode", to_string(p.mode)},
          {"kept_inputs", {0, 1}},
          {"alice_group", detail::set_json(p.alice_group)},
          {"bob_group", detail::set_json(p.bob_group)}};
}

inline json to_json(const ReductionResult& r) {
  return {{"box", to_json(r.box)}, {"plan", to_json(r.plan)}, {"source_report", to_json(r.source_report)}};
}

inline json to_json(const GeneralVerdict& g) {
  json out = to_json(g.verdict);
  out["reduction"] = g.reduction ? to_json(*g.reduction) : json(nullptr);
  return out;
}

inline json to_json(const OntologicalModel& m) {
  json P = json::array();
  for (const Rational& w : m.measure) P.push_back(to_string(w));
  auto parts = [](const std::vector<LabeledPartition>& ps) {
    json out = json::object();
    for (std::size_t x = 0; x < ps.size(); ++x) out[std::to_string(x)] = ps[x].cells;
    return out;
  };
  return {{"omega", m.omega_count},
          {"P", std::move(P)},
          {"signed", m.is_signed()},
          {"partsA", parts(m.parts_alice)},
          {"partsB", parts(m.parts_bob)}};
}

inline OntologicalModel model_from_json(const json& j) {
  if (!j.is_object()) throw StructuralError("model must be a JSON object");
  for (const char* key : {"omega", "P", "partsA", "partsB"})
    if (!j.contains(key)) throw StructuralError(std::string("missing field \"") + key + "\"");
  OntologicalModel m;
  m.omega_count = j.at("omega").get<std::size_t>();
  for (std::size_t i = 0; i < j.at("P").size(); ++i)
    m.measure.push_back(detail::entry_value(j.at("P").at(i), "P[" + std::to_string(i) + "]"));
  auto parts = [](const json& obj, const char* who) {
    std::vector<LabeledPartition> out(obj.size());
    for (std::size_t x = 0; x < obj.size(); ++x) {
      const std::string key = std::to_string(x);
      if (!obj.contains(key)) throw StructuralError(std::string(who) + " partition for input " + key + " missing");
      out[x].cells = obj.at(key).get<std::vector<std::vector<int>>>();
    }
    return out;
  };
  m.parts_alice = parts(j.at("partsA"), "partsA");
  m.parts_bob = parts(j.at("partsB"), "partsB");
  check_model(m);
  return m;
}

inline json to_json(const AgreementCheckReport& r) {
  return {{"models", r.models},
          {"instances", r.instances},
          {"common_certainty", r.common_certainty},
          {"disagreeing", r.disagreeing},
          {"violations", r.violations},
          {"violation_examples", r.violation_examples},
          {"complete", r.complete}};
}

}  // namespace nsagree::io
