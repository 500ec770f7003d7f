#include "precaution/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "precaution/errors.hpp"

namespace precaution::io {

namespace {

std::string child(const std::string& pointer, const std::string& key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~') {
      escaped += "~0";
    } else if (c == '/') {
      escaped += "~1";
    } else {
      escaped += c;
    }
  }
  return pointer + "/" + escaped;
}

std::string child(const std::string& pointer, std::size_t index) {
  return pointer + "/" + std::to_string(index);
}

const json& require(const json& j, const std::string& key, const std::string& pointer) {
  if (!j.is_object()) throw ConfigError(pointer.empty() ? "/" : pointer, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(child(pointer, key), "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& pointer) {
  if (!j.is_number()) throw ConfigError(pointer, "expected a number");
  return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& pointer) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(pointer, "expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::vector<double> as_vector(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw ConfigError(pointer, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_number(j[k], child(pointer, k)));
  return out;
}

std::vector<std::vector<double>> as_matrix(const json& j, const std::string& pointer) {
  if (!j.is_array()) throw ConfigError(pointer, "expected an array of rows");
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_vector(j[k], child(pointer, k)));
  return out;
}

// Library validation errors carry no location; attach the node's pointer.
template <class F>
auto located(const std::string& pointer, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(pointer.empty() ? "/" : pointer, e.what());
  }
}

const char* shape_name(zoo::FunctionKind kind) {
  switch (kind) {
    case zoo::FunctionKind::Power:
      return "theta";
    case zoo::FunctionKind::Crra:
      return "gamma";
    case zoo::FunctionKind::Exp:
      return "eta";
    case zoo::FunctionKind::Quadratic:
      return "c";
    case zoo::FunctionKind::Log:
      return nullptr;
  }
  return nullptr;
}

json witness_json(const geometry::ProbeWitness& w) {
  return {{"rho1", w.rho1}, {"rho2", w.rho2}, {"t", w.t}, {"defect", w.defect}};
}

}  // namespace

prob::JointSignalModel joint_from_json(const json& j, const std::string& pointer) {
  auto states = as_vector(require(j, "states", pointer), child(pointer, "states"));
  auto joint = as_matrix(require(j, "joint", pointer), child(pointer, "joint"));
  prob::StateSpace space = located(child(pointer, "states"), [&] {
    return prob::StateSpace(std::move(states));
  });
  return located(child(pointer, "joint"), [&] { return prob::JointSignalModel(joint, space); });
}

json to_json(const prob::JointSignalModel& sig) {
  return {{"states", std::vector<double>(sig.states().values().begin(), sig.states().values().end())},
          {"joint", sig.joint()}};
}

geometry::PayoffSet payoff_set_from_json(const json& j, const std::string& pointer) {
  auto vectors = as_matrix(require(j, "vectors", pointer), child(pointer, "vectors"));
  if (j.contains("m")) {
    const auto m = as_count(j["m"], child(pointer, "m"));
    return located(pointer, [&] { return geometry::PayoffSet(m, std::move(vectors)); });
  }
  return located(pointer, [&] { return geometry::PayoffSet(std::move(vectors)); });
}

json to_json(const geometry::PayoffSet& set) {
  return {{"m", set.dim()}, {"vectors", set.vectors()}};
}

zoo::CatalogFunction function_from_json(const json& j, const std::string& pointer) {
  const auto& kind_node = require(j, "kind", pointer);
  if (!kind_node.is_string()) throw ConfigError(child(pointer, "kind"), "expected a string");
  zoo::CatalogFunction f;
  f.kind = located(child(pointer, "kind"),
                   [&] { return zoo::function_kind_from_string(kind_node.get<std::string>()); });
  if (const char* name = shape_name(f.kind)) {
    f.param = as_number(require(j, name, pointer), child(pointer, name));
  }
  if (j.contains("scale")) f.scale = as_number(j["scale"], child(pointer, "scale"));
  if (j.contains("state_coef")) {
    f.state_coef = as_number(j["state_coef"], child(pointer, "state_coef"));
  }
  for (const auto& [key, value] : j.items()) {
    const char* name = shape_name(f.kind);
    if (key != "kind" && key != "scale" && key != "state_coef" && (!name || key != name)) {
      throw ConfigError(child(pointer, key), "unknown field for kind '" +
                                                 std::string(zoo::to_string(f.kind)) + "'");
    }
  }
  return f;
}

json to_json(const zoo::CatalogFunction& f) {
  json j{{"kind", std::string(zoo::to_string(f.kind))}, {"scale", f.scale},
         {"state_coef", f.state_coef}};
  if (const char* name = shape_name(f.kind)) j[name] = f.param;
  return j;
}

zoo::FamilySpec family_from_json(const json& j, const std::string& pointer) {
  zoo::FamilySpec spec;
  const auto& fam = require(j, "family", pointer);
  if (!fam.is_string()) throw ConfigError(child(pointer, "family"), "expected a string");
  spec.family =
      located(child(pointer, "family"), [&] { return zoo::family_from_string(fam.get<std::string>()); });
  if (j.contains("params")) {
    const auto p = child(pointer, "params");
    if (!j["params"].is_object()) throw ConfigError(p, "expected an object");
    for (const auto& [key, value] : j["params"].items()) {
      spec.params[key] = as_number(value, child(p, key));
    }
  }
  if (j.contains("functions")) {
    const auto p = child(pointer, "functions");
    if (!j["functions"].is_object()) throw ConfigError(p, "expected an object");
    for (const auto& [key, value] : j["functions"].items()) {
      spec.functions[key] = function_from_json(value, child(p, key));
    }
  }
  if (j.contains("terms")) {
    const auto p = child(pointer, "terms");
    if (!j["terms"].is_array()) throw ConfigError(p, "expected an array");
    for (std::size_t k = 0; k < j["terms"].size(); ++k) {
      const auto& t = j["terms"][k];
      const auto tp = child(p, k);
      spec.terms.push_back({as_vector(require(t, "g", tp), child(tp, "g")),
                            as_vector(require(t, "h", tp), child(tp, "h")),
                            as_number(require(t, "q", tp), child(tp, "q"))});
    }
  }
  return spec;
}

json to_json(const zoo::FamilySpec& spec) {
  json j{{"family", std::string(zoo::to_string(spec.family))}, {"params", spec.params}};
  json fns = json::object();
  for (const auto& [role, f] : spec.functions) fns[role] = to_json(f);
  j["functions"] = fns;
  if (!spec.terms.empty()) {
    json terms = json::array();
    for (const auto& t : spec.terms) terms.push_back({{"g", t.g}, {"h", t.h}, {"q", t.q}});
    j["terms"] = terms;
  }
  return j;
}

decision::SolverConfig solver_from_json(const json& j, const std::string& pointer) {
  decision::SolverConfig cfg;
  if (!j.is_object()) throw ConfigError(pointer.empty() ? "/" : pointer, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const auto p = child(pointer, key);
    if (key == "a_grid") {
      cfg.a_grid = as_count(value, p);
    } else if (key == "b_grid") {
      cfg.b_grid = as_count(value, p);
    } else if (key == "refine_iters") {
      cfg.refine_iters = as_count(value, p);
    } else if (key == "value_tol") {
      cfg.value_tol = as_number(value, p);
    } else if (key == "arg_tol") {
      cfg.arg_tol = as_number(value, p);
    } else if (key == "scan_tol") {
      cfg.scan_tol = as_number(value, p);
    } else {
      throw ConfigError(p, "unknown solver field");
    }
  }
  located(pointer, [&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

json to_json(const decision::SolverConfig& cfg) {
  return {{"a_grid", cfg.a_grid},       {"b_grid", cfg.b_grid},   {"refine_iters", cfg.refine_iters},
          {"value_tol", cfg.value_tol}, {"arg_tol", cfg.arg_tol}, {"scan_tol", cfg.scan_tol}};
}

json to_json(const decision::OptResult& r) {
  return {{"maximizers", r.maximizers},
          {"value", r.value},
          {"sup", r.sup()},
          {"inf", r.inf()},
          {"grid_only", r.grid_only}};
}

json to_json(const decision::MonotonicityVerdict& v) {
  json j{{"kind", std::string(decision::to_string(v.kind))},
         {"strict", v.strict},
         {"total_variation", v.total_variation}};
  if (v.increase) j["increase"] = {v.increase->first, v.increase->second};
  if (v.decrease) j["decrease"] = {v.decrease->first, v.decrease->second};
  return j;
}

json to_json(const decision::PrecautionReport& r) {
  return {{"a_star_fine", to_json(r.a_star_fine)},
          {"a_star_coarse", to_json(r.a_star_coarse)},
          {"delta_scan", to_json(r.delta_scan)},
          {"ranking_holds", r.ranking_holds},
          {"strict_ranking_holds", r.strict_ranking_holds},
          {"ranking_predicted", r.ranking_predicted},
          {"consistent", r.consistent}};
}

json to_json(const geometry::CertificateReport& r) {
  return {{"verdict", r.passed ? "PASS" : "FAIL"},
          {"worst_gap", r.worst_gap},
          {"worst_rho", r.worst_rho},
          {"probes", r.probes},
          {"star_difference", r.star_difference}};
}

json to_json(const geometry::ConvexityVerdict& v) {
  json j{{"kind", std::string(geometry::to_string(v.kind))}, {"probes", v.probes}};
  if (v.kind == geometry::Curvature::Concave || v.kind == geometry::Curvature::Neither) {
    j["against_convex"] = witness_json(v.against_convex);
  }
  if (v.kind == geometry::Curvature::Convex || v.kind == geometry::Curvature::Neither) {
    j["against_concave"] = witness_json(v.against_concave);
  }
  return j;
}

json to_json(const prob::BlackwellReport& r) {
  json j{{"verdict", r.passed ? "PASS" : "FAIL"},
         {"trials", r.trials},
         {"worst_difference", r.worst_difference},
         {"worst_trial", r.worst_trial}};
  if (r.witness) {
    json pieces = json::array();
    for (const auto& p : r.witness->pieces) {
      pieces.push_back({{"intercept", p.intercept}, {"slope", p.slope}});
    }
    j["witness"] = pieces;
  }
  return j;
}

json to_json(const zoo::FocCertificate& c) {
  return {{"verdict", c.passed ? "PASS" : "FAIL"},
          {"M", c.M},
          {"n", c.n},
          {"b0", c.b0},
          {"residual", c.residual},
          {"local_minimum", c.local_minimum},
          {"neighborhood_checked", c.neighborhood_checked},
          {"neighborhood_ok", c.neighborhood_ok},
          {"constants", c.constants}};
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out += ',';
    const auto& f = fields[k];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += "\r\n";
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("/", "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace precaution::io
