#include "precaution/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <set>
#include <sstream>

#include "precaution/errors.hpp"
#include "precaution/random.hpp"
#include "precaution/serialize.hpp"
#include "precaution/support_geometry.hpp"

#ifndef PRECAUTION_VERSION
#define PRECAUTION_VERSION "0.0.0"
#endif

namespace precaution::experiments {

namespace {

const std::set<std::string> kRandomized = {"certify", "probe", "blackwell"};

template <class F>
auto located(const std::string& pointer, F&& build) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(pointer, e.what());
  }
}

prob::JointSignalModel parse_signal(const json& node, const std::filesystem::path& base_dir) {
  if (!node.is_object()) throw ConfigError("/signal", "expected an object");
  if (node.contains("file")) {
    if (!node["file"].is_string()) throw ConfigError("/signal/file", "expected a path string");
    auto path = std::filesystem::path(node["file"].get<std::string>());
    if (path.is_relative()) path = base_dir / path;
    return io::joint_from_json(io::read_json_file(path), "/signal/file");
  }
  if (node.contains("kind")) {
    if (node["kind"] != "full_info") throw ConfigError("/signal/kind", "only 'full_info' is known");
    if (!node.contains("states") || !node.contains("prior")) {
      throw ConfigError("/signal", "full_info needs 'states' and 'prior'");
    }
    return located("/signal", [&] {
      return prob::full_info(prob::Dist(node["prior"].get<std::vector<double>>()),
                             prob::StateSpace(node["states"].get<std::vector<double>>()));
    });
  }
  return io::joint_from_json(node, "/signal");
}

std::vector<std::pair<double, double>> pairs_option(const json& opts, const decision::Interval& I,
                                                    const std::string& pointer,
                                                    std::vector<std::pair<double, double>> fallback) {
  if (!opts.contains("pairs")) return fallback;
  const auto& p = opts["pairs"];
  std::vector<std::pair<double, double>> out;
  if (!p.is_array()) throw ConfigError(pointer + "/pairs", "expected an array of [a, a'] pairs");
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto ptr = pointer + "/pairs/" + std::to_string(k);
    if (!p[k].is_array() || p[k].size() != 2 || !p[k][0].is_number() || !p[k][1].is_number()) {
      throw ConfigError(ptr, "expected [a, a']");
    }
    const double a = p[k][0].get<double>();
    const double b = p[k][1].get<double>();
    if (!I.contains(a) || !I.contains(b)) throw ConfigError(ptr, "first decisions must lie in I");
    out.emplace_back(a, b);
  }
  return out;
}

std::size_t count_option(const json& opts, const char* key, std::size_t fallback) {
  if (!opts.contains(key)) return fallback;
  return opts[key].get<std::size_t>();
}

std::uint64_t analysis_seed(const ExperimentConfig& cfg, const std::string& name) {
  return derive_seed(cfg.seed.value_or(0), name);
}

json run_optimize(const ExperimentConfig& cfg, const decision::DecisionModel& model) {
  const auto coarse = cfg.coarse_signal();
  return {{"fine", io::to_json(decision::optimize_first(model, cfg.signal, cfg.solver))},
          {"coarse", io::to_json(decision::optimize_first(model, coarse, cfg.solver))}};
}

json run_compare(const ExperimentConfig& cfg, const decision::DecisionModel& model) {
  return io::to_json(
      decision::precautionary_compare(model, cfg.signal, cfg.coarse_signal(), cfg.solver));
}

json run_certify(const ExperimentConfig& cfg, const decision::DecisionModel& model,
                 const json& opts) {
  const auto& I = model.first_interval;
  const auto pairs = pairs_option(opts, I, "/options/certify", {{I.hi, I.lo}, {I.lo, I.hi}});
  const std::size_t samples = count_option(opts, "samples", 1000);
  const auto seed = analysis_seed(cfg, "certify");
  json out = json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a_outer, a_inner] = pairs[k];
    json entry{{"a_outer", a_outer}, {"a_inner", a_inner}};
    const auto outer = decision::payoff_set(model, a_outer, cfg.solver);
    const auto inner = decision::payoff_set(model, a_inner, cfg.solver);
    try {
      entry["certificate"] =
          io::to_json(geometry::decomposition_certificate(outer, inner, samples, derive_seed(seed, k)));
    } catch (const EmptyStarDifference& e) {
      entry["certificate"] = {{"verdict", "EmptyStarDifference"}, {"detail", e.what()}};
    }
    out.push_back(entry);
  }
  return {{"pairs", out}};
}

json run_probe(const ExperimentConfig& cfg, const decision::DecisionModel& model,
               const json& opts) {
  const auto& I = model.first_interval;
  const std::size_t trials = count_option(opts, "trials", 1000);
  const std::size_t m = cfg.signal.state_count();
  const auto seed = analysis_seed(cfg, "probe");
  std::vector<double> singles{I.lo, I.hi};
  if (opts.contains("a")) singles = opts["a"].get<std::vector<double>>();
  const auto pairs = pairs_option(opts, I, "/options/probe", {{I.hi, I.lo}});

  json out{{"J", json::array()}, {"differences", json::array()}};
  std::uint64_t k = 0;
  for (double a : singles) {
    auto f = [&](const prob::Dist& rho) { return decision::epstein_J(model, a, rho, cfg.solver); };
    out["J"].push_back(
        {{"a", a}, {"verdict", io::to_json(geometry::convexity_probe(f, m, trials, derive_seed(seed, k++)))}});
  }
  for (const auto& [a1, a0] : pairs) {
    auto f = [&](const prob::Dist& rho) {
      return decision::epstein_J(model, a1, rho, cfg.solver) -
             decision::epstein_J(model, a0, rho, cfg.solver);
    };
    out["differences"].push_back({{"a1", a1},
                                  {"a0", a0},
                                  {"verdict", io::to_json(geometry::convexity_probe(
                                                  f, m, trials, derive_seed(seed, k++)))}});
  }
  return out;
}

json run_blackwell(const ExperimentConfig& cfg, const json& opts) {
  const std::size_t trials = count_option(opts, "trials", 1000);
  const std::size_t pieces = count_option(opts, "pieces", 4);
  return io::to_json(prob::blackwell_sample_test(cfg.signal, cfg.coarse_signal(), trials, pieces,
                                                 analysis_seed(cfg, "blackwell")));
}

json run_foc(const ExperimentConfig& cfg, const decision::DecisionModel& model, const json& opts) {
  const auto& I = model.first_interval;
  const auto pairs = pairs_option(opts, I, "/options/foc", {{I.hi, I.lo}});
  std::vector<double> x_grid(cfg.signal.states().values().begin(),
                             cfg.signal.states().values().end());
  if (opts.contains("x_grid")) x_grid = opts["x_grid"].get<std::vector<double>>();

  json entries = json::array();
  bool all_passed = true;
  double max_residual = 0.0;
  for (const auto& [a1, a0] : pairs) {
    std::vector<std::vector<double>> b1s;
    if (opts.contains("b1")) {
      for (const auto& b : opts["b1"]) {
        b1s.push_back(b.is_array() ? b.get<std::vector<double>>() : std::vector<double>{b.get<double>()});
      }
    } else {
      const auto box = std::get<decision::BoxChoices>(model.second_feasible(a1));
      for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        std::vector<double> b(box.lo.size());
        for (std::size_t c = 0; c < b.size(); ++c) b[c] = box.lo[c] + t * (box.hi[c] - box.lo[c]);
        b1s.push_back(b);
      }
    }
    for (const auto& b1 : b1s) {
      json entry{{"a1", a1}, {"a0", a0}, {"b1", b1}};
      try {
        const auto cert = zoo::foc_certificate(cfg.model, a1, a0, b1, x_grid, cfg.solver.arg_tol);
        entry["certificate"] = io::to_json(cert);
        all_passed = all_passed && cert.passed;
        max_residual = std::max(max_residual, cert.residual);
      } catch (const NoCertificate& e) {
        entry["certificate"] = {{"verdict", "NoCertificate"}, {"detail", e.what()}};
        all_passed = false;
      }
      entries.push_back(entry);
    }
  }
  return {{"entries", entries}, {"all_passed", all_passed}, {"max_residual", max_residual}};
}

std::string summarize(const AnalysisOutcome& o) {
  if (!o.ok) return o.name + ": ERROR " + o.error;
  const auto& r = o.report;
  if (o.name == "optimize") {
    return "optimize: sup argmax V_Y = " + io::format_number(r["fine"]["sup"].get<double>()) +
           ", sup argmax V_Y2 = " + io::format_number(r["coarse"]["sup"].get<double>());
  }
  if (o.name == "compare") {
    return std::string("compare: delta ") + r["delta_scan"]["kind"].get<std::string>() +
           ", ranking_holds=" + (r["ranking_holds"].get<bool>() ? "true" : "false") +
           ", consistent=" + (r["consistent"].get<bool>() ? "true" : "false");
  }
  if (o.name == "certify") {
    std::string s = "certify:";
    for (const auto& p : r["pairs"]) {
      s += " [" + io::format_number(p["a_outer"].get<double>()) + " vs " +
           io::format_number(p["a_inner"].get<double>()) + "] " +
           p["certificate"]["verdict"].get<std::string>();
    }
    return s;
  }
  if (o.name == "probe") {
    std::string s = "probe:";
    for (const auto& p : r["J"]) s += " J " + p["verdict"]["kind"].get<std::string>();
    for (const auto& p : r["differences"]) s += " dJ " + p["verdict"]["kind"].get<std::string>();
    return s;
  }
  if (o.name == "blackwell") return "blackwell: " + r["verdict"].get<std::string>();
  return "foc: all_passed=" + std::string(r["all_passed"].get<bool>() ? "true" : "false") +
         ", max_residual=" + io::format_number(r["max_residual"].get<double>());
}

const json* find_number(const json& doc, const std::string& parameter, json** mutable_out,
                        json& mutable_doc) {
  std::vector<std::string> parts;
  std::stringstream ss(parameter);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  const json* node = doc.contains("model") ? &doc["model"] : nullptr;
  json* mnode = mutable_doc.contains("model") ? &mutable_doc["model"] : nullptr;
  for (const auto& p : parts) {
    if (!node || !node->is_object() || !node->contains(p)) return nullptr;
    node = &(*node)[p];
    mnode = &(*mnode)[p];
  }
  if (!node || !node->is_number()) return nullptr;
  *mutable_out = mnode;
  return node;
}

}  // namespace

prob::JointSignalModel ExperimentConfig::coarse_signal() const {
  return garbling ? prob::garble(signal, *garbling) : prob::no_info(signal);
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("/", "expected an object");
  static const std::set<std::string> known = {"model",    "signal", "garbling", "solver", "analyses",
                                              "seed",     "output", "options"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError("/" + key, "unknown field");
  }
  if (!doc.contains("model")) throw ConfigError("/model", "missing required field");
  if (!doc.contains("signal")) throw ConfigError("/signal", "missing required field");

  ExperimentConfig cfg{.model = io::family_from_json(doc["model"], "/model"),
                       .signal = parse_signal(doc["signal"], base_dir)};
  if (doc.contains("garbling")) {
    const auto& g = doc["garbling"];
    if (!g.is_array()) throw ConfigError("/garbling", "expected one-based signal indices");
    std::vector<std::size_t> map;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!g[k].is_number_integer() || g[k].get<long long>() < 1) {
        throw ConfigError("/garbling/" + std::to_string(k), "expected a positive integer");
      }
      map.push_back(g[k].get<std::size_t>());
    }
    cfg.garbling = located("/garbling", [&] { return prob::Garbling::from_one_based(map); });
    if (cfg.garbling->fine_count() != cfg.signal.signal_count()) {
      throw ConfigError("/garbling", "needs one entry per signal row (" +
                                         std::to_string(cfg.signal.signal_count()) + ")");
    }
  }
  if (doc.contains("solver")) cfg.solver = io::solver_from_json(doc["solver"], "/solver");

  if (!doc.contains("analyses") || !doc["analyses"].is_array()) {
    throw ConfigError("/analyses", "expected an array of analysis names");
  }
  for (std::size_t k = 0; k < doc["analyses"].size(); ++k) {
    const auto& a = doc["analyses"][k];
    const auto ptr = "/analyses/" + std::to_string(k);
    if (!a.is_string()) throw ConfigError(ptr, "expected a string");
    const auto name = a.get<std::string>();
    if (std::find(kAnalyses.begin(), kAnalyses.end(), name) == kAnalyses.end()) {
      throw ConfigError(ptr, "unknown analysis '" + name + "'");
    }
    cfg.analyses.push_back(name);
  }
  if (doc.contains("seed")) {
    const auto& seed = doc["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) throw ConfigError("/seed", "expected a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  for (const auto& name : cfg.analyses) {
    if (kRandomized.count(name) && !cfg.seed) {
      throw ConfigError("/seed", "analysis '" + name + "' needs a seed");
    }
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("/output", "expected a path string");
    cfg.output = doc["output"].get<std::string>();
  }
  if (doc.contains("options")) {
    if (!doc["options"].is_object()) throw ConfigError("/options", "expected an object");
    for (const auto& [key, value] : doc["options"].items()) {
      if (std::find(kAnalyses.begin(), kAnalyses.end(), key) == kAnalyses.end()) {
        throw ConfigError("/options/" + key, "not an analysis name");
      }
      if (!value.is_object()) throw ConfigError("/options/" + key, "expected an object");
    }
    cfg.options = doc["options"];
  }
  // DomainViolation propagates unchanged so sweeps can report it per row.
  zoo::validate(cfg.model, cfg.signal.states());
  cfg.source = doc;
  cfg.source["signal"] = io::to_json(cfg.signal);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(io::read_json_file(path), path.parent_path());
}

bool ReportBundle::any_error() const {
  return std::any_of(analyses.begin(), analyses.end(), [](const auto& a) { return !a.ok; });
}

json run_analysis(const ExperimentConfig& cfg, const std::string& name) {
  const json opts = cfg.options.contains(name) ? cfg.options[name] : json::object();
  if (name == "blackwell") return run_blackwell(cfg, opts);
  const auto model = zoo::build_model(cfg.model, cfg.signal.states());
  if (name == "optimize") return run_optimize(cfg, model);
  if (name == "compare") return run_compare(cfg, model);
  if (name == "certify") return run_certify(cfg, model, opts);
  if (name == "probe") return run_probe(cfg, model, opts);
  if (name == "foc") return run_foc(cfg, model, opts);
  throw ValidationError("unknown analysis '" + name + "'");
}

ReportBundle run(const ExperimentConfig& cfg) {
  ReportBundle bundle;
  std::vector<std::future<AnalysisOutcome>> jobs;
  for (const auto& name : cfg.analyses) {
    jobs.push_back(std::async(std::launch::async, [&cfg, name] {
      AnalysisOutcome o{.name = name};
      try {
        o.report = run_analysis(cfg, name);
        o.ok = true;
      } catch (const std::exception& e) {
        o.error = describe_error(e);
      }
      return o;
    }));
  }

  std::string table = io::csv_row({"a", "V_Y", "V_Y2", "delta"});
  try {
    const auto model = zoo::build_model(cfg.model, cfg.signal.states());
    const auto fine = decision::value_profile(model, cfg.signal, cfg.solver);
    const auto coarse = decision::value_profile(model, cfg.coarse_signal(), cfg.solver);
    for (std::size_t k = 0; k < fine.a.size(); ++k) {
      table += io::csv_row({io::format_number(fine.a[k]), io::format_number(fine.values[k]),
                            io::format_number(coarse.values[k]),
                            io::format_number(fine.values[k] - coarse.values[k])});
    }
  } catch (const std::exception& e) {
    bundle.analyses.push_back({.name = "table", .ok = false, .report = {}, .error = describe_error(e)});
  }
  bundle.table_csv = table;

  for (auto& job : jobs) bundle.analyses.push_back(job.get());
  // The table failure (if any) goes last so analyses stay in declared order.
  std::stable_partition(bundle.analyses.begin(), bundle.analyses.end(),
                        [](const auto& a) { return a.name != "table"; });

  for (const auto& o : bundle.analyses) bundle.summary += summarize(o) + "\n";

  json status = json::array();
  for (const auto& o : bundle.analyses) {
    status.push_back({{"name", o.name}, {"ok", o.ok}});
  }
  bundle.manifest = {{"tool", "precaution"},
                     {"version", PRECAUTION_VERSION},
                     {"config_hash", config_hash(cfg.source)},
                     {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                     {"analyses", status}};
  return bundle;
}

void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir) {
  json files = json::array();
  for (const auto& o : bundle.analyses) {
    const json doc = o.ok ? json{{"analysis", o.name}, {"ok", true}, {"report", o.report}}
                          : json{{"analysis", o.name}, {"ok", false}, {"error", o.error}};
    io::write_atomic(dir / (o.name + ".json"), doc.dump(2) + "\n");
    files.push_back(o.name + ".json");
  }
  io::write_atomic(dir / "table.csv", bundle.table_csv);
  io::write_atomic(dir / "summary.txt", bundle.summary);
  files.push_back("table.csv");
  files.push_back("summary.txt");
  auto manifest = bundle.manifest;
  manifest["files"] = files;
  io::write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string SweepResult::csv() const {
  std::string out = io::csv_row({parameter, "abar_Y", "abar_Y2", "delta_verdict", "ranking_holds", "error"});
  for (const auto& r : rows) {
    out += io::csv_row({io::format_number(r.value),
                        r.abar_fine ? io::format_number(*r.abar_fine) : "",
                        r.abar_coarse ? io::format_number(*r.abar_coarse) : "", r.verdict,
                        r.ranking_holds ? (*r.ranking_holds ? "true" : "false") : "", r.error});
  }
  return out;
}

SweepResult sweep(const json& doc, const std::string& parameter, const std::vector<double>& values,
                  const std::filesystem::path& base_dir) {
  SweepResult result{.parameter = parameter};
  json scratch = doc;
  json* target = nullptr;
  if (!find_number(doc, parameter, &target, scratch)) {
    throw ConfigError("/model/" + parameter, "sweep parameter does not address a number");
  }
  for (double v : values) {
    SweepRow row{.value = v};
    *target = v;
    try {
      json row_doc = scratch;
      row_doc["analyses"] = json::array({"compare"});
      const auto cfg = parse_config(row_doc, base_dir);
      const auto model = zoo::build_model(cfg.model, cfg.signal.states());
      const auto rep =
          decision::precautionary_compare(model, cfg.signal, cfg.coarse_signal(), cfg.solver);
      row.abar_fine = rep.a_star_fine.sup();
      row.abar_coarse = rep.a_star_coarse.sup();
      row.verdict = std::string(decision::to_string(rep.delta_scan.kind));
      row.ranking_holds = rep.ranking_holds;
    } catch (const std::exception& e) {
      row.error = describe_error(e);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string describe_error(const std::exception& e) {
  const char* kind = "Error";
  if (dynamic_cast<const ConfigError*>(&e)) {
    kind = "ConfigError";
  } else if (dynamic_cast<const DomainViolation*>(&e)) {
    kind = "DomainViolation";
  } else if (dynamic_cast<const NoCertificate*>(&e)) {
    kind = "NoCertificate";
  } else if (dynamic_cast<const EmptyStarDifference*>(&e)) {
    kind = "EmptyStarDifference";
  } else if (dynamic_cast<const PriorMismatch*>(&e)) {
    kind = "PriorMismatch";
  } else if (dynamic_cast<const StateMismatch*>(&e)) {
    kind = "StateMismatch";
  } else if (dynamic_cast<const ZeroMarginal*>(&e)) {
    kind = "ZeroMarginal";
  } else if (dynamic_cast<const DimensionMismatch*>(&e)) {
    kind = "DimensionMismatch";
  } else if (dynamic_cast<const InfeasibleFirstDecision*>(&e)) {
    kind = "InfeasibleFirstDecision";
  } else if (dynamic_cast<const ValidationError*>(&e)) {
    kind = "ValidationError";
  } else if (dynamic_cast<const IoError*>(&e)) {
    kind = "IoError";
  } else if (!dynamic_cast<const Error*>(&e)) {
    kind = "InternalError";
  }
  return std::string(kind) + ": " + e.what();
}

std::string config_hash(const json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(doc.dump())));
  return buf;
}

}  // namespace precaution::experiments
