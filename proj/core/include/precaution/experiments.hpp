#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "precaution/decision.hpp"
#include "precaution/model_zoo.hpp"
#include "precaution/prob.hpp"

// Batch runner: one JSON config in, a directory of reports out.
//
// Config layout:
//   {
//     "model":    FamilySpec (see io::family_from_json),
//     "signal":   {"states": [...], "joint": [[...]]} | {"file": "signal.json"}
//                 | {"kind": "full_info", "states": [...], "prior": [...]},
//     "garbling": [1, 1, 2]            one-based; omitted means compare to no information,
//     "solver":   {"a_grid": 101, ...},
//     "analyses": ["optimize", "compare", "certify", "probe", "blackwell", "foc"],
//     "seed":     42,
//     "output":   "out/run",
//     "options":  {"certify": {...}, "probe": {...}, "blackwell": {...}, "foc": {...}}
//   }

namespace precaution::experiments {

using json = nlohmann::json;

inline const std::vector<std::string> kAnalyses = {"optimize", "compare", "certify",
                                                   "probe",    "blackwell", "foc"};

struct ExperimentConfig {
  zoo::FamilySpec model;
  prob::JointSignalModel signal;
  /// Y' = garble(Y); absent means Y' carries no information.
  std::optional<prob::Garbling> garbling;
  decision::SolverConfig solver;
  std::vector<std::string> analyses;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output;
  json options = json::object();
  /// The normalized document the config was built from (hashed into the manifest).
  json source;

  prob::JointSignalModel coarse_signal() const;
};

/// Throws ConfigError with the JSON pointer of the first problem.
/// Relative signal files resolve against `base_dir`.
ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct AnalysisOutcome {
  std::string name;
  bool ok = false;
  json report;
  /// Exception class and message when !ok.
  std::string error;
};

struct ReportBundle {
  std::vector<AnalysisOutcome> analyses;
  /// a, V_Y, V_Y2, delta over the a-grid.
  std::string table_csv;
  std::string summary;
  json manifest;

  bool any_error() const;
};

/// Runs the listed analyses (concurrently; each draws from its own derived
/// seed) and assembles the bundle in declaration order.
ReportBundle run(const ExperimentConfig& cfg);

/// One analysis in isolation; throws on failure.
json run_analysis(const ExperimentConfig& cfg, const std::string& name);

/// Writes <name>.json per analysis, table.csv, summary.txt and manifest.json.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);

struct SweepRow {
  double value = 0.0;
  std::optional<double> abar_fine;
  std::optional<double> abar_coarse;
  std::string verdict;
  std::optional<bool> ranking_holds;
  std::string error;
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;

  /// value, abar_Y, abar_Y2, delta_verdict, ranking_holds, error
  std::string csv() const;
};

/// `parameter` addresses a number inside "model", e.g. "params.r" or
/// "functions.u3.gamma". Each value runs a compare analysis; failures are
/// recorded on their row.
SweepResult sweep(const json& doc, const std::string& parameter, const std::vector<double>& values,
                  const std::filesystem::path& base_dir = {});

/// "ClassName: message" for the library's exception types.
std::string describe_error(const std::exception& e);

std::string config_hash(const json& doc);

}  // namespace precaution::experiments
