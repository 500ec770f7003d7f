#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "precaution/decision.hpp"
#include "precaution/model_zoo.hpp"
#include "precaution/prob.hpp"
#include "precaution/support_geometry.hpp"

// JSON and CSV encodings. Parsers throw ConfigError carrying the JSON pointer
// of the offending node.

namespace precaution::io {

using json = nlohmann::json;

/// {"states": [...], "joint": [[...], ...]}; rows are signals, columns states.
prob::JointSignalModel joint_from_json(const json& j, const std::string& pointer = "");
json to_json(const prob::JointSignalModel& sig);

/// {"m": 2, "vectors": [[...], ...]}; "m" is optional.
geometry::PayoffSet payoff_set_from_json(const json& j, const std::string& pointer = "");
json to_json(const geometry::PayoffSet& set);

/// {"kind": "crra", "gamma": 2, "scale": 1, "state_coef": 0}. The shape
/// parameter is named theta, gamma, eta or c; log has none.
zoo::CatalogFunction function_from_json(const json& j, const std::string& pointer = "");
json to_json(const zoo::CatalogFunction& f);

/// {"family": "...", "params": {...}, "functions": {...}, "terms": [{g,h,q}]}
zoo::FamilySpec family_from_json(const json& j, const std::string& pointer = "");
json to_json(const zoo::FamilySpec& spec);

decision::SolverConfig solver_from_json(const json& j, const std::string& pointer = "");
json to_json(const decision::SolverConfig& cfg);

json to_json(const decision::OptResult& r);
json to_json(const decision::MonotonicityVerdict& v);
json to_json(const decision::PrecautionReport& r);
json to_json(const geometry::CertificateReport& r);
json to_json(const geometry::ConvexityVerdict& v);
json to_json(const prob::BlackwellReport& r);
json to_json(const zoo::FocCertificate& c);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// RFC 4180: fields with commas, quotes or line breaks are quoted; CRLF rows.
std::string csv_row(const std::vector<std::string>& fields);

json read_json_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace precaution::io
