#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "precaution/errors.hpp"
#include "precaution/experiments.hpp"
#include "precaution/serialize.hpp"

namespace fs = std::filesystem;
namespace ex = precaution::experiments;
namespace io = precaution::io;

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> a_grid;
  std::optional<std::size_t> b_grid;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "overrides the config seed");
  cmd->add_option("--out", f.out, "output directory (default: config 'output' or ./out)");
  cmd->add_option("--a-grid", f.a_grid, "first-stage grid points")->check(CLI::PositiveNumber);
  cmd->add_option("--b-grid", f.b_grid, "second-stage grid points per coordinate")
      ->check(CLI::PositiveNumber);
}

ex::json load_with_overrides(const CommonFlags& f) {
  auto doc = io::read_json_file(f.config);
  if (!doc.is_object()) throw precaution::ConfigError("/", "expected an object");
  if (f.seed) doc["seed"] = *f.seed;
  if (f.a_grid) doc["solver"]["a_grid"] = *f.a_grid;
  if (f.b_grid) doc["solver"]["b_grid"] = *f.b_grid;
  return doc;
}

fs::path output_dir(const CommonFlags& f, const fs::path& from_config) {
  if (!f.out.empty()) return f.out;
  if (!from_config.empty()) return from_config;
  return "out";
}

int analyze(const CommonFlags& f, const std::vector<std::string>& forced) {
  auto doc = load_with_overrides(f);
  if (!forced.empty()) doc["analyses"] = forced;
  const auto cfg = ex::parse_config(doc, fs::path(f.config).parent_path());
  const auto bundle = ex::run(cfg);
  const auto dir = output_dir(f, cfg.output);
  ex::write_bundle(bundle, dir);
  std::cout << bundle.summary << "wrote " << dir.string() << "\n";
  return bundle.any_error() ? kRuntimeExit : 0;
}

int sweep(const CommonFlags& f, const std::string& param, const std::vector<double>& values) {
  const auto doc = load_with_overrides(f);
  const auto result = ex::sweep(doc, param, values, fs::path(f.config).parent_path());
  fs::path from_config;
  if (doc.contains("output") && doc["output"].is_string()) from_config = doc["output"].get<std::string>();
  const auto dir = output_dir(f, from_config);
  io::write_atomic(dir / "sweep.csv", result.csv());
  io::write_atomic(dir / "manifest.json",
                   ex::json{{"tool", "precaution"},
                            {"version", PRECAUTION_VERSION},
                            {"config_hash", ex::config_hash(doc)},
                            {"seed", doc.contains("seed") ? doc["seed"] : ex::json(nullptr)},
                            {"parameter", param},
                            {"values", values},
                            {"files", {"sweep.csv"}}}
                           .dump(2) +
                       "\n");
  std::cout << result.csv();
  // Per-row failures are data; the sweep itself succeeded.
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Precautionary-effect analysis for two-stage decisions with learning"};
  app.set_version_flag("--version", std::string(PRECAUTION_VERSION));
  app.require_subcommand(1);

  CommonFlags analyze_flags, certify_flags, blackwell_flags, sweep_flags;
  auto* analyze_cmd = app.add_subcommand("analyze", "run the analyses listed in the config");
  add_common(analyze_cmd, analyze_flags);
  auto* certify_cmd = app.add_subcommand("certify", "decomposition certificate only");
  add_common(certify_cmd, certify_flags);
  auto* blackwell_cmd = app.add_subcommand("blackwell", "Blackwell sample test only");
  add_common(blackwell_cmd, blackwell_flags);
  auto* sweep_cmd = app.add_subcommand("sweep", "compare analysis over a parameter range");
  add_common(sweep_cmd, sweep_flags);
  std::string param;
  std::vector<double> values;
  sweep_cmd->add_option("--param", param, "model field, e.g. functions.u3.gamma")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze_cmd->parsed()) return analyze(analyze_flags, {});
    if (certify_cmd->parsed()) return analyze(certify_flags, {"certify"});
    if (blackwell_cmd->parsed()) return analyze(blackwell_flags, {"blackwell"});
    if (sweep_cmd->parsed()) return sweep(sweep_flags, param, values);
  } catch (const precaution::ConfigError& e) {
    std::cerr << "config error at " << e.what() << "\n";
    return kConfigExit;
  } catch (const precaution::DomainViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << ex::describe_error(e) << "\n";
    return kRuntimeExit;
  }
  return 0;
}
