#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "critwave/errors.hpp"
#include "critwave/expcli/config.hpp"
#include "critwave/expcli/experiments.hpp"
#include "critwave/expcli/report.hpp"

namespace ce = critwave::exp;
using nlohmann::json;

namespace {

struct Common {
  std::string config_file;
  std::map<std::string, std::string> lists;  // flag name -> list text
  std::vector<std::string> params;           // key=list
  std::string out;
  std::string emit;
  long long seed = -1;
  bool strict = false;
  bool reproducible = false;
  bool snapshots = false;
  bool quiet = false;
};

const std::vector<std::string> kListFlags = {"k", "eta", "n", "dt", "a", "T", "p", "q", "exponent"};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_file, "JSON config file")->check(CLI::ExistingFile);
  for (const auto& f : kListFlags)
    sub->add_option("--" + f, c.lists[f], "value list: 1,2,3 or 4:8 or 16:512:x2");
  sub->add_option("--param", c.params, "any parameter as key=list")->take_all();
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--seed", c.seed, "64-bit seed")->check(CLI::NonNegativeNumber);
  sub->add_option("--emit", c.emit, "output formats, e.g. csv,json,svg");
  sub->add_flag("--strict", c.strict, "nonzero exit when a check fails");
  sub->add_flag("--reproducible", c.reproducible, "omit wall-clock time from summaries");
  sub->add_flag("--snapshots", c.snapshots, "write binary trajectory frames");
  sub->add_flag("--quiet", c.quiet, "suppress the per-check listing");
}

ce::ParamMap overrides(const Common& c) {
  ce::ParamMap p;
  for (const auto& [key, text] : c.lists)
    if (!text.empty()) p[key] = ce::parse_list(text);
  for (const auto& kv : c.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw critwave::ConfigError("--param expects key=list, got '" + kv + "'");
    p[kv.substr(0, eq)] = ce::parse_list(kv.substr(eq + 1));
  }
  return p;
}

void apply_flags(ce::ExperimentConfig& cfg, const Common& c) {
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (!c.emit.empty()) ce::apply_emit(cfg, c.emit);
  if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
  cfg.strict |= c.strict;
  cfg.reproducible |= c.reproducible;
  cfg.snapshots |= c.snapshots;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw critwave::ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw critwave::ConfigError("config file " + path + ": " + e.what());
  }
}

void print_summary(const ce::BatchResult& r, bool quiet) {
  for (const auto& b : r.bundles) {
    int passed = 0;
    for (const auto& c : b.checks) passed += c.pass;
    std::printf("%-11s checks %d/%zu passed, %zu item error(s)\n", b.experiment.c_str(), passed,
                b.checks.size(), b.errors.size());
    if (quiet) continue;
    for (const auto& c : b.checks)
      std::printf("  [%s] %s: %s\n", c.pass ? "pass" : "FAIL", c.name.c_str(), c.measured.dump().c_str());
    for (const auto& e : b.errors)
      std::printf("  [error] %s (%s): %s\n", e.item.c_str(), e.kind.c_str(), e.message.c_str());
    for (const auto& w : b.warnings) std::printf("  [warning] %s\n", w.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the 2D exponential wave equation"};
  app.set_version_flag("--version", ce::version());
  app.require_subcommand(1);

  std::map<std::string, Common> common;
  std::vector<CLI::App*> subs;
  for (const auto& name : ce::kExperiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub, common[name]);
    subs.push_back(sub);
  }
  CLI::App* batch = app.add_subcommand("batch", "run several experiments with shared flags");
  std::vector<std::string> batch_names;
  Common& bc = common["batch"];
  batch->add_option("experiments", batch_names, "experiment ids (default: none)");
  batch->add_option("--config", bc.config_file,
                    "JSON array of per-experiment config objects, each with an 'experiment' key")
      ->check(CLI::ExistingFile);
  batch->add_option("--out", bc.out, "output directory");
  batch->add_option("--seed", bc.seed, "64-bit seed")->check(CLI::NonNegativeNumber);
  batch->add_option("--emit", bc.emit, "output formats, e.g. csv,json,svg");
  batch->add_flag("--strict", bc.strict, "nonzero exit when a check fails");
  batch->add_flag("--reproducible", bc.reproducible, "omit wall-clock time from summaries");
  batch->add_flag("--snapshots", bc.snapshots, "write binary trajectory frames");
  batch->add_flag("--quiet", bc.quiet, "suppress the per-check listing");

  CLI11_PARSE(app, argc, argv);

  std::vector<ce::ExperimentConfig> configs;
  bool quiet = false;
  try {
    if (batch->parsed()) {
      quiet = bc.quiet;
      if (!bc.config_file.empty()) {
        const json doc = read_json(bc.config_file);
        if (!doc.is_array()) throw critwave::ConfigError("batch config must be a JSON array");
        for (const auto& item : doc) {
          if (!item.is_object() || !item.contains("experiment"))
            throw critwave::ConfigError("batch entries need an 'experiment' key");
          configs.push_back(ce::make_config(item["experiment"].get<std::string>(), &item, {}));
        }
      }
      for (const auto& name : batch_names) configs.push_back(ce::make_config(name, nullptr, {}));
      for (auto& cfg : configs) apply_flags(cfg, bc);
    } else {
      for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        const Common& c = common[ce::kExperiments[i]];
        quiet = c.quiet;
        json doc;
        if (!c.config_file.empty()) doc = read_json(c.config_file);
        ce::ExperimentConfig cfg =
            ce::make_config(ce::kExperiments[i], c.config_file.empty() ? nullptr : &doc, overrides(c));
        apply_flags(cfg, c);
        configs.push_back(std::move(cfg));
      }
    }
  } catch (const critwave::Error& e) {
    std::fprintf(stderr, "critwave: %s\n", e.what());
    return 1;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "critwave: config: %s\n", e.what());
    return 1;
  }

  try {
    const ce::BatchResult r = ce::dispatch(configs, true);
    print_summary(r, quiet);
    return r.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "critwave: %s\n", e.what());
    return 1;
  }
}
