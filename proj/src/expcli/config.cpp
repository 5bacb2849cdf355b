#include "critwave/expcli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "critwave/errors.hpp"

namespace critwave::exp {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> range(int lo, int hi) {
  std::vector<double> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

double parse_number(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double x = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ConfigError("not a number: '" + s + "'");
  return x;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

const std::vector<double>& ExperimentConfig::list(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing parameter '" + key + "'");
  return it->second;
}

double ExperimentConfig::get(const std::string& key) const {
  const auto& v = list(key);
  if (v.empty()) throw ConfigError("parameter '" + key + "' is empty");
  return v.front();
}

int ExperimentConfig::get_int(const std::string& key) const {
  const double x = get(key);
  if (x != std::floor(x)) throw ConfigError("parameter '" + key + "' must be an integer");
  return int(x);
}

std::vector<int> ExperimentConfig::ints(const std::string& key) const {
  std::vector<int> out;
  for (double x : list(key)) {
    if (x != std::floor(x)) throw ConfigError("parameter '" + key + "' must hold integers");
    out.push_back(int(x));
  }
  return out;
}

nlohmann::json ExperimentConfig::echo() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["params"] = params;
  j["out"] = out_dir;
  std::vector<std::string> emit;
  if (emit_csv) emit.push_back("csv");
  if (emit_json) emit.push_back("json");
  if (emit_svg) emit.push_back("svg");
  j["emit"] = emit;
  j["seed"] = seed;
  j["strict"] = strict;
  j["reproducible"] = reproducible;
  j["snapshots"] = snapshots;
  return j;
}

ParamMap default_params(const std::string& experiment) {
  if (experiment == "moser")
    return {{"k", range(4, 8)},
            {"kq", {20, 50, 100, 200}},
            {"eta", {0.1}},
            {"grid_eta", {0.2}},
            {"alpha", {2 * kPi, 4 * kPi, 6 * kPi}},
            {"n", {512}}};
  if (experiment == "ode")
    return {{"y0", {0.25, 0.5, 1.0, 1.5}},
            {"steps_per_period", {1e5}},
            {"a", {1.0, 1.1, 1.5, 2.0}},
            {"lemma_k", range(4, 64)},
            {"A", {1.5, 2, 3, 5, 10, 20}},
            {"k", {100, 200, 400}},
            {"eta", {0.1}}};
  if (experiment == "pde")
    return {{"n", {128}},
            {"dt", {2e-4, 1e-4}},
            {"T", {1.0}},
            {"amplitude", {0.1}},
            {"exponent", {4 * kPi}},
            {"snapshot_every", {50}},
            {"conc_k", {6}},
            {"conc_eta", {0.2}},
            {"conc_n", {512}},
            {"conc_T", {0.05}}};
  if (experiment == "cone")
    return {{"n", {64, 128, 256}},
            {"apex_time", {0.4}},
            {"S", {0.0}},
            {"T", {0.2}},
            {"mode_m", {2}},
            {"mode_k", {1}},
            {"k", {6}},
            {"eta", {0.2}},
            {"agree_n", {256, 512}},
            {"capture_n", {512}}};
  if (experiment == "projector")
    return {{"n", {256}},
            {"q", {8}},
            {"lambda_min", {10}},
            {"lambda_max", {200}},
            {"lambda_count", {40}},
            {"members", {8}}};
  if (experiment == "strichartz")
    return {{"n", {64}},
            {"T", {1.0}},
            {"members", {4}},
            {"snapshots", {33}},
            {"k", range(5, 8)},
            {"k_closed", {5, 6, 7, 8, 16, 32, 64, 128, 256, 512}},
            {"a", {2.0}},
            {"p", {1.0}},
            {"q", {2.0}},
            {"grid_n", {512}}};
  throw ConfigError("unknown experiment '" + experiment + "'");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty entry in list '" + text + "'");
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_number(item));
      continue;
    }
    const double lo = parse_number(item.substr(0, c1));
    const auto c2 = item.find(':', c1 + 1);
    const double hi = parse_number(item.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
    if (c2 == std::string::npos) {
      if (lo != std::floor(lo) || hi != std::floor(hi) || hi < lo)
        throw ConfigError("bad integer range '" + item + "'");
      for (double x = lo; x <= hi; x += 1.0) out.push_back(x);
    } else {
      const std::string step = item.substr(c2 + 1);
      if (step.size() < 2 || step[0] != 'x') throw ConfigError("bad range step '" + step + "'");
      const double factor = parse_number(step.substr(1));
      if (!(factor > 1.0) || !(lo > 0.0) || hi < lo) throw ConfigError("bad geometric range '" + item + "'");
      for (double x = lo; x <= hi * (1 + 1e-12); x *= factor) out.push_back(x);
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void apply_emit(ExperimentConfig& cfg, const std::string& spec) {
  cfg.emit_csv = cfg.emit_json = cfg.emit_svg = false;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "csv") cfg.emit_csv = true;
    else if (item == "json") cfg.emit_json = true;
    else if (item == "svg") cfg.emit_svg = true;
    else if (!item.empty()) throw ConfigError("unknown emit format '" + item + "'");
  }
}

namespace {

std::vector<double> json_list(const nlohmann::json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) return parse_list(v.get<std::string>());
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("parameter '" + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  throw ConfigError("parameter '" + key + "' must be a number, list or range string");
}

void merge_params(ParamMap& into, const ParamMap& from, const std::string& experiment) {
  for (const auto& [key, value] : from) {
    if (!into.count(key))
      throw ConfigError("unknown parameter '" + key + "' for experiment '" + experiment + "'");
    into[key] = value;
  }
}

}  // namespace

ExperimentConfig make_config(const std::string& experiment, const nlohmann::json* file,
                             const ParamMap& cli_overrides) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.params = default_params(experiment);
  if (file) {
    if (!file->is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : file->items()) {
      if (key == "params") {
        if (!value.is_object()) throw ConfigError("'params' must be an object");
        ParamMap p;
        for (const auto& [pk, pv] : value.items()) p[pk] = json_list(pv, pk);
        merge_params(cfg.params, p, experiment);
      } else if (key == "out") {
        cfg.out_dir = value.get<std::string>();
      } else if (key == "emit") {
        std::string joined;
        if (value.is_array())
          for (const auto& e : value) joined += e.get<std::string>() + ",";
        else
          joined = value.get<std::string>();
        apply_emit(cfg, joined);
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "strict") {
        cfg.strict = value.get<bool>();
      } else if (key == "reproducible") {
        cfg.reproducible = value.get<bool>();
      } else if (key == "snapshots") {
        cfg.snapshots = value.get<bool>();
      } else if (key == "experiment") {
        if (value.get<std::string>() != experiment)
          throw ConfigError("config file is for experiment '" + value.get<std::string>() + "'");
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  }
  merge_params(cfg.params, cli_overrides, experiment);
  return cfg;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void require_all(const ExperimentConfig& cfg, const std::string& key, bool (*pred)(double),
                 const char* rule) {
  for (double x : cfg.list(key))
    require(pred(x), "parameter '" + key + "' must be " + rule);
}

bool positive(double x) { return x > 0.0; }
bool unit_open(double x) { return x > 0.0 && x < 1.0; }
bool grid_size(double x) { return x == std::floor(x) && x >= 4 && x <= 8192; }
bool whole(double x) { return x == std::floor(x) && x >= 1; }

}  // namespace

void validate(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "moser") {
    require_all(cfg, "k", whole, "a positive integer");
    require_all(cfg, "kq", whole, "a positive integer");
    require_all(cfg, "eta", unit_open, "in (0, 1)");
    require_all(cfg, "grid_eta", unit_open, "in (0, 1)");
    require_all(cfg, "alpha", positive, "> 0");
    require_all(cfg, "n", grid_size, "an integer in [4, 8192]");
  } else if (e == "ode") {
    require_all(cfg, "y0", positive, "> 0");
    require_all(cfg, "steps_per_period", positive, "> 0");
    require_all(cfg, "lemma_k", whole, "a positive integer");
    require_all(cfg, "eta", unit_open, "in (0, 1)");
    require_all(cfg, "k", [](double x) { return x == std::floor(x); }, "an integer");
  } else if (e == "pde") {
    require_all(cfg, "n", grid_size, "an integer in [4, 8192]");
    require_all(cfg, "conc_n", grid_size, "an integer in [4, 8192]");
    require_all(cfg, "dt", positive, "> 0");
    require_all(cfg, "T", positive, "> 0");
    require_all(cfg, "conc_T", positive, "> 0");
    require_all(cfg, "snapshot_every", whole, "a positive integer");
    require_all(cfg, "conc_eta", unit_open, "in (0, 1)");
    require(cfg.get("exponent") >= 0.0, "parameter 'exponent' must be >= 0");
  } else if (e == "cone") {
    require_all(cfg, "n", grid_size, "an integer in [4, 8192]");
    require_all(cfg, "capture_n", grid_size, "an integer in [4, 8192]");
    require_all(cfg, "agree_n", grid_size, "an integer in [4, 8192]");
    require(cfg.get("S") < cfg.get("T"), "cone: need S < T");
    require(cfg.get("T") <= cfg.get("apex_time"), "cone: T must not pass the apex");
    require(cfg.get("apex_time") - cfg.get("S") <= 0.5, "cone: section at S must fit in the square");
    require_all(cfg, "eta", unit_open, "in (0, 1)");
  } else if (e == "projector") {
    require_all(cfg, "n", grid_size, "an integer in [4, 8192]");
    require(cfg.get("lambda_min") > 0 && cfg.get("lambda_max") > cfg.get("lambda_min"),
            "projector: need 0 < lambda_min < lambda_max");
    require(cfg.get_int("lambda_count") >= 2, "projector: lambda_count must be >= 2");
    require(cfg.get_int("members") >= 1, "projector: members must be >= 1");
    require_all(cfg, "q", [](double x) { return x >= 2.0; }, ">= 2");
  } else if (e == "strichartz") {
    require_all(cfg, "n", grid_size, "an integer in [4, 8192]");
    require_all(cfg, "grid_n", grid_size, "an integer in [4, 8192]");
    require(cfg.get_int("snapshots") >= 2, "strichartz: snapshots must be >= 2");
    require(cfg.get_int("members") >= 1, "strichartz: members must be >= 1");
    require(cfg.get("T") > 0.0, "strichartz: T must be > 0");
  } else {
    throw ConfigError("unknown experiment '" + e + "'");
  }
}

}  // namespace critwave::exp
