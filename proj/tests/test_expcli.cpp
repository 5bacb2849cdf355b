#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "critwave/errors.hpp"
#include "critwave/expcli/config.hpp"
#include "critwave/expcli/experiments.hpp"
#include "critwave/expcli/report.hpp"
#include "critwave/random.hpp"

using namespace critwave;
using namespace critwave::exp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("CRITWAVE_TEST_TMP");
  fs::path p = fs::path(env ? env : fs::temp_directory_path().string()) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reduced parameter sets so every experiment runs in a few seconds.
std::vector<ExperimentConfig> small_suite(const fs::path& out) {
  auto make = [&](const std::string& e, const ParamMap& p) {
    ExperimentConfig c = make_config(e, nullptr, p);
    c.out_dir = out.string();
    c.reproducible = true;
    c.emit_svg = true;
    return c;
  };
  return {make("moser", {{"kq", {20, 50}}, {"n", {128}}, {"k", {4, 5}}}),
          make("ode", {{"y0", {0.5}}, {"steps_per_period", {1e4}}, {"lemma_k", {4, 8}}, {"A", {2}}, {"k", {100}}}),
          make("pde", {{"n", {32}}, {"dt", {2e-3, 1e-3}}, {"T", {0.1}}, {"conc_n", {128}}, {"conc_T", {0.005}}}),
          make("cone", {{"n", {32, 64}}, {"agree_n", {64}}, {"capture_n", {128}}}),
          make("projector", {{"n", {64}}, {"lambda_count", {5}}, {"members", {2}}, {"lambda_max", {60}}}),
          make("strichartz", {{"n", {16}}, {"members", {2}}, {"snapshots", {5}}, {"k", {5}}, {"grid_n", {128}},
                              {"k_closed", {16, 32}}})};
}

}  // namespace

TEST_CASE("list parsing") {
  CHECK(parse_list("1,2.5,-3") == std::vector<double>{1, 2.5, -3});
  CHECK(parse_list("4:8") == std::vector<double>{4, 5, 6, 7, 8});
  CHECK(parse_list("16:128:x2") == std::vector<double>{16, 32, 64, 128});
  CHECK(parse_list(" 7 ") == std::vector<double>{7});
  CHECK_THROWS_AS(parse_list(""), ConfigError);
  CHECK_THROWS_AS(parse_list("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_list("abc"), ConfigError);
  CHECK_THROWS_AS(parse_list("8:4"), ConfigError);
}

TEST_CASE("configuration precedence and validation") {
  const nlohmann::json file = {{"params", {{"eta", 0.3}, {"n", 64}}}, {"seed", 5}, {"emit", "csv"}};
  const ExperimentConfig c = make_config("moser", &file, {{"n", {32}}});
  CHECK(c.get("eta") == 0.3);           // file over default
  CHECK(c.get_int("n") == 32);          // CLI over file
  CHECK(c.list("kq").size() == 4);      // default kept
  CHECK(c.seed == 5);
  CHECK(c.emit_csv);
  CHECK_FALSE(c.emit_json);
  CHECK_THROWS_AS(make_config("moser", nullptr, {{"bogus", {1}}}), ConfigError);
  CHECK_THROWS_AS(make_config("nope", nullptr, {}), ConfigError);
  const nlohmann::json bad = {{"colour", "red"}};
  CHECK_THROWS_AS(make_config("ode", &bad, {}), ConfigError);
  ExperimentConfig e = make_config("moser", nullptr, {{"eta", {1.5}}});
  CHECK_THROWS_AS(validate(e), ConfigError);
  ExperimentConfig emit = make_config("ode", nullptr, {});
  CHECK_THROWS_AS(apply_emit(emit, "csv,png"), ConfigError);
}

TEST_CASE("CSV formatting") {
  Table t{"demo", {"name", "value", "flag"}, {}};
  t.add({"plain", 0.1, true});
  t.add({"with,comma \"q\"", 1.0 / 3.0, nullptr});
  const std::string csv = to_csv(t);
  CHECK(csv == "name,value,flag\nplain,0.10000000000000001,true\n\"with,comma \"\"q\"\"\",0.33333333333333331,\n");
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("counter-based generator is reproducible") {
  CounterRng a(42), b(42), c(42, 10);
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(a.uniform() == c.uniform());
  CHECK(CounterRng(0).next_u64() == CounterRng::mix(0));
}

TEST_CASE("empty batch") {
  const BatchResult r = dispatch({}, false);
  CHECK(r.bundles.empty());
  CHECK(r.exit_code == 0);
}

TEST_CASE("invalid decoherence k gives a structured per-item error") {
  const fs::path out = scratch("bad_k");
  ExperimentConfig c = make_config("ode", nullptr,
                                   {{"k", {1, 100}}, {"y0", {0.5}}, {"lemma_k", {4}}, {"a", {1}}, {"A", {2}}});
  c.out_dir = out.string();
  const BatchResult r = dispatch({c}, true);
  CHECK(r.exit_code == 3);
  const auto j = nlohmann::json::parse(slurp(out / "ode" / "summary.json"));
  REQUIRE(j["errors"].size() == 1);
  CHECK(j["errors"][0]["item"] == "decoherence k=1");
  CHECK(j["errors"][0]["kind"] == "precondition");
  CHECK(j["errors"][0]["status"] == 1);
  CHECK(j["tables"]["decoherence"]["rows"].size() == 1);
}

TEST_CASE("ode experiment reports three decoherence rows") {
  ExperimentConfig c = make_config("ode", nullptr, {{"y0", {0.5}}, {"lemma_k", {4}}, {"a", {1}}, {"A", {2}}});
  const ReportBundle b = run_experiment(c);
  CHECK(b.errors.empty());
  const Table* t = nullptr;
  for (const auto& x : b.tables)
    if (x.name == "decoherence") t = &x;
  REQUIRE(t);
  REQUIRE(t->rows.size() == 3);
  const auto col = std::find(t->columns.begin(), t->columns.end(), "gap_over_ek") - t->columns.begin();
  for (const auto& row : t->rows) CHECK(row[col].get<double>() > 0.0);
}

TEST_CASE("every check carries a formula anchor") {
  ExperimentConfig c = make_config("ode", nullptr, {{"y0", {0.5}}, {"lemma_k", {4}}, {"a", {1}}, {"A", {2}}, {"k", {100}}});
  for (const auto& chk : run_experiment(c).checks) CHECK_FALSE(chk.anchor.empty());
}

TEST_CASE("outputs are byte-identical across runs") {
  const fs::path out = scratch("determinism");
  auto collect = [&] {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(out))
      if (entry.is_regular_file()) files[fs::relative(entry.path(), out).string()] = slurp(entry.path());
    return files;
  };
  const BatchResult first = dispatch(small_suite(out), true);
  CHECK(first.bundles.size() == 6);
  const auto a = collect();
  fs::remove_all(out);
  dispatch(small_suite(out), true);
  const auto b = collect();
  CHECK(a.size() == b.size());
  for (const auto& e : kExperiments) CHECK(a.count(e + "/summary.json") == 1);
  for (const auto& [name, content] : a) {
    CAPTURE(name);
    REQUIRE(b.count(name) == 1);
    CHECK(content == b.at(name));
    CHECK(fs::path(name).extension() != ".tmp");
    if (fs::path(name).extension() == ".svg") {
      CHECK(content.rfind("<svg", 0) == 0);
      CHECK(content.find("<script") == std::string::npos);
    }
  }
  const auto j = nlohmann::json::parse(a.at("ode/summary.json"));
  CHECK(j["wall_clock_seconds"].is_null());
  CHECK(j["version"] == version());
  CHECK(j.contains("config"));
}

TEST_CASE("binary snapshot frames") {
  const fs::path out = scratch("frames");
  ExperimentConfig c = make_config("pde", nullptr,
                                   {{"n", {16}}, {"dt", {1e-2}}, {"T", {0.1}}, {"snapshot_every", {2}}, {"conc_n", {64}},
                                    {"conc_T", {0.002}}});
  c.out_dir = out.string();
  c.snapshots = true;
  dispatch({c}, true);
  const fs::path bin = out / "pde" / "frames_u_dt0.01.bin";
  REQUIRE(fs::exists(bin));
  CHECK(fs::file_size(bin) == 6u * 16u * 16u * 8u);  // t = 0, 0.02, ..., 0.1
  const auto side = nlohmann::json::parse(slurp(bin.string() + ".json"));
  CHECK(side["n"] == 16);
  CHECK(side["bc"] == "dirichlet");
  CHECK(side["cadence"] == 2);
}
