#include "critwave/expcli/report.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "critwave/errors.hpp"

#ifndef CRITWAVE_VERSION
#define CRITWAVE_VERSION "0.0.0"
#endif

namespace critwave::exp {

namespace fs = std::filesystem;

std::string version() { return CRITWAVE_VERSION; }

void Table::add(std::vector<nlohmann::json> row) {
  if (row.size() != columns.size())
    throw std::logic_error("table '" + name + "': row width does not match header");
  rows.push_back(std::move(row));
}

Table& ReportBundle::table(const std::string& name, std::vector<std::string> columns) {
  tables.push_back(Table{name, std::move(columns), {}});
  return tables.back();
}

Check& ReportBundle::check(std::string name, std::string anchor, bool pass, nlohmann::json measured,
                           nlohmann::json limit, std::string detail) {
  checks.push_back(Check{std::move(name), std::move(anchor), pass, std::move(measured),
                         std::move(limit), std::move(detail)});
  return checks.back();
}

bool ReportBundle::all_checks_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_string()) return csv_escape(v.get<std::string>());
  return csv_escape(v.dump());
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json summary_json(const ReportBundle& b, const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["artifact"] = "critwave";
  j["version"] = version();
  j["experiment"] = b.experiment;
  j["config"] = cfg.echo();
  j["wall_clock_seconds"] = cfg.reproducible ? nlohmann::json(nullptr) : nlohmann::json(b.wall_seconds);
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : b.checks)
    checks.push_back({{"name", c.name},
                      {"anchor", c.anchor},
                      {"pass", c.pass},
                      {"measured", c.measured},
                      {"limit", c.limit},
                      {"detail", c.detail}});
  j["checks"] = checks;
  j["all_checks_pass"] = b.all_checks_pass();
  j["constants"] = b.constants;
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : b.errors)
    errors.push_back({{"item", e.item}, {"kind", e.kind}, {"message", e.message}, {"status", 1}});
  j["errors"] = errors;
  j["status"] = b.errors.empty() ? 0 : 1;
  j["warnings"] = b.warnings;
  nlohmann::json tables = nlohmann::json::object();
  for (const auto& t : b.tables) tables[t.name] = {{"columns", t.columns}, {"rows", t.rows}};
  j["tables"] = tables;
  return j;
}

std::string dump_json(const nlohmann::json& j) {
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), std::streamsize(content.size()));
    if (!f) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> write_bundle(const ReportBundle& b, const ExperimentConfig& cfg) {
  std::vector<fs::path> written;
  const fs::path dir = fs::path(cfg.out_dir) / b.experiment;
  if (cfg.emit_csv)
    for (const auto& t : b.tables) {
      written.push_back(dir / (t.name + ".csv"));
      write_atomic(written.back(), to_csv(t));
    }
  if (cfg.emit_json) {
    written.push_back(dir / "summary.json");
    write_atomic(written.back(), dump_json(summary_json(b, cfg)));
  }
  if (cfg.emit_svg)
    for (const auto& f : b.figures) {
      written.push_back(dir / (f.name + ".svg"));
      write_atomic(written.back(), render_svg(f));
    }
  return written;
}

void append_frame(const fs::path& path, const std::vector<double>& values) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (!f) throw Error("cannot open " + path.string());
  for (double x : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    f.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

}  // namespace critwave::exp
