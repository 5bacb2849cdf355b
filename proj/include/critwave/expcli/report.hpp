#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "critwave/expcli/config.hpp"

namespace critwave::exp {

/// Rectangular table; cells are JSON scalars (number, string, bool, null).
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row);
};

/// One inequality or tolerance check. `anchor` is the formula being tested.
struct Check {
  std::string name;
  std::string anchor;
  bool pass = false;
  nlohmann::json measured;
  nlohmann::json limit;
  std::string detail;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Figure {
  std::string name;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;
};

struct ItemError {
  std::string item;
  std::string kind;
  std::string message;
};

struct ReportBundle {
  std::string experiment;
  std::deque<Table> tables;  // deque keeps references from table() valid
  std::vector<Check> checks;
  std::vector<Figure> figures;
  std::vector<ItemError> errors;
  std::vector<std::string> warnings;
  nlohmann::json constants = nlohmann::json::object();  // measured constants
  double wall_seconds = 0.0;

  Table& table(const std::string& name, std::vector<std::string> columns);
  Check& check(std::string name, std::string anchor, bool pass, nlohmann::json measured,
               nlohmann::json limit, std::string detail = {});
  bool all_checks_pass() const;
};

/// RFC 4180 CSV with a header row and LF line endings; doubles at 17
/// significant digits.
std::string to_csv(const Table& t);

/// Summary document: version, config echo, checks, constants, errors, tables.
nlohmann::json summary_json(const ReportBundle& b, const ExperimentConfig& cfg);

/// Serializes a summary with fixed formatting (two-space indent, trailing LF).
std::string dump_json(const nlohmann::json& j);

/// Writes `content` to `path` through a sibling temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes the enabled outputs under <out_dir>/<experiment>/ and returns the
/// list of files written.
std::vector<std::filesystem::path> write_bundle(const ReportBundle& b, const ExperimentConfig& cfg);

/// Static SVG line plot.
std::string render_svg(const Figure& f);

/// Little-endian float64 n x n frame appended to `path`.
void append_frame(const std::filesystem::path& path, const std::vector<double>& values);

std::string version();

}  // namespace critwave::exp
