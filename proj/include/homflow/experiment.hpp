#pragma once

// Configuration-driven experiments and their reports.
//
// Config files are flat "key = value" text; '#' starts a comment. Every file
// needs "version = 1" and an "experiment" kind. Ladders accept either a comma
// list ("0.5, 0.25") or a power-of-two range ("2^-4..2^-10", "2^4..2^10").
// See configs/ for one example per kind and README.md for the key table.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "homflow/error_analysis.hpp"

namespace homflow {

/// Schema violation; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { LocalOrder, GlobalOrder, Gronwall, Windermere, Mechanism, Trees, LieSeries };

std::string to_string(ExperimentKind kind);
/// Throws ConfigError for an unknown name.
ExperimentKind parse_experiment_kind(const std::string& name);
std::vector<std::string> experiment_kind_names();

struct ExperimentConfig {
  static constexpr int kVersion = 1;

  ExperimentKind kind = ExperimentKind::LocalOrder;
  std::string space;   // "sphere:3", "group:3"; defaults from the field family
  std::string field = "b";
  std::optional<FieldParams> field_params;  // defaults of the family when empty
  std::vector<std::string> methods;
  std::vector<double> h_ladder;
  std::vector<int> n_ladder;
  double t_end = 1.0;
  double epsilon = 0.3;        // comparison ball radius
  std::uint64_t seed = 7;      // start point
  int pairs = 20;              // gronwall
  double pair_radius = 0.1;    // gronwall
  int steps = 64;              // windermere
  double h = 0.03125;          // mechanism single step
  int resolution = 16;         // gronwall grid
  int max_order = 6;           // trees
  std::vector<int> orders{1, 2, 3};  // lie-series truncation orders
  std::string output_prefix;   // file stem, defaults to the experiment name

  /// Key/value pairs in the order they were read, for the report echo.
  std::vector<std::pair<std::string, std::string>> echo;

  /// Parses and validates; throws ConfigError.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  /// Ladder lengths, resolvable ids and ranges. Throws ConfigError.
  void validate() const;

  SpaceDescriptor space_descriptor() const;
  CoefficientField make_field() const;
};

struct Check {
  std::string name;
  double expected = 0.0;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SlopeEntry {
  std::string method;
  std::string column;
  SlopeReport report;
};

/// A plain CSV table; values are printed with %.17g.
struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct VerdictReport {
  std::string experiment;
  std::vector<std::string> methods;
  std::string field;
  std::string space;
  std::vector<SlopeEntry> slopes;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, std::string>> config_echo;

  /// Conjunction of all slope verdicts and checks.
  bool pass() const;
};

/// Deterministic for a fixed config. HOMFLOW_THREADS caps the workers.
VerdictReport run_experiment(const ExperimentConfig& config);

/// CSV: one "h,err_metric,err_testfn_max[,aux...]" file per order table.
std::string to_csv(const CsvTable& table);
std::string to_json(const VerdictReport& report);

enum class ReportFormat { Csv, Json, Both };

/// Writes <dir>/<stem>.json and/or <dir>/<stem>[_<table>].csv. Returns the paths.
/// Throws std::runtime_error on I/O failure.
std::vector<std::string> emit_report(const VerdictReport& report, const std::string& dir, const std::string& stem,
                                     ReportFormat format);

}  // namespace homflow
