#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eiv/diagnostics.hpp"
#include "eiv/geweke.hpp"
#include "eiv/identities.hpp"
#include "eiv/model.hpp"
#include "eiv/sampler.hpp"

namespace eiv {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- CSV

/// A numeric table with a header row. Lines starting with '#' before the
/// header are kept as comments (without the leading "# ").
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  Matrix data;

  bool has_column(std::string_view name) const;
  /// Throws a data error naming `source` when absent.
  Eigen::Index column(std::string_view name, std::string_view source = "table") const;
};

CsvTable parse_csv(std::string_view text, std::string_view source);
CsvTable read_csv(const fs::path& path);
std::string format_csv(const CsvTable& table);

/// Shortest form that parses back to the same double (17 significant digits).
std::string format_double(double value);

std::string read_text(const fs::path& path);
/// Writes to a temporary file next to `path`, then renames it into place.
void write_text_atomic(const fs::path& path, std::string_view content);
void write_json(const fs::path& path, const json& value);
json read_json(const fs::path& path);

// ---------------------------------------------------------------- data

/// How a per-row error covariance is stored in a data table:
///   prefix      column `prefix` (scalar variance, s I) or `prefix.1 .. prefix.d` (diagonal)
///   sd_column   a scalar standard deviation, squared into s^2 I
///   sidecar     a CSV of d*d row-major entries per row (full matrices)
struct ErrorSpec {
  std::string prefix;
  std::string sd_column;
  fs::path sidecar;

  bool empty() const { return prefix.empty() && sd_column.empty() && sidecar.empty(); }
};

struct DataSpec {
  fs::path file;
  std::vector<std::string> y;
  std::vector<std::string> x;
  std::vector<std::string> z;
  bool intercept = false;  // prepend a column of ones to Z
  ErrorSpec x_error;
  ErrorSpec y_error;
};

struct Dataset {
  Matrix Y, X, Z;
  std::vector<Matrix> V, U;
};

Dataset load_dataset(const DataSpec& spec);

/// Expands one error encoding of `table` into n SPD matrices of size dim.
std::vector<Matrix> expand_error(const CsvTable& table, const ErrorSpec& spec, Eigen::Index dim,
                                 std::string_view source);

// ---------------------------------------------------------------- config

/// A fully resolved `run` configuration.
struct ExperimentConfig {
  ModelConfig model;
  RunSpec run;
  InitStrategy init = InitStrategy::prior_mode;
  Eigen::Index max_lag = 20;
  std::string diagnostics_prefix = "gamma.beta";
  fs::path output_dir = "out";
  json source;  // the config as read, for provenance
};

/// Validates the JSON against the schema; errors carry the field path, e.g.
/// "model.prior.a0: required field is missing". Relative file paths are
/// resolved against `base_dir`.
ExperimentConfig parse_config(const json& config, const fs::path& base_dir);
ExperimentConfig load_config(const fs::path& path);

/// The JSON schema accepted by parse_config.
const json& config_schema();

json matrix_to_json(const Matrix& m);
json vector_to_json(const Vector& v);

// ---------------------------------------------------------------- chains and reports

/// Chain CSV: '#' provenance lines, a header of coordinate labels, one row
/// per stored iteration. Wall time is not written so reruns are byte-identical.
std::string format_chain(const ChainOutput& chain, const json& provenance);
void write_chain(const fs::path& path, const ChainOutput& chain, const json& provenance);

struct ChainFile {
  ChainOutput chain;
  json provenance;  // null when the file has none
};

ChainFile read_chain(const fs::path& path);

json to_json(const DiagnosticsReport& report);
json to_json(const GewekeReport& report);
json to_json(const IdentityReport& report);
json to_json(const ChainMetadata& meta);

}  // namespace eiv
