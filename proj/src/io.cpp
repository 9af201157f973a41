#include "eiv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace eiv {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view cell, double& value) {
  if (cell == "nan" || cell == "NaN" || cell == "NA") {
    value = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc{} && ptr == cell.data() + cell.size() && !cell.empty();
}

// ------------------------------------------------------------ JSON field access

/// Field accessor that reports errors with a dotted path.
class Field {
 public:
  Field(const json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const json& value() const { return *value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void error(const std::string& message) const {
    fail(ErrorKind::config, path_ + ": " + message);
  }

  bool has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

  Field at(const std::string& key) const {
    expect_object();
    if (!value_->contains(key)) Field(*value_, join(key)).error("required field is missing");
    return {(*value_)[key], join(key)};
  }

  void expect_object() const {
    if (!value_->is_object()) error("expected an object");
  }

  void reject_unknown(std::initializer_list<std::string_view> allowed) const {
    expect_object();
    for (const auto& [key, v] : value_->items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        Field(v, join(key)).error("unknown field");
      }
    }
  }

  double number() const {
    if (!value_->is_number()) error("expected a number");
    return value_->get<double>();
  }

  long integer(long min_value) const {
    if (!value_->is_number_integer()) error("expected an integer");
    const auto v = value_->get<long long>();
    if (v < min_value) error("must be at least " + std::to_string(min_value));
    return static_cast<long>(v);
  }

  std::uint64_t unsigned_integer() const {
    if (!value_->is_number_unsigned() && !(value_->is_number_integer() && value_->get<long long>() >= 0)) {
      error("expected a nonnegative integer");
    }
    return value_->get<std::uint64_t>();
  }

  bool boolean() const {
    if (!value_->is_boolean()) error("expected true or false");
    return value_->get<bool>();
  }

  std::string string() const {
    if (!value_->is_string()) error("expected a string");
    return value_->get<std::string>();
  }

  std::vector<std::string> strings() const {
    if (value_->is_string()) return {value_->get<std::string>()};
    if (!value_->is_array() || value_->empty()) error("expected a non-empty array of column names");
    std::vector<std::string> out;
    for (std::size_t k = 0; k < value_->size(); ++k) out.push_back(Field((*value_)[k], index(k)).string());
    return out;
  }

  Vector vector(Eigen::Index size) const {
    if (value_->is_number()) return Vector::Constant(size, number());
    if (!value_->is_array()) error("expected a number or an array of numbers");
    if (static_cast<Eigen::Index>(value_->size()) != size) {
      error("expected " + std::to_string(size) + " entries, got " + std::to_string(value_->size()));
    }
    Vector out(size);
    for (Eigen::Index k = 0; k < size; ++k) out(k) = Field((*value_)[static_cast<std::size_t>(k)], index(k)).number();
    return out;
  }

  /// Nested arrays, row major.
  Matrix matrix() const {
    if (!value_->is_array() || value_->empty()) error("expected a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(value_->size());
    Eigen::Index cols = -1;
    Matrix out;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Field row((*value_)[static_cast<std::size_t>(i)], index(i));
      if (!row.value().is_array()) row.error("expected an array of numbers");
      if (cols < 0) {
        cols = static_cast<Eigen::Index>(row.value().size());
        out.resize(rows, cols);
      }
      if (static_cast<Eigen::Index>(row.value().size()) != cols) row.error("ragged matrix row");
      for (Eigen::Index j = 0; j < cols; ++j) {
        out(i, j) = Field(row.value()[static_cast<std::size_t>(j)], row.index(j)).number();
      }
    }
    return out;
  }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols) const {
    const Matrix out = matrix();
    if (out.rows() != rows || out.cols() != cols) {
      error("expected a " + std::to_string(rows) + " x " + std::to_string(cols) + " matrix, got " +
            std::to_string(out.rows()) + " x " + std::to_string(out.cols()));
    }
    return out;
  }

  /// A number s (meaning s I) or a dim x dim matrix.
  Matrix square(Eigen::Index dim) const {
    if (value_->is_number()) return number() * Matrix::Identity(dim, dim);
    return matrix(dim, dim);
  }

  /// One square matrix shared by all n rows, or an array of n of them.
  std::vector<Matrix> square_list(Eigen::Index n, Eigen::Index dim) const {
    const bool is_list = value_->is_array() && !value_->empty() && (*value_)[0].is_array() &&
                         !(*value_)[0].empty() && (*value_)[0][0].is_array();
    if (!is_list) return std::vector<Matrix>(static_cast<std::size_t>(n), square(dim));
    if (static_cast<Eigen::Index>(value_->size()) != n) {
      error("expected " + std::to_string(n) + " matrices, got " + std::to_string(value_->size()));
    }
    std::vector<Matrix> out;
    for (Eigen::Index i = 0; i < n; ++i) out.push_back(Field((*value_)[static_cast<std::size_t>(i)], index(i)).square(dim));
    return out;
  }

  /// A length-p vector shared by all rows, or an n x p matrix.
  Matrix rows_or_shared(Eigen::Index n, Eigen::Index p) const {
    if (value_->is_array() && !value_->empty() && (*value_)[0].is_array()) return matrix(n, p);
    return vector(p).transpose().replicate(n, 1);
  }

  std::string index(Eigen::Index k) const { return path_ + "[" + std::to_string(k) + "]"; }
  std::string index(std::size_t k) const { return index(static_cast<Eigen::Index>(k)); }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* value_;
  std::string path_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

ErrorSpec parse_error_spec(const Field& f, const fs::path& base) {
  ErrorSpec spec;
  if (f.value().is_string()) {
    spec.prefix = f.string();
    return spec;
  }
  f.reject_unknown({"prefix", "sd_column", "sidecar"});
  int count = 0;
  if (f.has("prefix")) spec.prefix = f.at("prefix").string(), ++count;
  if (f.has("sd_column")) spec.sd_column = f.at("sd_column").string(), ++count;
  if (f.has("sidecar")) spec.sidecar = resolve(base, f.at("sidecar").string()), ++count;
  if (count != 1) f.error("give exactly one of prefix, sd_column or sidecar");
  return spec;
}

void check_positive_definite(const Matrix& S, const std::string& where) {
  if (!is_symmetric(S, 1e-12)) fail(ErrorKind::data, where + ": error covariance is not symmetric");
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) fail(ErrorKind::data, where + ": error covariance is not positive definite");
}

Matrix select_columns(const CsvTable& t, const std::vector<std::string>& names, std::string_view source) {
  Matrix out(t.data.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = t.data.col(t.column(names[k], source));
  return out;
}

json provenance_meta(const ChainMetadata& meta) {
  json j = {{"seed", meta.seed},       {"replicate", meta.replicate}, {"variant", meta.variant},
            {"n", meta.n},             {"m", meta.m},                 {"p", meta.p},
            {"q", meta.q},             {"T", meta.iterations},        {"burn_in", meta.burn_in},
            {"thin", meta.thin}};
  return j;
}

}  // namespace

// ------------------------------------------------------------------ CSV

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

Eigen::Index CsvTable::column(std::string_view name, std::string_view source) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorKind::data, std::string(source) + ": no column named '" + std::string(name) + "'");
  return static_cast<Eigen::Index>(it - header.begin());
}

CsvTable parse_csv(std::string_view text, std::string_view source) {
  CsvTable t;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool have_header = false;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      if (!have_header) {
        line.remove_prefix(1);
        if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
        t.comments.emplace_back(line);
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (!have_header) {
      t.header = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      fail(ErrorKind::data, std::string(source) + ": line " + std::to_string(line_no) + " has " +
                                std::to_string(cells.size()) + " cells, header has " +
                                std::to_string(t.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (!parse_double(cells[k], row[k])) {
        fail(ErrorKind::data, std::string(source) + ": line " + std::to_string(line_no) + ", column '" +
                                  t.header[k] + "': not a number: '" + cells[k] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) fail(ErrorKind::data, std::string(source) + ": missing header row");
  t.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      t.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text(path), path.string()); }

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string format_csv(const CsvTable& t) {
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  for (std::size_t k = 0; k < t.header.size(); ++k) out += (k ? "," : "") + t.header[k];
  out += "\n";
  for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
      if (j) out += ',';
      out += format_double(t.data(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::io, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::io, "cannot move output into '" + path.string() + "': " + ec.message());
  }
}

void write_json(const fs::path& path, const json& value) { write_text_atomic(path, value.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config, path.string() + ": invalid JSON: " + e.what());
  }
}

// ------------------------------------------------------------------ data

std::vector<Matrix> expand_error(const CsvTable& t, const ErrorSpec& spec, Eigen::Index dim, std::string_view source) {
  const Eigen::Index n = t.data.rows();
  const std::string src(source);
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n));
  auto row_where = [&](Eigen::Index i) { return src + ": row " + std::to_string(i + 1); };

  if (!spec.sd_column.empty()) {
    const Eigen::Index c = t.column(spec.sd_column, source);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sd = t.data(i, c);
      if (!(sd > 0.0)) fail(ErrorKind::data, row_where(i) + ": standard deviation must be positive");
      out.push_back(sd * sd * Matrix::Identity(dim, dim));
    }
    return out;
  }

  if (!spec.sidecar.empty()) {
    const CsvTable side = read_csv(spec.sidecar);
    const std::string side_src = spec.sidecar.string();
    if (side.data.rows() != n) {
      fail(ErrorKind::data, side_src + ": has " + std::to_string(side.data.rows()) + " rows, dataset has " +
                                std::to_string(n));
    }
    if (side.data.cols() != dim * dim) {
      fail(ErrorKind::data, side_src + ": expected " + std::to_string(dim * dim) + " entries per row");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      Matrix S(dim, dim);
      for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index l = 0; l < dim; ++l) S(k, l) = side.data(i, k * dim + l);
      }
      check_positive_definite(S, side_src + ": row " + std::to_string(i + 1));
      out.push_back(std::move(S));
    }
    return out;
  }

  const bool scalar = t.has_column(spec.prefix);
  const bool diagonal = t.has_column(spec.prefix + ".1");
  if (scalar && diagonal) {
    fail(ErrorKind::data, src + ": both '" + spec.prefix + "' and '" + spec.prefix +
                              ".1' are present; use exactly one error encoding");
  }
  if (!scalar && !diagonal) {
    fail(ErrorKind::data, src + ": no error column '" + spec.prefix + "' or '" + spec.prefix + ".1'");
  }
  std::vector<Eigen::Index> cols;
  if (scalar) {
    cols.assign(static_cast<std::size_t>(dim), t.column(spec.prefix, source));
  } else {
    for (Eigen::Index k = 0; k < dim; ++k) cols.push_back(t.column(spec.prefix + "." + std::to_string(k + 1), source));
    if (t.has_column(spec.prefix + "." + std::to_string(dim + 1))) {
      fail(ErrorKind::data, src + ": more '" + spec.prefix + ".k' columns than the dimension " + std::to_string(dim));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Matrix S = Matrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double v = t.data(i, cols[static_cast<std::size_t>(k)]);
      if (!(v > 0.0)) fail(ErrorKind::data, row_where(i) + ": error variance must be positive");
      S(k, k) = v;
    }
    out.push_back(std::move(S));
  }
  return out;
}

Dataset load_dataset(const DataSpec& spec) {
  const CsvTable t = read_csv(spec.file);
  const std::string src = spec.file.string();
  if (t.data.rows() < 1) fail(ErrorKind::data, src + ": no data rows");
  for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
      if (!std::isfinite(t.data(i, j))) {
        fail(ErrorKind::data, src + ": row " + std::to_string(i + 1) + ", column '" +
                                  t.header[static_cast<std::size_t>(j)] + "': value is not finite");
      }
    }
  }
  Dataset d;
  d.Y = select_columns(t, spec.y, src);
  d.X = select_columns(t, spec.x, src);
  const Matrix Z = select_columns(t, spec.z, src);
  const Eigen::Index n = t.data.rows();
  d.Z.resize(n, Z.cols() + (spec.intercept ? 1 : 0));
  if (spec.intercept) d.Z.col(0).setOnes();
  d.Z.rightCols(Z.cols()) = Z;
  if (d.Z.cols() == 0) fail(ErrorKind::data, src + ": Z has no columns (set intercept or name z columns)");
  if (spec.x_error.empty()) fail(ErrorKind::data, src + ": no covariate error encoding given");
  d.V = expand_error(t, spec.x_error, d.X.cols(), src);
  if (!spec.y_error.empty()) d.U = expand_error(t, spec.y_error, d.Y.cols(), src);
  return d;
}

// ------------------------------------------------------------------ config

const json& config_schema() {
  static const json schema = json::parse(R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "eiv-gibbs run configuration",
  "type": "object",
  "required": ["model", "run"],
  "additionalProperties": false,
  "definitions": {
    "matrix": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    "vector": {"type": "array", "items": {"type": "number"}},
    "square": {"oneOf": [{"type": "number"}, {"$ref": "#/definitions/matrix"}]},
    "squares": {"oneOf": [{"$ref": "#/definitions/square"},
                          {"type": "array", "items": {"$ref": "#/definitions/matrix"}}]},
    "columns": {"oneOf": [{"type": "string"}, {"type": "array", "items": {"type": "string"}, "minItems": 1}]},
    "error": {"oneOf": [
      {"type": "string"},
      {"type": "object", "additionalProperties": false,
       "properties": {"prefix": {"type": "string"}, "sd_column": {"type": "string"}, "sidecar": {"type": "string"}},
       "minProperties": 1, "maxProperties": 1}]}
  },
  "properties": {
    "model": {
      "type": "object",
      "required": ["variant"],
      "additionalProperties": false,
      "properties": {
        "variant": {"enum": ["berkson-x", "classical-x", "berkson-xy", "classical-xy", "general"]},
        "data": {
          "type": "object",
          "required": ["file", "y", "x", "x_error"],
          "additionalProperties": false,
          "properties": {
            "file": {"type": "string"},
            "y": {"$ref": "#/definitions/columns"},
            "x": {"$ref": "#/definitions/columns"},
            "z": {"$ref": "#/definitions/columns"},
            "intercept": {"type": "boolean", "default": true},
            "x_error": {"$ref": "#/definitions/error"},
            "y_error": {"$ref": "#/definitions/error"}
          }
        },
        "inline": {
          "type": "object",
          "required": ["Y", "X", "Z", "V"],
          "additionalProperties": false,
          "properties": {
            "Y": {"$ref": "#/definitions/matrix"}, "X": {"$ref": "#/definitions/matrix"},
            "Z": {"$ref": "#/definitions/matrix"}, "V": {"$ref": "#/definitions/squares"},
            "U": {"$ref": "#/definitions/squares"}
          }
        },
        "prior": {
          "type": "object",
          "required": ["a0", "B0", "J0"],
          "additionalProperties": false,
          "properties": {
            "a0": {"type": "number", "exclusiveMinimum": 0},
            "B0": {"$ref": "#/definitions/square"},
            "j0": {"oneOf": [{"type": "number"}, {"$ref": "#/definitions/vector"}], "default": 0},
            "J0": {"$ref": "#/definitions/square"},
            "k": {"oneOf": [{"type": "number"}, {"$ref": "#/definitions/vector"}, {"$ref": "#/definitions/matrix"}]},
            "K": {"$ref": "#/definitions/squares"}
          }
        },
        "general": {
          "type": "object",
          "required": ["a0", "B0", "c0", "C0", "d", "D", "R", "M"],
          "additionalProperties": false,
          "properties": {
            "a0": {"type": "number"}, "B0": {"$ref": "#/definitions/square"},
            "c0": {"oneOf": [{"type": "number"}, {"$ref": "#/definitions/vector"}]},
            "C0": {"$ref": "#/definitions/square"}, "d": {"$ref": "#/definitions/matrix"},
            "D": {"$ref": "#/definitions/squares"}, "R": {"$ref": "#/definitions/matrix"},
            "M": {"$ref": "#/definitions/matrix"}
          }
        }
      }
    },
    "run": {
      "type": "object",
      "required": ["T", "seed"],
      "additionalProperties": false,
      "properties": {
        "T": {"type": "integer", "minimum": 1},
        "burn_in": {"type": "integer", "minimum": 0, "default": 0},
        "thin": {"type": "integer", "minimum": 1, "default": 1},
        "seed": {"type": "integer", "minimum": 0},
        "replicates": {"type": "integer", "minimum": 1, "default": 1},
        "store": {"type": "string", "default": "gamma"},
        "init": {"enum": ["prior_mode", "overdispersed"], "default": "prior_mode"}
      }
    },
    "diagnostics": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "max_lag": {"type": "integer", "minimum": 0, "default": 20},
        "prefix": {"type": "string", "default": "gamma.beta"}
      }
    },
    "output": {
      "type": "object",
      "additionalProperties": false,
      "properties": {"dir": {"type": "string", "default": "out"}}
    }
  }
})");
  return schema;
}

namespace {

void parse_model(const Field& f, const fs::path& base, ModelConfig& c) {
  f.reject_unknown({"variant", "data", "inline", "prior", "general"});
  c.variant = [&] {
    const Field v = f.at("variant");
    try {
      return parse_variant(v.string());
    } catch (const Error&) {
      v.error("expected one of berkson-x, classical-x, berkson-xy, classical-xy, general");
    }
  }();

  if (c.variant == Variant::general) {
    const Field g = f.at("general");
    g.reject_unknown({"a0", "B0", "c0", "C0", "d", "D", "R", "M"});
    GeneralDensityParams P;
    P.R = g.at("R").matrix();
    P.M = g.at("M").matrix();
    P.d = g.at("d").matrix();
    const Eigen::Index n = P.R.rows(), m = P.R.cols(), p = P.d.cols(), q = P.M.cols();
    if (P.M.rows() != n) g.at("M").error("must have as many rows as R");
    if (P.d.rows() != n) g.at("d").error("must have as many rows as R");
    P.a0 = g.at("a0").number();
    P.B0 = g.at("B0").square(m);
    P.c0 = g.at("c0").vector(m * (p + q));
    P.C0 = g.at("C0").square(m * (p + q));
    P.D = g.at("D").square_list(n, p);
    c.general = std::move(P);
    return;
  }

  if (f.has("data") == f.has("inline")) f.error("give exactly one of 'data' or 'inline'");
  if (f.has("data")) {
    const Field d = f.at("data");
    d.reject_unknown({"file", "y", "x", "z", "intercept", "x_error", "y_error"});
    DataSpec spec;
    spec.file = resolve(base, d.at("file").string());
    spec.y = d.at("y").strings();
    spec.x = d.at("x").strings();
    if (d.has("z")) spec.z = d.at("z").strings();
    spec.intercept = d.has("intercept") ? d.at("intercept").boolean() : true;
    spec.x_error = parse_error_spec(d.at("x_error"), base);
    if (has_response_error(c.variant)) spec.y_error = parse_error_spec(d.at("y_error"), base);
    Dataset data = load_dataset(spec);
    c.Y = std::move(data.Y);
    c.X = std::move(data.X);
    c.Z = std::move(data.Z);
    c.V = std::move(data.V);
    c.U = std::move(data.U);
  } else {
    const Field d = f.at("inline");
    d.reject_unknown({"Y", "X", "Z", "V", "U"});
    c.Y = d.at("Y").matrix();
    const Eigen::Index n = c.Y.rows();
    c.X = d.at("X").matrix();
    c.Z = d.at("Z").matrix();
    if (c.X.rows() != n) d.at("X").error("must have as many rows as Y");
    if (c.Z.rows() != n) d.at("Z").error("must have as many rows as Y");
    c.V = d.at("V").square_list(n, c.X.cols());
    if (has_response_error(c.variant)) c.U = d.at("U").square_list(n, c.Y.cols());
  }

  const Eigen::Index n = c.Y.rows(), m = c.Y.cols(), p = c.X.cols(), q = c.Z.cols();
  const Field pr = f.at("prior");
  pr.reject_unknown({"a0", "B0", "j0", "J0", "k", "K"});
  c.a0 = pr.at("a0").number();
  if (!(c.a0 > 0.0)) pr.at("a0").error("must be positive");
  c.B0 = pr.at("B0").square(m);
  c.j0 = pr.has("j0") ? pr.at("j0").vector(m * (q + p)) : Vector::Zero(m * (q + p));
  c.J0 = pr.at("J0").square(m * (q + p));
  if (is_classical(c.variant)) {
    c.k = pr.at("k").rows_or_shared(n, p);
    c.K = pr.at("K").square_list(n, p);
  }
}

}  // namespace

ExperimentConfig parse_config(const json& config, const fs::path& base_dir) {
  const Field root(config, "");
  root.reject_unknown({"model", "run", "diagnostics", "output"});
  ExperimentConfig out;
  out.source = config;

  const Field model = [&] {
    if (!config.contains("model")) Field(config, "model").error("required field is missing");
    return Field(config["model"], "model");
  }();
  parse_model(model, base_dir, out.model);

  if (!config.contains("run")) Field(config, "run").error("required field is missing");
  const Field run(config["run"], "run");
  run.reject_unknown({"T", "burn_in", "thin", "seed", "replicates", "store", "init"});
  out.run.iterations = run.at("T").integer(1);
  out.run.burn_in = run.has("burn_in") ? run.at("burn_in").integer(0) : 0;
  out.run.thin = run.has("thin") ? run.at("thin").integer(1) : 1;
  out.run.seed = run.at("seed").unsigned_integer();
  out.run.replicates = run.has("replicates") ? static_cast<int>(run.at("replicates").integer(1)) : 1;
  if (run.has("store")) {
    try {
      out.run.store = StoreSelection::parse(run.at("store").string());
    } catch (const Error& e) {
      run.at("store").error(e.what());
    }
  }
  if (out.run.burn_in >= out.run.iterations) run.at("burn_in").error("must be smaller than T");
  if (run.has("init")) {
    const auto init = run.at("init").string();
    if (init == "prior_mode") {
      out.init = InitStrategy::prior_mode;
    } else if (init == "overdispersed") {
      out.init = InitStrategy::overdispersed;
    } else {
      run.at("init").error("expected prior_mode or overdispersed");
    }
  }

  if (config.contains("diagnostics")) {
    const Field d(config["diagnostics"], "diagnostics");
    d.reject_unknown({"max_lag", "prefix"});
    if (d.has("max_lag")) out.max_lag = d.at("max_lag").integer(0);
    if (d.has("prefix")) out.diagnostics_prefix = d.at("prefix").string();
  }
  if (config.contains("output")) {
    const Field o(config["output"], "output");
    o.reject_unknown({"dir"});
    if (o.has("dir")) out.output_dir = resolve(base_dir, o.at("dir").string());
  } else {
    out.output_dir = base_dir / "out";
  }

  try {
    validate(out.model);
  } catch (const Error& e) {
    fail(ErrorKind::config, std::string("model: ") + e.what());
  }
  return out;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_json(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

// ------------------------------------------------------------------ chains

std::string format_chain(const ChainOutput& chain, const json& provenance) {
  CsvTable t;
  t.comments.push_back("eiv-gibbs chain");
  t.comments.push_back("meta: " + provenance_meta(chain.meta).dump());
  if (!provenance.is_null()) t.comments.push_back("provenance: " + provenance.dump());
  t.header = chain.labels;
  t.data = chain.draws;
  return format_csv(t);
}

void write_chain(const fs::path& path, const ChainOutput& chain, const json& provenance) {
  write_text_atomic(path, format_chain(chain, provenance));
}

ChainFile read_chain(const fs::path& path) {
  const CsvTable t = read_csv(path);
  ChainFile out;
  out.chain.labels = t.header;
  out.chain.draws = t.data;
  for (const auto& c : t.comments) {
    try {
      if (c.rfind("meta: ", 0) == 0) {
        const json m = json::parse(c.substr(6));
        auto& meta = out.chain.meta;
        meta.seed = m.at("seed").get<std::uint64_t>();
        meta.replicate = m.at("replicate").get<int>();
        meta.variant = m.at("variant").get<std::string>();
        meta.n = m.at("n").get<Eigen::Index>();
        meta.m = m.at("m").get<Eigen::Index>();
        meta.p = m.at("p").get<Eigen::Index>();
        meta.q = m.at("q").get<Eigen::Index>();
        meta.iterations = m.at("T").get<long>();
        meta.burn_in = m.at("burn_in").get<long>();
        meta.thin = m.at("thin").get<long>();
      } else if (c.rfind("provenance: ", 0) == 0) {
        out.provenance = json::parse(c.substr(12));
      }
    } catch (const json::exception& e) {
      fail(ErrorKind::data, path.string() + ": malformed header comment: " + e.what());
    }
  }
  return out;
}

json to_json(const ChainMetadata& meta) {
  json j = provenance_meta(meta);
  j["wall_seconds"] = meta.wall_seconds;
  return j;
}

json to_json(const DiagnosticsReport& r) {
  json acf = json::object();
  for (std::size_t k = 0; k < r.labels.size(); ++k) {
    json row = json::array();
    for (Eigen::Index l = 0; l < r.acf.cols(); ++l) row.push_back(r.acf(static_cast<Eigen::Index>(k), l));
    acf[r.labels[k]] = std::move(row);
  }
  json j = {{"labels", r.labels},
            {"T", r.T},
            {"d", r.d},
            {"batch_size", r.batch_size},
            {"max_lag", r.max_lag},
            {"mean", vector_to_json(r.mean)},
            {"sample_cov", matrix_to_json(r.sample_cov)},
            {"bm_cov", matrix_to_json(r.bm_cov)},
            {"se_sqrt_eig_min", r.se_sqrt_eig_min},
            {"se_sqrt_eig_max", r.se_sqrt_eig_max},
            {"mess", r.mess},
            {"mess_exceeds_T", r.mess_exceeds_T},
            {"mess_pseudo_determinant", r.mess_pseudo_determinant},
            {"mcse", vector_to_json(r.mcse)},
            {"ess", vector_to_json(r.ess)},
            {"acf", std::move(acf)},
            {"zero_variance", r.zero_variance}};
  if (!r.mess_error.empty()) j["mess_error"] = r.mess_error;
  return j;
}

json to_json(const GewekeReport& r) {
  json stats = json::array();
  for (const auto& s : r.stats) {
    stats.push_back({{"name", s.name},
                     {"marginal_mean", s.marginal_mean},
                     {"successive_mean", s.successive_mean},
                     {"marginal_se", s.marginal_se},
                     {"successive_se", s.successive_se},
                     {"z", s.z}});
  }
  return {{"variant", std::string(to_string(r.variant))},
          {"iterations", r.iterations},
          {"fraction_within_4", r.fraction_within(4.0)},
          {"max_abs_z", r.max_abs_z()},
          {"diverged_at", r.diverged_at},
          {"divergence", r.divergence},
          {"statistics", std::move(stats)}};
}

json to_json(const IdentityReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"instances", c.instances},
                      {"kind", c.is_bound ? "bound" : "identity"},
                      {c.is_bound ? "min_slack" : "max_error", c.worst},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  }
  return {{"all_passed", r.all_passed()}, {"checks", std::move(checks)}};
}

}  // namespace eiv
