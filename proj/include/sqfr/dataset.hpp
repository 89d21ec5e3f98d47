#pragma once

// Loading, validating and exporting per-sample quality-score datasets.
//
// CSV: UTF-8, header row, comma separated, RFC 4180 quoting. Row numbers in
// diagnostics are 1-based and count the header as row 1.
// JSON: {"components": {"<component>": {"<group>": [score, ...]}}}.
//
// Scores inside each group are stored sorted, so any permutation of the
// input rows produces the same Dataset.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqfr/errors.hpp"
#include "sqfr/fairness.hpp"

namespace sqfr {

struct ScoreRecord {
  std::string group_label;
  std::string component_id;
  double score = 0.0;
  std::optional<std::string> sample_id;
};

struct Diagnostic {
  enum class Severity { warning, error };

  Severity severity = Severity::warning;
  std::string location;  // "row 4", "/components/q/A/1", "component 'q'"
  std::string message;

  bool is_error() const { return severity == Severity::error; }

  std::string to_string() const {
    std::string out = is_error() ? "error" : "warning";
    if (!location.empty()) out += ": " + location;
    return out + ": " + message;
  }
};

struct Provenance {
  std::string source;
  std::size_t rows = 0;  // data rows or JSON scores read, skipped ones included
  std::vector<Diagnostic> warnings;
};

struct Dataset {
  std::map<std::string, GroupedScores> components;
  Provenance provenance;

  std::size_t record_count() const {
    std::size_t n = 0;
    for (const auto& [id, c] : components) {
      for (const auto& [label, v] : c.groups) n += v.size();
    }
    return n;
  }

  void add(const ScoreRecord& r) {
    auto& c = components[r.component_id];
    c.component_id = r.component_id;
    c.groups[r.group_label].push_back(r.score);
  }

  // Sorts scores within each group.
  void canonicalize() {
    for (auto& [id, c] : components) {
      for (auto& [label, v] : c.groups) std::sort(v.begin(), v.end());
    }
  }

  // Compares content only; provenance is ignored.
  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.components == b.components;
  }
};

struct ColumnMapping {
  std::string group = "group";
  std::string component = "component";
  std::string score = "score";
  std::string sample = "sample_id";  // used when present, never required
};

enum class ParseMode { strict, lenient };

enum class DataFormat { csv, json };

inline DataFormat format_from_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot != std::string_view::npos) {
    std::string ext(path.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == "json") return DataFormat::json;
  }
  return DataFormat::csv;
}

// Shortest decimal text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Streaming RFC 4180 record reader.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record into fields; false at end of input. Blank lines
  // are returned as a single empty field.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;
    ++record_;
    if (record_ == 1 && c == 0xEF) {  // UTF-8 byte order mark
      if (in_.get() != 0xBB || in_.get() != 0xBF) {
        throw ParseError("row 1: malformed byte order mark");
      }
      c = in_.get();
    }
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    for (;; c = in_.get()) {
      if (c == std::char_traits<char>::eof()) {
        if (quoted) {
          throw ParseError("row " + std::to_string(record_) +
                           ": unterminated quoted field");
        }
        break;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          field.push_back(ch);
        }
        continue;
      }
      if (ch == '"' && field.empty() && !was_quoted) {
        quoted = true;
        was_quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (ch == '\n') {
        break;
      } else if (ch == '\r') {
        if (in_.peek() == '\n') in_.get();
        break;
      } else {
        field.push_back(ch);
      }
    }
    fields.push_back(std::move(field));
    return true;
  }

  // 1-based number of the record last returned by next().
  std::size_t record() const { return record_; }

 private:
  std::istream& in_;
  std::size_t record_ = 0;
};

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return v;
}

inline bool label_ok(std::string_view label) {
  return !label.empty() && label.find_first_of("\"\r\n") == std::string_view::npos;
}

inline std::string json_path_escape(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

}  // namespace detail

// Reads CSV rows into a Dataset without the final structural validation.
// Strict mode throws on the first bad row; lenient mode skips it and records
// a warning in the provenance.
inline Dataset parse_csv(std::istream& in, const ColumnMapping& columns = {},
                         ParseMode mode = ParseMode::strict,
                         std::string source = "<stream>") {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw ParseError(source + ": missing header row");

  auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (detail::trim(fields[i]) == name) return i;
    }
    return std::nullopt;
  };
  auto require_column = [&](const std::string& name) {
    const auto idx = column_of(name);
    if (!idx) throw ConfigError(source + ": missing column '" + name + "' in header");
    return *idx;
  };
  const std::size_t group_col = require_column(columns.group);
  const std::size_t component_col = require_column(columns.component);
  const std::size_t score_col = require_column(columns.score);
  const auto sample_col = column_of(columns.sample);
  const std::size_t width = fields.size();

  Dataset ds;
  ds.provenance.source = std::move(source);

  while (reader.next(fields)) {
    const std::string row = "row " + std::to_string(reader.record());
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++ds.provenance.rows;

    // Returns false when the row is skipped.
    auto reject = [&](const std::string& message, bool structural) {
      if (mode == ParseMode::strict) {
        if (structural) throw ValidationError(row + ": " + message);
        throw ParseError(row + ": " + message);
      }
      ds.provenance.warnings.push_back(
          {Diagnostic::Severity::warning, row, "skipped: " + message});
      return false;
    };

    if (fields.size() != width) {
      reject("expected " + std::to_string(width) + " fields, found " +
                 std::to_string(fields.size()),
             false);
      continue;
    }
    ScoreRecord rec;
    rec.group_label = std::string(detail::trim(fields[group_col]));
    rec.component_id = std::string(detail::trim(fields[component_col]));
    if (!detail::label_ok(rec.group_label)) {
      reject("invalid group label '" + rec.group_label + "'", false);
      continue;
    }
    if (!detail::label_ok(rec.component_id)) {
      reject("invalid component id '" + rec.component_id + "'", false);
      continue;
    }
    const auto score = detail::parse_double(fields[score_col]);
    if (!score) {
      reject("cannot parse score '" + fields[score_col] + "'", false);
      continue;
    }
    if (!std::isfinite(*score) || *score < 0.0) {
      reject("score " + fields[score_col] + " must be finite and >= 0", true);
      continue;
    }
    rec.score = *score;
    if (sample_col) rec.sample_id = fields[*sample_col];
    ds.add(rec);
  }
  ds.canonicalize();
  return ds;
}

// Reads the JSON dataset document without the final structural validation.
inline Dataset parse_json(std::istream& in, std::string source = "<stream>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("/: expected an object");
  const auto comps = doc.find("components");
  if (comps == doc.end() || !comps->is_object()) {
    throw ParseError("/components: expected an object");
  }

  Dataset ds;
  ds.provenance.source = std::move(source);
  for (const auto& [component, groups] : comps->items()) {
    const std::string cpath = "/components/" + detail::json_path_escape(component);
    if (!groups.is_object()) throw ParseError(cpath + ": expected an object");
    if (!detail::label_ok(component)) throw ParseError(cpath + ": invalid component id");
    auto& c = ds.components[component];
    c.component_id = component;
    for (const auto& [label, scores] : groups.items()) {
      const std::string gpath = cpath + "/" + detail::json_path_escape(label);
      if (!scores.is_array()) throw ParseError(gpath + ": expected an array");
      if (!detail::label_ok(label)) throw ParseError(gpath + ": invalid group label");
      auto& values = c.groups[label];
      for (std::size_t i = 0; i < scores.size(); ++i) {
        const std::string spath = gpath + "/" + std::to_string(i);
        if (!scores[i].is_number()) throw ParseError(spath + ": expected a number");
        const double v = scores[i].get<double>();
        if (!std::isfinite(v) || v < 0.0) {
          throw ValidationError(spath + ": score must be finite and >= 0");
        }
        values.push_back(v);
        ++ds.provenance.rows;
      }
    }
  }
  ds.canonicalize();
  return ds;
}

// Structural errors and data-quality warnings. Never throws.
inline std::vector<Diagnostic> validate(const Dataset& ds) {
  using S = Diagnostic::Severity;
  std::vector<Diagnostic> out;
  if (ds.components.empty()) {
    out.push_back({S::error, "dataset", "no components"});
    return out;
  }
  for (const auto& [id, c] : ds.components) {
    const std::string where = "component '" + id + "'";
    if (c.groups.size() < 2) {
      out.push_back({S::error, where,
                     "n ≥ 2 required (found " + std::to_string(c.groups.size()) +
                         " group" + (c.groups.size() == 1 ? "" : "s") + ")"});
    }
    std::size_t smallest = 0;
    std::size_t largest = 0;
    bool first = true;
    bool out_of_scale = false;
    std::optional<double> single_value;
    bool single_valued = true;
    for (const auto& [label, v] : c.groups) {
      if (v.empty()) {
        out.push_back({S::error, where, "group '" + label + "' has no scores"});
        continue;
      }
      smallest = first ? v.size() : std::min(smallest, v.size());
      largest = first ? v.size() : std::max(largest, v.size());
      first = false;
      for (double q : v) {
        if (!std::isfinite(q) || q < 0.0) {
          out.push_back({S::error, where,
                         "group '" + label + "' has a negative or non-finite score"});
          break;
        }
        if (q > 100.0) out_of_scale = true;
        if (!single_value) single_value = q;
        if (q != *single_value) single_valued = false;
      }
    }
    if (!first && smallest > 0 &&
        static_cast<double>(largest) / static_cast<double>(smallest) > 10.0) {
      out.push_back({S::warning, where,
                     "unbalanced groups: largest/smallest size " +
                         std::to_string(largest) + "/" + std::to_string(smallest) +
                         " exceeds 10"});
    }
    if (single_value && single_valued) {
      out.push_back({S::warning, where,
                     "single-valued component: every score is " +
                         format_number(*single_value)});
    }
    if (out_of_scale) {
      out.push_back({S::warning, where, "scores outside [0, 100]"});
    }
  }
  return out;
}

// Throws ValidationError listing every error diagnostic, if any.
inline void require_valid(const Dataset& ds) {
  std::string message;
  for (const auto& d : validate(ds)) {
    if (!d.is_error()) continue;
    if (!message.empty()) message += "\n";
    message += d.to_string();
  }
  if (!message.empty()) throw ValidationError(message);
}

inline Dataset load_csv(const std::string& path, const ColumnMapping& columns = {},
                        ParseMode mode = ParseMode::strict) {
  auto in = detail::open_input(path);
  Dataset ds = parse_csv(in, columns, mode, path);
  require_valid(ds);
  return ds;
}

inline Dataset load_json(const std::string& path) {
  auto in = detail::open_input(path);
  Dataset ds = parse_json(in, path);
  require_valid(ds);
  return ds;
}

// Dispatches on the file extension: ".json" is JSON, anything else CSV.
inline Dataset load(const std::string& path, const ColumnMapping& columns = {},
                    ParseMode mode = ParseMode::strict) {
  return format_from_path(path) == DataFormat::json ? load_json(path)
                                                    : load_csv(path, columns, mode);
}

inline void write_csv(const Dataset& ds, std::ostream& out,
                      const ColumnMapping& columns = {}) {
  out << csv_escape(columns.group) << ',' << csv_escape(columns.component) << ','
      << csv_escape(columns.score) << '\n';
  for (const auto& [id, c] : ds.components) {
    for (const auto& [label, v] : c.groups) {
      const std::string prefix = csv_escape(label) + ',' + csv_escape(id) + ',';
      for (double q : v) out << prefix << format_number(q) << '\n';
    }
  }
}

inline nlohmann::ordered_json to_json(const Dataset& ds) {
  nlohmann::ordered_json comps = nlohmann::ordered_json::object();
  for (const auto& [id, c] : ds.components) {
    nlohmann::ordered_json groups = nlohmann::ordered_json::object();
    for (const auto& [label, v] : c.groups) groups[label] = v;
    comps[id] = std::move(groups);
  }
  return {{"components", std::move(comps)}};
}

inline void write_json(const Dataset& ds, std::ostream& out) {
  out << to_json(ds).dump(2) << '\n';
}

inline std::string serialize(const Dataset& ds, DataFormat format) {
  std::ostringstream out;
  if (format == DataFormat::json) {
    write_json(ds, out);
  } else {
    write_csv(ds, out);
  }
  return out.str();
}

}  // namespace sqfr
