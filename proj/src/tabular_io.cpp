#include "pie/tabular_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "pie/errors.hpp"

namespace pie {
namespace {

std::string read_all(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    text.erase(0, 3);
  }
  return text;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& name : names) {
    if (!out.empty()) out += ", ";
    out += '"' + name + '"';
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t row,
                  const std::string& column) {
  if (auto v = parse_real(cell)) return *v;
  std::string what = "row " + std::to_string(row) + ", column \"" + column +
                     "\": ";
  const std::string_view t = trim(cell);
  if (t.empty()) {
    what += "missing value";
  } else {
    double probe = 0.0;
    const char* first = t.data() + (t.front() == '+' ? 1 : 0);
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), probe);
    const bool numeric_shape = ptr == t.data() + t.size();
    if (numeric_shape && (ec == std::errc::result_out_of_range ||
                          !std::isfinite(probe))) {
      what += "non-finite value \"" + std::string(t) + "\"";
    } else {
      what += "not a number: \"" + std::string(t) + "\"";
    }
  }
  throw ParseError(row, column, what);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path);
  return in;
}

}  // namespace

std::string ObservationTable::row_label(std::size_t i) const {
  if (row_ids) return (*row_ids)[i];
  return std::to_string(i + 1);
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started) throw InputError("stray quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  // Blank trailing lines are not records.
  while (!records.empty() && records.back().size() == 1 &&
         records.back().front().empty()) {
    records.pop_back();
  }
  return records;
}

std::optional<double> parse_real(std::string_view cell) {
  std::string_view t = trim(cell);
  if (t.empty()) return std::nullopt;
  if (t.front() == '+') {
    t.remove_prefix(1);
    if (t.empty() || t.front() == '-' || t.front() == '+') return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void validate(const ObservationTable& table) {
  const std::size_t m = table.column_names.size();
  if (m == 0) throw InputError("table has no feature columns");
  if (table.values.cols() != m) {
    throw InputError("table width does not match its column names");
  }
  if (table.values.rows() == 0) throw InputError("table has no data rows");
  std::unordered_set<std::string> seen;
  for (const auto& name : table.column_names) {
    if (!seen.insert(name).second) {
      throw InputError("duplicate column name \"" + name + "\"");
    }
  }
  for (double v : table.values.data()) {
    if (!std::isfinite(v)) throw InputError("table contains a non-finite value");
  }
  if (table.row_ids && table.row_ids->size() != table.values.rows()) {
    throw InputError("row id count does not match row count");
  }
}

void validate(const FeatureImportance& imp) {
  if (imp.beta.empty()) throw InputError("importance vector is empty");
  if (imp.beta.size() != imp.column_names.size()) {
    throw InputError("importance names and values differ in length");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : imp.column_names) {
    if (!seen.insert(name).second) {
      throw InputError("duplicate feature \"" + name + "\" in importance");
    }
  }
  for (double b : imp.beta) {
    if (!std::isfinite(b)) throw InputError("importance contains a non-finite value");
  }
}

ObservationTable load_table(std::istream& source, bool has_row_ids) {
  const auto records = parse_csv(read_all(source));
  if (records.empty()) throw InputError("empty data file");

  const auto& header = records.front();
  const std::size_t skip = has_row_ids ? 1 : 0;
  if (header.size() <= skip) throw InputError("header names no feature columns");

  ObservationTable table;
  table.column_names.assign(header.begin() + static_cast<std::ptrdiff_t>(skip),
                            header.end());
  const std::size_t m = table.column_names.size();
  const std::size_t n = records.size() - 1;
  if (n == 0) throw InputError("data file has a header but no rows");

  std::unordered_set<std::string> seen;
  for (const auto& name : table.column_names) {
    if (!seen.insert(name).second) {
      throw InputError("duplicate column name \"" + name + "\"");
    }
  }

  std::vector<double> values;
  values.reserve(n * m);
  std::vector<std::string> ids;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw InputError("row " + std::to_string(r) + " has " +
                       std::to_string(rec.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    if (has_row_ids) ids.push_back(rec[0]);
    for (std::size_t k = 0; k < m; ++k) {
      values.push_back(parse_cell(rec[k + skip], r, table.column_names[k]));
    }
  }
  table.values = Matrix(n, m, std::move(values));
  if (has_row_ids) table.row_ids = std::move(ids);
  return table;
}

ObservationTable load_table_file(const std::string& path, bool has_row_ids) {
  auto in = open_input(path);
  return load_table(in, has_row_ids);
}

void write_table(std::ostream& out, const ObservationTable& table) {
  std::string line;
  if (table.row_ids) line = "id";
  for (std::size_t k = 0; k < table.n_cols(); ++k) {
    if (k > 0 || table.row_ids) line += ',';
    line += csv_escape(table.column_names[k]);
  }
  // A lone empty header field would read back as a blank line.
  if (line.empty()) line = "\"\"";
  out << line << '\n';
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    line.clear();
    if (table.row_ids) line = csv_escape((*table.row_ids)[i]);
    for (std::size_t k = 0; k < table.n_cols(); ++k) {
      if (k > 0 || table.row_ids) line += ',';
      line += format_real(table.values(i, k));
    }
    out << line << '\n';
  }
}

FeatureImportance load_importance(std::istream& source) {
  const auto records = parse_csv(read_all(source));
  if (records.empty()) throw InputError("empty importance file");
  const auto& header = records.front();
  if (header.size() != 2 || header[0] != "feature" || header[1] != "importance") {
    throw InputError("importance file must start with header \"feature,importance\"");
  }
  FeatureImportance imp;
  std::unordered_set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != 2) {
      throw InputError("importance row " + std::to_string(r) + " has " +
                       std::to_string(rec.size()) + " fields, expected 2");
    }
    if (!seen.insert(rec[0]).second) {
      throw InputError("duplicate feature \"" + rec[0] + "\" in importance");
    }
    imp.column_names.push_back(rec[0]);
    imp.beta.push_back(parse_cell(rec[1], r, "importance"));
  }
  if (imp.beta.empty()) throw InputError("importance file lists no features");
  return imp;
}

FeatureImportance load_importance_file(const std::string& path) {
  auto in = open_input(path);
  return load_importance(in);
}

void write_importance(std::ostream& out, const FeatureImportance& imp) {
  out << "feature,importance\n";
  for (std::size_t k = 0; k < imp.size(); ++k) {
    out << csv_escape(imp.column_names[k]) << ',' << format_real(imp.beta[k])
        << '\n';
  }
}

FeatureImportance align(const FeatureImportance& imp,
                        const ObservationTable& table) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < imp.size(); ++k) index.emplace(imp.column_names[k], k);

  std::vector<std::string> missing;
  for (const auto& name : table.column_names) {
    if (!index.contains(name)) missing.push_back(name);
  }
  std::unordered_set<std::string> in_table(table.column_names.begin(),
                                           table.column_names.end());
  std::vector<std::string> extra;
  for (const auto& name : imp.column_names) {
    if (!in_table.contains(name)) extra.push_back(name);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string what = "importance does not match data columns";
    if (!missing.empty()) what += "; missing importance for " + join_names(missing);
    if (!extra.empty()) what += "; importance for unknown feature " + join_names(extra);
    throw InputError(what);
  }

  FeatureImportance out;
  out.column_names = table.column_names;
  out.beta.reserve(table.column_names.size());
  for (const auto& name : table.column_names) out.beta.push_back(imp.beta[index.at(name)]);
  return out;
}

}  // namespace pie
