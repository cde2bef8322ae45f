#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pie/matrix.hpp"

namespace pie {

// n x m table of finite reals. Column order is the canonical feature index.
struct ObservationTable {
  std::vector<std::string> column_names;
  Matrix values;
  std::optional<std::vector<std::string>> row_ids;

  std::size_t n_rows() const { return values.rows(); }
  std::size_t n_cols() const { return values.cols(); }

  // Id for display: the id column when present, else the 1-based row number.
  std::string row_label(std::size_t i) const;

  friend bool operator==(const ObservationTable&,
                         const ObservationTable&) = default;
};

struct FeatureImportance {
  std::vector<std::string> column_names;
  std::vector<double> beta;

  std::size_t size() const { return beta.size(); }

  friend bool operator==(const FeatureImportance&,
                         const FeatureImportance&) = default;
};

// RFC 4180 record splitting. Accepts LF or CRLF line endings and quoted
// fields containing separators, quotes ("") and newlines.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Locale-independent strict parse; nullopt on anything but a finite real.
std::optional<double> parse_real(std::string_view cell);

// Shortest representation that reads back to the same double.
std::string format_real(double value);

// Quotes a field only when it needs it.
std::string csv_escape(std::string_view field);

ObservationTable load_table(std::istream& source, bool has_row_ids);
ObservationTable load_table_file(const std::string& path, bool has_row_ids);
void write_table(std::ostream& out, const ObservationTable& table);

FeatureImportance load_importance(std::istream& source);
FeatureImportance load_importance_file(const std::string& path);
void write_importance(std::ostream& out, const FeatureImportance& imp);

// Reorders `imp` to the table's column order. Throws InputError listing
// names missing from either side.
FeatureImportance align(const FeatureImportance& imp,
                        const ObservationTable& table);

// Checks the ObservationTable invariants; throws InputError on violation.
void validate(const ObservationTable& table);
void validate(const FeatureImportance& imp);

}  // namespace pie
