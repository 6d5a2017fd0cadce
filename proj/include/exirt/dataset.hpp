#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exirt/common.hpp"

namespace exirt {

enum class AttributeKind { numeric, symbolic, binary };

std::string_view to_string(AttributeKind kind);
AttributeKind attribute_kind_from_string(std::string_view s);

/// One attribute column. Numeric-valued columns keep their raw numbers;
/// symbolic columns (and binary columns whose values are not numbers) store
/// category ids indexing `categories`, which is sorted lexicographically.
struct AttributeColumn {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::vector<double> values;
  std::vector<std::string> categories;

  bool numeric_valued() const { return categories.empty(); }
  /// Split by category membership instead of threshold.
  bool categorical() const { return kind == AttributeKind::symbolic; }
};

/// Tabular binary-classification dataset. Labels are 0/1.
struct Dataset {
  std::string name;
  std::vector<AttributeColumn> columns;
  std::vector<int> labels;
  std::array<std::string, 2> label_names{"0", "1"};

  std::size_t row_count() const { return labels.size(); }
  std::size_t attribute_count() const { return columns.size(); }

  std::vector<std::string> attribute_names() const;
  /// Attribute matrix, one row per instance.
  Matrix features() const;
  std::vector<bool> categorical_mask() const;

  /// Rows in the given order.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Throws Error describing the first violated invariant.
  void validate() const;
};

using SchemaHints = std::map<std::string, AttributeKind>;

/// Loads a CSV with header. Kinds are inferred: binary when a column has at
/// most two distinct values, otherwise numeric when every cell parses as a
/// number, otherwise symbolic. Rows with a missing cell ("", "?", "NA") are
/// skipped with a warning. The label column must have exactly two values;
/// the lexicographically (or numerically, if both parse) smaller one maps to 0.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const SchemaHints& hints = {});

/// Stratified split. Within each class the rows are shuffled with `seed` and
/// round(n_class * test_fraction) of them go to test. Partitions keep the
/// original row order.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed);

struct PropertyVector {
  double number_of_features = 0;
  double number_of_instances = 0;
  double dimensionality = 0;
  double percentage_of_binary_features = 0;
  double std_nominal_distinct_values = 0;
  double mean_nominal_distinct_values = 0;
  double class_entropy = 0;
  double autocorrelation = 0;
  double number_of_numeric_features = 0;
  double number_of_symbolic_features = 0;
  double number_of_binary_features = 0;
  double percentage_of_symbolic_features = 0;
  double percentage_of_numeric_features = 0;
  double majority_class_percentage = 0;
  double minority_class_percentage = 0;

  static constexpr std::size_t size = 15;
  static const std::array<std::string_view, size>& names();
  std::array<double, size> values() const;
};

/// Entropy in bits of the 0/1 label distribution.
double class_entropy(std::span<const int> labels);

PropertyVector meta_features(const Dataset& ds);

/// Named numeric table: one row per dataset.
struct PropertyTable {
  std::vector<std::string> row_names;
  std::vector<std::string> column_names;
  Matrix values;
};

PropertyTable make_property_table(const std::vector<std::pair<std::string, PropertyVector>>& rows);
/// First column holds the row name; every other column must be numeric.
PropertyTable read_property_table(const std::filesystem::path& path);
std::string property_table_csv(const PropertyTable& table);

struct BinaryPropertyTable {
  std::vector<std::string> row_names;
  std::vector<std::string> column_names;
  /// cells[row][col] is 'h' (value >= column mean) or 's'.
  std::vector<std::vector<char>> cells;
};

BinaryPropertyTable binarize_properties(const PropertyTable& table);
BinaryPropertyTable binarize_properties(const std::vector<std::pair<std::string, PropertyVector>>& rows);
std::string binary_table_csv(const BinaryPropertyTable& table);

}  // namespace exirt
