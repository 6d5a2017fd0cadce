#include "exirt/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "exirt/log.hpp"

namespace exirt {

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::numeric: return "numeric";
    case AttributeKind::symbolic: return "symbolic";
    case AttributeKind::binary: return "binary";
  }
  return "numeric";
}

AttributeKind attribute_kind_from_string(std::string_view s) {
  if (s == "numeric") return AttributeKind::numeric;
  if (s == "symbolic") return AttributeKind::symbolic;
  if (s == "binary") return AttributeKind::binary;
  throw Error(fmt::format("unknown attribute kind '{}'", s));
}

std::vector<std::string> Dataset::attribute_names() const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

Matrix Dataset::features() const {
  Matrix m(row_count(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) m.set_column(c, columns[c].values);
  return m;
}

std::vector<bool> Dataset::categorical_mask() const {
  std::vector<bool> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.categorical());
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.name = name;
  out.label_names = label_names;
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels.at(r));
  out.columns.reserve(columns.size());
  for (const auto& col : columns) {
    AttributeColumn c{col.name, col.kind, {}, col.categories};
    c.values.reserve(rows.size());
    for (std::size_t r : rows) c.values.push_back(col.values.at(r));
    out.columns.push_back(std::move(c));
  }
  return out;
}

void Dataset::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& col : columns) {
    if (col.name.empty()) throw Error("empty column name");
    if (!seen.insert(col.name).second) throw Error("duplicate column name: " + col.name);
    if (col.values.size() != row_count())
      throw Error(fmt::format("column '{}' has {} values, expected {}", col.name, col.values.size(), row_count()));
    for (double v : col.values)
      if (!std::isfinite(v)) throw Error(fmt::format("column '{}' holds a non-finite value", col.name));
    if (col.kind == AttributeKind::binary) {
      std::set<double> distinct(col.values.begin(), col.values.end());
      if (distinct.size() > 2) throw Error(fmt::format("binary column '{}' has more than two values", col.name));
    }
  }
  for (int y : labels)
    if (y != 0 && y != 1) throw Error("labels must be 0 or 1");
}

namespace {

std::optional<double> parse_number(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  const char* first = s.data() + b;
  const char* last = s.data() + e + 1;
  if (*first == '+') ++first;
  double v = 0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "?" || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

AttributeColumn build_column(const std::string& name, const std::vector<std::string>& cells,
                             std::optional<AttributeKind> hint) {
  std::set<std::string> distinct(cells.begin(), cells.end());
  std::vector<std::optional<double>> parsed;
  parsed.reserve(cells.size());
  bool all_numeric = true;
  for (const auto& c : cells) {
    parsed.push_back(parse_number(c));
    if (!parsed.back()) all_numeric = false;
  }
  // Distinct count over numeric values, so "1" and "1.0" agree.
  std::size_t distinct_count = distinct.size();
  if (all_numeric) {
    std::set<double> nums;
    for (const auto& p : parsed) nums.insert(*p);
    distinct_count = nums.size();
  }

  AttributeKind kind;
  if (hint) {
    kind = *hint;
    if (kind == AttributeKind::numeric && !all_numeric) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (!parsed[i]) throw Error(fmt::format("unparseable cell '{}' in numeric column '{}'", cells[i], name));
    }
    if (kind == AttributeKind::binary && distinct_count > 2)
      throw Error(fmt::format("column '{}' declared binary but has {} distinct values", name, distinct_count));
  } else if (distinct_count <= 2) {
    kind = AttributeKind::binary;
  } else if (all_numeric) {
    kind = AttributeKind::numeric;
  } else {
    kind = AttributeKind::symbolic;
  }

  AttributeColumn col;
  col.name = name;
  col.kind = kind;
  col.values.reserve(cells.size());
  const bool keep_numbers = all_numeric && kind != AttributeKind::symbolic;
  if (keep_numbers) {
    for (const auto& p : parsed) col.values.push_back(*p);
  } else {
    col.categories.assign(distinct.begin(), distinct.end());
    std::unordered_map<std::string, double> id;
    for (std::size_t i = 0; i < col.categories.size(); ++i) id[col.categories[i]] = static_cast<double>(i);
    for (const auto& c : cells) col.values.push_back(id.at(c));
  }
  return col;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column, const SchemaHints& hints) {
  if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
  auto rows = read_csv(path);
  if (rows.empty()) throw Error("empty CSV (no header row): " + path.string());
  const auto header = rows.front();
  {
    std::unordered_set<std::string> seen;
    for (const auto& h : header) {
      if (h.empty()) throw Error("empty column name in header");
      if (!seen.insert(h).second) throw Error("duplicate column name: " + h);
    }
  }
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) throw Error("label column not found: " + label_column);
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::vector<std::string>> kept;
  std::size_t skipped = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.size() != header.size())
      throw Error(fmt::format("row {} has {} fields, header has {}", r + 1, row.size(), header.size()));
    if (std::any_of(row.begin(), row.end(), is_missing)) {
      ++skipped;
      continue;
    }
    kept.push_back(std::move(row));
  }
  if (skipped > 0) log::warn(fmt::format("{}: skipped {} row(s) with missing cells", path.string(), skipped));

  Dataset ds;
  ds.name = path.stem().string();

  std::vector<std::string> label_cells;
  label_cells.reserve(kept.size());
  for (const auto& row : kept) label_cells.push_back(row[label_idx]);
  std::set<std::string> label_values(label_cells.begin(), label_cells.end());
  if (label_values.size() != 2)
    throw Error(fmt::format("non-binary label: column '{}' has {} distinct values", label_column, label_values.size()));
  std::array<std::string, 2> names{*label_values.begin(), *std::next(label_values.begin())};
  auto n0 = parse_number(names[0]);
  auto n1 = parse_number(names[1]);
  if (n0 && n1 && *n1 < *n0) std::swap(names[0], names[1]);
  ds.label_names = names;
  ds.labels.reserve(kept.size());
  for (const auto& c : label_cells) ds.labels.push_back(c == names[1] ? 1 : 0);

  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_idx) continue;
    std::vector<std::string> cells;
    cells.reserve(kept.size());
    for (const auto& row : kept) cells.push_back(row[c]);
    std::optional<AttributeKind> hint;
    if (auto it = hints.find(header[c]); it != hints.end()) hint = it->second;
    ds.columns.push_back(build_column(header[c], cells, hint));
  }
  ds.validate();
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("test_fraction must lie in (0,1)");
  if (ds.row_count() < 10) throw Error("split needs at least 10 rows");
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t r = 0; r < ds.row_count(); ++r) by_class[ds.labels[r]].push_back(r);
  if (by_class[0].empty() || by_class[1].empty()) throw Error("split needs both classes present");

  std::vector<std::size_t> train_rows, test_rows;
  for (int k = 0; k < 2; ++k) {
    auto idx = by_class[k];
    Rng rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
    shuffle(idx, rng);
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * test_fraction));
    if (n_test == 0 || n_test == idx.size())
      throw Error(fmt::format("split would leave class {} empty in one partition", k));
    test_rows.insert(test_rows.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_rows.insert(train_rows.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

const std::array<std::string_view, PropertyVector::size>& PropertyVector::names() {
  static const std::array<std::string_view, size> kNames{
      "number_of_features",
      "number_of_instances",
      "dimensionality",
      "percentage_of_binary_features",
      "std_nominal_distinct_values",
      "mean_nominal_distinct_values",
      "class_entropy",
      "autocorrelation",
      "number_of_numeric_features",
      "number_of_symbolic_features",
      "number_of_binary_features",
      "percentage_of_symbolic_features",
      "percentage_of_numeric_features",
      "majority_class_percentage",
      "minority_class_percentage",
  };
  return kNames;
}

std::array<double, PropertyVector::size> PropertyVector::values() const {
  return {number_of_features,
          number_of_instances,
          dimensionality,
          percentage_of_binary_features,
          std_nominal_distinct_values,
          mean_nominal_distinct_values,
          class_entropy,
          autocorrelation,
          number_of_numeric_features,
          number_of_symbolic_features,
          number_of_binary_features,
          percentage_of_symbolic_features,
          percentage_of_numeric_features,
          majority_class_percentage,
          minority_class_percentage};
}

double class_entropy(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const double n = static_cast<double>(labels.size());
  const double p1 = static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / n;
  double h = 0.0;
  for (double p : {p1, 1.0 - p1})
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

PropertyVector meta_features(const Dataset& ds) {
  ds.validate();
  if (ds.row_count() == 0) throw Error("meta_features of an empty dataset");
  PropertyVector p;
  const double f = static_cast<double>(ds.attribute_count());
  const double n = static_cast<double>(ds.row_count());
  p.number_of_features = f;
  p.number_of_instances = n;
  p.dimensionality = f / n;

  std::vector<double> nominal_distinct;
  for (const auto& col : ds.columns) {
    switch (col.kind) {
      case AttributeKind::numeric: p.number_of_numeric_features += 1; break;
      case AttributeKind::binary: p.number_of_binary_features += 1; break;
      case AttributeKind::symbolic: {
        p.number_of_symbolic_features += 1;
        std::set<double> distinct(col.values.begin(), col.values.end());
        nominal_distinct.push_back(static_cast<double>(distinct.size()));
        break;
      }
    }
  }
  if (f > 0) {
    p.percentage_of_binary_features = 100.0 * p.number_of_binary_features / f;
    p.percentage_of_symbolic_features = 100.0 * p.number_of_symbolic_features / f;
    p.percentage_of_numeric_features = 100.0 * p.number_of_numeric_features / f;
  }
  p.mean_nominal_distinct_values = mean(nominal_distinct);
  p.std_nominal_distinct_values = stddev(nominal_distinct);

  p.class_entropy = class_entropy(ds.labels);

  std::size_t equal_pairs = 0;
  for (std::size_t r = 1; r < ds.row_count(); ++r)
    if (ds.labels[r] == ds.labels[r - 1]) ++equal_pairs;
  p.autocorrelation = ds.row_count() > 1 ? static_cast<double>(equal_pairs) / (n - 1.0) : 1.0;

  const auto ones = static_cast<double>(std::count(ds.labels.begin(), ds.labels.end(), 1));
  const double majority = std::max(ones, n - ones);
  p.majority_class_percentage = 100.0 * majority / n;
  p.minority_class_percentage = 100.0 - p.majority_class_percentage;
  return p;
}

PropertyTable make_property_table(const std::vector<std::pair<std::string, PropertyVector>>& rows) {
  PropertyTable t;
  for (auto name : PropertyVector::names()) t.column_names.emplace_back(name);
  t.values = Matrix(rows.size(), PropertyVector::size);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    t.row_names.push_back(rows[r].first);
    const auto v = rows[r].second.values();
    for (std::size_t c = 0; c < v.size(); ++c) t.values(r, c) = v[c];
  }
  return t;
}

PropertyTable read_property_table(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.size() < 2) throw Error("property table needs a header and at least one row: " + path.string());
  PropertyTable t;
  const auto& header = rows.front();
  if (header.size() < 2) throw Error("property table needs at least one property column");
  t.column_names.assign(header.begin() + 1, header.end());
  t.values = Matrix(rows.size() - 1, t.column_names.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) throw Error(fmt::format("property table row {} has wrong width", r + 1));
    t.row_names.push_back(rows[r][0]);
    for (std::size_t c = 1; c < header.size(); ++c) {
      auto v = parse_number(rows[r][c]);
      if (!v) throw Error(fmt::format("unparseable cell '{}' in property table row {}", rows[r][c], r + 1));
      t.values(r - 1, c - 1) = *v;
    }
  }
  return t;
}

std::string property_table_csv(const PropertyTable& table) {
  std::ostringstream out;
  out << "dataset";
  for (const auto& c : table.column_names) out << ',' << csv_escape(c);
  out << '\n';
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    out << csv_escape(table.row_names[r]);
    for (std::size_t c = 0; c < table.column_names.size(); ++c) out << ',' << format_number(table.values(r, c));
    out << '\n';
  }
  return out.str();
}

BinaryPropertyTable binarize_properties(const PropertyTable& table) {
  const std::size_t n = table.row_names.size();
  if (n < 2) throw Error("binarize_properties needs at least 2 rows");
  BinaryPropertyTable out;
  out.row_names = table.row_names;
  out.column_names = table.column_names;
  out.cells.assign(n, std::vector<char>(table.column_names.size(), 's'));
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    const auto col = table.values.column(c);
    const double m = mean(col);
    // Values equal to the mean count as h; the slack absorbs rounding in the mean itself.
    const double slack = 1e-12 * std::max(1.0, std::abs(m));
    for (std::size_t r = 0; r < n; ++r) out.cells[r][c] = col[r] >= m - slack ? 'h' : 's';
  }
  return out;
}

BinaryPropertyTable binarize_properties(const std::vector<std::pair<std::string, PropertyVector>>& rows) {
  return binarize_properties(make_property_table(rows));
}

std::string binary_table_csv(const BinaryPropertyTable& table) {
  std::ostringstream out;
  out << "dataset";
  for (const auto& c : table.column_names) out << ',' << csv_escape(c);
  out << '\n';
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    out << csv_escape(table.row_names[r]);
    for (char cell : table.cells[r]) out << ',' << cell;
    out << '\n';
  }
  return out.str();
}

}  // namespace exirt
