#pragma once

#include <string>
#include <vector>

#include "exirt/common.hpp"
#include "exirt/dataset.hpp"

namespace exirt {

struct McaResult {
  std::vector<std::string> row_names;
  /// "<property>:h" / "<property>:s", zero-mass categories removed.
  std::vector<std::string> category_names;
  Matrix row_coords;     // rows x components, principal coordinates
  Matrix column_coords;  // categories x components, principal coordinates
  std::vector<double> inertias;  // squared singular values, decreasing
  std::vector<std::string> dropped_categories;
};

/// Complete disjunctive (indicator) matrix of an h/s table.
Matrix indicator_matrix(const BinaryPropertyTable& table, std::vector<std::string>* category_names = nullptr);

/// Correspondence analysis of the indicator matrix via SVD of its
/// standardized residuals.
McaResult mca(const BinaryPropertyTable& table);

std::string mca_rows_csv(const McaResult& r);
std::string mca_columns_csv(const McaResult& r);
std::string mca_svg(const McaResult& r);

}  // namespace exirt
