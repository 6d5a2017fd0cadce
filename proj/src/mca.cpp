#include "exirt/mca.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>
#include <sstream>

#include "exirt/log.hpp"
#include "exirt/svg.hpp"

namespace exirt {

Matrix indicator_matrix(const BinaryPropertyTable& table, std::vector<std::string>* category_names) {
  const std::size_t n = table.row_names.size(), p = table.column_names.size();
  Matrix z(n, 2 * p, 0.0);
  if (category_names) category_names->clear();
  for (std::size_t c = 0; c < p; ++c) {
    if (category_names) {
      category_names->push_back(table.column_names[c] + ":h");
      category_names->push_back(table.column_names[c] + ":s");
    }
    for (std::size_t r = 0; r < n; ++r) {
      const char cell = table.cells[r][c];
      if (cell != 'h' && cell != 's') throw Error(fmt::format("binary table cell must be h or s, got '{}'", cell));
      z(r, 2 * c + (cell == 'h' ? 0 : 1)) = 1.0;
    }
  }
  return z;
}

McaResult mca(const BinaryPropertyTable& table) {
  const std::size_t n = table.row_names.size();
  if (n < 2 || table.column_names.size() < 2) throw Error("mca needs at least 2 rows and 2 property columns");
  std::vector<std::string> all_names;
  const Matrix z_full = indicator_matrix(table, &all_names);

  McaResult out;
  out.row_names = table.row_names;
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < z_full.cols(); ++j) {
    double mass = 0.0;
    for (std::size_t r = 0; r < n; ++r) mass += z_full(r, j);
    if (mass > 0.0) {
      keep.push_back(j);
      out.category_names.push_back(all_names[j]);
    } else {
      out.dropped_categories.push_back(all_names[j]);
      log::warn(fmt::format("mca: dropping category '{}' with zero mass", all_names[j]));
    }
  }

  const auto J = static_cast<Eigen::Index>(keep.size());
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd P(N, J);
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index j = 0; j < J; ++j) P(r, j) = z_full(static_cast<std::size_t>(r), keep[static_cast<std::size_t>(j)]);
  P /= P.sum();
  const Eigen::VectorXd rmass = P.rowwise().sum();
  const Eigen::VectorXd cmass = P.colwise().sum().transpose();
  const Eigen::MatrixXd S = rmass.cwiseSqrt().cwiseInverse().asDiagonal() * (P - rmass * cmass.transpose()) *
                            cmass.cwiseSqrt().cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  Eigen::Index comps = 0;
  while (comps < sv.size() && sv(comps) > 1e-10) ++comps;

  out.row_coords = Matrix(n, static_cast<std::size_t>(comps));
  out.column_coords = Matrix(keep.size(), static_cast<std::size_t>(comps));
  for (Eigen::Index k = 0; k < comps; ++k) {
    out.inertias.push_back(sv(k) * sv(k));
    Eigen::VectorXd u = svd.matrixU().col(k);
    Eigen::VectorXd v = svd.matrixV().col(k);
    // Sign convention: the largest-magnitude column loading is positive.
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) {
      u = -u;
      v = -v;
    }
    for (Eigen::Index r = 0; r < N; ++r)
      out.row_coords(static_cast<std::size_t>(r), static_cast<std::size_t>(k)) = u(r) * sv(k) / std::sqrt(rmass(r));
    for (Eigen::Index j = 0; j < J; ++j)
      out.column_coords(static_cast<std::size_t>(j), static_cast<std::size_t>(k)) =
          v(j) * sv(k) / std::sqrt(cmass(j));
  }
  return out;
}

namespace {
std::string coords_csv(const std::string& key, const std::vector<std::string>& names, const Matrix& coords,
                       std::size_t comps) {
  std::ostringstream out;
  out << key;
  for (std::size_t k = 0; k < comps; ++k) out << ",component_" << k;
  out << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << csv_escape(names[i]);
    for (std::size_t k = 0; k < comps; ++k) out << ',' << format_number(coords(i, k));
    out << '\n';
  }
  return out.str();
}
}  // namespace

std::string mca_rows_csv(const McaResult& r) {
  return coords_csv("dataset", r.row_names, r.row_coords, r.row_coords.cols());
}

std::string mca_columns_csv(const McaResult& r) {
  return coords_csv("category", r.category_names, r.column_coords, r.column_coords.cols());
}

std::string mca_svg(const McaResult& r) {
  std::vector<svg::Point> pts;
  const bool two = r.row_coords.cols() >= 2;
  for (std::size_t i = 0; i < r.row_names.size(); ++i)
    pts.push_back({r.row_names[i], r.row_coords.cols() ? r.row_coords(i, 0) : 0.0, two ? r.row_coords(i, 1) : 0.0, 0});
  for (std::size_t j = 0; j < r.category_names.size(); ++j)
    pts.push_back({r.category_names[j], r.column_coords.cols() ? r.column_coords(j, 0) : 0.0,
                   two ? r.column_coords(j, 1) : 0.0, 1});
  return svg::scatter_chart("MCA of binarized dataset properties", pts, "component 0", "component 1");
}

}  // namespace exirt
