#include "exirt/clustering.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "exirt/log.hpp"

namespace exirt {

Matrix standardize_columns(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    const auto col = x.column(c);
    const double m = mean(col), s = stddev(col);
    for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = s > 0.0 ? (col[r] - m) / s : 0.0;
  }
  return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct Run {
  std::vector<int> labels;
  Matrix centroids;
  double wcss;
  std::vector<double> trace;
};

Matrix plus_plus_init(const Matrix& x, int k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix c(static_cast<std::size_t>(k), x.cols());
  std::size_t first = uniform_index(rng, n);
  for (std::size_t d = 0; d < x.cols(); ++d) c(0, d) = x(first, d);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::min(best[i], sq_dist(x.row(i), c.row(static_cast<std::size_t>(j - 1))));
      total += best[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = uniform01(rng) * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        u -= best[pick];
        if (u < 0.0) break;
      }
      // Guard against landing on an already chosen point through rounding.
      while (best[pick] == 0.0 && pick + 1 < n) ++pick;
    } else {
      pick = uniform_index(rng, n);
    }
    for (std::size_t d = 0; d < x.cols(); ++d) c(static_cast<std::size_t>(j), d) = x(pick, d);
  }
  return c;
}

Run lloyd(const Matrix& x, Matrix centroids, int max_iter) {
  const std::size_t n = x.rows(), k = centroids.rows(), dim = x.cols();
  std::vector<int> labels(n, -1);
  std::vector<double> trace;
  double wcss = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = sq_dist(x.row(i), centroids.row(j));
        if (d < best) {
          best = d;
          arg = static_cast<int>(j);
        }
      }
      if (labels[i] != arg) changed = true;
      labels[i] = arg;
      wcss += best;
    }
    trace.push_back(wcss);
    if (!changed && iter > 0) break;
    // Update step; an empty cluster keeps its previous centroid.
    Matrix sums(k, dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = static_cast<std::size_t>(labels[i]);
      counts[l] += 1;
      for (std::size_t d = 0; d < dim; ++d) sums(l, d) += x(i, d);
    }
    for (std::size_t j = 0; j < k; ++j)
      if (counts[j] > 0)
        for (std::size_t d = 0; d < dim; ++d) centroids(j, d) = sums(j, d) / static_cast<double>(counts[j]);
  }
  return {std::move(labels), std::move(centroids), wcss, std::move(trace)};
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts, int max_iter) {
  if (k < 1) throw Error("kmeans: K must be >= 1");
  if (points.rows() < static_cast<std::size_t>(k)) throw Error("kmeans: fewer rows than clusters");
  if (restarts < 1) throw Error("kmeans: restarts must be >= 1");
  KMeansResult best;
  best.wcss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    Run run = lloyd(points, plus_plus_init(points, k, rng), max_iter);
    if (run.wcss < best.wcss) {
      best.labels = std::move(run.labels);
      best.centroids = std::move(run.centroids);
      best.wcss = run.wcss;
      best.wcss_trace = std::move(run.trace);
    }
  }
  return best;
}

std::vector<double> silhouette_values(const Matrix& points, const std::vector<int>& labels) {
  const std::size_t n = points.rows();
  if (labels.size() != n) throw Error("silhouette: label count mismatch");
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) sizes[static_cast<std::size_t>(l)] += 1;
  std::vector<double> out(n, 0.0);
  std::vector<double> dist_sum(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(labels[i]);
    if (sizes[own] <= 1) continue;
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dist_sum[static_cast<std::size_t>(labels[j])] += std::sqrt(sq_dist(points.row(i), points.row(j)));
    const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < dist_sum.size(); ++c)
      if (c != own && sizes[c] > 0) b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    out[i] = m > 0.0 ? (b - a) / m : 0.0;
  }
  return out;
}

double mean_silhouette(const Matrix& points, const std::vector<int>& labels) {
  return mean(silhouette_values(points, labels));
}

int ClusterAssignment::cluster_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return cluster[i];
  throw Error("dataset not in cluster assignment: " + name);
}

ClusterAssignment cluster_properties(const PropertyTable& table, int k, std::uint64_t seed, int restarts) {
  const Matrix z = standardize_columns(table.values);
  const auto km = kmeans(z, k, seed, restarts);
  ClusterAssignment out;
  out.names = table.row_names;
  out.cluster = km.labels;
  out.k = k;
  out.silhouette_mean = k >= 2 ? mean_silhouette(z, km.labels) : 0.0;
  return out;
}

SilhouetteScan silhouette_scan(const PropertyTable& table, std::uint64_t seed, int k_min, int k_max, int restarts) {
  const int n = static_cast<int>(table.row_names.size());
  const int hi = std::min(k_max, n - 1);
  if (k_min < 2 || hi < k_min) throw Error(fmt::format("silhouette_scan: no admissible K for {} rows", n));
  SilhouetteScan scan;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= hi; ++k) {
    auto c = cluster_properties(table, k, seed, restarts);
    scan.ks.push_back(k);
    scan.mean_silhouette.push_back(c.silhouette_mean);
    if (c.silhouette_mean > best) {
      best = c.silhouette_mean;
      scan.chosen_k = k;
      scan.best = std::move(c);
    }
  }
  return scan;
}

std::string cluster_csv(const ClusterAssignment& c) {
  std::ostringstream out;
  out << "dataset,cluster\n";
  for (std::size_t i = 0; i < c.names.size(); ++i) out << csv_escape(c.names[i]) << ',' << c.cluster[i] << '\n';
  return out.str();
}

ClusterAssignment read_cluster_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front() != std::vector<std::string>{"dataset", "cluster"})
    throw Error("not a cluster CSV: " + path.string());
  ClusterAssignment c;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw Error("cluster CSV row has wrong width");
    c.names.push_back(rows[r][0]);
    c.cluster.push_back(std::stoi(rows[r][1]));
    c.k = std::max(c.k, c.cluster.back() + 1);
  }
  return c;
}

std::string silhouette_scan_csv(const SilhouetteScan& scan) {
  std::ostringstream out;
  out << "k,mean_silhouette,chosen\n";
  for (std::size_t i = 0; i < scan.ks.size(); ++i)
    out << scan.ks[i] << ',' << format_number(scan.mean_silhouette[i]) << ',' << (scan.ks[i] == scan.chosen_k ? 1 : 0)
        << '\n';
  return out.str();
}

}  // namespace exirt
