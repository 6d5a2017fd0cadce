#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "exirt/common.hpp"
#include "exirt/dataset.hpp"

namespace exirt {

/// Column-wise z-scores (population std); constant columns become 0.
Matrix standardize_columns(const Matrix& x);

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;
  double wcss = 0.0;
  /// WCSS after each Lloyd iteration of the winning restart.
  std::vector<double> wcss_trace;
};

/// Lloyd's algorithm with k-means++ seeding; best of `restarts` by WCSS.
/// Operates on `points` as given (no standardization).
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int restarts = 10, int max_iter = 300);

/// Per-point silhouette; points in singleton clusters score 0.
std::vector<double> silhouette_values(const Matrix& points, const std::vector<int>& labels);
double mean_silhouette(const Matrix& points, const std::vector<int>& labels);

struct ClusterAssignment {
  std::vector<std::string> names;
  std::vector<int> cluster;
  int k = 0;
  double silhouette_mean = 0.0;

  int cluster_of(const std::string& name) const;
};

/// Standardizes the table, then clusters its rows.
ClusterAssignment cluster_properties(const PropertyTable& table, int k, std::uint64_t seed, int restarts = 10);

struct SilhouetteScan {
  std::vector<int> ks;
  std::vector<double> mean_silhouette;
  int chosen_k = 0;
  ClusterAssignment best;
};

/// Tries every K in [k_min, min(k_max, rows - 1)] and keeps the K with the
/// highest mean silhouette (ties go to the smaller K).
SilhouetteScan silhouette_scan(const PropertyTable& table, std::uint64_t seed, int k_min = 2, int k_max = 10,
                               int restarts = 10);

std::string cluster_csv(const ClusterAssignment& c);
ClusterAssignment read_cluster_csv(const std::filesystem::path& path);
std::string silhouette_scan_csv(const SilhouetteScan& scan);

}  // namespace exirt
