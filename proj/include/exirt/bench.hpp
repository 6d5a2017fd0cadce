#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exirt/analytics.hpp"
#include "exirt/clustering.hpp"
#include "exirt/dataset.hpp"
#include "exirt/ensemble.hpp"
#include "exirt/explainer.hpp"
#include "exirt/rank.hpp"

namespace exirt {

inline const std::vector<std::string> kAllMeasures{"exirt", "permutation", "loco", "infogain"};

struct BenchConfig {
  std::uint64_t seed = 42;
  double test_fraction = 0.3;
  std::vector<Family> families{Family::random_forest, Family::gradient_boosting};
  std::vector<std::string> measures = kAllMeasures;
  ExplainConfig explain;
  int permutation_repeats = 5;
  std::map<Family, Hyperparameters> hyper{
      {Family::random_forest, Hyperparameters::random_forest_defaults()},
      {Family::gradient_boosting, Hyperparameters::gradient_boosting_defaults()}};
  int clusters = 0;  // 0: choose K by silhouette
  int kmeans_restarts = 10;
  int jobs = 1;
};

struct DatasetEntry {
  std::string name;
  std::string path;  // as written in the manifest
  std::filesystem::path resolved;
  std::string label;
};

struct Manifest {
  BenchConfig config;
  std::vector<DatasetEntry> datasets;
};

/// key = value lines, then a [datasets] section of "name path label" lines.
/// Relative dataset paths resolve against `base_dir`.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

void validate_measure(const std::string& measure);

/// One measure on one trained model. `exirt_report` receives the full IRT
/// report when the measure is exirt.
AttributeRank run_measure(const std::string& measure, const TrainedEnsemble& model, const Dataset& train,
                          const Dataset& test, const BenchConfig& cfg, ExplainReport* exirt_report = nullptr);

struct FamilyRun {
  Family family = Family::random_forest;
  TrainedEnsemble model;
  double test_accuracy = 0.0;
  std::vector<AttributeRank> ranks;  // in cfg.measures order
  CorrelationMatrix correlation;
  std::optional<ExplainReport> exirt;
};

/// Train one family on the split and run every configured measure.
FamilyRun run_family(const Dataset& train, const Dataset& test, Family family, const BenchConfig& cfg);

/// Writes model.json, correlation.csv and {measure}/rank.csv (plus the exirt
/// report files) under `dir`.
void write_family_run(const FamilyRun& run, const std::filesystem::path& dir);

/// Clusters a property table and writes clusters, silhouette scan, binarized
/// table and MCA outputs into `dir`. `k` = 0 scans K by silhouette.
ClusterAssignment write_cluster_outputs(const PropertyTable& table, int k, std::uint64_t seed, int restarts,
                                        const std::filesystem::path& dir);

struct TrainOptions {
  std::filesystem::path dataset;
  std::string label;
  Family family = Family::random_forest;
  Hyperparameters hyper = Hyperparameters::random_forest_defaults();
  std::uint64_t seed = 42;
  double test_fraction = 0.3;
  std::filesystem::path out;  // model file
};

struct ExplainOptions {
  std::filesystem::path model;
  std::filesystem::path dataset;
  std::string label;
  std::string measure = "exirt";
  BenchConfig config;  // seed, test_fraction, explain, permutation_repeats
  std::filesystem::path out;  // directory
};

struct ClusterOptions {
  std::filesystem::path input;  // property CSV or directory of dataset CSVs
  std::string label;            // for directories; empty means last column
  int k = 0;
  std::uint64_t seed = 42;
  int restarts = 10;
  std::filesystem::path out;
};

/// Returns the held-out accuracy of the trained model.
double cmd_train(const TrainOptions& opt);
void cmd_explain(const ExplainOptions& opt);
/// Returns the process exit code: 0 only if every dataset x family job succeeded.
int cmd_benchmark(const std::filesystem::path& manifest, const std::filesystem::path& out,
                  std::optional<int> jobs = std::nullopt);
ClusterAssignment cmd_cluster(const ClusterOptions& opt);
void cmd_report(const std::filesystem::path& bench_dir, const std::filesystem::path& out);

}  // namespace exirt
