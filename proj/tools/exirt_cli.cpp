#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "exirt/bench.hpp"
#include "exirt/log.hpp"

namespace fs = std::filesystem;
using namespace exirt;

namespace {

fs::path default_out_root() {
  const char* env = std::getenv("EXIRT_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path("out");
}

log::Level parse_level(const std::string& s) {
  if (s == "debug") return log::Level::debug;
  if (s == "info") return log::Level::info;
  if (s == "warn") return log::Level::warn;
  if (s == "error") return log::Level::error;
  if (s == "off") return log::Level::off;
  throw Error("unknown log level: " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute relevance for tree ensembles via item response theory, plus a rank benchmark"};
  app.require_subcommand(1);
  std::string level = "warn";
  app.add_option("--log-level", level, "debug, info, warn, error or off")->capture_default_str();

  const fs::path root = default_out_root();

  // train
  TrainOptions topt;
  topt.out = root / "model.json";
  std::string family = "rf";
  Hyperparameters hyper;
  int n_trees = -1, max_depth = -1, min_leaf = -1, max_features = -1;
  double learning_rate = -1;
  auto* train_cmd = app.add_subcommand("train", "train a model on the training split of a CSV");
  train_cmd->add_option("--data", topt.dataset, "dataset CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--label", topt.label, "label column")->required();
  train_cmd->add_option("--family", family, "rf or gb")->capture_default_str();
  train_cmd->add_option("--n-trees", n_trees, "number of trees");
  train_cmd->add_option("--max-depth", max_depth, "maximum tree depth");
  train_cmd->add_option("--min-leaf", min_leaf, "minimum rows per leaf");
  train_cmd->add_option("--learning-rate", learning_rate, "gradient boosting shrinkage");
  train_cmd->add_option("--max-features", max_features, "attributes tried per split (0: sqrt for rf, all for gb)");
  train_cmd->add_option("--seed", topt.seed, "split and training seed")->capture_default_str();
  train_cmd->add_option("--test-fraction", topt.test_fraction, "held-out share")->capture_default_str();
  train_cmd->add_option("--out", topt.out, "model file")->capture_default_str();

  // explain
  ExplainOptions eopt;
  eopt.out = root / "explain";
  std::string kinds = "negate,binning", search = "golden";
  auto* explain_cmd = app.add_subcommand("explain", "rank the attributes of a trained model");
  explain_cmd->add_option("--model", eopt.model, "model file")->required()->check(CLI::ExistingFile);
  explain_cmd->add_option("--data", eopt.dataset, "dataset CSV used for training")->required()->check(CLI::ExistingFile);
  explain_cmd->add_option("--label", eopt.label, "label column")->required();
  explain_cmd->add_option("--measure", eopt.measure, "exirt, permutation, loco or infogain")->capture_default_str();
  explain_cmd->add_option("--kinds", kinds, "comma-separated input variations")->capture_default_str();
  explain_cmd->add_option("--max-arity", eopt.config.explain.max_arity, "largest perturbed attribute set")
      ->capture_default_str();
  explain_cmd->add_option("--search", search, "ability search method")->capture_default_str();
  explain_cmd->add_option("--repeats", eopt.config.permutation_repeats, "permutation repeats")->capture_default_str();
  explain_cmd->add_option("--seed", eopt.config.seed, "seed; must match the one used for train")
      ->capture_default_str();
  explain_cmd->add_option("--test-fraction", eopt.config.test_fraction, "held-out share")->capture_default_str();
  explain_cmd->add_option("--out", eopt.out, "output directory")->capture_default_str();

  // benchmark
  fs::path manifest, bench_out = root / "benchmark";
  int jobs = 0;
  auto* bench_cmd = app.add_subcommand("benchmark", "run every dataset x family x measure in a manifest");
  bench_cmd->add_option("manifest", manifest, "manifest file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench_out, "output directory")->capture_default_str();
  bench_cmd->add_option("--jobs", jobs, "concurrent dataset x family jobs (default: manifest value)");

  // cluster
  ClusterOptions copt;
  copt.out = root / "clusters";
  auto* cluster_cmd = app.add_subcommand("cluster", "cluster datasets by meta-properties and run MCA");
  cluster_cmd->add_option("input", copt.input, "property CSV or directory of dataset CSVs")
      ->required()
      ->check(CLI::ExistingPath);
  cluster_cmd->add_option("--label", copt.label, "label column for dataset CSVs (default: last column)");
  cluster_cmd->add_option("--k", copt.k, "number of clusters (0: choose by silhouette)")->capture_default_str();
  cluster_cmd->add_option("--seed", copt.seed, "k-means seed")->capture_default_str();
  cluster_cmd->add_option("--restarts", copt.restarts, "k-means restarts")->capture_default_str();
  cluster_cmd->add_option("--out", copt.out, "output directory")->capture_default_str();

  // report
  fs::path report_in, report_out;
  auto* report_cmd = app.add_subcommand("report", "item-parameter and correlation reports for a benchmark run");
  report_cmd->add_option("bench_dir", report_in, "benchmark output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  report_cmd->add_option("--out", report_out, "output directory (default: <bench_dir>/report)");

  CLI11_PARSE(app, argc, argv);

  try {
    log::set_level(parse_level(level));
    if (*train_cmd) {
      topt.family = family_from_string(family);
      topt.hyper = Hyperparameters::defaults(topt.family);
      if (n_trees >= 0) topt.hyper.n_trees = n_trees;
      if (max_depth >= 0) topt.hyper.max_depth = max_depth;
      if (min_leaf >= 0) topt.hyper.min_leaf = min_leaf;
      if (max_features >= 0) topt.hyper.max_features = max_features;
      if (learning_rate >= 0) topt.hyper.learning_rate = learning_rate;
      const double acc = cmd_train(topt);
      std::cout << fmt::format("model written to {} (test accuracy {:.4f})\n", topt.out.string(), acc);
    } else if (*explain_cmd) {
      eopt.config.explain.kinds = parse_variation_kinds(kinds);
      eopt.config.explain.search = search_method_from_string(search);
      cmd_explain(eopt);
      std::cout << fmt::format("{} rank written to {}\n", eopt.measure, (eopt.out / "rank.csv").string());
    } else if (*bench_cmd) {
      const int code = cmd_benchmark(manifest, bench_out, jobs > 0 ? std::optional<int>(jobs) : std::nullopt);
      std::cout << fmt::format("benchmark {} -> {}\n", code == 0 ? "ok" : "FAILED", bench_out.string());
      return code;
    } else if (*cluster_cmd) {
      const auto c = cmd_cluster(copt);
      std::cout << fmt::format("K = {} (mean silhouette {:.4f}) -> {}\n", c.k, c.silhouette_mean, copt.out.string());
    } else if (*report_cmd) {
      if (report_out.empty()) report_out = report_in / "report";
      cmd_report(report_in, report_out);
      std::cout << fmt::format("report written to {}\n", report_out.string());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
