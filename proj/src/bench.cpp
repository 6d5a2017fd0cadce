#include "exirt/bench.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "exirt/baselines.hpp"
#include "exirt/item_report.hpp"
#include "exirt/log.hpp"
#include "exirt/mca.hpp"
#include "exirt/svg.hpp"

namespace exirt {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long parse_int(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw Error(fmt::format("manifest: '{}' expects an integer, got '{}'", key, v));
  return x;
}

double parse_double(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw Error(fmt::format("manifest: '{}' expects a number, got '{}'", key, v));
  return x;
}

void set_hyper(Hyperparameters& h, const std::string& field, const std::string& v, const std::string& key) {
  if (field == "n_trees") h.n_trees = static_cast<int>(parse_int(v, key));
  else if (field == "max_depth") h.max_depth = static_cast<int>(parse_int(v, key));
  else if (field == "min_leaf") h.min_leaf = static_cast<int>(parse_int(v, key));
  else if (field == "max_features") h.max_features = static_cast<int>(parse_int(v, key));
  else if (field == "learning_rate") h.learning_rate = parse_double(v, key);
  else throw Error(fmt::format("manifest: unknown hyperparameter '{}'", key));
}

void apply_key(BenchConfig& c, const std::string& key, const std::string& v) {
  if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_int(v, key));
  } else if (key == "test_fraction") {
    c.test_fraction = parse_double(v, key);
  } else if (key == "families") {
    c.families.clear();
    for (const auto& f : split_list(v)) c.families.push_back(family_from_string(f));
  } else if (key == "measures") {
    c.measures = split_list(v);
    for (const auto& m : c.measures) validate_measure(m);
  } else if (key == "kinds") {
    c.explain.kinds = parse_variation_kinds(v);
  } else if (key == "max_arity") {
    c.explain.max_arity = static_cast<int>(parse_int(v, key));
  } else if (key == "search") {
    c.explain.search = search_method_from_string(v);
  } else if (key == "bins") {
    c.explain.variation.bins = static_cast<int>(parse_int(v, key));
  } else if (key == "noise_scale") {
    c.explain.variation.noise_scale = parse_double(v, key);
  } else if (key == "irt.quadrature_points") {
    c.explain.irt.quadrature_points = static_cast<int>(parse_int(v, key));
  } else if (key == "irt.max_iter") {
    c.explain.irt.max_iter = static_cast<int>(parse_int(v, key));
  } else if (key == "irt.tol") {
    c.explain.irt.tol = parse_double(v, key);
  } else if (key == "irt.priors") {
    if (v != "on" && v != "off") throw Error("manifest: irt.priors expects on or off");
    c.explain.irt.priors.enabled = v == "on";
  } else if (key == "permutation_repeats") {
    c.permutation_repeats = static_cast<int>(parse_int(v, key));
  } else if (key == "clusters") {
    c.clusters = v == "auto" ? 0 : static_cast<int>(parse_int(v, key));
  } else if (key == "kmeans_restarts") {
    c.kmeans_restarts = static_cast<int>(parse_int(v, key));
  } else if (key == "jobs") {
    c.jobs = static_cast<int>(parse_int(v, key));
  } else if (key.rfind("rf.", 0) == 0) {
    set_hyper(c.hyper[Family::random_forest], key.substr(3), v, key);
  } else if (key.rfind("gb.", 0) == 0) {
    set_hyper(c.hyper[Family::gradient_boosting], key.substr(3), v, key);
  } else {
    throw Error(fmt::format("manifest: unknown key '{}'", key));
  }
}

}  // namespace

void validate_measure(const std::string& measure) {
  if (std::find(kAllMeasures.begin(), kAllMeasures.end(), measure) == kAllMeasures.end())
    throw Error(fmt::format("unknown measure '{}' (expected exirt, permutation, loco or infogain)", measure));
}

Manifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  Manifest m;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool in_datasets = false;
  std::set<std::string> names;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    try {
      if (line == "[datasets]") {
        in_datasets = true;
        continue;
      }
      if (line.front() == '[') throw Error(fmt::format("unknown section {}", line));
      if (!in_datasets) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("expected key = value");
        apply_key(m.config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        continue;
      }
      std::istringstream fields(line);
      DatasetEntry d;
      std::string extra;
      if (!(fields >> d.name >> d.path >> d.label) || (fields >> extra))
        throw Error("dataset lines need exactly: name path label");
      if (!names.insert(d.name).second) throw Error(fmt::format("duplicate dataset name '{}'", d.name));
      d.resolved = fs::path(d.path).is_absolute() ? fs::path(d.path) : base_dir / d.path;
      m.datasets.push_back(std::move(d));
    } catch (const Error& e) {
      throw Error(fmt::format("manifest line {}: {}", lineno, e.what()));
    }
  }
  const auto& c = m.config;
  if (m.datasets.empty()) throw Error("manifest lists no datasets");
  if (c.families.empty()) throw Error("manifest: families is empty");
  if (c.measures.empty()) throw Error("manifest: measures is empty");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) throw Error("manifest: test_fraction must be in (0, 1)");
  if (c.jobs < 1) throw Error("manifest: jobs must be >= 1");
  if (c.permutation_repeats < 1) throw Error("manifest: permutation_repeats must be >= 1");
  if (c.clusters < 0) throw Error("manifest: clusters must be auto or a positive integer");
  return m;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

AttributeRank run_measure(const std::string& measure, const TrainedEnsemble& model, const Dataset& train,
                          const Dataset& test, const BenchConfig& cfg, ExplainReport* exirt_report) {
  if (measure == "exirt") {
    ExplainConfig ec = cfg.explain;
    ec.base_seed = cfg.seed;
    auto report = explain(model, train, test, ec);
    auto rank = report.rank;
    if (exirt_report) *exirt_report = std::move(report);
    return rank;
  }
  if (measure == "permutation") return permutation_importance_rank(model, test, cfg.permutation_repeats, cfg.seed);
  if (measure == "loco") return loco_rank(train, test, model.family, model.hyper, model.training_seed);
  if (measure == "infogain") return info_gain_rank(train);
  validate_measure(measure);
  return {};
}

FamilyRun run_family(const Dataset& train_set, const Dataset& test_set, Family family, const BenchConfig& cfg) {
  FamilyRun run;
  run.family = family;
  const auto it = cfg.hyper.find(family);
  const Hyperparameters hyper = it == cfg.hyper.end() ? Hyperparameters::defaults(family) : it->second;
  run.model = train(family, train_set, hyper, cfg.seed);
  run.test_accuracy = accuracy(run.model, test_set.features(), test_set.labels);
  for (const auto& m : cfg.measures) {
    try {
      if (m == "exirt") {
        ExplainReport report;
        run.ranks.push_back(run_measure(m, run.model, train_set, test_set, cfg, &report));
        run.exirt = std::move(report);
      } else {
        run.ranks.push_back(run_measure(m, run.model, train_set, test_set, cfg));
      }
    } catch (const Error& e) {
      throw Error(fmt::format("measure {}: {}", m, e.what()));
    }
  }
  run.correlation = correlation_matrix(run.ranks);
  return run;
}

void write_family_run(const FamilyRun& run, const fs::path& dir) {
  save_model(run.model, dir / "model.json");
  for (const auto& rank : run.ranks) {
    if (rank.measure == "exirt" && run.exirt) export_report(*run.exirt, dir / "exirt");
    else write_file_atomic(dir / rank.measure / "rank.csv", rank_csv(rank));
  }
  run.correlation.validate();
  write_file_atomic(dir / "correlation.csv", correlation_csv(run.correlation));
}

ClusterAssignment write_cluster_outputs(const PropertyTable& table, int k, std::uint64_t seed, int restarts,
                                        const fs::path& dir) {
  const std::size_t n = table.row_names.size();
  ClusterAssignment clusters;
  if (k > 0) {
    clusters = cluster_properties(table, k, seed, restarts);
  } else if (n >= 3) {
    const auto scan = silhouette_scan(table, seed, 2, 10, restarts);
    write_file_atomic(dir / "silhouette_scan.csv", silhouette_scan_csv(scan));
    std::vector<double> ks(scan.ks.begin(), scan.ks.end());
    write_file_atomic(dir / "silhouette_scan.svg",
                      svg::line_chart("Mean silhouette by K", ks, {{"mean silhouette", scan.mean_silhouette}}, "K",
                                      "mean silhouette"));
    clusters = scan.best;
  } else {
    log::warn(fmt::format("only {} dataset(s): all assigned to cluster 0", n));
    clusters.names = table.row_names;
    clusters.cluster.assign(n, 0);
    clusters.k = 1;
  }
  write_file_atomic(dir / "clusters.csv", cluster_csv(clusters));

  if (n >= 2) {
    const auto binary = binarize_properties(table);
    write_file_atomic(dir / "properties_binary.csv", binary_table_csv(binary));
    const auto result = mca(binary);
    write_file_atomic(dir / "mca_rows.csv", mca_rows_csv(result));
    write_file_atomic(dir / "mca_columns.csv", mca_columns_csv(result));
    std::ostringstream inertia;
    inertia << "component,inertia\n";
    for (std::size_t i = 0; i < result.inertias.size(); ++i)
      inertia << i << ',' << format_number(result.inertias[i]) << '\n';
    write_file_atomic(dir / "mca_inertia.csv", inertia.str());
    write_file_atomic(dir / "mca.svg", mca_svg(result));
  }
  return clusters;
}

namespace {

std::pair<Dataset, Dataset> load_split(const fs::path& path, const std::string& label, double fraction,
                                       std::uint64_t seed) {
  const Dataset ds = load_csv(path, label);
  return split(ds, fraction, seed);
}

std::string last_header_column(const fs::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows.front().empty()) throw Error("empty CSV: " + path.string());
  return rows.front().back();
}

ojson hyper_json(const Hyperparameters& h) {
  return ojson{{"n_trees", h.n_trees},
               {"max_depth", h.max_depth},
               {"min_leaf", h.min_leaf},
               {"learning_rate", h.learning_rate},
               {"max_features", h.max_features}};
}

ojson config_json(const BenchConfig& c) {
  ojson j;
  j["seed"] = c.seed;
  j["test_fraction"] = c.test_fraction;
  ojson fams = ojson::array();
  for (auto f : c.families) fams.push_back(std::string(to_string(f)));
  j["families"] = fams;
  j["measures"] = c.measures;
  ojson kinds = ojson::array();
  for (auto k : c.explain.kinds) kinds.push_back(std::string(to_string(k)));
  j["kinds"] = kinds;
  j["max_arity"] = c.explain.max_arity;
  j["search"] = std::string(to_string(c.explain.search));
  j["bins"] = c.explain.variation.bins;
  j["noise_scale"] = c.explain.variation.noise_scale;
  const auto& irt = c.explain.irt;
  j["irt"] = ojson{{"quadrature_points", irt.quadrature_points},
                   {"max_iter", irt.max_iter},
                   {"tol", irt.tol},
                   {"priors", irt.priors.enabled ? "on" : "off"},
                   {"a_log_mean", irt.priors.a_log_mean},
                   {"a_log_sd", irt.priors.a_log_sd},
                   {"c_alpha", irt.priors.c_alpha},
                   {"c_beta", irt.priors.c_beta}};
  j["permutation_repeats"] = c.permutation_repeats;
  ojson hyper;
  for (auto f : c.families) {
    const auto it = c.hyper.find(f);
    hyper[std::string(to_string(f))] = hyper_json(it == c.hyper.end() ? Hyperparameters::defaults(f) : it->second);
  }
  j["hyperparameters"] = hyper;
  j["clusters"] = c.clusters == 0 ? ojson("auto") : ojson(c.clusters);
  j["kmeans_restarts"] = c.kmeans_restarts;
  return j;
}

struct Job {
  std::size_t dataset;
  Family family;
  std::optional<FamilyRun> run;
  std::string error;
};

std::string pair_label(const std::string& a, const std::string& b) { return a + "~" + b; }

}  // namespace

double cmd_train(const TrainOptions& opt) {
  const auto [train_set, test_set] = load_split(opt.dataset, opt.label, opt.test_fraction, opt.seed);
  const auto model = train(opt.family, train_set, opt.hyper, opt.seed);
  save_model(model, opt.out);
  return accuracy(model, test_set.features(), test_set.labels);
}

void cmd_explain(const ExplainOptions& opt) {
  validate_measure(opt.measure);
  const auto model = load_model(opt.model);
  const auto [train_set, test_set] = load_split(opt.dataset, opt.label, opt.config.test_fraction, opt.config.seed);
  if (opt.measure == "exirt") {
    ExplainReport report;
    run_measure(opt.measure, model, train_set, test_set, opt.config, &report);
    export_report(report, opt.out);
  } else {
    write_file_atomic(opt.out / "rank.csv", rank_csv(run_measure(opt.measure, model, train_set, test_set, opt.config)));
  }
}

int cmd_benchmark(const fs::path& manifest_path, const fs::path& out, std::optional<int> jobs) {
  const Manifest manifest = load_manifest(manifest_path);
  const BenchConfig& cfg = manifest.config;
  const int workers = std::max(1, jobs.value_or(cfg.jobs));
  fs::create_directories(out);

  struct Loaded {
    std::optional<Dataset> full, train, test;
    std::string error;
  };
  std::vector<Loaded> loaded(manifest.datasets.size());
  for (std::size_t d = 0; d < manifest.datasets.size(); ++d) {
    const auto& entry = manifest.datasets[d];
    try {
      Dataset ds = load_csv(entry.resolved, entry.label);
      ds.name = entry.name;
      auto [tr, te] = split(ds, cfg.test_fraction, cfg.seed);
      loaded[d].full = std::move(ds);
      loaded[d].train = std::move(tr);
      loaded[d].test = std::move(te);
    } catch (const std::exception& e) {
      loaded[d].error = e.what();
      log::error(fmt::format("dataset {}: {}", entry.name, e.what()));
    }
  }

  std::vector<Job> work;
  for (std::size_t d = 0; d < loaded.size(); ++d)
    if (loaded[d].full)
      for (auto f : cfg.families) work.push_back({d, f, std::nullopt, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      Job& job = work[i];
      const auto& entry = manifest.datasets[job.dataset];
      try {
        log::info(fmt::format("{} / {}: training and explaining", entry.name, to_string(job.family)));
        auto run = run_family(*loaded[job.dataset].train, *loaded[job.dataset].test, job.family, cfg);
        write_family_run(run, out / entry.name / std::string(to_string(job.family)));
        job.run = std::move(run);
      } catch (const std::exception& e) {
        job.error = e.what();
        log::error(fmt::format("{} / {}: {}", entry.name, to_string(job.family), e.what()));
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), work.size());
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::pair<std::string, PropertyVector>> props;
  for (const auto& l : loaded)
    if (l.full) props.emplace_back(l.full->name, meta_features(*l.full));

  bool ok = true;
  ClusterAssignment clusters;
  if (!props.empty()) {
    const auto table = make_property_table(props);
    write_file_atomic(out / "properties.csv", property_table_csv(table));
    try {
      clusters = write_cluster_outputs(table, cfg.clusters, cfg.seed, cfg.kmeans_restarts, out / "clusters");
    } catch (const std::exception& e) {
      ok = false;
      log::error(fmt::format("clustering: {}", e.what()));
      clusters.names = table.row_names;
      clusters.cluster.assign(table.row_names.size(), 0);
      clusters.k = 1;
    }
  }

  std::ostringstream corr;
  corr << "dataset,family,cluster,measure_a,measure_b,rho,band\n";
  std::map<std::string, BoxGroup> groups;
  for (const auto& job : work) {
    if (!job.run) continue;
    const auto& name = manifest.datasets[job.dataset].name;
    const int cl = clusters.cluster_of(name);
    const auto& m = job.run->correlation;
    for (std::size_t i = 0; i < m.measures.size(); ++i)
      for (std::size_t j = i + 1; j < m.measures.size(); ++j) {
        const double rho = m.rho(i, j);
        corr << csv_escape(name) << ',' << to_string(job.family) << ',' << cl << ',' << m.measures[i] << ','
             << m.measures[j] << ',' << format_number(rho) << ',' << correlation_band(rho) << '\n';
        const auto label =
            fmt::format("{} / cluster {} / {}", pair_label(m.measures[i], m.measures[j]), cl, to_string(job.family));
        auto& g = groups[label];
        g.label = label;
        g.values.push_back(rho);
      }
  }
  write_file_atomic(out / "correlations.csv", corr.str());
  std::vector<BoxGroup> ordered;
  for (auto& [label, g] : groups) ordered.push_back(g);
  write_file_atomic(out / "correlation_boxplot.csv", boxplot_csv(ordered));
  write_file_atomic(out / "correlation_boxplot.svg",
                    boxplot_svg("Summary of rank correlations", ordered, "Spearman rho"));

  ojson run_manifest;
  run_manifest["schema_version"] = 1;
  run_manifest["config"] = config_json(cfg);
  ojson ds_json = ojson::array();
  for (std::size_t d = 0; d < manifest.datasets.size(); ++d) {
    const auto& entry = manifest.datasets[d];
    ojson j{{"name", entry.name}, {"path", entry.path}, {"label", entry.label}};
    if (!loaded[d].full) {
      j["status"] = "failed";
      j["error"] = loaded[d].error;
      ok = false;
    } else {
      j["rows"] = loaded[d].full->row_count();
      j["attributes"] = loaded[d].full->attribute_count();
      j["train_rows"] = loaded[d].train->row_count();
      j["test_rows"] = loaded[d].test->row_count();
      j["cluster"] = clusters.cluster_of(entry.name);
      ojson runs = ojson::array();
      bool all = true;
      for (const auto& job : work) {
        if (job.dataset != d) continue;
        ojson r{{"family", std::string(to_string(job.family))}};
        if (job.run) {
          r["status"] = "ok";
          r["training_seed"] = job.run->model.training_seed;
          r["test_accuracy"] = job.run->test_accuracy;
        } else {
          r["status"] = "failed";
          r["error"] = job.error;
          all = false;
        }
        runs.push_back(r);
      }
      j["status"] = all ? "ok" : "failed";
      j["runs"] = runs;
      ok = ok && all;
    }
    ds_json.push_back(j);
  }
  run_manifest["datasets"] = ds_json;
  run_manifest["cluster_k"] = clusters.k;
  run_manifest["status"] = ok ? "ok" : "failed";
  write_file_atomic(out / "run_manifest.json", run_manifest.dump(2) + "\n");

  std::size_t failed = 0;
  for (const auto& l : loaded) failed += l.full ? 0 : 1;
  for (const auto& job : work) failed += job.run ? 0 : 1;
  if (failed) log::error(fmt::format("benchmark finished with {} failed dataset/job(s)", failed));
  return ok ? 0 : 1;
}

ClusterAssignment cmd_cluster(const ClusterOptions& opt) {
  PropertyTable table;
  if (fs::is_directory(opt.input)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(opt.input))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::pair<std::string, PropertyVector>> props;
    for (const auto& f : files) {
      const std::string label = opt.label.empty() ? last_header_column(f) : opt.label;
      props.emplace_back(f.stem().string(), meta_features(load_csv(f, label)));
    }
    if (props.empty()) throw Error("no CSV datasets in " + opt.input.string());
    table = make_property_table(props);
    write_file_atomic(opt.out / "properties.csv", property_table_csv(table));
  } else {
    table = read_property_table(opt.input);
  }
  return write_cluster_outputs(table, opt.k, opt.seed, opt.restarts, opt.out);
}

void cmd_report(const fs::path& bench_dir, const fs::path& out) {
  const auto clusters = read_cluster_csv(bench_dir / "clusters" / "clusters.csv");
  std::set<std::string> families;
  std::map<std::string, std::map<std::string, ItemParameters>> by_family;
  for (const auto& name : clusters.names) {
    const fs::path ds_dir = bench_dir / name;
    if (!fs::is_directory(ds_dir)) continue;
    std::vector<fs::path> fams;
    for (const auto& e : fs::directory_iterator(ds_dir))
      if (e.is_directory()) fams.push_back(e.path());
    std::sort(fams.begin(), fams.end());
    for (const auto& f : fams) {
      const auto csv = f / "exirt" / "item_parameters.csv";
      if (fs::exists(csv)) by_family[f.filename().string()][name] = read_item_parameters_csv(csv);
    }
  }
  if (by_family.empty()) throw Error("no exirt item parameters under " + bench_dir.string());

  for (const auto& [family, params] : by_family) {
    const fs::path dir = out / family;
    const auto report = item_param_threshold_report(params, clusters);
    write_file_atomic(dir / "item_thresholds.csv", threshold_report_csv(report));
    write_file_atomic(dir / "item_thresholds.svg", threshold_report_svg(report));
    const auto curves = median_icc_curve(params, clusters);
    write_file_atomic(dir / "median_icc.csv", icc_curves_csv(curves));
    write_file_atomic(dir / "median_icc_params.csv", icc_params_csv(curves));
    write_file_atomic(dir / "median_icc.svg", icc_curves_svg(curves));
  }

  // Combined summary: correlation spread per family and cluster.
  const auto rows = read_csv(bench_dir / "correlations.csv");
  std::map<std::pair<std::string, int>, std::vector<double>> abs_rho;
  std::map<std::pair<std::string, int>, std::map<std::string, int>> bands;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 7) throw Error("correlations.csv row has wrong width");
    const std::pair<std::string, int> key{rows[r][1], std::stoi(rows[r][2])};
    abs_rho[key].push_back(std::abs(std::stod(rows[r][5])));
    bands[key][rows[r][6]] += 1;
  }
  std::ostringstream s;
  s << "family,cluster,pairs,median_abs_rho,high,moderate,insignificant\n";
  for (const auto& [key, vals] : abs_rho) {
    auto& b = bands[key];
    s << key.first << ',' << key.second << ',' << vals.size() << ',' << format_number(median(vals)) << ','
      << b["high"] << ',' << b["moderate"] << ',' << b["insignificant"] << '\n';
  }
  write_file_atomic(out / "summary.csv", s.str());
}

}  // namespace exirt
