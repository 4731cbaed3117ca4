// forest-share: simplify, evaluate, inspect and generate decision-forest models.
//
// Exit codes: 0 success, 1 input/parse error, 2 usage or configuration conflict.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "forest_share/forest_share.hpp"

namespace fs = forest_share;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp + "'");
    out << content;
    if (!out.flush()) throw InputError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InputError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

struct DataFlags {
  std::string label_col;
  bool no_header = false;

  fs::CsvOptions options(std::optional<std::size_t> features) const {
    fs::CsvOptions o;
    o.has_header = !no_header;
    if (!label_col.empty()) o.label_column = label_col;
    o.expected_features = features;
    return o;
  }

  void add(CLI::App* cmd) {
    cmd->add_option("--label-col", label_col, "Label column name or zero-based index (default: last extra column)");
    cmd->add_flag("--no-header", no_header, "CSV has no header row");
  }
};

struct SharingFlags {
  std::string method = "exact";
  double sigma = 0.0;
  double exception_ratio = 0.0;
  std::size_t k = 0;
  bool per_tree = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--method", method, "exact | sigma | exceptions | kmeans")
        ->check(CLI::IsMember({"exact", "sigma", "exceptions", "kmeans"}));
    cmd->add_option("--sigma", sigma, "Path-changeable rate in [0,1) (method sigma; sweep 0,.1,..,.5)");
    cmd->add_option("--exception-ratio", exception_ratio,
                    "Per-feature exception budget c/p in [0,1) (method exceptions; sweep 0,.1,..,.5)");
    cmd->add_option("--k", k, "Clusters per feature (method kmeans; sweep 2..128)");
    cmd->add_flag("--per-tree-samples", per_tree, "Constrain each tree only on its bootstrap rows");
  }

  fs::SharingConfig config() const {
    fs::SharingConfig c;
    c.method = *fs::parse_method(method);
    c.sigma = sigma;
    c.exception_ratio = exception_ratio;
    c.k = k;
    c.scope = per_tree ? fs::SampleScope::per_tree : fs::SampleScope::all_rows;
    c.validate();
    return c;
  }
};

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content << '\n';
  else
    write_atomically(path, content + "\n");
}

int run_simplify(const std::string& model_path, const std::string& data_path, const std::string& test_path,
                 const std::string& out_path, const std::string& report_path, const DataFlags& data_flags,
                 const SharingFlags& sharing_flags) {
  const fs::SharingConfig config = sharing_flags.config();
  const fs::Forest forest = fs::load_model_file(model_path);
  const fs::Dataset train = fs::read_csv_file(data_path, data_flags.options(forest.n_features));
  std::optional<fs::Dataset> test;
  if (!test_path.empty()) test = fs::read_csv_file(test_path, data_flags.options(forest.n_features));

  const auto start = std::chrono::steady_clock::now();
  const fs::SharingResult result = fs::simplify(forest, train, config);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!out_path.empty()) write_atomically(out_path, fs::save_model(result.forest) + "\n");
  const auto report = fs::build_report(forest, result.forest, train, test ? &*test : nullptr, config, elapsed);
  emit(report_path, fs::report_to_json(report).dump(2));
  return 0;
}

int run_evaluate(const std::string& model_path, const std::string& data_path, const DataFlags& data_flags) {
  const fs::Forest forest = fs::load_model_file(model_path);
  nlohmann::json j;
  j["ndc"] = fs::count_distinct_conditions(forest);
  j["trees"] = forest.trees.size();
  if (!data_path.empty()) {
    const fs::Dataset data = fs::read_csv_file(data_path, data_flags.options(forest.n_features));
    j["rows"] = data.size();
    if (data.has_labels())
      j["accuracy"] = fs::accuracy(forest, data);
    else
      j["accuracy"] = nullptr;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int run_inspect(const std::string& model_path) {
  const fs::Forest forest = fs::load_model_file(model_path);
  nlohmann::json j;
  j["task"] = forest.task == fs::Task::classification ? "classification" : "regression";
  j["n_features"] = forest.n_features;
  j["trees"] = forest.trees.size();
  j["internal_nodes"] = forest.internal_count();
  j["ndc"] = fs::count_distinct_conditions(forest);
  j["ndc_per_feature"] = fs::distinct_conditions_per_feature(forest);
  j["has_bootstrap_indices"] = forest.bootstrap_indices.has_value();
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct FixtureFlags {
  std::string preset;
  std::size_t n = 200;
  std::size_t d = 5;
  std::size_t trees = 20;
  std::size_t depth = 4;
  std::size_t classes = 2;
  std::size_t max_features = 0;
  std::string task = "classification";
  std::uint64_t seed = 0;
  bool no_bootstrap = false;
  std::string out_model;
  std::string out_data;
  std::string out_bootstrap;
};

int run_fixture(const FixtureFlags& f) {
  fs::Forest forest;
  fs::Dataset data;
  if (f.preset == "example1") {
    forest = fs::fixtures::example1_forest();
    data = fs::fixtures::example1_dataset();
  } else {
    const fs::Task task = f.task == "regression" ? fs::Task::regression : fs::Task::classification;
    data = fs::fixtures::synthetic_dataset(f.n, f.d, task, f.seed, f.classes);
    fs::CartParams params;
    params.task = task;
    params.n_trees = f.trees;
    params.max_depth = f.depth;
    params.bootstrap = !f.no_bootstrap;
    params.seed = f.seed;
    params.max_features = f.max_features;
    forest = fs::fit_cart_forest(data, params).forest;
  }
  write_atomically(f.out_model, fs::save_model(forest) + "\n");
  if (!f.out_data.empty()) {
    std::ostringstream csv;
    fs::write_csv(csv, data);
    write_atomically(f.out_data, csv.str());
  }
  if (!f.out_bootstrap.empty()) {
    nlohmann::json j = forest.bootstrap_indices ? nlohmann::json(*forest.bootstrap_indices) : nlohmann::json::array();
    write_atomically(f.out_bootstrap, j.dump() + "\n");
  }
  return 0;
}

struct CrossvalFlags {
  std::string data;
  std::string task = "classification";
  std::size_t folds = 5;
  std::size_t trees = 20;
  std::size_t depth = 6;
  std::size_t max_features = 0;
  bool no_bootstrap = false;
  std::uint64_t seed = 0;
  std::string report;
  std::string csv;
};

int run_crossval(const CrossvalFlags& f, const DataFlags& data_flags, const SharingFlags& sharing_flags) {
  const fs::SharingConfig config = sharing_flags.config();
  const fs::Dataset data = fs::read_csv_file(f.data, data_flags.options(std::nullopt));
  if (!data.has_labels()) throw InputError("crossval requires a label column");
  const auto assignment = fs::kfold_split(data.size(), f.folds, f.seed);

  std::vector<fs::SimplificationReport> reports;
  std::string csv = fs::report_csv_header() + ",fold\n";
  for (std::size_t k = 0; k < f.folds; ++k) {
    const auto train_rows = fs::fold_rows(assignment, k, false);
    const auto test_rows = fs::fold_rows(assignment, k, true);
    const fs::Dataset train = data.subset(train_rows);
    const fs::Dataset test = data.subset(test_rows);
    fs::CartParams params;
    params.task = f.task == "regression" ? fs::Task::regression : fs::Task::classification;
    params.n_trees = f.trees;
    params.max_depth = f.depth;
    params.bootstrap = !f.no_bootstrap;
    params.max_features = f.max_features;
    params.seed = f.seed + k;
    const fs::Forest forest = fs::fit_cart_forest(train, params).forest;

    const auto start = std::chrono::steady_clock::now();
    const auto result = fs::simplify(forest, train, config);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    reports.push_back(fs::build_report(forest, result.forest, train, &test, config, elapsed));
    csv += fs::report_csv_row(reports.back()) + "," + std::to_string(k) + "\n";
  }
  nlohmann::json j = fs::mean_report_json(reports);
  j["per_fold"] = nlohmann::json::array();
  for (const auto& r : reports) j["per_fold"].push_back(fs::report_to_json(r));
  emit(f.report, j.dump(2));
  if (!f.csv.empty()) write_atomically(f.csv, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Share branching conditions across the trees of a decision forest"};
  app.require_subcommand(1);

  std::string model_path, data_path, test_path, out_path, report_path;
  DataFlags data_flags;
  SharingFlags sharing_flags;
  std::uint64_t seed = 0;

  auto* simplify = app.add_subcommand("simplify", "Share thresholds and write the simplified model + report");
  simplify->add_option("-m,--model", model_path, "Input model JSON")->required();
  simplify->add_option("-d,--data", data_path, "Training CSV (feature vectors constraining the paths)")->required();
  simplify->add_option("-o,--output", out_path, "Simplified model JSON");
  simplify->add_option("--test", test_path, "Test CSV for accuracy ratios (default: training CSV)");
  simplify->add_option("--report", report_path, "Report JSON path (default: standard output)");
  simplify->add_option("--seed", seed, "Seed (sharing itself is deterministic)");
  data_flags.add(simplify);
  sharing_flags.add(simplify);

  auto* evaluate = app.add_subcommand("evaluate", "Print NDC and accuracy of a model");
  evaluate->add_option("-m,--model", model_path, "Model JSON")->required();
  evaluate->add_option("-d,--data", data_path, "Labelled CSV");
  evaluate->add_option("--seed", seed, "Unused; accepted for uniformity");
  data_flags.add(evaluate);

  auto* inspect = app.add_subcommand("inspect", "Print structural statistics of a model");
  inspect->add_option("-m,--model", model_path, "Model JSON")->required();

  FixtureFlags fixture_flags;
  auto* fixture = app.add_subcommand("fixture", "Generate a synthetic dataset and a CART forest fitted to it");
  fixture->add_option("--preset", fixture_flags.preset, "Named fixture instead of a synthetic one")
      ->check(CLI::IsMember({"example1"}));
  fixture->add_option("--n", fixture_flags.n, "Rows");
  fixture->add_option("--d", fixture_flags.d, "Features");
  fixture->add_option("--trees", fixture_flags.trees, "Trees");
  fixture->add_option("--depth", fixture_flags.depth, "Maximum depth");
  fixture->add_option("--classes", fixture_flags.classes, "Classes (classification)");
  fixture->add_option("--max-features", fixture_flags.max_features, "Features tried per split (0 = all)");
  fixture->add_option("--task", fixture_flags.task, "classification | regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  fixture->add_option("--seed", fixture_flags.seed, "Seed");
  fixture->add_flag("--no-bootstrap", fixture_flags.no_bootstrap, "Fit every tree on all rows");
  fixture->add_option("--out-model", fixture_flags.out_model, "Model JSON path")->required();
  fixture->add_option("--out-data", fixture_flags.out_data, "Training CSV path");
  fixture->add_option("--out-bootstrap", fixture_flags.out_bootstrap, "Bootstrap indices JSON path");

  CrossvalFlags cv_flags;
  auto* crossval = app.add_subcommand("crossval", "k-fold train / simplify / evaluate with the CART trainer");
  crossval->add_option("-d,--data", cv_flags.data, "Labelled CSV")->required();
  crossval->add_option("--task", cv_flags.task, "classification | regression")
      ->check(CLI::IsMember({"classification", "regression"}));
  crossval->add_option("--folds", cv_flags.folds, "Folds");
  crossval->add_option("--trees", cv_flags.trees, "Trees per forest");
  crossval->add_option("--depth", cv_flags.depth, "Maximum depth");
  crossval->add_option("--max-features", cv_flags.max_features, "Features tried per split (0 = all)");
  crossval->add_flag("--no-bootstrap", cv_flags.no_bootstrap, "Fit every tree on all rows");
  crossval->add_option("--seed", cv_flags.seed, "Seed for folds and training");
  crossval->add_option("--report", cv_flags.report, "Report JSON path (default: standard output)");
  crossval->add_option("--csv", cv_flags.csv, "Per-fold CSV rows");
  data_flags.add(crossval);
  sharing_flags.add(crossval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simplify)
      return run_simplify(model_path, data_path, test_path, out_path, report_path, data_flags, sharing_flags);
    if (*evaluate) return run_evaluate(model_path, data_path, data_flags);
    if (*inspect) return run_inspect(model_path);
    if (*fixture) return run_fixture(fixture_flags);
    if (*crossval) return run_crossval(cv_flags, data_flags, sharing_flags);
  } catch (const fs::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
