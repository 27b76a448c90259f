#include "csecoc/csecoc.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Options {
  std::string data_dir = "data";
  std::string dataset;
  std::string datasets = "all";
  std::string method = "csecoc";
  std::string methods = "all";
  std::string learner = "knn";
  int knn_k = 5;
  std::optional<double> gamma;
  double ridge_lambda = 1.0;
  std::string decoding;
  int folds = 10;
  int repeats = 10;
  std::uint64_t seed = 42;
  double eps = 1e-9;
  bool standardize = false;
  bool leaky_matrix = false;
  int workers = 1;
  int random_candidates = 1000;
  std::string targets = "coverage";
  std::string out;
  std::string matrix_out;
  std::string matrix;
  std::string manifest;
  std::string input;
};

struct Failure {
  int exit_code;
  std::string message;
};

[[noreturn]] void config_error(const std::string& message) { throw Failure{kExitConfig, message}; }

void check(csecoc_status status, const std::string& context) {
  if (status == CSECOC_OK) return;
  const std::string msg = context + ": " + csecoc_last_error();
  throw Failure{status == CSECOC_ERR_INVALID_ARGUMENT ? kExitConfig : kExitRuntime, msg};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<csecoc_dataset, Deleter<csecoc_dataset, csecoc_dataset_free>>;
using MatrixPtr = std::unique_ptr<csecoc_matrix, Deleter<csecoc_matrix, csecoc_matrix_free>>;
using ModelPtr = std::unique_ptr<csecoc_model, Deleter<csecoc_model, csecoc_model_free>>;
using ReportPtr = std::unique_ptr<csecoc_report, Deleter<csecoc_report, csecoc_report_free>>;

DatasetPtr load_dataset(const Options& o) {
  if (o.dataset.empty()) config_error("--dataset is required");
  csecoc_dataset* ds = nullptr;
  check(csecoc_dataset_load(o.data_dir.c_str(), o.dataset.c_str(), &ds), "dataset '" + o.dataset + "'");
  return DatasetPtr(ds);
}

csecoc_matrix_options matrix_options(const Options& o) {
  csecoc_matrix_options m;
  csecoc_matrix_options_init(&m);
  m.eps = o.eps;
  m.standardize = o.standardize ? 1 : 0;
  m.seed = o.seed;
  m.random_candidates = o.random_candidates;
  m.targets = o.targets.c_str();
  return m;
}

csecoc_learner_options learner_options(const Options& o) {
  csecoc_learner_options l;
  csecoc_learner_options_init(&l);
  l.learner = o.learner.c_str();
  l.knn_k = o.knn_k;
  l.gamma = o.gamma.value_or(0.0);
  l.ridge_lambda = o.ridge_lambda;
  l.decoding = o.decoding.empty() ? nullptr : o.decoding.c_str();
  return l;
}

MatrixPtr read_matrix(const std::string& path) {
  csecoc_matrix* m = nullptr;
  check(csecoc_matrix_read(path.c_str(), nullptr, &m), "matrix '" + path + "'");
  return MatrixPtr(m);
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

void print_matrix(const csecoc_matrix* m, std::ostream& out) {
  for (int r = 0; r < csecoc_matrix_rows(m); ++r) {
    for (int l = 0; l < csecoc_matrix_cols(m); ++l) {
      char buf[32];
      const double v = csecoc_matrix_value(m, r, l);
      std::snprintf(buf, sizeof buf, "%8.4f", v == 0.0 ? 0.0 : v);
      out << buf;
    }
    out << '\n';
  }
}

int cmd_encode(const Options& o) {
  const auto ds = load_dataset(o);
  const auto mo = matrix_options(o);
  csecoc_matrix* raw = nullptr;
  check(csecoc_matrix_build(ds.get(), o.method.c_str(), &mo, &raw), "encode");
  const MatrixPtr m(raw);

  const std::string path = !o.matrix_out.empty() ? o.matrix_out : o.out;
  if (path.empty()) {
    const std::string tmp = (std::filesystem::temp_directory_path() / "csecoc_encode.csv").string();
    check(csecoc_matrix_write(m.get(), tmp.c_str()), "encode");
    std::ifstream in(tmp);
    std::cout << in.rdbuf();
    std::filesystem::remove(tmp);
  } else {
    check(csecoc_matrix_write(m.get(), path.c_str()), "encode");
    const std::string notes = with_suffix(path, ".partitions.csv");
    check(csecoc_matrix_write_notes(m.get(), notes.c_str()), "encode");
    std::cout << csecoc_matrix_kind(m.get()) << " matrix " << csecoc_matrix_rows(m.get()) << "x"
              << csecoc_matrix_cols(m.get()) << " -> " << path << " (partitions: " << notes << ")\n";
    print_matrix(m.get(), std::cout);
  }

  csecoc_report* rep = nullptr;
  check(csecoc_matrix_validate(m.get(), &rep), "validate");
  const ReportPtr report(rep);
  std::cerr << csecoc_report_text(report.get());
  return csecoc_report_ok(report.get()) ? 0 : kExitRuntime;
}

int cmd_train(const Options& o) {
  const auto ds = load_dataset(o);
  MatrixPtr fixed;
  if (!o.matrix.empty()) fixed = read_matrix(o.matrix);
  const auto lo = learner_options(o);
  const auto mo = matrix_options(o);
  csecoc_model* raw = nullptr;
  check(csecoc_model_train(ds.get(), o.method.c_str(), &lo, &mo, fixed.get(), &raw), "train");
  const ModelPtr model(raw);

  const std::string manifest = o.out.empty() ? "model.json" : o.out;
  const std::string matrix = o.matrix_out.empty() ? with_suffix(manifest, ".matrix.csv") : o.matrix_out;
  check(csecoc_model_write_manifest(model.get(), manifest.c_str()), "train");
  check(csecoc_matrix_write(csecoc_model_matrix(model.get()), matrix.c_str()), "train");

  std::size_t correct = 0;
  const std::size_t n = csecoc_dataset_rows(ds.get());
  for (std::size_t i = 0; i < n; ++i) {
    int pred = -1;
    check(csecoc_model_predict(model.get(), csecoc_dataset_row(ds.get(), i), csecoc_dataset_features(ds.get()), &pred),
          "train");
    correct += pred == csecoc_dataset_label(ds.get(), i);
  }
  std::printf("trained %s on %zu samples, %d columns; training accuracy %.4f\n", csecoc_matrix_kind(csecoc_model_matrix(model.get())),
              n, csecoc_matrix_cols(csecoc_model_matrix(model.get())), n ? static_cast<double>(correct) / n : 0.0);
  std::printf("manifest %s\nmatrix %s\n", manifest.c_str(), matrix.c_str());
  return 0;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) {
    const auto b = f.find_first_not_of(" \t\r");
    const auto e = f.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : f.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

int cmd_predict(const Options& o) {
  if (o.manifest.empty()) config_error("--manifest is required");
  if (o.input.empty()) config_error("--input is required");
  csecoc_model* raw = nullptr;
  check(csecoc_model_load_manifest(o.manifest.c_str(), &raw), "manifest '" + o.manifest + "'");
  const ModelPtr model(raw);
  const std::size_t nf = csecoc_model_features(model.get());

  std::ifstream in(o.input);
  if (!in) throw Failure{kExitRuntime, "cannot open input '" + o.input + "'"};
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw Failure{kExitRuntime, "cannot write '" + o.out + "'"};
  }
  std::ostream& out = o.out.empty() ? std::cout : file;

  std::string line;
  std::size_t line_no = 0, rows = 0, labeled = 0, correct = 0;
  bool header_checked = false;
  bool has_label = false;
  std::vector<double> x(nf);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != nf && fields.size() != nf + 1) {
      throw Failure{kExitRuntime, o.input + ":" + std::to_string(line_no) + ": expected " + std::to_string(nf) +
                                      " feature fields (optionally followed by a label), got " +
                                      std::to_string(fields.size())};
    }
    bool numeric = true;
    for (std::size_t j = 0; j < nf; ++j) numeric = numeric && parse_number(fields[j], x[j]);
    if (!header_checked) {
      header_checked = true;
      has_label = fields.size() == nf + 1;
      out << "row,predicted" << (has_label ? ",actual" : "") << '\n';
      if (!numeric) continue;
    }
    if (!numeric) throw Failure{kExitRuntime, o.input + ":" + std::to_string(line_no) + ": non-numeric feature"};
    int pred = -1;
    check(csecoc_model_predict(model.get(), x.data(), nf, &pred), "predict");
    const std::string name = csecoc_model_class_name(model.get(), pred);
    out << rows << ',' << name;
    if (has_label && fields.size() == nf + 1) {
      out << ',' << fields[nf];
      ++labeled;
      correct += fields[nf] == name;
    }
    out << '\n';
    ++rows;
  }
  if (labeled > 0) {
    std::fprintf(stderr, "%zu predictions, accuracy %.4f on %zu labeled rows\n", rows,
                 static_cast<double>(correct) / labeled, labeled);
  } else {
    std::fprintf(stderr, "%zu predictions\n", rows);
  }
  return 0;
}

nlohmann::json run_config(const Options& o) {
  return {
      {"command", "benchmark"},
      {"data_dir", o.data_dir},
      {"datasets", o.datasets},
      {"methods", o.methods},
      {"learner", o.learner},
      {"knn_k", o.knn_k},
      {"gamma", o.gamma ? nlohmann::json(*o.gamma) : nlohmann::json("1/feature_count")},
      {"ridge_lambda", o.ridge_lambda},
      {"decoding", o.decoding.empty() ? "default" : o.decoding},
      {"folds", o.folds},
      {"repeats", o.repeats},
      {"seed", o.seed},
      {"eps", o.eps},
      {"standardize", o.standardize},
      {"leaky_matrix", o.leaky_matrix},
      {"random_candidates", o.random_candidates},
      {"targets", o.targets},
  };
}

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int cmd_benchmark(const Options& o) {
  if (!o.decoding.empty()) config_error("--decoding is fixed per learner in benchmark runs");
  csecoc_benchmark_options b;
  csecoc_benchmark_options_init(&b);
  b.data_dir = o.data_dir.c_str();
  b.datasets = o.datasets.c_str();
  b.methods = o.methods.c_str();
  b.learner = learner_options(o);
  b.folds = o.folds;
  b.repeats = o.repeats;
  b.seed = o.seed;
  b.eps = o.eps;
  b.standardize = o.standardize ? 1 : 0;
  b.leaky_matrix = o.leaky_matrix ? 1 : 0;
  b.workers = o.workers;
  b.random_candidates = o.random_candidates;
  b.targets = o.targets.c_str();
  const std::string config = run_config(o).dump();
  b.run_config_json = config.c_str();
  b.log = log_line;

  const std::string prefix = o.out.empty() ? "report" : with_suffix(o.out, "");
  const std::string json_path = prefix + ".json";
  const std::string text_path = prefix + ".txt";
  csecoc_report* raw = nullptr;
  check(csecoc_benchmark_run(&b, json_path.c_str(), text_path.c_str(), &raw), "benchmark");
  const ReportPtr report(raw);
  std::cout << csecoc_report_text(report.get());
  std::cout << "reports " << json_path << ", " << text_path << '\n';
  return 0;
}

int cmd_oracle_check(const Options& o) {
  const auto ds = load_dataset(o);
  MatrixPtr injected;
  if (!o.matrix.empty()) injected = read_matrix(o.matrix);
  csecoc_report* raw = nullptr;
  check(csecoc_oracle_check(ds.get(), o.eps, o.seed, injected.get(), &raw), "oracle-check");
  const ReportPtr report(raw);
  std::cout << csecoc_report_text(report.get());
  if (!o.out.empty()) {
    std::ofstream f(o.out);
    if (!f) throw Failure{kExitRuntime, "cannot write '" + o.out + "'"};
    f << csecoc_report_json(report.get()) << '\n';
  }
  return csecoc_report_ok(report.get()) ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-coded error-correcting output codes"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Options o;
  app.add_option("--data-dir", o.data_dir, "Directory holding datasets.json")->capture_default_str();
  app.add_option("--dataset", o.dataset, "Registered dataset name or CSV path (label last)");
  app.add_option("--datasets", o.datasets, "Comma-separated datasets, or all")->capture_default_str();
  app.add_option("--method", o.method, "csecoc, decoc, ova, ovo, dense_random, sparse_random")
      ->capture_default_str();
  app.add_option("--methods", o.methods, "Comma-separated methods, or all")->capture_default_str();
  app.add_option("--learner", o.learner, "knn, kernel, knn_regressor, knn_classifier, kernel_ridge")
      ->capture_default_str();
  app.add_option("--knn-k", o.knn_k, "Neighbours for KNN learners")->capture_default_str()->check(
      CLI::PositiveNumber);
  app.add_option("--gamma", o.gamma, "RBF width (default 1/feature count)")->check(CLI::PositiveNumber);
  app.add_option("--ridge-lambda", o.ridge_lambda, "Kernel ridge regularization")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--decoding", o.decoding, "euclidean or hamming_ternary (train only)");
  app.add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1 << 30));
  app.add_option("--repeats", o.repeats, "Cross-validation repeats")->capture_default_str()->check(
      CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for folds and random codes")->capture_default_str();
  app.add_option("--eps", o.eps, "Criterion denominator clamp")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_flag("--standardize", o.standardize, "Z-score features using training statistics");
  app.add_flag("--leaky-matrix", o.leaky_matrix, "Build the coding matrix once on the full dataset");
  app.add_option("--workers", o.workers, "Parallel CV workers")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--random-candidates", o.random_candidates, "Candidates for random codes")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--targets", o.targets, "Soft-code regression targets: coverage or sign")
      ->capture_default_str()
      ->check(CLI::IsMember({"coverage", "sign"}));
  app.add_option("--out", o.out, "Output path (matrix, manifest, predictions, report prefix or oracle JSON)");
  app.add_option("--matrix-out", o.matrix_out, "Matrix CSV output path");
  app.add_option("--matrix", o.matrix, "Matrix CSV input (train: fixed code; oracle-check: matrix to validate)");
  app.add_option("--manifest", o.manifest, "Model manifest written by train");
  app.add_option("--input", o.input, "CSV of feature rows to classify");

  auto* encode = app.add_subcommand("encode", "Build a coding matrix");
  auto* train = app.add_subcommand("train", "Train on a whole dataset and write a model manifest");
  auto* predict = app.add_subcommand("predict", "Classify rows with a trained manifest");
  auto* bench = app.add_subcommand("benchmark", "Repeated stratified cross-validation grid");
  auto* oracle = app.add_subcommand("oracle-check", "Compare against brute-force oracles");
  for (auto* sub : {encode, train, predict, bench, oracle}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (encode->parsed()) return cmd_encode(o);
    if (train->parsed()) return cmd_train(o);
    if (predict->parsed()) return cmd_predict(o);
    if (bench->parsed()) return cmd_benchmark(o);
    return cmd_oracle_check(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
