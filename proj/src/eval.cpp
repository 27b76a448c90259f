#include "csecoc/eval.hpp"

#include "csecoc/error.hpp"
#include "csecoc/registry.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace csecoc {

namespace {

Summary summarize_metric(const std::vector<SplitResult>& splits, double Metrics::*field) {
  std::vector<double> v;
  v.reserve(splits.size());
  for (const auto& s : splits) v.push_back(s.metrics.*field);
  return summarize(v);
}

std::vector<double> metric_values(const CvResult& row, double Metrics::*field) {
  std::vector<double> v;
  for (const auto& s : row.splits) v.push_back(s.metrics.*field);
  return v;
}

// Runs job(i) for i in [0, n) on `workers` threads. The first exception by
// index is rethrown after all threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      job(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(threads, n); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

LearnerSpec learner_for_method(std::string_view profile, MatrixKind kind, const LearnerSpec& base) {
  LearnerSpec spec = base;
  if (profile == "knn") {
    spec.family = kind == MatrixKind::csecoc ? LearnerFamily::knn_regressor : LearnerFamily::knn_classifier;
  } else if (profile == "kernel") {
    spec.family = LearnerFamily::kernel_ridge;
  } else if (auto family = parse_learner_family(profile)) {
    spec.family = *family;
  } else {
    fail(ErrorCode::invalid_argument, "unknown learner '" + std::string(profile) + "'");
  }
  return spec;
}

CvResult run_cv(const Dataset& ds, std::string_view dataset_name, MatrixKind kind, const LearnerSpec& spec,
                Decoding decoding, const FoldPlan& plan, const CvOptions& options) {
  if (plan.sample_count() != ds.rows()) fail(ErrorCode::invalid_argument, "fold plan does not match dataset");

  std::optional<CodingMatrix> fixed;
  if (options.leaky_matrix) {
    fixed = options.pipeline.standardize ? build_matrix(kind, Standardizer::fit(ds).apply(ds), options.pipeline)
                                         : build_matrix(kind, ds, options.pipeline);
  }

  const std::size_t n = static_cast<std::size_t>(plan.repeats) * static_cast<std::size_t>(plan.k);
  std::vector<SplitResult> splits(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const int r = static_cast<int>(i / static_cast<std::size_t>(plan.k));
    const int f = static_cast<int>(i % static_cast<std::size_t>(plan.k));
    const auto train_idx = plan.train_indices(r, f);
    const auto test_idx = plan.test_indices(r, f);
    const Dataset train = ds.subset(train_idx);
    const EcocModel model =
        fit_pipeline(train, kind, spec, decoding, options.pipeline, fixed ? &*fixed : nullptr);
    std::vector<int> truth;
    std::vector<int> pred;
    for (std::size_t t : test_idx) {
      truth.push_back(ds.label(t));
      pred.push_back(model.predict(ds.row(t)));
    }
    splits[i] = {r, f, test_idx.size(), compute_metrics(truth, pred, ds.class_count())};
  });

  CvResult row;
  row.dataset = std::string(dataset_name);
  row.method = std::string(to_string(kind));
  row.learner = std::string(to_string(spec.family));
  row.decoding = decoding;
  row.ensemble_size = ensemble_size(kind, ds.class_count());
  row.splits = std::move(splits);
  row.accuracy = summarize_metric(row.splits, &Metrics::accuracy);
  row.plain_accuracy = summarize_metric(row.splits, &Metrics::plain_accuracy);
  row.precision = summarize_metric(row.splits, &Metrics::precision);
  row.recall = summarize_metric(row.splits, &Metrics::recall);
  row.fscore = summarize_metric(row.splits, &Metrics::fscore);
  return row;
}

EvalReport benchmark(const BenchmarkConfig& config, const LogFn& log) {
  EvalReport report;
  auto& meta = report.metadata;
  meta["run_config"] = config.run_config;
  meta["protocol"] = {
      {"folds", config.folds},
      {"repeats", config.repeats},
      {"seed", config.seed},
      {"fold_generator", "mt19937_64 seeded by splitmix64(seed, repeat, class); Fisher-Yates; round-robin deal"},
      {"std", "sample (n-1) over repeats x folds split scores"},
      {"accuracy", "class-averaged one-vs-rest binary accuracy"},
      {"plain_accuracy", "fraction of correct predictions"},
      {"fscore_beta", 1.0},
  };
  meta["design"] = {
      {"eps", config.cv.pipeline.eps},
      {"criterion_denominator", "max(S(g1) + S(g2), eps); S = 0 for singleton groups"},
      {"inner_group_normalization", "2 / (T (T - 1))"},
      {"sffs_tolerance", "1e-12 * max(1, |E|)"},
      {"group_centroid", "sample-weighted"},
      {"coverage_data", config.cv.leaky_matrix ? "full dataset (leaky)" : "training fold"},
      {"leaky_matrix", config.cv.leaky_matrix},
      {"standardize", config.cv.pipeline.standardize},
      {"targets", std::string(to_string(config.cv.pipeline.targets))},
      {"random_code_sizes", "ceil(10 log2 Nc) dense, ceil(15 log2 Nc) sparse"},
      {"random_code_selection", "best of candidates by min row distance (0 vs +-1 counts 1/2)"},
      {"random_candidates", config.cv.pipeline.random.candidates},
      {"ovo_size", "Nc (Nc - 1) / 2"},
      {"decoding", "euclidean for regressors, attenuated hamming for classifiers"},
  };

  std::vector<DatasetEntry> registry;
  if (std::filesystem::exists(config.data_dir / "datasets.json")) registry = load_registry(config.data_dir);

  nlohmann::json ds_meta = nlohmann::json::array();
  for (const auto& name : config.datasets) {
    std::optional<Dataset> ds;
    std::optional<FoldPlan> plan;
    nlohmann::json info = {{"name", name}};
    try {
      if (auto e = find_dataset(registry, name)) {
        ds = load_csv(config.data_dir / e->file, e->schema);
        info["file"] = e->file;
        info["missing_policy"] = std::string(to_string(e->schema.missing));
        if (!e->note.empty()) info["note"] = e->note;
      } else {
        ds = load_csv(name, CsvSchema{});
        info["file"] = name;
      }
      info["samples"] = ds->rows();
      info["features"] = ds->feature_count();
      info["classes"] = ds->class_count();
      info["dropped_rows"] = ds->dropped_rows();
      info["imputed_values"] = ds->imputed_values();
      plan = stratified_folds(*ds, config.folds, config.repeats, config.seed);
    } catch (const std::exception& e) {
      info["error"] = e.what();
      for (MatrixKind kind : config.methods) {
        report.failures.push_back({name, std::string(to_string(kind)), e.what()});
      }
      if (log) log("dataset " + name + " unavailable: " + e.what());
      ds_meta.push_back(info);
      continue;
    }
    ds_meta.push_back(info);

    for (MatrixKind kind : config.methods) {
      try {
        const LearnerSpec spec = learner_for_method(config.learner, kind, config.base);
        const CvResult row = run_cv(*ds, name, kind, spec, default_decoding(spec.family), *plan, config.cv);
        if (log) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "%-12s %-14s acc %.2f  f1 %.2f", name.c_str(), row.method.c_str(),
                        100 * row.plain_accuracy.mean, 100 * row.fscore.mean);
          log(buf);
        }
        report.rows.push_back(row);
      } catch (const std::exception& e) {
        report.failures.push_back({name, std::string(to_string(kind)), e.what()});
        if (log) log("cell " + name + "/" + std::string(to_string(kind)) + " failed: " + e.what());
      }
    }
  }
  meta["datasets"] = ds_meta;
  return report;
}

nlohmann::json to_json(const CvResult& row) {
  auto block = [&](const Summary& s, double Metrics::*field) {
    return nlohmann::json{{"mean", s.mean}, {"std", s.std}, {"splits", metric_values(row, field)}};
  };
  std::size_t degenerate = 0;
  for (const auto& s : row.splits) degenerate += s.metrics.degenerate_classes.empty() ? 0 : 1;
  return {
      {"dataset", row.dataset},
      {"method", row.method},
      {"learner", row.learner},
      {"decoding", std::string(to_string(row.decoding))},
      {"ensemble_size", row.ensemble_size},
      {"split_count", row.splits.size()},
      {"splits_with_degenerate_classes", degenerate},
      {"accuracy", block(row.accuracy, &Metrics::accuracy)},
      {"plain_accuracy", block(row.plain_accuracy, &Metrics::plain_accuracy)},
      {"precision", block(row.precision, &Metrics::precision)},
      {"recall", block(row.recall, &Metrics::recall)},
      {"fscore", block(row.fscore, &Metrics::fscore)},
  };
}

namespace {

using Measure = std::pair<const char*, Summary CvResult::*>;
const Measure kMeasures[] = {
    {"plain_accuracy", &CvResult::plain_accuracy},
    {"accuracy", &CvResult::accuracy},
    {"fscore", &CvResult::fscore},
};

// Per dataset and measure, the method(s) with the highest mean.
std::map<std::pair<std::string, std::string>, double> best_means(const EvalReport& report) {
  std::map<std::pair<std::string, std::string>, double> best;
  for (const auto& row : report.rows) {
    for (const auto& [name, field] : kMeasures) {
      auto key = std::make_pair(row.dataset, std::string(name));
      auto it = best.find(key);
      const double v = (row.*field).mean;
      if (it == best.end() || v > it->second) best[key] = v;
    }
  }
  return best;
}

}  // namespace

nlohmann::json report_json(const EvalReport& report) {
  const auto best = best_means(report);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    auto j = to_json(row);
    nlohmann::json marks = nlohmann::json::array();
    for (const auto& [name, field] : kMeasures) {
      if ((row.*field).mean == best.at({row.dataset, name})) marks.push_back(name);
    }
    j["best"] = marks;
    rows.push_back(std::move(j));
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"dataset", f.dataset}, {"method", f.method}, {"error", f.message}});
  }
  return {{"metadata", report.metadata}, {"rows", rows}, {"failures", failures}};
}

std::string report_table(const EvalReport& report) {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::map<std::pair<std::string, std::string>, const CvResult*> cell;
  std::map<std::string, std::size_t> sizes;
  for (const auto& row : report.rows) {
    if (std::find(datasets.begin(), datasets.end(), row.dataset) == datasets.end()) datasets.push_back(row.dataset);
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) methods.push_back(row.method);
    cell[{row.dataset, row.method}] = &row;
    sizes[row.dataset + "/" + row.method] = row.ensemble_size;
  }
  const auto best = best_means(report);

  std::ostringstream out;
  char buf[128];
  auto header = [&] {
    std::snprintf(buf, sizeof buf, "%-16s%-14s", "measure", "dataset");
    out << buf;
    for (const auto& m : methods) {
      std::snprintf(buf, sizeof buf, "%-16s", m.c_str());
      out << buf;
    }
    out << '\n';
  };
  header();
  for (const auto& [name, field] : kMeasures) {
    std::vector<double> mean_sum(methods.size(), 0.0), std_sum(methods.size(), 0.0);
    std::vector<int> counted(methods.size(), 0);
    for (const auto& d : datasets) {
      std::snprintf(buf, sizeof buf, "%-16s%-14s", name, d.c_str());
      out << buf;
      for (std::size_t j = 0; j < methods.size(); ++j) {
        auto it = cell.find({d, methods[j]});
        if (it == cell.end()) {
          std::snprintf(buf, sizeof buf, "%-16s", "-");
        } else {
          const Summary& s = it->second->*field;
          const bool top = s.mean == best.at({d, name});
          std::snprintf(buf, sizeof buf, "%5.1f+-%-5.2f%-4s", 100 * s.mean, 100 * s.std, top ? "*" : "");
          mean_sum[j] += s.mean;
          std_sum[j] += s.std;
          ++counted[j];
        }
        out << buf;
      }
      out << '\n';
    }
    std::snprintf(buf, sizeof buf, "%-16s%-14s", name, "mean");
    out << buf;
    for (std::size_t j = 0; j < methods.size(); ++j) {
      if (counted[j] == 0) {
        std::snprintf(buf, sizeof buf, "%-16s", "-");
      } else {
        std::snprintf(buf, sizeof buf, "%5.1f+-%-5.2f    ", 100 * mean_sum[j] / counted[j],
                      100 * std_sum[j] / counted[j]);
      }
      out << buf;
    }
    out << '\n';
  }

  out << "\nensemble sizes\n";
  for (const auto& d : datasets) {
    std::snprintf(buf, sizeof buf, "%-30s", d.c_str());
    out << buf;
    for (const auto& m : methods) {
      auto it = sizes.find(d + "/" + m);
      if (it == sizes.end()) {
        std::snprintf(buf, sizeof buf, "%-16s", "-");
      } else {
        std::snprintf(buf, sizeof buf, "%-16zu", it->second);
      }
      out << buf;
    }
    out << '\n';
  }
  if (!report.failures.empty()) {
    out << "\nfailed cells\n";
    for (const auto& f : report.failures) out << "  " << f.dataset << '/' << f.method << ": " << f.message << '\n';
  }
  return out.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& text_path) {
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    if (!out) fail(ErrorCode::io, "cannot write '" + json_path.string() + "'");
    out << report_json(report).dump(2) << '\n';
  }
  if (!text_path.empty()) {
    std::ofstream out(text_path);
    if (!out) fail(ErrorCode::io, "cannot write '" + text_path.string() + "'");
    out << report_table(report);
  }
}

}  // namespace csecoc
