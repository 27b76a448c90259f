#pragma once

#include "csecoc/coding.hpp"
#include "csecoc/dataset.hpp"
#include "csecoc/learners.hpp"
#include "csecoc/metrics.hpp"
#include "csecoc/pipeline.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace csecoc {

struct SplitResult {
  int repeat = 0;
  int fold = 0;
  std::size_t test_size = 0;
  Metrics metrics;
};

struct CvResult {
  std::string dataset;
  std::string method;
  std::string learner;
  Decoding decoding = Decoding::euclidean;
  std::size_t ensemble_size = 0;
  std::vector<SplitResult> splits;  // ordered by (repeat, fold)
  Summary accuracy;
  Summary plain_accuracy;
  Summary precision;
  Summary recall;
  Summary fscore;
};

struct CvOptions {
  PipelineOptions pipeline;
  /// Build the coding matrix once on the full dataset instead of per fold.
  bool leaky_matrix = false;
  int workers = 1;
};

/// Every repeat x fold split: fit the pipeline on the training fold (matrix
/// included, unless leaky), predict the test fold, score. Splits may run on
/// several workers; results are reduced in (repeat, fold) order.
CvResult run_cv(const Dataset& ds, std::string_view dataset_name, MatrixKind kind, const LearnerSpec& spec,
                Decoding decoding, const FoldPlan& plan, const CvOptions& options);

/// Learner profile for a method. "knn" pairs csecoc with the KNN regressor
/// and every hard code with the KNN classifier; "kernel" uses kernel ridge
/// everywhere; a family name applies that family to all methods.
LearnerSpec learner_for_method(std::string_view profile, MatrixKind kind, const LearnerSpec& base);

struct BenchmarkConfig {
  std::filesystem::path data_dir = "data";
  std::vector<std::string> datasets;
  std::vector<MatrixKind> methods;
  std::string learner = "knn";
  LearnerSpec base;
  int folds = 10;
  int repeats = 10;
  std::uint64_t seed = 42;
  CvOptions cv;
  /// Echoed into the report metadata verbatim.
  nlohmann::json run_config;
};

struct BenchmarkFailure {
  std::string dataset;
  std::string method;
  std::string message;
};

struct EvalReport {
  nlohmann::json metadata;
  std::vector<CvResult> rows;
  std::vector<BenchmarkFailure> failures;
};

using LogFn = std::function<void(std::string_view)>;

/// Cross product datasets x methods. A cell that throws is recorded as a
/// failure and the run continues.
EvalReport benchmark(const BenchmarkConfig& config, const LogFn& log = {});

nlohmann::json to_json(const CvResult& row);
nlohmann::json report_json(const EvalReport& report);
/// Aligned text grid in percent, mean+-std per cell, '*' on the best mean
/// of each dataset.
std::string report_table(const EvalReport& report);

void write_report(const EvalReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& text_path);

}  // namespace csecoc
