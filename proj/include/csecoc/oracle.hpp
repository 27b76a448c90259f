#pragma once

#include "csecoc/coding.hpp"
#include "csecoc/dataset.hpp"
#include "csecoc/learners.hpp"
#include "csecoc/metrics.hpp"
#include "csecoc/partition.hpp"
#include "csecoc/pipeline.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

// Brute-force reference computations. Each one works straight from the raw
// samples and shares no code with the production path it checks.
namespace csecoc::oracle {

/// Per-feature mean over the samples whose label is in g, by direct summation.
Vector brute_group_centroid(const Dataset& ds, const ClassSet& g);

double brute_partition_score(const Dataset& ds, const ClassSet& g1, const ClassSet& g2, double eps);

/// Signed nearest-group-centroid fractions with centroids recomputed from
/// the samples.
std::vector<double> brute_coverage(const Dataset& ds, const ClassSet& g1, const ClassSet& g2);

/// Class-averaged one-vs-rest scores from a full confusion matrix.
Metrics confusion_metrics(std::span<const int> labels, std::span<const int> preds, int class_count,
                          double beta = 1.0);

/// Largest criterion value reachable by moving one class across the split
/// (both sides kept nonempty); NaN when no move exists.
double best_single_move(const ClassGeometry& geom, const ClassPartition& part, double eps);

/// Outputs the true class's codeword entry for any training feature vector.
class CodewordLearner final : public Regressor {
 public:
  CodewordLearner(std::shared_ptr<const std::map<std::vector<double>, int>> lookup, std::vector<double> column,
                  bool classifier, std::size_t features);
  double predict(std::span<const double> x) const override;
  std::size_t feature_count() const override { return features_; }
  bool is_classifier() const override { return classifier_; }

 private:
  std::shared_ptr<const std::map<std::vector<double>, int>> lookup_;
  std::vector<double> column_;
  bool classifier_;
  std::size_t features_;
};

/// End-to-end accuracy of an EcocModel whose learners are CodewordLearners.
double perfect_learner_accuracy(const Dataset& ds, const CodingMatrix& m, Decoding decoding);

struct Check {
  std::string name;
  bool passed = false;
  /// Soft checks are reported but never fail the run.
  bool hard = true;
  std::string detail;
};

struct Report {
  std::vector<Check> checks;

  bool ok() const;
  std::string text() const;
};

struct Options {
  double eps = kDefaultEps;
  std::uint64_t seed = 42;
  int metric_trials = 100;
  /// A matrix supplied by the caller; it is validated as-is.
  std::optional<CodingMatrix> matrix;
};

inline constexpr int kMaxOracleClasses = 12;

Report run_checks(const Dataset& ds, const Options& options = {});

}  // namespace csecoc::oracle
