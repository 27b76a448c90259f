#pragma once

#include <span>
#include <vector>

namespace csecoc {

/// Class-averaged one-vs-rest scores. `accuracy` averages each class's
/// binary accuracy (TP+TN)/(P+N); `plain_accuracy` is the fraction of
/// correct predictions.
struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
  double plain_accuracy = 0.0;
  /// Classes never predicted (precision taken as 0) or absent from the
  /// labels (recall taken as 0).
  std::vector<int> degenerate_classes;
};

Metrics compute_metrics(std::span<const int> labels, std::span<const int> preds, int class_count,
                        double beta = 1.0);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

Summary summarize(std::span<const double> values);

}  // namespace csecoc
