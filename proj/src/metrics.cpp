#include "csecoc/metrics.hpp"

#include "csecoc/error.hpp"

#include <cmath>

namespace csecoc {

Metrics compute_metrics(std::span<const int> labels, std::span<const int> preds, int class_count, double beta) {
  if (labels.size() != preds.size()) fail(ErrorCode::invalid_argument, "labels and predictions differ in length");
  if (labels.empty()) fail(ErrorCode::invalid_argument, "no predictions to score");
  if (!(beta > 0.0)) fail(ErrorCode::invalid_argument, "beta must be > 0");
  if (class_count < 1) fail(ErrorCode::invalid_argument, "class count must be >= 1");

  const double total = static_cast<double>(labels.size());
  const double b2 = beta * beta;
  Metrics m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count || preds[i] < 0 || preds[i] >= class_count) {
      fail(ErrorCode::invalid_argument, "class index out of range");
    }
    correct += labels[i] == preds[i];
  }

  for (int c = 0; c < class_count; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool actual = labels[i] == c;
      const bool predicted = preds[i] == c;
      tp += actual && predicted;
      fp += !actual && predicted;
      fn += actual && !predicted;
    }
    const double tn = total - tp - fp - fn;
    const double positives = tp + fn;
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = positives > 0 ? tp / positives : 0.0;
    const double denom = b2 * precision + recall;
    const double f = denom > 0 ? (b2 + 1.0) * precision * recall / denom : 0.0;
    if (tp + fp == 0 || positives == 0) m.degenerate_classes.push_back(c);

    m.accuracy += (tp + tn) / total;
    m.precision += precision;
    m.recall += recall;
    m.fscore += f;
  }
  const double n = static_cast<double>(class_count);
  m.accuracy /= n;
  m.precision /= n;
  m.recall /= n;
  m.fscore /= n;
  m.plain_accuracy = static_cast<double>(correct) / total;
  return m;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace csecoc
