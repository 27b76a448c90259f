#pragma once

#include "csecoc/dataset.hpp"
#include "csecoc/registry.hpp"
#include "csecoc/rng.hpp"

#include <string>
#include <vector>

#ifndef CSECOC_TEST_DATA_DIR
#define CSECOC_TEST_DATA_DIR "data"
#endif

namespace testing {

inline csecoc::Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  csecoc::FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  int nc = 0;
  for (int l : labels) nc = std::max(nc, l + 1);
  std::vector<std::string> names;
  for (int c = 0; c < nc; ++c) names.push_back("c" + std::to_string(c));
  return csecoc::Dataset(std::move(x), labels, std::move(names));
}

/// One sample per class at the given 1-D positions.
inline csecoc::Dataset point_classes(const std::vector<double>& positions) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t c = 0; c < positions.size(); ++c) {
    rows.push_back({positions[c]});
    labels.push_back(static_cast<int>(c));
  }
  return make_dataset(rows, labels);
}

/// Gaussian-ish blobs: nc classes, per-class counts in [min_per_class, max_per_class], d features.
inline csecoc::Dataset random_dataset(std::uint64_t seed, int nc, int min_per_class, int max_per_class, int d,
                                      double spread = 3.0) {
  csecoc::Rng rng(seed);
  std::vector<std::vector<double>> centres(static_cast<std::size_t>(nc), std::vector<double>(static_cast<std::size_t>(d)));
  for (auto& c : centres) {
    for (double& v : c) v = spread * (2.0 * rng.uniform() - 1.0);
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int c = 0; c < nc; ++c) {
    const int n = min_per_class + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_per_class - min_per_class + 1)));
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j) {
        const double noise = rng.uniform() + rng.uniform() + rng.uniform() - 1.5;
        row[static_cast<std::size_t>(j)] = centres[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] + noise;
      }
      rows.push_back(std::move(row));
      labels.push_back(c);
    }
  }
  return make_dataset(rows, labels);
}

inline csecoc::Dataset load(const std::string& name) {
  return csecoc::resolve_dataset(CSECOC_TEST_DATA_DIR, name, csecoc::CsvSchema{});
}

}  // namespace testing
