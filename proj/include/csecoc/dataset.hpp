#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace csecoc {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Sorted list of class indices.
using ClassSet = std::vector<int>;

enum class MissingPolicy { drop_row, mean_impute };

struct CsvSchema {
  enum class Label { first, last, index };

  Label label = Label::last;
  std::size_t label_index = 0;  // only read when label == Label::index
  bool has_header = false;
  MissingPolicy missing = MissingPolicy::drop_row;
};

/// Labeled feature matrix. Class indices are contiguous in [0, class_count())
/// and every class has at least one sample; the constructor enforces this.
class Dataset {
 public:
  Dataset(FeatureMatrix features, std::vector<int> labels, std::vector<std::string> class_names);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  std::size_t feature_count() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  int class_count() const noexcept { return static_cast<int>(class_names_.size()); }

  const FeatureMatrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const std::vector<std::size_t>& class_counts() const noexcept { return class_counts_; }

  int label(std::size_t i) const { return labels_[i]; }
  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * feature_count(), feature_count()};
  }

  /// Rows removed or imputed during ingestion (0 for in-memory datasets).
  std::size_t dropped_rows() const noexcept { return dropped_rows_; }
  std::size_t imputed_values() const noexcept { return imputed_values_; }
  void set_ingestion_notes(std::size_t dropped, std::size_t imputed) noexcept {
    dropped_rows_ = dropped;
    imputed_values_ = imputed;
  }

  /// Rows `indices` in the given order; class names and indices are kept, so
  /// every class must still be present.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Same labels, new feature values (same shape).
  Dataset with_features(FeatureMatrix features) const;

 private:
  FeatureMatrix features_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  std::vector<std::size_t> class_counts_;
  std::size_t dropped_rows_ = 0;
  std::size_t imputed_values_ = 0;
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset parse_csv(std::istream& in, const CsvSchema& schema);

Vector class_centroid(const Dataset& ds, int c);

/// Z-score parameters estimated on one dataset and applied to others.
/// Constant features get unit scale.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Dataset& ds);
  FeatureMatrix apply(const FeatureMatrix& x) const;
  Dataset apply(const Dataset& ds) const;
  std::vector<double> apply(std::span<const double> x) const;
};

/// Fold assignment for `repeats` independent stratified k-fold splits.
struct FoldPlan {
  int k = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> assignment;  // [repeat][sample] -> fold id

  std::size_t sample_count() const { return assignment.empty() ? 0 : assignment.front().size(); }
  std::vector<std::size_t> test_indices(int repeat, int fold) const;
  std::vector<std::size_t> train_indices(int repeat, int fold) const;
};

/// Within each class, samples are shuffled with Rng(derive_seed(seed,
/// {repeat, class})) and dealt round-robin to folds starting at an offset
/// equal to the number of samples already dealt in this repeat, so fold
/// sizes stay balanced overall as well as per class. Every class needs at
/// least k samples, except for leave-one-out (k equal to the sample count).
FoldPlan stratified_folds(std::span<const int> labels, int class_count, int k, int repeats,
                          std::uint64_t seed);
FoldPlan stratified_folds(const Dataset& ds, int k, int repeats, std::uint64_t seed);

}  // namespace csecoc
