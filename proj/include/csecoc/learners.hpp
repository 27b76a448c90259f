#pragma once

#include "csecoc/dataset.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace csecoc {

enum class LearnerFamily { knn_regressor, knn_classifier, kernel_ridge };

std::string_view to_string(LearnerFamily family);
std::optional<LearnerFamily> parse_learner_family(std::string_view name);

struct LearnerSpec {
  LearnerFamily family = LearnerFamily::knn_regressor;
  int k = 5;
  std::optional<double> gamma;  // RBF width; unset means 1 / feature count
  double ridge_lambda = 1.0;

  void validate() const;
  double gamma_for(std::size_t feature_count) const;
};

/// A fitted base learner. Immutable after construction; predict is pure.
class Regressor {
 public:
  virtual ~Regressor() = default;

  virtual double predict(std::span<const double> x) const = 0;
  virtual std::size_t feature_count() const = 0;
  /// Outputs are labels in {-1, +1} rather than real scores.
  virtual bool is_classifier() const { return false; }
  /// FNV-1a over the training features and targets.
  virtual std::uint64_t fingerprint() const { return 0; }
};

using TrainedLearner = std::shared_ptr<const Regressor>;

std::uint64_t training_fingerprint(const FeatureMatrix& x, std::span<const double> y);

/// Brute-force k nearest neighbours (Euclidean, ties to the lower training
/// index). k is truncated to the training size.
class KnnModel final : public Regressor {
 public:
  KnnModel(FeatureMatrix x, std::vector<double> y, int k, bool classifier);

  double predict(std::span<const double> x) const override;
  std::size_t feature_count() const override { return static_cast<std::size_t>(x_.cols()); }
  bool is_classifier() const override { return classifier_; }
  std::uint64_t fingerprint() const override { return fingerprint_; }

  /// Training indices of the k nearest neighbours, nearest first.
  std::vector<std::size_t> neighbours(std::span<const double> x) const;

 private:
  FeatureMatrix x_;
  std::vector<double> y_;
  int k_;
  bool classifier_;
  std::uint64_t fingerprint_;
};

/// RBF kernel ridge regression: alpha = (K + lambda I)^-1 y.
class KernelRidgeModel final : public Regressor {
 public:
  KernelRidgeModel(std::shared_ptr<const FeatureMatrix> x, Vector alpha, double gamma,
                   std::uint64_t fingerprint);

  double predict(std::span<const double> x) const override;
  std::size_t feature_count() const override { return static_cast<std::size_t>(x_->cols()); }
  std::uint64_t fingerprint() const override { return fingerprint_; }
  const Vector& alpha() const noexcept { return alpha_; }

 private:
  std::shared_ptr<const FeatureMatrix> x_;
  Vector alpha_;
  double gamma_;
  std::uint64_t fingerprint_;
};

Eigen::MatrixXd rbf_gram(const FeatureMatrix& x, double gamma);

TrainedLearner fit(const LearnerSpec& spec, const FeatureMatrix& x, std::span<const double> y);

/// Fits one learner per target vector over the same training rows. For
/// kernel_ridge the Gram matrix is factorized once and shared.
std::vector<TrainedLearner> fit_many(const LearnerSpec& spec, const FeatureMatrix& x,
                                     const std::vector<std::vector<double>>& targets);

}  // namespace csecoc
