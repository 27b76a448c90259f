#pragma once

#include "csecoc/coding.hpp"
#include "csecoc/dataset.hpp"
#include "csecoc/learners.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace csecoc {

enum class Decoding { euclidean, hamming_ternary };

std::string_view to_string(Decoding d);
std::optional<Decoding> parse_decoding(std::string_view name);

/// What a column learner is trained to output. `coverage` uses the matrix
/// entry itself; `sign` uses +-1 and keeps soft rows for decoding only.
enum class TargetMode { coverage, sign };

std::string_view to_string(TargetMode t);
std::optional<TargetMode> parse_target_mode(std::string_view name);

struct ColumnTrainingSet {
  std::vector<std::size_t> rows;
  std::vector<double> targets;
};

/// Samples of every class with a nonzero entry in column `col`, with that
/// entry (or its sign) as target. Throws when the surviving targets have a
/// single sign.
ColumnTrainingSet column_training_set(const Dataset& ds, const CodingMatrix& m, std::size_t col,
                                      TargetMode mode = TargetMode::coverage);

/// Least-loss decoding. Euclidean: sum (o_l - M_rl)^2. Hamming: sum
/// (1 - sign(o_l) M_rl) / 2, so zero entries cost 1/2. Ties go to the lowest
/// class index.
int decode(std::span<const double> outputs, const CodingMatrix& m, Decoding rule);

class EcocModel {
 public:
  EcocModel(CodingMatrix matrix, std::vector<TrainedLearner> learners, Decoding decoding,
            std::optional<Standardizer> preprocessing = std::nullopt);

  const CodingMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<TrainedLearner>& learners() const noexcept { return learners_; }
  Decoding decoding() const noexcept { return decoding_; }
  const std::optional<Standardizer>& preprocessing() const noexcept { return pre_; }

  /// Raw learner outputs for one sample (after preprocessing).
  std::vector<double> outputs(std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  std::vector<int> predict(const FeatureMatrix& x) const;

 private:
  CodingMatrix matrix_;
  std::vector<TrainedLearner> learners_;
  Decoding decoding_;
  std::optional<Standardizer> pre_;
};

/// Fits one learner per column of `m` on `ds`. Columns with the same
/// support share one kernel factorization.
EcocModel train_ecoc(const Dataset& ds, const CodingMatrix& m, const LearnerSpec& spec, Decoding decoding,
                     TargetMode mode = TargetMode::coverage,
                     std::optional<Standardizer> preprocessing = std::nullopt);

struct PipelineOptions {
  double eps = kDefaultEps;
  bool standardize = false;
  TargetMode targets = TargetMode::coverage;
  RandomCodeOptions random;
};

/// Matrix for `kind` built from `ds` (tree kinds) or from the class count.
CodingMatrix build_matrix(MatrixKind kind, const Dataset& ds, const PipelineOptions& options);

/// Default decoding for a learner: Hamming for classifiers, Euclidean
/// otherwise.
Decoding default_decoding(LearnerFamily family);

/// Standardize (optional, fit on `train`), build the matrix on the
/// transformed training data unless `fixed` is given, then train.
EcocModel fit_pipeline(const Dataset& train, MatrixKind kind, const LearnerSpec& spec, Decoding decoding,
                       const PipelineOptions& options, const CodingMatrix* fixed = nullptr);

}  // namespace csecoc
