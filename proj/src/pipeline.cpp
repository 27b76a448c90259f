#include "csecoc/pipeline.hpp"

#include "csecoc/error.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace csecoc {

std::string_view to_string(Decoding d) {
  return d == Decoding::euclidean ? "euclidean" : "hamming_ternary";
}

std::optional<Decoding> parse_decoding(std::string_view name) {
  if (name == "euclidean") return Decoding::euclidean;
  if (name == "hamming_ternary" || name == "hamming") return Decoding::hamming_ternary;
  return std::nullopt;
}

std::string_view to_string(TargetMode t) { return t == TargetMode::coverage ? "coverage" : "sign"; }

std::optional<TargetMode> parse_target_mode(std::string_view name) {
  if (name == "coverage") return TargetMode::coverage;
  if (name == "sign") return TargetMode::sign;
  return std::nullopt;
}

ColumnTrainingSet column_training_set(const Dataset& ds, const CodingMatrix& m, std::size_t col,
                                      TargetMode mode) {
  if (col >= static_cast<std::size_t>(m.cols())) fail(ErrorCode::invalid_argument, "column index out of range");
  if (m.rows() != ds.class_count()) fail(ErrorCode::invalid_argument, "matrix rows do not match class count");
  ColumnTrainingSet set;
  bool pos = false;
  bool neg = false;
  const auto c = static_cast<Eigen::Index>(col);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const double entry = m.values(ds.label(i), c);
    if (entry == 0.0) continue;
    set.rows.push_back(i);
    set.targets.push_back(mode == TargetMode::coverage ? entry : (entry > 0 ? 1.0 : -1.0));
    pos = pos || entry > 0;
    neg = neg || entry < 0;
  }
  if (!pos || !neg) {
    fail(ErrorCode::data, "degenerate column H" + std::to_string(col) + ": training targets have a single sign");
  }
  return set;
}

int decode(std::span<const double> outputs, const CodingMatrix& m, Decoding rule) {
  if (outputs.size() != static_cast<std::size_t>(m.cols())) {
    fail(ErrorCode::invalid_argument, "output length does not match column count");
  }
  for (double o : outputs) {
    if (!std::isfinite(o)) fail(ErrorCode::numeric, "non-finite learner output");
  }
  int best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < m.rows(); ++r) {
    double loss = 0.0;
    for (int l = 0; l < m.cols(); ++l) {
      const double entry = m.values(r, l);
      const double o = outputs[static_cast<std::size_t>(l)];
      if (rule == Decoding::euclidean) {
        loss += (o - entry) * (o - entry);
      } else {
        const double s = static_cast<double>((o > 0) - (o < 0));
        loss += (1.0 - s * entry) / 2.0;
      }
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = r;
    }
  }
  return best;
}

EcocModel::EcocModel(CodingMatrix matrix, std::vector<TrainedLearner> learners, Decoding decoding,
                     std::optional<Standardizer> preprocessing)
    : matrix_(std::move(matrix)),
      learners_(std::move(learners)),
      decoding_(decoding),
      pre_(std::move(preprocessing)) {
  if (static_cast<int>(learners_.size()) != matrix_.cols()) {
    fail(ErrorCode::invalid_argument, "learner count differs from column count");
  }
  for (const auto& l : learners_) {
    if (!l) fail(ErrorCode::invalid_argument, "null learner");
    if (decoding_ == Decoding::hamming_ternary && !l->is_classifier()) {
      fail(ErrorCode::invalid_argument, "hamming decoding requires classifier learners");
    }
  }
  if (decoding_ != Decoding::euclidean && !matrix_.is_hard()) {
    fail(ErrorCode::invalid_argument, "soft coding matrices require euclidean decoding");
  }
}

std::vector<double> EcocModel::outputs(std::span<const double> x) const {
  std::vector<double> scaled;
  if (pre_) {
    scaled = pre_->apply(x);
    x = scaled;
  }
  std::vector<double> out(learners_.size());
  for (std::size_t l = 0; l < learners_.size(); ++l) out[l] = learners_[l]->predict(x);
  return out;
}

int EcocModel::predict(std::span<const double> x) const { return decode(outputs(x), matrix_, decoding_); }

std::vector<int> EcocModel::predict(const FeatureMatrix& x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  const auto d = static_cast<std::size_t>(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = predict(std::span<const double>(x.data() + static_cast<std::size_t>(i) * d, d));
  }
  return out;
}

EcocModel train_ecoc(const Dataset& ds, const CodingMatrix& m, const LearnerSpec& spec, Decoding decoding,
                     TargetMode mode, std::optional<Standardizer> preprocessing) {
  spec.validate();
  if (m.rows() != ds.class_count()) fail(ErrorCode::invalid_argument, "matrix rows do not match class count");

  // Group columns by their training rows so kernel systems are shared.
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_support;
  std::vector<ColumnTrainingSet> sets;
  for (int l = 0; l < m.cols(); ++l) {
    sets.push_back(column_training_set(ds, m, static_cast<std::size_t>(l), mode));
    by_support[sets.back().rows].push_back(static_cast<std::size_t>(l));
  }

  std::vector<TrainedLearner> learners(static_cast<std::size_t>(m.cols()));
  for (const auto& [rows, cols] : by_support) {
    FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ds.feature_count()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = ds.features().row(static_cast<Eigen::Index>(rows[i]));
    }
    std::vector<std::vector<double>> targets;
    for (std::size_t l : cols) targets.push_back(sets[l].targets);
    auto fitted = fit_many(spec, x, targets);
    for (std::size_t t = 0; t < cols.size(); ++t) learners[cols[t]] = std::move(fitted[t]);
  }
  return EcocModel(m, std::move(learners), decoding, std::move(preprocessing));
}

CodingMatrix build_matrix(MatrixKind kind, const Dataset& ds, const PipelineOptions& options) {
  switch (kind) {
    case MatrixKind::csecoc: return build_csecoc(ds, options.eps);
    case MatrixKind::decoc_like: return build_decoc_like(ds, options.eps);
    default: return build_baseline(kind, ds.class_count(), options.random, ds.class_names());
  }
}

Decoding default_decoding(LearnerFamily family) {
  return family == LearnerFamily::knn_classifier ? Decoding::hamming_ternary : Decoding::euclidean;
}

EcocModel fit_pipeline(const Dataset& train, MatrixKind kind, const LearnerSpec& spec, Decoding decoding,
                       const PipelineOptions& options, const CodingMatrix* fixed) {
  std::optional<Standardizer> pre;
  const Dataset* data = &train;
  std::optional<Dataset> scaled;
  if (options.standardize) {
    pre = Standardizer::fit(train);
    scaled = pre->apply(train);
    data = &*scaled;
  }
  const CodingMatrix m = fixed ? *fixed : build_matrix(kind, *data, options);
  return train_ecoc(*data, m, spec, decoding, options.targets, std::move(pre));
}

}  // namespace csecoc
