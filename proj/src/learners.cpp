#include "csecoc/learners.hpp"

#include "csecoc/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace csecoc {

std::string_view to_string(LearnerFamily family) {
  switch (family) {
    case LearnerFamily::knn_regressor: return "knn_regressor";
    case LearnerFamily::knn_classifier: return "knn_classifier";
    case LearnerFamily::kernel_ridge: return "kernel_ridge";
  }
  return "unknown";
}

std::optional<LearnerFamily> parse_learner_family(std::string_view name) {
  if (name == "knn_regressor") return LearnerFamily::knn_regressor;
  if (name == "knn_classifier") return LearnerFamily::knn_classifier;
  if (name == "kernel_ridge") return LearnerFamily::kernel_ridge;
  return std::nullopt;
}

void LearnerSpec::validate() const {
  if (k < 1) fail(ErrorCode::invalid_argument, "knn k must be >= 1");
  if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma))) {
    fail(ErrorCode::invalid_argument, "gamma must be > 0");
  }
  if (!(ridge_lambda >= 0.0 && std::isfinite(ridge_lambda))) {
    fail(ErrorCode::invalid_argument, "ridge lambda must be >= 0");
  }
}

double LearnerSpec::gamma_for(std::size_t feature_count) const {
  if (gamma) return *gamma;
  return 1.0 / static_cast<double>(std::max<std::size_t>(feature_count, 1));
}

std::uint64_t training_fingerprint(const FeatureMatrix& x, std::span<const double> y) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const double* p, std::size_t n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  feed(x.data(), static_cast<std::size_t>(x.size()));
  feed(y.data(), y.size());
  return h;
}

namespace {

void check_inputs(const FeatureMatrix& x, std::span<const double> y) {
  if (x.rows() < 1) fail(ErrorCode::invalid_argument, "cannot fit on zero rows");
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    fail(ErrorCode::invalid_argument, "feature rows and target count differ");
  }
  if (!x.allFinite()) fail(ErrorCode::numeric, "non-finite training features");
  for (double v : y) {
    if (!std::isfinite(v)) fail(ErrorCode::numeric, "non-finite training target");
  }
}

void check_query(std::span<const double> q, std::size_t expected) {
  if (q.size() != expected) fail(ErrorCode::invalid_argument, "query length does not match feature count");
}

}  // namespace

KnnModel::KnnModel(FeatureMatrix x, std::vector<double> y, int k, bool classifier)
    : x_(std::move(x)), y_(std::move(y)), k_(k), classifier_(classifier) {
  check_inputs(x_, y_);
  if (k_ < 1) fail(ErrorCode::invalid_argument, "knn k must be >= 1");
  if (classifier_) {
    for (double v : y_) {
      if (v != 1.0 && v != -1.0) fail(ErrorCode::invalid_argument, "knn classifier labels must be +-1");
    }
  }
  fingerprint_ = training_fingerprint(x_, y_);
}

std::vector<std::size_t> KnnModel::neighbours(std::span<const double> q) const {
  check_query(q, feature_count());
  const auto n = static_cast<std::size_t>(x_.rows());
  const std::size_t d = feature_count();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x_.data() + i * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double t = row[j] - q[j];
      s += t * t;
    }
    dist[i] = {s, i};
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

double KnnModel::predict(std::span<const double> q) const {
  const auto nn = neighbours(q);
  double sum = 0.0;
  for (std::size_t i : nn) sum += y_[i];
  if (classifier_) return sum >= 0.0 ? 1.0 : -1.0;
  return sum / static_cast<double>(nn.size());
}

KernelRidgeModel::KernelRidgeModel(std::shared_ptr<const FeatureMatrix> x, Vector alpha, double gamma,
                                   std::uint64_t fingerprint)
    : x_(std::move(x)), alpha_(std::move(alpha)), gamma_(gamma), fingerprint_(fingerprint) {}

double KernelRidgeModel::predict(std::span<const double> q) const {
  check_query(q, feature_count());
  const std::size_t d = feature_count();
  double out = 0.0;
  for (Eigen::Index i = 0; i < x_->rows(); ++i) {
    const double* row = x_->data() + static_cast<std::size_t>(i) * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double t = row[j] - q[j];
      s += t * t;
    }
    out += alpha_(i) * std::exp(-gamma_ * s);
  }
  return out;
}

Eigen::MatrixXd rbf_gram(const FeatureMatrix& x, double gamma) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

std::vector<TrainedLearner> fit_many(const LearnerSpec& spec, const FeatureMatrix& x,
                                     const std::vector<std::vector<double>>& targets) {
  spec.validate();
  for (const auto& y : targets) check_inputs(x, y);
  std::vector<TrainedLearner> out;
  out.reserve(targets.size());

  if (spec.family != LearnerFamily::kernel_ridge) {
    const bool classifier = spec.family == LearnerFamily::knn_classifier;
    for (const auto& y : targets) out.push_back(std::make_shared<KnnModel>(x, y, spec.k, classifier));
    return out;
  }

  const double gamma = spec.gamma_for(static_cast<std::size_t>(x.cols()));
  Eigen::MatrixXd system = rbf_gram(x, gamma);
  system.diagonal().array() += spec.ridge_lambda;
  const auto n = x.rows();
  Eigen::MatrixXd rhs(n, static_cast<Eigen::Index>(targets.size()));
  for (std::size_t t = 0; t < targets.size(); ++t) {
    rhs.col(static_cast<Eigen::Index>(t)) = Eigen::Map<const Vector>(targets[t].data(), n);
  }

  Eigen::MatrixXd alpha;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() == Eigen::Success) {
    alpha = llt.solve(rhs);
  } else {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      fail(ErrorCode::numeric, "kernel system is numerically singular; use ridge_lambda > 0");
    }
    alpha = ldlt.solve(rhs);
  }
  const double residual = (system * alpha - rhs).norm();
  if (!alpha.allFinite() || residual > 1e-6 * std::max(1.0, rhs.norm())) {
    fail(ErrorCode::numeric, "kernel system is numerically singular; use ridge_lambda > 0");
  }

  auto shared_x = std::make_shared<const FeatureMatrix>(x);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    out.push_back(std::make_shared<KernelRidgeModel>(shared_x, alpha.col(static_cast<Eigen::Index>(t)),
                                                     gamma, training_fingerprint(x, targets[t])));
  }
  return out;
}

TrainedLearner fit(const LearnerSpec& spec, const FeatureMatrix& x, std::span<const double> y) {
  return fit_many(spec, x, {std::vector<double>(y.begin(), y.end())}).front();
}

}  // namespace csecoc
