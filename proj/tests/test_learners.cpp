#include "doctest.h"
#include "helpers.hpp"

#include "csecoc/error.hpp"
#include "csecoc/learners.hpp"

#include <algorithm>
#include <numeric>

using namespace csecoc;

namespace {

FeatureMatrix random_points(Rng& rng, int n, int d) {
  FeatureMatrix x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = 4.0 * rng.uniform() - 2.0;
  }
  return x;
}

std::vector<double> random_targets(Rng& rng, int n) {
  std::vector<double> y(static_cast<std::size_t>(n));
  for (double& v : y) v = 2.0 * rng.uniform() - 1.0;
  return y;
}

// Full sort of all training points by (distance, index).
double full_sort_knn(const FeatureMatrix& x, const std::vector<double>& y, std::span<const double> q, int k) {
  std::vector<std::size_t> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> d(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) s += (x(static_cast<Eigen::Index>(i), j) - q[static_cast<std::size_t>(j)]) * (x(static_cast<Eigen::Index>(i), j) - q[static_cast<std::size_t>(j)]);
    d[i] = s;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  double sum = 0.0;
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  for (std::size_t i = 0; i < kk; ++i) sum += y[order[i]];
  return sum / static_cast<double>(kk);
}

}  // namespace

TEST_SUITE("learners") {
  TEST_CASE("kernel ridge interpolates at lambda 0") {
    Rng rng(1);
    const FeatureMatrix x = random_points(rng, 25, 3);
    const auto y = random_targets(rng, 25);
    LearnerSpec spec;
    spec.family = LearnerFamily::kernel_ridge;
    spec.ridge_lambda = 0.0;
    spec.gamma = 2.0;
    const auto model = fit(spec, x, y);
    for (int i = 0; i < 25; ++i) {
      const std::span<const double> row(x.data() + i * 3, 3);
      CHECK(std::abs(model->predict(row) - y[static_cast<std::size_t>(i)]) <= 1e-6);
    }
  }

  TEST_CASE("kernel ridge at lambda 0 on duplicated points is reported as singular") {
    FeatureMatrix x(3, 1);
    x << 0.0, 0.0, 1.0;
    LearnerSpec spec;
    spec.family = LearnerFamily::kernel_ridge;
    spec.ridge_lambda = 0.0;
    try {
      fit(spec, x, std::vector<double>{1.0, -1.0, 1.0});
      FAIL("expected a numeric error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::numeric);
      CHECK(std::string(e.what()).find("ridge_lambda > 0") != std::string::npos);
    }
  }

  TEST_CASE("kernel ridge shares one factorization across targets") {
    Rng rng(2);
    const FeatureMatrix x = random_points(rng, 30, 2);
    const auto y1 = random_targets(rng, 30);
    const auto y2 = random_targets(rng, 30);
    LearnerSpec spec;
    spec.family = LearnerFamily::kernel_ridge;
    const auto both = fit_many(spec, x, {y1, y2});
    const auto a = fit(spec, x, y1);
    const auto b = fit(spec, x, y2);
    const std::vector<double> q{0.3, -0.7};
    CHECK(both[0]->predict(q) == doctest::Approx(a->predict(q)).epsilon(1e-12));
    CHECK(both[1]->predict(q) == doctest::Approx(b->predict(q)).epsilon(1e-12));
  }

  TEST_CASE("kernel ridge is continuous in the query") {
    Rng rng(3);
    const FeatureMatrix x = random_points(rng, 40, 2);
    const auto y = random_targets(rng, 40);
    LearnerSpec spec;
    spec.family = LearnerFamily::kernel_ridge;
    const auto model = fit(spec, x, y);
    for (int t = 0; t < 50; ++t) {
      const std::vector<double> q{4 * rng.uniform() - 2, 4 * rng.uniform() - 2};
      const std::vector<double> q2{q[0] + 1e-7, q[1] - 1e-7};
      CHECK(std::abs(model->predict(q) - model->predict(q2)) < 1e-4);
    }
  }

  TEST_CASE("knn with k = n averages every target") {
    Rng rng(4);
    const FeatureMatrix x = random_points(rng, 5, 2);
    const std::vector<double> y{0.1, 0.4, -0.3, 0.9, 1.0};
    const KnnModel m(x, y, 5, false);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 5.0;
    for (int t = 0; t < 10; ++t) {
      const std::vector<double> q{rng.uniform(), rng.uniform()};
      CHECK(m.predict(q) == doctest::Approx(mean));
    }
  }

  TEST_CASE("knn query on a training point with constant neighbours") {
    FeatureMatrix x(7, 1);
    x << 0, 0.1, 0.2, -0.1, -0.2, 5, 6;
    const std::vector<double> y{0.86, 0.86, 0.86, 0.86, 0.86, -1, -1};
    const KnnModel m(x, y, 5, false);
    const std::vector<double> q{0.0};
    CHECK(m.predict(q) == doctest::Approx(0.86));
  }

  TEST_CASE("knn classifier majority and tie") {
    FeatureMatrix x(5, 1);
    x << 0, 1, 2, 3, 4;
    const KnnModel m(x, {1, 1, 1, -1, -1}, 5, true);
    CHECK(m.predict(std::vector<double>{2.0}) == 1.0);
    const KnnModel tie(x, {1, 1, -1, -1, 1}, 4, true);
    CHECK(tie.predict(std::vector<double>{1.5}) == 1.0);
    CHECK_THROWS(KnnModel(x, {1, 0.5, 1, -1, -1}, 3, true));
  }

  TEST_CASE("knn regressor matches a full-sort oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 5 + static_cast<int>(rng.below(60));
      const FeatureMatrix x = random_points(rng, n, 3);
      const auto y = random_targets(rng, n);
      const int k = 1 + static_cast<int>(rng.below(9));
      const KnnModel m(x, y, k, false);
      for (int t = 0; t < 20; ++t) {
        const std::vector<double> q{4 * rng.uniform() - 2, 4 * rng.uniform() - 2, 4 * rng.uniform() - 2};
        CHECK(m.predict(q) == doctest::Approx(full_sort_knn(x, y, q, k)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("knn ties go to the lower training index") {
    FeatureMatrix x(4, 1);
    x << 1, -1, 1, -1;
    const KnnModel m(x, {0.2, 0.4, 0.6, 0.8}, 1, false);
    CHECK(m.predict(std::vector<double>{0.0}) == 0.2);
    CHECK(m.neighbours(std::vector<double>{0.0}) == std::vector<std::size_t>{0});
  }

  TEST_CASE("knn is invariant to training order and stays within target range") {
    Rng rng(6);
    const FeatureMatrix x = random_points(rng, 40, 2);
    const auto y = random_targets(rng, 40);
    std::vector<std::size_t> perm(40);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    FeatureMatrix px(40, 2);
    std::vector<double> py(40);
    for (std::size_t i = 0; i < 40; ++i) {
      px.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
      py[i] = y[perm[i]];
    }
    const KnnModel a(x, y, 5, false), b(px, py, 5, false);
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    for (int t = 0; t < 50; ++t) {
      const std::vector<double> q{4 * rng.uniform() - 2, 4 * rng.uniform() - 2};
      CHECK(a.predict(q) == doctest::Approx(b.predict(q)).epsilon(1e-12));
      CHECK(a.predict(q) >= lo);
      CHECK(a.predict(q) <= hi);
    }
  }

  TEST_CASE("fitting twice gives identical predictions") {
    Rng rng(7);
    const FeatureMatrix x = random_points(rng, 30, 2);
    const auto y = random_targets(rng, 30);
    for (LearnerFamily f : {LearnerFamily::knn_regressor, LearnerFamily::kernel_ridge}) {
      LearnerSpec spec;
      spec.family = f;
      const auto a = fit(spec, x, y);
      const auto b = fit(spec, x, y);
      CHECK(a->fingerprint() == b->fingerprint());
      for (int t = 0; t < 20; ++t) {
        const std::vector<double> q{rng.uniform(), rng.uniform()};
        CHECK(a->predict(q) == b->predict(q));
      }
    }
  }

  TEST_CASE("spec validation and defaults") {
    LearnerSpec s;
    CHECK(s.gamma_for(4) == 0.25);
    s.k = 0;
    CHECK_THROWS(s.validate());
    s.k = 5;
    s.ridge_lambda = -1;
    CHECK_THROWS(s.validate());
    CHECK(parse_learner_family("kernel_ridge") == LearnerFamily::kernel_ridge);
    CHECK_FALSE(parse_learner_family("svm").has_value());
  }
}
