#include "doctest.h"
#include "helpers.hpp"

#include "csecoc/oracle.hpp"
#include "csecoc/pipeline.hpp"

using namespace csecoc;

namespace {

CodingMatrix hard_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  CodingMatrix m;
  m.kind = MatrixKind::ova;
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(rows.begin()->size());
  m.values.resize(nr, nc);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m.values(r, c++) = v;
    m.class_names.push_back("c" + std::to_string(r));
    ++r;
  }
  m.columns.resize(static_cast<std::size_t>(nc));
  return m;
}

Dataset balanced(int nc, int per_class) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < per_class; ++i) {
      rows.push_back({double(c) * 10 + 0.01 * i, double(i % 7)});
      labels.push_back(c);
    }
  }
  return testing::make_dataset(rows, labels);
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("ova column keeps every sample with +-1 targets") {
    const Dataset ds = balanced(3, 10);
    const CodingMatrix m = build_baseline(MatrixKind::ova, 3, {}, ds.class_names());
    const auto set = column_training_set(ds, m, 1);
    CHECK(set.rows.size() == 30);
    for (std::size_t i = 0; i < set.rows.size(); ++i) {
      CHECK(set.targets[i] == (ds.label(set.rows[i]) == 1 ? 1.0 : -1.0));
    }
  }

  TEST_CASE("zero entries drop their classes from training") {
    const Dataset ds = balanced(6, 100);
    const CodingMatrix m = build_baseline(MatrixKind::ovo, 6, {}, ds.class_names());
    for (int l = 0; l < m.cols(); ++l) {
      const auto set = column_training_set(ds, m, static_cast<std::size_t>(l));
      CHECK(set.rows.size() == 200);
      std::size_t direct = 0;
      for (std::size_t i = 0; i < ds.rows(); ++i) direct += m.values(ds.label(i), l) != 0.0;
      CHECK(direct == 200);
    }
  }

  TEST_CASE("soft targets carry the coverage value; sign mode uses +-1") {
    const Dataset ds = testing::random_dataset(12, 4, 10, 30, 2, 1.0);
    const CodingMatrix m = build_csecoc(ds);
    for (int l = 0; l < m.cols(); ++l) {
      const auto set = column_training_set(ds, m, static_cast<std::size_t>(l));
      const auto sign = column_training_set(ds, m, static_cast<std::size_t>(l), TargetMode::sign);
      CHECK(set.rows == sign.rows);
      for (std::size_t i = 0; i < set.rows.size(); ++i) {
        const double v = m.values(ds.label(set.rows[i]), l);
        CHECK(set.targets[i] == v);
        CHECK(sign.targets[i] == (v > 0 ? 1.0 : -1.0));
      }
    }
  }

  TEST_CASE("a column whose targets share one sign is degenerate") {
    const Dataset ds = balanced(3, 5);
    CodingMatrix m = hard_matrix({{1, 1}, {1, -1}, {0, 1}});
    CHECK_THROWS_WITH(column_training_set(ds, m, 0), doctest::Contains("degenerate column"));
  }

  TEST_CASE("ensemble sizes of trained models") {
    LearnerSpec reg;
    reg.family = LearnerFamily::knn_regressor;
    LearnerSpec cls;
    cls.family = LearnerFamily::knn_classifier;
    const Dataset iris = testing::load("iris");
    CHECK(train_ecoc(iris, build_csecoc(iris), reg, Decoding::euclidean).learners().size() == 2);
    const Dataset wine = testing::load("wine");
    const CodingMatrix ovo = build_baseline(MatrixKind::ovo, 3, {}, wine.class_names());
    CHECK(train_ecoc(wine, ovo, cls, Decoding::hamming_ternary).learners().size() == 3);
    const Dataset six = testing::random_dataset(31, 6, 10, 30, 3);
    CHECK(train_ecoc(six, build_csecoc(six), reg, Decoding::euclidean).learners().size() == 5);
  }

  TEST_CASE("decode examples") {
    const CodingMatrix m = hard_matrix({{1, -1}, {-1, 1}});
    CHECK(decode(std::vector<double>{1, -1}, m, Decoding::euclidean) == 0);
    CHECK(decode(std::vector<double>{-1, 1}, m, Decoding::euclidean) == 1);
    CHECK(decode(std::vector<double>{0.9, -0.8}, m, Decoding::euclidean) == 0);
    CHECK(decode(std::vector<double>{0, 0}, m, Decoding::euclidean) == 0);
    CHECK(decode(std::vector<double>{0, 0}, m, Decoding::hamming_ternary) == 0);
    CHECK_THROWS(decode(std::vector<double>{std::nan(""), 0}, m, Decoding::euclidean));
  }

  TEST_CASE("hamming decoding charges half for zero entries") {
    const CodingMatrix m = hard_matrix({{1, 1, 0}, {-1, 0, 1}, {0, -1, -1}});
    CHECK(decode(std::vector<double>{1, 1, -1}, m, Decoding::hamming_ternary) == 0);
    CHECK(decode(std::vector<double>{-1, -1, 1}, m, Decoding::hamming_ternary) == 1);
    CHECK(decode(std::vector<double>{1, -1, -1}, m, Decoding::hamming_ternary) == 2);
  }

  TEST_CASE("a constant column with matching output does not change decoding") {
    Rng rng(21);
    const Dataset ds = testing::random_dataset(22, 5, 10, 20, 2);
    const CodingMatrix m = build_csecoc(ds);
    CodingMatrix wider = m;
    wider.values.conservativeResize(Eigen::NoChange, m.cols() + 1);
    wider.values.col(m.cols()).setConstant(0.37);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> o(static_cast<std::size_t>(m.cols()));
      for (double& v : o) v = 2 * rng.uniform() - 1;
      const int a = decode(o, m, Decoding::euclidean);
      o.push_back(0.37);
      CHECK(decode(o, wider, Decoding::euclidean) == a);
    }
  }

  TEST_CASE("euclidean and hamming agree on full +-1 codes with sign outputs") {
    Rng rng(23);
    for (MatrixKind k : {MatrixKind::ova, MatrixKind::dense_random}) {
      const CodingMatrix m = build_baseline(k, 5);
      for (int t = 0; t < 200; ++t) {
        std::vector<double> o(static_cast<std::size_t>(m.cols()));
        for (double& v : o) v = rng.below(2) ? 1.0 : -1.0;
        CHECK(decode(o, m, Decoding::euclidean) == decode(o, m, Decoding::hamming_ternary));
      }
    }
  }

  TEST_CASE("single soft column flips at the midpoint") {
    CodingMatrix m = hard_matrix({{0.8}, {-0.6}});
    m.kind = MatrixKind::csecoc;
    CHECK(decode(std::vector<double>{0.1 + 1e-9}, m, Decoding::euclidean) == 0);
    CHECK(decode(std::vector<double>{0.1 - 1e-9}, m, Decoding::euclidean) == 1);
  }

  TEST_CASE("perfect learners recover every class") {
    for (const char* name : {"iris", "wine", "vehicle"}) {
      const Dataset ds = testing::load(name);
      for (MatrixKind k : {MatrixKind::ova, MatrixKind::ovo, MatrixKind::dense_random, MatrixKind::sparse_random}) {
        const CodingMatrix m = build_baseline(k, ds.class_count(), {}, ds.class_names());
        CHECK(oracle::perfect_learner_accuracy(ds, m, Decoding::hamming_ternary) == 1.0);
        CHECK(oracle::perfect_learner_accuracy(ds, m, Decoding::euclidean) == 1.0);
      }
      CHECK(oracle::perfect_learner_accuracy(ds, build_decoc_like(ds), Decoding::hamming_ternary) == 1.0);
      CHECK(oracle::perfect_learner_accuracy(ds, build_csecoc(ds), Decoding::euclidean) == 1.0);
    }
  }

  TEST_CASE("model invariants") {
    const Dataset ds = testing::load("iris");
    LearnerSpec reg;
    const CodingMatrix soft = build_csecoc(ds);
    CHECK_THROWS(train_ecoc(ds, soft, reg, Decoding::hamming_ternary));
    const CodingMatrix ova = build_baseline(MatrixKind::ova, 3, {}, ds.class_names());
    CHECK_THROWS(train_ecoc(ds, ova, reg, Decoding::hamming_ternary));
    CHECK_THROWS(EcocModel(ova, {}, Decoding::euclidean));
  }

  TEST_CASE("csecoc with knn regressors fits iris training data") {
    const Dataset ds = testing::load("iris");
    PipelineOptions opts;
    LearnerSpec spec;
    const EcocModel model = fit_pipeline(ds, MatrixKind::csecoc, spec, Decoding::euclidean, opts);
    const auto preds = model.predict(ds.features());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) correct += preds[i] == ds.label(i);
    CHECK(static_cast<double>(correct) / 150.0 >= 0.90);
    CHECK(model.predict(ds.features()) == preds);
    const auto o1 = model.outputs(ds.row(3));
    const auto o2 = model.outputs(ds.row(3));
    CHECK(o1 == o2);
    for (double v : o1) CHECK(std::abs(v) <= 1.0);
  }

  TEST_CASE("standardized pipeline applies training statistics to queries") {
    const Dataset ds = testing::load("wine");
    PipelineOptions opts;
    opts.standardize = true;
    LearnerSpec spec;
    spec.family = LearnerFamily::knn_classifier;
    const EcocModel model = fit_pipeline(ds, MatrixKind::ova, spec, Decoding::hamming_ternary, opts);
    REQUIRE(model.preprocessing().has_value());
    const auto scaled = model.preprocessing()->apply(ds);
    std::vector<TrainedLearner> learners = model.learners();
    CHECK(learners.front()->feature_count() == 13);
    const auto preds = model.predict(ds.features());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.rows(); ++i) correct += preds[i] == ds.label(i);
    CHECK(correct >= 170);
    (void)scaled;
  }

  TEST_CASE("default decoding per learner family") {
    CHECK(default_decoding(LearnerFamily::knn_classifier) == Decoding::hamming_ternary);
    CHECK(default_decoding(LearnerFamily::knn_regressor) == Decoding::euclidean);
    CHECK(default_decoding(LearnerFamily::kernel_ridge) == Decoding::euclidean);
  }
}
