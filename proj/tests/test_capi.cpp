#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "csecoc/csecoc.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

const char* kData = CSECOC_TEST_DATA_DIR;

csecoc_dataset* load(const char* name) {
  csecoc_dataset* ds = nullptr;
  REQUIRE(csecoc_dataset_load(kData, name, &ds) == CSECOC_OK);
  return ds;
}

}  // namespace

TEST_CASE("dataset handle") {
  csecoc_dataset* ds = load("iris");
  CHECK(csecoc_dataset_rows(ds) == 150);
  CHECK(csecoc_dataset_features(ds) == 4);
  CHECK(csecoc_dataset_classes(ds) == 3);
  CHECK(std::string(csecoc_dataset_class_name(ds, 0)) == "setosa");
  CHECK(csecoc_dataset_row(ds, 150) == nullptr);
  CHECK(csecoc_dataset_label(ds, 0) == 0);
  csecoc_dataset_free(ds);
}

TEST_CASE("error codes and messages") {
  csecoc_dataset* ds = nullptr;
  CHECK(csecoc_dataset_load(kData, "/no/such/file.csv", &ds) == CSECOC_ERR_IO);
  CHECK(ds == nullptr);
  CHECK(std::string(csecoc_last_error()).find("/no/such/file.csv") != std::string::npos);
  CHECK(csecoc_dataset_load(kData, nullptr, &ds) == CSECOC_ERR_INVALID_ARGUMENT);

  ds = load("iris");
  CHECK(std::string(csecoc_last_error()).empty());
  csecoc_matrix* m = nullptr;
  CHECK(csecoc_matrix_build(ds, "svm", nullptr, &m) == CSECOC_ERR_INVALID_ARGUMENT);
  csecoc_matrix_options bad;
  csecoc_matrix_options_init(&bad);
  bad.eps = -1;
  CHECK(csecoc_matrix_build(ds, "csecoc", &bad, &m) == CSECOC_ERR_INVALID_ARGUMENT);
  csecoc_matrix_options_init(&bad);
  bad.targets = "soft";
  CHECK(csecoc_matrix_build(ds, "csecoc", &bad, &m) == CSECOC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(csecoc_last_error()).find("target mode") != std::string::npos);
  csecoc_dataset_free(ds);
}

TEST_CASE("matrix build, validate, write and read") {
  csecoc_dataset* ds = load("iris");
  csecoc_matrix* m = nullptr;
  REQUIRE(csecoc_matrix_build(ds, "csecoc", nullptr, &m) == CSECOC_OK);
  CHECK(csecoc_matrix_rows(m) == 3);
  CHECK(csecoc_matrix_cols(m) == 2);
  CHECK(std::string(csecoc_matrix_kind(m)) == "csecoc");
  CHECK(std::isnan(csecoc_matrix_value(m, 5, 0)));

  csecoc_report* rep = nullptr;
  REQUIRE(csecoc_matrix_validate(m, &rep) == CSECOC_OK);
  CHECK(csecoc_report_ok(rep) == 1);
  csecoc_report_free(rep);

  const auto path = (std::filesystem::temp_directory_path() / "csecoc_capi_matrix.csv").string();
  REQUIRE(csecoc_matrix_write(m, path.c_str()) == CSECOC_OK);
  csecoc_matrix* back = nullptr;
  REQUIRE(csecoc_matrix_read(path.c_str(), nullptr, &back) == CSECOC_OK);
  CHECK(csecoc_matrix_cols(back) == 2);
  CHECK(std::abs(csecoc_matrix_value(back, 1, 0) - csecoc_matrix_value(m, 1, 0)) < 1e-6);
  std::filesystem::remove(path);
  csecoc_matrix_free(back);
  csecoc_matrix_free(m);
  csecoc_dataset_free(ds);
}

TEST_CASE("train, predict, manifest round trip") {
  csecoc_dataset* ds = load("wine");
  csecoc_learner_options lo;
  csecoc_learner_options_init(&lo);
  csecoc_matrix_options mo;
  csecoc_matrix_options_init(&mo);
  mo.standardize = 1;
  csecoc_model* model = nullptr;
  REQUIRE(csecoc_model_train(ds, "csecoc", &lo, &mo, nullptr, &model) == CSECOC_OK);
  CHECK(csecoc_model_features(model) == 13);
  CHECK(csecoc_model_classes(model) == 3);
  CHECK(csecoc_matrix_cols(csecoc_model_matrix(model)) == 2);

  std::vector<int> first;
  for (std::size_t i = 0; i < csecoc_dataset_rows(ds); ++i) {
    int c = -1;
    REQUIRE(csecoc_model_predict(model, csecoc_dataset_row(ds, i), 13, &c) == CSECOC_OK);
    first.push_back(c);
  }
  int c = 0;
  CHECK(csecoc_model_predict(model, csecoc_dataset_row(ds, 0), 12, &c) == CSECOC_ERR_INVALID_ARGUMENT);

  const auto path = (std::filesystem::temp_directory_path() / "csecoc_capi_model.json").string();
  REQUIRE(csecoc_model_write_manifest(model, path.c_str()) == CSECOC_OK);
  csecoc_model* again = nullptr;
  REQUIRE(csecoc_model_load_manifest(path.c_str(), &again) == CSECOC_OK);
  for (std::size_t i = 0; i < csecoc_dataset_rows(ds); ++i) {
    int p = -1;
    REQUIRE(csecoc_model_predict(again, csecoc_dataset_row(ds, i), 13, &p) == CSECOC_OK);
    CHECK(p == first[i]);
  }
  std::filesystem::remove(path);
  csecoc_model_free(again);
  csecoc_model_free(model);
  csecoc_dataset_free(ds);
}

TEST_CASE("benchmark and oracle reports") {
  csecoc_benchmark_options b;
  csecoc_benchmark_options_init(&b);
  b.data_dir = kData;
  b.datasets = "iris";
  b.methods = "ova,csecoc";
  b.folds = 3;
  b.repeats = 1;
  csecoc_report* rep = nullptr;
  REQUIRE(csecoc_benchmark_run(&b, nullptr, nullptr, &rep) == CSECOC_OK);
  CHECK(csecoc_report_ok(rep) == 1);
  CHECK(std::string(csecoc_report_text(rep)).find("csecoc") != std::string::npos);
  CHECK(std::string(csecoc_report_json(rep)).find("\"rows\"") != std::string::npos);
  csecoc_report_free(rep);

  b.methods = "ova,bogus";
  CHECK(csecoc_benchmark_run(&b, nullptr, nullptr, &rep) == CSECOC_ERR_INVALID_ARGUMENT);

  csecoc_dataset* ds = load("iris");
  REQUIRE(csecoc_oracle_check(ds, 1e-9, 42, nullptr, &rep) == CSECOC_OK);
  CHECK(csecoc_report_ok(rep) == 1);
  CHECK(csecoc_report_failure_count(rep) == 0);
  csecoc_report_free(rep);
  csecoc_dataset_free(ds);
}
