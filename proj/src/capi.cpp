#include "csecoc/csecoc.h"

#include "csecoc/coding.hpp"
#include "csecoc/error.hpp"
#include "csecoc/eval.hpp"
#include "csecoc/oracle.hpp"
#include "csecoc/pipeline.hpp"
#include "csecoc/registry.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <sstream>
#include <string>

using namespace csecoc;
using nlohmann::json;

struct csecoc_dataset {
  Dataset data;
  std::string data_dir;
  std::string source;
};

struct csecoc_matrix {
  CodingMatrix m;
};

struct csecoc_model {
  std::optional<EcocModel> model;
  csecoc_matrix matrix;
  std::string method;
  LearnerSpec spec;
  Decoding decoding = Decoding::euclidean;
  PipelineOptions pipeline;
  std::string data_dir;
  std::string source;
  std::uint64_t data_fingerprint = 0;
  std::size_t rows = 0;
  std::vector<std::string> class_names;
};

struct csecoc_report {
  bool ok = true;
  std::string text;
  std::string json;
  std::size_t failures = 0;
};

namespace {

thread_local std::string last_error;

csecoc_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return CSECOC_ERR_INVALID_ARGUMENT;
    case ErrorCode::io: return CSECOC_ERR_IO;
    case ErrorCode::parse: return CSECOC_ERR_PARSE;
    case ErrorCode::data: return CSECOC_ERR_DATA;
    case ErrorCode::numeric: return CSECOC_ERR_NUMERIC;
    case ErrorCode::internal: return CSECOC_ERR_INTERNAL;
  }
  return CSECOC_ERR_INTERNAL;
}

template <class F>
csecoc_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return CSECOC_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    last_error = e.what();
    return CSECOC_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CSECOC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CSECOC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CSECOC_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::invalid_argument, std::string(what) + " is null");
}

MatrixKind kind_of(const char* method) {
  require(method, "method");
  const auto kind = parse_matrix_kind(method);
  if (!kind) fail(ErrorCode::invalid_argument, "unknown method '" + std::string(method) + "'");
  return *kind;
}

PipelineOptions pipeline_of(const csecoc_matrix_options& o) {
  if (!(o.eps > 0.0 && std::isfinite(o.eps))) fail(ErrorCode::invalid_argument, "eps must be > 0");
  if (o.random_candidates < 1) fail(ErrorCode::invalid_argument, "random candidates must be >= 1");
  PipelineOptions p;
  p.eps = o.eps;
  p.standardize = o.standardize != 0;
  p.random.seed = o.seed;
  p.random.candidates = o.random_candidates;
  if (o.targets) {
    const auto t = parse_target_mode(o.targets);
    if (!t) fail(ErrorCode::invalid_argument, "unknown target mode '" + std::string(o.targets) + "'");
    p.targets = *t;
  }
  return p;
}

LearnerSpec base_spec(const csecoc_learner_options& o) {
  LearnerSpec s;
  s.k = o.knn_k;
  if (o.gamma > 0.0) s.gamma = o.gamma;
  s.ridge_lambda = o.ridge_lambda;
  s.validate();
  return s;
}

std::vector<std::string> split_list(const char* text) {
  std::vector<std::string> out;
  if (!text) return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

const MatrixKind kAllMethods[] = {MatrixKind::ova,           MatrixKind::ovo,        MatrixKind::dense_random,
                                  MatrixKind::sparse_random, MatrixKind::decoc_like, MatrixKind::csecoc};

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t dataset_fingerprint(const Dataset& ds) {
  std::vector<double> y(ds.labels().begin(), ds.labels().end());
  return training_fingerprint(ds.features(), y);
}

json matrix_json(const CodingMatrix& m) {
  json values = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int l = 0; l < m.cols(); ++l) row.push_back(m.values(r, l));
    values.push_back(row);
  }
  json cols = json::array();
  for (const auto& c : m.columns) {
    cols.push_back({{"g1", c.g1}, {"g2", c.g2}, {"score", std::isnan(c.score) ? json() : json(c.score)},
                    {"parent", c.parent}});
  }
  return {{"kind", std::string(to_string(m.kind))}, {"class_names", m.class_names}, {"values", values},
          {"columns", cols}};
}

CodingMatrix matrix_from_json(const json& j) {
  CodingMatrix m;
  const auto kind = parse_matrix_kind(j.at("kind").get<std::string>());
  if (!kind) fail(ErrorCode::parse, "manifest: unknown matrix kind");
  m.kind = *kind;
  m.class_names = j.at("class_names").get<std::vector<std::string>>();
  const auto& values = j.at("values");
  const auto rows = static_cast<Eigen::Index>(values.size());
  const auto cols = rows ? static_cast<Eigen::Index>(values.at(0).size()) : 0;
  m.values.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = values.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) fail(ErrorCode::parse, "manifest: ragged matrix");
    for (Eigen::Index l = 0; l < cols; ++l) m.values(r, l) = row.at(static_cast<std::size_t>(l)).get<double>();
  }
  for (const auto& c : j.at("columns")) {
    ColumnInfo info;
    info.g1 = c.at("g1").get<ClassSet>();
    info.g2 = c.at("g2").get<ClassSet>();
    info.score = c.at("score").is_null() ? std::numeric_limits<double>::quiet_NaN() : c.at("score").get<double>();
    info.parent = c.at("parent").get<int>();
    m.columns.push_back(std::move(info));
  }
  return m;
}

void train_into(csecoc_model& out, const Dataset& ds, const CodingMatrix* fixed, MatrixKind kind) {
  out.model.emplace(fit_pipeline(ds, kind, out.spec, out.decoding, out.pipeline, fixed));
  out.matrix.m = out.model->matrix();
  out.data_fingerprint = dataset_fingerprint(ds);
  out.rows = ds.rows();
  out.class_names = ds.class_names();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::io, "cannot write '" + path + "'");
  f << text;
  if (!f) fail(ErrorCode::io, "write failed for '" + path + "'");
}

}  // namespace

extern "C" {

const char* csecoc_last_error(void) { return last_error.c_str(); }

const char* csecoc_version(void) { return "0.1.0"; }

csecoc_status csecoc_dataset_load(const char* data_dir, const char* name_or_path, csecoc_dataset** out) {
  return guard([&] {
    require(name_or_path, "dataset");
    require(out, "out");
    *out = nullptr;
    const std::filesystem::path dir = data_dir ? data_dir : "";
    const bool registered = std::filesystem::exists(dir / "datasets.json") &&
                            find_dataset(load_registry(dir), name_or_path).has_value();
    Dataset ds = resolve_dataset(dir, name_or_path, CsvSchema{});
    std::string source = registered ? std::string(name_or_path)
                                    : std::filesystem::absolute(name_or_path).lexically_normal().string();
    std::string abs_dir = registered ? std::filesystem::absolute(dir).lexically_normal().string() : std::string();
    *out = new csecoc_dataset{std::move(ds), std::move(abs_dir), std::move(source)};
  });
}

void csecoc_dataset_free(csecoc_dataset* ds) { delete ds; }

size_t csecoc_dataset_rows(const csecoc_dataset* ds) { return ds ? ds->data.rows() : 0; }

size_t csecoc_dataset_features(const csecoc_dataset* ds) { return ds ? ds->data.feature_count() : 0; }

int csecoc_dataset_classes(const csecoc_dataset* ds) { return ds ? ds->data.class_count() : 0; }

const char* csecoc_dataset_class_name(const csecoc_dataset* ds, int c) {
  if (!ds || c < 0 || c >= ds->data.class_count()) return nullptr;
  return ds->data.class_names()[static_cast<std::size_t>(c)].c_str();
}

int csecoc_dataset_label(const csecoc_dataset* ds, size_t row) {
  if (!ds || row >= ds->data.rows()) return -1;
  return ds->data.label(row);
}

const double* csecoc_dataset_row(const csecoc_dataset* ds, size_t row) {
  if (!ds || row >= ds->data.rows()) return nullptr;
  return ds->data.row(row).data();
}

void csecoc_matrix_options_init(csecoc_matrix_options* opts) {
  if (!opts) return;
  opts->eps = kDefaultEps;
  opts->standardize = 0;
  opts->seed = 42;
  opts->random_candidates = RandomCodeOptions{}.candidates;
  opts->targets = nullptr;
}

csecoc_status csecoc_matrix_build(const csecoc_dataset* ds, const char* method, const csecoc_matrix_options* opts,
                                  csecoc_matrix** out) {
  return guard([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = nullptr;
    csecoc_matrix_options o;
    csecoc_matrix_options_init(&o);
    if (opts) o = *opts;
    const PipelineOptions p = pipeline_of(o);
    const MatrixKind kind = kind_of(method);
    CodingMatrix m = p.standardize ? build_matrix(kind, Standardizer::fit(ds->data).apply(ds->data), p)
                                   : build_matrix(kind, ds->data, p);
    *out = new csecoc_matrix{std::move(m)};
  });
}

csecoc_status csecoc_matrix_read(const char* path, const char* kind, csecoc_matrix** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    std::optional<MatrixKind> k;
    if (kind) k = kind_of(kind);
    *out = new csecoc_matrix{read_matrix_csv(std::filesystem::path(path), k)};
  });
}

csecoc_status csecoc_matrix_write(const csecoc_matrix* m, const char* path) {
  return guard([&] {
    require(m, "matrix");
    require(path, "path");
    write_matrix_csv(m->m, std::filesystem::path(path));
  });
}

csecoc_status csecoc_matrix_write_notes(const csecoc_matrix* m, const char* path) {
  return guard([&] {
    require(m, "matrix");
    require(path, "path");
    write_matrix_notes(m->m, std::filesystem::path(path));
  });
}

void csecoc_matrix_free(csecoc_matrix* m) { delete m; }

int csecoc_matrix_rows(const csecoc_matrix* m) { return m ? m->m.rows() : 0; }

int csecoc_matrix_cols(const csecoc_matrix* m) { return m ? m->m.cols() : 0; }

double csecoc_matrix_value(const csecoc_matrix* m, int row, int col) {
  if (!m || row < 0 || col < 0 || row >= m->m.rows() || col >= m->m.cols()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return m->m.values(row, col);
}

const char* csecoc_matrix_kind(const csecoc_matrix* m) { return m ? to_string(m->m.kind).data() : nullptr; }

csecoc_status csecoc_matrix_validate(const csecoc_matrix* m, csecoc_report** out) {
  return guard([&] {
    require(m, "matrix");
    require(out, "out");
    *out = nullptr;
    const ValidityReport v = validate_matrix(m->m);
    auto r = std::make_unique<csecoc_report>();
    r->ok = v.ok();
    r->failures = v.violations.size();
    json j = {{"ok", v.ok()}, {"violations", v.violations}, {"notes", v.notes}};
    for (const auto& s : v.violations) r->text += "violation: " + s + "\n";
    for (const auto& s : v.notes) r->text += "note: " + s + "\n";
    if (v.ok()) r->text += "matrix valid\n";
    r->json = j.dump(2);
    *out = r.release();
  });
}

void csecoc_learner_options_init(csecoc_learner_options* opts) {
  if (!opts) return;
  const LearnerSpec d;
  opts->learner = "knn";
  opts->knn_k = d.k;
  opts->gamma = 0.0;
  opts->ridge_lambda = d.ridge_lambda;
  opts->decoding = nullptr;
}

csecoc_status csecoc_model_train(const csecoc_dataset* ds, const char* method, const csecoc_learner_options* learner,
                                 const csecoc_matrix_options* matrix, const csecoc_matrix* fixed,
                                 csecoc_model** out) {
  return guard([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = nullptr;
    csecoc_learner_options lo;
    csecoc_learner_options_init(&lo);
    if (learner) lo = *learner;
    csecoc_matrix_options mo;
    csecoc_matrix_options_init(&mo);
    if (matrix) mo = *matrix;

    const MatrixKind kind = fixed ? fixed->m.kind : kind_of(method);
    auto model = std::make_unique<csecoc_model>();
    model->method = std::string(to_string(kind));
    model->spec = learner_for_method(lo.learner ? lo.learner : "knn", kind, base_spec(lo));
    if (lo.decoding) {
      const auto d = parse_decoding(lo.decoding);
      if (!d) fail(ErrorCode::invalid_argument, "unknown decoding '" + std::string(lo.decoding) + "'");
      model->decoding = *d;
    } else {
      model->decoding = default_decoding(model->spec.family);
    }
    model->pipeline = pipeline_of(mo);
    model->data_dir = ds->data_dir;
    model->source = ds->source;
    train_into(*model, ds->data, fixed ? &fixed->m : nullptr, kind);
    *out = model.release();
  });
}

void csecoc_model_free(csecoc_model* model) { delete model; }

size_t csecoc_model_features(const csecoc_model* model) {
  return model && model->model && !model->model->learners().empty() ? model->model->learners().front()->feature_count()
                                                                      : 0;
}

int csecoc_model_classes(const csecoc_model* model) { return model ? static_cast<int>(model->class_names.size()) : 0; }

const char* csecoc_model_class_name(const csecoc_model* model, int c) {
  if (!model || c < 0 || c >= csecoc_model_classes(model)) return nullptr;
  return model->class_names[static_cast<std::size_t>(c)].c_str();
}

csecoc_status csecoc_model_predict(const csecoc_model* model, const double* x, size_t n, int* out_class) {
  return guard([&] {
    require(model, "model");
    require(x, "x");
    require(out_class, "out");
    if (n != csecoc_model_features(model)) fail(ErrorCode::invalid_argument, "feature count mismatch");
    *out_class = model->model->predict(std::span<const double>(x, n));
  });
}

csecoc_status csecoc_model_outputs(const csecoc_model* model, const double* x, size_t n, double* out) {
  return guard([&] {
    require(model, "model");
    require(x, "x");
    require(out, "out");
    if (n != csecoc_model_features(model)) fail(ErrorCode::invalid_argument, "feature count mismatch");
    const auto o = model->model->outputs(std::span<const double>(x, n));
    std::copy(o.begin(), o.end(), out);
  });
}

const csecoc_matrix* csecoc_model_matrix(const csecoc_model* model) { return model ? &model->matrix : nullptr; }

csecoc_status csecoc_model_write_manifest(const csecoc_model* model, const char* path) {
  return guard([&] {
    require(model, "model");
    require(path, "path");
    const auto& s = model->spec;
    json j = {
        {"format", "csecoc-model/1"},
        {"dataset",
         {{"data_dir", model->data_dir},
          {"source", model->source},
          {"rows", model->rows},
          {"fingerprint", hex(model->data_fingerprint)}}},
        {"method", model->method},
        {"learner",
         {{"family", std::string(to_string(s.family))},
          {"k", s.k},
          {"gamma", s.gamma ? json(*s.gamma) : json()},
          {"ridge_lambda", s.ridge_lambda}}},
        {"decoding", std::string(to_string(model->decoding))},
        {"pipeline",
         {{"eps", model->pipeline.eps},
          {"standardize", model->pipeline.standardize},
          {"targets", std::string(to_string(model->pipeline.targets))},
          {"seed", model->pipeline.random.seed},
          {"random_candidates", model->pipeline.random.candidates}}},
        {"matrix", matrix_json(model->matrix.m)},
    };
    write_text(path, j.dump(2) + "\n");
  });
}

csecoc_status csecoc_model_load_manifest(const char* path, csecoc_model** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open manifest '" + std::string(path) + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      fail(ErrorCode::parse, std::string(path) + ": " + e.what());
    }
    if (j.value("format", "") != "csecoc-model/1") fail(ErrorCode::parse, "not a model manifest");

    auto model = std::make_unique<csecoc_model>();
    const auto& d = j.at("dataset");
    model->data_dir = d.at("data_dir").get<std::string>();
    model->source = d.at("source").get<std::string>();
    model->method = j.at("method").get<std::string>();
    const auto& l = j.at("learner");
    const auto family = parse_learner_family(l.at("family").get<std::string>());
    if (!family) fail(ErrorCode::parse, "manifest: unknown learner family");
    model->spec.family = *family;
    model->spec.k = l.at("k").get<int>();
    if (!l.at("gamma").is_null()) model->spec.gamma = l.at("gamma").get<double>();
    model->spec.ridge_lambda = l.at("ridge_lambda").get<double>();
    model->spec.validate();
    const auto decoding = parse_decoding(j.at("decoding").get<std::string>());
    if (!decoding) fail(ErrorCode::parse, "manifest: unknown decoding");
    model->decoding = *decoding;
    const auto& p = j.at("pipeline");
    model->pipeline.eps = p.at("eps").get<double>();
    model->pipeline.standardize = p.at("standardize").get<bool>();
    const auto targets = parse_target_mode(p.at("targets").get<std::string>());
    if (!targets) fail(ErrorCode::parse, "manifest: unknown target mode");
    model->pipeline.targets = *targets;
    model->pipeline.random.seed = p.at("seed").get<std::uint64_t>();
    model->pipeline.random.candidates = p.at("random_candidates").get<int>();
    const CodingMatrix m = matrix_from_json(j.at("matrix"));

    const Dataset ds = resolve_dataset(model->data_dir, model->source, CsvSchema{});
    if (hex(dataset_fingerprint(ds)) != d.at("fingerprint").get<std::string>()) {
      fail(ErrorCode::data, "dataset '" + model->source + "' changed since the model was trained");
    }
    if (ds.class_names() != m.class_names) fail(ErrorCode::data, "manifest class names do not match the dataset");
    train_into(*model, ds, &m, m.kind);
    *out = model.release();
  });
}

void csecoc_benchmark_options_init(csecoc_benchmark_options* opts) {
  if (!opts) return;
  const BenchmarkConfig d;
  opts->data_dir = "data";
  opts->datasets = "all";
  opts->methods = "all";
  csecoc_learner_options_init(&opts->learner);
  opts->folds = d.folds;
  opts->repeats = d.repeats;
  opts->seed = d.seed;
  opts->eps = kDefaultEps;
  opts->standardize = 0;
  opts->leaky_matrix = 0;
  opts->workers = 1;
  opts->random_candidates = RandomCodeOptions{}.candidates;
  opts->targets = nullptr;
  opts->run_config_json = nullptr;
  opts->log = nullptr;
  opts->log_user = nullptr;
}

csecoc_status csecoc_benchmark_run(const csecoc_benchmark_options* opts, const char* json_path, const char* text_path,
                                   csecoc_report** out) {
  return guard([&] {
    require(opts, "options");
    if (out) *out = nullptr;
    if (opts->folds < 2) fail(ErrorCode::invalid_argument, "folds must be >= 2");
    if (opts->repeats < 1) fail(ErrorCode::invalid_argument, "repeats must be >= 1");
    if (opts->workers < 1) fail(ErrorCode::invalid_argument, "workers must be >= 1");

    BenchmarkConfig config;
    config.data_dir = opts->data_dir ? opts->data_dir : "data";
    config.folds = opts->folds;
    config.repeats = opts->repeats;
    config.seed = opts->seed;
    config.learner = opts->learner.learner ? opts->learner.learner : "knn";
    config.base = base_spec(opts->learner);
    learner_for_method(config.learner, MatrixKind::csecoc, config.base);

    csecoc_matrix_options mo;
    csecoc_matrix_options_init(&mo);
    mo.eps = opts->eps;
    mo.standardize = opts->standardize;
    mo.seed = opts->seed;
    mo.random_candidates = opts->random_candidates;
    mo.targets = opts->targets;
    config.cv.pipeline = pipeline_of(mo);
    config.cv.leaky_matrix = opts->leaky_matrix != 0;
    config.cv.workers = opts->workers;

    for (const auto& name : split_list(opts->methods)) {
      if (name == "all") {
        config.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
      } else {
        config.methods.push_back(kind_of(name.c_str()));
      }
    }
    for (const auto& name : split_list(opts->datasets)) {
      if (name == "all") {
        for (const auto& e : load_registry(config.data_dir)) config.datasets.push_back(e.name);
      } else {
        config.datasets.push_back(name);
      }
    }
    if (opts->run_config_json) {
      try {
        config.run_config = json::parse(opts->run_config_json);
      } catch (const json::exception& e) {
        fail(ErrorCode::invalid_argument, std::string("run config is not JSON: ") + e.what());
      }
    }

    LogFn log;
    if (opts->log) {
      log = [opts](std::string_view line) { opts->log(std::string(line).c_str(), opts->log_user); };
    }
    const EvalReport report = benchmark(config, log);
    if (json_path || text_path) {
      write_report(report, json_path ? json_path : "", text_path ? text_path : "");
    }
    if (out) {
      auto r = std::make_unique<csecoc_report>();
      r->ok = report.failures.empty();
      r->failures = report.failures.size();
      r->text = report_table(report);
      r->json = report_json(report).dump(2);
      *out = r.release();
    }
  });
}

csecoc_status csecoc_oracle_check(const csecoc_dataset* ds, double eps, uint64_t seed, const csecoc_matrix* matrix,
                                  csecoc_report** out) {
  return guard([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = nullptr;
    if (!(eps > 0.0 && std::isfinite(eps))) fail(ErrorCode::invalid_argument, "eps must be > 0");
    oracle::Options o;
    o.eps = eps;
    o.seed = seed;
    if (matrix) o.matrix = matrix->m;
    const oracle::Report rep = oracle::run_checks(ds->data, o);
    auto r = std::make_unique<csecoc_report>();
    r->ok = rep.ok();
    r->text = rep.text();
    json checks = json::array();
    for (const auto& c : rep.checks) {
      r->failures += (!c.passed && c.hard) ? 1 : 0;
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"hard", c.hard}, {"detail", c.detail}});
    }
    r->json = json{{"ok", rep.ok()}, {"checks", checks}}.dump(2);
    *out = r.release();
  });
}

void csecoc_report_free(csecoc_report* report) { delete report; }

int csecoc_report_ok(const csecoc_report* report) { return report && report->ok ? 1 : 0; }

const char* csecoc_report_text(const csecoc_report* report) { return report ? report->text.c_str() : ""; }

const char* csecoc_report_json(const csecoc_report* report) { return report ? report->json.c_str() : ""; }

size_t csecoc_report_failure_count(const csecoc_report* report) { return report ? report->failures : 0; }

}  // extern "C"
