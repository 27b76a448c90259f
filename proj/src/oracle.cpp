#include "csecoc/oracle.hpp"

#include "csecoc/error.hpp"
#include "csecoc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace csecoc::oracle {

namespace {

double sq_dist(std::span<const double> a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

std::vector<double> mean_of(const Dataset& ds, const ClassSet& g) {
  std::vector<double> sum(ds.feature_count(), 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    if (std::find(g.begin(), g.end(), ds.label(i)) == g.end()) continue;
    const auto x = ds.row(i);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += x[j];
    ++n;
  }
  if (n == 0) fail(ErrorCode::invalid_argument, "empty class group");
  for (double& v : sum) v /= static_cast<double>(n);
  return sum;
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  return std::sqrt(sq_dist(a, b));
}

double spread(const Dataset& ds, const ClassSet& g) {
  if (g.size() < 2) return 0.0;
  std::vector<std::vector<double>> centres;
  for (int c : g) centres.push_back(mean_of(ds, {c}));
  double total = 0.0;
  for (std::size_t p = 0; p < centres.size(); ++p) {
    for (std::size_t q = p + 1; q < centres.size(); ++q) total += dist(centres[p], centres[q]);
  }
  const double t = static_cast<double>(g.size());
  return total * 2.0 / (t * (t - 1.0));
}

bool close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string set_str(const ClassSet& g) {
  std::string s = "{";
  for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + std::to_string(g[i]);
  return s + "}";
}

}  // namespace

Vector brute_group_centroid(const Dataset& ds, const ClassSet& g) {
  const auto m = mean_of(ds, g);
  return Eigen::Map<const Vector>(m.data(), static_cast<Eigen::Index>(m.size()));
}

double brute_partition_score(const Dataset& ds, const ClassSet& g1, const ClassSet& g2, double eps) {
  const double between = dist(mean_of(ds, g1), mean_of(ds, g2));
  return between / std::max(spread(ds, g1) + spread(ds, g2), eps);
}

std::vector<double> brute_coverage(const Dataset& ds, const ClassSet& g1, const ClassSet& g2) {
  const auto c1 = mean_of(ds, g1);
  const auto c2 = mean_of(ds, g2);
  std::vector<double> out(static_cast<std::size_t>(ds.class_count()), 0.0);
  auto fill = [&](const ClassSet& g, bool first) {
    for (int c : g) {
      std::size_t members = 0, hits = 0;
      for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (ds.label(i) != c) continue;
        ++members;
        const bool nearer_first = sq_dist(ds.row(i), c1) <= sq_dist(ds.row(i), c2);
        hits += nearer_first == first;
      }
      const double frac = static_cast<double>(hits) / static_cast<double>(members);
      out[static_cast<std::size_t>(c)] = first ? frac : -frac;
    }
  };
  fill(g1, true);
  fill(g2, false);
  return out;
}

Metrics confusion_metrics(std::span<const int> labels, std::span<const int> preds, int class_count, double beta) {
  const auto nc = static_cast<std::size_t>(class_count);
  std::vector<std::vector<double>> cm(nc, std::vector<double>(nc, 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    cm[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(preds[i])] += 1.0;
  }
  const double n = static_cast<double>(labels.size());
  const double b2 = beta * beta;
  Metrics m;
  double diag = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    double row = 0.0, col = 0.0;
    for (std::size_t k = 0; k < nc; ++k) {
      row += cm[c][k];
      col += cm[k][c];
    }
    const double tp = cm[c][c];
    const double fp = col - tp;
    const double fn = row - tp;
    const double tn = n - row - col + tp;
    diag += tp;
    const double p = col > 0 ? tp / col : 0.0;
    const double r = row > 0 ? tp / row : 0.0;
    m.accuracy += (tp + tn) / (tp + tn + fp + fn);
    m.precision += p;
    m.recall += r;
    m.fscore += (b2 * p + r) > 0 ? (1.0 + b2) * p * r / (b2 * p + r) : 0.0;
  }
  m.accuracy /= static_cast<double>(nc);
  m.precision /= static_cast<double>(nc);
  m.recall /= static_cast<double>(nc);
  m.fscore /= static_cast<double>(nc);
  m.plain_accuracy = diag / n;
  return m;
}

double best_single_move(const ClassGeometry& geom, const ClassPartition& part, double eps) {
  double best = std::numeric_limits<double>::quiet_NaN();
  auto consider = [&](const ClassSet& from, const ClassSet& to, bool from_is_g1) {
    if (from.size() < 2) return;
    for (int c : from) {
      ClassSet a, b = to;
      for (int x : from) {
        if (x != c) a.push_back(x);
      }
      b.insert(std::upper_bound(b.begin(), b.end(), c), c);
      const double s = from_is_g1 ? geom.score(a, b, eps) : geom.score(b, a, eps);
      if (std::isnan(best) || s > best) best = s;
    }
  };
  consider(part.g1, part.g2, true);
  consider(part.g2, part.g1, false);
  return best;
}

CodewordLearner::CodewordLearner(std::shared_ptr<const std::map<std::vector<double>, int>> lookup,
                                 std::vector<double> column, bool classifier, std::size_t features)
    : lookup_(std::move(lookup)), column_(std::move(column)), classifier_(classifier), features_(features) {}

double CodewordLearner::predict(std::span<const double> x) const {
  const auto it = lookup_->find(std::vector<double>(x.begin(), x.end()));
  if (it == lookup_->end()) fail(ErrorCode::invalid_argument, "codeword learner queried off the training set");
  return column_[static_cast<std::size_t>(it->second)];
}

double perfect_learner_accuracy(const Dataset& ds, const CodingMatrix& m, Decoding decoding) {
  auto lookup = std::make_shared<std::map<std::vector<double>, int>>();
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto x = ds.row(i);
    lookup->emplace(std::vector<double>(x.begin(), x.end()), ds.label(i));
  }
  std::vector<TrainedLearner> learners;
  for (int l = 0; l < m.cols(); ++l) {
    std::vector<double> column(static_cast<std::size_t>(m.rows()));
    for (int r = 0; r < m.rows(); ++r) column[static_cast<std::size_t>(r)] = m.values(r, l);
    learners.push_back(std::make_shared<CodewordLearner>(lookup, std::move(column),
                                                         decoding == Decoding::hamming_ternary, ds.feature_count()));
  }
  const EcocModel model(m, std::move(learners), decoding);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.rows(); ++i) correct += model.predict(ds.row(i)) == ds.label(i);
  return static_cast<double>(correct) / static_cast<double>(ds.rows());
}

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || !c.hard; });
}

std::string Report::text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : (c.hard ? "FAIL " : "WARN ")) << c.name;
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
  out << (ok() ? "all hard checks passed\n" : "hard check failures\n");
  return out.str();
}

Report run_checks(const Dataset& ds, const Options& options) {
  const int nc = ds.class_count();
  if (nc > kMaxOracleClasses) {
    fail(ErrorCode::invalid_argument, "dataset too large for enumeration (" + std::to_string(nc) + " classes, max " +
                                          std::to_string(kMaxOracleClasses) + ")");
  }
  Report report;
  auto add = [&](std::string name, bool passed, std::string detail = {}, bool hard = true) {
    report.checks.push_back({std::move(name), passed, hard, std::move(detail)});
  };
  const double eps = options.eps;
  const ClassGeometry geom(ds);
  const ClassSet classes = all_classes(nc);

  {
    double worst = 0.0;
    bool ok = true;
    for (int c = 0; c < nc; ++c) {
      const Vector ref = brute_group_centroid(ds, {c});
      for (Eigen::Index j = 0; j < ref.size(); ++j) {
        ok = ok && close(ref[j], geom.centroid(c)[j], 1e-12);
        worst = std::max(worst, std::abs(ref[j] - geom.centroid(c)[j]));
      }
    }
    add("class centroids", ok, fmt("max abs diff %.3g", worst));
  }

  double brute_best = -1.0;
  ClassSet brute_g1;
  {
    bool ok = true;
    std::size_t compared = 0;
    const unsigned limit = 1u << (nc - 1);
    for (unsigned mask = 1; mask < limit; ++mask) {
      ClassSet g1{0}, g2;
      for (int c = 1; c < nc; ++c) ((mask >> (c - 1)) & 1u ? g2 : g1).push_back(c);
      if (g2.empty()) continue;
      const double ref = brute_partition_score(ds, g1, g2, eps);
      ok = ok && close(ref, partition_score(ds, g1, g2, eps), 1e-9);
      ++compared;
      if (ref > brute_best) {
        brute_best = ref;
        brute_g1 = g1;
      }
    }
    add("partition scores", ok, std::to_string(compared) + " bipartitions");
  }

  const ClassPartition sffs = sffs_bipartition(geom, classes, eps);
  {
    const double move = best_single_move(geom, sffs, eps);
    const bool local = std::isnan(move) || !strictly_improves(move, sffs.score);
    add("sffs local optimum", local, fmt("score %.6g, best single move %.6g", sffs.score, move));
  }
  {
    const ClassPartition ex = exhaustive_bipartition(geom, classes, eps);
    add("exhaustive search", close(ex.score, brute_best, 1e-9) && ex.g1 == brute_g1,
        fmt("optimum %.6g", ex.score) + " g1=" + set_str(ex.g1));
    const double ratio = ex.score > 0 ? sffs.score / ex.score : 1.0;
    add("sffs vs exhaustive", ratio >= 0.95, fmt("ratio %.4f (gap %.4g)", ratio, ex.score - sffs.score), false);
  }

  const CodingMatrix tree = build_csecoc(ds, eps);
  {
    bool ok = true;
    std::string detail;
    for (int l = 0; l < tree.cols(); ++l) {
      const auto& col = tree.columns[static_cast<std::size_t>(l)];
      const auto ref = brute_coverage(ds, col.g1, col.g2);
      for (int r = 0; r < nc; ++r) {
        if (ref[static_cast<std::size_t>(r)] != tree.values(r, l)) {
          ok = false;
          detail = "column " + std::to_string(l) + " class " + std::to_string(r);
        }
      }
    }
    add("coverage", ok, ok ? std::to_string(tree.cols()) + " columns" : detail);
  }
  {
    std::vector<std::string> problems;
    if (tree.cols() != nc - 1) problems.push_back("column count " + std::to_string(tree.cols()));
    const auto validity = validate_matrix(tree);
    for (const auto& v : validity.violations) problems.push_back(v);
    for (int l = 0; l < tree.cols(); ++l) {
      const auto& col = tree.columns[static_cast<std::size_t>(l)];
      for (int r = 0; r < nc; ++r) {
        const double v = tree.values(r, l);
        const bool in1 = std::binary_search(col.g1.begin(), col.g1.end(), r);
        const bool in2 = std::binary_search(col.g2.begin(), col.g2.end(), r);
        if ((in1 && v < 0) || (in2 && v > 0) || (!in1 && !in2 && v != 0)) {
          problems.push_back("sign mismatch at column " + std::to_string(l) + " class " + std::to_string(r));
        }
        const double n = static_cast<double>(ds.class_counts()[static_cast<std::size_t>(r)]);
        if (static_cast<double>(std::llround(std::abs(v) * n)) / n != std::abs(v)) {
          problems.push_back("non-integral count at column " + std::to_string(l) + " class " + std::to_string(r));
        }
      }
      ClassSet support = col.g1;
      support.insert(support.end(), col.g2.begin(), col.g2.end());
      std::sort(support.begin(), support.end());
      const ClassPartition again = sffs_bipartition(geom, support, eps);
      if (again.g1 != col.g1 || again.g2 != col.g2) {
        problems.push_back("column " + std::to_string(l) + " differs from a fresh search");
      }
    }
    add("csecoc structure", problems.empty(), problems.empty() ? "" : problems.front());
  }

  {
    Rng rng(derive_seed(options.seed, {0x6d657472ULL}));
    double worst = 0.0;
    for (int t = 0; t < options.metric_trials; ++t) {
      const int k = 2 + static_cast<int>(rng.below(7));
      const std::size_t n = 1 + static_cast<std::size_t>(rng.below(200));
      std::vector<int> labels(n), preds(n);
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        preds[i] = rng.uniform() < 0.6 ? labels[i] : static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      }
      const Metrics a = compute_metrics(labels, preds, k);
      const Metrics b = confusion_metrics(labels, preds, k);
      for (double d : {a.accuracy - b.accuracy, a.precision - b.precision, a.recall - b.recall, a.fscore - b.fscore,
                       a.plain_accuracy - b.plain_accuracy}) {
        worst = std::max(worst, std::abs(d));
      }
    }
    add("metrics", worst <= 1e-12, std::to_string(options.metric_trials) + " trials, " + fmt("max diff %.3g", worst));
  }

  for (MatrixKind kind : {MatrixKind::decoc_like, MatrixKind::ova, MatrixKind::ovo, MatrixKind::dense_random,
                          MatrixKind::sparse_random}) {
    RandomCodeOptions ro;
    ro.seed = options.seed;
    const CodingMatrix m = kind == MatrixKind::decoc_like ? build_decoc_like(ds, eps)
                                                          : build_baseline(kind, nc, ro, ds.class_names());
    for (Decoding d : {Decoding::hamming_ternary, Decoding::euclidean}) {
      const double acc = perfect_learner_accuracy(ds, m, d);
      add("perfect learner " + std::string(to_string(kind)) + "/" + std::string(to_string(d)), acc == 1.0,
          fmt("accuracy %.6f", acc));
    }
  }

  if (options.matrix) {
    const auto& m = *options.matrix;
    auto validity = validate_matrix(m);
    if (m.rows() != nc) {
      validity.violations.insert(validity.violations.begin(),
                                 "matrix has " + std::to_string(m.rows()) + " rows for " + std::to_string(nc) +
                                     " classes");
    }
    add("supplied matrix", validity.ok(), validity.ok() ? "" : validity.violations.front());
  }
  return report;
}

}  // namespace csecoc::oracle
