#include "csecoc/partition.hpp"

#include "csecoc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csecoc {

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::invalid_argument, "vector length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double euclidean_distance(const Vector& a, const Vector& b) {
  return euclidean_distance(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                            std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

bool strictly_improves(double candidate, double current) {
  if (std::isinf(current) && current < 0) return candidate > current;
  return candidate - current > kConvergenceTolerance * std::max(1.0, std::abs(current));
}

ClassSet all_classes(int class_count) {
  ClassSet out(static_cast<std::size_t>(class_count));
  for (int c = 0; c < class_count; ++c) out[static_cast<std::size_t>(c)] = c;
  return out;
}

ClassGeometry::ClassGeometry(const Dataset& ds)
    : sums_(static_cast<std::size_t>(ds.class_count()),
            Vector::Zero(static_cast<Eigen::Index>(ds.feature_count()))),
      counts_(ds.class_counts()) {
  const auto& x = ds.features();
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    sums_[static_cast<std::size_t>(ds.label(i))] += x.row(static_cast<Eigen::Index>(i)).transpose();
  }
  centroids_.reserve(sums_.size());
  for (std::size_t c = 0; c < sums_.size(); ++c) {
    centroids_.push_back(sums_[c] / static_cast<double>(counts_[c]));
  }
  const auto n = static_cast<Eigen::Index>(centroids_.size());
  pairwise_ = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const double d = euclidean_distance(centroids_[static_cast<std::size_t>(p)],
                                          centroids_[static_cast<std::size_t>(q)]);
      pairwise_(p, q) = d;
      pairwise_(q, p) = d;
    }
  }
}

void ClassGeometry::check(const ClassSet& g) const {
  if (g.empty()) fail(ErrorCode::invalid_argument, "empty class group");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 0 || g[i] >= class_count()) fail(ErrorCode::invalid_argument, "class index out of range");
    if (i > 0 && g[i] <= g[i - 1]) fail(ErrorCode::invalid_argument, "class group must be sorted and unique");
  }
}

Vector ClassGeometry::group_centroid(const ClassSet& g) const {
  check(g);
  Vector sum = Vector::Zero(sums_.front().size());
  std::size_t n = 0;
  for (int c : g) {
    sum += sums_[static_cast<std::size_t>(c)];
    n += counts_[static_cast<std::size_t>(c)];
  }
  return sum / static_cast<double>(n);
}

double ClassGeometry::inner_group_distance(const ClassSet& g) const {
  check(g);
  const std::size_t t = g.size();
  if (t <= 1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = i + 1; j < t; ++j) sum += pairwise_(g[i], g[j]);
  }
  return 2.0 / (static_cast<double>(t) * static_cast<double>(t - 1)) * sum;
}

double ClassGeometry::score(const ClassSet& g1, const ClassSet& g2, double eps) const {
  check(g1);
  check(g2);
  ClassSet common;
  std::set_intersection(g1.begin(), g1.end(), g2.begin(), g2.end(), std::back_inserter(common));
  if (!common.empty()) fail(ErrorCode::invalid_argument, "partition groups overlap");
  const double between = euclidean_distance(group_centroid(g1), group_centroid(g2));
  const double within = inner_group_distance(g1) + inner_group_distance(g2);
  return between / std::max(within, eps);
}

Vector group_centroid(const Dataset& ds, const ClassSet& g) {
  return ClassGeometry(ds).group_centroid(g);
}

double inner_group_distance(const Dataset& ds, const ClassSet& g) {
  return ClassGeometry(ds).inner_group_distance(g);
}

double partition_score(const Dataset& ds, const ClassSet& g1, const ClassSet& g2, double eps) {
  return ClassGeometry(ds).score(g1, g2, eps);
}

namespace {

ClassSet with(ClassSet g, int c) {
  g.insert(std::lower_bound(g.begin(), g.end(), c), c);
  return g;
}

ClassSet without(ClassSet g, int c) {
  g.erase(std::lower_bound(g.begin(), g.end(), c));
  return g;
}

ClassSet normalized(const ClassSet& classes, int class_count) {
  ClassSet g = classes;
  std::sort(g.begin(), g.end());
  if (std::adjacent_find(g.begin(), g.end()) != g.end()) {
    fail(ErrorCode::invalid_argument, "duplicate class in group");
  }
  for (int c : g) {
    if (c < 0 || c >= class_count) fail(ErrorCode::invalid_argument, "class index out of range");
  }
  return g;
}

struct Move {
  int cls = -1;
  double score = -std::numeric_limits<double>::infinity();
};

// Best class to move from `from` to `to`; `from` keeps at least one class.
// Candidates are visited in ascending order and only a strictly larger
// score replaces the incumbent, so ties resolve to the lowest index.
Move best_move(const ClassGeometry& geom, const ClassSet& from, const ClassSet& to, bool from_is_g1,
               double eps) {
  Move best;
  if (from.size() < 2) return best;
  for (int c : from) {
    const ClassSet f = without(from, c);
    const ClassSet t = with(to, c);
    const double s = from_is_g1 ? geom.score(f, t, eps) : geom.score(t, f, eps);
    if (s > best.score) best = {c, s};
  }
  return best;
}

}  // namespace

ClassPartition sffs_bipartition(const ClassGeometry& geom, const ClassSet& classes, double eps) {
  ClassSet g2 = normalized(classes, geom.class_count());
  if (g2.size() < 2) fail(ErrorCode::invalid_argument, "bipartition needs at least 2 classes");

  ClassPartition part;
  ClassSet g1;
  double current = -std::numeric_limits<double>::infinity();

  while (g2.size() >= 2) {
    Move inc;
    if (g1.empty()) {
      // Nothing to score against yet: the first inclusion is unconditional.
      for (int c : g2) {
        const double s = geom.score({c}, without(g2, c), eps);
        if (s > inc.score) inc = {c, s};
      }
    } else {
      inc = best_move(geom, g2, g1, false, eps);
      if (!strictly_improves(inc.score, current)) break;
    }
    g1 = with(g1, inc.cls);
    g2 = without(g2, inc.cls);
    current = inc.score;
    part.accepted_scores.push_back(current);

    while (g1.size() >= 2) {
      const Move exc = best_move(geom, g1, g2, true, eps);
      if (!strictly_improves(exc.score, current)) break;
      g1 = without(g1, exc.cls);
      g2 = with(g2, exc.cls);
      current = exc.score;
      part.accepted_scores.push_back(current);
    }
  }

  part.score = geom.score(g1, g2, eps);
  part.centroid1 = geom.group_centroid(g1);
  part.centroid2 = geom.group_centroid(g2);
  part.g1 = std::move(g1);
  part.g2 = std::move(g2);
  return part;
}

ClassPartition sffs_bipartition(const Dataset& ds, const ClassSet& classes, double eps) {
  return sffs_bipartition(ClassGeometry(ds), classes, eps);
}

ClassPartition exhaustive_bipartition(const ClassGeometry& geom, const ClassSet& classes, double eps) {
  const ClassSet all = normalized(classes, geom.class_count());
  if (all.size() < 2) fail(ErrorCode::invalid_argument, "bipartition needs at least 2 classes");
  if (all.size() > kMaxExhaustiveClasses) {
    fail(ErrorCode::invalid_argument, "too many classes for exhaustive enumeration");
  }
  const std::size_t rest = all.size() - 1;
  const std::uint64_t full = (std::uint64_t{1} << rest) - 1;

  ClassPartition best;
  best.score = -std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    ClassSet g1{all[0]};
    ClassSet g2;
    for (std::size_t b = 0; b < rest; ++b) {
      if (mask >> b & 1U) {
        g1.push_back(all[b + 1]);
      } else {
        g2.push_back(all[b + 1]);
      }
    }
    const double s = geom.score(g1, g2, eps);
    if (s > best.score || (s == best.score && g1 < best.g1)) {
      best.g1 = std::move(g1);
      best.g2 = std::move(g2);
      best.score = s;
    }
  }
  best.centroid1 = geom.group_centroid(best.g1);
  best.centroid2 = geom.group_centroid(best.g2);
  best.accepted_scores = {best.score};
  return best;
}

ClassPartition exhaustive_bipartition(const Dataset& ds, const ClassSet& classes, double eps) {
  return exhaustive_bipartition(ClassGeometry(ds), classes, eps);
}

}  // namespace csecoc
