#pragma once

#include "csecoc/dataset.hpp"

#include <span>
#include <vector>

namespace csecoc {

/// Denominator clamp for the partition criterion.
inline constexpr double kDefaultEps = 1e-9;

/// Relative tolerance below which a criterion change counts as "no change".
inline constexpr double kConvergenceTolerance = 1e-12;

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(const Vector& a, const Vector& b);

/// True when `candidate` beats `current` by more than the convergence
/// tolerance, |delta| > 1e-12 * max(1, |current|).
bool strictly_improves(double candidate, double current);

/// A bipartition (g1, g2) of a class subset with its criterion value.
/// g1 is the side grown by inclusion and becomes the positive group.
struct ClassPartition {
  ClassSet g1;
  ClassSet g2;
  double score = 0.0;
  Vector centroid1;
  Vector centroid2;
  /// Criterion values accepted during the search, in order.
  std::vector<double> accepted_scores;
};

/// Per-class sums, counts, centroids and pairwise centroid distances,
/// computed once per dataset so candidate partitions are cheap to score.
class ClassGeometry {
 public:
  explicit ClassGeometry(const Dataset& ds);

  int class_count() const noexcept { return static_cast<int>(counts_.size()); }
  const Vector& centroid(int c) const { return centroids_[static_cast<std::size_t>(c)]; }
  double centroid_distance(int p, int q) const { return pairwise_(p, q); }

  /// Sample-weighted mean over every sample whose class is in g.
  Vector group_centroid(const ClassSet& g) const;

  /// Mean pairwise distance between class centroids in g; 0 for |g| <= 1.
  double inner_group_distance(const ClassSet& g) const;

  /// d(center(g1), center(g2)) / max(S(g1) + S(g2), eps). Larger is better.
  double score(const ClassSet& g1, const ClassSet& g2, double eps) const;

 private:
  void check(const ClassSet& g) const;

  std::vector<Vector> sums_;
  std::vector<std::size_t> counts_;
  std::vector<Vector> centroids_;
  Eigen::MatrixXd pairwise_;
};

Vector group_centroid(const Dataset& ds, const ClassSet& g);
double inner_group_distance(const Dataset& ds, const ClassSet& g);
double partition_score(const Dataset& ds, const ClassSet& g1, const ClassSet& g2,
                       double eps = kDefaultEps);

/// Sequential forward floating selection over classes. Starts from
/// g1 = {}, g2 = classes; alternates best-class inclusion into g1 with
/// conditional exclusion of the worst g1 class, accepting a move only when it
/// strictly improves the criterion, and stops when no inclusion improves it.
/// Ties go to the lowest class index.
ClassPartition sffs_bipartition(const ClassGeometry& geom, const ClassSet& classes,
                                double eps = kDefaultEps);
ClassPartition sffs_bipartition(const Dataset& ds, const ClassSet& classes, double eps = kDefaultEps);

/// Best bipartition over all 2^(n-1) - 1 splits. Ties resolve to the
/// lexicographically smallest g1, so g1 always holds the smallest class.
ClassPartition exhaustive_bipartition(const ClassGeometry& geom, const ClassSet& classes,
                                      double eps = kDefaultEps);
ClassPartition exhaustive_bipartition(const Dataset& ds, const ClassSet& classes,
                                      double eps = kDefaultEps);

inline constexpr std::size_t kMaxExhaustiveClasses = 20;

ClassSet all_classes(int class_count);

}  // namespace csecoc
