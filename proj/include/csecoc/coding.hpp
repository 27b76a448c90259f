#pragma once

#include "csecoc/dataset.hpp"
#include "csecoc/partition.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csecoc {

enum class MatrixKind { csecoc, decoc_like, ova, ovo, dense_random, sparse_random };

std::string_view to_string(MatrixKind kind);
std::optional<MatrixKind> parse_matrix_kind(std::string_view name);
bool is_tree_kind(MatrixKind kind);
bool is_random_kind(MatrixKind kind);

/// Column count each construction produces for `nc` classes.
std::size_t ensemble_size(MatrixKind kind, int nc);

/// Per-column record. For tree kinds g1/g2 are the split of the node's class
/// group, `parent` the column that produced that group (-1 at the root) and
/// `score` the criterion value. For other kinds g1/g2 are the classes coded
/// positive/negative and score is NaN.
struct ColumnInfo {
  ClassSet g1;
  ClassSet g2;
  double score = 0.0;
  int parent = -1;
};

struct CodingMatrix {
  MatrixKind kind = MatrixKind::csecoc;
  Eigen::MatrixXd values;  // classes x columns, entries in [-1, 1]
  std::vector<std::string> class_names;
  std::vector<ColumnInfo> columns;

  int rows() const noexcept { return static_cast<int>(values.rows()); }
  int cols() const noexcept { return static_cast<int>(values.cols()); }
  bool is_hard() const;
};

/// Signed fraction of each class's samples lying on its own group's side:
/// d(x, centroid1) <= d(x, centroid2) counts for g1 classes, > for g2.
/// Classes outside the partition get 0.
std::vector<double> coverage(const Dataset& ds, const ClassPartition& part);

/// Depth-first recursive splitting with sffs_bipartition; each split emits
/// one column (coverage values for csecoc, +-1 for decoc_like). Columns are
/// ordered pre-order, g1 subtree before g2 subtree.
CodingMatrix build_csecoc(const Dataset& ds, double eps = kDefaultEps);
CodingMatrix build_decoc_like(const Dataset& ds, double eps = kDefaultEps);

struct RandomCodeOptions {
  std::uint64_t seed = 42;
  int candidates = 1000;
  /// Redraws allowed per column before a candidate matrix is abandoned.
  int column_retries = 1000;
};

/// ova, ovo, dense_random or sparse_random for `nc` classes.
CodingMatrix build_baseline(MatrixKind kind, int nc, const RandomCodeOptions& options = {},
                            std::vector<std::string> class_names = {});

/// Distinct admissible column patterns (up to negation) a random kind can
/// draw for nc classes; duplicate columns are only rejected while L does
/// not exceed this count.
std::uint64_t distinct_column_patterns(MatrixKind kind, int nc);

/// Minimum pairwise row distance where mismatched signs cost 1 and a zero
/// against a nonzero costs 1/2.
double min_row_distance(const Eigen::MatrixXd& values);

struct ValidityReport {
  std::vector<std::string> violations;
  std::vector<std::string> notes;

  bool ok() const noexcept { return violations.empty(); }
};

ValidityReport validate_matrix(const CodingMatrix& m);

/// CSV: header "class,H0,H1,...", one row per class, 6 fractional digits.
void write_matrix_csv(const CodingMatrix& m, std::ostream& out);
void write_matrix_csv(const CodingMatrix& m, const std::filesystem::path& path);

/// Per-column partition record: column, positive classes, negative classes
/// (';'-joined names), criterion value, parent column.
void write_matrix_notes(const CodingMatrix& m, std::ostream& out);
void write_matrix_notes(const CodingMatrix& m, const std::filesystem::path& path);

/// Reads the CSV format above. The kind is not stored in the CSV; without
/// `kind` it is inferred (any fractional entry -> csecoc, else decoc_like).
/// Column records are rebuilt from the sign pattern; for tree kinds each
/// column's parent is the latest earlier column having a side equal to its
/// support.
CodingMatrix read_matrix_csv(std::istream& in, std::optional<MatrixKind> kind = std::nullopt);
CodingMatrix read_matrix_csv(const std::filesystem::path& path,
                             std::optional<MatrixKind> kind = std::nullopt);

}  // namespace csecoc
