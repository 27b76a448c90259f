#include "csecoc/coding.hpp"

#include "csecoc/error.hpp"
#include "csecoc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

namespace csecoc {

std::string_view to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::csecoc: return "csecoc";
    case MatrixKind::decoc_like: return "decoc";
    case MatrixKind::ova: return "ova";
    case MatrixKind::ovo: return "ovo";
    case MatrixKind::dense_random: return "dense_random";
    case MatrixKind::sparse_random: return "sparse_random";
  }
  return "unknown";
}

std::optional<MatrixKind> parse_matrix_kind(std::string_view name) {
  if (name == "csecoc") return MatrixKind::csecoc;
  if (name == "decoc" || name == "decoc_like") return MatrixKind::decoc_like;
  if (name == "ova") return MatrixKind::ova;
  if (name == "ovo") return MatrixKind::ovo;
  if (name == "dense_random" || name == "drecoc" || name == "dense") return MatrixKind::dense_random;
  if (name == "sparse_random" || name == "srecoc" || name == "sparse") return MatrixKind::sparse_random;
  return std::nullopt;
}

bool is_tree_kind(MatrixKind kind) {
  return kind == MatrixKind::csecoc || kind == MatrixKind::decoc_like;
}

bool is_random_kind(MatrixKind kind) {
  return kind == MatrixKind::dense_random || kind == MatrixKind::sparse_random;
}

std::size_t ensemble_size(MatrixKind kind, int nc) {
  if (nc < 2) fail(ErrorCode::invalid_argument, "need at least 2 classes");
  const auto n = static_cast<std::size_t>(nc);
  switch (kind) {
    case MatrixKind::csecoc:
    case MatrixKind::decoc_like: return n - 1;
    case MatrixKind::ova: return n;
    case MatrixKind::ovo: return n * (n - 1) / 2;
    case MatrixKind::dense_random:
      return static_cast<std::size_t>(std::ceil(10.0 * std::log2(static_cast<double>(nc))));
    case MatrixKind::sparse_random:
      return static_cast<std::size_t>(std::ceil(15.0 * std::log2(static_cast<double>(nc))));
  }
  return 0;
}

bool CodingMatrix::is_hard() const {
  return (values.array() == 0.0 || values.array() == 1.0 || values.array() == -1.0).all();
}

std::vector<double> coverage(const Dataset& ds, const ClassPartition& part) {
  const auto nc = static_cast<std::size_t>(ds.class_count());
  std::vector<int> side(nc, 0);
  for (int c : part.g1) side.at(static_cast<std::size_t>(c)) = 1;
  for (int c : part.g2) side.at(static_cast<std::size_t>(c)) = -1;

  const std::span<const double> c1(part.centroid1.data(), static_cast<std::size_t>(part.centroid1.size()));
  const std::span<const double> c2(part.centroid2.data(), static_cast<std::size_t>(part.centroid2.size()));
  std::vector<std::size_t> hits(nc, 0);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto c = static_cast<std::size_t>(ds.label(i));
    if (side[c] == 0) continue;
    const bool nearer_first = euclidean_distance(ds.row(i), c1) <= euclidean_distance(ds.row(i), c2);
    if (nearer_first == (side[c] == 1)) ++hits[c];
  }

  std::vector<double> out(nc, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    if (side[c] == 0) continue;
    out[c] = side[c] * (static_cast<double>(hits[c]) / static_cast<double>(ds.class_counts()[c]));
  }
  return out;
}

namespace {

CodingMatrix build_tree(const Dataset& ds, double eps, bool soft) {
  const int nc = ds.class_count();
  if (nc < 2) fail(ErrorCode::invalid_argument, "need at least 2 classes");

  const ClassGeometry geom(ds);
  CodingMatrix m;
  m.kind = soft ? MatrixKind::csecoc : MatrixKind::decoc_like;
  m.class_names = ds.class_names();
  m.values = Eigen::MatrixXd::Zero(nc, nc - 1);

  std::function<void(const ClassSet&, int)> split = [&](const ClassSet& group, int parent) {
    ClassPartition part = sffs_bipartition(geom, group, eps);
    const int col = static_cast<int>(m.columns.size());
    if (soft) {
      const auto cov = coverage(ds, part);
      for (int r = 0; r < nc; ++r) m.values(r, col) = cov[static_cast<std::size_t>(r)];
    } else {
      for (int c : part.g1) m.values(c, col) = 1.0;
      for (int c : part.g2) m.values(c, col) = -1.0;
    }
    m.columns.push_back({part.g1, part.g2, part.score, parent});
    if (part.g1.size() > 1) split(part.g1, col);
    if (part.g2.size() > 1) split(part.g2, col);
  };
  split(all_classes(nc), -1);
  return m;
}

ColumnInfo sign_column(const Eigen::MatrixXd& v, Eigen::Index col) {
  ColumnInfo info;
  info.score = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    if (v(r, col) > 0) info.g1.push_back(static_cast<int>(r));
    if (v(r, col) < 0) info.g2.push_back(static_cast<int>(r));
  }
  return info;
}

std::vector<int> sign_pattern(const Eigen::MatrixXd& v, Eigen::Index col) {
  std::vector<int> s(static_cast<std::size_t>(v.rows()));
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    s[static_cast<std::size_t>(r)] = (v(r, col) > 0) - (v(r, col) < 0);
  }
  return s;
}

bool same_or_complement(const std::vector<int>& a, const std::vector<int>& b) {
  bool same = true;
  bool complement = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i] == b[i];
    complement = complement && a[i] == -b[i];
  }
  return same || complement;
}

bool has_duplicate_rows(const Eigen::MatrixXd& v) {
  for (Eigen::Index a = 0; a < v.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < v.rows(); ++b) {
      if (v.row(a) == v.row(b)) return true;
    }
  }
  return false;
}

std::string column_id(Eigen::Index col) { return "H" + std::to_string(col); }

}  // namespace

CodingMatrix build_csecoc(const Dataset& ds, double eps) { return build_tree(ds, eps, true); }

CodingMatrix build_decoc_like(const Dataset& ds, double eps) { return build_tree(ds, eps, false); }

std::uint64_t distinct_column_patterns(MatrixKind kind, int nc) {
  if (nc >= 40) return std::numeric_limits<std::uint64_t>::max();
  std::uint64_t pow2 = std::uint64_t{1} << nc;
  if (kind == MatrixKind::dense_random) return (pow2 - 2) / 2;
  std::uint64_t pow3 = 1;
  for (int i = 0; i < nc; ++i) pow3 *= 3;
  // Ternary columns with at least one +1 and one -1, up to negation.
  return (pow3 - 2 * pow2 + 1) / 2;
}

double min_row_distance(const Eigen::MatrixXd& v) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < v.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < v.rows(); ++b) {
      double d = 0.0;
      for (Eigen::Index l = 0; l < v.cols(); ++l) {
        const double x = v(a, l);
        const double y = v(b, l);
        if (x == y) continue;
        d += (x == 0.0 || y == 0.0) ? 0.5 : 1.0;
      }
      best = std::min(best, d);
    }
  }
  return best;
}

CodingMatrix build_baseline(MatrixKind kind, int nc, const RandomCodeOptions& options,
                            std::vector<std::string> class_names) {
  if (nc < 2) fail(ErrorCode::invalid_argument, "need at least 2 classes");
  if (is_tree_kind(kind)) fail(ErrorCode::invalid_argument, "tree codes need a dataset");
  if (class_names.empty()) {
    for (int c = 0; c < nc; ++c) class_names.push_back("C" + std::to_string(c));
  }
  if (static_cast<int>(class_names.size()) != nc) {
    fail(ErrorCode::invalid_argument, "class name count differs from class count");
  }

  CodingMatrix m;
  m.kind = kind;
  m.class_names = std::move(class_names);
  const auto cols = static_cast<Eigen::Index>(ensemble_size(kind, nc));

  if (kind == MatrixKind::ova) {
    m.values = Eigen::MatrixXd::Constant(nc, cols, -1.0);
    for (int c = 0; c < nc; ++c) m.values(c, c) = 1.0;
  } else if (kind == MatrixKind::ovo) {
    m.values = Eigen::MatrixXd::Zero(nc, cols);
    Eigen::Index col = 0;
    for (int a = 0; a < nc; ++a) {
      for (int b = a + 1; b < nc; ++b, ++col) {
        m.values(a, col) = 1.0;
        m.values(b, col) = -1.0;
      }
    }
  } else {
    if (options.candidates < 1) fail(ErrorCode::invalid_argument, "candidates must be >= 1");
    const bool sparse = kind == MatrixKind::sparse_random;
    const bool reject_duplicates =
        static_cast<std::uint64_t>(cols) <= distinct_column_patterns(kind, nc);
    Rng rng(derive_seed(options.seed, {static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(nc)}));

    auto draw_entry = [&]() -> double {
      if (!sparse) return rng.below(2) == 0 ? -1.0 : 1.0;
      const double u = rng.uniform();
      return u < 0.25 ? -1.0 : (u < 0.75 ? 0.0 : 1.0);
    };

    Eigen::MatrixXd best;
    double best_distance = -1.0;
    for (int cand = 0; cand < options.candidates; ++cand) {
      Eigen::MatrixXd v(nc, cols);
      std::vector<std::vector<int>> patterns;
      bool valid = true;
      for (Eigen::Index l = 0; l < cols && valid; ++l) {
        bool placed = false;
        for (int attempt = 0; attempt < options.column_retries && !placed; ++attempt) {
          for (int r = 0; r < nc; ++r) v(r, l) = draw_entry();
          const bool pos = (v.col(l).array() > 0).any();
          const bool neg = (v.col(l).array() < 0).any();
          if (!pos || !neg) continue;
          auto p = sign_pattern(v, l);
          if (reject_duplicates &&
              std::any_of(patterns.begin(), patterns.end(),
                          [&](const auto& q) { return same_or_complement(p, q); })) {
            continue;
          }
          patterns.push_back(std::move(p));
          placed = true;
        }
        valid = placed;
      }
      if (!valid || has_duplicate_rows(v)) continue;
      bool empty_row = false;
      for (int r = 0; r < nc; ++r) empty_row = empty_row || (v.row(r).array() == 0.0).all();
      if (empty_row) continue;
      const double d = min_row_distance(v);
      if (d > best_distance) {
        best_distance = d;
        best = v;
      }
    }
    if (best_distance < 0) {
      fail(ErrorCode::data, std::string("no valid ") + std::string(to_string(kind)) +
                                " matrix within the retry budget");
    }
    m.values = std::move(best);
  }

  for (Eigen::Index l = 0; l < m.values.cols(); ++l) m.columns.push_back(sign_column(m.values, l));
  return m;
}

ValidityReport validate_matrix(const CodingMatrix& m) {
  ValidityReport report;
  auto& bad = report.violations;
  const auto& v = m.values;
  const Eigen::Index nc = v.rows();
  const Eigen::Index cols = v.cols();

  if (nc < 2) bad.push_back("fewer than 2 rows");
  if (cols < 1) bad.push_back("no columns");
  if (static_cast<Eigen::Index>(m.class_names.size()) != nc) bad.push_back("class name count differs from row count");
  if (static_cast<Eigen::Index>(m.columns.size()) != cols) bad.push_back("column record count differs from column count");
  if (!bad.empty()) return report;

  for (Eigen::Index r = 0; r < nc; ++r) {
    for (Eigen::Index l = 0; l < cols; ++l) {
      const double x = v(r, l);
      if (!std::isfinite(x) || x < -1.0 || x > 1.0) {
        bad.push_back("entry (" + m.class_names[static_cast<std::size_t>(r)] + ", " + column_id(l) +
                      ") outside [-1, 1]");
      } else if (m.kind != MatrixKind::csecoc && x != 0.0 && x != 1.0 && x != -1.0) {
        bad.push_back("entry (" + m.class_names[static_cast<std::size_t>(r)] + ", " + column_id(l) +
                      ") not ternary in a hard matrix");
      }
    }
  }

  for (Eigen::Index l = 0; l < cols; ++l) {
    if (!(v.col(l).array() > 0).any()) bad.push_back("column " + column_id(l) + " lacks positive entry");
    if (!(v.col(l).array() < 0).any()) bad.push_back("column " + column_id(l) + " lacks negative entry");
  }

  for (Eigen::Index a = 0; a < nc; ++a) {
    if ((v.row(a).array() == 0.0).all()) {
      bad.push_back("row " + m.class_names[static_cast<std::size_t>(a)] + " has no nonzero entry");
    }
    for (Eigen::Index b = a + 1; b < nc; ++b) {
      if (v.row(a) == v.row(b)) {
        bad.push_back("duplicate rows: " + m.class_names[static_cast<std::size_t>(a)] + " and " +
                      m.class_names[static_cast<std::size_t>(b)]);
      }
    }
  }

  const bool check_columns =
      !is_random_kind(m.kind) ||
      static_cast<std::uint64_t>(cols) <= distinct_column_patterns(m.kind, static_cast<int>(nc));
  if (check_columns) {
    std::vector<std::vector<int>> patterns;
    for (Eigen::Index l = 0; l < cols; ++l) patterns.push_back(sign_pattern(v, l));
    for (Eigen::Index a = 0; a < cols; ++a) {
      for (Eigen::Index b = a + 1; b < cols; ++b) {
        if (same_or_complement(patterns[static_cast<std::size_t>(a)], patterns[static_cast<std::size_t>(b)])) {
          bad.push_back("duplicate or complementary columns: " + column_id(a) + " and " + column_id(b));
        }
      }
    }
  } else {
    report.notes.push_back("repeated columns allowed: more columns than distinct patterns");
  }

  if (is_tree_kind(m.kind)) {
    if (cols != nc - 1) {
      bad.push_back("tree code has " + std::to_string(cols) + " columns, expected " + std::to_string(nc - 1));
    }
    for (Eigen::Index l = 0; l < cols; ++l) {
      const auto& info = m.columns[static_cast<std::size_t>(l)];
      ClassSet node;
      std::set_union(info.g1.begin(), info.g1.end(), info.g2.begin(), info.g2.end(), std::back_inserter(node));
      if (info.g1.empty() || info.g2.empty() || node.size() != info.g1.size() + info.g2.size()) {
        bad.push_back("column " + column_id(l) + " partition is not a split of two disjoint nonempty groups");
        continue;
      }
      std::vector<int> side(static_cast<std::size_t>(nc), 0);
      for (int c : info.g1) side[static_cast<std::size_t>(c)] = 1;
      for (int c : info.g2) side[static_cast<std::size_t>(c)] = -1;
      for (Eigen::Index r = 0; r < nc; ++r) {
        const double x = v(r, l);
        const int s = side[static_cast<std::size_t>(r)];
        const std::string where = "(" + m.class_names[static_cast<std::size_t>(r)] + ", " + column_id(l) + ")";
        if (s == 0 && x != 0.0) {
          bad.push_back("entry " + where + " is nonzero outside the column's subtree");
        } else if (s != 0 && x == 0.0) {
          report.notes.push_back("zero-coverage class at " + where);
        } else if ((s > 0 && x < 0) || (s < 0 && x > 0)) {
          bad.push_back("entry " + where + " sign disagrees with recorded partition");
        }
      }
      ClassSet expected;
      if (info.parent < 0) {
        expected = all_classes(static_cast<int>(nc));
      } else if (info.parent < l) {
        const auto& p = m.columns[static_cast<std::size_t>(info.parent)];
        expected = (node == p.g1) ? p.g1 : p.g2;
      }
      if (node != expected) bad.push_back("column " + column_id(l) + " group does not match its tree parent");
    }
  }
  return report;
}

void write_matrix_csv(const CodingMatrix& m, std::ostream& out) {
  out << "class";
  for (int l = 0; l < m.cols(); ++l) out << ',' << column_id(l);
  out << '\n';
  char buf[64];
  for (int r = 0; r < m.rows(); ++r) {
    out << m.class_names.at(static_cast<std::size_t>(r));
    for (int l = 0; l < m.cols(); ++l) {
      const double x = m.values(r, l) == 0.0 ? 0.0 : m.values(r, l);
      std::snprintf(buf, sizeof buf, "%.6f", x);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_matrix_csv(const CodingMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  write_matrix_csv(m, out);
  if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

void write_matrix_notes(const CodingMatrix& m, std::ostream& out) {
  auto names = [&](const ClassSet& g) {
    std::string s;
    for (std::size_t i = 0; i < g.size(); ++i) {
      s += (i ? ";" : "") + m.class_names.at(static_cast<std::size_t>(g[i]));
    }
    return s;
  };
  out << "column,positive,negative,score,parent\n";
  char buf[64];
  for (int l = 0; l < m.cols(); ++l) {
    const auto& c = m.columns.at(static_cast<std::size_t>(l));
    if (std::isnan(c.score)) {
      std::snprintf(buf, sizeof buf, "nan");
    } else {
      std::snprintf(buf, sizeof buf, "%.9g", c.score);
    }
    out << column_id(l) << ',' << names(c.g1) << ',' << names(c.g2) << ',' << buf << ','
        << (c.parent < 0 ? std::string("root") : column_id(c.parent)) << '\n';
  }
}

void write_matrix_notes(const CodingMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  write_matrix_notes(m, out);
  if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

CodingMatrix read_matrix_csv(std::istream& in, std::optional<MatrixKind> kind) {
  std::string line;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (header) {
      width = fields.size();
      if (width < 2) fail(ErrorCode::parse, "matrix header needs at least one column");
      header = false;
      continue;
    }
    if (fields.size() != width) fail(ErrorCode::parse, "ragged matrix row for '" + fields.front() + "'");
    names.push_back(fields.front());
    std::vector<double> row;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(fields[j], &used));
        if (used != fields[j].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(ErrorCode::parse, "bad matrix entry '" + fields[j] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::parse, "matrix file has no rows");

  CodingMatrix m;
  m.class_names = std::move(names);
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t l = 0; l + 1 < width; ++l) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)) = rows[r][l];
    }
  }
  m.kind = kind.value_or(m.is_hard() ? MatrixKind::decoc_like : MatrixKind::csecoc);

  for (Eigen::Index l = 0; l < m.values.cols(); ++l) {
    ColumnInfo info = sign_column(m.values, l);
    if (is_tree_kind(m.kind)) {
      ClassSet support;
      std::set_union(info.g1.begin(), info.g1.end(), info.g2.begin(), info.g2.end(),
                     std::back_inserter(support));
      for (int p = static_cast<int>(l) - 1; p >= 0; --p) {
        const auto& q = m.columns[static_cast<std::size_t>(p)];
        if (q.g1 == support || q.g2 == support) {
          info.parent = p;
          break;
        }
      }
    }
    m.columns.push_back(std::move(info));
  }
  return m;
}

CodingMatrix read_matrix_csv(const std::filesystem::path& path, std::optional<MatrixKind> kind) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  try {
    return read_matrix_csv(in, kind);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace csecoc
