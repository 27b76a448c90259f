#include "doctest.h"
#include "helpers.hpp"

#include "csecoc/coding.hpp"
#include "csecoc/oracle.hpp"

#include <cmath>
#include <sstream>

using namespace csecoc;

namespace {

ClassPartition split(const Dataset& ds, ClassSet g1, ClassSet g2) {
  ClassPartition p;
  p.centroid1 = group_centroid(ds, g1);
  p.centroid2 = group_centroid(ds, g2);
  p.g1 = std::move(g1);
  p.g2 = std::move(g2);
  return p;
}

ClassSet merged(const ColumnInfo& c) {
  ClassSet s = c.g1;
  s.insert(s.end(), c.g2.begin(), c.g2.end());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_SUITE("coding") {
  TEST_CASE("coverage with perfectly separated groups") {
    const Dataset ds = testing::make_dataset({{0}, {0}, {1}, {10}, {11}, {11}}, {0, 0, 1, 2, 3, 3});
    const auto cov = coverage(ds, split(ds, {0, 1}, {2, 3}));
    CHECK(cov == std::vector<double>{1, 1, -1, -1});
  }

  TEST_CASE("coverage counts samples on the own side") {
    const Dataset ds = testing::make_dataset({{0}, {0}, {0}, {10}, {10}, {10}, {10}, {10}}, {0, 0, 0, 0, 1, 1, 1, 1});
    const auto cov = coverage(ds, split(ds, {0}, {1}));
    CHECK(cov[0] == 0.75);
    CHECK(cov[1] == -1.0);
  }

  TEST_CASE("coverage leaves classes outside the partition at zero") {
    const Dataset ds = testing::point_classes({0, 5, 9});
    const auto cov = coverage(ds, split(ds, {0}, {1}));
    CHECK(cov[2] == 0.0);
  }

  TEST_CASE("coverage equals brute-force counts on random data") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const int nc = 2 + static_cast<int>(seed % 4);
      const Dataset ds = testing::random_dataset(seed + 1000, nc, 1, 40, 1 + static_cast<int>(seed % 3), 1.5);
      const CodingMatrix m = build_csecoc(ds);
      for (int l = 0; l < m.cols(); ++l) {
        const auto& c = m.columns[static_cast<std::size_t>(l)];
        const auto ref = oracle::brute_coverage(ds, c.g1, c.g2);
        for (int r = 0; r < nc; ++r) CHECK(m.values(r, l) == ref[static_cast<std::size_t>(r)]);
      }
    }
  }

  TEST_CASE("two classes give one column with opposite signs") {
    const Dataset ds = testing::make_dataset({{0}, {0.2}, {5}, {5.1}}, {0, 0, 1, 1});
    const CodingMatrix m = build_csecoc(ds);
    REQUIRE(m.cols() == 1);
    CHECK(m.values(0, 0) * m.values(1, 0) < 0);
  }

  TEST_CASE("three point classes at 0, 1, 9") {
    const Dataset ds = testing::point_classes({0, 1, 9});
    const CodingMatrix m = build_csecoc(ds);
    REQUIRE(m.cols() == 2);
    const bool pair_first = m.columns[0].g1 == ClassSet{0, 1};
    CHECK((pair_first ? m.columns[0].g2 : m.columns[0].g1) == ClassSet{2});
    CHECK((pair_first ? m.columns[0].g1 : m.columns[0].g2) == ClassSet{0, 1});
    CHECK(std::abs(m.values(0, 0)) == 1.0);
    CHECK(m.values(1, 0) == m.values(0, 0));
    CHECK(m.values(2, 0) == -m.values(0, 0));
    CHECK(std::abs(m.values(0, 1)) == 1.0);
    CHECK(std::abs(m.values(1, 1)) == 1.0);
    CHECK(m.values(0, 1) == -m.values(1, 1));
    CHECK(m.values(2, 1) == 0.0);
    const CodingMatrix d = build_decoc_like(ds);
    CHECK(d.values.cols() == 2);
    CHECK((d.values.array() == 0).count() == 1);
  }

  TEST_CASE("six classes: zeros outside each subtree") {
    const Dataset ds = testing::random_dataset(2024, 6, 20, 60, 4);
    const CodingMatrix m = build_csecoc(ds);
    CHECK(m.rows() == 6);
    CHECK(m.cols() == 5);
    CHECK((m.values.col(0).array() != 0).all());
    for (int l = 1; l < 5; ++l) CHECK((m.values.col(l).array() == 0).any());
    CHECK(validate_matrix(m).ok());
  }

  TEST_CASE("tree codes: signs, integrality, tree consistency") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const int nc = 2 + static_cast<int>(seed % 7);
      const Dataset ds = testing::random_dataset(seed + 50, nc, 3, 30, 2);
      const CodingMatrix m = build_csecoc(ds);
      const CodingMatrix d = build_decoc_like(ds);
      REQUIRE(m.cols() == nc - 1);
      REQUIRE(d.cols() == nc - 1);
      CHECK(validate_matrix(m).ok());
      CHECK(validate_matrix(d).ok());
      for (int l = 0; l < m.cols(); ++l) {
        const auto& c = m.columns[static_cast<std::size_t>(l)];
        for (int r = 0; r < nc; ++r) {
          const double v = m.values(r, l);
          const bool in1 = std::binary_search(c.g1.begin(), c.g1.end(), r);
          const bool in2 = std::binary_search(c.g2.begin(), c.g2.end(), r);
          CHECK(((in1 && v >= 0) || (in2 && v <= 0) || (!in1 && !in2 && v == 0)));
          const double n = static_cast<double>(ds.class_counts()[static_cast<std::size_t>(r)]);
          CHECK(static_cast<double>(std::llround(std::abs(v) * n)) / n == std::abs(v));
          const double s = (v > 0) - (v < 0);
          CHECK(d.values(r, l) == (s != 0 ? s : (in1 ? 1.0 : (in2 ? -1.0 : 0.0))));
        }
        if (c.parent < 0) {
          CHECK(merged(c) == all_classes(nc));
        } else {
          const auto& p = m.columns[static_cast<std::size_t>(c.parent)];
          CHECK((merged(c) == p.g1 || merged(c) == p.g2));
        }
      }
    }
  }

  TEST_CASE("iris partitions match an independent search") {
    const Dataset ds = testing::load("iris");
    const CodingMatrix m = build_csecoc(ds);
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 2);
    const auto root = sffs_bipartition(ds, all_classes(3));
    CHECK(m.columns[0].g1 == root.g1);
    CHECK(m.columns[0].g2 == root.g2);
    CHECK(m.columns[0].score == root.score);
    const ClassSet& inner = root.g1.size() > 1 ? root.g1 : root.g2;
    const auto child = sffs_bipartition(ds, inner);
    CHECK(m.columns[1].g1 == child.g1);
    CHECK(m.columns[1].g2 == child.g2);
  }

  TEST_CASE("standard constructions") {
    const CodingMatrix ova = build_baseline(MatrixKind::ova, 3);
    CHECK(ova.values.rows() == 3);
    CHECK(ova.values.cols() == 3);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) CHECK(ova.values(r, c) == (r == c ? 1.0 : -1.0));
    }
    CHECK(build_baseline(MatrixKind::ovo, 4).cols() == 6);
    CHECK(build_baseline(MatrixKind::ovo, 6).cols() == 15);
    CHECK(build_baseline(MatrixKind::dense_random, 6).cols() == 26);
    CHECK(build_baseline(MatrixKind::sparse_random, 6).cols() == 39);
    CHECK(ensemble_size(MatrixKind::csecoc, 6) == 5);
    CHECK(ensemble_size(MatrixKind::dense_random, 3) == 16);
    CHECK(ensemble_size(MatrixKind::sparse_random, 4) == 30);
  }

  TEST_CASE("random codes are valid, deterministic and seed dependent") {
    for (int nc = 3; nc <= 8; ++nc) {
      for (MatrixKind k : {MatrixKind::dense_random, MatrixKind::sparse_random}) {
        RandomCodeOptions o;
        o.candidates = 50;
        const CodingMatrix a = build_baseline(k, nc, o);
        const CodingMatrix b = build_baseline(k, nc, o);
        CHECK(a.values == b.values);
        CHECK(validate_matrix(a).ok());
        CHECK(min_row_distance(a.values) > 0.0);
        o.seed = 43;
        CHECK(build_baseline(k, nc, o).values != a.values);
      }
    }
  }

  TEST_CASE("more candidates never lower the minimum row distance of the chosen code") {
    RandomCodeOptions few;
    few.candidates = 1;
    RandomCodeOptions many;
    const CodingMatrix a = build_baseline(MatrixKind::dense_random, 6, few);
    const CodingMatrix b = build_baseline(MatrixKind::dense_random, 6, many);
    CHECK(min_row_distance(b.values) >= min_row_distance(a.values));
  }

  TEST_CASE("validity violations") {
    CodingMatrix m = build_baseline(MatrixKind::ova, 3);
    m.values(0, 1) = 1.0;
    m.values(2, 1) = 1.0;
    m.values(1, 1) = 1.0;
    auto v = validate_matrix(m);
    CHECK_FALSE(v.ok());
    bool found = false;
    for (const auto& s : v.violations) found = found || s.find("lacks negative entry") != std::string::npos;
    CHECK(found);

    const Dataset ds = testing::random_dataset(8, 6, 10, 20, 3);
    CodingMatrix six = build_csecoc(ds);
    six.values.row(5) = six.values.row(4);
    v = validate_matrix(six);
    found = false;
    for (const auto& s : v.violations) found = found || s.find("duplicate rows") != std::string::npos;
    CHECK(found);

    CodingMatrix hard = build_baseline(MatrixKind::ovo, 4);
    hard.values(0, 0) = 0.5;
    CHECK_FALSE(validate_matrix(hard).ok());

    CodingMatrix big = build_baseline(MatrixKind::ova, 3);
    big.values(0, 0) = 1.5;
    CHECK_FALSE(validate_matrix(big).ok());
  }

  TEST_CASE("csv round trip") {
    const Dataset ds = testing::load("iris");
    const CodingMatrix m = build_csecoc(ds);
    std::stringstream s;
    write_matrix_csv(m, s);
    const std::string text = s.str();
    CHECK(text.rfind("class,H0,H1\n", 0) == 0);
    const CodingMatrix back = read_matrix_csv(s);
    CHECK(back.kind == MatrixKind::csecoc);
    CHECK(back.class_names == m.class_names);
    CHECK((back.values - m.values).cwiseAbs().maxCoeff() <= 5e-7);
    for (int l = 0; l < m.cols(); ++l) {
      CHECK(back.columns[static_cast<std::size_t>(l)].g1 == m.columns[static_cast<std::size_t>(l)].g1);
      CHECK(back.columns[static_cast<std::size_t>(l)].g2 == m.columns[static_cast<std::size_t>(l)].g2);
      CHECK(back.columns[static_cast<std::size_t>(l)].parent == m.columns[static_cast<std::size_t>(l)].parent);
    }
    CHECK(validate_matrix(back).ok());

    const CodingMatrix ovo = build_baseline(MatrixKind::ovo, 5);
    std::stringstream t;
    write_matrix_csv(ovo, t);
    const CodingMatrix hard = read_matrix_csv(t, MatrixKind::ovo);
    CHECK(hard.values == ovo.values);
    CHECK(validate_matrix(hard).ok());
  }

  TEST_CASE("malformed matrix files") {
    std::istringstream ragged("class,H0,H1\na,1,-1\nb,1\n");
    CHECK_THROWS(read_matrix_csv(ragged));
    std::istringstream bad("class,H0\na,x\nb,-1\n");
    CHECK_THROWS(read_matrix_csv(bad));
  }

  TEST_CASE("method names") {
    CHECK(parse_matrix_kind("decoc") == MatrixKind::decoc_like);
    CHECK(parse_matrix_kind("dense_random") == MatrixKind::dense_random);
    CHECK_FALSE(parse_matrix_kind("svm").has_value());
    CHECK(to_string(MatrixKind::sparse_random) == "sparse_random");
  }
}
