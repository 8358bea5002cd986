#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "hpwl/dataset.hpp"
#include "hpwl/errors.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace hpwl;

namespace {

fs::path write_temp_csv(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_csv parses a plain numeric table") {
  const auto path = write_temp_csv("hpwl_plain.csv", "1,2\n3,4\n5,6\n");
  const DataMatrix x = load_csv(path, /*has_header=*/false);
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 2);
  CHECK(x.values(0, 0) == 1.0);
  CHECK(x.values(2, 1) == 6.0);
  CHECK_FALSE(x.labels.has_value());
}

TEST_CASE("load_csv extracts a label column given as an index") {
  const auto path = write_temp_csv("hpwl_labeled.csv", "1,2\n3,4\n5,6\n");
  const DataMatrix x = load_csv(path, false, std::string("1"));
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 1);
  REQUIRE(x.labels.has_value());
  CHECK((*x.labels)(0) == 2);
  CHECK((*x.labels)(1) == 4);
  CHECK((*x.labels)(2) == 6);
  CHECK(x.values(1, 0) == 3.0);
}

TEST_CASE("load_csv resolves a label column by header name") {
  const auto path = write_temp_csv("hpwl_header.csv", "alpha,beta,y\n1,2,0\n3,4,1\n");
  const DataMatrix x = load_csv(path, true, std::string("y"));
  CHECK(x.cols() == 2);
  REQUIRE(x.feature_names.has_value());
  CHECK((*x.feature_names)[0] == "alpha");
  CHECK((*x.feature_names)[1] == "beta");
  REQUIRE(x.labels.has_value());
  CHECK((*x.labels)(1) == 1);
}

TEST_CASE("load_csv rejects malformed content") {
  const auto bad_cell = write_temp_csv("hpwl_bad.csv", "abc,2\n3,4\n");
  CHECK_THROWS_WITH_AS(load_csv(bad_cell, false), doctest::Contains("row 0"), LoadError);

  const auto ragged = write_temp_csv("hpwl_ragged.csv", "1,2\n3\n5,6\n");
  CHECK_THROWS_AS(load_csv(ragged, false), LoadError);

  const auto non_finite = write_temp_csv("hpwl_inf.csv", "1,inf\n3,4\n");
  CHECK_THROWS_AS(load_csv(non_finite, false), LoadError);

  const auto ok = write_temp_csv("hpwl_ok.csv", "1,2\n3,4\n");
  CHECK_THROWS_AS(load_csv(ok, false, std::string("nope")), ConfigError);
  CHECK_THROWS_AS(load_csv(fs::temp_directory_path() / "hpwl_does_not_exist.csv", false),
                  ConfigError);
}

TEST_CASE("standardize centers and scales columns") {
  DataMatrix x;
  x.values.resize(2, 1);
  x.values << 1, 3;
  const DataMatrix s = standardize(x);
  CHECK(s.values(0, 0) == doctest::Approx(-1.0));
  CHECK(s.values(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("standardize maps constant columns to zero") {
  DataMatrix x;
  x.values.resize(3, 1);
  x.values << 5, 5, 5;
  const DataMatrix s = standardize(x);
  CHECK(s.values.col(0).norm() == 0.0);
}

TEST_CASE("standardize produces exact zero mean and unit population deviation") {
  DataMatrix x;
  x.values.resize(3, 1);
  x.values << 0, 0, 3;
  const DataMatrix s = standardize(x);
  const double mean = s.values.col(0).mean();
  const double var = (s.values.col(0).array() - mean).square().sum() / 3.0;
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("standardize is idempotent") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    DataMatrix x;
    x.values = hpwl::testing::random_matrix(20, 7, rng, 3.0);
    x.values.col(3).setConstant(2.5);  // a degenerate column flows through
    const DataMatrix once = standardize(x);
    const DataMatrix twice = standardize(once);
    CHECK((twice.values - once.values).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("split_half partitions deterministically") {
  DataMatrix x;
  x.values = Eigen::MatrixXd::Zero(4, 1);
  const Split a = split_half(x, 7);
  const Split b = split_half(x, 7);
  CHECK(a.train_indices.size() == 2);
  CHECK(a.test_indices.size() == 2);
  CHECK(a.train_indices == b.train_indices);
  CHECK(a.test_indices == b.test_indices);

  DataMatrix odd;
  odd.values = Eigen::MatrixXd::Zero(5, 1);
  const Split c = split_half(odd, 0);
  CHECK(c.train_indices.size() == 3);
  CHECK(c.test_indices.size() == 2);
}

TEST_CASE("split_half partitions exactly for random sizes and seeds") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 49);
    DataMatrix x;
    x.values = Eigen::MatrixXd::Zero(n, 1);
    const Split s = split_half(x, rng());
    std::set<Eigen::Index> all(s.train_indices.begin(), s.train_indices.end());
    for (Eigen::Index i : s.test_indices) {
      CHECK(all.count(i) == 0);
      all.insert(i);
    }
    CHECK(all.size() == static_cast<size_t>(n));
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == n - 1);
    CHECK(s.train_indices.size() == static_cast<size_t>((n + 1) / 2));
  }
}

TEST_CASE("distinct seeds give distinct shuffles") {
  DataMatrix x;
  x.values = Eigen::MatrixXd::Zero(40, 1);
  const Split a = split_half(x, 1);
  const Split b = split_half(x, 2);
  CHECK(a.train_indices != b.train_indices);
}
