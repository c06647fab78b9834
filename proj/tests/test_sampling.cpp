#include <doctest.h>

#include <set>

#include "entgap/inequality.hpp"
#include "entgap/sampling.hpp"
#include "test_support.hpp"

using namespace entgap;
using entgap::test::max_abs;

TEST_CASE("haar_state is normalized and deterministic") {
  const FactorShape shape{2, 3, 2, 3};
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    REQUIRE(std::abs(haar_state(shape, seed).amplitudes().norm() - 1.0) <= 1e-12);
  CHECK(haar_state(shape, 42).amplitudes() == haar_state(shape, 42).amplitudes());
  CHECK(haar_state(shape, 42).amplitudes() != haar_state(shape, 43).amplitudes());
}

TEST_CASE("haar_state has uniform mean weight") {
  const FactorShape shape{2, 2, 2, 2};
  const int draws = 10000;
  // weight on one fixed component; mean 1/D, compared within 3 standard errors
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double w = std::norm(haar_state(shape, derive_seed(99, static_cast<std::uint64_t>(k)))[3]);
    sum += w;
    sum_sq += w * w;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 1.0 / 16.0) <= 3.0 * se);
}

TEST_CASE("haar_unitary") {
  const auto u1 = haar_unitary(1, 3);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) <= 1e-14);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto u = haar_unitary(4, seed);
    REQUIRE(max_abs(u.adjoint() * u - Eigen::MatrixXcd::Identity(4, 4)) <= 1e-10);
  }
  CHECK(haar_unitary(3, 8) == haar_unitary(3, 8));
  CHECK_THROWS_AS(haar_unitary(0, 1), InputError);

  // the image of the product basis of C2 (x) C2 stays orthonormal
  const Eigen::MatrixXcd rotated = haar_unitary(4, 17) * Eigen::MatrixXcd::Identity(4, 4);
  CHECK(max_abs(rotated.adjoint() * rotated - Eigen::MatrixXcd::Identity(4, 4)) <= 1e-10);
}

TEST_CASE("derive_seed") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("scan of one sample reproduces bn_gap") {
  const FactorShape shape{2, 2, 2, 2};
  const auto report = scan(1, shape, 123);
  REQUIRE(report.per_sample.size() == 1);
  const auto& row = report.per_sample.front();
  CHECK(row.derived_seed == derive_seed(123, 0));

  const FourFactorState s(haar_state(shape, row.derived_seed));
  const auto g = bn_gap(s, schmidt_decompose(s.state(), additivity_split()));
  CHECK(row.lhs == g.lhs);
  CHECK(row.rhs == g.rhs);
  CHECK(row.gap == g.gap);
  CHECK(report.min_gap == g.gap);
  CHECK(report.max_gap == g.gap);
}

TEST_CASE("scan is deterministic across runs and thread counts") {
  const FactorShape shape{3, 2, 3, 2};
  const auto a = scan(40, shape, 9);
  const auto b = scan(40, shape, 9);
  ScanOptions parallel;
  parallel.threads = 4;
  const auto c = scan(40, shape, 9, parallel);
  REQUIRE(a.per_sample.size() == 40);
  for (std::size_t i = 0; i < a.per_sample.size(); ++i) {
    REQUIRE(a.per_sample[i].gap == b.per_sample[i].gap);
    REQUIRE(a.per_sample[i].gap == c.per_sample[i].gap);
    REQUIRE(a.per_sample[i].derived_seed == c.per_sample[i].derived_seed);
  }
  CHECK(a.mean_gap == c.mean_gap);
}

TEST_CASE("scan aggregates are consistent with the rows") {
  auto report = scan(60, FactorShape{2, 2, 2, 2}, 4);
  Index violations = 0;
  double lo = 1e300, hi = -1e300;
  for (const auto& row : report.per_sample) {
    REQUIRE(row.ok());
    violations += row.gap < -1e-9 ? 1 : 0;
    lo = std::min(lo, row.gap);
    hi = std::max(hi, row.gap);
  }
  CHECK(report.violation_count == violations);
  CHECK(report.min_gap == lo);
  CHECK(report.max_gap == hi);
  CHECK(report.min_gap <= report.mean_gap);
  CHECK(report.mean_gap <= report.max_gap);

  // shuffled rows aggregate to the same numbers
  const auto before = report;
  std::reverse(report.per_sample.begin(), report.per_sample.end());
  aggregate(report);
  CHECK(report.mean_gap == before.mean_gap);
  CHECK(report.per_sample.front().sample_index == 0);
}

TEST_CASE("scan records failed samples instead of aborting") {
  ScanOptions strict;
  strict.residual_tol = 1e-300;
  const auto report = scan(5, FactorShape{2, 2, 2, 2}, 1, strict);
  CHECK(report.failed_count == 5);
  CHECK(report.violation_count == 0);
  CHECK(std::isnan(report.mean_gap));
  for (const auto& row : report.per_sample) CHECK_FALSE(row.ok());

  CHECK_THROWS_AS(scan(0, FactorShape{2, 2, 2, 2}, 1), InputError);
  CHECK_THROWS_AS(scan(3, FactorShape{2, 2, 2}, 1), InputError);
}
