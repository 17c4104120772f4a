// Synthetic scenario generators: shapes, determinism, the moments each
// construction implies, shared-coordinate identities, and pairing shuffles.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "slicedmi/synthetic.hpp"

namespace slicedmi {
namespace {

double column_mean(const Eigen::VectorXd& v) { return v.mean(); }

double column_var(const Eigen::VectorXd& v) {
  const double m = v.mean();
  return (v.array() - m).square().mean();
}

double column_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  const double cov = ((a.array() - ma) * (b.array() - mb)).mean();
  return cov / std::sqrt(column_var(a) * column_var(b));
}

TEST(Generate, ShapesMatchScenario) {
  const std::int64_t n = 50;
  for (auto kind : {Scenario::Kind::one_feature_linear, Scenario::Kind::one_feature_sin,
                    Scenario::Kind::two_features, Scenario::Kind::low_rank,
                    Scenario::Kind::independent}) {
    const DataSet data = generate(Scenario::of(kind, 4, n, 1));
    EXPECT_EQ(data.x.rows(), n);
    EXPECT_EQ(data.x.cols(), 4);
    EXPECT_EQ(data.y.rows(), n);
    EXPECT_EQ(data.y.cols(), 4);
  }
  const DataSet needle = generate(Scenario::of(Scenario::Kind::feature_needle, 6, n, 1));
  EXPECT_EQ(needle.x.cols(), 6);
  EXPECT_EQ(needle.y.cols(), 1);
  const DataSet over = generate(Scenario::overlap(4, 1, 3, 2, 4, n, 1));
  EXPECT_EQ(over.x.cols(), 3);
  EXPECT_EQ(over.y.cols(), 3);
}

TEST(Generate, DeterministicInSeed) {
  for (auto kind : {Scenario::Kind::one_feature_linear, Scenario::Kind::low_rank,
                    Scenario::Kind::feature_needle}) {
    const DataSet a = generate(Scenario::of(kind, 3, 40, 9));
    const DataSet b = generate(Scenario::of(kind, 3, 40, 9));
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    const DataSet c = generate(Scenario::of(kind, 3, 40, 10));
    EXPECT_NE(a.x, c.x);
  }
}

TEST(Generate, OverlapSharesCoordinatesExactly) {
  const DataSet data = generate(Scenario::overlap(4, 1, 3, 2, 4, 200, 3));
  // X = (Z1,Z2,Z3), Y = (Z2,Z3,Z4): columns are shared, not merely correlated.
  EXPECT_EQ(data.x.col(1), data.y.col(0));
  EXPECT_EQ(data.x.col(2), data.y.col(1));
  EXPECT_NE(data.x.col(0), data.y.col(2));
}

TEST(Generate, MarginalMomentsMatchTheConstructions) {
  const std::int64_t n = 100000;
  const int d = 4;

  // Y_j = (S/sqrt(d) + Z)/sqrt(2) with S/sqrt(d) standard normal: Var = 1.
  {
    const DataSet data = generate(Scenario::of(Scenario::Kind::one_feature_linear, d, n, 11));
    for (int j = 0; j < d; ++j) {
      EXPECT_NEAR(column_mean(data.y.col(j)), 0.0, 4.0 / std::sqrt(n));
      EXPECT_NEAR(column_var(data.y.col(j)), 1.0, 0.02);
    }
    EXPECT_NEAR(column_var(data.x.col(0)), 1.0, 0.02);
  }

  // sin(S) with S ~ N(0, d): E sin^2 = (1 - e^{-2d})/2, so
  // Var(Y_j) = ((1 - e^{-2d})/(2d) + 1)/2.
  {
    const DataSet data = generate(Scenario::of(Scenario::Kind::one_feature_sin, d, n, 12));
    const double expected = ((1.0 - std::exp(-2.0 * d)) / (2.0 * d) + 1.0) / 2.0;
    for (int j = 0; j < d; ++j) EXPECT_NEAR(column_var(data.y.col(j)), expected, 0.02);
  }

  // Half-sum features scaled by 1/d: Var(f) = (d/2)/d^2, Var(Y_j) = (Var(f)+1)/2.
  {
    const DataSet data = generate(Scenario::of(Scenario::Kind::two_features, d, n, 13));
    const double expected = ((d / 2) / static_cast<double>(d * d) + 1.0) / 2.0;
    for (int j = 0; j < d; ++j) EXPECT_NEAR(column_var(data.y.col(j)), expected, 0.02);
  }

  // Coordinatewise Y_j = (X_j + Z)/sqrt(2): unit variance, correlation 1/sqrt(2).
  {
    const DataSet data = generate(Scenario::of(Scenario::Kind::independent, d, n, 14));
    for (int j = 0; j < d; ++j) {
      EXPECT_NEAR(column_var(data.y.col(j)), 1.0, 0.02);
      EXPECT_NEAR(column_corr(data.x.col(j), data.y.col(j)), 1.0 / std::sqrt(2.0), 0.015);
    }
    // Off-coordinate pairs stay uncorrelated.
    EXPECT_NEAR(column_corr(data.x.col(0), data.y.col(1)), 0.0, 0.015);
  }

  // Scalar needle Y = X_1 + Z: Var 2, correlated only with the first column.
  {
    const DataSet data = generate(Scenario::of(Scenario::Kind::feature_needle, d, n, 15));
    EXPECT_NEAR(column_var(data.y.col(0)), 2.0, 0.04);
    EXPECT_NEAR(column_corr(data.y.col(0), data.x.col(0)), 1.0 / std::sqrt(2.0), 0.015);
    EXPECT_NEAR(column_corr(data.y.col(0), data.x.col(1)), 0.0, 0.015);
  }
}

TEST(Generate, LowRankDrawsFreshProjectionsPerSeed) {
  // The projection pair is part of the seed's draw, so the cross-covariance
  // changes between seeds while the marginal means stay centered.
  const std::int64_t n = 20000;
  const DataSet a = generate(Scenario::of(Scenario::Kind::low_rank, 5, n, 21));
  const DataSet b = generate(Scenario::of(Scenario::Kind::low_rank, 5, n, 22));
  const auto cross = [](const DataSet& data) {
    Eigen::MatrixXd xc = data.x.rowwise() - data.x.colwise().mean();
    Eigen::MatrixXd yc = data.y.rowwise() - data.y.colwise().mean();
    return Eigen::MatrixXd((xc.transpose() * yc) / static_cast<double>(data.x.rows()));
  };
  const Eigen::MatrixXd ca = cross(a), cb = cross(b);
  EXPECT_GE((ca - cb).cwiseAbs().maxCoeff(), 0.1);
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(column_mean(a.x.col(j)), 0.0, 6.0 * std::sqrt(3.0 / n));
    EXPECT_NEAR(column_mean(a.y.col(j)), 0.0, 6.0 * std::sqrt(3.0 / n));
  }
  // The shared two-dimensional signal makes X and Y dependent.
  EXPECT_GE(ca.cwiseAbs().maxCoeff(), 0.1);
}

TEST(ShufflePairing, PermutesRowsOnly) {
  const DataSet data = generate(Scenario::of(Scenario::Kind::independent, 3, 100, 31));
  SeededRng rng(7);
  const DataSet shuffled = shuffle_pairing(data.x, data.y, rng);
  EXPECT_EQ(shuffled.x, data.x);
  EXPECT_NE(shuffled.y, data.y);

  // Same multiset of rows: sort row vectors lexicographically and compare.
  const auto sorted_rows = [](const SampleMatrix& m) {
    std::vector<std::vector<double>> rows(m.rows());
    for (std::int64_t i = 0; i < m.rows(); ++i) {
      rows[i].assign(m.row(i).begin(), m.row(i).end());
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  EXPECT_EQ(sorted_rows(shuffled.y), sorted_rows(data.y));

  // Same stream state reproduces the permutation.
  SeededRng rng2(7);
  const DataSet again = shuffle_pairing(data.x, data.y, rng2);
  EXPECT_EQ(again.y, shuffled.y);

  // A single row has nothing to permute.
  SampleMatrix one_x = data.x.topRows(1), one_y = data.y.topRows(1);
  SeededRng rng3(7);
  const DataSet single = shuffle_pairing(one_x, one_y, rng3);
  EXPECT_EQ(single.y, one_y);

  SampleMatrix short_y = data.y.topRows(50);
  SeededRng rng4(7);
  EXPECT_THROW(shuffle_pairing(data.x, short_y, rng4), input_error);
}

TEST(Scenario, ValidationAndNames) {
  EXPECT_THROW(generate(Scenario::of(Scenario::Kind::independent, 3, 0, 1)), input_error);
  EXPECT_THROW(generate(Scenario::of(Scenario::Kind::independent, 0, 10, 1)), input_error);
  EXPECT_THROW(generate(Scenario::of(Scenario::Kind::two_features, 1, 10, 1)), input_error);
  EXPECT_THROW(generate(Scenario::overlap(4, 2, 1, 1, 4, 10, 1)), input_error);
  EXPECT_THROW(generate(Scenario::overlap(4, 1, 3, 0, 4, 10, 1)), input_error);

  for (auto kind : {Scenario::Kind::overlap, Scenario::Kind::one_feature_linear,
                    Scenario::Kind::one_feature_sin, Scenario::Kind::two_features,
                    Scenario::Kind::low_rank, Scenario::Kind::independent,
                    Scenario::Kind::feature_needle}) {
    EXPECT_EQ(scenario_kind_from_name(scenario_kind_name(kind)), kind);
  }
  EXPECT_THROW(scenario_kind_from_name("not_a_kind"), config_error);
}

}  // namespace
}  // namespace slicedmi
