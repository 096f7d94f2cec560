#include <gtest/gtest.h>

#include <random>

#include "srs/kernels.hpp"
#include "srs/metrics.hpp"

namespace srs {
namespace {

TEST(Labels, ArgmaxAndTies) {
  MeasureField f(2, 3, 0.0);
  f(0, 0) = 0.1, f(0, 1) = 0.8, f(0, 2) = 0.1;
  f(1, 0) = 0.4, f(1, 1) = 0.2, f(1, 2) = 0.4;
  const LabelMap l = labels_from(f);
  EXPECT_EQ(l.labels, (std::vector<int>{2, 1}));
  EXPECT_EQ(l.classes, 3);
  EXPECT_EQ(labels_from(MeasureField::uniform(1, 2)).labels, std::vector<int>{1});
}

TEST(Labels, InvariantUnderScalingOfPsiScores) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  MeasureField eta(50, 4, 0.0), zero(50, 4, 0.0);
  for (auto& v : eta.data()) v = u(rng);
  const LabelMap base = labels_from(update_psi(eta, zero, 1.0, 1e-6));
  for (double c : {0.5, 3.0, 40.0}) {
    MeasureField scaled = eta;
    for (auto& v : scaled.data()) v *= c;
    EXPECT_EQ(labels_from(update_psi(scaled, zero, 1.0, 1e-6)).labels, base.labels);
  }
}

TEST(RecErr, Examples) {
  const std::vector<double> truth{1.0, -2.0, 0.5};
  EXPECT_EQ(rec_err(truth, truth), 0.0);
  std::vector<double> x(3);
  for (double c : {2.0, 0.25, 7.0}) {
    for (int i = 0; i < 3; ++i) x[i] = c * truth[i];
    EXPECT_NEAR(rec_err(x, truth), std::abs(c - 1.0) / c, 1e-14);
  }
  EXPECT_THROW(rec_err(std::vector<double>(3, 0.0), truth), UndefinedMetricError);
  EXPECT_THROW(rec_err(std::vector<double>(2, 1.0), truth), ParameterError);
}

TEST(SegErr, CountsMismatches) {
  LabelMap a{{1, 2, 3, 1}, 3}, b{{1, 2, 3, 2}, 3};
  EXPECT_EQ(seg_err(a, a), 0.0);
  EXPECT_EQ(seg_err(a, b), 0.25);
  EXPECT_EQ(seg_err(b, a), 0.25);
  LabelMap c{{1, 2}, 3};
  EXPECT_THROW(seg_err(a, c), ParameterError);
}

TEST(IsolatedPoints, Counting) {
  std::vector<double> x(25, 0.0);
  x[12] = 1.0;  // centre spike
  EXPECT_EQ(count_isolated_points(x, 5, 0.5), 1u);
  x[0] = 1.0;  // corner spike, two neighbours
  EXPECT_EQ(count_isolated_points(x, 5, 0.5), 2u);
  x[13] = 1.0;  // centre spike now has a matching neighbour
  EXPECT_EQ(count_isolated_points(x, 5, 0.5), 1u);
  EXPECT_EQ(count_isolated_points(std::vector<double>(25, 0.3), 5, 0.0), 0u);
}

}  // namespace
}  // namespace srs
