#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "srs/phantom.hpp"

namespace srs {
namespace {

TEST(PiecewisePhantom, ClassMeansAndConsistentValues) {
  const Phantom ph = make_piecewise_phantom(64);
  ASSERT_EQ(ph.class_means.size(), 8u);
  for (int k = 1; k <= 8; ++k) EXPECT_DOUBLE_EQ(ph.class_means[k - 1], (k - 1) / 7.0);
  EXPECT_DOUBLE_EQ(ph.class_std, 0.1);
  for (std::size_t j = 0; j < ph.image.size(); ++j)
    EXPECT_EQ(ph.image.values[j], (ph.labels.labels[j] - 1) / 7.0);
  EXPECT_EQ(ph.labels.labels.front(), 1);  // corner is background
}

TEST(PiecewisePhantom, EveryClassCoversHalfAPercent) {
  const Phantom ph = make_piecewise_phantom(64);
  std::vector<int> counts(8, 0);
  for (int l : ph.labels.labels) ++counts[l - 1];
  for (int k = 0; k < 8; ++k) EXPECT_GE(counts[k], 0.005 * 4096) << "class " << k + 1;
}

TEST(PiecewisePhantom, ValueSetIsExactlyTheClassMeans) {
  const Phantom ph = make_piecewise_phantom(128);
  std::set<double> seen(ph.image.values.begin(), ph.image.values.end());
  EXPECT_EQ(seen.size(), 8u);
  for (double v : seen) {
    const double k = v * 7.0;
    EXPECT_NEAR(k, std::round(k), 1e-12);
  }
}

TEST(PiecewisePhantom, LabelBoundariesAreSparse) {
  const int n = 64;
  const Phantom ph = make_piecewise_phantom(n);
  int edges = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int j = r * n + c;
      if (c + 1 < n && ph.labels.labels[j] != ph.labels.labels[j + 1]) ++edges;
      if (r + 1 < n && ph.labels.labels[j] != ph.labels.labels[j + n]) ++edges;
    }
  EXPECT_GT(edges, 0);
  EXPECT_LT(edges, 2 * n * n / 8);
}

TEST(PiecewisePhantom, DeterministicAndSizeChecked) {
  EXPECT_EQ(make_piecewise_phantom(48).image.values, make_piecewise_phantom(48).image.values);
  EXPECT_THROW(make_piecewise_phantom(15), ParameterError);
  EXPECT_NO_THROW(make_piecewise_phantom(16));
}

TEST(SmoothPhantom, MeansAndNearestLabels) {
  const Phantom ph = make_smooth_phantom(64);
  ASSERT_EQ(ph.class_means, (std::vector<double>{0.16, 0.24, 0.565}));
  EXPECT_DOUBLE_EQ(ph.class_std, 0.05);
  std::vector<int> counts(3, 0);
  for (std::size_t j = 0; j < ph.image.size(); ++j) {
    const double v = ph.image.values[j];
    int best = 1;
    for (int k = 2; k <= 3; ++k)
      if (std::abs(v - ph.class_means[k - 1]) < std::abs(v - ph.class_means[best - 1])) best = k;
    EXPECT_EQ(ph.labels.labels[j], best);
    ++counts[best - 1];
  }
  for (int c : counts) EXPECT_GT(c, 0);
}

TEST(SmoothPhantom, GradientIsMostlyNonzero) {
  const int n = 64;
  const Phantom ph = make_smooth_phantom(n);
  int nonzero = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int j = r * n + c;
      const double h = c + 1 < n ? ph.image.values[j + 1] - ph.image.values[j] : 0.0;
      const double v = r + 1 < n ? ph.image.values[j + n] - ph.image.values[j] : 0.0;
      if (h != 0.0 || v != 0.0) ++nonzero;
    }
  EXPECT_GT(nonzero, n * n / 2);
}

TEST(SmoothPhantom, DeterministicAndSizeChecked) {
  EXPECT_EQ(make_smooth_phantom(40).image.values, make_smooth_phantom(40).image.values);
  EXPECT_THROW(make_smooth_phantom(8), ParameterError);
  const Phantom small = make_smooth_phantom(16);
  std::set<int> classes(small.labels.labels.begin(), small.labels.labels.end());
  EXPECT_EQ(classes.size(), 3u);
}

}  // namespace
}  // namespace srs
