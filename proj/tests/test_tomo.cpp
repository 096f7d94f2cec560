#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "srs/tomo.hpp"

namespace srs {
namespace {

SystemMatrix from_dense(const oracle::Dense& d) {
  std::vector<std::size_t> offsets{0};
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
  for (const auto& row : d) {
    for (std::size_t c = 0; c < row.size(); ++c)
      if (row[c] != 0.0) cols.push_back(static_cast<std::int32_t>(c)), vals.push_back(row[c]);
    offsets.push_back(vals.size());
  }
  return SystemMatrix(d.size(), d.empty() ? 0 : d[0].size(), offsets, cols, vals);
}

TEST(Geometry, DefaultExperimentShape) {
  const auto angles = angle_range(6, 6, 180);
  ASSERT_EQ(angles.size(), 30u);
  const SystemMatrix a = build_parallel_geometry(64, 91, angles);
  EXPECT_EQ(a.rows(), 2730u);
  EXPECT_EQ(a.cols(), 4096u);
  EXPECT_NEAR(static_cast<double>(a.rows()) / a.cols(), 0.6665, 1e-4);
  for (double v : a.values()) EXPECT_GT(v, 0.0);
}

TEST(Geometry, AxisAlignedRayAlongPixelRow) {
  const std::vector<double> angles{90.0};
  const SystemMatrix a = build_parallel_geometry(4, 1, angles);
  ASSERT_EQ(a.rows(), 1u);
  ASSERT_EQ(a.nonzeros(), 4u);
  std::vector<std::int32_t> cols(a.col_indices().begin(), a.col_indices().end());
  std::sort(cols.begin(), cols.end());
  for (int i = 0; i < 4; ++i) EXPECT_EQ(cols[i] / 4, cols[0] / 4);  // one pixel row
  for (double v : a.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Geometry, RowSumsMatchClippedChord) {
  const std::vector<double> angles{30.0};
  const SystemMatrix a = build_parallel_geometry(8, 11, angles);
  ASSERT_EQ(a.rows(), 11u);
  for (int d = 0; d < 11; ++d) {
    const Ray r = parallel_ray(8, 11, 30.0, d);
    const double chord = oracle::chord_length(r.origin_x, r.origin_y, r.dir_x, r.dir_y, 8.0);
    EXPECT_NEAR(a.row_sum(d), chord, 1e-9) << "detector " << d;
  }
}

TEST(Geometry, RandomRaysMatchChordOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> pos(-3.0, 19.0);
  const int n = 16;
  for (int trial = 0; trial < 100; ++trial) {
    const double th = angle(rng);
    const Ray ray{pos(rng), pos(rng), std::cos(th), std::sin(th)};
    std::vector<std::int32_t> cols;
    std::vector<double> lens;
    trace_ray(ray, n, cols, lens);
    double sum = 0.0;
    for (double l : lens) sum += l;
    EXPECT_NEAR(sum, oracle::chord_length(ray.origin_x, ray.origin_y, ray.dir_x, ray.dir_y, n),
                1e-9);
    for (auto c : cols) EXPECT_TRUE(c >= 0 && c < n * n);
  }
}

TEST(Geometry, ParallelBuildMatchesSerialReference) {
  const auto angles = angle_range(3, 7, 180);
  const SystemMatrix par = build_parallel_geometry(32, 45, angles);
  const SystemMatrix ser = reference::build_parallel_geometry(32, 45, angles);
  ASSERT_EQ(par.nonzeros(), ser.nonzeros());
  EXPECT_TRUE(std::equal(par.row_offsets().begin(), par.row_offsets().end(),
                         ser.row_offsets().begin()));
  EXPECT_TRUE(std::equal(par.col_indices().begin(), par.col_indices().end(),
                         ser.col_indices().begin()));
  EXPECT_TRUE(std::equal(par.values().begin(), par.values().end(), ser.values().begin()));
}

TEST(Geometry, RejectsInvalidParameters) {
  const std::vector<double> ok{45.0};
  EXPECT_THROW(build_parallel_geometry(1, 3, ok), ParameterError);
  EXPECT_THROW(build_parallel_geometry(8, 0, ok), ParameterError);
  EXPECT_THROW(build_parallel_geometry(8, 3, std::vector<double>{}), ParameterError);
  EXPECT_THROW(build_parallel_geometry(8, 3, std::vector<double>{0.0}), ParameterError);
  EXPECT_THROW(build_parallel_geometry(8, 3, std::vector<double>{180.5}), ParameterError);
  EXPECT_NO_THROW(build_parallel_geometry(8, 3, std::vector<double>{180.0}));
}

TEST(Geometry, AngleRanges) {
  EXPECT_EQ(angle_range(0.75, 0.75, 180).size(), 240u);
  EXPECT_EQ(angle_range(1.5, 1.5, 180).size(), 120u);
  EXPECT_THROW(angle_range(1, 0, 2), ParameterError);
}

TEST(Apply, SingleRowAndZeroVector) {
  const SystemMatrix a = from_dense({{1.0, 0.0, 0.0}});
  EXPECT_EQ(srs::apply(a, std::vector<double>{1.0, 0.0, 0.0}), std::vector<double>{1.0});
  EXPECT_EQ(srs::apply(a, std::vector<double>(3, 0.0)), std::vector<double>(1, 0.0));
  EXPECT_EQ(srs::apply(a, std::vector<double>(1, 0.0), true), std::vector<double>(3, 0.0));
  EXPECT_THROW(srs::apply(a, std::vector<double>(2, 0.0)), ParameterError);
  EXPECT_THROW(srs::apply(a, std::vector<double>(3, 0.0), true), ParameterError);
}

TEST(Apply, MatchesDenseOracle) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::bernoulli_distribution keep(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::Dense d(5, std::vector<double>(7, 0.0));
    for (auto& row : d)
      for (auto& v : row) v = keep(rng) ? u(rng) : 0.0;
    const SystemMatrix a = from_dense(d);
    std::vector<double> v(7), w(5);
    for (auto& x : v) x = u(rng) - 1.0;
    for (auto& x : w) x = u(rng) - 1.0;
    const auto av = srs::apply(a, v);
    const auto expect = oracle::matvec(d, v);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_LT(std::abs(av[i] - expect[i]), 1e-12);
    oracle::Dense dt(7, std::vector<double>(5));
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 7; ++j) dt[j][i] = d[i][j];
    const auto atw = srs::apply(a, w, true);
    const auto expect_t = oracle::matvec(dt, w);
    for (std::size_t j = 0; j < 7; ++j) EXPECT_LT(std::abs(atw[j] - expect_t[j]), 1e-12);
  }
}

TEST(Apply, AdjointConsistencyAndReferenceAgreement) {
  const auto angles = angle_range(6, 6, 180);
  const SystemMatrix a = build_parallel_geometry(64, 91, angles);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> u(a.cols()), v(a.rows());
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    const auto au = srs::apply(a, u);
    const auto atv = srs::apply(a, v, true);
    const double lhs = dot(au, v);
    const double rhs = dot(u, atv);
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(std::abs(lhs), 1.0));
    EXPECT_EQ(au, reference::apply(a, u));
    EXPECT_EQ(atv, reference::apply(a, v, true));
  }
}

TEST(Noise, ZeroLevelIsIdentity) {
  const std::vector<double> b{1.0, -2.0, 3.5};
  EXPECT_EQ(add_noise(b, 0.0, 9).values, b);
}

TEST(Noise, RelativeNormIsExact) {
  std::vector<double> b(2731);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::sin(0.01 * i) + 2.0;
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const Sinogram s = add_noise(b, 0.05, seed);
    std::vector<double> e(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) e[i] = s.values[i] - b[i];
    EXPECT_NEAR(norm2(e) / norm2(b), 0.05, 1e-12);
    EXPECT_EQ(s.values, add_noise(b, 0.05, seed).values);
  }
  EXPECT_NE(add_noise(b, 0.05, 1).values, add_noise(b, 0.05, 2).values);
  EXPECT_THROW(add_noise(b, -0.1, 1), ParameterError);
}

TEST(Noise, DrawLooksStandardNormal) {
  std::vector<double> b(20000, 1.0);
  const Sinogram s = add_noise(b, 1.0, 3);
  double mean = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) mean += s.values[i] - 1.0;
  mean /= b.size();
  // ||e|| = ||b|| = sqrt(N) so per-entry variance is 1.
  EXPECT_LT(std::abs(mean), 0.05);
}

TEST(Triplets, ExportListsEveryNonzero) {
  const SystemMatrix a = build_parallel_geometry(8, 5, std::vector<double>{45.0, 90.0});
  const auto path = std::filesystem::temp_directory_path() / "srs_triplets_test.txt";
  write_triplets(a, path);
  std::ifstream is(path);
  std::size_t r = 0, c = 0, count = 0;
  double v = 0.0, total = 0.0;
  while (is >> r >> c >> v) {
    EXPECT_LT(r, a.rows());
    EXPECT_LT(c, a.cols());
    total += v;
    ++count;
  }
  EXPECT_EQ(count, a.nonzeros());
  double expect = 0.0;
  for (double x : a.values()) expect += x;
  EXPECT_NEAR(total, expect, 1e-9);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace srs
