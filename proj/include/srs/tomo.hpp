#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "srs/types.hpp"

namespace srs {

/// Sparse M x N parallel-beam projector in CSR form. Values are
/// ray/pixel intersection lengths in pixel units. A CSR copy of the
/// transpose is kept so that A^T v is a deterministic row-parallel gather.
class SystemMatrix {
 public:
  SystemMatrix() = default;
  SystemMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::int32_t> col_indices, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::int32_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const std::size_t> t_row_offsets() const { return t_row_offsets_; }
  std::span<const std::int32_t> t_col_indices() const { return t_col_indices_; }
  std::span<const double> t_values() const { return t_values_; }

  double row_sum(std::size_t r) const;

  // Geometry metadata; zero / empty for matrices not built from a scan.
  int detector_pixels = 0;
  std::vector<double> angles_deg;

 private:
  void build_transpose();

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::int32_t> col_indices_;
  std::vector<double> values_;
  std::vector<std::size_t> t_row_offsets_{0};
  std::vector<std::int32_t> t_col_indices_;
  std::vector<double> t_values_;
};

struct Sinogram {
  std::vector<double> values;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

/// A single parallel ray: all points origin + t * direction.
struct Ray {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double dir_x = 0.0;
  double dir_y = 0.0;
};

/// Ray for detector element `d` at angle `angle_deg`, in image coordinates
/// where the grid spans [0, n] x [0, n]. Detector spacing is n*sqrt(2)/p,
/// centred on the image; direction is (-sin, cos).
Ray parallel_ray(int n, int p, double angle_deg, int d);

/// Appends (pixel, length) pairs for every pixel the ray crosses with
/// positive length. Pixels are half-open [c, c+1) x [r, r+1).
void trace_ray(const Ray& ray, int n, std::vector<std::int32_t>& cols,
               std::vector<double>& lengths);

/// Builds the projector for an n x n grid, p detector pixels and the given
/// angles (degrees, each in (0, 180]). Rows are ordered angle-major.
SystemMatrix build_parallel_geometry(int n, int p, std::span<const double> angles_deg);

/// Angles start, start+step, ..., up to stop inclusive (within 1e-9).
std::vector<double> angle_range(double start, double step, double stop);

/// y = A v (transposed == false) or y = A^T v.
std::vector<double> apply(const SystemMatrix& a, std::span<const double> v,
                          bool transposed = false);
void apply_into(const SystemMatrix& a, std::span<const double> v, std::span<double> out,
                bool transposed = false);

/// Adds Gaussian noise e with ||e||_2 = level * ||clean||_2. The direction of
/// e is a standard normal draw from mt19937_64(seed) via Box-Muller.
Sinogram add_noise(std::span<const double> clean, double level, std::uint64_t seed);

/// Writes "row col value" per nonzero, 0-based, one per line.
void write_triplets(const SystemMatrix& a, const std::filesystem::path& path);

/// Serial reference kernels kept for testing and benchmarking the parallel ones.
namespace reference {
SystemMatrix build_parallel_geometry(int n, int p, std::span<const double> angles_deg);
/// Row-wise gather for A v; scatter over rows of A for A^T v.
std::vector<double> apply(const SystemMatrix& a, std::span<const double> v,
                          bool transposed = false);
}  // namespace reference

}  // namespace srs
