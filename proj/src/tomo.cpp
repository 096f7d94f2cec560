#include "srs/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

namespace srs {

SystemMatrix::SystemMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::int32_t> col_indices, std::vector<double> values)
    : rows_(rows), cols_(cols), row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)), values_(std::move(values)) {
  if (row_offsets_.size() != rows_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != values_.size() || col_indices_.size() != values_.size())
    throw ParameterError("SystemMatrix: inconsistent CSR arrays");
  for (std::size_t r = 0; r < rows_; ++r)
    if (row_offsets_[r] > row_offsets_[r + 1])
      throw ParameterError("SystemMatrix: row offsets must be nondecreasing");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (col_indices_[i] < 0 || static_cast<std::size_t>(col_indices_[i]) >= cols_)
      throw ParameterError("SystemMatrix: column index out of range");
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw ParameterError("SystemMatrix: stored values must be positive and finite");
  }
  build_transpose();
}

void SystemMatrix::build_transpose() {
  t_row_offsets_.assign(cols_ + 1, 0);
  for (std::int32_t c : col_indices_) ++t_row_offsets_[static_cast<std::size_t>(c) + 1];
  for (std::size_t c = 0; c < cols_; ++c) t_row_offsets_[c + 1] += t_row_offsets_[c];
  t_col_indices_.resize(values_.size());
  t_values_.resize(values_.size());
  std::vector<std::size_t> cursor(t_row_offsets_.begin(), t_row_offsets_.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) {
      const std::size_t dst = cursor[col_indices_[i]]++;
      t_col_indices_[dst] = static_cast<std::int32_t>(r);
      t_values_[dst] = values_[i];
    }
  }
}

double SystemMatrix::row_sum(std::size_t r) const {
  double s = 0.0;
  for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) s += values_[i];
  return s;
}

namespace {

// sin/cos that are exact at multiples of 90 degrees.
void exact_sincos(double angle_deg, double& s, double& c) {
  const double q = angle_deg / 90.0;
  if (q == std::floor(q)) {
    static constexpr double kSin[] = {0.0, 1.0, 0.0, -1.0};
    static constexpr double kCos[] = {1.0, 0.0, -1.0, 0.0};
    const auto idx = static_cast<int>(((static_cast<long long>(q) % 4) + 4) % 4);
    s = kSin[idx];
    c = kCos[idx];
    return;
  }
  const double rad = angle_deg * std::numbers::pi / 180.0;
  s = std::sin(rad);
  c = std::cos(rad);
}

// Parameters t where the ray crosses the integer lines of one axis strictly
// inside (t_lo, t_hi), in increasing t.
void axis_crossings(double origin, double dir, double t_lo, double t_hi,
                    std::vector<double>& out) {
  out.clear();
  if (dir == 0.0) return;
  const double a = origin + t_lo * dir;
  const double b = origin + t_hi * dir;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const auto k_first = static_cast<long long>(std::ceil(lo));
  const auto k_last = static_cast<long long>(std::floor(hi));
  for (long long k = k_first; k <= k_last; ++k) {
    const double t = (static_cast<double>(k) - origin) / dir;
    if (t > t_lo && t < t_hi) out.push_back(t);
  }
  if (dir < 0.0) std::reverse(out.begin(), out.end());
}

constexpr double kMinSegment = 1e-12;

}  // namespace

Ray parallel_ray(int n, int p, double angle_deg, int d) {
  double s = 0.0;
  double c = 0.0;
  exact_sincos(angle_deg, s, c);
  const double spacing = n * std::numbers::sqrt2 / p;
  const double offset = (d - 0.5 * (p - 1)) * spacing;
  const double centre = 0.5 * n;
  return Ray{centre + offset * c, centre + offset * s, -s, c};
}

void trace_ray(const Ray& ray, int n, std::vector<std::int32_t>& cols,
               std::vector<double>& lengths) {
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  const double extent = static_cast<double>(n);
  auto clip = [&](double origin, double dir) {
    if (dir == 0.0) {
      if (origin < 0.0 || origin > extent) t_hi = t_lo;  // misses the square
      return;
    }
    double a = (0.0 - origin) / dir;
    double b = (extent - origin) / dir;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  };
  clip(ray.origin_x, ray.dir_x);
  clip(ray.origin_y, ray.dir_y);
  if (!(t_hi - t_lo > kMinSegment)) return;

  const double speed = std::hypot(ray.dir_x, ray.dir_y);
  thread_local std::vector<double> xs, ys, ts;
  axis_crossings(ray.origin_x, ray.dir_x, t_lo, t_hi, xs);
  axis_crossings(ray.origin_y, ray.dir_y, t_lo, t_hi, ys);
  ts.resize(xs.size() + ys.size() + 2);
  ts.front() = t_lo;
  std::merge(xs.begin(), xs.end(), ys.begin(), ys.end(), ts.begin() + 1);
  ts.back() = t_hi;

  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double len = (ts[i + 1] - ts[i]) * speed;
    if (len <= kMinSegment) continue;
    const double tm = 0.5 * (ts[i] + ts[i + 1]);
    const auto col = static_cast<long long>(std::floor(ray.origin_x + tm * ray.dir_x));
    const auto row = static_cast<long long>(std::floor(ray.origin_y + tm * ray.dir_y));
    if (col < 0 || col >= n || row < 0 || row >= n) continue;
    const auto pixel = static_cast<std::int32_t>(row * n + col);
    if (!cols.empty() && cols.back() == pixel) {
      lengths.back() += len;
    } else {
      cols.push_back(pixel);
      lengths.push_back(len);
    }
  }
}

namespace {

void check_geometry(int n, int p, std::span<const double> angles_deg) {
  if (n < 2) throw ParameterError("build_parallel_geometry: n must be >= 2");
  if (p < 1) throw ParameterError("build_parallel_geometry: p must be >= 1");
  if (angles_deg.empty()) throw ParameterError("build_parallel_geometry: no angles");
  for (double a : angles_deg)
    if (!(a > 0.0 && a <= 180.0))
      throw ParameterError("build_parallel_geometry: angles must lie in (0, 180]");
  if (static_cast<long long>(n) * n > std::numeric_limits<std::int32_t>::max())
    throw ParameterError("build_parallel_geometry: grid too large");
}

struct RowBuffer {
  std::vector<std::int32_t> cols;
  std::vector<double> vals;
};

SystemMatrix assemble(int n, int p, std::span<const double> angles_deg,
                      std::vector<RowBuffer>& rows) {
  std::vector<std::size_t> offsets(rows.size() + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) offsets[r + 1] = offsets[r] + rows[r].cols.size();
  std::vector<std::int32_t> cols(offsets.back());
  std::vector<double> vals(offsets.back());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].cols.begin(), rows[r].cols.end(), cols.begin() + offsets[r]);
    std::copy(rows[r].vals.begin(), rows[r].vals.end(), vals.begin() + offsets[r]);
    rows[r] = {};
  }
  SystemMatrix a(rows.size(), static_cast<std::size_t>(n) * n, std::move(offsets),
                 std::move(cols), std::move(vals));
  a.detector_pixels = p;
  a.angles_deg.assign(angles_deg.begin(), angles_deg.end());
  return a;
}

}  // namespace

SystemMatrix build_parallel_geometry(int n, int p, std::span<const double> angles_deg) {
  check_geometry(n, p, angles_deg);
  const auto num_rows = static_cast<long long>(p) * static_cast<long long>(angles_deg.size());
  std::vector<RowBuffer> rows(static_cast<std::size_t>(num_rows));
#pragma omp parallel for schedule(dynamic, 64)
  for (long long r = 0; r < num_rows; ++r) {
    const auto angle = angles_deg[static_cast<std::size_t>(r / p)];
    const int d = static_cast<int>(r % p);
    auto& buf = rows[static_cast<std::size_t>(r)];
    trace_ray(parallel_ray(n, p, angle, d), n, buf.cols, buf.vals);
  }
  return assemble(n, p, angles_deg, rows);
}

std::vector<double> angle_range(double start, double step, double stop) {
  if (!(step > 0.0)) throw ParameterError("angle_range: step must be positive");
  std::vector<double> out;
  for (long long i = 0;; ++i) {
    const double a = start + static_cast<double>(i) * step;
    if (a > stop + 1e-9) break;
    out.push_back(a);
  }
  if (out.empty()) throw ParameterError("angle_range: empty range");
  return out;
}

void apply_into(const SystemMatrix& a, std::span<const double> v, std::span<double> out,
                bool transposed) {
  const std::size_t in_len = transposed ? a.rows() : a.cols();
  const std::size_t out_len = transposed ? a.cols() : a.rows();
  if (v.size() != in_len || out.size() != out_len)
    throw ParameterError("apply: dimension mismatch");
  const auto offsets = transposed ? a.t_row_offsets() : a.row_offsets();
  const auto cols = transposed ? a.t_col_indices() : a.col_indices();
  const auto vals = transposed ? a.t_values() : a.values();
  const auto rows = static_cast<long long>(out_len);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t i = offsets[r]; i < offsets[r + 1]; ++i) s += vals[i] * v[cols[i]];
    out[r] = s;
  }
}

std::vector<double> apply(const SystemMatrix& a, std::span<const double> v, bool transposed) {
  std::vector<double> out(transposed ? a.cols() : a.rows());
  apply_into(a, v, out, transposed);
  return out;
}

Sinogram add_noise(std::span<const double> clean, double level, std::uint64_t seed) {
  if (!(level >= 0.0) || !std::isfinite(level))
    throw ParameterError("add_noise: level must be nonnegative");
  Sinogram out{std::vector<double>(clean.begin(), clean.end()), level, seed};
  if (level == 0.0 || clean.empty()) return out;

  std::mt19937_64 gen(seed);
  auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<double> e(clean.size());
  for (std::size_t i = 0; i < e.size(); i += 2) {
    const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    e[i] = radius * std::cos(angle);
    if (i + 1 < e.size()) e[i + 1] = radius * std::sin(angle);
  }
  const double scale = level * norm2(clean) / norm2(e);
  for (std::size_t i = 0; i < e.size(); ++i) out.values[i] += scale * e[i];
  return out;
}

void write_triplets(const SystemMatrix& a, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string());
  os.precision(17);
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t i = offsets[r]; i < offsets[r + 1]; ++i)
      os << r << ' ' << cols[i] << ' ' << vals[i] << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

namespace reference {

SystemMatrix build_parallel_geometry(int n, int p, std::span<const double> angles_deg) {
  check_geometry(n, p, angles_deg);
  std::vector<RowBuffer> rows;
  rows.reserve(static_cast<std::size_t>(p) * angles_deg.size());
  for (double angle : angles_deg) {
    for (int d = 0; d < p; ++d) {
      RowBuffer buf;
      trace_ray(parallel_ray(n, p, angle, d), n, buf.cols, buf.vals);
      rows.push_back(std::move(buf));
    }
  }
  return assemble(n, p, angles_deg, rows);
}

std::vector<double> apply(const SystemMatrix& a, std::span<const double> v, bool transposed) {
  if (v.size() != (transposed ? a.rows() : a.cols()))
    throw ParameterError("apply: dimension mismatch");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  std::vector<double> out(transposed ? a.cols() : a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = offsets[r]; i < offsets[r + 1]; ++i) {
      if (transposed)
        out[cols[i]] += vals[i] * v[r];
      else
        out[r] += vals[i] * v[cols[i]];
    }
  }
  return out;
}

}  // namespace reference

}  // namespace srs
