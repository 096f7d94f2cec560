#include "srs/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace srs {

namespace {

struct Point {
  double u;
  double v;
};

// Normalized coordinates of the centre of pixel (r, c).
Point pixel_centre(int r, int c, int n) { return {(c + 0.5) / n, (r + 0.5) / n}; }

double sq(double v) { return v * v; }

bool in_disk(Point p, Point centre, double radius) {
  return sq(p.u - centre.u) + sq(p.v - centre.v) < sq(radius);
}

bool in_rect(Point p, double u0, double u1, double v0, double v1) {
  return p.u >= u0 && p.u < u1 && p.v >= v0 && p.v < v1;
}

void check_side(int n) {
  if (n < 16) throw ParameterError("phantom: side must be >= 16, got " + std::to_string(n));
}

}  // namespace

Phantom make_piecewise_phantom(int n) {
  check_side(n);
  constexpr int kClasses = 8;
  Phantom ph;
  ph.class_std = 0.1;
  for (int k = 1; k <= kClasses; ++k) ph.class_means.push_back((k - 1) / 7.0);

  ph.labels.classes = kClasses;
  ph.labels.labels.assign(static_cast<std::size_t>(n) * n, 1);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Point p = pixel_centre(r, c, n);
      int label = 1;
      if (sq((p.u - 0.5) / 0.44) + sq((p.v - 0.5) / 0.46) < 1.0) label = 2;
      if (in_rect(p, 0.18, 0.44, 0.20, 0.42)) label = 3;
      if (in_disk(p, {0.65, 0.32}, 0.16)) label = 4;
      if (in_disk(p, {0.65, 0.32}, 0.10)) label = 5;
      if (in_rect(p, 0.22, 0.46, 0.56, 0.80)) label = 6;
      if (in_disk(p, {0.68, 0.68}, 0.15)) label = 7;
      if (in_disk(p, {0.69, 0.67}, 0.09)) label = 8;
      ph.labels.labels[static_cast<std::size_t>(r) * n + c] = label;
    }
  }

  std::vector<std::size_t> counts(kClasses, 0);
  std::vector<double> values(ph.labels.labels.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const int label = ph.labels.labels[j];
    ++counts[label - 1];
    values[j] = ph.class_means[label - 1];
  }
  if (std::count(counts.begin(), counts.end(), 0u) != 0)
    throw ParameterError("piecewise phantom: n=" + std::to_string(n) +
                         " is too small to contain every class");
  ph.image = ImageGrid(n, std::move(values));
  return ph;
}

Phantom make_smooth_phantom(int n) {
  check_side(n);
  Phantom ph;
  ph.class_std = 0.05;
  ph.class_means = {0.16, 0.24, 0.565};

  auto bump = [](Point p, Point centre, double width) {
    return std::exp(-(sq(p.u - centre.u) + sq(p.v - centre.v)) / (2.0 * sq(width)));
  };
  auto saturate = [](double t) { return std::min(1.0, 1.8 * t); };

  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Point p = pixel_centre(r, c, n);
      const double body = saturate(bump(p, {0.48, 0.50}, 0.22));
      const double core = saturate(bump(p, {0.38, 0.40}, 0.085) + bump(p, {0.62, 0.62}, 0.07));
      const double ripple = 0.008 * std::sin(2.0 * std::numbers::pi * 3.0 * p.u) *
                            std::sin(2.0 * std::numbers::pi * 2.0 * p.v);
      values[static_cast<std::size_t>(r) * n + c] = 0.16 + 0.08 * body + 0.325 * core + ripple;
    }
  }

  ph.labels.classes = 3;
  ph.labels.labels.resize(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(values[j] - ph.class_means[k]) < std::abs(values[j] - ph.class_means[best]))
        best = k;
    ph.labels.labels[j] = best + 1;
  }
  ph.image = ImageGrid(n, std::move(values));
  return ph;
}

Phantom make_phantom(PhantomKind kind, int n) {
  return kind == PhantomKind::Piecewise ? make_piecewise_phantom(n) : make_smooth_phantom(n);
}

}  // namespace srs
