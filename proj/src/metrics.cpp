#include "srs/metrics.hpp"

#include <cmath>

namespace srs {

LabelMap labels_from(const MeasureField& field) {
  LabelMap out;
  out.classes = field.classes();
  out.labels.resize(field.pixels());
  for (std::size_t j = 0; j < field.pixels(); ++j) {
    const auto row = field.row(j);
    int best = 0;
    for (int k = 1; k < field.classes(); ++k)
      if (row[k] > row[best]) best = k;
    out.labels[j] = best + 1;
  }
  return out;
}

double rec_err(std::span<const double> x, std::span<const double> truth) {
  if (x.size() != truth.size()) throw ParameterError("rec_err: length mismatch");
  double diff = 0.0;
  double base = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    diff += (x[j] - truth[j]) * (x[j] - truth[j]);
    base += x[j] * x[j];
  }
  if (base == 0.0) throw UndefinedMetricError("rec_err: reconstruction is zero");
  return std::sqrt(diff / base);
}

double seg_err(const LabelMap& labels, const LabelMap& truth) {
  if (labels.labels.size() != truth.labels.size())
    throw ParameterError("seg_err: length mismatch");
  if (labels.labels.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < labels.labels.size(); ++j)
    wrong += labels.labels[j] != truth.labels[j];
  return static_cast<double>(wrong) / static_cast<double>(labels.labels.size());
}

std::size_t count_isolated_points(std::span<const double> x, int n, double threshold) {
  if (x.size() != static_cast<std::size_t>(n) * n)
    throw ParameterError("count_isolated_points: size mismatch");
  std::size_t count = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * n + c;
      bool isolated = true;
      auto check = [&](std::size_t other) {
        if (std::abs(x[j] - x[other]) <= threshold) isolated = false;
      };
      if (c > 0) check(j - 1);
      if (c + 1 < n) check(j + 1);
      if (r > 0) check(j - n);
      if (r + 1 < n) check(j + n);
      count += isolated;
    }
  }
  return count;
}

}  // namespace srs
