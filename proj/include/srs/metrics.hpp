#pragma once

#include <span>

#include "srs/types.hpp"

namespace srs {

/// Row-wise argmax, 1-based, ties to the smallest class.
LabelMap labels_from(const MeasureField& field);

/// ||x - truth|| / ||x||. Throws UndefinedMetricError when x is zero.
double rec_err(std::span<const double> x, std::span<const double> truth);

/// Fraction of mismatched labels.
double seg_err(const LabelMap& labels, const LabelMap& truth);

/// Pixels whose value differs from each of its 4-neighbours by more than
/// threshold. Border pixels only compare against neighbours that exist.
std::size_t count_isolated_points(std::span<const double> x, int n, double threshold);

}  // namespace srs
