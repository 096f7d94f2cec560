#pragma once

#include <vector>

#include "srs/types.hpp"

namespace srs {

enum class PhantomKind { Piecewise, Smooth };

struct Phantom {
  ImageGrid image;
  LabelMap labels;
  std::vector<double> class_means;
  /// Prior standard deviation used with this phantom in the experiments.
  double class_std = 0.0;

  ClassPrior prior() const {
    return ClassPrior(class_means, std::vector<double>(class_means.size(), class_std));
  }
};

/// 8-class piecewise constant phantom with values (k-1)/7 built from disks,
/// rectangles and an annulus. Background is class 1. Requires n >= 16.
Phantom make_piecewise_phantom(int n);

/// 3-class smooth phantom: Gaussian bumps rising from 0.16 to plateaus near
/// 0.24 and 0.565, with a low ripple. Labels are the nearest class mean.
Phantom make_smooth_phantom(int n);

Phantom make_phantom(PhantomKind kind, int n);

}  // namespace srs
