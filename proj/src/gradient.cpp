#include "srs/gradient.hpp"

#include <cmath>

namespace srs {

void forward_gradient(std::span<const double> u, int n, std::span<double> dh,
                      std::span<double> dv) {
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * n + c;
      dh[j] = c + 1 < n ? u[j + 1] - u[j] : 0.0;
      dv[j] = r + 1 < n ? u[j + n] - u[j] : 0.0;
    }
  }
}

void gradient_adjoint(std::span<const double> ph, std::span<const double> pv, int n,
                      std::span<double> out) {
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * n + c;
      double s = 0.0;
      if (c + 1 < n) s -= ph[j];
      if (c > 0) s += ph[j - 1];
      if (r + 1 < n) s -= pv[j];
      if (r > 0) s += pv[j - n];
      out[j] = s;
    }
  }
}

double total_variation(std::span<const double> u, int n) {
  double tv = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * n + c;
      const double h = c + 1 < n ? u[j + 1] - u[j] : 0.0;
      const double v = r + 1 < n ? u[j + n] - u[j] : 0.0;
      tv += std::sqrt(h * h + v * v);
    }
  }
  return tv;
}

double gradient_energy(std::span<const double> u, int n) {
  double e = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * n + c;
      const double h = c + 1 < n ? u[j + 1] - u[j] : 0.0;
      const double v = r + 1 < n ? u[j + n] - u[j] : 0.0;
      e += h * h + v * v;
    }
  }
  return e;
}

}  // namespace srs
