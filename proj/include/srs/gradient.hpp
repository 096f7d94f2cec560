#pragma once

#include <span>
#include <vector>

namespace srs {

// Forward differences on an n x n row-major image with the last row/column
// replicated, so the difference leaving the domain is zero.

void forward_gradient(std::span<const double> u, int n, std::span<double> dh,
                      std::span<double> dv);

/// Adjoint of forward_gradient: out = Dh^T ph + Dv^T pv.
void gradient_adjoint(std::span<const double> ph, std::span<const double> pv, int n,
                      std::span<double> out);

/// Isotropic TV: sum over pixels of sqrt(dh^2 + dv^2).
double total_variation(std::span<const double> u, int n);

/// ||grad u||_2^2.
double gradient_energy(std::span<const double> u, int n);

}  // namespace srs
