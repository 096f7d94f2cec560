// Serial versions of the per-pixel kernels. The OpenMP kernels must agree
// with these bit for bit.

#include <algorithm>
#include <cmath>
#include <limits>

#include "srs/kernels.hpp"

namespace srs::reference {

MeasureField update_eta(const MeasureField& delta, const MeasureField& psi,
                        const Multipliers& mult, const MeasureField& phi, double gamma1,
                        double gamma2) {
  MeasureField eta(delta.pixels(), delta.classes(), 0.0, FieldMode::PositiveUnconstrained);
  const double g = gamma1 + gamma2;
  for (std::size_t j = 0; j < delta.pixels(); ++j) {
    for (int k = 0; k < delta.classes(); ++k) {
      const double c = gamma1 * delta(j, k) + mult.lambda1(j, k) + gamma2 * psi(j, k) -
                       mult.lambda2(j, k);
      const double root = std::sqrt(c * c + 4.0 * phi(j, k) * g);
      const double e = c >= 0.0 ? (c + root) / (2.0 * g) : 2.0 * phi(j, k) / (root - c);
      eta(j, k) = std::max(e, std::numeric_limits<double>::min());
    }
  }
  return eta;
}

MeasureField update_psi(const MeasureField& eta, const MeasureField& lambda2, double gamma2,
                        double eps_clamp) {
  MeasureField psi(eta.pixels(), eta.classes(), 0.0);
  for (std::size_t j = 0; j < eta.pixels(); ++j) {
    double sum = 0.0;
    for (int k = 0; k < eta.classes(); ++k) {
      psi(j, k) = std::max(gamma2 * eta(j, k) + lambda2(j, k), eps_clamp);
      sum += psi(j, k);
    }
    for (int k = 0; k < eta.classes(); ++k) psi(j, k) /= sum;
  }
  return psi;
}

PhiUpdate update_phi(std::span<const double> x, const MeasureField& delta,
                     const ClassPrior& prior) {
  PhiUpdate res{MeasureField(delta.pixels(), delta.classes(), 0.0), 0};
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t j = 0; j < delta.pixels(); ++j) {
    std::vector<double> f(delta.classes());
    for (int k = 0; k < delta.classes(); ++k)
      f[k] = mixture_component(x[j], delta(j, k), prior.means[k], prior.std_devs[k]);
    if (std::all_of(f.begin(), f.end(), [tiny](double v) { return v == tiny; })) {
      ++res.fallback_rows;
      for (int k = 0; k < delta.classes(); ++k) res.phi(j, k) = 1.0 / delta.classes();
      continue;
    }
    const LogSumResult ls = logsum_transform(f);
    for (int k = 0; k < delta.classes(); ++k) res.phi(j, k) = ls.weights[k];
  }
  return res;
}

}  // namespace srs::reference
