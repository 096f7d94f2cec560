#include "srs/types.hpp"

#include <cmath>
#include <limits>

namespace srs {

ClassPrior::ClassPrior(std::vector<double> mu, std::vector<double> sigma)
    : means(std::move(mu)), std_devs(std::move(sigma)) {
  if (means.size() != std_devs.size())
    throw ParameterError("ClassPrior: means and std_devs differ in length");
  if (means.empty()) throw ParameterError("ClassPrior: at least one class required");
  for (double s : std_devs)
    if (!(s > 0.0) || !std::isfinite(s))
      throw ParameterError("ClassPrior: standard deviations must be positive");
  for (double m : means)
    if (!std::isfinite(m)) throw ParameterError("ClassPrior: non-finite mean");
}

std::vector<double> MeasureField::column(int k) const {
  std::vector<double> out(pixels_);
  for (std::size_t j = 0; j < pixels_; ++j) out[j] = (*this)(j, k);
  return out;
}

void MeasureField::set_column(int k, std::span<const double> values) {
  if (values.size() != pixels_) throw ParameterError("MeasureField: column length mismatch");
  for (std::size_t j = 0; j < pixels_; ++j) (*this)(j, k) = values[j];
}

bool MeasureField::is_simplex_interior(double tol) const {
  for (std::size_t j = 0; j < pixels_; ++j) {
    double sum = 0.0;
    for (double v : row(j)) {
      if (!(v > 0.0) || v > 1.0) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return true;
}

bool MeasureField::is_positive() const {
  for (double v : data_)
    if (!(v > 0.0) || !std::isfinite(v)) return false;
  return true;
}

void SolverConfig::validate() const {
  auto nonneg = [](double v) { return v >= 0.0 && std::isfinite(v); };
  auto pos = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!pos(lambda_n)) throw ParameterError("lambda_n must be positive");
  if (!nonneg(lambda_c)) throw ParameterError("lambda_c must be nonnegative");
  if (!nonneg(lambda_t)) throw ParameterError("lambda_t must be nonnegative");
  if (!pos(gamma1) || !pos(gamma2)) throw ParameterError("gamma1, gamma2 must be positive");
  if (!pos(eps_clamp)) throw ParameterError("eps_clamp must be positive");
  if (!pos(outer_tol) || !pos(cgls_tol) || !pos(admm_tol) || !pos(bregman_tol))
    throw ParameterError("tolerances must be positive");
  if (outer_max < 1 || cgls_max < 1 || admm_max < 1 || bregman_max < 1 || gs_sweeps < 1)
    throw ParameterError("iteration caps must be positive");
  if (!pos(sb_penalty_scale)) throw ParameterError("sb_penalty_scale must be positive");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double relative_change(std::span<const double> next, std::span<const double> prev) {
  double diff = 0.0;
  double base = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    const double d = next[i] - prev[i];
    diff += d * d;
    base += prev[i] * prev[i];
  }
  if (base == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(diff / base);
}

}  // namespace srs
