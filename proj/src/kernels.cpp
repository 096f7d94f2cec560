#include "srs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "srs/gradient.hpp"

namespace srs {

namespace {
constexpr double kTinyPositive = std::numeric_limits<double>::min();
const double kLogSqrtTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);
}  // namespace

double mixture_component(double x, double delta, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  const double f = delta / (std::sqrt(2.0 * std::numbers::pi) * sigma) * std::exp(-0.5 * z * z);
  return f < kTinyPositive ? kTinyPositive : f;
}

double log_mixture_component(double x, double delta, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::log(delta) - kLogSqrtTwoPi - std::log(sigma) - 0.5 * z * z;
}

LogSumResult logsum_transform(std::span<const double> f) {
  if (f.empty()) throw DomainError("logsum_transform: empty input");
  double sum = 0.0;
  for (double v : f) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("logsum_transform: components must be positive and finite");
    sum += v;
  }
  LogSumResult out;
  out.value = -std::log(sum);
  out.weights.resize(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out.weights[k] = f[k] / sum;
  return out;
}

namespace {

void check_measure_dims(const MeasureField& a, const MeasureField& b, const char* what) {
  if (a.pixels() != b.pixels() || a.classes() != b.classes())
    throw ParameterError(std::string(what) + ": measure field shapes differ");
}

// [sqrt(lambda_n) A; diag(s); sqrt(lambda_t) grad] with its adjoint.
class StackedOperator {
 public:
  StackedOperator(const SystemMatrix& a, double lambda_n, std::vector<double> diag,
                  double lambda_t, int n)
      : a_(a), sqrt_n_(std::sqrt(lambda_n)), diag_(std::move(diag)),
        sqrt_t_(std::sqrt(lambda_t)), n_(n) {}

  std::size_t pixels() const { return a_.cols(); }
  std::size_t rays() const { return a_.rows(); }
  bool has_gradient() const { return sqrt_t_ > 0.0; }
  std::size_t range_size() const {
    return rays() + pixels() + (has_gradient() ? 2 * pixels() : 0);
  }

  // out = L x, out laid out as [rays | pixels | dh | dv].
  void forward(std::span<const double> x, std::span<double> out) const {
    const std::size_t m = rays();
    const std::size_t p = pixels();
    apply_into(a_, x, out.subspan(0, m));
    for (std::size_t i = 0; i < m; ++i) out[i] *= sqrt_n_;
    for (std::size_t j = 0; j < p; ++j) out[m + j] = diag_[j] * x[j];
    if (has_gradient()) {
      auto dh = out.subspan(m + p, p);
      auto dv = out.subspan(m + 2 * p, p);
      forward_gradient(x, n_, dh, dv);
      for (std::size_t j = 0; j < p; ++j) {
        dh[j] *= sqrt_t_;
        dv[j] *= sqrt_t_;
      }
    }
  }

  // out = L^T y.
  void adjoint(std::span<const double> y, std::span<double> out) const {
    const std::size_t m = rays();
    const std::size_t p = pixels();
    apply_into(a_, y.subspan(0, m), out, true);
    for (std::size_t j = 0; j < p; ++j) out[j] = sqrt_n_ * out[j] + diag_[j] * y[m + j];
    if (has_gradient()) {
      scratch_.resize(p);
      gradient_adjoint(y.subspan(m + p, p), y.subspan(m + 2 * p, p), n_, scratch_);
      for (std::size_t j = 0; j < p; ++j) out[j] += sqrt_t_ * scratch_[j];
    }
  }

 private:
  const SystemMatrix& a_;
  double sqrt_n_;
  std::vector<double> diag_;
  double sqrt_t_;
  int n_;
  mutable std::vector<double> scratch_;
};

struct QuadraticData {
  std::vector<double> diag;    // sqrt(w_j / 2)
  std::vector<double> target;  // m_j
};

QuadraticData prior_quadratic(const MeasureField& phi, const ClassPrior& prior) {
  const int k_count = phi.classes();
  if (k_count != prior.classes()) throw ParameterError("x-subproblem: class count mismatch");
  QuadraticData q;
  q.diag.resize(phi.pixels());
  q.target.resize(phi.pixels());
  for (std::size_t j = 0; j < phi.pixels(); ++j) {
    double w = 0.0;
    double wm = 0.0;
    for (int k = 0; k < k_count; ++k) {
      const double inv_var = 1.0 / (prior.std_devs[k] * prior.std_devs[k]);
      w += phi(j, k) * inv_var;
      wm += phi(j, k) * prior.means[k] * inv_var;
    }
    if (!(w > 0.0)) throw NumericalError("x-subproblem: zero prior weight");
    q.diag[j] = std::sqrt(0.5 * w);
    q.target[j] = wm / w;
  }
  return q;
}

void check_x_inputs(const SystemMatrix& a, std::span<const double> b, const MeasureField& phi,
                    int n) {
  if (static_cast<std::size_t>(n) * n != a.cols() || phi.pixels() != a.cols())
    throw ParameterError("x-subproblem: grid / matrix / field size mismatch");
  if (b.size() != a.rows()) throw ParameterError("x-subproblem: sinogram length mismatch");
}

std::vector<double> stacked_rhs(const StackedOperator& op, std::span<const double> b,
                                const QuadraticData& q, double lambda_n) {
  std::vector<double> rhs(op.range_size(), 0.0);
  const double sn = std::sqrt(lambda_n);
  for (std::size_t i = 0; i < b.size(); ++i) rhs[i] = sn * b[i];
  for (std::size_t j = 0; j < q.diag.size(); ++j) rhs[b.size() + j] = q.diag[j] * q.target[j];
  return rhs;
}

}  // namespace

XSubproblemResult solve_x_subproblem(const SystemMatrix& a, std::span<const double> b,
                                     const MeasureField& phi, const ClassPrior& prior,
                                     const SolverConfig& cfg, int n,
                                     const ImageGrid* warm_start) {
  check_x_inputs(a, b, phi, n);
  QuadraticData q = prior_quadratic(phi, prior);
  const StackedOperator op(a, cfg.lambda_n, q.diag, cfg.lambda_t, n);
  const std::vector<double> rhs = stacked_rhs(op, b, q, cfg.lambda_n);

  const std::size_t p = op.pixels();
  XSubproblemResult res;
  res.x = warm_start ? *warm_start : ImageGrid(n, 0.0);
  if (res.x.size() != p) throw ParameterError("x-subproblem: warm start size mismatch");
  auto& x = res.x.values;

  std::vector<double> r(op.range_size());
  op.forward(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
  std::vector<double> s(p), dir(p), qv(op.range_size());
  op.adjoint(r, s);
  dir = s;
  double gamma = dot(s, s);

  for (int it = 0; it < cfg.cgls_max && gamma > 0.0; ++it) {
    op.forward(dir, qv);
    const double qq = dot(qv, qv);
    if (!(qq > 0.0)) break;
    const double alpha = gamma / qq;
    double step_sq = 0.0;
    double x_sq = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double step = alpha * dir[j];
      x_sq += x[j] * x[j];
      x[j] += step;
      step_sq += step * step;
    }
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * qv[i];
    op.adjoint(r, s);
    const double gamma_next = dot(s, s);
    if (!std::isfinite(gamma_next)) throw NumericalError("CGLS: non-finite residual");
    res.iterations = it + 1;
    if (x_sq > 0.0 && std::sqrt(step_sq / x_sq) <= cfg.cgls_tol) {
      res.converged = true;
      break;
    }
    const double beta = gamma_next / gamma;
    gamma = gamma_next;
    for (std::size_t j = 0; j < p; ++j) dir[j] = s[j] + beta * dir[j];
  }
  if (gamma == 0.0) res.converged = true;
  return res;
}

std::vector<double> x_subproblem_gradient(const SystemMatrix& a, std::span<const double> b,
                                          const MeasureField& phi, const ClassPrior& prior,
                                          const SolverConfig& cfg, int n,
                                          std::span<const double> x) {
  check_x_inputs(a, b, phi, n);
  QuadraticData q = prior_quadratic(phi, prior);
  const StackedOperator op(a, cfg.lambda_n, q.diag, cfg.lambda_t, n);
  const std::vector<double> rhs = stacked_rhs(op, b, q, cfg.lambda_n);
  std::vector<double> r(op.range_size());
  op.forward(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= rhs[i];
  std::vector<double> g(op.pixels());
  op.adjoint(r, g);
  for (double& v : g) v *= 2.0;
  return g;
}

MeasureField update_eta(const MeasureField& delta, const MeasureField& psi,
                        const Multipliers& mult, const MeasureField& phi, double gamma1,
                        double gamma2) {
  check_measure_dims(delta, psi, "update_eta");
  check_measure_dims(delta, phi, "update_eta");
  check_measure_dims(delta, mult.lambda1, "update_eta");
  check_measure_dims(delta, mult.lambda2, "update_eta");
  MeasureField eta(delta.pixels(), delta.classes(), 0.0, FieldMode::PositiveUnconstrained);
  const double g = gamma1 + gamma2;
  const auto& d = delta.data();
  const auto& ps = psi.data();
  const auto& l1 = mult.lambda1.data();
  const auto& l2 = mult.lambda2.data();
  const auto& ph = phi.data();
  auto& out = eta.data();
  const auto count = static_cast<long long>(out.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    const double c = gamma1 * d[i] + l1[i] + gamma2 * ps[i] - l2[i];
    const double root = std::sqrt(c * c + 4.0 * ph[i] * g);
    // Rationalized form for c < 0 avoids cancellation in c + root.
    double e = c >= 0.0 ? (c + root) / (2.0 * g) : 2.0 * ph[i] / (root - c);
    out[i] = e < kTinyPositive ? kTinyPositive : e;
  }
  return eta;
}

MeasureField update_psi(const MeasureField& eta, const MeasureField& lambda2, double gamma2,
                        double eps_clamp) {
  check_measure_dims(eta, lambda2, "update_psi");
  if (!(eps_clamp > 0.0)) throw ParameterError("update_psi: eps_clamp must be positive");
  MeasureField psi(eta.pixels(), eta.classes(), 0.0);
  const int k_count = eta.classes();
  const auto pixels = static_cast<long long>(eta.pixels());
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < pixels; ++j) {
    auto out = psi.row(j);
    double sum = 0.0;
    for (int k = 0; k < k_count; ++k) {
      const double v = std::max(gamma2 * eta(j, k) + lambda2(j, k), eps_clamp);
      out[k] = v;
      sum += v;
    }
    for (int k = 0; k < k_count; ++k) out[k] /= sum;
  }
  return psi;
}

MeasureField project_psi(const MeasureField& eta, const MeasureField& lambda2, double gamma2,
                         double eps_clamp) {
  check_measure_dims(eta, lambda2, "project_psi");
  const int k_count = eta.classes();
  const double mass = 1.0 - k_count * eps_clamp;
  if (!(eps_clamp > 0.0) || !(mass > 0.0))
    throw ParameterError("project_psi: need 0 < eps_clamp < 1/K");
  MeasureField psi(eta.pixels(), k_count, 0.0);
  const auto pixels = static_cast<long long>(eta.pixels());
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < pixels; ++j) {
    auto out = psi.row(j);
    std::vector<double> sorted(k_count);
    for (int k = 0; k < k_count; ++k)
      sorted[k] = out[k] = eta(j, k) + lambda2(j, k) / gamma2 - eps_clamp;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (int i = 0; i < k_count; ++i) {
      cum += sorted[i];
      const double t = (cum - mass) / (i + 1);
      if (sorted[i] > t) theta = t;
    }
    for (int k = 0; k < k_count; ++k) out[k] = std::max(out[k] - theta, 0.0) + eps_clamp;
  }
  return psi;
}

PhiUpdate update_phi(std::span<const double> x, const MeasureField& delta,
                     const ClassPrior& prior) {
  if (x.size() != delta.pixels()) throw ParameterError("update_phi: size mismatch");
  if (delta.classes() != prior.classes()) throw ParameterError("update_phi: class mismatch");
  PhiUpdate res{MeasureField(delta.pixels(), delta.classes(), 0.0), 0};
  const int k_count = delta.classes();
  const auto pixels = static_cast<long long>(delta.pixels());
  std::size_t fallbacks = 0;
#pragma omp parallel for schedule(static) reduction(+ : fallbacks)
  for (long long j = 0; j < pixels; ++j) {
    auto out = res.phi.row(j);
    double sum = 0.0;
    bool all_floored = true;
    for (int k = 0; k < k_count; ++k) {
      const double f = mixture_component(x[j], delta(j, k), prior.means[k], prior.std_devs[k]);
      all_floored = all_floored && f == kTinyPositive;
      out[k] = f;
      sum += f;
    }
    if (all_floored) {
      ++fallbacks;
      for (int k = 0; k < k_count; ++k) out[k] = 1.0 / k_count;
    } else {
      for (int k = 0; k < k_count; ++k) out[k] /= sum;
    }
  }
  res.fallback_rows = fallbacks;
  return res;
}

}  // namespace srs
