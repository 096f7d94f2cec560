#include "srs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "srs/gradient.hpp"
#include "srs/metrics.hpp"

namespace srs {

void SrsProblem::validate() const {
  if (a == nullptr) throw ParameterError("SrsProblem: missing system matrix");
  if (n < 2 || static_cast<std::size_t>(n) * n != a->cols())
    throw ParameterError("SrsProblem: grid side does not match matrix columns");
  if (b.size() != a->rows()) throw ParameterError("SrsProblem: sinogram length mismatch");
  if (prior.classes() < 1) throw ParameterError("SrsProblem: empty prior");
}

DeltaSolveResult solve_delta_subproblem(const MeasureField& phi, const MeasureField& delta_init,
                                        const SolverConfig& cfg, int n) {
  if (phi.pixels() != delta_init.pixels() || phi.classes() != delta_init.classes())
    throw ParameterError("solve_delta_subproblem: shape mismatch");
  if (static_cast<std::size_t>(n) * n != phi.pixels())
    throw ParameterError("solve_delta_subproblem: grid side mismatch");
  const int k_count = phi.classes();
  const std::size_t pixels = phi.pixels();

  MeasureField delta = delta_init;
  MeasureField eta = delta_init;
  MeasureField psi = delta_init;
  Multipliers mult(pixels, k_count);
  DeltaSolveResult res;

  const double tv_weight = cfg.lambda_c / cfg.gamma1;
  std::vector<TvProxState> prox_state(static_cast<std::size_t>(k_count));
  std::vector<double> prev;
  for (int it = 0; it < cfg.admm_max; ++it) {
    prev = delta.data();

    int bregman_iters = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : bregman_iters)
    for (int k = 0; k < k_count; ++k) {
      std::vector<double> col(pixels);
      for (std::size_t j = 0; j < pixels; ++j)
        col[j] = eta(j, k) - mult.lambda1(j, k) / cfg.gamma1;
      if (tv_weight > 0.0) {
        TvProxResult prox = tv_prox_split_bregman(col, tv_weight, n, cfg, &prox_state[k]);
        bregman_iters += prox.iterations;
        col = std::move(prox.u);
      }
      delta.set_column(k, col);
    }
    res.stats.bregman_iterations += bregman_iters;

    eta = update_eta(delta, psi, mult, phi, cfg.gamma1, cfg.gamma2);
    psi = cfg.psi_step == PsiStep::Project
              ? project_psi(eta, mult.lambda2, cfg.gamma2, cfg.eps_clamp)
              : update_psi(eta, mult.lambda2, cfg.gamma2, cfg.eps_clamp);

    auto& l1 = mult.lambda1.data();
    auto& l2 = mult.lambda2.data();
    const auto& d = delta.data();
    const auto& e = eta.data();
    const auto& s = psi.data();
    for (std::size_t i = 0; i < l1.size(); ++i) {
      l1[i] += cfg.gamma1 * (d[i] - e[i]);
      l2[i] += cfg.gamma2 * (e[i] - s[i]);
    }

    res.stats.admm_iterations = it + 1;
    const double change = relative_change(d, prev);
    if (!std::isfinite(change) && norm2(d) != 0.0)
      throw NumericalError("solve_delta_subproblem: non-finite iterate at ADMM iteration " +
                           std::to_string(it + 1));
    if (it > 0 && change < cfg.admm_tol) break;
  }
  res.delta = std::move(psi);
  return res;
}

double delta_objective(const MeasureField& delta, const MeasureField& phi, double lambda_c,
                       int n) {
  double value = 0.0;
  if (lambda_c != 0.0)
    for (int k = 0; k < delta.classes(); ++k)
      value += lambda_c * total_variation(delta.column(k), n);
  const auto& d = delta.data();
  const auto& p = phi.data();
  for (std::size_t i = 0; i < d.size(); ++i) value -= p[i] * std::log(d[i]);
  return value;
}

namespace {

double data_term(const SystemMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r = srs::apply(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return dot(r, r);
}

double tv_term(const MeasureField& delta, double lambda_c, int n) {
  if (lambda_c == 0.0) return 0.0;
  double tv = 0.0;
  for (int k = 0; k < delta.classes(); ++k) tv += total_variation(delta.column(k), n);
  return lambda_c * tv;
}

void check_energy_inputs(std::span<const double> x, const MeasureField& delta,
                         const ClassPrior& prior, const SystemMatrix& a,
                         std::span<const double> b, int n) {
  if (x.size() != a.cols() || delta.pixels() != a.cols() || b.size() != a.rows() ||
      static_cast<std::size_t>(n) * n != a.cols() || delta.classes() != prior.classes())
    throw ParameterError("energy: dimension mismatch");
}

}  // namespace

double energy_e0(std::span<const double> x, const MeasureField& delta, const ClassPrior& prior,
                 const SystemMatrix& a, std::span<const double> b, double lambda_n,
                 double lambda_c, int n) {
  check_energy_inputs(x, delta, prior, a, b, n);
  double e = lambda_n * data_term(a, x, b) + tv_term(delta, lambda_c, n);
  const int k_count = delta.classes();
  std::vector<double> logs(k_count);
  for (std::size_t j = 0; j < delta.pixels(); ++j) {
    for (int k = 0; k < k_count; ++k)
      logs[k] = log_mixture_component(x[j], delta(j, k), prior.means[k], prior.std_devs[k]);
    const double top = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - top);
    e -= top + std::log(sum);
  }
  return e;
}

double energy_f(std::span<const double> x, const MeasureField& delta, const MeasureField& phi,
                const ClassPrior& prior, const SystemMatrix& a, std::span<const double> b,
                const SolverConfig& cfg, int n) {
  check_energy_inputs(x, delta, prior, a, b, n);
  if (phi.pixels() != delta.pixels() || phi.classes() != delta.classes())
    throw ParameterError("energy_f: phi shape mismatch");
  double e = cfg.lambda_n * data_term(a, x, b) + tv_term(delta, cfg.lambda_c, n);
  if (cfg.lambda_t != 0.0) e += cfg.lambda_t * gradient_energy(x, n);
  for (std::size_t j = 0; j < delta.pixels(); ++j) {
    for (int k = 0; k < delta.classes(); ++k) {
      const double p = phi(j, k);
      if (p == 0.0) continue;
      e += p * (std::log(p) -
                log_mixture_component(x[j], delta(j, k), prior.means[k], prior.std_devs[k]));
    }
  }
  return e;
}

SrsResult run_srs(const SrsProblem& prob, const SolverConfig& cfg_in, Variant variant) {
  prob.validate();
  SolverConfig cfg = cfg_in;
  if (variant == Variant::Model9) cfg.lambda_t = 0.0;
  cfg.validate();

  const auto start = std::chrono::steady_clock::now();
  const SystemMatrix& a = *prob.a;
  const int n = prob.n;
  const int k_count = prob.prior.classes();
  const std::size_t pixels = a.cols();

  SrsResult res;
  res.x = ImageGrid(n, 0.0);
  res.delta = MeasureField::uniform(pixels, k_count);
  res.phi = MeasureField::uniform(pixels, k_count);

  for (int it = 1; it <= cfg.outer_max; ++it) {
    XSubproblemResult xs = solve_x_subproblem(a, prob.b, res.phi, prob.prior, cfg, n,
                                               cfg.cgls_warm_start ? &res.x : nullptr);
    res.total_cgls_iterations += xs.iterations;
    const double change = relative_change(xs.x.values, res.x.values);
    res.x = std::move(xs.x);

    DeltaSolveResult ds = solve_delta_subproblem(res.phi, res.delta, cfg, n);
    res.total_admm_iterations += ds.stats.admm_iterations;
    res.delta = std::move(ds.delta);

    PhiUpdate pu = update_phi(res.x.values, res.delta, prob.prior);
    res.phi_fallback_rows += pu.fallback_rows;
    res.phi = std::move(pu.phi);

    EnergyRecord rec;
    rec.iteration = it;
    rec.e0 = energy_e0(res.x.values, res.delta, prob.prior, a, prob.b, cfg.lambda_n,
                       cfg.lambda_c, n);
    rec.f = energy_f(res.x.values, res.delta, res.phi, prob.prior, a, prob.b, cfg, n);
    rec.rel_change_x = change;
    res.trace.push_back(rec);
    res.iterations = it;
    if (!std::isfinite(rec.e0) || !std::isfinite(rec.f))
      throw DivergenceError("run_srs: non-finite energy at outer iteration " + std::to_string(it),
                            res.trace);
    if (change < cfg.outer_tol) {
      res.converged = true;
      break;
    }
  }

  res.labels = labels_from(res.delta);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

Variant parse_variant(const std::string& text) {
  if (text == "model-9") return Variant::Model9;
  if (text == "model-16") return Variant::Model16;
  throw ParameterError("unknown variant '" + text + "' (expected model-9 or model-16)");
}

std::string to_string(Variant v) { return v == Variant::Model9 ? "model-9" : "model-16"; }

}  // namespace srs
