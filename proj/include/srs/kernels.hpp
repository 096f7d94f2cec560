#pragma once

#include <optional>
#include <span>
#include <vector>

#include "srs/tomo.hpp"
#include "srs/types.hpp"

namespace srs {

/// delta / (sqrt(2 pi) sigma) * exp(-(x - mu)^2 / (2 sigma^2)), floored at
/// the smallest positive normal double.
double mixture_component(double x, double delta, double mu, double sigma);

/// ln of mixture_component without underflow.
double log_mixture_component(double x, double delta, double mu, double sigma);

struct LogSumResult {
  double value = 0.0;          // -ln sum f
  std::vector<double> weights; // f / sum f, the minimizing simplex point
};

/// Replaces -ln sum_k f_k by its sum-log form; the minimizer of
/// -sum phi_k ln f_k + sum phi_k ln phi_k over the simplex is f / sum f.
/// Throws DomainError if any f_k <= 0.
LogSumResult logsum_transform(std::span<const double> f);

struct XSubproblemResult {
  ImageGrid x;
  int iterations = 0;
  bool converged = false;
};

/// Minimizes
///   lambda_n ||A x - b||^2 + sum_jk phi_jk/(2 sigma_k^2) (x_j - mu_k)^2
///     + lambda_t ||grad x||^2
/// by CGLS on the stacked system
///   [sqrt(lambda_n) A; diag(sqrt(w/2)); sqrt(lambda_t) grad] x
///     ~ [sqrt(lambda_n) b; sqrt(w/2) m; 0]
/// with w_j = sum_k phi_jk / sigma_k^2 and m_j the phi-weighted class mean.
XSubproblemResult solve_x_subproblem(const SystemMatrix& a, std::span<const double> b,
                                     const MeasureField& phi, const ClassPrior& prior,
                                     const SolverConfig& cfg, int n,
                                     const ImageGrid* warm_start = nullptr);

/// Gradient of the x-subproblem objective at x:
/// 2 lambda_n A^T (A x - b) + w (x - m) + 2 lambda_t grad^T grad x.
std::vector<double> x_subproblem_gradient(const SystemMatrix& a, std::span<const double> b,
                                          const MeasureField& phi, const ClassPrior& prior,
                                          const SolverConfig& cfg, int n,
                                          std::span<const double> x);

struct TvProxResult {
  std::vector<double> u;
  int iterations = 0;
};

/// Split and Bregman variables carried between calls with the same weight.
struct TvProxState {
  std::vector<double> dh, dv, bh, bv;
};

/// Split Bregman for min_u weight * TV(u) + 1/2 ||u - v||^2 on an n x n grid
/// with Neumann boundary. The Bregman penalty is sb_penalty_scale / weight;
/// each iteration does cfg.gs_sweeps Gauss-Seidel sweeps for the u-solve.
/// A non-empty state warm starts d and b; an empty one starts from d = grad v,
/// b = 0. The final d and b are written back.
TvProxResult tv_prox_split_bregman(std::span<const double> v, double weight, int n,
                                   const SolverConfig& cfg, TvProxState* state = nullptr);

/// weight * TV(u) + 1/2 ||u - v||^2.
double tv_prox_objective(std::span<const double> u, std::span<const double> v, double weight,
                         int n);

/// Closed-form eta: positive root of
///   -phi/eta + g1 (eta - delta) - l1 + g2 (eta - psi) + l2 = 0.
MeasureField update_eta(const MeasureField& delta, const MeasureField& psi,
                        const Multipliers& mult, const MeasureField& phi, double gamma1,
                        double gamma2);

/// Clamped normalization of g2 * eta + l2 onto the simplex interior.
MeasureField update_psi(const MeasureField& eta, const MeasureField& lambda2, double gamma2,
                        double eps_clamp);

/// Euclidean projection of eta + lambda2 / g2 onto {psi : sum psi = 1,
/// psi >= eps_clamp}. Requires K * eps_clamp < 1.
MeasureField project_psi(const MeasureField& eta, const MeasureField& lambda2, double gamma2,
                         double eps_clamp);

struct PhiUpdate {
  MeasureField phi;
  /// Rows where every component underflowed; those rows are uniform.
  std::size_t fallback_rows = 0;
};

/// phi_jk = f_jk / sum_l f_jl evaluated at the current (x, delta).
PhiUpdate update_phi(std::span<const double> x, const MeasureField& delta,
                     const ClassPrior& prior);

namespace reference {
MeasureField update_eta(const MeasureField& delta, const MeasureField& psi,
                        const Multipliers& mult, const MeasureField& phi, double gamma1,
                        double gamma2);
MeasureField update_psi(const MeasureField& eta, const MeasureField& lambda2, double gamma2,
                        double eps_clamp);
PhiUpdate update_phi(std::span<const double> x, const MeasureField& delta,
                     const ClassPrior& prior);
}  // namespace reference

}  // namespace srs
