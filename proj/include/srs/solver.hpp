#pragma once

#include <span>
#include <string>
#include <vector>

#include "srs/kernels.hpp"
#include "srs/tomo.hpp"
#include "srs/types.hpp"

namespace srs {

struct SrsProblem {
  const SystemMatrix* a = nullptr;
  std::vector<double> b;
  ClassPrior prior;
  int n = 0;

  /// Throws ParameterError on inconsistent dimensions.
  void validate() const;
};

enum class Variant {
  Model9,   // no regularization on x (lambda_t forced to 0)
  Model16,  // Tikhonov gradient penalty on x
};

struct EnergyRecord {
  int iteration = 0;
  double e0 = 0.0;
  double f = 0.0;
  double rel_change_x = 0.0;
};

/// Non-finite energy during run_srs; carries the trace up to the failure.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<EnergyRecord> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<EnergyRecord>& trace() const { return trace_; }

 private:
  std::vector<EnergyRecord> trace_;
};

struct DeltaSolveStats {
  int admm_iterations = 0;
  int bregman_iterations = 0;  // summed over ADMM iterations and columns
};

struct SrsResult {
  ImageGrid x;
  MeasureField delta;
  MeasureField phi;
  LabelMap labels;
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  std::vector<EnergyRecord> trace;
  int total_cgls_iterations = 0;
  int total_admm_iterations = 0;
  std::size_t phi_fallback_rows = 0;
};

struct DeltaSolveResult {
  MeasureField delta;
  DeltaSolveStats stats;
};

/// ADMM for min over the simplex interior of
///   lambda_c sum_k TV(delta_k) - sum_jk phi_jk ln delta_jk,
/// warm started from delta_init with zero multipliers. Returns the last psi
/// iterate, which is always strictly feasible.
DeltaSolveResult solve_delta_subproblem(const MeasureField& phi, const MeasureField& delta_init,
                                        const SolverConfig& cfg, int n);

/// Objective minimized by solve_delta_subproblem.
double delta_objective(const MeasureField& delta, const MeasureField& phi, double lambda_c,
                       int n);

/// lambda_n ||Ax - b||^2 + lambda_c sum_k TV(delta_k) - sum_j ln sum_k f_jk.
double energy_e0(std::span<const double> x, const MeasureField& delta, const ClassPrior& prior,
                 const SystemMatrix& a, std::span<const double> b, double lambda_n,
                 double lambda_c, int n);

/// Sum-log energy with Tikhonov term; lambda_t = 0 gives the energy without it.
double energy_f(std::span<const double> x, const MeasureField& delta, const MeasureField& phi,
                const ClassPrior& prior, const SystemMatrix& a, std::span<const double> b,
                const SolverConfig& cfg, int n);

/// Alternating minimization over (x, delta, phi) starting from x = 0 and
/// uniform delta, phi. Stops on relative change of x below outer_tol or
/// after outer_max iterations. Throws NumericalError on a non-finite energy.
SrsResult run_srs(const SrsProblem& prob, const SolverConfig& cfg, Variant variant);

Variant parse_variant(const std::string& text);
std::string to_string(Variant v);

}  // namespace srs
