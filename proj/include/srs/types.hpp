#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srs/errors.hpp"

namespace srs {

/// Square image of side n stored row-major; pixel (r, c) covers
/// [c, c+1) x [r, r+1) in pixel units.
struct ImageGrid {
  int side = 0;
  std::vector<double> values;

  ImageGrid() = default;
  explicit ImageGrid(int n, double fill = 0.0)
      : side(n), values(static_cast<std::size_t>(n) * n, fill) {}
  ImageGrid(int n, std::vector<double> v) : side(n), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(n) * n)
      throw ParameterError("ImageGrid: value count must equal side^2");
  }

  std::size_t size() const { return values.size(); }
};

/// Per-class Gaussian prior on attenuation values.
struct ClassPrior {
  std::vector<double> means;
  std::vector<double> std_devs;

  ClassPrior() = default;
  ClassPrior(std::vector<double> mu, std::vector<double> sigma);

  int classes() const { return static_cast<int>(means.size()); }
};

enum class FieldMode { SimplexInterior, PositiveUnconstrained };

/// N x K matrix of per-pixel class weights, row-major (pixel-major).
class MeasureField {
 public:
  MeasureField() = default;
  MeasureField(std::size_t pixels, int classes, double fill,
               FieldMode mode = FieldMode::SimplexInterior)
      : pixels_(pixels), classes_(classes), mode_(mode),
        data_(pixels * static_cast<std::size_t>(classes), fill) {}

  /// Every row set to 1/K.
  static MeasureField uniform(std::size_t pixels, int classes) {
    return MeasureField(pixels, classes, 1.0 / classes);
  }

  std::size_t pixels() const { return pixels_; }
  int classes() const { return classes_; }
  FieldMode mode() const { return mode_; }
  void set_mode(FieldMode m) { mode_ = m; }

  double& operator()(std::size_t j, int k) { return data_[j * classes_ + k]; }
  double operator()(std::size_t j, int k) const { return data_[j * classes_ + k]; }

  std::span<double> row(std::size_t j) {
    return {data_.data() + j * classes_, static_cast<std::size_t>(classes_)};
  }
  std::span<const double> row(std::size_t j) const {
    return {data_.data() + j * classes_, static_cast<std::size_t>(classes_)};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// Copies class k into a contiguous length-N vector.
  std::vector<double> column(int k) const;
  void set_column(int k, std::span<const double> values);

  /// True when every entry is in (0, 1] and rows sum to 1 within tol.
  /// The upper bound is closed because 1 - 1e-300 rounds to 1.
  bool is_simplex_interior(double tol = 1e-9) const;
  bool is_positive() const;

 private:
  std::size_t pixels_ = 0;
  int classes_ = 0;
  FieldMode mode_ = FieldMode::SimplexInterior;
  std::vector<double> data_;
};

/// ADMM multipliers for the delta = eta and eta = psi couplings.
struct Multipliers {
  MeasureField lambda1;
  MeasureField lambda2;

  Multipliers() = default;
  Multipliers(std::size_t pixels, int classes)
      : lambda1(pixels, classes, 0.0, FieldMode::PositiveUnconstrained),
        lambda2(pixels, classes, 0.0, FieldMode::PositiveUnconstrained) {}
};

/// Class labels in 1..K.
struct LabelMap {
  std::vector<int> labels;
  int classes = 0;
};

/// psi-step of the inner ADMM: the clamped normalization of the scores, or
/// the exact Euclidean projection onto the clamped simplex.
enum class PsiStep { Normalize, Project };

struct SolverConfig {
  double lambda_n = 1.0;   // data fidelity
  double lambda_c = 1.0;   // TV on the measure field
  double lambda_t = 0.0;   // Tikhonov on x
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double eps_clamp = 1e-4;

  double outer_tol = 1e-4;
  double cgls_tol = 1e-4;
  double admm_tol = 1e-4;
  double bregman_tol = 1e-2;

  int outer_max = 200;
  int cgls_max = 100;
  int admm_max = 50;
  int bregman_max = 200;

  double sb_penalty_scale = 2.0;
  int gs_sweeps = 2;
  PsiStep psi_step = PsiStep::Normalize;
  /// Start each x-subproblem CGLS from the previous x instead of zero.
  bool cgls_warm_start = true;

  /// Throws ParameterError when a field violates its range.
  void validate() const;
};

double norm2(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
/// ||a - b||_2 / ||b||_2, or +inf when b is zero.
double relative_change(std::span<const double> next, std::span<const double> prev);

}  // namespace srs
