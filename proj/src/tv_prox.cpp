#include <cmath>

#include "srs/gradient.hpp"
#include "srs/kernels.hpp"

namespace srs {

double tv_prox_objective(std::span<const double> u, std::span<const double> v, double weight,
                         int n) {
  double fid = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) fid += (u[j] - v[j]) * (u[j] - v[j]);
  return weight * total_variation(u, n) + 0.5 * fid;
}

TvProxResult tv_prox_split_bregman(std::span<const double> v, double weight, int n,
                                   const SolverConfig& cfg, TvProxState* state) {
  const std::size_t size = static_cast<std::size_t>(n) * n;
  if (v.size() != size) throw ParameterError("tv_prox: input is not n x n");
  if (!(weight > 0.0)) throw ParameterError("tv_prox: weight must be positive");

  TvProxResult res;
  res.u.assign(v.begin(), v.end());
  if (total_variation(v, n) == 0.0) return res;

  // Fidelity and Bregman penalty, both relative to 1/weight.
  const double mu = 1.0 / weight;
  const double lam = cfg.sb_penalty_scale * mu;
  const double shrink = 1.0 / lam;
  const double inv_inner = 1.0 / (mu + 4.0 * lam);

  std::vector<double>& u = res.u;
  TvProxState local;
  TvProxState& st = state ? *state : local;
  const bool warm = st.dh.size() == size;
  if (!warm) {
    // d starts at grad v so the first u-solve reproduces v.
    st.dh.assign(size, 0.0);
    st.dv.assign(size, 0.0);
    st.bh.assign(size, 0.0);
    st.bv.assign(size, 0.0);
    forward_gradient(v, n, st.dh, st.dv);
  }
  std::vector<double>& dh = st.dh;
  std::vector<double>& dv = st.dv;
  std::vector<double>& bh = st.bh;
  std::vector<double>& bv = st.bv;
  std::vector<double> gh(size), gv(size), rhs(size), prev(size);

  for (int it = 0; it < cfg.bregman_max; ++it) {
    prev = u;
    for (std::size_t j = 0; j < size; ++j) {
      gh[j] = dh[j] - bh[j];
      gv[j] = dv[j] - bv[j];
    }
    gradient_adjoint(gh, gv, n, rhs);
    for (std::size_t j = 0; j < size; ++j) rhs[j] = mu * v[j] + lam * rhs[j];

    for (int sweep = 0; sweep < cfg.gs_sweeps; ++sweep) {
      for (int r = 0; r < n; ++r) {
        const bool inner_row = r > 0 && r + 1 < n;
        for (int c = 0; c < n; ++c) {
          const std::size_t j = static_cast<std::size_t>(r) * n + c;
          if (inner_row && c > 0 && c + 1 < n) {
            u[j] = (rhs[j] + lam * (u[j - 1] + u[j + 1] + u[j - n] + u[j + n])) * inv_inner;
            continue;
          }
          double nbr = 0.0;
          int deg = 0;
          if (c > 0) nbr += u[j - 1], ++deg;
          if (c + 1 < n) nbr += u[j + 1], ++deg;
          if (r > 0) nbr += u[j - n], ++deg;
          if (r + 1 < n) nbr += u[j + n], ++deg;
          u[j] = (rhs[j] + lam * nbr) / (mu + lam * deg);
        }
      }
    }

    forward_gradient(u, n, gh, gv);
    for (std::size_t j = 0; j < size; ++j) {
      const double sh = gh[j] + bh[j];
      const double sv = gv[j] + bv[j];
      const double mag = std::sqrt(sh * sh + sv * sv);
      const double scale = mag > shrink ? (mag - shrink) / mag : 0.0;
      dh[j] = scale * sh;
      dv[j] = scale * sv;
      bh[j] = sh - dh[j];
      bv[j] = sv - dv[j];
    }

    res.iterations = it + 1;
    const double change = relative_change(u, prev);
    if ((warm || it > 0) && (change < cfg.bregman_tol || (std::isinf(change) && norm2(u) == 0.0))) break;
  }
  return res;
}

}  // namespace srs
