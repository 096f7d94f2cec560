// OpenMP kernels against their serial reference implementations.
#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <random>

#include "srs/kernels.hpp"
#include "srs/phantom.hpp"
#include "srs/tomo.hpp"

namespace {

using namespace srs;

const SystemMatrix& geometry(int n) {
  static std::map<int, SystemMatrix> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const double step = 6.0 * 64.0 / n;
    it = cache.emplace(n, build_parallel_geometry(n, static_cast<int>(std::lround(91.0 * n / 64.0)),
                                                  angle_range(step, step, 180.0)))
             .first;
  }
  return it->second;
}

MeasureField random_field(std::size_t pixels, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  MeasureField f(pixels, k, 0.0);
  for (std::size_t j = 0; j < pixels; ++j) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) s += (f(j, c) = u(rng));
    for (int c = 0; c < k; ++c) f(j, c) /= s;
  }
  return f;
}

void BM_Geometry(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const double step = 6.0 * 64.0 / n;
  for (auto _ : st)
    benchmark::DoNotOptimize(build_parallel_geometry(n, static_cast<int>(std::lround(91.0 * n / 64.0)),
                                                     angle_range(step, step, 180.0)));
}
void BM_GeometrySerial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const double step = 6.0 * 64.0 / n;
  for (auto _ : st)
    benchmark::DoNotOptimize(reference::build_parallel_geometry(
        n, static_cast<int>(std::lround(91.0 * n / 64.0)), angle_range(step, step, 180.0)));
}

template <bool Transposed, bool Serial>
void BM_Apply(benchmark::State& st) {
  const SystemMatrix& a = geometry(static_cast<int>(st.range(0)));
  const std::vector<double> v(Transposed ? a.rows() : a.cols(), 0.5);
  for (auto _ : st) {
    if constexpr (Serial)
      benchmark::DoNotOptimize(reference::apply(a, v, Transposed));
    else
      benchmark::DoNotOptimize(srs::apply(a, v, Transposed));
  }
}

template <bool Serial>
void BM_UpdateEta(benchmark::State& st) {
  const std::size_t pixels = static_cast<std::size_t>(st.range(0)) * st.range(0);
  const MeasureField d = random_field(pixels, 8, 1), psi = random_field(pixels, 8, 2),
                     phi = random_field(pixels, 8, 3);
  const Multipliers m(pixels, 8);
  for (auto _ : st) {
    if constexpr (Serial)
      benchmark::DoNotOptimize(reference::update_eta(d, psi, m, phi, 1.0, 2.0));
    else
      benchmark::DoNotOptimize(update_eta(d, psi, m, phi, 1.0, 2.0));
  }
}

template <bool Serial>
void BM_UpdatePsi(benchmark::State& st) {
  const std::size_t pixels = static_cast<std::size_t>(st.range(0)) * st.range(0);
  const MeasureField eta = random_field(pixels, 8, 4);
  const MeasureField l2(pixels, 8, 0.0);
  for (auto _ : st) {
    if constexpr (Serial)
      benchmark::DoNotOptimize(reference::update_psi(eta, l2, 2.0, 1e-4));
    else
      benchmark::DoNotOptimize(update_psi(eta, l2, 2.0, 1e-4));
  }
}

template <bool Serial>
void BM_UpdatePhi(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Phantom ph = make_piecewise_phantom(n);
  const MeasureField delta = random_field(ph.image.size(), 8, 5);
  const ClassPrior prior = ph.prior();
  for (auto _ : st) {
    if constexpr (Serial)
      benchmark::DoNotOptimize(reference::update_phi(ph.image.values, delta, prior));
    else
      benchmark::DoNotOptimize(update_phi(ph.image.values, delta, prior));
  }
}

BENCHMARK(BM_Geometry)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GeometrySerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Apply<false, false>)->Name("BM_Apply")->Arg(64)->Arg(256);
BENCHMARK(BM_Apply<false, true>)->Name("BM_ApplySerial")->Arg(64)->Arg(256);
BENCHMARK(BM_Apply<true, false>)->Name("BM_ApplyTransposed")->Arg(64)->Arg(256);
BENCHMARK(BM_Apply<true, true>)->Name("BM_ApplyTransposedSerial")->Arg(64)->Arg(256);
BENCHMARK(BM_UpdateEta<false>)->Name("BM_UpdateEta")->Arg(64)->Arg(256);
BENCHMARK(BM_UpdateEta<true>)->Name("BM_UpdateEtaSerial")->Arg(64)->Arg(256);
BENCHMARK(BM_UpdatePsi<false>)->Name("BM_UpdatePsi")->Arg(64)->Arg(256);
BENCHMARK(BM_UpdatePsi<true>)->Name("BM_UpdatePsiSerial")->Arg(64)->Arg(256);
BENCHMARK(BM_UpdatePhi<false>)->Name("BM_UpdatePhi")->Arg(64)->Arg(256);
BENCHMARK(BM_UpdatePhi<true>)->Name("BM_UpdatePhiSerial")->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
