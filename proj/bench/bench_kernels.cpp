// Parallel kernels against their serial references on the full 200-mode grid.
#include "pdcs/analytic_oracle.hpp"
#include "pdcs/linearization.hpp"
#include "pdcs/mean_field.hpp"
#include "pdcs/reference.hpp"
#include "pdcs/squeezing.hpp"
#include "pdcs/temporal_noise.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

namespace {

using namespace pdcs;

struct Soliton {
    NormalizedParams p = normalize(PhysicalParams{}, 12.0, 1.05);
    FieldState state = refined_soliton_pair(p);
    PumpedSpectrum A = assemble_pumped_spectrum(state, p);
    Eigen::MatrixXd M = assemble_M(build_GF(A, p));
    LossMatrix loss = LossMatrix::from(p);
};

const Soliton &soliton()
{
    static const Soliton s;
    return s;
}

std::vector<double> omega_grid(int n)
{
    std::vector<double> w;
    for (int i = 1; i <= n; ++i)
        w.push_back(15.0 * i / n);
    return w;
}

void BM_build_GF_fft(benchmark::State &st)
{
    const Soliton &s = soliton();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(build_GF(s.A, s.p));
}

void BM_build_GF_direct(benchmark::State &st)
{
    const Soliton &s = soliton();
    for (auto _ : st)
        benchmark::DoNotOptimize(reference::build_GF_direct(s.A, s.p));
}

void BM_spectrum_parallel(benchmark::State &st)
{
    const Soliton &s = soliton();
    const auto grid = omega_grid(8);
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(squeezing_spectrum(s.M, s.loss, grid));
}

void BM_spectrum_serial(benchmark::State &st)
{
    const Soliton &s = soliton();
    const auto grid = omega_grid(8);
    for (auto _ : st)
        benchmark::DoNotOptimize(reference::squeezing_spectrum_serial(s.M, s.loss, grid));
}

void BM_correlation_parallel(benchmark::State &st)
{
    const Soliton &s = soliton();
    const NeutralProjector np = neutral_projector(s.M, s.loss);
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(integrated_correlation(s.M, s.loss, 20.0, 9, false, nullptr, &np));
}

void BM_correlation_serial(benchmark::State &st)
{
    const Soliton &s = soliton();
    const NeutralProjector np = neutral_projector(s.M, s.loss);
    for (auto _ : st)
        benchmark::DoNotOptimize(reference::integrated_correlation_serial(s.M, s.loss, 20.0, 9, false, &np));
}

} // namespace

BENCHMARK(BM_build_GF_fft)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_GF_direct)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spectrum_parallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_spectrum_serial)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_correlation_parallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_correlation_serial)->Unit(benchmark::kMillisecond)->Iterations(2);

BENCHMARK_MAIN();
