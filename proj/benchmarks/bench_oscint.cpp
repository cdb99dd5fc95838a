#include <benchmark/benchmark.h>

#include "oscint/cotlar.hpp"
#include "oscint/lab.hpp"
#include "oscint/opnorm.hpp"
#include "oscint/sublevel.hpp"

namespace {

using namespace oscint;

void BM_KernelApply(benchmark::State& state) {
    OperatorSpec spec{PhaseModel::fold2(), static_cast<double>(state.range(0)),
                      Localization::full(), false};
    const DiscretizedOperator op = discretize(spec, 8.0);
    std::vector<std::complex<double>> u(static_cast<std::size_t>(op.cols()), {1.0, 0.0});
    std::vector<std::complex<double>> v(static_cast<std::size_t>(op.rows()));
    for (auto _ : state) {
        op.apply(u, v);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(op.rows()) * op.cols());
}
BENCHMARK(BM_KernelApply)->Arg(64)->Arg(256)->Arg(1024);

void BM_PowerIterationNorm(benchmark::State& state) {
    OperatorSpec spec{PhaseModel::fold2(), static_cast<double>(state.range(0)),
                      Localization::full(), false};
    const DiscretizedOperator op = discretize(spec, 8.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(l2_norm(op, 1e-4));
    }
}
BENCHMARK(BM_PowerIterationNorm)->Arg(64)->Arg(256);

void BM_SublevelSet(benchmark::State& state) {
    const Poly1 poly({0.1, -0.3, 0.2, 2.4, 0.05, -0.01});
    const Interval I{-1.0, 1.0};
    const double kappa = certify_kappa(poly.fn(), I, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sublevel_set(poly.fn(), I, 1.0 / 64, 3, kappa));
    }
}
BENCHMARK(BM_SublevelSet);

void BM_GramTables(benchmark::State& state) {
    OperatorSpec spec{PhaseModel::fold2(), 32.0, Localization::shell(0.25, +1), false};
    const DiscretizedOperator op = discretize(spec, 8.0);
    SignPattern sigma{Side::right, {}};
    SignPattern varsigma{Side::left, {}};
    const BlockFamily fam = block_decompose(op, sigma, varsigma);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gram_tables(fam.pieces, 1e-6));
    }
}
BENCHMARK(BM_GramTables);

}  // namespace

BENCHMARK_MAIN();
