// Microbenchmarks for the hot per-frame operations: the inverse transform,
// the two compensation stages, and the detectors they are cascaded with.

#include <benchmark/benchmark.h>

#include "afdmiq/compensate.hpp"
#include "afdmiq/constellation.hpp"
#include "afdmiq/detect.hpp"
#include "afdmiq/iqi.hpp"
#include "afdmiq/params.hpp"
#include "afdmiq/rng.hpp"
#include "afdmiq/transform.hpp"

namespace {

using namespace afdmiq;

CVec random_vec(int n, std::uint64_t seed) {
    Rng rng(seed, 0, 0);
    return rng.complex_normal_vector(n, 1.0);
}

void BM_Idaft(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DaftTransform daft(make_afdm_params(n, 2, 2, 1));
    const CVec x = random_vec(n, 1);
    for (auto _ : state) {
        CVec s = daft.modulate(x);
        benchmark::DoNotOptimize(s.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_Idaft)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_CompensateRx(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const IqImbalance iqi = iqi_from_db(1.5, 3.5);
    const CVec r = random_vec(n, 2);
    for (auto _ : state) {
        CVec out = compensate_rx(r, iqi);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_CompensateRx)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_CompensateTx(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const DaftTransform daft(make_afdm_params(n, 2, 2, 1));
    const IqImbalance iqi = iqi_from_db(1.0, 3.0);
    const CVec x_bar = random_vec(n, 3);
    for (auto _ : state) {
        CVec out = compensate_tx(x_bar, iqi, daft);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_CompensateTx)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_MmseDetect(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(4, 0, 0);
    CMat h(n, n);
    for (int c = 0; c < n; ++c) {
        h.col(c) = rng.complex_normal_vector(n, 1.0 / n);
    }
    h += CMat::Identity(n, n);
    const CVec y = random_vec(n, 5);
    const Constellation q = Constellation::qpsk();
    for (auto _ : state) {
        DetectedFrame det = mmse_detect(y, h, 0.1, q);
        benchmark::DoNotOptimize(det.soft.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_MmseDetect)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_MlDetect(benchmark::State& state) {
    const int n = 8;
    Rng rng(6, 0, 0);
    CMat h(n, n);
    for (int c = 0; c < n; ++c) {
        h.col(c) = rng.complex_normal_vector(n, 1.0 / n);
    }
    h += CMat::Identity(n, n);
    WidelyLinearModel model;
    model.direct = h;
    model.mirror = CMat::Zero(n, n);
    const CVec y = random_vec(n, 7);
    const Constellation q = Constellation::qpsk();
    for (auto _ : state) {
        DetectedFrame det = ml_detect(y, model, q);
        benchmark::DoNotOptimize(det.soft.data());
    }
}
BENCHMARK(BM_MlDetect);

}  // namespace

BENCHMARK_MAIN();
