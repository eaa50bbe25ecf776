// Per-step cost of the one-step maps and their building blocks on the
// singular-potential benchmark field.

#include <benchmark/benchmark.h>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"
#include "cpd/reference.hpp"

namespace {

const cpd::ExperimentField kField(1.0);

cpd::ParticleState init_state() {
    return {{0.0, 1.0, 0.1}, {0.09, 0.05, 0.2}};
}

void BM_RotExpApply(benchmark::State& state) {
    const cpd::Vec3 b{0.0, 0.0, 1.0};
    cpd::Vec3 v{1.0, 0.2, -0.3};
    for (auto _ : state) {
        v = cpd::rot_exp_apply(b, 0.01, v);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_RotExpApply);

void BM_FieldEvals(benchmark::State& state) {
    const cpd::Vec3 x{0.3, 0.9, 0.1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(kField.potential(x));
        benchmark::DoNotOptimize(kField.electric(x));
        benchmark::DoNotOptimize(kField.magnetic(x));
    }
}
BENCHMARK(BM_FieldEvals);

template <cpd::SchemeId Id>
void BM_Step(benchmark::State& state) {
    cpd::Stepper stepper(Id, kField, init_state(),
                         Id == cpd::SchemeId::S1_SAV ? std::optional<double>(1.0)
                                                     : std::nullopt);
    for (auto _ : state) {
        stepper.advance(1e-2);
        benchmark::DoNotOptimize(stepper.particle());
    }
}
BENCHMARK(BM_Step<cpd::SchemeId::S1_ESAV>)->Name("BM_StepS1Esav");
BENCHMARK(BM_Step<cpd::SchemeId::S2_ESAV>)->Name("BM_StepS2Esav");
BENCHMARK(BM_Step<cpd::SchemeId::S1_MESAV>)->Name("BM_StepS1Mesav");
BENCHMARK(BM_Step<cpd::SchemeId::S1_SAV>)->Name("BM_StepS1Sav");

void BM_ReferenceSolve(benchmark::State& state) {
    cpd::AdaptiveConfig cfg;
    cfg.rtol = cfg.atol = 1e-10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cpd::reference_solve(kField, init_state(), 1.0, cfg));
    }
}
BENCHMARK(BM_ReferenceSolve);

}  // namespace

BENCHMARK_MAIN();
