#include <benchmark/benchmark.h>

#include <vector>

#include "framegate/codec.hpp"
#include "framegate/groups.hpp"
#include "framegate/linalg.hpp"
#include "framegate/protocol.hpp"
#include "framegate/quantum.hpp"
#include "framegate/random.hpp"
#include "framegate/umgraph.hpp"

using namespace framegate;

static void BM_HermEig(benchmark::State& state)
{
    Rng rng(1);
    const ComplexMatrix h = hermitian_part(ginibre(static_cast<int>(state.range(0)), rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(herm_eig(h));
    }
}
BENCHMARK(BM_HermEig)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_Tomography(benchmark::State& state)
{
    const int dim = static_cast<int>(state.range(0));
    Rng rng(2);
    const State rho = State::make(random_density(dim, rng));
    const ComplexMatrix v = haar_unitary(dim, rng);
    std::vector<Measurement> data;
    for (const auto& b : hermitian_basis(dim)) {
        const Observable o = Observable::make(hermitian_part(v * b * v.adjoint()));
        data.push_back({o, born(rho, o)});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(tomography(dim, data));
    }
}
BENCHMARK(BM_Tomography)->Arg(2)->Arg(3)->Arg(4);

static void BM_EncodeDecode(benchmark::State& state)
{
    Rng rng(3);
    const State s = State::make(random_density(4, rng));
    const WireMessage msg{1, AnswerMsg{s, SystemDescriptor::make(ComplexMatrix::identity(4), haar_unitary(4, rng), 1)}};
    for (auto _ : state) {
        const std::string bytes = encode(msg);
        benchmark::DoNotOptimize(decode(bytes));
        state.SetBytesProcessed(state.bytes_processed() + static_cast<std::int64_t>(bytes.size()));
    }
}
BENCHMARK(BM_EncodeDecode);

static void BM_AgreeAbstract(benchmark::State& state)
{
    Rng rng(4);
    const Encoding alice = Encoding::make(haar_unitary(2, rng), 1);
    const Encoding bob = Encoding::make(haar_unitary(2, rng), -1);
    const Mode mode = state.range(0) == 0 ? Mode::exact() : Mode::sampled(static_cast<std::uint64_t>(state.range(0)), 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agree_abstract_qubit(alice, bob, mode));
    }
}
BENCHMARK(BM_AgreeAbstract)->Arg(0)->Arg(10000)->Arg(1000000);

static void BM_AgreeTyped(benchmark::State& state)
{
    Rng rng(5);
    const Encoding alice = Encoding::make(ginibre(2, rng), 1);
    const Encoding bob = Encoding::make(ginibre(2, rng), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agree_typed_qubit(alice, bob, Mode::exact()));
    }
}
BENCHMARK(BM_AgreeTyped);

static void BM_InducedRep(benchmark::State& state)
{
    const UMGraph g = standard_graph();
    Rng rng(6);
    const PUAElement w = PUAElement::make(haar_unitary(2, rng), 1);
    const std::vector<std::string> path{"S", "S'"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(induced_rep(g, path, w));
    }
}
BENCHMARK(BM_InducedRep);
BENCHMARK_MAIN();
