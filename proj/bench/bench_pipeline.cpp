// Serial reference vs OpenMP kernels on a synthetic corpus and session log.
//
//   bench_pipeline --benchmark_counters_tabular=true
//
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "synthetic.hpp"
#include "topicseg/pipeline.hpp"

using namespace topicseg;

namespace {

struct World {
    KnowledgeBase kb;
    DocumentKeywordIndex index;
    std::vector<Session> sessions;

    World() {
        synth::Rng rng(12345);
        synth::WorldOptions opt;
        opt.documents = 20000;
        opt.descriptors = 400;
        kb = synth::knowledge_base(rng, opt);
        index = resolve_all_documents_serial(kb);
        sessions = synth::sessions(rng, kb.corpus, 5000, 30);
    }
};

const World& world() {
    static const World w;
    return w;
}

void BM_ProcessSessionsSerial(benchmark::State& state) {
    const auto& w = world();
    const Annotator ann(w.kb, w.index);
    for (auto _ : state) benchmark::DoNotOptimize(process_sessions_serial(w.sessions, ann));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.sessions.size()));
}

void BM_ProcessSessionsParallel(benchmark::State& state) {
    const auto& w = world();
    const Annotator ann(w.kb, w.index);
    for (auto _ : state) benchmark::DoNotOptimize(process_sessions(w.sessions, ann));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.sessions.size()));
    state.counters["threads"] = omp_get_max_threads();
}

void BM_ResolveDocumentsSerial(benchmark::State& state) {
    const auto& w = world();
    for (auto _ : state) benchmark::DoNotOptimize(resolve_all_documents_serial(w.kb));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.kb.corpus.size()));
}

void BM_ResolveDocumentsParallel(benchmark::State& state) {
    const auto& w = world();
    for (auto _ : state) benchmark::DoNotOptimize(resolve_all_documents(w.kb));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.kb.corpus.size()));
    state.counters["threads"] = omp_get_max_threads();
}

void BM_BuildStrSerial(benchmark::State& state) {
    const auto& w = world();
    for (auto _ : state) benchmark::DoNotOptimize(build_str_model_serial(w.kb.corpus, w.kb.thesaurus, w.kb.stop_words));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.kb.corpus.size()));
}

void BM_BuildStrParallel(benchmark::State& state) {
    const auto& w = world();
    for (auto _ : state) benchmark::DoNotOptimize(build_str_model(w.kb.corpus, w.kb.thesaurus, w.kb.stop_words));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.kb.corpus.size()));
    state.counters["threads"] = omp_get_max_threads();
}

} // namespace

BENCHMARK(BM_ProcessSessionsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProcessSessionsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ResolveDocumentsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResolveDocumentsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BuildStrSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildStrParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
