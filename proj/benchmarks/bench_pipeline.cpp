#include <benchmark/benchmark.h>

#include <map>

#include "cohort/bm25_index.hpp"
#include "cohort/metrics.hpp"
#include "cohort/summarizer.hpp"
#include "cohort/synth_corpus.hpp"
#include "cohort/text_analysis.hpp"

using namespace cohort;

namespace {

const SyntheticCorpus& corpus(int visits)
{
    static std::map<int, SyntheticCorpus> cache;
    auto it = cache.find(visits);
    if (it == cache.end()) {
        GeneratorConfig config;
        config.seed = 1;
        config.n_visits = visits;
        it = cache.emplace(visits, generate(config)).first;
    }
    return it->second;
}

ConceptLexicon lexicon_of(const SyntheticCorpus& c)
{
    ConceptLexicon lexicon;
    for (std::size_t i = 0; i < c.lexicon.size(); ++i) {
        lexicon.add(c.lexicon[i].name, {"C" + std::to_string(i + 1), c.lexicon[i].name});
    }
    return lexicon;
}

void BM_IndexBuild(benchmark::State& state)
{
    const auto& c = corpus(static_cast<int>(state.range(0)));
    auto threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(InvertedIndex::build(c.reports, {}, threads));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.reports.size()));
}
BENCHMARK(BM_IndexBuild)->Args({300, 1})->Args({3000, 1})->Args({3000, 4});

void BM_Retrieve(benchmark::State& state)
{
    const auto& c = corpus(3000);
    auto index = InvertedIndex::build(c.reports);
    std::vector<std::vector<std::string>> queries;
    for (const auto& t : c.topics) {
        queries.push_back(build_or_query(t));
    }
    auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        for (const auto& q : queries) {
            benchmark::DoNotOptimize(retrieve_top_n(index, {}, q, n));
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(BM_Retrieve)->Arg(100)->Arg(2000);

void BM_Stem(benchmark::State& state)
{
    const std::vector<std::string> words = {"dehydration", "caries",     "hospitalization", "generalizations",
                                            "adenopathy",  "fibrillation", "conditional",    "running"};
    for (auto _ : state) {
        for (const auto& w : words) {
            benchmark::DoNotOptimize(stem(w));
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(words.size()));
}
BENCHMARK(BM_Stem);

void BM_Summarize(benchmark::State& state)
{
    const auto& c = corpus(300);
    auto lexicon = lexicon_of(c);
    auto df = compute_concept_df(c.reports, lexicon);
    SummarizerOptions options;
    options.df_threshold = df.report_count() / 4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(summarize_reports(c.reports, lexicon, df, options, 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.reports.size()));
}
BENCHMARK(BM_Summarize);

void BM_Evaluate(benchmark::State& state)
{
    const auto& c = corpus(3000);
    auto index = InvertedIndex::build(c.reports);
    Run run;
    for (const auto& t : c.topics) {
        auto reports = retrieve_top_n(index, {}, build_or_query(t), 2000, t.topic_id);
        RankedList visits{t.topic_id, RankLevel::Visit, {}, "bench"};
        for (const auto& item : reports.items) {
            visits.items.push_back({item.id, item.score});
        }
        run.push_back(std::move(visits));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_run(run, c.qrels));
    }
}
BENCHMARK(BM_Evaluate);

}  // namespace
BENCHMARK_MAIN();
