#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cohort/corpus.hpp"
#include "cohort/summarizer.hpp"

// Reference implementations written straight from the metric and BM25
// definitions, sharing no code with the library, plus fixed fixtures used by
// both the unit tests and the acceptance runner.
namespace cohort::oracle {

using Grades = std::map<std::string, int>;  // judged visits of one topic

double brute_precision(const std::vector<std::string>& run, const Grades& judged, std::size_t k);
double brute_r_precision(const std::vector<std::string>& run, const Grades& judged);
double brute_average_precision(const std::vector<std::string>& run, const Grades& judged);
double brute_bpref(const std::vector<std::string>& run, const Grades& judged);
double brute_ndcg(const std::vector<std::string>& run, const Grades& judged);
double brute_reciprocal_rank(const std::vector<std::string>& run, const Grades& judged);

struct MetricInstance {
    std::map<std::string, Grades> qrels;                     // topic -> judgments
    std::map<std::string, std::vector<std::string>> runs;   // topic -> ranked visit ids
};

/// Up to 5 topics over up to 50 visits; grades {0,1,2}, some visits unjudged,
/// some topics unretrieved or without relevant visits.
MetricInstance random_metric_instance(std::uint64_t seed);

JudgmentSet to_judgments(const MetricInstance& instance);
Run to_run(const MetricInstance& instance);

/// Runs evaluate_run on the instance and checks every per-topic value and
/// every mean against the functions above. Returns one line per mismatch.
std::vector<std::string> metric_mismatches(const MetricInstance& instance, const std::vector<std::size_t>& ks,
                                           double tolerance);

struct Bm25Doc {
    std::string id;
    std::vector<std::string> terms;  // analysed
};

/// Score of every document by direct counting, sorted by score desc then id,
/// positive scores only, first n.
std::vector<std::pair<std::string, double>> exhaustive_bm25(const std::vector<Bm25Doc>& docs,
                                                            const std::vector<std::string>& query, double k1,
                                                            double b, std::size_t n);

struct Bm25Instance {
    std::vector<Report> reports;
    std::vector<std::string> query;  // raw words, analysed by the caller
};

/// 1 to 40 reports over a 12-word vocabulary, with exact duplicates to force ties.
Bm25Instance random_bm25_instance(std::uint64_t seed);

struct VisitRankingInstance {
    RankedList reports;                         // report ranking, scores non-increasing
    std::map<std::string, std::string> visit_of;  // report -> visit
    std::size_t max_visits = 0;
};

/// Up to 60 ranked reports drawn from up to 25 visits, with score ties.
VisitRankingInstance random_visit_ranking(std::uint64_t seed);

/// Visits by earliest report rank, each with the best score among its
/// reports, cut to max_visits.
std::vector<RankedItem> brute_visit_ranking(const VisitRankingInstance& instance);

// One candidate list of `n` reports, two reports per visit; about
// `positive_share` of the visits are judged relevant, some of the rest 0.
struct LabeledPool {
    Corpus corpus;
    JudgmentSet judgments;
    RankedList candidates;
};

LabeledPool make_pool(const std::string& topic, std::size_t n, double positive_share, std::uint64_t seed);

/// (word, stem) pairs traced by hand through the Porter rules.
const std::vector<std::pair<std::string, std::string>>& stemmer_fixtures();

/// The emergency department excerpt with blood pressure, ears, trismus, ...
const std::string& excerpt_text();
/// Unigram and bigram entries for every concept in the excerpt, plus the
/// trigram "impacted wisdom tooth".
ConceptLexicon excerpt_lexicon();
/// Corpus-wide DF table over 93551 reports where the generic concepts occur
/// in more than 2500 reports.
ConceptDf excerpt_df();
const std::vector<std::string>& excerpt_expected_summary();

}  // namespace cohort::oracle
