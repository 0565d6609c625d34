#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cohort/corpus.hpp"

namespace cohort {

// Single-topic measures over a visit ranking, following trec_eval conventions.
// Binary measures treat grade >= 1 as relevant; unjudged visits count as not
// relevant everywhere except bpref, which skips them.

/// Relevant among the first k, divided by k even when the run is shorter.
[[nodiscard]] double precision_at_k(const RankedList& run, const JudgmentSet& judgments, std::size_t k);
/// Precision at rank R. std::nullopt when the topic has no relevant visit.
[[nodiscard]] std::optional<double> r_precision(const RankedList& run, const JudgmentSet& judgments);
[[nodiscard]] std::optional<double> average_precision(const RankedList& run, const JudgmentSet& judgments);
[[nodiscard]] std::optional<double> bpref(const RankedList& run, const JudgmentSet& judgments);
/// Gain 2^grade - 1, discount log2(rank + 1), ideal ordering over all judged visits.
[[nodiscard]] std::optional<double> ndcg(const RankedList& run, const JudgmentSet& judgments);
/// 1 / rank of the first relevant visit, 0 when none is retrieved.
[[nodiscard]] double reciprocal_rank(const RankedList& run, const JudgmentSet& judgments);

struct TopicEval {
    std::string topic_id;
    std::map<std::size_t, double> precision;  // k -> P@k
    double r_prec = 0.0;
    double average_precision = 0.0;
    double bpref = 0.0;
    double ndcg = 0.0;
    double reciprocal_rank = 0.0;
    std::size_t retrieved = 0;
    std::size_t relevant = 0;
    std::size_t relevant_retrieved = 0;

    [[nodiscard]] double p(std::size_t k) const;
};

struct EvalReport {
    std::vector<std::size_t> ks;
    std::vector<TopicEval> topics;  // evaluated topics, in topic id order
    TopicEval mean;                 // topic_id "all"
    std::vector<std::string> flagged;  // why a topic was left out of the means
};

/**
 * Evaluates every topic that has at least one relevant judged visit. Topics
 * judged but missing from the run score zero and count in the means; topics
 * without relevant visits, and run topics without judgments, are flagged and
 * excluded. Throws DataError for a topic that appears twice in the run.
 */
[[nodiscard]] EvalReport evaluate_run(std::span<const RankedList> run, const JudgmentSet& judgments,
                                      std::vector<std::size_t> ks = {10, 1000});

/// Aligned text table: topic, map, rprec, bpref, p@k..., ndcg, mrr.
void write_eval_table(const EvalReport& report, std::ostream& out);
/// One JSON object per topic plus a final {"topic": "all", ...} line. Fields:
/// map, rprec, bpref, p<k>, ndcg, mrr.
void write_eval_json(const EvalReport& report, std::ostream& out);

}  // namespace cohort
