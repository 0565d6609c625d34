#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cohort/corpus.hpp"
#include "cohort/summarizer.hpp"

namespace cohort {

/// Injective wire id for a (topic, report) pair: both parts with '\' and '|'
/// escaped, joined by '|'.
[[nodiscard]] std::string pair_id(std::string_view topic_id, std::string_view report_id);

/// A query/summary pair. Training pairs carry a label, scored pairs a probability.
struct ScoredPair {
    std::string topic_id;
    std::string report_id;
    std::string query_text;
    std::string passage_text;
    std::optional<Relevance> label;
    std::optional<double> probability;

    [[nodiscard]] std::string id() const { return pair_id(topic_id, report_id); }
    friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

/// Report-level labels inherited from the visit-level judgments.
class ReportLabels {
  public:
    ReportLabels(JudgmentSet judgments, const Corpus& corpus) : m_judgments(std::move(judgments)), m_corpus(&corpus)
    {}

    /// Unjudged visits read as NotRelevant. Throws DataError for unknown reports.
    [[nodiscard]] Relevance operator()(std::string_view topic_id, std::string_view report_id) const;

  private:
    JudgmentSet m_judgments;
    const Corpus* m_corpus;
};

/// Copies the judgments; the corpus must outlive the returned labels.
[[nodiscard]] ReportLabels propagate_labels(JudgmentSet binary, const Corpus& corpus);

/// query = topic description verbatim, passage = rendered summary.
[[nodiscard]] ScoredPair build_pair(const Topic& topic, const ReportSummary& summary);

struct SamplingPolicy {
    std::uint32_t negative_ratio = 10;
    std::uint32_t max_pairs_per_topic = 1650;
    std::uint32_t reference_positive_count = 150;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainingSample {
    std::string topic_id;
    std::string report_id;
    Relevance label = Relevance::NotRelevant;
    std::size_t candidate_rank = 0;  // 1-based position in the BM25 candidates

    friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

struct SamplingResult {
    std::vector<TrainingSample> samples;
    std::vector<std::string> warnings;
};

/**
 * Class-balanced training selection from each topic's candidate list.
 * Positives are capped at reference_positive_count keeping the best ranked;
 * negatives are drawn uniformly without replacement, at most negative_ratio
 * per kept positive, and the topic total never exceeds max_pairs_per_topic.
 * Each topic's draw is seeded from (seed, topic_id), so topic order does not
 * matter. Topics without positive candidates contribute a warning only.
 */
[[nodiscard]] SamplingResult sample_training_pairs(std::span<const RankedList> candidates,
                                                   const ReportLabels& labels,
                                                   const SamplingPolicy& policy);

/// Attaches query and passage text to sampled examples. Throws DataError
/// when a topic or summary is missing.
[[nodiscard]] std::vector<ScoredPair> make_training_pairs(
    std::span<const TrainingSample> samples, std::span<const Topic> topics,
    std::span<const ReportSummary> summaries);

/// Newline-delimited JSON {topic_id, report_id, query, passage, label} with label 1 or 0.
void write_training_pairs(std::span<const ScoredPair> pairs, std::ostream& out);
[[nodiscard]] std::vector<ScoredPair> parse_training_pairs(std::istream& in);

struct TopicSplit {
    std::vector<Topic> train;
    std::vector<Topic> test;
};

/// Seeded shuffle, then the first floor(fraction * n) topics train.
[[nodiscard]] TopicSplit split_topics(std::span<const Topic> topics, double fraction, std::uint64_t seed);

/**
 * Orders candidates by probability, descending. Ties fall back to the
 * candidate rank, then report id, so a constant scorer reproduces the input.
 */
[[nodiscard]] RankedList rerank(const RankedList& candidates, std::span<const ScoredPair> scored,
                                std::string run_tag = "rerank");

}  // namespace cohort
