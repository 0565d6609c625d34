#include "cohort/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "cohort/detail/random.hpp"
#include "cohort/error.hpp"
#include "json.hpp"

namespace cohort {

namespace {

void append_escaped(std::string& out, std::string_view part)
{
    for (char c : part) {
        if (c == '\\' || c == '|') {
            out += '\\';
        }
        out += c;
    }
}

}  // namespace

std::string pair_id(std::string_view topic_id, std::string_view report_id)
{
    std::string id;
    id.reserve(topic_id.size() + report_id.size() + 1);
    append_escaped(id, topic_id);
    id += '|';
    append_escaped(id, report_id);
    return id;
}

Relevance ReportLabels::operator()(std::string_view topic_id, std::string_view report_id) const
{
    const auto* report = m_corpus->find_report(report_id);
    if (report == nullptr) {
        throw DataError("unknown report \"" + std::string(report_id) + "\"");
    }
    return m_judgments.relevance(topic_id, report->visit_id);
}

ReportLabels propagate_labels(JudgmentSet binary, const Corpus& corpus)
{
    return ReportLabels(std::move(binary), corpus);
}

ScoredPair build_pair(const Topic& topic, const ReportSummary& summary)
{
    return ScoredPair{topic.topic_id, summary.report_id, topic.description, summary.rendered(),
                      std::nullopt, std::nullopt};
}

void SamplingPolicy::validate() const
{
    if (negative_ratio < 1) {
        throw ConfigError("negative_ratio must be >= 1");
    }
    if (max_pairs_per_topic < 1) {
        throw ConfigError("max_pairs_per_topic must be >= 1");
    }
    if (reference_positive_count < 1) {
        throw ConfigError("reference_positive_count must be >= 1");
    }
}

SamplingResult sample_training_pairs(std::span<const RankedList> candidates, const ReportLabels& labels,
                                     const SamplingPolicy& policy)
{
    policy.validate();
    SamplingResult result;
    for (const auto& list : candidates) {
        std::vector<TrainingSample> positives;
        std::vector<TrainingSample> negatives;
        for (std::size_t i = 0; i < list.items.size(); ++i) {
            const auto& id = list.items[i].id;
            auto label = labels(list.topic_id, id);
            auto& bucket = label == Relevance::Relevant ? positives : negatives;
            bucket.push_back(TrainingSample{list.topic_id, id, label, i + 1});
        }
        if (positives.empty()) {
            result.warnings.push_back("topic " + list.topic_id +
                                      " has no positive candidates; no training pairs produced");
            continue;
        }
        std::size_t keep_pos = std::min<std::size_t>(
            {positives.size(), policy.reference_positive_count, policy.max_pairs_per_topic});
        positives.resize(keep_pos);
        std::size_t keep_neg = std::min<std::size_t>(
            {negatives.size(), static_cast<std::size_t>(policy.negative_ratio) * keep_pos,
             policy.max_pairs_per_topic - keep_pos});

        detail::Rng rng(detail::derive_seed(policy.seed, list.topic_id));
        auto picks = detail::sample_without_replacement(rng, negatives.size(), keep_neg);
        std::sort(picks.begin(), picks.end());

        for (auto& sample : positives) {
            result.samples.push_back(std::move(sample));
        }
        for (auto pick : picks) {
            result.samples.push_back(std::move(negatives[pick]));
        }
    }
    return result;
}

std::vector<ScoredPair> make_training_pairs(std::span<const TrainingSample> samples,
                                            std::span<const Topic> topics,
                                            std::span<const ReportSummary> summaries)
{
    std::unordered_map<std::string_view, const Topic*> topic_by_id;
    for (const auto& topic : topics) {
        topic_by_id.emplace(topic.topic_id, &topic);
    }
    std::unordered_map<std::string_view, const ReportSummary*> summary_by_id;
    for (const auto& summary : summaries) {
        summary_by_id.emplace(summary.report_id, &summary);
    }
    std::vector<ScoredPair> pairs;
    pairs.reserve(samples.size());
    for (const auto& sample : samples) {
        auto topic = topic_by_id.find(sample.topic_id);
        if (topic == topic_by_id.end()) {
            throw DataError("no topic text for " + sample.topic_id);
        }
        auto summary = summary_by_id.find(sample.report_id);
        if (summary == summary_by_id.end()) {
            throw DataError("no summary for report " + sample.report_id);
        }
        auto pair = build_pair(*topic->second, *summary->second);
        pair.label = sample.label;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

void write_training_pairs(std::span<const ScoredPair> pairs, std::ostream& out)
{
    for (const auto& pair : pairs) {
        if (!pair.label) {
            throw DataError("training pair " + pair.id() + " has no label");
        }
        nlohmann::ordered_json obj;
        obj["topic_id"] = pair.topic_id;
        obj["report_id"] = pair.report_id;
        obj["query"] = pair.query_text;
        obj["passage"] = pair.passage_text;
        obj["label"] = *pair.label == Relevance::Relevant ? 1 : 0;
        out << obj.dump() << '\n';
    }
}

std::vector<ScoredPair> parse_training_pairs(std::istream& in)
{
    std::vector<ScoredPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            throw ParseError(line_no, "expected one JSON object per line");
        }
        ScoredPair pair;
        for (auto [key, field] : {std::pair{"topic_id", &pair.topic_id}, std::pair{"report_id", &pair.report_id},
                                  std::pair{"query", &pair.query_text}, std::pair{"passage", &pair.passage_text}}) {
            auto it = obj.find(key);
            if (it == obj.end() || !it->is_string()) {
                throw ParseError(line_no, std::string("missing string \"") + key + "\"");
            }
            *field = it->get<std::string>();
        }
        auto label = obj.find("label");
        if (label == obj.end() || !label->is_number_integer() || (*label != 0 && *label != 1)) {
            throw ParseError(line_no, "label must be 1 or 0");
        }
        pair.label = *label == 1 ? Relevance::Relevant : Relevance::NotRelevant;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

TopicSplit split_topics(std::span<const Topic> topics, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ConfigError("split fraction must lie in (0, 1), got " + std::to_string(fraction));
    }
    std::vector<Topic> shuffled(topics.begin(), topics.end());
    detail::Rng rng(seed);
    detail::shuffle(shuffled, rng);
    // The epsilon keeps products like 0.29 * 100 from flooring one short.
    auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(shuffled.size()) + 1e-9));
    TopicSplit split;
    split.train.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
    return split;
}

RankedList rerank(const RankedList& candidates, std::span<const ScoredPair> scored, std::string run_tag)
{
    std::unordered_map<std::string_view, double> probability;
    for (const auto& pair : scored) {
        if (pair.topic_id == candidates.topic_id && pair.probability) {
            probability.emplace(pair.report_id, *pair.probability);
        }
    }
    struct Entry {
        std::size_t rank;
        const std::string* id;
        double probability;
    };
    std::vector<Entry> entries;
    entries.reserve(candidates.items.size());
    for (std::size_t i = 0; i < candidates.items.size(); ++i) {
        const auto& id = candidates.items[i].id;
        auto it = probability.find(id);
        if (it == probability.end()) {
            throw DataError("topic " + candidates.topic_id + ": candidate " + id + " has no score");
        }
        entries.push_back(Entry{i, &id, it->second});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.probability != b.probability) {
            return a.probability > b.probability;
        }
        if (a.rank != b.rank) {
            return a.rank < b.rank;
        }
        return *a.id < *b.id;
    });
    RankedList out{candidates.topic_id, RankLevel::Report, {}, std::move(run_tag)};
    out.items.reserve(entries.size());
    for (const auto& e : entries) {
        out.items.push_back(RankedItem{*e.id, e.probability});
    }
    return out;
}

}  // namespace cohort
