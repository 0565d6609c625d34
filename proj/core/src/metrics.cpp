#include "cohort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <unordered_set>

#include "cohort/error.hpp"
#include "json.hpp"

namespace cohort {

namespace {

struct TopicStats {
    std::size_t relevant = 0;
    std::size_t nonrelevant = 0;
};

TopicStats stats_for(const JudgmentSet::TopicJudgments& judged)
{
    TopicStats s;
    for (const auto& [_, grade] : judged) {
        (grade > 0 ? s.relevant : s.nonrelevant) += 1;
    }
    return s;
}

int grade_of(const JudgmentSet::TopicJudgments& judged, const std::string& id)
{
    auto it = judged.find(id);
    return it == judged.end() ? 0 : it->second;
}

std::size_t relevant_in_top(const RankedList& run, const JudgmentSet::TopicJudgments& judged, std::size_t k)
{
    std::size_t hits = 0;
    auto n = std::min(k, run.items.size());
    for (std::size_t i = 0; i < n; ++i) {
        hits += grade_of(judged, run.items[i].id) > 0 ? 1 : 0;
    }
    return hits;
}

}  // namespace

double precision_at_k(const RankedList& run, const JudgmentSet& judgments, std::size_t k)
{
    if (k == 0) {
        throw ConfigError("precision cutoff k must be >= 1");
    }
    return static_cast<double>(relevant_in_top(run, judgments.topic(run.topic_id), k)) / static_cast<double>(k);
}

std::optional<double> r_precision(const RankedList& run, const JudgmentSet& judgments)
{
    const auto& judged = judgments.topic(run.topic_id);
    auto r = stats_for(judged).relevant;
    if (r == 0) {
        return std::nullopt;
    }
    return static_cast<double>(relevant_in_top(run, judged, r)) / static_cast<double>(r);
}

std::optional<double> average_precision(const RankedList& run, const JudgmentSet& judgments)
{
    const auto& judged = judgments.topic(run.topic_id);
    auto r = stats_for(judged).relevant;
    if (r == 0) {
        return std::nullopt;
    }
    double sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t i = 0; i < run.items.size(); ++i) {
        if (grade_of(judged, run.items[i].id) > 0) {
            ++seen;
            sum += static_cast<double>(seen) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(r);
}

std::optional<double> bpref(const RankedList& run, const JudgmentSet& judgments)
{
    const auto& judged = judgments.topic(run.topic_id);
    auto [r, n] = stats_for(judged);
    if (r == 0) {
        return std::nullopt;
    }
    double denom = static_cast<double>(std::min(r, n));
    double sum = 0.0;
    std::size_t nonrel_above = 0;
    for (const auto& item : run.items) {
        auto it = judged.find(item.id);
        if (it == judged.end()) {
            continue;
        }
        if (it->second > 0) {
            sum += n == 0 ? 1.0 : 1.0 - static_cast<double>(std::min(nonrel_above, r)) / denom;
        } else {
            ++nonrel_above;
        }
    }
    return sum / static_cast<double>(r);
}

std::optional<double> ndcg(const RankedList& run, const JudgmentSet& judgments)
{
    const auto& judged = judgments.topic(run.topic_id);
    auto gain = [](int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; };
    std::vector<int> ideal;
    for (const auto& [_, grade] : judged) {
        if (grade > 0) {
            ideal.push_back(grade);
        }
    }
    if (ideal.empty()) {
        return std::nullopt;
    }
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < ideal.size(); ++i) {
        idcg += gain(ideal[i]) / std::log2(static_cast<double>(i + 2));
    }
    double dcg = 0.0;
    for (std::size_t i = 0; i < run.items.size(); ++i) {
        auto g = grade_of(judged, run.items[i].id);
        if (g > 0) {
            dcg += gain(g) / std::log2(static_cast<double>(i + 2));
        }
    }
    return dcg / idcg;
}

double reciprocal_rank(const RankedList& run, const JudgmentSet& judgments)
{
    const auto& judged = judgments.topic(run.topic_id);
    for (std::size_t i = 0; i < run.items.size(); ++i) {
        if (grade_of(judged, run.items[i].id) > 0) {
            return 1.0 / static_cast<double>(i + 1);
        }
    }
    return 0.0;
}

double TopicEval::p(std::size_t k) const
{
    auto it = precision.find(k);
    return it == precision.end() ? 0.0 : it->second;
}

EvalReport evaluate_run(std::span<const RankedList> run, const JudgmentSet& judgments, std::vector<std::size_t> ks)
{
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (auto k : ks) {
        if (k == 0) {
            throw ConfigError("precision cutoff k must be >= 1");
        }
    }

    std::map<std::string, const RankedList*, std::less<>> by_topic;
    for (const auto& list : run) {
        if (!by_topic.emplace(list.topic_id, &list).second) {
            throw DataError("topic " + list.topic_id + " appears more than once in the run");
        }
    }

    EvalReport report;
    report.ks = ks;
    auto judged_topics = judgments.topic_ids();
    std::unordered_set<std::string> judged_set(judged_topics.begin(), judged_topics.end());
    for (const auto& [topic_id, _] : by_topic) {
        if (!judged_set.contains(topic_id)) {
            report.flagged.push_back(topic_id + ": no judgments; excluded");
        }
    }

    for (const auto& topic_id : judged_topics) {
        auto stats = stats_for(judgments.topic(topic_id));
        if (stats.relevant == 0) {
            report.flagged.push_back(topic_id + ": no relevant visits judged; excluded");
            continue;
        }
        RankedList empty{topic_id, RankLevel::Visit, {}, {}};
        auto it = by_topic.find(topic_id);
        const RankedList& list = it == by_topic.end() ? empty : *it->second;
        if (it == by_topic.end()) {
            report.flagged.push_back(topic_id + ": missing from run; scored 0");
        }

        TopicEval eval;
        eval.topic_id = topic_id;
        for (auto k : ks) {
            eval.precision[k] = precision_at_k(list, judgments, k);
        }
        eval.r_prec = *r_precision(list, judgments);
        eval.average_precision = *average_precision(list, judgments);
        eval.bpref = *bpref(list, judgments);
        eval.ndcg = *ndcg(list, judgments);
        eval.reciprocal_rank = reciprocal_rank(list, judgments);
        eval.retrieved = list.items.size();
        eval.relevant = stats.relevant;
        eval.relevant_retrieved = relevant_in_top(list, judgments.topic(topic_id), list.items.size());
        report.topics.push_back(std::move(eval));
    }

    auto& mean = report.mean;
    mean.topic_id = "all";
    for (auto k : ks) {
        mean.precision[k] = 0.0;
    }
    for (const auto& t : report.topics) {
        for (auto k : ks) {
            mean.precision[k] += t.p(k);
        }
        mean.r_prec += t.r_prec;
        mean.average_precision += t.average_precision;
        mean.bpref += t.bpref;
        mean.ndcg += t.ndcg;
        mean.reciprocal_rank += t.reciprocal_rank;
        mean.retrieved += t.retrieved;
        mean.relevant += t.relevant;
        mean.relevant_retrieved += t.relevant_retrieved;
    }
    if (!report.topics.empty()) {
        auto n = static_cast<double>(report.topics.size());
        for (auto& [_, value] : mean.precision) {
            value /= n;
        }
        mean.r_prec /= n;
        mean.average_precision /= n;
        mean.bpref /= n;
        mean.ndcg /= n;
        mean.reciprocal_rank /= n;
    }
    return report;
}

namespace {

std::string fixed4(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

void write_eval_table(const EvalReport& report, std::ostream& out)
{
    std::vector<std::string> header{"topic", "map", "rprec", "bpref"};
    for (auto k : report.ks) {
        header.push_back("p" + std::to_string(k));
    }
    header.push_back("ndcg");
    header.push_back("mrr");

    std::vector<std::vector<std::string>> rows;
    auto row_of = [&](const TopicEval& t) {
        std::vector<std::string> row{t.topic_id, fixed4(t.average_precision), fixed4(t.r_prec), fixed4(t.bpref)};
        for (auto k : report.ks) {
            row.push_back(fixed4(t.p(k)));
        }
        row.push_back(fixed4(t.ndcg));
        row.push_back(fixed4(t.reciprocal_rank));
        return row;
    };
    for (const auto& t : report.topics) {
        rows.push_back(row_of(t));
    }
    rows.push_back(row_of(report.mean));

    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : rows) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    auto print = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c == 0) {
                out << row[c] << std::string(width[c] - row[c].size(), ' ');
            } else {
                out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
            }
        }
        out << '\n';
    };
    print(header);
    for (const auto& row : rows) {
        print(row);
    }
    for (const auto& note : report.flagged) {
        out << "# " << note << '\n';
    }
}

void write_eval_json(const EvalReport& report, std::ostream& out)
{
    auto emit = [&](const TopicEval& t) {
        nlohmann::ordered_json obj;
        obj["topic"] = t.topic_id;
        obj["map"] = t.average_precision;
        obj["rprec"] = t.r_prec;
        obj["bpref"] = t.bpref;
        for (auto k : report.ks) {
            obj["p" + std::to_string(k)] = t.p(k);
        }
        obj["ndcg"] = t.ndcg;
        obj["mrr"] = t.reciprocal_rank;
        out << obj.dump() << '\n';
    };
    for (const auto& t : report.topics) {
        emit(t);
    }
    emit(report.mean);
}

}  // namespace cohort
