#include "cohort/visit_aggregation.hpp"

#include <unordered_set>

#include "cohort/error.hpp"

namespace cohort {

VisitMap::VisitMap(const Corpus& corpus)
{
    m_visit_of.reserve(corpus.size());
    for (const auto& report : corpus.reports()) {
        m_visit_of.emplace(report.report_id, report.visit_id);
    }
}

void VisitMap::add(std::string report_id, std::string visit_id)
{
    m_visit_of.insert_or_assign(std::move(report_id), std::move(visit_id));
}

const std::string* VisitMap::visit_of(std::string_view report_id) const
{
    auto it = m_visit_of.find(std::string(report_id));
    return it == m_visit_of.end() ? nullptr : &it->second;
}

RankedList map_to_visits(const RankedList& reports, const VisitMap& visits, std::size_t max_visits)
{
    if (max_visits == 0) {
        throw ConfigError("M (max visits) must be >= 1");
    }
    RankedList out{reports.topic_id, RankLevel::Visit, {}, reports.run_tag};
    std::unordered_set<std::string_view> emitted;
    for (const auto& item : reports.items) {
        const auto* visit = visits.visit_of(item.id);
        if (visit == nullptr) {
            throw DataError("topic " + reports.topic_id + ": report \"" + item.id + "\" has no visit");
        }
        if (out.items.size() == max_visits) {
            continue;  // keep validating the remaining ids
        }
        if (emitted.insert(*visit).second) {
            out.items.push_back(RankedItem{*visit, item.score});
        }
    }
    return out;
}

}  // namespace cohort
