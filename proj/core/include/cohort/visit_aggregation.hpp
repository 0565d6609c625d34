#pragma once

#include <string>
#include <string_view>
#include <unordered_map>

#include "cohort/corpus.hpp"

namespace cohort {

/// Many-to-one report -> visit mapping.
class VisitMap {
  public:
    VisitMap() = default;
    explicit VisitMap(const Corpus& corpus);

    void add(std::string report_id, std::string visit_id);
    /// nullptr if the report is unknown.
    [[nodiscard]] const std::string* visit_of(std::string_view report_id) const;
    [[nodiscard]] std::size_t size() const noexcept { return m_visit_of.size(); }

  private:
    std::unordered_map<std::string, std::string> m_visit_of;
};

/**
 * Walks the report ranking in order and emits each visit the first time one
 * of its reports appears, carrying that report's score; later reports of the
 * same visit are skipped. Stops after `max_visits` visits; shorter output is
 * not padded. Throws DataError for a report the map does not know.
 */
[[nodiscard]] RankedList map_to_visits(const RankedList& reports, const VisitMap& visits,
                                       std::size_t max_visits);

}  // namespace cohort
