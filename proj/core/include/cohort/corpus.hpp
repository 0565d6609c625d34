#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cohort {

enum class ReportType : std::uint8_t {
    Radiology,
    HistoryAndPhysical,
    Consultation,
    EmergencyDepartment,
    ProgressNote,
    DischargeSummary,
    Operative,
    SurgicalPathology,
    Cardiology,
};

inline constexpr std::array<ReportType, 9> kAllReportTypes = {
    ReportType::Radiology,         ReportType::HistoryAndPhysical, ReportType::Consultation,
    ReportType::EmergencyDepartment, ReportType::ProgressNote,     ReportType::DischargeSummary,
    ReportType::Operative,         ReportType::SurgicalPathology,  ReportType::Cardiology,
};

/// Canonical name as it appears in corpus files, e.g. "Emergency Department Report".
[[nodiscard]] std::string_view to_string(ReportType type) noexcept;
/// Exact (case-sensitive) match against the nine canonical names.
[[nodiscard]] std::optional<ReportType> parse_report_type(std::string_view name) noexcept;

struct Report {
    std::string report_id;
    std::string visit_id;
    ReportType type = ReportType::Radiology;
    std::string text;

    friend bool operator==(const Report&, const Report&) = default;
};

struct Visit {
    std::string visit_id;
    std::vector<std::string> report_ids;  // in corpus order

    friend bool operator==(const Visit&, const Visit&) = default;
};

/**
 * An immutable collection of reports together with the visit table derived
 * from them. Visits are never authored directly; they are produced by
 * grouping reports on visit_id in order of first appearance.
 */
class Corpus {
  public:
    Corpus() = default;
    /// Throws DataError on empty or duplicate report ids.
    explicit Corpus(std::vector<Report> reports);

    [[nodiscard]] std::span<const Report> reports() const noexcept { return m_reports; }
    [[nodiscard]] std::span<const Visit> visits() const noexcept { return m_visits; }
    [[nodiscard]] std::size_t size() const noexcept { return m_reports.size(); }
    [[nodiscard]] bool empty() const noexcept { return m_reports.empty(); }

    [[nodiscard]] const Report* find_report(std::string_view report_id) const;
    [[nodiscard]] const Visit* find_visit(std::string_view visit_id) const;

  private:
    std::vector<Report> m_reports;
    std::vector<Visit> m_visits;
    std::unordered_map<std::string, std::size_t> m_report_pos;
    std::unordered_map<std::string, std::size_t> m_visit_pos;
};

/// One JSON object per line: report_id, visit_id, report_type, text.
[[nodiscard]] Corpus parse_corpus(std::istream& in);
void write_corpus(std::span<const Report> reports, std::ostream& out);

struct Topic {
    std::string topic_id;
    std::string description;

    friend bool operator==(const Topic&, const Topic&) = default;
};

/// One JSON object per line: topic_id, description.
[[nodiscard]] std::vector<Topic> parse_topics(std::istream& in);
void write_topics(std::span<const Topic> topics, std::ostream& out);

enum class Relevance : std::uint8_t { NotRelevant, Relevant };

/**
 * Graded judgments (0 not relevant, 1 partially relevant, 2 relevant) keyed
 * by (topic, visit). Absent pairs read as grade 0 but are still
 * distinguishable as unjudged, which bpref needs.
 */
class JudgmentSet {
  public:
    using TopicJudgments = std::map<std::string, int, std::less<>>;

    /// Throws DataError for grades outside {0, 1, 2}.
    void set(const std::string& topic_id, const std::string& visit_id, int grade);

    [[nodiscard]] int grade(std::string_view topic_id, std::string_view visit_id) const;
    [[nodiscard]] bool is_judged(std::string_view topic_id, std::string_view visit_id) const;
    [[nodiscard]] Relevance relevance(std::string_view topic_id, std::string_view visit_id) const
    {
        return grade(topic_id, visit_id) > 0 ? Relevance::Relevant : Relevance::NotRelevant;
    }

    /// Judgments for one topic, or an empty map if the topic is unknown.
    [[nodiscard]] const TopicJudgments& topic(std::string_view topic_id) const;
    [[nodiscard]] std::vector<std::string> topic_ids() const;
    [[nodiscard]] std::size_t size() const noexcept;

    friend bool operator==(const JudgmentSet&, const JudgmentSet&) = default;

  private:
    std::map<std::string, TopicJudgments, std::less<>> m_entries;
};

/// Collapses grades 1 and 2 to 1 (RELEVANT); grade 0 stays 0. Judged status is kept.
[[nodiscard]] JudgmentSet binarize(const JudgmentSet& judgments);

/// Whitespace separated `topic_id 0 visit_id grade` lines.
[[nodiscard]] JudgmentSet parse_qrels(std::istream& in);
void write_qrels(const JudgmentSet& judgments, std::ostream& out);

enum class RankLevel : std::uint8_t { Report, Visit };

struct RankedItem {
    std::string id;
    double score = 0.0;

    friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

struct RankedList {
    std::string topic_id;
    RankLevel level = RankLevel::Report;
    std::vector<RankedItem> items;
    std::string run_tag;

    friend bool operator==(const RankedList&, const RankedList&) = default;
};

/// Throws DataError if scores increase along the list or an id repeats.
void validate(const RankedList& list);

/// Rounds to the precision used in run files (6 significant digits).
[[nodiscard]] double run_file_score(double score);

/// A run holds one ranked list per topic, in file order.
using Run = std::vector<RankedList>;

/// Whitespace separated `topic_id Q0 id rank score run_tag`, rank from 1.
void write_run(const RankedList& list, std::ostream& out);
void write_run(std::span<const RankedList> run, std::ostream& out);
/// Items are ordered by the rank column. The file carries no level, so the
/// caller states it.
[[nodiscard]] Run parse_run(std::istream& in, RankLevel level = RankLevel::Visit);

}  // namespace cohort
