#include "cohort/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "cohort/error.hpp"
#include "json.hpp"

namespace cohort {

namespace {

constexpr std::array<std::string_view, 9> kReportTypeNames = {
    "Radiology Report",
    "History and Physical",
    "Consultation Report",
    "Emergency Department Report",
    "Progress Note",
    "Discharge Summary",
    "Operative Report",
    "Surgical Pathology Report",
    "Cardiology Report",
};

bool is_blank(std::string_view line)
{
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        auto start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) {
            ++pos;
        }
        if (pos > start) {
            fields.push_back(line.substr(start, pos - start));
        }
    }
    return fields;
}

std::string required_string(const nlohmann::json& obj, const char* key, std::size_t line_no)
{
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(line_no, std::string("missing key \"") + key + "\"");
    }
    if (!it->is_string()) {
        throw ParseError(line_no, std::string("key \"") + key + "\" must be a string");
    }
    return it->get<std::string>();
}

nlohmann::json parse_json_line(const std::string& line, std::size_t line_no)
{
    auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw ParseError(line_no, "expected one JSON object per line");
    }
    return obj;
}

bool has_whitespace(std::string_view s)
{
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void require_token(std::string_view value, const char* what)
{
    if (value.empty() || has_whitespace(value)) {
        throw DataError(std::string(what) + " must be a non-empty token without whitespace: \"" +
                        std::string(value) + "\"");
    }
}

template <typename T>
bool parse_number(std::string_view text, T& value)
{
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string_view to_string(ReportType type) noexcept
{
    return kReportTypeNames[static_cast<std::size_t>(type)];
}

std::optional<ReportType> parse_report_type(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kReportTypeNames.size(); ++i) {
        if (kReportTypeNames[i] == name) {
            return kAllReportTypes[i];
        }
    }
    return std::nullopt;
}

Corpus::Corpus(std::vector<Report> reports) : m_reports(std::move(reports))
{
    m_report_pos.reserve(m_reports.size());
    for (std::size_t i = 0; i < m_reports.size(); ++i) {
        const auto& report = m_reports[i];
        if (report.report_id.empty()) {
            throw DataError("report " + std::to_string(i) + " has an empty report_id");
        }
        if (report.visit_id.empty()) {
            throw DataError("report " + report.report_id + " has an empty visit_id");
        }
        if (!m_report_pos.emplace(report.report_id, i).second) {
            throw DataError("duplicate report_id \"" + report.report_id + "\"");
        }
        auto [it, inserted] = m_visit_pos.emplace(report.visit_id, m_visits.size());
        if (inserted) {
            m_visits.push_back(Visit{report.visit_id, {}});
        }
        m_visits[it->second].report_ids.push_back(report.report_id);
    }
}

const Report* Corpus::find_report(std::string_view report_id) const
{
    auto it = m_report_pos.find(std::string(report_id));
    return it == m_report_pos.end() ? nullptr : &m_reports[it->second];
}

const Visit* Corpus::find_visit(std::string_view visit_id) const
{
    auto it = m_visit_pos.find(std::string(visit_id));
    return it == m_visit_pos.end() ? nullptr : &m_visits[it->second];
}

Corpus parse_corpus(std::istream& in)
{
    std::vector<Report> reports;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        auto obj = parse_json_line(line, line_no);
        Report report;
        report.report_id = required_string(obj, "report_id", line_no);
        report.visit_id = required_string(obj, "visit_id", line_no);
        auto type_name = required_string(obj, "report_type", line_no);
        report.text = required_string(obj, "text", line_no);
        auto type = parse_report_type(type_name);
        if (!type) {
            throw ParseError(line_no, "unknown report_type \"" + type_name + "\"");
        }
        report.type = *type;
        if (report.report_id.empty()) {
            throw ParseError(line_no, "empty report_id");
        }
        if (report.visit_id.empty()) {
            throw ParseError(line_no, "empty visit_id");
        }
        if (!seen.insert(report.report_id).second) {
            throw ParseError(line_no, "duplicate report_id \"" + report.report_id + "\"");
        }
        reports.push_back(std::move(report));
    }
    return Corpus(std::move(reports));
}

void write_corpus(std::span<const Report> reports, std::ostream& out)
{
    for (const auto& report : reports) {
        nlohmann::ordered_json obj;
        obj["report_id"] = report.report_id;
        obj["visit_id"] = report.visit_id;
        obj["report_type"] = std::string(to_string(report.type));
        obj["text"] = report.text;
        out << obj.dump() << '\n';
    }
}

std::vector<Topic> parse_topics(std::istream& in)
{
    std::vector<Topic> topics;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        auto obj = parse_json_line(line, line_no);
        Topic topic{required_string(obj, "topic_id", line_no),
                    required_string(obj, "description", line_no)};
        if (topic.topic_id.empty()) {
            throw ParseError(line_no, "empty topic_id");
        }
        if (is_blank(topic.description)) {
            throw ParseError(line_no, "empty description for topic " + topic.topic_id);
        }
        if (!seen.insert(topic.topic_id).second) {
            throw ParseError(line_no, "duplicate topic_id \"" + topic.topic_id + "\"");
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

void write_topics(std::span<const Topic> topics, std::ostream& out)
{
    for (const auto& topic : topics) {
        nlohmann::ordered_json obj;
        obj["topic_id"] = topic.topic_id;
        obj["description"] = topic.description;
        out << obj.dump() << '\n';
    }
}

void JudgmentSet::set(const std::string& topic_id, const std::string& visit_id, int grade)
{
    if (grade < 0 || grade > 2) {
        throw DataError("grade " + std::to_string(grade) + " for (" + topic_id + ", " + visit_id +
                        ") is outside {0, 1, 2}");
    }
    m_entries[topic_id][visit_id] = grade;
}

int JudgmentSet::grade(std::string_view topic_id, std::string_view visit_id) const
{
    auto topic_it = m_entries.find(topic_id);
    if (topic_it == m_entries.end()) {
        return 0;
    }
    auto it = topic_it->second.find(visit_id);
    return it == topic_it->second.end() ? 0 : it->second;
}

bool JudgmentSet::is_judged(std::string_view topic_id, std::string_view visit_id) const
{
    auto topic_it = m_entries.find(topic_id);
    return topic_it != m_entries.end() && topic_it->second.contains(visit_id);
}

const JudgmentSet::TopicJudgments& JudgmentSet::topic(std::string_view topic_id) const
{
    static const TopicJudgments empty;
    auto it = m_entries.find(topic_id);
    return it == m_entries.end() ? empty : it->second;
}

std::vector<std::string> JudgmentSet::topic_ids() const
{
    std::vector<std::string> ids;
    ids.reserve(m_entries.size());
    for (const auto& [id, _] : m_entries) {
        ids.push_back(id);
    }
    return ids;
}

std::size_t JudgmentSet::size() const noexcept
{
    std::size_t n = 0;
    for (const auto& [_, judgments] : m_entries) {
        n += judgments.size();
    }
    return n;
}

JudgmentSet binarize(const JudgmentSet& judgments)
{
    JudgmentSet binary;
    for (const auto& topic_id : judgments.topic_ids()) {
        for (const auto& [visit_id, grade] : judgments.topic(topic_id)) {
            binary.set(topic_id, visit_id, grade > 0 ? 1 : 0);
        }
    }
    return binary;
}

JudgmentSet parse_qrels(std::istream& in)
{
    JudgmentSet judgments;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 4) {
            throw ParseError(line_no, "expected 4 fields (topic_id 0 visit_id grade), got " +
                                          std::to_string(fields.size()));
        }
        int grade = 0;
        if (!parse_number(fields[3], grade)) {
            throw ParseError(line_no, "non-numeric grade \"" + std::string(fields[3]) + "\"");
        }
        if (grade < 0 || grade > 2) {
            throw ParseError(line_no, "grade " + std::to_string(grade) + " outside {0, 1, 2}");
        }
        std::string topic_id(fields[0]);
        std::string visit_id(fields[2]);
        if (judgments.is_judged(topic_id, visit_id)) {
            throw ParseError(line_no, "duplicate judgment for (" + topic_id + ", " + visit_id + ")");
        }
        judgments.set(topic_id, visit_id, grade);
    }
    return judgments;
}

void write_qrels(const JudgmentSet& judgments, std::ostream& out)
{
    for (const auto& topic_id : judgments.topic_ids()) {
        for (const auto& [visit_id, grade] : judgments.topic(topic_id)) {
            out << topic_id << " 0 " << visit_id << ' ' << grade << '\n';
        }
    }
}

void validate(const RankedList& list)
{
    std::unordered_set<std::string_view> ids;
    for (std::size_t i = 0; i < list.items.size(); ++i) {
        const auto& item = list.items[i];
        if (!ids.insert(item.id).second) {
            throw DataError("topic " + list.topic_id + ": id \"" + item.id +
                            "\" appears more than once");
        }
        if (i > 0 && item.score > list.items[i - 1].score) {
            throw DataError("topic " + list.topic_id + ": scores increase at rank " +
                            std::to_string(i + 1));
        }
    }
}

namespace {

std::string format_score(double score)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", score);
    return buf;
}

}  // namespace

double run_file_score(double score)
{
    auto text = format_score(score);
    double value = 0.0;
    parse_number(std::string_view(text), value);
    return value;
}

void write_run(const RankedList& list, std::ostream& out)
{
    require_token(list.topic_id, "topic_id");
    require_token(list.run_tag, "run_tag");
    for (std::size_t i = 0; i < list.items.size(); ++i) {
        const auto& item = list.items[i];
        require_token(item.id, "ranked id");
        out << list.topic_id << " Q0 " << item.id << ' ' << (i + 1) << ' '
            << format_score(item.score) << ' ' << list.run_tag << '\n';
    }
}

void write_run(std::span<const RankedList> run, std::ostream& out)
{
    for (const auto& list : run) {
        write_run(list, out);
    }
}

Run parse_run(std::istream& in, RankLevel level)
{
    struct Row {
        std::size_t rank;
        std::size_t line_no;
        RankedItem item;
    };
    std::vector<std::string> order;
    std::unordered_map<std::string, std::pair<std::string, std::vector<Row>>> by_topic;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 6) {
            throw ParseError(line_no, "expected 6 fields (topic_id Q0 id rank score run_tag), got " +
                                          std::to_string(fields.size()));
        }
        std::size_t rank = 0;
        if (!parse_number(fields[3], rank) || rank == 0) {
            throw ParseError(line_no, "rank must be a positive integer, got \"" +
                                          std::string(fields[3]) + "\"");
        }
        double score = 0.0;
        if (!parse_number(fields[4], score) || !std::isfinite(score)) {
            throw ParseError(line_no, "non-numeric score \"" + std::string(fields[4]) + "\"");
        }
        std::string topic_id(fields[0]);
        auto [it, inserted] = by_topic.try_emplace(topic_id);
        if (inserted) {
            order.push_back(topic_id);
            it->second.first = std::string(fields[5]);
        }
        it->second.second.push_back(Row{rank, line_no, RankedItem{std::string(fields[2]), score}});
    }

    Run run;
    run.reserve(order.size());
    for (const auto& topic_id : order) {
        auto& [tag, rows] = by_topic[topic_id];
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.rank < b.rank; });
        RankedList list{topic_id, level, {}, tag};
        list.items.reserve(rows.size());
        std::unordered_set<std::string> ids;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].rank == rows[i - 1].rank) {
                throw ParseError(rows[i].line_no, "duplicate rank " + std::to_string(rows[i].rank) +
                                                      " for topic " + topic_id);
            }
            if (!ids.insert(rows[i].item.id).second) {
                throw ParseError(rows[i].line_no,
                                 "id \"" + rows[i].item.id + "\" repeated for topic " + topic_id);
            }
            if (i > 0 && rows[i].item.score > rows[i - 1].item.score) {
                throw ParseError(rows[i].line_no,
                                 "score increases with rank for topic " + topic_id);
            }
            list.items.push_back(std::move(rows[i].item));
        }
        run.push_back(std::move(list));
    }
    return run;
}

}  // namespace cohort
