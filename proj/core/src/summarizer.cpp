#include "cohort/summarizer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "cohort/detail/parallel.hpp"
#include "cohort/error.hpp"
#include "json.hpp"

namespace cohort {

namespace {

std::vector<std::string> normalized_tokens(std::string_view text)
{
    std::vector<std::string> out;
    for (auto& token : tokenize(text)) {
        out.push_back(std::move(token.normalized));
    }
    return out;
}

std::string join(std::span<const std::string> tokens)
{
    std::string key;
    for (const auto& token : tokens) {
        if (!key.empty()) {
            key += ' ';
        }
        key += token;
    }
    return key;
}

std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) {
            return fields;
        }
        start = tab + 1;
    }
}

std::string_view strip_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

}  // namespace

void ConceptLexicon::add(std::string_view term, Concept concept_entry)
{
    auto tokens = normalized_tokens(term);
    if (tokens.empty()) {
        throw DataError("lexicon term \"" + std::string(term) + "\" has no tokens");
    }
    if (tokens.size() > kMaxTermTokens) {
        throw DataError("lexicon term \"" + std::string(term) + "\" has more than " +
                        std::to_string(kMaxTermTokens) + " tokens");
    }
    auto key = join(tokens);
    auto [it, inserted] = m_entries.try_emplace(key, concept_entry);
    if (!inserted && it->second != concept_entry) {
        throw DataError("lexicon term \"" + key + "\" maps to both " + it->second.concept_id +
                        " and " + concept_entry.concept_id);
    }
    m_max_tokens = std::max(m_max_tokens, tokens.size());
}

const Concept* ConceptLexicon::find(std::span<const std::string> normalized) const
{
    auto it = m_entries.find(join(normalized));
    return it == m_entries.end() ? nullptr : &it->second;
}

ConceptLexicon ConceptLexicon::parse(std::istream& in)
{
    ConceptLexicon lexicon;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = strip_cr(line);
        if (view.find_first_not_of(" \t") == std::string_view::npos) {
            continue;
        }
        auto fields = split_tabs(view);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
            throw ParseError(line_no, "expected term<TAB>concept_id<TAB>preferred_name");
        }
        try {
            lexicon.add(fields[0], Concept{std::string(fields[1]), std::string(fields[2])});
        } catch (const DataError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return lexicon;
}

ConceptLexicon ConceptLexicon::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open lexicon " + path.string());
    }
    return parse(in);
}

NegationTriggers::NegationTriggers(const std::set<std::string, std::less<>>& phrases)
{
    for (const auto& phrase : phrases) {
        auto tokens = normalized_tokens(phrase);
        if (!tokens.empty()) {
            m_phrases.push_back(std::move(tokens));
        }
    }
}

const NegationTriggers& NegationTriggers::defaults()
{
    static const NegationTriggers triggers(std::set<std::string, std::less<>>{
        "no", "not", "without", "denies", "denied", "negative for", "free of", "absence of",
        "no evidence of", "never", "none"});
    return triggers;
}

bool NegationTriggers::matches(std::span<const std::string> tokens) const
{
    for (const auto& phrase : m_phrases) {
        if (phrase.size() > tokens.size()) {
            continue;
        }
        for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
            if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                return true;
            }
        }
    }
    return false;
}

std::vector<ConceptMention> extract_concepts(std::string_view text, std::span<const Sentence> sentences,
                                             const ConceptLexicon& lexicon)
{
    std::vector<ConceptMention> mentions;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
        const auto& sentence = sentences[s];
        auto tokens = tokenize(text.substr(sentence.span.begin, sentence.span.size()));
        std::vector<std::string> normalized;
        normalized.reserve(tokens.size());
        for (const auto& token : tokens) {
            normalized.push_back(token.normalized);
        }
        std::size_t pos = 0;
        while (pos < tokens.size()) {
            auto longest = std::min(lexicon.max_term_tokens(), tokens.size() - pos);
            std::size_t matched = 0;
            const Concept* hit = nullptr;
            for (auto len = longest; len >= 1; --len) {
                hit = lexicon.find(std::span<const std::string>(normalized).subspan(pos, len));
                if (hit != nullptr) {
                    matched = len;
                    break;
                }
            }
            if (hit == nullptr) {
                ++pos;
                continue;
            }
            CharSpan span{sentence.span.begin + tokens[pos].span.begin,
                          sentence.span.begin + tokens[pos + matched - 1].span.end};
            mentions.push_back(ConceptMention{hit->concept_id, hit->preferred_name, span, s, std::nullopt});
            pos += matched;
        }
    }
    return mentions;
}

std::vector<ConceptMention> extract_concepts(std::string_view text, const ConceptLexicon& lexicon)
{
    auto sentences = split_sentences(text);
    return extract_concepts(text, sentences, lexicon);
}

std::set<std::size_t> detect_negated_sentences(std::span<const Sentence> sentences,
                                               const NegationTriggers& triggers)
{
    std::set<std::size_t> negated;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (triggers.matches(normalized_tokens(sentences[i].text))) {
            negated.insert(i);
        }
    }
    return negated;
}

std::vector<ConceptMention> assign_polarity(std::vector<ConceptMention> mentions,
                                            const std::set<std::size_t>& negated)
{
    for (auto& mention : mentions) {
        mention.polarity = negated.contains(mention.sentence) ? Polarity::Negative : Polarity::Positive;
    }
    return mentions;
}

namespace {

std::vector<ConceptMention> positive_mentions(const Report& report, const ConceptLexicon& lexicon,
                                              const SummarizerOptions& options)
{
    auto sentences = split_sentences(report.text, options.abbreviations);
    auto mentions = extract_concepts(report.text, sentences, lexicon);
    auto negated = detect_negated_sentences(sentences, options.triggers);
    mentions = assign_polarity(std::move(mentions), negated);
    std::erase_if(mentions, [](const ConceptMention& m) { return m.polarity != Polarity::Positive; });
    return mentions;
}

}  // namespace

std::uint64_t ConceptDf::operator()(std::string_view concept_id) const
{
    auto it = m_counts.find(std::string(concept_id));
    return it == m_counts.end() ? 0 : it->second;
}

void ConceptDf::save(std::ostream& out) const
{
    std::vector<std::pair<std::string, std::uint64_t>> sorted(m_counts.begin(), m_counts.end());
    std::sort(sorted.begin(), sorted.end());
    out << "#reports\t" << m_report_count << '\n';
    for (const auto& [id, count] : sorted) {
        out << id << '\t' << count << '\n';
    }
}

void ConceptDf::save(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot create " + path.string());
    }
    save(out);
}

ConceptDf ConceptDf::parse(std::istream& in)
{
    std::unordered_map<std::string, std::uint64_t> counts;
    std::uint64_t reports = 0;
    bool header = false;
    std::string line;
    std::size_t line_no = 0;
    auto parse_count = [&](std::string_view text) {
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw ParseError(line_no, "non-numeric count \"" + std::string(text) + "\"");
        }
        return value;
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto view = strip_cr(line);
        if (view.empty()) {
            continue;
        }
        auto fields = split_tabs(view);
        if (fields.size() != 2) {
            throw ParseError(line_no, "expected concept_id<TAB>df");
        }
        if (fields[0] == "#reports") {
            reports = parse_count(fields[1]);
            header = true;
            continue;
        }
        if (!counts.emplace(std::string(fields[0]), parse_count(fields[1])).second) {
            throw ParseError(line_no, "duplicate concept id \"" + std::string(fields[0]) + "\"");
        }
    }
    if (!header) {
        throw DataError("concept DF table lacks the #reports header");
    }
    return ConceptDf(std::move(counts), reports);
}

ConceptDf ConceptDf::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open concept DF table " + path.string());
    }
    return parse(in);
}

ConceptDf compute_concept_df(std::span<const Report> reports, const ConceptLexicon& lexicon,
                             const SummarizerOptions& options, unsigned threads)
{
    std::vector<std::vector<std::string>> per_report(reports.size());
    detail::parallel_for(reports.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            std::set<std::string> ids;
            for (auto& mention : positive_mentions(reports[i], lexicon, options)) {
                ids.insert(std::move(mention.concept_id));
            }
            per_report[i].assign(ids.begin(), ids.end());
        }
    });
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& ids : per_report) {
        for (const auto& id : ids) {
            ++counts[id];
        }
    }
    return ConceptDf(std::move(counts), reports.size());
}

std::vector<ConceptMention> filter_by_df(std::vector<ConceptMention> mentions, const ConceptDf& df,
                                         std::uint64_t threshold)
{
    std::erase_if(mentions, [&](const ConceptMention& m) { return df(m.concept_id) > threshold; });
    return mentions;
}

std::string ReportSummary::rendered() const
{
    std::string out;
    for (const auto& entry : concepts) {
        if (!out.empty()) {
            out += "; ";
        }
        out += entry;
    }
    return out;
}

std::string report_type_concept(ReportType type)
{
    std::string name(to_string(type));
    for (auto& c : name) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return name;
}

ReportSummary summarize_report(const Report& report, const ConceptLexicon& lexicon, const ConceptDf& df,
                               const SummarizerOptions& options)
{
    ReportSummary summary{report.report_id, {report_type_concept(report.type)}};
    std::unordered_set<std::string> seen{summary.concepts.front()};
    for (auto& mention : filter_by_df(positive_mentions(report, lexicon, options), df, options.df_threshold)) {
        if (seen.insert(mention.preferred_name).second) {
            summary.concepts.push_back(std::move(mention.preferred_name));
        }
    }
    return summary;
}

std::vector<ReportSummary> summarize_reports(std::span<const Report> reports, const ConceptLexicon& lexicon,
                                             const ConceptDf& df, const SummarizerOptions& options,
                                             unsigned threads)
{
    std::vector<ReportSummary> summaries(reports.size());
    detail::parallel_for(reports.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            summaries[i] = summarize_report(reports[i], lexicon, df, options);
        }
    });
    return summaries;
}

void write_summaries(std::span<const ReportSummary> summaries, std::ostream& out)
{
    for (const auto& summary : summaries) {
        nlohmann::ordered_json obj;
        obj["report_id"] = summary.report_id;
        obj["concepts"] = summary.concepts;
        out << obj.dump() << '\n';
    }
}

std::vector<ReportSummary> parse_summaries(std::istream& in)
{
    std::vector<ReportSummary> summaries;
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
        auto id = obj.find("report_id");
        auto concepts = obj.find("concepts");
        if (id == obj.end() || !id->is_string() || concepts == obj.end() || !concepts->is_array()) {
            throw ParseError(line_no, "summary needs string report_id and array concepts");
        }
        ReportSummary summary{id->get<std::string>(), {}};
        for (const auto& c : *concepts) {
            if (!c.is_string()) {
                throw ParseError(line_no, "concepts must be strings");
            }
            summary.concepts.push_back(c.get<std::string>());
        }
        if (summary.concepts.empty()) {
            throw ParseError(line_no, "summary for " + summary.report_id + " has no report type entry");
        }
        summaries.push_back(std::move(summary));
    }
    return summaries;
}

}  // namespace cohort
