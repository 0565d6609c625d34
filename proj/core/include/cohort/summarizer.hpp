#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cohort/corpus.hpp"
#include "cohort/text_analysis.hpp"

namespace cohort {

struct Concept {
    std::string concept_id;
    std::string preferred_name;

    friend bool operator==(const Concept&, const Concept&) = default;
};

/**
 * Dictionary of concept surface terms. Terms are tokenized with the same
 * tokenizer as report text and matched on lowercased, unstemmed tokens, so a
 * term like "Impacted wisdom tooth" is stored as three tokens.
 */
class ConceptLexicon {
  public:
    static constexpr std::size_t kMaxTermTokens = 5;

    /// Throws DataError if the term has no tokens, more than kMaxTermTokens,
    /// or is already mapped to a different concept.
    void add(std::string_view term, Concept concept_entry);

    [[nodiscard]] const Concept* find(std::span<const std::string> normalized_tokens) const;
    [[nodiscard]] std::size_t max_term_tokens() const noexcept { return m_max_tokens; }
    [[nodiscard]] std::size_t size() const noexcept { return m_entries.size(); }
    [[nodiscard]] bool empty() const noexcept { return m_entries.empty(); }

    /// Tab separated `term<TAB>concept_id<TAB>preferred_name` lines.
    static ConceptLexicon parse(std::istream& in);
    static ConceptLexicon load(const std::filesystem::path& path);

  private:
    std::unordered_map<std::string, Concept> m_entries;  // key: tokens joined by ' '
    std::size_t m_max_tokens = 0;
};

enum class Polarity : std::uint8_t { Positive, Negative };

struct ConceptMention {
    std::string concept_id;
    std::string preferred_name;
    CharSpan span;
    std::size_t sentence = 0;
    std::optional<Polarity> polarity;

    friend bool operator==(const ConceptMention&, const ConceptMention&) = default;
};

/// Token-aligned negation phrases ("no", "negative for", ...).
class NegationTriggers {
  public:
    NegationTriggers() = default;
    explicit NegationTriggers(const std::set<std::string, std::less<>>& phrases);

    /// no, not, without, denies, denied, negative for, free of, absence of,
    /// no evidence of, never, none. "negative" on its own is deliberately absent.
    static const NegationTriggers& defaults();

    [[nodiscard]] bool matches(std::span<const std::string> normalized_tokens) const;
    [[nodiscard]] std::size_t size() const noexcept { return m_phrases.size(); }

  private:
    std::vector<std::vector<std::string>> m_phrases;
};

/// Greedy longest match per sentence; polarity is left unset.
[[nodiscard]] std::vector<ConceptMention> extract_concepts(std::string_view text,
                                                           std::span<const Sentence> sentences,
                                                           const ConceptLexicon& lexicon);
[[nodiscard]] std::vector<ConceptMention> extract_concepts(std::string_view text,
                                                           const ConceptLexicon& lexicon);

/// Indices of sentences containing any trigger phrase; scope is the whole sentence.
[[nodiscard]] std::set<std::size_t> detect_negated_sentences(std::span<const Sentence> sentences,
                                                             const NegationTriggers& triggers);

[[nodiscard]] std::vector<ConceptMention> assign_polarity(std::vector<ConceptMention> mentions,
                                                          const std::set<std::size_t>& negated);

/// Number of reports with at least one positive mention, per concept id.
class ConceptDf {
  public:
    ConceptDf() = default;
    ConceptDf(std::unordered_map<std::string, std::uint64_t> counts, std::uint64_t report_count)
        : m_counts(std::move(counts)), m_report_count(report_count)
    {}

    [[nodiscard]] std::uint64_t operator()(std::string_view concept_id) const;
    [[nodiscard]] std::uint64_t report_count() const noexcept { return m_report_count; }
    [[nodiscard]] const std::unordered_map<std::string, std::uint64_t>& counts() const noexcept
    {
        return m_counts;
    }

    /// Header line `#reports<TAB>n`, then `concept_id<TAB>df` sorted by id.
    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static ConceptDf parse(std::istream& in);
    static ConceptDf load(const std::filesystem::path& path);

    friend bool operator==(const ConceptDf&, const ConceptDf&) = default;

  private:
    std::unordered_map<std::string, std::uint64_t> m_counts;
    std::uint64_t m_report_count = 0;
};

struct SummarizerOptions {
    std::uint64_t df_threshold = 2500;
    NegationTriggers triggers = NegationTriggers::defaults();
    AbbreviationList abbreviations = default_abbreviations();
};

/// Positive mentions of each report in `reports`, keyed by concept id. The
/// first of the two summarization phases.
[[nodiscard]] ConceptDf compute_concept_df(std::span<const Report> reports, const ConceptLexicon& lexicon,
                                           const SummarizerOptions& options = {}, unsigned threads = 0);

/// Keeps mentions whose concept occurs in at most `threshold` reports.
[[nodiscard]] std::vector<ConceptMention> filter_by_df(std::vector<ConceptMention> mentions,
                                                       const ConceptDf& df, std::uint64_t threshold);

struct ReportSummary {
    std::string report_id;
    std::vector<std::string> concepts;  // concepts[0] is the lowercased report type

    [[nodiscard]] std::string rendered() const;
    friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

/// Lowercased report type name, e.g. "emergency department report".
[[nodiscard]] std::string report_type_concept(ReportType type);

[[nodiscard]] ReportSummary summarize_report(const Report& report, const ConceptLexicon& lexicon,
                                             const ConceptDf& df, const SummarizerOptions& options = {});

/// Summaries in input order; parallel over reports.
[[nodiscard]] std::vector<ReportSummary> summarize_reports(std::span<const Report> reports,
                                                           const ConceptLexicon& lexicon,
                                                           const ConceptDf& df,
                                                           const SummarizerOptions& options = {},
                                                           unsigned threads = 0);

/// Newline-delimited JSON {"report_id": ..., "concepts": [...]}.
void write_summaries(std::span<const ReportSummary> summaries, std::ostream& out);
[[nodiscard]] std::vector<ReportSummary> parse_summaries(std::istream& in);

}  // namespace cohort
