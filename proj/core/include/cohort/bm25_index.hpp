#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cohort/corpus.hpp"
#include "cohort/text_analysis.hpp"

namespace cohort {

/// Okapi BM25 free parameters. Defaults are the Anserini/Lucene ones.
struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;

    /// Throws ConfigError if k1 < 0 or b is outside [0, 1].
    void validate() const;
};

struct Posting {
    std::uint32_t doc = 0;  // ordinal into InvertedIndex::doc_ids()
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/**
 * Term -> postings index over analysed report text. Documents are numbered by
 * ascending report id so that the ordinal order is also the tie-break order,
 * and terms are stored sorted; both make the serialized form canonical.
 */
class InvertedIndex {
  public:
    InvertedIndex() = default;

    /// Analyses and posts every report. `threads` = 0 picks the hardware concurrency.
    static InvertedIndex build(std::span<const Report> reports, const Analyzer& analyzer = {},
                               unsigned threads = 0);

    [[nodiscard]] std::size_t doc_count() const noexcept { return m_doc_ids.size(); }
    [[nodiscard]] double avg_doc_length() const noexcept { return m_avg_doc_length; }
    [[nodiscard]] std::span<const std::string> doc_ids() const noexcept { return m_doc_ids; }
    [[nodiscard]] std::span<const std::uint32_t> doc_lengths() const noexcept { return m_doc_lengths; }
    [[nodiscard]] std::span<const std::string> terms() const noexcept { return m_terms; }

    /// Empty span for unknown terms.
    [[nodiscard]] std::span<const Posting> postings(std::string_view term) const;
    [[nodiscard]] std::uint32_t df(std::string_view term) const
    {
        return static_cast<std::uint32_t>(postings(term).size());
    }
    [[nodiscard]] std::uint32_t term_frequency(std::string_view term, std::uint32_t doc) const;

    /// Ordinal of a report id, or -1.
    [[nodiscard]] std::int64_t find_doc(std::string_view report_id) const;

    void save(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(std::istream& in);
    static InvertedIndex load(const std::filesystem::path& path);

    friend bool operator==(const InvertedIndex& a, const InvertedIndex& b)
    {
        return a.m_doc_ids == b.m_doc_ids && a.m_doc_lengths == b.m_doc_lengths &&
               a.m_terms == b.m_terms && a.m_postings == b.m_postings;
    }

  private:
    void finalize();

    std::vector<std::string> m_doc_ids;
    std::vector<std::uint32_t> m_doc_lengths;
    std::vector<std::string> m_terms;
    std::vector<std::vector<Posting>> m_postings;
    std::unordered_map<std::string, std::uint32_t> m_term_ids;
    std::unordered_map<std::string, std::uint32_t> m_doc_ordinals;
    double m_avg_doc_length = 0.0;
};

/// ln(1 + (N - df + 0.5) / (df + 0.5)); always positive.
[[nodiscard]] double bm25_idf(std::size_t doc_count, std::size_t df);

/// Per-term contribution: idf * tf (k1 + 1) / (tf + k1 (1 - b + b dl / avgdl)).
[[nodiscard]] double bm25_term_weight(double idf, double tf, double doc_length, double avg_doc_length,
                                      const Bm25Params& params);

/// Analyses a topic into its de-duplicated OR-query terms, in first-occurrence
/// order. Throws UnsearchableQuery if nothing survives analysis.
[[nodiscard]] std::vector<std::string> build_or_query(const Topic& topic, const Analyzer& analyzer = {});

/// BM25 score of one report; throws DataError for an unknown report id.
[[nodiscard]] double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                                std::span<const std::string> terms, std::string_view report_id);

/**
 * Top-n reports with a positive score, by score descending then report id
 * ascending. Terms are expected de-duplicated (see build_or_query).
 */
[[nodiscard]] RankedList retrieve_top_n(const InvertedIndex& index, const Bm25Params& params,
                                        std::span<const std::string> terms, std::size_t n,
                                        std::string topic_id = {}, std::string run_tag = "bm25");

}  // namespace cohort
