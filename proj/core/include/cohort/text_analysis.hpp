#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cohort {

/// Half-open byte range [begin, end) into the analysed text.
struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Token {
    std::string surface;
    std::string normalized;
    CharSpan span;

    friend bool operator==(const Token&, const Token&) = default;
};

using TokenStream = std::vector<Token>;

/**
 * Splits text into word tokens and lowercases them. A token is a maximal run
 * of letters and digits; a single '.' or '\'' joins two letters ("b.p",
 * "don't") and a single '.' or ',' joins two digits ("98.6"). Everything else
 * (including '/', '%', '-') separates tokens and is dropped. Bytes >= 0x80 are
 * treated as letters so UTF-8 words stay whole.
 */
[[nodiscard]] TokenStream tokenize(std::string_view text);

/// Lowercase entries, compared against Token::normalized.
using Stoplist = std::set<std::string, std::less<>>;

/// The classic 33-word English stop set used by Lucene's English analyzer.
[[nodiscard]] const Stoplist& default_stoplist();

[[nodiscard]] TokenStream remove_stopwords(TokenStream tokens, const Stoplist& stoplist);

/// Porter stem of a lowercase word. Words of one or two letters are returned as is.
[[nodiscard]] std::string stem(std::string_view word);

struct Sentence {
    std::string text;
    CharSpan span;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Lowercase abbreviations, each including its trailing period ("dr.", "b.i.d.").
using AbbreviationList = std::set<std::string, std::less<>>;

[[nodiscard]] const AbbreviationList& default_abbreviations();

/**
 * Rule based sentence splitter. A sentence ends at '.', '!' or '?' when the
 * next non-space character is uppercase or the text ends, unless the word
 * carrying the period is a listed abbreviation. Spans never include the
 * whitespace between sentences, so spans plus the gaps rebuild the input.
 */
[[nodiscard]] std::vector<Sentence> split_sentences(
    std::string_view text, const AbbreviationList& abbreviations = default_abbreviations());

/// One entry per line, lowercased; blank lines and lines starting with '#' are skipped.
[[nodiscard]] std::set<std::string, std::less<>> read_word_list(std::istream& in);
[[nodiscard]] std::set<std::string, std::less<>> read_word_list(const std::filesystem::path& path);

/// tokenize -> remove_stopwords -> stem, the term pipeline shared by indexing and querying.
class Analyzer {
  public:
    Analyzer() : m_stoplist(default_stoplist()) {}
    explicit Analyzer(Stoplist stoplist) : m_stoplist(std::move(stoplist)) {}

    [[nodiscard]] std::vector<std::string> terms(std::string_view text) const;
    [[nodiscard]] const Stoplist& stoplist() const noexcept { return m_stoplist; }

  private:
    Stoplist m_stoplist;
};

}  // namespace cohort
