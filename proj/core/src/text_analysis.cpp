#include "cohort/text_analysis.hpp"

#include <cctype>
#include <fstream>
#include <istream>

#include "cohort/error.hpp"

namespace cohort {

namespace {

bool is_letter(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_digit(unsigned char c) { return std::isdigit(c) != 0; }
bool is_word_char(unsigned char c) { return is_letter(c) || is_digit(c); }

std::string lowercase(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

// True if the separator at `pos` glues the characters on either side together.
bool joins(std::string_view text, std::size_t pos)
{
    if (pos == 0 || pos + 1 >= text.size()) {
        return false;
    }
    auto prev = static_cast<unsigned char>(text[pos - 1]);
    auto next = static_cast<unsigned char>(text[pos + 1]);
    auto sep = text[pos];
    if ((sep == '.' || sep == '\'') && is_letter(prev) && is_letter(next)) {
        return true;
    }
    return (sep == '.' || sep == ',') && is_digit(prev) && is_digit(next);
}

}  // namespace

TokenStream tokenize(std::string_view text)
{
    TokenStream tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (!is_word_char(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            continue;
        }
        auto start = pos;
        while (pos < text.size()) {
            auto c = static_cast<unsigned char>(text[pos]);
            if (is_word_char(c)) {
                ++pos;
            } else if (joins(text, pos)) {
                pos += 2;
            } else {
                break;
            }
        }
        auto surface = text.substr(start, pos - start);
        tokens.push_back(Token{std::string(surface), lowercase(surface), CharSpan{start, pos}});
    }
    return tokens;
}

const Stoplist& default_stoplist()
{
    static const Stoplist stoplist = {
        "a",    "an",   "and",   "are",  "as",    "at",   "be",    "but",  "by",
        "for",  "if",   "in",    "into", "is",    "it",   "no",    "not",  "of",
        "on",   "or",   "such",  "that", "the",   "their", "then", "there", "these",
        "they", "this", "to",    "was",  "will",  "with",
    };
    return stoplist;
}

TokenStream remove_stopwords(TokenStream tokens, const Stoplist& stoplist)
{
    std::erase_if(tokens, [&](const Token& t) { return stoplist.contains(t.normalized); });
    return tokens;
}

const AbbreviationList& default_abbreviations()
{
    static const AbbreviationList list = {
        "dr.",   "mr.",    "mrs.",   "ms.",  "prof.", "st.",  "vs.",  "e.g.", "i.e.",
        "approx.", "no.",  "pt.",    "b.i.d.", "t.i.d.", "q.i.d.", "q.d.", "q.h.s.", "p.o.",
        "p.r.n.", "a.m.",  "p.m.",   "mg.",  "ml.",   "fig.", "jr.",  "sr.",
    };
    return list;
}

std::vector<Sentence> split_sentences(std::string_view text, const AbbreviationList& abbreviations)
{
    std::vector<Sentence> sentences;
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };

    auto emit = [&](std::size_t begin, std::size_t end) {
        while (begin < end && is_space(text[begin])) {
            ++begin;
        }
        while (end > begin && is_space(text[end - 1])) {
            --end;
        }
        if (end > begin) {
            sentences.push_back(Sentence{std::string(text.substr(begin, end - begin)), {begin, end}});
        }
    };

    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c != '.' && c != '!' && c != '?') {
            continue;
        }
        // Absorb runs like "?!" or "..." into one terminator.
        std::size_t end = i + 1;
        while (end < text.size() && (text[end] == '.' || text[end] == '!' || text[end] == '?')) {
            ++end;
        }
        std::size_t next = end;
        while (next < text.size() && is_space(text[next])) {
            ++next;
        }
        bool at_eof = next == text.size();
        bool boundary = at_eof ||
                        (next > end && std::isupper(static_cast<unsigned char>(text[next])) != 0);
        if (boundary && c == '.' && end == i + 1) {
            std::size_t word_start = i;
            while (word_start > start && !is_space(text[word_start - 1])) {
                --word_start;
            }
            auto word = lowercase(text.substr(word_start, end - word_start));
            if (abbreviations.contains(word)) {
                boundary = at_eof;
            }
        }
        if (boundary) {
            emit(start, end);
            start = end;
        }
        i = end - 1;
    }
    emit(start, text.size());
    return sentences;
}

std::set<std::string, std::less<>> read_word_list(std::istream& in)
{
    std::set<std::string, std::less<>> words;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        auto last = line.find_last_not_of(" \t\r");
        words.insert(lowercase(std::string_view(line).substr(first, last - first + 1)));
    }
    return words;
}

std::set<std::string, std::less<>> read_word_list(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return read_word_list(in);
}

std::vector<std::string> Analyzer::terms(std::string_view text) const
{
    std::vector<std::string> out;
    for (const auto& token : tokenize(text)) {
        if (!m_stoplist.contains(token.normalized)) {
            out.push_back(stem(token.normalized));
        }
    }
    return out;
}

}  // namespace cohort
