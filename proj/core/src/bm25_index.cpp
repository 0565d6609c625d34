#include "cohort/bm25_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "cohort/detail/parallel.hpp"
#include "cohort/error.hpp"

namespace cohort {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'O', 'H', 'O', 'R', 'T', 'I', 'X'};
constexpr std::uint32_t kFormatVersion = 1;

// Fixed little-endian encoding keeps the file byte-identical across hosts.
class BinaryWriter {
  public:
    explicit BinaryWriter(std::ostream& out) : m_out(out) {}

    void u32(std::uint32_t v) { write_le(v, 4); }
    void u64(std::uint64_t v) { write_le(v, 8); }
    void str(std::string_view s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        m_out.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

  private:
    void write_le(std::uint64_t v, int bytes)
    {
        for (int i = 0; i < bytes; ++i) {
            m_out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
        }
    }

    std::ostream& m_out;
};

class BinaryReader {
  public:
    explicit BinaryReader(std::istream& in) : m_in(in) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(read_le(4)); }
    std::uint64_t u64() { return read_le(8); }
    std::string str()
    {
        auto len = u32();
        std::string s(len, '\0');
        m_in.read(s.data(), len);
        check();
        return s;
    }

  private:
    std::uint64_t read_le(int bytes)
    {
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) {
            auto c = m_in.get();
            check();
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
        }
        return v;
    }

    void check() const
    {
        if (!m_in) {
            throw DataError("index file is truncated");
        }
    }

    std::istream& m_in;
};

using TermCounts = std::vector<std::pair<std::string, std::uint32_t>>;

TermCounts count_terms(const Analyzer& analyzer, std::string_view text, std::uint32_t& length)
{
    auto terms = analyzer.terms(text);
    length = static_cast<std::uint32_t>(terms.size());
    std::sort(terms.begin(), terms.end());
    TermCounts counts;
    for (auto& term : terms) {
        if (!counts.empty() && counts.back().first == term) {
            ++counts.back().second;
        } else {
            counts.emplace_back(std::move(term), 1);
        }
    }
    return counts;
}

std::vector<std::string_view> unique_terms(std::span<const std::string> terms)
{
    std::vector<std::string_view> out;
    std::unordered_set<std::string_view> seen;
    for (const auto& term : terms) {
        if (seen.insert(term).second) {
            out.push_back(term);
        }
    }
    return out;
}

}  // namespace

void Bm25Params::validate() const
{
    if (!(k1 >= 0.0) || !std::isfinite(k1)) {
        throw ConfigError("k1 must be >= 0, got " + std::to_string(k1));
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw ConfigError("b must lie in [0, 1], got " + std::to_string(b));
    }
}

InvertedIndex InvertedIndex::build(std::span<const Report> reports, const Analyzer& analyzer,
                                   unsigned threads)
{
    std::vector<const Report*> sorted;
    sorted.reserve(reports.size());
    for (const auto& report : reports) {
        sorted.push_back(&report);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const Report* a, const Report* b) { return a->report_id < b->report_id; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->report_id == sorted[i - 1]->report_id) {
            throw DataError("duplicate report_id \"" + sorted[i]->report_id + "\"");
        }
    }

    std::vector<TermCounts> per_doc(sorted.size());
    std::vector<std::uint32_t> lengths(sorted.size());
    detail::parallel_for(sorted.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            per_doc[i] = count_terms(analyzer, sorted[i]->text, lengths[i]);
        }
    });

    // Sequential merge in ordinal order keeps every posting list sorted by doc.
    std::map<std::string, std::vector<Posting>, std::less<>> merged;
    for (std::size_t doc = 0; doc < per_doc.size(); ++doc) {
        for (auto& [term, tf] : per_doc[doc]) {
            merged[std::move(term)].push_back(Posting{static_cast<std::uint32_t>(doc), tf});
        }
    }

    InvertedIndex index;
    index.m_doc_ids.reserve(sorted.size());
    for (const auto* report : sorted) {
        index.m_doc_ids.push_back(report->report_id);
    }
    index.m_doc_lengths = std::move(lengths);
    index.m_terms.reserve(merged.size());
    index.m_postings.reserve(merged.size());
    for (auto& [term, postings] : merged) {
        index.m_terms.push_back(term);
        index.m_postings.push_back(std::move(postings));
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize()
{
    m_term_ids.clear();
    m_term_ids.reserve(m_terms.size());
    for (std::size_t i = 0; i < m_terms.size(); ++i) {
        m_term_ids.emplace(m_terms[i], static_cast<std::uint32_t>(i));
    }
    m_doc_ordinals.clear();
    m_doc_ordinals.reserve(m_doc_ids.size());
    for (std::size_t i = 0; i < m_doc_ids.size(); ++i) {
        m_doc_ordinals.emplace(m_doc_ids[i], static_cast<std::uint32_t>(i));
    }
    auto total = std::accumulate(m_doc_lengths.begin(), m_doc_lengths.end(), std::uint64_t{0});
    m_avg_doc_length =
        m_doc_lengths.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(m_doc_lengths.size());
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const
{
    auto it = m_term_ids.find(std::string(term));
    if (it == m_term_ids.end()) {
        return {};
    }
    return m_postings[it->second];
}

std::uint32_t InvertedIndex::term_frequency(std::string_view term, std::uint32_t doc) const
{
    auto list = postings(term);
    auto it = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, std::uint32_t d) { return p.doc < d; });
    return it != list.end() && it->doc == doc ? it->tf : 0;
}

std::int64_t InvertedIndex::find_doc(std::string_view report_id) const
{
    auto it = m_doc_ordinals.find(std::string(report_id));
    return it == m_doc_ordinals.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void InvertedIndex::save(std::ostream& out) const
{
    out.write(kMagic.data(), kMagic.size());
    BinaryWriter w(out);
    w.u32(kFormatVersion);
    w.u64(m_doc_ids.size());
    for (std::size_t i = 0; i < m_doc_ids.size(); ++i) {
        w.str(m_doc_ids[i]);
        w.u32(m_doc_lengths[i]);
    }
    w.u64(m_terms.size());
    for (std::size_t t = 0; t < m_terms.size(); ++t) {
        w.str(m_terms[t]);
        w.u32(static_cast<std::uint32_t>(m_postings[t].size()));
        for (const auto& p : m_postings[t]) {
            w.u32(p.doc);
            w.u32(p.tf);
        }
    }
    if (!out) {
        throw DataError("failed writing index");
    }
}

void InvertedIndex::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot create " + path.string());
    }
    save(out);
}

InvertedIndex InvertedIndex::load(std::istream& in)
{
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw DataError("not a cohort index file (bad magic)");
    }
    BinaryReader r(in);
    auto version = r.u32();
    if (version != kFormatVersion) {
        throw DataError("unsupported index format version " + std::to_string(version));
    }
    InvertedIndex index;
    auto docs = r.u64();
    for (std::uint64_t i = 0; i < docs; ++i) {
        index.m_doc_ids.push_back(r.str());
        index.m_doc_lengths.push_back(r.u32());
        if (i > 0 && !(index.m_doc_ids[i - 1] < index.m_doc_ids[i])) {
            throw DataError("index documents are not in canonical order");
        }
    }
    auto terms = r.u64();
    for (std::uint64_t t = 0; t < terms; ++t) {
        index.m_terms.push_back(r.str());
        if (t > 0 && !(index.m_terms[t - 1] < index.m_terms[t])) {
            throw DataError("index terms are not in canonical order");
        }
        auto n = r.u32();
        std::vector<Posting> list;
        list.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            Posting p{r.u32(), r.u32()};
            if (p.doc >= docs || p.tf == 0 || (!list.empty() && list.back().doc >= p.doc)) {
                throw DataError("corrupt posting list for term \"" + index.m_terms.back() + "\"");
            }
            list.push_back(p);
        }
        index.m_postings.push_back(std::move(list));
    }
    index.finalize();
    return index;
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open index " + path.string());
    }
    return load(in);
}

double bm25_idf(std::size_t doc_count, std::size_t df)
{
    auto n = static_cast<double>(doc_count);
    auto d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double bm25_term_weight(double idf, double tf, double doc_length, double avg_doc_length,
                        const Bm25Params& params)
{
    double norm = avg_doc_length > 0.0 ? doc_length / avg_doc_length : 0.0;
    return idf * tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * norm));
}

std::vector<std::string> build_or_query(const Topic& topic, const Analyzer& analyzer)
{
    std::vector<std::string> terms;
    std::unordered_set<std::string> seen;
    for (auto& term : analyzer.terms(topic.description)) {
        if (seen.insert(term).second) {
            terms.push_back(std::move(term));
        }
    }
    if (terms.empty()) {
        throw UnsearchableQuery("unsearchable query: topic " + topic.topic_id +
                                " has no terms left after analysis");
    }
    return terms;
}

double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  std::span<const std::string> terms, std::string_view report_id)
{
    auto doc = index.find_doc(report_id);
    if (doc < 0) {
        throw DataError("unknown report id \"" + std::string(report_id) + "\"");
    }
    auto ordinal = static_cast<std::uint32_t>(doc);
    double dl = index.doc_lengths()[ordinal];
    double score = 0.0;
    for (auto term : unique_terms(terms)) {
        auto tf = index.term_frequency(term, ordinal);
        if (tf == 0) {
            continue;
        }
        score += bm25_term_weight(bm25_idf(index.doc_count(), index.df(term)), tf, dl,
                                  index.avg_doc_length(), params);
    }
    return score;
}

RankedList retrieve_top_n(const InvertedIndex& index, const Bm25Params& params,
                          std::span<const std::string> terms, std::size_t n, std::string topic_id,
                          std::string run_tag)
{
    if (n == 0) {
        throw ConfigError("n must be >= 1");
    }
    if (terms.empty()) {
        throw UnsearchableQuery("unsearchable query: no terms");
    }
    // Term-at-a-time accumulation, adding contributions in the same term order
    // as bm25_score so both paths produce bit-identical sums.
    std::vector<double> acc(index.doc_count(), 0.0);
    auto lengths = index.doc_lengths();
    for (auto term : unique_terms(terms)) {
        auto list = index.postings(term);
        if (list.empty()) {
            continue;
        }
        double idf = bm25_idf(index.doc_count(), list.size());
        for (const auto& p : list) {
            acc[p.doc] += bm25_term_weight(idf, p.tf, lengths[p.doc], index.avg_doc_length(), params);
        }
    }

    std::vector<std::uint32_t> hits;
    for (std::uint32_t d = 0; d < acc.size(); ++d) {
        if (acc[d] > 0.0) {
            hits.push_back(d);
        }
    }
    // Ordinals follow report id order, so the ordinal is the tie-break.
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        return acc[a] != acc[b] ? acc[a] > acc[b] : a < b;
    };
    auto keep = std::min(n, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);

    RankedList list{std::move(topic_id), RankLevel::Report, {}, std::move(run_tag)};
    list.items.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        list.items.push_back(RankedItem{index.doc_ids()[hits[i]], acc[hits[i]]});
    }
    return list;
}

}  // namespace cohort
