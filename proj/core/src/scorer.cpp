#include "cohort/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <thread>
#include <unordered_set>

#include "cohort/error.hpp"
#include "json.hpp"

namespace cohort {

double baseline_lexical_score(std::string_view query, std::string_view passage, const Analyzer& analyzer)
{
    auto q = analyzer.terms(query);
    std::set<std::string> query_terms(q.begin(), q.end());
    if (query_terms.empty()) {
        return 0.0;
    }
    auto p = analyzer.terms(passage);
    std::set<std::string> passage_terms(p.begin(), p.end());
    std::size_t shared = 0;
    for (const auto& term : query_terms) {
        shared += passage_terms.contains(term) ? 1 : 0;
    }
    return static_cast<double>(shared) / static_cast<double>(query_terms.size());
}

std::vector<PairScore> BaselineLexicalScorer::score(std::span<const PairRequest> batch)
{
    std::vector<PairScore> out;
    out.reserve(batch.size());
    for (const auto& pair : batch) {
        out.push_back(PairScore{pair.id, baseline_lexical_score(pair.query, pair.passage, m_analyzer)});
    }
    return out;
}

std::vector<PairScore> OracleScorer::score(std::span<const PairRequest> batch)
{
    std::vector<PairScore> out;
    out.reserve(batch.size());
    for (const auto& pair : batch) {
        auto it = m_scores.find(pair.id);
        out.push_back(PairScore{pair.id, it == m_scores.end() ? 0.0 : it->second});
    }
    return out;
}

std::string encode_scoring_request(std::span<const PairRequest> batch)
{
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& pair : batch) {
        nlohmann::ordered_json obj;
        obj["id"] = pair.id;
        obj["query"] = pair.query;
        obj["passage"] = pair.passage;
        pairs.push_back(std::move(obj));
    }
    nlohmann::ordered_json request;
    request["pairs"] = std::move(pairs);
    return request.dump();
}

std::vector<PairScore> check_scoring_response(std::vector<PairScore> scores,
                                              std::span<const PairRequest> request)
{
    if (scores.size() != request.size()) {
        throw ScorerProtocolError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                                  std::to_string(request.size()) + " pairs");
    }
    std::unordered_map<std::string_view, double> by_id;
    for (const auto& s : scores) {
        if (!std::isfinite(s.score) || s.score < 0.0 || s.score > 1.0) {
            throw ScorerProtocolError("score " + std::to_string(s.score) + " for id \"" + s.id +
                                      "\" is outside [0, 1]");
        }
        if (!by_id.emplace(s.id, s.score).second) {
            throw ScorerProtocolError("scorer returned id \"" + s.id + "\" more than once");
        }
    }
    std::vector<PairScore> ordered;
    ordered.reserve(request.size());
    for (const auto& pair : request) {
        auto it = by_id.find(pair.id);
        if (it == by_id.end()) {
            throw ScorerProtocolError("scorer response lacks id \"" + pair.id + "\"");
        }
        ordered.push_back(PairScore{pair.id, it->second});
    }
    return ordered;
}

std::vector<PairScore> parse_scoring_response(std::string_view body)
{
    auto doc = nlohmann::json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw ScorerProtocolError("scorer response is not a JSON object");
    }
    if (auto err = doc.find("error"); err != doc.end()) {
        throw ScorerProtocolError("scorer reported an error: " + err->dump());
    }
    auto scores = doc.find("scores");
    if (scores == doc.end() || !scores->is_array()) {
        throw ScorerProtocolError("scorer response lacks a \"scores\" array");
    }
    std::vector<PairScore> out;
    out.reserve(scores->size());
    for (const auto& entry : *scores) {
        if (!entry.is_object()) {
            throw ScorerProtocolError("scores entries must be objects");
        }
        auto id = entry.find("id");
        auto score = entry.find("score");
        if (id == entry.end() || !id->is_string()) {
            throw ScorerProtocolError("scores entry lacks a string \"id\"");
        }
        if (score == entry.end() || !score->is_number()) {
            throw ScorerProtocolError("score for id \"" + id->get<std::string>() + "\" is not a number");
        }
        out.push_back(PairScore{id->get<std::string>(), score->get<double>()});
    }
    return out;
}

std::vector<PairScore> decode_scoring_response(std::string_view body, std::span<const PairRequest> request)
{
    return check_scoring_response(parse_scoring_response(body), request);
}

namespace {

std::vector<PairScore> score_with_retry(Scorer& scorer, std::span<const PairRequest> batch,
                                        const RetryPolicy& retry)
{
    auto backoff = retry.initial_backoff;
    for (std::uint32_t attempt = 1;; ++attempt) {
        try {
            return check_scoring_response(scorer.score(batch), batch);
        } catch (const ScorerTransportError& e) {
            if (attempt >= std::max<std::uint32_t>(1, retry.attempts)) {
                throw ScorerTransportError(std::string(e.what()) + " (gave up after " +
                                           std::to_string(attempt) + " attempts)");
            }
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(backoff.count()) * retry.multiplier));
        }
    }
}

}  // namespace

void score_pairs(std::span<ScoredPair> pairs, Scorer& scorer, const ScoringOptions& options)
{
    if (options.batch_size == 0) {
        throw ConfigError("batch_size must be >= 1");
    }
    std::vector<PairRequest> requests;
    requests.reserve(pairs.size());
    std::unordered_set<std::string> ids;
    for (const auto& pair : pairs) {
        auto id = pair.id();
        if (!ids.insert(id).second) {
            throw ScorerProtocolError("duplicate pair id \"" + id + "\" in scoring request");
        }
        requests.push_back(PairRequest{std::move(id), pair.query_text, pair.passage_text});
    }

    std::vector<std::span<const PairRequest>> batches;
    for (std::size_t begin = 0; begin < requests.size(); begin += options.batch_size) {
        auto len = std::min(options.batch_size, requests.size() - begin);
        batches.push_back(std::span<const PairRequest>(requests).subspan(begin, len));
    }

    // Results are written back by position, so completion order is irrelevant.
    std::vector<std::vector<PairScore>> results(batches.size());
    auto window = std::max<std::size_t>(1, options.max_in_flight);
    for (std::size_t first = 0; first < batches.size(); first += window) {
        auto last = std::min(batches.size(), first + window);
        if (last - first == 1) {
            results[first] = score_with_retry(scorer, batches[first], options.retry);
            continue;
        }
        std::vector<std::future<std::vector<PairScore>>> inflight;
        for (auto b = first; b < last; ++b) {
            inflight.push_back(std::async(std::launch::async, score_with_retry, std::ref(scorer),
                                          batches[b], std::cref(options.retry)));
        }
        for (auto b = first; b < last; ++b) {
            results[b] = inflight[b - first].get();
        }
    }

    std::size_t pos = 0;
    for (const auto& batch : results) {
        for (const auto& s : batch) {
            pairs[pos++].probability = s.score;
        }
    }
}

void ScorerEndpoint::validate() const
{
    if (batch_size < 1) {
        throw ConfigError("scorer batch_size must be >= 1");
    }
    if ((transport == ScorerTransport::Http || transport == ScorerTransport::Process) && address.empty()) {
        throw ConfigError("scorer_address is required for remote scorers");
    }
}

namespace {

std::vector<std::string> split_command(const std::string& command)
{
    std::vector<std::string> argv;
    std::string current;
    bool in_quotes = false;
    bool has_token = false;
    for (char c : command) {
        if (c == '"') {
            in_quotes = !in_quotes;
            has_token = true;
        } else if (!in_quotes && std::isspace(static_cast<unsigned char>(c))) {
            if (has_token) {
                argv.push_back(std::move(current));
                current.clear();
                has_token = false;
            }
        } else {
            current += c;
            has_token = true;
        }
    }
    if (has_token) {
        argv.push_back(std::move(current));
    }
    return argv;
}

}  // namespace

std::unique_ptr<Scorer> make_scorer(const ScorerEndpoint& endpoint)
{
    endpoint.validate();
    switch (endpoint.transport) {
    case ScorerTransport::Baseline:
        return std::make_unique<BaselineLexicalScorer>();
    case ScorerTransport::Http:
        return std::make_unique<HttpScorer>(endpoint.address, endpoint.path);
    case ScorerTransport::Process:
        return std::make_unique<ProcessScorer>(split_command(endpoint.address));
    case ScorerTransport::Oracle:
        break;
    }
    throw ConfigError("the oracle scorer needs judgments and cannot be built from an endpoint");
}

}  // namespace cohort
