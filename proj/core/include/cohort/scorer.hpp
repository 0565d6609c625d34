#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cohort/rerank.hpp"
#include "cohort/text_analysis.hpp"

namespace cohort {

struct PairRequest {
    std::string id;
    std::string query;
    std::string passage;

    friend bool operator==(const PairRequest&, const PairRequest&) = default;
};

struct PairScore {
    std::string id;
    double score = 0.0;

    friend bool operator==(const PairScore&, const PairScore&) = default;
};

/**
 * Binary-relevance scoring contract. Implementations return one score per
 * request id in any order; score_pairs() checks the answer. Transport
 * problems are reported as ScorerTransportError so they can be retried.
 * Implementations must tolerate concurrent calls.
 */
class Scorer {
  public:
    virtual ~Scorer() = default;
    virtual std::vector<PairScore> score(std::span<const PairRequest> batch) = 0;
};

/// Fraction of the query's analysed terms that also occur in the passage.
[[nodiscard]] double baseline_lexical_score(std::string_view query, std::string_view passage,
                                            const Analyzer& analyzer = {});

class BaselineLexicalScorer final : public Scorer {
  public:
    BaselineLexicalScorer() = default;
    explicit BaselineLexicalScorer(Analyzer analyzer) : m_analyzer(std::move(analyzer)) {}

    std::vector<PairScore> score(std::span<const PairRequest> batch) override;

  private:
    Analyzer m_analyzer;
};

/// Looks scores up by pair id; ids it does not know score 0.
class OracleScorer final : public Scorer {
  public:
    explicit OracleScorer(std::unordered_map<std::string, double> scores) : m_scores(std::move(scores)) {}

    std::vector<PairScore> score(std::span<const PairRequest> batch) override;

  private:
    std::unordered_map<std::string, double> m_scores;
};

/// POSTs the wire request to `base_url` + `path`.
class HttpScorer final : public Scorer {
  public:
    HttpScorer(std::string base_url, std::string path = "/score",
               std::chrono::milliseconds timeout = std::chrono::seconds(30));

    std::vector<PairScore> score(std::span<const PairRequest> batch) override;

  private:
    std::string m_base_url;
    std::string m_path;
    std::chrono::milliseconds m_timeout;
};

/**
 * Talks to a child process over its standard streams, one request line in,
 * one response line out. The child is started lazily and restarted after a
 * transport failure. Calls are serialized.
 */
class ProcessScorer final : public Scorer {
  public:
    explicit ProcessScorer(std::vector<std::string> argv);
    ~ProcessScorer() override;
    ProcessScorer(const ProcessScorer&) = delete;
    ProcessScorer& operator=(const ProcessScorer&) = delete;

    std::vector<PairScore> score(std::span<const PairRequest> batch) override;

  private:
    void start();
    void stop() noexcept;

    std::vector<std::string> m_argv;
    std::mutex m_mutex;
    int m_pid = -1;
    int m_to_child = -1;
    int m_from_child = -1;
    std::string m_buffer;
};

/// {"pairs":[{"id":..,"query":..,"passage":..}, ...]}
[[nodiscard]] std::string encode_scoring_request(std::span<const PairRequest> batch);
/// Parses {"scores":[{"id":..,"score":..}, ...]} without checking it against a
/// request. An {"error": ...} body from the service is reported as is.
[[nodiscard]] std::vector<PairScore> parse_scoring_response(std::string_view body);
/// Parses {"scores":[{"id":..,"score":..}, ...]} and checks it against the
/// request: same count, same ids, finite scores in [0, 1]. The result follows
/// request order. Throws ScorerProtocolError naming the defect.
[[nodiscard]] std::vector<PairScore> decode_scoring_response(std::string_view body,
                                                             std::span<const PairRequest> request);
/// Same checks for an already decoded answer.
[[nodiscard]] std::vector<PairScore> check_scoring_response(std::vector<PairScore> scores,
                                                            std::span<const PairRequest> request);

struct RetryPolicy {
    std::uint32_t attempts = 3;
    std::chrono::milliseconds initial_backoff{100};
    double multiplier = 2.0;
};

struct ScoringOptions {
    std::size_t batch_size = 32;
    std::size_t max_in_flight = 1;
    RetryPolicy retry;
};

/// Sets `probability` on every pair. Throws ScorerProtocolError on duplicate
/// pair ids (before anything is sent) or a malformed answer, and
/// ScorerTransportError once retries are exhausted.
void score_pairs(std::span<ScoredPair> pairs, Scorer& scorer, const ScoringOptions& options = {});

enum class ScorerTransport : std::uint8_t { Baseline, Oracle, Http, Process };

struct ScorerEndpoint {
    ScorerTransport transport = ScorerTransport::Baseline;
    std::string address;        // base URL for Http, command line for Process
    std::string path = "/score";
    std::size_t batch_size = 32;

    void validate() const;
};

/// Builds the remote scorers (Http, Process) and the baseline. The oracle
/// needs labels and is constructed directly.
[[nodiscard]] std::unique_ptr<Scorer> make_scorer(const ScorerEndpoint& endpoint);

}  // namespace cohort
