#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "cohort/error.hpp"
#include "cohort/scorer.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace cohort;
using nlohmann::json;

namespace {

const std::string kProtocolDir = std::string(COHORT_TEST_DATA_DIR) + "/protocol/";

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in) << path;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string chomp(std::string s)
{
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) {
        s.pop_back();
    }
    return s;
}

std::vector<PairRequest> requests_from(const std::string& file)
{
    auto doc = json::parse(slurp(kProtocolDir + file));
    std::vector<PairRequest> out;
    for (const auto& p : doc.at("pairs")) {
        out.push_back({p.at("id"), p.at("query"), p.at("passage")});
    }
    return out;
}

std::vector<ScoredPair> sample_pairs(std::size_t n)
{
    std::vector<ScoredPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back({"T1", "r" + std::to_string(i), "Patients with fever and rash.",
                         i % 3 == 0 ? "progress note; fever; rash" : (i % 3 == 1 ? "progress note; fever" : "x"),
                         std::nullopt, std::nullopt});
    }
    return pairs;
}

std::vector<double> probabilities(const std::vector<ScoredPair>& pairs)
{
    std::vector<double> out;
    for (const auto& p : pairs) {
        out.push_back(p.probability.value_or(-1));
    }
    return out;
}

json answer(const std::string& body)
{
    auto request = json::parse(body);
    auto scores = json::array();
    for (const auto& p : request.at("pairs")) {
        scores.push_back({{"id", p.at("id")}, {"score", baseline_lexical_score(p.at("query").get<std::string>(),
                                                                               p.at("passage").get<std::string>())}});
    }
    return json{{"scores", scores}};
}

class ScriptedScorer final : public Scorer {
  public:
    explicit ScriptedScorer(int transport_failures, bool protocol_failure = false)
        : m_failures(transport_failures), m_protocol(protocol_failure)
    {}

    std::vector<PairScore> score(std::span<const PairRequest> batch) override
    {
        ++calls;
        if (m_protocol) {
            throw ScorerProtocolError("bad answer");
        }
        if (m_failures-- > 0) {
            throw ScorerTransportError("connection reset");
        }
        return m_inner.score(batch);
    }

    std::atomic<int> calls{0};

  private:
    std::atomic<int> m_failures;
    bool m_protocol;
    BaselineLexicalScorer m_inner;
};

class RecordingScorer final : public Scorer {
  public:
    std::vector<PairScore> score(std::span<const PairRequest> batch) override
    {
        std::vector<PairScore> out;
        {
            std::lock_guard lock(m_mutex);
            sizes.push_back(batch.size());
        }
        // Answer in reverse to exercise id matching.
        for (auto it = batch.rbegin(); it != batch.rend(); ++it) {
            out.push_back({it->id, baseline_lexical_score(it->query, it->passage)});
        }
        return out;
    }

    std::vector<std::size_t> sizes;

  private:
    std::mutex m_mutex;
};

class LocalServer {
  public:
    explicit LocalServer(std::function<void(const httplib::Request&, httplib::Response&)> handler)
    {
        m_server.Post("/score", std::move(handler));
        m_port = m_server.bind_to_any_port("127.0.0.1");
        m_thread = std::thread([this] { m_server.listen_after_bind(); });
        m_server.wait_until_ready();
    }
    ~LocalServer()
    {
        m_server.stop();
        m_thread.join();
    }
    [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(m_port); }

  private:
    httplib::Server m_server;
    int m_port = 0;
    std::thread m_thread;
};

ScoringOptions fast_options(std::size_t batch = 4)
{
    ScoringOptions options;
    options.batch_size = batch;
    options.retry.initial_backoff = std::chrono::milliseconds(1);
    return options;
}

}  // namespace

TEST(Protocol, GoldenVectors)
{
    auto cases = json::parse(slurp(kProtocolDir + "cases.json"));
    ASSERT_GE(cases.size(), 10U);
    for (const auto& c : cases) {
        SCOPED_TRACE(c.at("name").get<std::string>());
        auto request_text = chomp(slurp(kProtocolDir + c.at("request").get<std::string>()));
        auto request = requests_from(c.at("request"));
        EXPECT_EQ(encode_scoring_request(request), request_text);

        auto body = slurp(kProtocolDir + c.at("response").get<std::string>());
        if (c.at("expect") == "ok") {
            auto scores = decode_scoring_response(body, request);
            auto want = c.at("scores").get<std::vector<double>>();
            ASSERT_EQ(scores.size(), want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                EXPECT_EQ(scores[i].id, request[i].id);
                EXPECT_DOUBLE_EQ(scores[i].score, want[i]);
            }
        } else {
            EXPECT_THROW((void)decode_scoring_response(body, request), ScorerProtocolError);
        }
    }
}

TEST(Protocol, EncodeEscapesAndKeepsOrder)
{
    std::vector<PairRequest> batch = {{pair_id("T|1", "r\\2"), "a \"b\"\n", "caf\xc3\xa9"}};
    auto doc = json::parse(encode_scoring_request(batch));
    EXPECT_EQ(doc["pairs"][0]["id"], "T\\|1|r\\\\2");
    EXPECT_EQ(doc["pairs"][0]["query"], "a \"b\"\n");
    EXPECT_EQ(doc["pairs"][0]["passage"], "caf\xc3\xa9");
    EXPECT_EQ(encode_scoring_request({}), R"({"pairs":[]})");
}

TEST(Baseline, LexicalOverlap)
{
    EXPECT_NEAR(baseline_lexical_score("Children with dental caries.", "emergency department report; dental; caries"),
                2.0 / 3.0, 1e-12);
    EXPECT_EQ(baseline_lexical_score("Patients with hematuria.", "radiology report"), 0.0);
    EXPECT_EQ(baseline_lexical_score("Patients with hematuria.", "progress note; patients; hematuria"), 1.0);
    EXPECT_EQ(baseline_lexical_score("with the of", "anything"), 0.0);

    BaselineLexicalScorer scorer;
    auto batch = requests_from("request_four.json");
    auto scores = check_scoring_response(scorer.score(batch), batch);
    EXPECT_EQ(scores[0].score, 0.5);
    EXPECT_EQ(scores[1].score, 0.0);
}

TEST(Oracle, LooksUpIds)
{
    OracleScorer scorer({{"T1|r1", 1.0}, {"T1|r2", 0.25}});
    std::vector<PairRequest> batch = {{"T1|r2", "", ""}, {"T1|r9", "", ""}, {"T1|r1", "", ""}};
    auto scores = scorer.score(batch);
    ASSERT_EQ(scores.size(), 3U);
    EXPECT_EQ(scores[0].score, 0.25);
    EXPECT_EQ(scores[1].score, 0.0);
    EXPECT_EQ(scores[2].score, 1.0);
}

TEST(ScorePairs, BatchingAndOrder)
{
    auto reference = sample_pairs(23);
    BaselineLexicalScorer baseline;
    score_pairs(reference, baseline, fast_options(100));

    for (std::size_t batch : {1U, 4U, 7U, 23U, 50U}) {
        for (std::size_t in_flight : {1U, 3U}) {
            auto pairs = sample_pairs(23);
            RecordingScorer scorer;
            auto options = fast_options(batch);
            options.max_in_flight = in_flight;
            score_pairs(pairs, scorer, options);
            EXPECT_EQ(probabilities(pairs), probabilities(reference)) << batch << "/" << in_flight;
            std::size_t total = 0;
            for (auto s : scorer.sizes) {
                EXPECT_LE(s, batch);
                total += s;
            }
            EXPECT_EQ(total, 23U);
            EXPECT_EQ(scorer.sizes.size(), (23 + batch - 1) / batch);
        }
    }
    EXPECT_NEAR(*reference[0].probability, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(*reference[1].probability, 1.0 / 3.0, 1e-12);
    EXPECT_EQ(*reference[2].probability, 0.0);
}

TEST(ScorePairs, EmptyInputSendsNothing)
{
    std::vector<ScoredPair> none;
    RecordingScorer scorer;
    score_pairs(none, scorer);
    EXPECT_TRUE(scorer.sizes.empty());
}

TEST(ScorePairs, DuplicateIdsRejectedBeforeSending)
{
    auto pairs = sample_pairs(3);
    pairs[2].report_id = pairs[0].report_id;
    RecordingScorer scorer;
    EXPECT_THROW(score_pairs(pairs, scorer), ScorerProtocolError);
    EXPECT_TRUE(scorer.sizes.empty());
    auto ok = sample_pairs(2);
    EXPECT_THROW(score_pairs(ok, scorer, ScoringOptions{0, 1, {}}), ConfigError);
}

TEST(ScorePairs, TransportErrorsAreRetried)
{
    auto pairs = sample_pairs(4);
    ScriptedScorer flaky(2);
    score_pairs(pairs, flaky, fast_options());
    EXPECT_EQ(flaky.calls, 3);
    EXPECT_TRUE(pairs[0].probability.has_value());

    ScriptedScorer dead(100);
    EXPECT_THROW(score_pairs(pairs, dead, fast_options()), ScorerTransportError);
    EXPECT_EQ(dead.calls, 3);
}

TEST(ScorePairs, ProtocolErrorsAreNotRetried)
{
    auto pairs = sample_pairs(4);
    ScriptedScorer broken(0, true);
    EXPECT_THROW(score_pairs(pairs, broken, fast_options()), ScorerProtocolError);
    EXPECT_EQ(broken.calls, 1);
}

TEST(ScorePairs, BadAnswerIsAProtocolError)
{
    auto pairs = sample_pairs(4);
    OracleScorer out_of_range({{pairs[0].id(), 1.5}});
    EXPECT_THROW(score_pairs(pairs, out_of_range, fast_options()), ScorerProtocolError);
}

TEST(Http, ScoresThroughALocalServer)
{
    std::atomic<int> hits{0};
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        EXPECT_EQ(req.get_header_value("Content-Type"), "application/json");
        res.set_content(answer(req.body).dump(), "application/json");
    });
    auto pairs = sample_pairs(10);
    auto reference = sample_pairs(10);
    BaselineLexicalScorer baseline;
    score_pairs(reference, baseline);

    HttpScorer scorer(server.url());
    auto options = fast_options(4);
    options.max_in_flight = 2;
    score_pairs(pairs, scorer, options);
    EXPECT_EQ(probabilities(pairs), probabilities(reference));
    EXPECT_EQ(hits, 3);
}

TEST(Http, ServerErrorsAreRetried)
{
    std::atomic<int> hits{0};
    LocalServer server([&](const httplib::Request& req, httplib::Response& res) {
        if (hits++ == 0) {
            res.status = 503;
            return;
        }
        res.set_content(answer(req.body).dump(), "application/json");
    });
    auto pairs = sample_pairs(3);
    HttpScorer scorer(server.url());
    score_pairs(pairs, scorer, fast_options());
    EXPECT_EQ(hits, 2);
    EXPECT_TRUE(pairs[2].probability.has_value());
}

TEST(Http, ClientErrorsAreProtocolErrors)
{
    std::atomic<int> hits{0};
    LocalServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 400;
        res.set_content(R"({"error":"bad request"})", "application/json");
    });
    auto pairs = sample_pairs(3);
    HttpScorer scorer(server.url());
    EXPECT_THROW(score_pairs(pairs, scorer, fast_options()), ScorerProtocolError);
    EXPECT_EQ(hits, 1);
}

TEST(Http, UnreachableIsATransportError)
{
    auto pairs = sample_pairs(2);
    HttpScorer scorer("http://127.0.0.1:1", "/score", std::chrono::milliseconds(500));
    EXPECT_THROW(score_pairs(pairs, scorer, fast_options()), ScorerTransportError);
}

TEST(Process, ScoresThroughAChild)
{
    auto pairs = sample_pairs(9);
    ProcessScorer scorer({COHORT_FAKE_SCORER, "overlap"});
    score_pairs(pairs, scorer, fast_options(2));
    // The child counts raw words, so "with" and "and" are never matched.
    EXPECT_NEAR(*pairs[0].probability, 2.0 / 5.0, 1e-12);
    EXPECT_NEAR(*pairs[1].probability, 1.0 / 5.0, 1e-12);
    EXPECT_EQ(*pairs[2].probability, 0.0);
}

TEST(Process, RestartsAfterTheChildExits)
{
    // Each fresh child answers one request, so every second call fails once
    // and succeeds on retry.
    auto pairs = sample_pairs(6);
    ProcessScorer scorer({COHORT_FAKE_SCORER, "exit-after", "1"});
    score_pairs(pairs, scorer, fast_options(2));
    for (const auto& p : pairs) {
        EXPECT_TRUE(p.probability.has_value());
    }
}

TEST(Process, MalformedAnswers)
{
    auto pairs = sample_pairs(3);
    for (const char* mode : {"garbage", "error", "extra"}) {
        ProcessScorer scorer({COHORT_FAKE_SCORER, mode});
        EXPECT_THROW(score_pairs(pairs, scorer, fast_options()), ScorerProtocolError) << mode;
    }
}

TEST(Process, MissingExecutableIsATransportError)
{
    auto pairs = sample_pairs(2);
    ProcessScorer scorer({"/nonexistent/scorer-binary"});
    EXPECT_THROW(score_pairs(pairs, scorer, fast_options()), ScorerTransportError);
}

TEST(Endpoint, ValidateAndMake)
{
    ScorerEndpoint endpoint;
    EXPECT_NO_THROW(endpoint.validate());
    EXPECT_NE(make_scorer(endpoint), nullptr);

    endpoint.transport = ScorerTransport::Http;
    EXPECT_THROW(endpoint.validate(), ConfigError);
    endpoint.address = "http://127.0.0.1:9";
    EXPECT_NO_THROW(endpoint.validate());
    endpoint.batch_size = 0;
    EXPECT_THROW(endpoint.validate(), ConfigError);

    ScorerEndpoint oracle;
    oracle.transport = ScorerTransport::Oracle;
    EXPECT_THROW((void)make_scorer(oracle), ConfigError);
}

TEST(Endpoint, ProcessCommandLineIsSplit)
{
    ScorerEndpoint endpoint;
    endpoint.transport = ScorerTransport::Process;
    endpoint.address = std::string("\"") + COHORT_FAKE_SCORER + "\"   overlap ";
    auto scorer = make_scorer(endpoint);
    auto pairs = sample_pairs(3);
    score_pairs(pairs, *scorer, fast_options());
    EXPECT_NEAR(*pairs[0].probability, 0.4, 1e-12);
}
