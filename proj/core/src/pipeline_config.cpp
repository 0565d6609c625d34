#include "cohort/pipeline_config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <thread>

#include "cohort/error.hpp"

namespace cohort {

namespace {

constexpr std::array<std::pair<ScorerTransport, std::string_view>, 4> kTransportNames{{
    {ScorerTransport::Baseline, "baseline"},
    {ScorerTransport::Oracle, "oracle"},
    {ScorerTransport::Http, "http"},
    {ScorerTransport::Process, "process"},
}};

std::string_view trim(std::string_view s)
{
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view domain)
{
    throw ConfigError(std::string(key) + ": invalid value \"" + std::string(value) + "\" (expected " +
                      std::string(domain) + ")");
}

template <typename T>
T parse_unsigned(std::string_view key, std::string_view value)
{
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || end != value.data() + value.size() || v > std::numeric_limits<T>::max()) {
        bad_value(key, value, "a non-negative integer");
    }
    return static_cast<T>(v);
}

double parse_real(std::string_view key, std::string_view value)
{
    double v = 0.0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || end != value.data() + value.size() || !std::isfinite(v)) {
        bad_value(key, value, "a finite number");
    }
    return v;
}

std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require(bool ok, std::string_view key, std::string_view domain)
{
    if (!ok) {
        throw ConfigError(std::string(key) + " must be " + std::string(domain));
    }
}

}  // namespace

std::string_view to_string(ScorerTransport transport) noexcept
{
    for (const auto& [t, name] : kTransportNames) {
        if (t == transport) {
            return name;
        }
    }
    return "baseline";
}

std::optional<ScorerTransport> parse_scorer_transport(std::string_view name) noexcept
{
    for (const auto& [t, n] : kTransportNames) {
        if (n == name) {
            return t;
        }
    }
    return std::nullopt;
}

const std::vector<std::string_view>& PipelineConfig::keys()
{
    static const std::vector<std::string_view> names = {
        "n_candidates",      "m_visits",          "df_threshold",        "df_fraction",
        "k1",                "b",                 "negative_ratio",      "max_pairs_per_topic",
        "reference_positives", "split_fraction",  "seed",                "scorer",
        "scorer_address",    "scorer_path",       "batch_size",          "max_in_flight",
        "retries",           "retry_backoff_ms",  "max_query_tokens",    "max_sequence_tokens",
        "learning_rate",     "epochs",            "threads",             "run_tag",
    };
    return names;
}

void PipelineConfig::set(std::string_view key, std::string_view raw)
{
    auto value = trim(raw);
    if (key == "n_candidates") {
        n_candidates = parse_unsigned<std::size_t>(key, value);
    } else if (key == "m_visits") {
        m_visits = parse_unsigned<std::size_t>(key, value);
    } else if (key == "df_threshold") {
        df_threshold = parse_unsigned<std::uint64_t>(key, value);
        df_fraction.reset();
    } else if (key == "df_fraction") {
        df_fraction = parse_real(key, value);
    } else if (key == "k1") {
        bm25.k1 = parse_real(key, value);
    } else if (key == "b") {
        bm25.b = parse_real(key, value);
    } else if (key == "negative_ratio") {
        negative_ratio = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "max_pairs_per_topic") {
        max_pairs_per_topic = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "reference_positives") {
        reference_positives = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "split_fraction") {
        split_fraction = parse_real(key, value);
    } else if (key == "seed") {
        seed = parse_unsigned<std::uint64_t>(key, value);
    } else if (key == "scorer") {
        auto t = parse_scorer_transport(value);
        if (!t) {
            bad_value(key, value, "baseline, oracle, http or process");
        }
        scorer = *t;
    } else if (key == "scorer_address") {
        scorer_address = std::string(value);
    } else if (key == "scorer_path") {
        scorer_path = std::string(value);
    } else if (key == "batch_size") {
        batch_size = parse_unsigned<std::size_t>(key, value);
    } else if (key == "max_in_flight") {
        max_in_flight = parse_unsigned<std::size_t>(key, value);
    } else if (key == "retries") {
        retries = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "retry_backoff_ms") {
        retry_backoff_ms = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "max_query_tokens") {
        max_query_tokens = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "max_sequence_tokens") {
        max_sequence_tokens = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "learning_rate") {
        learning_rate = parse_real(key, value);
    } else if (key == "epochs") {
        epochs = parse_unsigned<std::uint32_t>(key, value);
    } else if (key == "threads") {
        threads = parse_unsigned<std::size_t>(key, value);
    } else if (key == "run_tag") {
        run_tag = std::string(value);
    } else {
        throw ConfigError("unknown config key \"" + std::string(key) + "\"");
    }
}

std::string PipelineConfig::get(std::string_view key) const
{
    if (key == "n_candidates") return std::to_string(n_candidates);
    if (key == "m_visits") return std::to_string(m_visits);
    if (key == "df_threshold") return std::to_string(df_threshold);
    if (key == "df_fraction") return df_fraction ? format_real(*df_fraction) : "";
    if (key == "k1") return format_real(bm25.k1);
    if (key == "b") return format_real(bm25.b);
    if (key == "negative_ratio") return std::to_string(negative_ratio);
    if (key == "max_pairs_per_topic") return std::to_string(max_pairs_per_topic);
    if (key == "reference_positives") return std::to_string(reference_positives);
    if (key == "split_fraction") return format_real(split_fraction);
    if (key == "seed") return std::to_string(seed);
    if (key == "scorer") return std::string(to_string(scorer));
    if (key == "scorer_address") return scorer_address;
    if (key == "scorer_path") return scorer_path;
    if (key == "batch_size") return std::to_string(batch_size);
    if (key == "max_in_flight") return std::to_string(max_in_flight);
    if (key == "retries") return std::to_string(retries);
    if (key == "retry_backoff_ms") return std::to_string(retry_backoff_ms);
    if (key == "max_query_tokens") return std::to_string(max_query_tokens);
    if (key == "max_sequence_tokens") return std::to_string(max_sequence_tokens);
    if (key == "learning_rate") return format_real(learning_rate);
    if (key == "epochs") return std::to_string(epochs);
    if (key == "threads") return std::to_string(threads);
    if (key == "run_tag") return run_tag;
    throw ConfigError("unknown config key \"" + std::string(key) + "\"");
}

void PipelineConfig::load(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(view.substr(0, eq));
        set(key, view.substr(eq + 1));
    }
}

void PipelineConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    load(in);
}

void PipelineConfig::validate() const
{
    require(n_candidates >= 1, "n_candidates", ">= 1");
    require(m_visits >= 1, "m_visits", ">= 1");
    if (df_fraction) {
        require(*df_fraction > 0.0 && *df_fraction <= 1.0, "df_fraction", "in (0, 1]");
    }
    require(bm25.k1 >= 0.0, "k1", ">= 0");
    require(bm25.b >= 0.0 && bm25.b <= 1.0, "b", "in [0, 1]");
    require(negative_ratio >= 1, "negative_ratio", ">= 1");
    require(max_pairs_per_topic >= 1, "max_pairs_per_topic", ">= 1");
    require(reference_positives >= 1, "reference_positives", ">= 1");
    require(split_fraction > 0.0 && split_fraction < 1.0, "split_fraction", "in (0, 1)");
    require(batch_size >= 1, "batch_size", ">= 1");
    require(max_in_flight >= 1, "max_in_flight", ">= 1");
    require(retries >= 1, "retries", ">= 1");
    require(max_query_tokens >= 1 && max_query_tokens < max_sequence_tokens, "max_query_tokens",
            ">= 1 and below max_sequence_tokens");
    require(learning_rate > 0.0, "learning_rate", "> 0");
    require(epochs >= 1, "epochs", ">= 1");
    require(!run_tag.empty() && run_tag.find_first_of(" \t\r\n") == std::string::npos, "run_tag",
            "a non-empty token without whitespace");
    if (scorer == ScorerTransport::Http || scorer == ScorerTransport::Process) {
        require(!scorer_address.empty(), "scorer_address", "set for the http and process scorers");
    }
}

std::uint64_t PipelineConfig::resolve_df_threshold(std::size_t report_count) const
{
    if (!df_fraction) {
        return df_threshold;
    }
    return static_cast<std::uint64_t>(std::floor(*df_fraction * static_cast<double>(report_count)));
}

SamplingPolicy PipelineConfig::sampling() const
{
    return SamplingPolicy{negative_ratio, max_pairs_per_topic, reference_positives, seed};
}

ScoringOptions PipelineConfig::scoring() const
{
    ScoringOptions options;
    options.batch_size = batch_size;
    options.max_in_flight = max_in_flight;
    options.retry.attempts = retries;
    options.retry.initial_backoff = std::chrono::milliseconds(retry_backoff_ms);
    return options;
}

ScorerEndpoint PipelineConfig::endpoint() const
{
    return ScorerEndpoint{scorer, scorer_address, scorer_path, batch_size};
}

std::size_t PipelineConfig::thread_count() const
{
    if (threads > 0) {
        return threads;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace cohort
