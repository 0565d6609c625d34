#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cohort/bm25_index.hpp"
#include "cohort/rerank.hpp"
#include "cohort/scorer.hpp"

namespace cohort {

[[nodiscard]] std::string_view to_string(ScorerTransport transport) noexcept;
[[nodiscard]] std::optional<ScorerTransport> parse_scorer_transport(std::string_view name) noexcept;

/**
 * Every tunable of the pipeline. Files are flat `key = value` lines with `#`
 * comments; set() and the file loader throw ConfigError naming the key.
 */
struct PipelineConfig {
    std::size_t n_candidates = 2000;
    std::size_t m_visits = 1000;
    std::uint64_t df_threshold = 2500;
    std::optional<double> df_fraction;  // overrides df_threshold as floor(fraction * reports)
    Bm25Params bm25;
    std::uint32_t negative_ratio = 10;
    std::uint32_t max_pairs_per_topic = 1650;
    std::uint32_t reference_positives = 150;
    double split_fraction = 0.8;
    std::uint64_t seed = 0;

    ScorerTransport scorer = ScorerTransport::Baseline;
    std::string scorer_address;
    std::string scorer_path = "/score";
    std::size_t batch_size = 32;
    std::size_t max_in_flight = 1;
    std::uint32_t retries = 3;
    std::uint32_t retry_backoff_ms = 100;

    // Passed through to the fine-tuning sidecar; the engine does not use them.
    std::uint32_t max_query_tokens = 64;
    std::uint32_t max_sequence_tokens = 384;
    double learning_rate = 3e-5;
    std::uint32_t epochs = 2;

    std::size_t threads = 0;  // 0: hardware concurrency
    std::string run_tag = "cohort";

    static const std::vector<std::string_view>& keys();

    void set(std::string_view key, std::string_view value);
    /// The current value of a key in the same textual form set() accepts.
    [[nodiscard]] std::string get(std::string_view key) const;
    void load(std::istream& in);
    void load(const std::filesystem::path& path);
    void validate() const;

    [[nodiscard]] std::uint64_t resolve_df_threshold(std::size_t report_count) const;
    [[nodiscard]] SamplingPolicy sampling() const;
    [[nodiscard]] ScoringOptions scoring() const;
    [[nodiscard]] ScorerEndpoint endpoint() const;
    [[nodiscard]] std::size_t thread_count() const;
};

}  // namespace cohort
