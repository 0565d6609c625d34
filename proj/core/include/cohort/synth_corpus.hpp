#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cohort/corpus.hpp"

namespace cohort {

enum class ConceptClass : std::uint8_t { Common, Discriminative };

struct SynthConcept {
    std::string name;  // also the surface term
    ConceptClass frequency_class = ConceptClass::Discriminative;
};

/// Clinical-sounding inventory whose words stem to pairwise distinct terms.
[[nodiscard]] const std::vector<SynthConcept>& default_synth_vocabulary();

struct IntRange {
    int min = 0;
    int max = 0;
};

struct GeneratorConfig {
    std::uint64_t seed = 0;
    int n_visits = 300;
    IntRange reports_per_visit{2, 4};
    int n_topics = 10;
    int concepts_per_topic = 2;
    IntRange relevant_per_topic{4, 10};
    int judged_nonrelevant_per_topic = 5;
    double negation_rate = 0.2;
    double relevance_signal_strength = 1.0;
    double common_rate = 0.6;  // chance a report mentions each common concept
    std::vector<SynthConcept> vocab = default_synth_vocabulary();

    /// Throws ConfigError naming the offending field, also when the inventory
    /// or the visit count cannot satisfy the demanded topics.
    void validate() const;
};

struct SyntheticCorpus {
    std::vector<Report> reports;
    std::vector<Topic> topics;
    JudgmentSet qrels;
    std::vector<SynthConcept> lexicon;  // concept_id is "C" + 1-based index

    /// corpus.jsonl, topics.jsonl, qrels.txt, lexicon.tsv
    void write(const std::filesystem::path& dir) const;
};

/**
 * Each topic gets a disjoint set of discriminative target concepts and a
 * disjoint set of planted visits (grade 2). One report of every planted visit
 * asserts each target with probability relevance_signal_strength.
 * floor(negation_rate * planted) further visits carry the targets only under
 * negation and are judged 1 or 0 with equal odds. Remaining discriminative
 * concepts appear as background in any report, and with probability
 * negation_rate a report also negates one background concept.
 */
[[nodiscard]] SyntheticCorpus generate(const GeneratorConfig& config);

}  // namespace cohort
