#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cohort/error.hpp"
#include "cohort/summarizer.hpp"
#include "cohort/synth_corpus.hpp"

using namespace cohort;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("cohort_synth_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    return dir;
}

ConceptLexicon lexicon_of(const SyntheticCorpus& corpus)
{
    ConceptLexicon lexicon;
    for (std::size_t i = 0; i < corpus.lexicon.size(); ++i) {
        lexicon.add(corpus.lexicon[i].name, {"C" + std::to_string(i + 1), corpus.lexicon[i].name});
    }
    return lexicon;
}

// Preferred names of the concepts mentioned positively anywhere in a report.
std::set<std::string> positives(const Report& report, const ConceptLexicon& lexicon)
{
    auto sentences = split_sentences(report.text);
    auto mentions = assign_polarity(extract_concepts(report.text, sentences, lexicon),
                                    detect_negated_sentences(sentences, NegationTriggers::defaults()));
    std::set<std::string> out;
    for (const auto& m : mentions) {
        if (m.polarity == Polarity::Positive) {
            out.insert(m.preferred_name);
        }
    }
    return out;
}

std::vector<std::string> targets_of(const Topic& topic)
{
    // "Patients with a, b and c."
    auto text = topic.description.substr(std::string("Patients with ").size());
    text.pop_back();
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = text.find(", ", pos);
        auto and_ = text.find(" and ", pos);
        auto cut = std::min(comma, and_);
        if (cut == std::string::npos) {
            out.push_back(text.substr(pos));
            return out;
        }
        out.push_back(text.substr(pos, cut - pos));
        pos = cut + (cut == comma ? 2 : 5);
    }
}

}  // namespace

TEST(SynthCorpus, SameSeedSameBytes)
{
    GeneratorConfig config;
    config.seed = 11;
    auto a = scratch("a");
    auto b = scratch("b");
    generate(config).write(a);
    generate(config).write(b);
    for (const char* file : {"corpus.jsonl", "topics.jsonl", "qrels.txt", "lexicon.tsv"}) {
        EXPECT_FALSE(slurp(a / file).empty()) << file;
        EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
    }
    config.seed = 12;
    auto c = scratch("c");
    generate(config).write(c);
    EXPECT_NE(slurp(a / "corpus.jsonl"), slurp(c / "corpus.jsonl"));
    for (const auto& dir : {a, b, c}) {
        fs::remove_all(dir);
    }
}

TEST(SynthCorpus, WrittenFilesParseBack)
{
    auto corpus = generate({});
    auto dir = scratch("parse");
    corpus.write(dir);
    std::ifstream reports(dir / "corpus.jsonl");
    EXPECT_EQ(parse_corpus(reports).size(), corpus.reports.size());
    std::ifstream topics(dir / "topics.jsonl");
    EXPECT_EQ(parse_topics(topics), corpus.topics);
    std::ifstream qrels(dir / "qrels.txt");
    EXPECT_EQ(parse_qrels(qrels), corpus.qrels);
    std::ifstream lexicon(dir / "lexicon.tsv");
    EXPECT_EQ(ConceptLexicon::parse(lexicon).size(), corpus.lexicon.size());
    fs::remove_all(dir);
}

TEST(SynthCorpus, ShapeFollowsTheConfig)
{
    GeneratorConfig config;
    config.seed = 3;
    config.n_visits = 120;
    config.n_topics = 6;
    auto corpus = generate(config);
    Corpus indexed(corpus.reports);
    EXPECT_EQ(indexed.visits().size(), 120U);
    for (const auto& visit : indexed.visits()) {
        EXPECT_GE(visit.report_ids.size(), 2U);
        EXPECT_LE(visit.report_ids.size(), 4U);
    }
    ASSERT_EQ(corpus.topics.size(), 6U);
    std::set<std::string> planted;
    for (const auto& topic : corpus.topics) {
        std::size_t relevant = 0;
        for (const auto& [visit, grade] : corpus.qrels.topic(topic.topic_id)) {
            EXPECT_NE(indexed.find_visit(visit), nullptr) << visit;
            if (grade == 2) {
                ++relevant;
                EXPECT_TRUE(planted.insert(visit).second) << visit << " planted for two topics";
            }
        }
        EXPECT_GE(relevant, 4U);
        EXPECT_LE(relevant, 10U);
        EXPECT_EQ(targets_of(topic).size(), 2U);
    }
}

TEST(SynthCorpus, PlantedVisitsCarryEveryTargetAndOthersDoNot)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GeneratorConfig config;
        config.seed = seed;
        config.negation_rate = 0.5;
        auto corpus = generate(config);
        auto lexicon = lexicon_of(corpus);
        std::map<std::string, std::vector<std::set<std::string>>> by_visit;
        for (const auto& r : corpus.reports) {
            by_visit[r.visit_id].push_back(positives(r, lexicon));
        }
        for (const auto& topic : corpus.topics) {
            auto targets = targets_of(topic);
            for (const auto& [visit, reports] : by_visit) {
                bool carries = false;
                for (const auto& pos : reports) {
                    bool all = true;
                    for (const auto& t : targets) {
                        all = all && pos.contains(t);
                    }
                    carries = carries || all;
                }
                bool planted = corpus.qrels.grade(topic.topic_id, visit) == 2;
                EXPECT_EQ(carries, planted) << topic.topic_id << " " << visit;
            }
        }
    }
}

TEST(SynthCorpus, NoNegationAtRateZero)
{
    GeneratorConfig config;
    config.negation_rate = 0.0;
    auto corpus = generate(config);
    for (const auto& r : corpus.reports) {
        EXPECT_TRUE(detect_negated_sentences(split_sentences(r.text), NegationTriggers::defaults()).empty())
            << r.text;
    }
    for (const auto& topic : corpus.topics) {
        for (const auto& [visit, grade] : corpus.qrels.topic(topic.topic_id)) {
            EXPECT_NE(grade, 1) << "near misses only come from negation";
        }
    }
}

TEST(SynthCorpus, VocabularyTermsAreDistinctAfterAnalysis)
{
    Analyzer analyzer;
    std::set<std::string> reserved;
    for (const char* text : {"The patient has is noted. He has no. There is no evidence of. Negative for. "
                             "The patient denies. Examination of the is normal. Unremarkable study. "
                             "Patients with and"}) {
        for (const auto& t : analyzer.terms(text)) {
            reserved.insert(t);
        }
    }
    for (auto type : kAllReportTypes) {
        for (const auto& t : analyzer.terms(report_type_concept(type))) {
            reserved.insert(t);
        }
    }
    std::set<std::string> seen;
    for (const auto& c : default_synth_vocabulary()) {
        auto terms = analyzer.terms(c.name);
        ASSERT_FALSE(terms.empty()) << c.name;
        if (c.frequency_class == ConceptClass::Discriminative) {
            for (const auto& t : terms) {
                EXPECT_TRUE(seen.insert(t).second) << c.name << " shares the term " << t;
                EXPECT_FALSE(reserved.contains(t)) << c.name << " collides with template text";
            }
        }
    }
}

TEST(SynthCorpus, InfeasibleConfigsAreRejected)
{
    auto expect_config_error = [](auto mutate) {
        GeneratorConfig config;
        mutate(config);
        EXPECT_THROW((void)generate(config), ConfigError);
    };
    expect_config_error([](GeneratorConfig& c) { c.n_topics = 40; });
    expect_config_error([](GeneratorConfig& c) { c.n_visits = 50; });
    expect_config_error([](GeneratorConfig& c) { c.reports_per_visit = {3, 2}; });
    expect_config_error([](GeneratorConfig& c) { c.reports_per_visit = {0, 2}; });
    expect_config_error([](GeneratorConfig& c) { c.negation_rate = 1.5; });
    expect_config_error([](GeneratorConfig& c) { c.relevance_signal_strength = -0.1; });
    expect_config_error([](GeneratorConfig& c) { c.relevant_per_topic = {0, 3}; });
    expect_config_error([](GeneratorConfig& c) { c.vocab.push_back(c.vocab.front()); });
    expect_config_error([](GeneratorConfig& c) {
        c.n_visits = 12;
        c.n_topics = 1;
        c.relevant_per_topic = {4, 10};
        c.judged_nonrelevant_per_topic = 5;
    });
}
