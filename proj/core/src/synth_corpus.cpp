#include "cohort/synth_corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "cohort/detail/random.hpp"
#include "cohort/error.hpp"

namespace cohort {

const std::vector<SynthConcept>& default_synth_vocabulary()
{
    using enum ConceptClass;
    static const std::vector<SynthConcept> vocab = {
        {"blood pressure", Common}, {"heart rate", Common}, {"temperature", Common},
        {"lungs", Common},          {"abdomen", Common},    {"skin", Common},
        {"neck", Common},           {"extremities", Common},

        {"pneumonia", Discriminative},       {"hematuria", Discriminative},
        {"cellulitis", Discriminative},      {"pancreatitis", Discriminative},
        {"cholecystitis", Discriminative},   {"appendicitis", Discriminative},
        {"diverticulitis", Discriminative},  {"osteomyelitis", Discriminative},
        {"endocarditis", Discriminative},    {"meningitis", Discriminative},
        {"pyelonephritis", Discriminative},  {"anemia", Discriminative},
        {"hyponatremia", Discriminative},    {"hyperkalemia", Discriminative},
        {"hypothyroidism", Discriminative},  {"cirrhosis", Discriminative},
        {"ascites", Discriminative},         {"jaundice", Discriminative},
        {"melena", Discriminative},          {"hematemesis", Discriminative},
        {"dysphagia", Discriminative},       {"syncope", Discriminative},
        {"vertigo", Discriminative},         {"seizure", Discriminative},
        {"hemiparesis", Discriminative},     {"aphasia", Discriminative},
        {"ataxia", Discriminative},          {"neuropathy", Discriminative},
        {"retinopathy", Discriminative},     {"nephrolithiasis", Discriminative},
        {"hydronephrosis", Discriminative},  {"pneumothorax", Discriminative},
        {"atelectasis", Discriminative},     {"bronchiectasis", Discriminative},
        {"emphysema", Discriminative},       {"sarcoidosis", Discriminative},
        {"thrombocytopenia", Discriminative}, {"leukocytosis", Discriminative},
        {"neutropenia", Discriminative},     {"coagulopathy", Discriminative},
        {"cardiomyopathy", Discriminative},  {"pericarditis", Discriminative},
        {"bradycardia", Discriminative},     {"tachycardia", Discriminative},
        {"aortic stenosis", Discriminative}, {"pulmonary embolism", Discriminative},
        {"atrial fibrillation", Discriminative}, {"urinary retention", Discriminative},
        {"gout", Discriminative},            {"psoriasis", Discriminative},
        {"lymphoma", Discriminative},        {"melanoma", Discriminative},
        {"glaucoma", Discriminative},        {"cataract", Discriminative},
        {"dementia", Discriminative},        {"delirium", Discriminative},
        {"hypoglycemia", Discriminative},    {"ketoacidosis", Discriminative},
    };
    return vocab;
}

void GeneratorConfig::validate() const
{
    auto require = [](bool ok, const char* field, const char* domain) {
        if (!ok) {
            throw ConfigError(std::string(field) + " must be " + domain);
        }
    };
    require(n_visits >= 1, "n_visits", ">= 1");
    require(reports_per_visit.min >= 1 && reports_per_visit.min <= reports_per_visit.max, "reports_per_visit",
            "a non-empty range with min >= 1");
    require(n_topics >= 1, "n_topics", ">= 1");
    require(concepts_per_topic >= 1, "concepts_per_topic", ">= 1");
    require(relevant_per_topic.min >= 1 && relevant_per_topic.min <= relevant_per_topic.max, "relevant_per_topic",
            "a non-empty range with min >= 1");
    require(judged_nonrelevant_per_topic >= 0, "judged_nonrelevant_per_topic", ">= 0");
    require(negation_rate >= 0.0 && negation_rate <= 1.0, "negation_rate", "in [0, 1]");
    require(relevance_signal_strength >= 0.0 && relevance_signal_strength <= 1.0, "relevance_signal_strength",
            "in [0, 1]");
    require(common_rate >= 0.0 && common_rate <= 1.0, "common_rate", "in [0, 1]");

    std::set<std::string> names;
    std::size_t discriminative = 0;
    for (const auto& c : vocab) {
        if (c.name.empty() || !names.insert(c.name).second) {
            throw ConfigError("vocab: concept names must be non-empty and unique");
        }
        discriminative += c.frequency_class == ConceptClass::Discriminative ? 1 : 0;
    }
    auto targets = static_cast<std::size_t>(n_topics) * static_cast<std::size_t>(concepts_per_topic);
    if (targets > discriminative) {
        throw ConfigError("infeasible: " + std::to_string(targets) + " target concepts demanded but the vocabulary has " +
                        std::to_string(discriminative) + " discriminative concepts");
    }
    auto planted = static_cast<long long>(n_topics) * relevant_per_topic.max;
    if (planted > n_visits) {
        throw ConfigError("infeasible: up to " + std::to_string(planted) + " planted-relevant visits demanded but n_visits is " +
                        std::to_string(n_visits));
    }
    auto near_miss = static_cast<long long>(std::floor(negation_rate * relevant_per_topic.max));
    if (relevant_per_topic.max + near_miss + judged_nonrelevant_per_topic > n_visits) {
        throw ConfigError("infeasible: a topic's judged visits exceed n_visits");
    }
}

namespace {

std::string capitalized(std::string s)
{
    if (!s.empty()) {
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    }
    return s;
}

std::string positive_sentence(detail::Rng& rng, const std::string& name)
{
    if (detail::uniform_below(rng, 2) == 0) {
        return "The patient has " + name + ".";
    }
    return capitalized(name) + " is noted.";
}

std::string negated_sentence(detail::Rng& rng, const std::string& name)
{
    switch (detail::uniform_below(rng, 4)) {
        case 0: return "He has no " + name + ".";
        case 1: return "There is no evidence of " + name + ".";
        case 2: return "Negative for " + name + ".";
        default: return "The patient denies " + name + ".";
    }
}

std::string describe(const std::vector<std::string>& names)
{
    std::string out = "Patients with ";
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out += i + 1 == names.size() ? " and " : ", ";
        }
        out += names[i];
    }
    return out + ".";
}

std::string numbered(const char* prefix, std::size_t n, int width)
{
    auto digits = std::to_string(n);
    auto pad = static_cast<std::size_t>(width) > digits.size() ? static_cast<std::size_t>(width) - digits.size() : 0;
    return prefix + std::string(pad, '0') + digits;
}

int digits(std::size_t n)
{
    int d = 1;
    while (n >= 10) {
        n /= 10;
        ++d;
    }
    return d;
}

}  // namespace

SyntheticCorpus generate(const GeneratorConfig& config)
{
    config.validate();
    detail::Rng rng(config.seed);

    std::vector<std::size_t> common;
    std::vector<std::size_t> discriminative;
    for (std::size_t i = 0; i < config.vocab.size(); ++i) {
        (config.vocab[i].frequency_class == ConceptClass::Common ? common : discriminative).push_back(i);
    }
    detail::shuffle(discriminative, rng);

    auto n_topics = static_cast<std::size_t>(config.n_topics);
    auto per_topic = static_cast<std::size_t>(config.concepts_per_topic);
    auto n_visits = static_cast<std::size_t>(config.n_visits);
    std::vector<std::vector<std::size_t>> targets(n_topics);
    for (std::size_t t = 0; t < n_topics; ++t) {
        targets[t].assign(discriminative.begin() + static_cast<std::ptrdiff_t>(t * per_topic),
                          discriminative.begin() + static_cast<std::ptrdiff_t>((t + 1) * per_topic));
    }
    std::vector<std::size_t> background(discriminative.begin() + static_cast<std::ptrdiff_t>(n_topics * per_topic),
                                        discriminative.end());

    // Visit layout.
    std::vector<std::size_t> report_count(n_visits);
    for (auto& n : report_count) {
        n = static_cast<std::size_t>(
            detail::uniform_between(rng, config.reports_per_visit.min, config.reports_per_visit.max));
    }

    // Planted visits are disjoint across topics.
    std::vector<std::size_t> visit_order(n_visits);
    for (std::size_t v = 0; v < n_visits; ++v) {
        visit_order[v] = v;
    }
    detail::shuffle(visit_order, rng);
    std::vector<std::vector<std::size_t>> planted(n_topics);
    std::size_t next = 0;
    for (std::size_t t = 0; t < n_topics; ++t) {
        auto n = static_cast<std::size_t>(
            detail::uniform_between(rng, config.relevant_per_topic.min, config.relevant_per_topic.max));
        planted[t].assign(visit_order.begin() + static_cast<std::ptrdiff_t>(next),
                          visit_order.begin() + static_cast<std::ptrdiff_t>(next + n));
        std::sort(planted[t].begin(), planted[t].end());
        next += n;
    }

    // sentences[v][r] holds the sentences of report r in visit v.
    std::vector<std::vector<std::vector<std::string>>> sentences(n_visits);
    for (std::size_t v = 0; v < n_visits; ++v) {
        sentences[v].resize(report_count[v]);
    }

    JudgmentSet qrels;
    std::vector<Topic> topics;
    auto topic_width = digits(n_topics);
    auto visit_width = digits(n_visits);
    auto visit_id = [&](std::size_t v) { return numbered("V", v + 1, visit_width); };

    for (std::size_t t = 0; t < n_topics; ++t) {
        auto topic_id = numbered("T", t + 1, topic_width);
        std::vector<std::string> names;
        for (auto c : targets[t]) {
            names.push_back(config.vocab[c].name);
        }
        topics.push_back(Topic{topic_id, describe(names)});

        for (auto v : planted[t]) {
            auto carrier = detail::uniform_below(rng, report_count[v]);
            for (const auto& name : names) {
                if (detail::bernoulli(rng, config.relevance_signal_strength)) {
                    sentences[v][carrier].push_back(positive_sentence(rng, name));
                }
            }
            qrels.set(topic_id, visit_id(v), 2);
        }

        std::vector<std::size_t> others;
        for (std::size_t v = 0; v < n_visits; ++v) {
            if (!std::binary_search(planted[t].begin(), planted[t].end(), v)) {
                others.push_back(v);
            }
        }
        auto near_misses = static_cast<std::size_t>(std::floor(config.negation_rate * static_cast<double>(planted[t].size())));
        auto extra = static_cast<std::size_t>(config.judged_nonrelevant_per_topic);
        auto picks = detail::sample_without_replacement(rng, others.size(), near_misses + extra);
        for (std::size_t i = 0; i < picks.size(); ++i) {
            auto v = others[picks[i]];
            if (i < near_misses) {
                auto r = detail::uniform_below(rng, report_count[v]);
                for (const auto& name : names) {
                    sentences[v][r].push_back(negated_sentence(rng, name));
                }
                qrels.set(topic_id, visit_id(v), detail::bernoulli(rng, 0.5) ? 1 : 0);
            } else {
                qrels.set(topic_id, visit_id(v), 0);
            }
        }
    }

    std::size_t total_reports = 0;
    for (auto n : report_count) {
        total_reports += n;
    }
    auto report_width = digits(total_reports);

    SyntheticCorpus out;
    out.reports.reserve(total_reports);
    std::size_t report_no = 0;
    for (std::size_t v = 0; v < n_visits; ++v) {
        for (auto& lines : sentences[v]) {
            for (auto c : common) {
                if (detail::bernoulli(rng, config.common_rate)) {
                    lines.push_back("Examination of the " + config.vocab[c].name + " is normal.");
                }
            }
            if (!background.empty()) {
                auto n = std::min<std::size_t>(background.size(), 1 + detail::uniform_below(rng, 3));
                for (auto pick : detail::sample_without_replacement(rng, background.size(), n)) {
                    lines.push_back(positive_sentence(rng, config.vocab[background[pick]].name));
                }
                if (detail::bernoulli(rng, config.negation_rate)) {
                    auto c = background[detail::uniform_below(rng, background.size())];
                    lines.push_back(negated_sentence(rng, config.vocab[c].name));
                }
            }
            if (lines.empty()) {
                lines.emplace_back("Unremarkable study.");
            }
            detail::shuffle(lines, rng);

            Report report;
            report.report_id = numbered("R", ++report_no, report_width);
            report.visit_id = visit_id(v);
            report.type = kAllReportTypes[detail::uniform_below(rng, kAllReportTypes.size())];
            for (std::size_t i = 0; i < lines.size(); ++i) {
                report.text += (i == 0 ? "" : " ") + lines[i];
            }
            out.reports.push_back(std::move(report));
        }
    }
    out.topics = std::move(topics);
    out.qrels = std::move(qrels);
    out.lexicon = config.vocab;
    return out;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

}  // namespace

void SyntheticCorpus::write(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    {
        auto out = open_output(dir / "corpus.jsonl");
        write_corpus(reports, out);
    }
    {
        auto out = open_output(dir / "topics.jsonl");
        write_topics(topics, out);
    }
    {
        auto out = open_output(dir / "qrels.txt");
        write_qrels(qrels, out);
    }
    auto out = open_output(dir / "lexicon.tsv");
    for (std::size_t i = 0; i < lexicon.size(); ++i) {
        out << lexicon[i].name << '\t' << 'C' << (i + 1) << '\t' << lexicon[i].name << '\n';
    }
}

}  // namespace cohort
