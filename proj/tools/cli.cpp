#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "CLI11.hpp"
#include "cohort/bm25_index.hpp"
#include "cohort/corpus.hpp"
#include "cohort/error.hpp"
#include "cohort/metrics.hpp"
#include "cohort/pipeline_config.hpp"
#include "cohort/rerank.hpp"
#include "cohort/scorer.hpp"
#include "cohort/summarizer.hpp"
#include "cohort/synth_corpus.hpp"
#include "cohort/visit_aggregation.hpp"
#include "json.hpp"

namespace cohort::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path, std::string_view flag)
{
    if (!fs::is_regular_file(path)) {
        throw UsageError(std::string(flag) + ": missing input file " + path);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError(std::string(flag) + ": cannot read " + path);
    }
    return in;
}

// "-" writes to the console stream.
void write_output(const std::string& path, std::ostream& console, const std::function<void(std::ostream&)>& fn)
{
    if (path == "-") {
        fn(console);
        return;
    }
    auto parent = fs::path(path).parent_path();
    if (!parent.empty()) {
        fs::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    fn(out);
    out.flush();
    if (!out) {
        throw DataError("error writing " + path);
    }
}

const std::map<std::string_view, std::string_view>& key_help()
{
    static const std::map<std::string_view, std::string_view> help = {
        {"n_candidates", "BM25 candidates retrieved per topic"},
        {"m_visits", "visits kept per topic after aggregation"},
        {"df_threshold", "keep concepts found in at most this many reports"},
        {"df_fraction", "DF threshold as a fraction of the report count; overrides df_threshold"},
        {"k1", "BM25 term frequency saturation"},
        {"b", "BM25 length normalization"},
        {"negative_ratio", "negatives sampled per kept positive"},
        {"max_pairs_per_topic", "training pairs per topic, at most"},
        {"reference_positives", "positives kept per topic, at most"},
        {"split_fraction", "share of topics used for training with --split"},
        {"seed", "random seed"},
        {"scorer", "baseline, oracle, http or process"},
        {"scorer_address", "base URL (http) or command line (process)"},
        {"scorer_path", "HTTP path of the scoring endpoint"},
        {"batch_size", "pairs per scorer request; also the fine-tuning batch size"},
        {"max_in_flight", "concurrent scorer requests"},
        {"retries", "attempts per scorer request"},
        {"retry_backoff_ms", "first retry delay, doubled per attempt"},
        {"max_query_tokens", "fine-tuning query length, passed through"},
        {"max_sequence_tokens", "fine-tuning sequence length, passed through"},
        {"learning_rate", "fine-tuning learning rate, passed through"},
        {"epochs", "fine-tuning epochs, passed through"},
        {"threads", "worker threads, 0 for all cores"},
        {"run_tag", "tag written in the last run file column"},
    };
    return help;
}

std::string flag_name(std::string_view key)
{
    std::string name(key);
    std::replace(name.begin(), name.end(), '_', '-');
    if (key == "n_candidates") {
        return "--n,--" + name;
    }
    if (key == "m_visits") {
        return "--m,--" + name;
    }
    return "--" + name;
}

// Config file first, then any flag given on the command line.
class ConfigFlags {
  public:
    ConfigFlags(CLI::App* app, std::initializer_list<std::string_view> keys)
    {
        app->add_option("--config", m_path, "flat key = value config file; flags override it");
        PipelineConfig defaults;
        for (auto key : keys) {
            auto& value = m_values[std::string(key)];
            std::string help(key_help().at(key));
            auto shown = defaults.get(key);
            help += " (" + std::string(key) + ", default " + (shown.empty() ? "unset" : shown) + ")";
            m_options[std::string(key)] = app->add_option(flag_name(key), value, help);
        }
    }

    [[nodiscard]] PipelineConfig resolve() const
    {
        PipelineConfig config;
        if (!m_path.empty()) {
            auto in = open_input(m_path, "--config");
            config.load(in);
        }
        for (const auto& [key, option] : m_options) {
            if (option->count() > 0) {
                config.set(key, m_values.at(key));
            }
        }
        config.validate();
        return config;
    }

  private:
    std::string m_path;
    std::map<std::string, std::string> m_values;
    std::map<std::string, CLI::Option*> m_options;
};

Analyzer make_analyzer(const std::string& stopwords)
{
    if (stopwords.empty()) {
        return Analyzer{};
    }
    auto in = open_input(stopwords, "--stopwords");
    return Analyzer{read_word_list(in)};
}

Corpus load_corpus(const std::string& path)
{
    auto in = open_input(path, "--corpus");
    return parse_corpus(in);
}

std::vector<Topic> load_topics(const std::string& path)
{
    auto in = open_input(path, "--topics");
    return parse_topics(in);
}

JudgmentSet load_qrels(const std::string& path)
{
    auto in = open_input(path, "--qrels");
    return parse_qrels(in);
}

Run load_run(const std::string& path, std::string_view flag, RankLevel level)
{
    auto in = open_input(path, flag);
    return parse_run(in, level);
}

ConceptLexicon load_lexicon(const std::string& path)
{
    auto in = open_input(path, "--lexicon");
    return ConceptLexicon::parse(in);
}

std::vector<ReportSummary> load_summaries(const std::string& path)
{
    auto in = open_input(path, "--summaries");
    return parse_summaries(in);
}

InvertedIndex load_index(const std::string& path)
{
    auto in = open_input(path, "--index");
    return InvertedIndex::load(in);
}

Run search(const InvertedIndex& index, std::span<const Topic> topics, const Analyzer& analyzer,
           const PipelineConfig& config, const std::string& tag)
{
    Run run;
    for (const auto& topic : topics) {
        auto terms = build_or_query(topic, analyzer);
        run.push_back(retrieve_top_n(index, config.bm25, terms, config.n_candidates, topic.topic_id, tag));
    }
    return run;
}

std::vector<ReportSummary> summarize(const Corpus& corpus, const ConceptLexicon& lexicon, const ConceptDf& df,
                                     const PipelineConfig& config)
{
    SummarizerOptions options;
    options.df_threshold = config.resolve_df_threshold(corpus.size());
    return summarize_reports(corpus.reports(), lexicon, df, options, static_cast<unsigned>(config.thread_count()));
}

Run map_visits(const Run& reports, const Corpus& corpus, std::size_t m_visits)
{
    VisitMap visits(corpus);
    Run out;
    for (const auto& list : reports) {
        out.push_back(map_to_visits(list, visits, m_visits));
    }
    return out;
}

std::vector<ScoredPair> candidate_pairs(const Run& candidates, std::span<const Topic> topics,
                                        std::span<const ReportSummary> summaries)
{
    std::unordered_map<std::string_view, const Topic*> topic_of;
    for (const auto& t : topics) {
        topic_of.emplace(t.topic_id, &t);
    }
    std::unordered_map<std::string_view, const ReportSummary*> summary_of;
    for (const auto& s : summaries) {
        summary_of.emplace(s.report_id, &s);
    }
    std::vector<ScoredPair> pairs;
    for (const auto& list : candidates) {
        auto t = topic_of.find(list.topic_id);
        if (t == topic_of.end()) {
            throw DataError("candidate topic " + list.topic_id + " is not in the topics file");
        }
        for (const auto& item : list.items) {
            auto s = summary_of.find(item.id);
            if (s == summary_of.end()) {
                throw DataError("no summary for candidate report " + item.id);
            }
            pairs.push_back(build_pair(*t->second, *s->second));
        }
    }
    return pairs;
}

std::unique_ptr<Scorer> make_oracle(std::span<const ScoredPair> pairs, const JudgmentSet& qrels, const Corpus& corpus)
{
    auto labels = propagate_labels(qrels, corpus);
    std::unordered_map<std::string, double> scores;
    for (const auto& p : pairs) {
        scores[p.id()] = labels(p.topic_id, p.report_id) == Relevance::Relevant ? 1.0 : 0.0;
    }
    return std::make_unique<OracleScorer>(std::move(scores));
}

Run rerank_candidates(const Run& candidates, std::vector<ScoredPair> pairs, Scorer& scorer,
                      const PipelineConfig& config, const std::string& tag)
{
    score_pairs(pairs, scorer, config.scoring());
    Run out;
    std::size_t offset = 0;
    for (const auto& list : candidates) {
        std::span<const ScoredPair> slice(pairs.data() + offset, list.items.size());
        out.push_back(rerank(list, slice, tag));
        offset += list.items.size();
    }
    return out;
}

std::unique_ptr<Scorer> make_configured_scorer(const PipelineConfig& config, std::span<const ScoredPair> pairs,
                                               const JudgmentSet* qrels, const Corpus* corpus)
{
    if (config.scorer == ScorerTransport::Oracle) {
        if (qrels == nullptr || corpus == nullptr) {
            throw UsageError("scorer=oracle needs --qrels and --corpus");
        }
        return make_oracle(pairs, *qrels, *corpus);
    }
    return make_scorer(config.endpoint());
}

void print_eval(const EvalReport& report, std::ostream& out, std::string_view title)
{
    if (!title.empty()) {
        out << "== " << title << " ==\n";
    }
    write_eval_table(report, out);
}

std::vector<std::size_t> default_ks()
{
    return {10, 1000};
}

std::string path_in(const fs::path& dir, const char* name)
{
    return (dir / name).string();
}

std::vector<const char*> c_args(const std::vector<std::string>& args)
{
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return argv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Patient cohort retrieval: BM25 candidates, concept summaries, re-ranking and evaluation", "cohort"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    // index
    auto* index_cmd = app.add_subcommand("index", "Build a BM25 index over a corpus");
    std::string index_corpus;
    std::string index_out;
    std::string index_stopwords;
    index_cmd->add_option("--corpus", index_corpus, "corpus JSONL")->required();
    index_cmd->add_option("--out", index_out, "index file to write")->required();
    index_cmd->add_option("--stopwords", index_stopwords, "stopword list, one per line (default: built-in 33 words)");
    ConfigFlags index_flags(index_cmd, {"threads"});

    // search
    auto* search_cmd = app.add_subcommand("search", "Retrieve the top-n reports per topic");
    std::string search_index;
    std::string search_topics;
    std::string search_out = "-";
    std::string search_stopwords;
    search_cmd->add_option("--index", search_index, "index file")->required();
    search_cmd->add_option("--topics", search_topics, "topics JSONL")->required();
    search_cmd->add_option("--out", search_out, "report-level run file (default: stdout)");
    search_cmd->add_option("--stopwords", search_stopwords, "stopword list; must match the index");
    ConfigFlags search_flags(search_cmd, {"n_candidates", "k1", "b", "run_tag"});

    // summarize
    auto* summarize_cmd = app.add_subcommand("summarize", "Summarize reports as DF-filtered positive concepts");
    std::string sum_corpus;
    std::string sum_lexicon;
    std::string sum_out = "-";
    std::string sum_df_in;
    std::string sum_df_out;
    summarize_cmd->add_option("--corpus", sum_corpus, "corpus JSONL")->required();
    summarize_cmd->add_option("--lexicon", sum_lexicon, "concept lexicon TSV")->required();
    summarize_cmd->add_option("--out", sum_out, "summaries JSONL (default: stdout)");
    summarize_cmd->add_option("--df", sum_df_in, "precomputed concept DF table (default: computed from the corpus)");
    summarize_cmd->add_option("--df-out", sum_df_out, "write the concept DF table here");
    ConfigFlags summarize_flags(summarize_cmd, {"df_threshold", "df_fraction", "threads"});

    // make-pairs
    auto* pairs_cmd = app.add_subcommand("make-pairs", "Export class-balanced training pairs");
    std::string pairs_candidates;
    std::string pairs_qrels;
    std::string pairs_corpus;
    std::string pairs_topics;
    std::string pairs_summaries;
    std::string pairs_out;
    bool pairs_split = false;
    pairs_cmd->add_option("--candidates", pairs_candidates, "report-level BM25 run")->required();
    pairs_cmd->add_option("--qrels", pairs_qrels, "visit-level qrels")->required();
    pairs_cmd->add_option("--corpus", pairs_corpus, "corpus JSONL")->required();
    pairs_cmd->add_option("--topics", pairs_topics, "topics JSONL")->required();
    pairs_cmd->add_option("--summaries", pairs_summaries, "summaries JSONL")->required();
    pairs_cmd->add_option("--out", pairs_out, "training pairs JSONL; <out>.finetune.json is written alongside")
        ->required();
    pairs_cmd->add_flag("--split", pairs_split,
                        "export training topics only and write the topic split to <out>.split.tsv");
    ConfigFlags pairs_flags(pairs_cmd, {"negative_ratio", "max_pairs_per_topic", "reference_positives",
                                        "split_fraction", "seed", "max_query_tokens", "max_sequence_tokens",
                                        "learning_rate", "epochs", "batch_size"});

    // rerank
    auto* rerank_cmd = app.add_subcommand("rerank", "Re-rank candidates with a relevance scorer");
    std::string rr_candidates;
    std::string rr_topics;
    std::string rr_summaries;
    std::string rr_out = "-";
    std::string rr_qrels;
    std::string rr_corpus;
    rerank_cmd->add_option("--candidates", rr_candidates, "report-level BM25 run")->required();
    rerank_cmd->add_option("--topics", rr_topics, "topics JSONL")->required();
    rerank_cmd->add_option("--summaries", rr_summaries, "summaries JSONL")->required();
    rerank_cmd->add_option("--out", rr_out, "re-ranked report-level run (default: stdout)");
    rerank_cmd->add_option("--qrels", rr_qrels, "qrels, for scorer=oracle");
    rerank_cmd->add_option("--corpus", rr_corpus, "corpus JSONL, for scorer=oracle");
    ConfigFlags rerank_flags(rerank_cmd, {"scorer", "scorer_address", "scorer_path", "batch_size", "max_in_flight",
                                          "retries", "retry_backoff_ms", "run_tag"});

    // map-visits
    auto* map_cmd = app.add_subcommand("map-visits", "Turn a report ranking into a visit ranking");
    std::string map_run;
    std::string map_corpus;
    std::string map_out = "-";
    map_cmd->add_option("--run", map_run, "report-level run")->required();
    map_cmd->add_option("--corpus", map_corpus, "corpus JSONL")->required();
    map_cmd->add_option("--out", map_out, "visit-level run (default: stdout)");
    ConfigFlags map_flags(map_cmd, {"m_visits"});

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a visit-level run against qrels");
    std::string eval_run;
    std::string eval_qrels;
    std::string eval_json;
    std::vector<std::size_t> eval_ks = default_ks();
    eval_cmd->add_option("--run", eval_run, "visit-level run")->required();
    eval_cmd->add_option("--qrels", eval_qrels, "qrels")->required();
    eval_cmd->add_option("--json", eval_json, "also write per-topic JSON lines here");
    eval_cmd->add_option("--k", eval_ks, "precision cutoffs (default: 10 1000)")->check(CLI::PositiveNumber);

    // gen-corpus
    auto* gen_cmd = app.add_subcommand("gen-corpus", "Generate a synthetic corpus with planted relevance");
    GeneratorConfig gen;
    std::string gen_out;
    gen_cmd->add_option("--out", gen_out, "output directory")->required();
    gen_cmd->add_option("--seed", gen.seed, "random seed")->capture_default_str();
    gen_cmd->add_option("--visits", gen.n_visits, "number of visits")->capture_default_str();
    gen_cmd->add_option("--min-reports", gen.reports_per_visit.min, "fewest reports per visit")->capture_default_str();
    gen_cmd->add_option("--max-reports", gen.reports_per_visit.max, "most reports per visit")->capture_default_str();
    gen_cmd->add_option("--topics", gen.n_topics, "number of topics")->capture_default_str();
    gen_cmd->add_option("--concepts-per-topic", gen.concepts_per_topic, "target concepts per topic")
        ->capture_default_str();
    gen_cmd->add_option("--min-relevant", gen.relevant_per_topic.min, "fewest planted visits per topic")
        ->capture_default_str();
    gen_cmd->add_option("--max-relevant", gen.relevant_per_topic.max, "most planted visits per topic")
        ->capture_default_str();
    gen_cmd->add_option("--judged-nonrelevant", gen.judged_nonrelevant_per_topic,
                        "extra visits judged 0 per topic")
        ->capture_default_str();
    gen_cmd->add_option("--signal", gen.relevance_signal_strength,
                        "chance a planted visit asserts each target concept")
        ->capture_default_str();
    gen_cmd->add_option("--negation-rate", gen.negation_rate, "near-miss share and background negation rate")
        ->capture_default_str();
    gen_cmd->add_option("--common-rate", gen.common_rate, "chance a report mentions each common concept")
        ->capture_default_str();

    // run-all
    auto* all_cmd = app.add_subcommand("run-all", "index, search, summarize, rerank, map-visits and eval in one go");
    std::string all_corpus;
    std::string all_topics;
    std::string all_qrels;
    std::string all_lexicon;
    std::string all_work;
    std::string all_stopwords;
    std::vector<std::size_t> all_ks = default_ks();
    all_cmd->add_option("--corpus", all_corpus, "corpus JSONL")->required();
    all_cmd->add_option("--topics", all_topics, "topics JSONL")->required();
    all_cmd->add_option("--qrels", all_qrels, "qrels")->required();
    all_cmd->add_option("--lexicon", all_lexicon, "concept lexicon TSV")->required();
    all_cmd->add_option("--work", all_work, "directory for intermediate and output files")->required();
    all_cmd->add_option("--stopwords", all_stopwords, "stopword list (default: built-in 33 words)");
    all_cmd->add_option("--k", all_ks, "precision cutoffs (default: 10 1000)")->check(CLI::PositiveNumber);
    ConfigFlags all_flags(all_cmd, {"n_candidates", "m_visits", "df_threshold", "df_fraction", "k1", "b",
                                    "scorer", "scorer_address", "scorer_path", "batch_size", "max_in_flight",
                                    "retries", "retry_backoff_ms", "threads", "run_tag"});

    try {
        auto argv = c_args(args);
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*index_cmd) {
            auto config = index_flags.resolve();
            auto corpus = load_corpus(index_corpus);
            auto index = InvertedIndex::build(corpus.reports(), make_analyzer(index_stopwords),
                                              static_cast<unsigned>(config.thread_count()));
            write_output(index_out, out, [&](std::ostream& o) { index.save(o); });
        } else if (*search_cmd) {
            auto config = search_flags.resolve();
            auto analyzer = make_analyzer(search_stopwords);
            auto index = load_index(search_index);
            auto topics = load_topics(search_topics);
            auto run = search(index, topics, analyzer, config, config.run_tag);
            write_output(search_out, out, [&](std::ostream& o) { write_run(run, o); });
        } else if (*summarize_cmd) {
            auto config = summarize_flags.resolve();
            auto corpus = load_corpus(sum_corpus);
            auto lexicon = load_lexicon(sum_lexicon);
            ConceptDf df;
            if (sum_df_in.empty()) {
                df = compute_concept_df(corpus.reports(), lexicon, {}, static_cast<unsigned>(config.thread_count()));
            } else {
                auto in = open_input(sum_df_in, "--df");
                df = ConceptDf::parse(in);
            }
            if (!sum_df_out.empty()) {
                write_output(sum_df_out, out, [&](std::ostream& o) { df.save(o); });
            }
            auto summaries = summarize(corpus, lexicon, df, config);
            write_output(sum_out, out, [&](std::ostream& o) { write_summaries(summaries, o); });
        } else if (*pairs_cmd) {
            auto config = pairs_flags.resolve();
            auto candidates = load_run(pairs_candidates, "--candidates", RankLevel::Report);
            auto qrels = load_qrels(pairs_qrels);
            auto corpus = load_corpus(pairs_corpus);
            auto topics = load_topics(pairs_topics);
            auto summaries = load_summaries(pairs_summaries);
            if (pairs_split) {
                auto split = split_topics(topics, config.split_fraction, config.seed);
                std::set<std::string> train;
                for (const auto& t : split.train) {
                    train.insert(t.topic_id);
                }
                std::erase_if(candidates, [&](const RankedList& l) { return !train.contains(l.topic_id); });
                write_output(pairs_out + ".split.tsv", out, [&](std::ostream& o) {
                    for (const auto& t : split.train) {
                        o << t.topic_id << "\ttrain\n";
                    }
                    for (const auto& t : split.test) {
                        o << t.topic_id << "\ttest\n";
                    }
                });
            }
            auto labels = propagate_labels(qrels, corpus);
            auto sampled = sample_training_pairs(candidates, labels, config.sampling());
            for (const auto& w : sampled.warnings) {
                err << "warning: " << w << '\n';
            }
            auto pairs = make_training_pairs(sampled.samples, topics, summaries);
            write_output(pairs_out, out, [&](std::ostream& o) { write_training_pairs(pairs, o); });

            std::size_t positives = 0;
            for (const auto& p : pairs) {
                positives += p.label == Relevance::Relevant ? 1 : 0;
            }
            nlohmann::ordered_json sidecar;
            sidecar["pairs_file"] = fs::path(pairs_out).filename().string();
            sidecar["pairs"] = pairs.size();
            sidecar["positives"] = positives;
            sidecar["negatives"] = pairs.size() - positives;
            sidecar["max_query_tokens"] = config.max_query_tokens;
            sidecar["max_sequence_tokens"] = config.max_sequence_tokens;
            sidecar["learning_rate"] = config.learning_rate;
            sidecar["epochs"] = config.epochs;
            sidecar["batch_size"] = config.batch_size;
            sidecar["seed"] = config.seed;
            write_output(pairs_out + ".finetune.json", out, [&](std::ostream& o) { o << sidecar.dump(2) << '\n'; });
        } else if (*rerank_cmd) {
            auto config = rerank_flags.resolve();
            auto candidates = load_run(rr_candidates, "--candidates", RankLevel::Report);
            auto topics = load_topics(rr_topics);
            auto summaries = load_summaries(rr_summaries);
            std::optional<JudgmentSet> qrels;
            std::optional<Corpus> corpus;
            if (!rr_qrels.empty()) {
                qrels = load_qrels(rr_qrels);
            }
            if (!rr_corpus.empty()) {
                corpus = load_corpus(rr_corpus);
            }
            auto pairs = candidate_pairs(candidates, topics, summaries);
            auto scorer = make_configured_scorer(config, pairs, qrels ? &*qrels : nullptr, corpus ? &*corpus : nullptr);
            auto run = rerank_candidates(candidates, std::move(pairs), *scorer, config, config.run_tag);
            write_output(rr_out, out, [&](std::ostream& o) { write_run(run, o); });
        } else if (*map_cmd) {
            auto config = map_flags.resolve();
            auto reports = load_run(map_run, "--run", RankLevel::Report);
            auto corpus = load_corpus(map_corpus);
            auto visits = map_visits(reports, corpus, config.m_visits);
            write_output(map_out, out, [&](std::ostream& o) { write_run(visits, o); });
        } else if (*eval_cmd) {
            auto run = load_run(eval_run, "--run", RankLevel::Visit);
            auto qrels = load_qrels(eval_qrels);
            auto report = evaluate_run(run, qrels, eval_ks);
            print_eval(report, out, "");
            if (!eval_json.empty()) {
                write_output(eval_json, out, [&](std::ostream& o) { write_eval_json(report, o); });
            }
        } else if (*gen_cmd) {
            generate(gen).write(gen_out);
        } else if (*all_cmd) {
            auto config = all_flags.resolve();
            fs::path work(all_work);
            fs::create_directories(work);
            auto analyzer = make_analyzer(all_stopwords);
            auto corpus = load_corpus(all_corpus);
            auto topics = load_topics(all_topics);
            auto qrels = load_qrels(all_qrels);
            auto lexicon = load_lexicon(all_lexicon);
            auto threads = static_cast<unsigned>(config.thread_count());

            auto index = InvertedIndex::build(corpus.reports(), analyzer, threads);
            write_output(path_in(work, "index.bin"), out, [&](std::ostream& o) { index.save(o); });

            auto candidates = search(index, topics, analyzer, config, config.run_tag + "-bm25");
            write_output(path_in(work, "bm25.reports.run"), out, [&](std::ostream& o) { write_run(candidates, o); });

            auto df = compute_concept_df(corpus.reports(), lexicon, {}, threads);
            write_output(path_in(work, "concept_df.tsv"), out, [&](std::ostream& o) { df.save(o); });
            auto summaries = summarize(corpus, lexicon, df, config);
            write_output(path_in(work, "summaries.jsonl"), out,
                         [&](std::ostream& o) { write_summaries(summaries, o); });

            auto pairs = candidate_pairs(candidates, topics, summaries);
            auto scorer = make_configured_scorer(config, pairs, &qrels, &corpus);
            auto reranked = rerank_candidates(candidates, std::move(pairs), *scorer, config, config.run_tag + "-rerank");
            write_output(path_in(work, "rerank.reports.run"), out, [&](std::ostream& o) { write_run(reranked, o); });

            auto bm25_visits = map_visits(candidates, corpus, config.m_visits);
            auto rerank_visits = map_visits(reranked, corpus, config.m_visits);
            write_output(path_in(work, "bm25.visits.run"), out, [&](std::ostream& o) { write_run(bm25_visits, o); });
            write_output(path_in(work, "rerank.visits.run"), out,
                         [&](std::ostream& o) { write_run(rerank_visits, o); });

            auto bm25_eval = evaluate_run(bm25_visits, qrels, all_ks);
            auto rerank_eval = evaluate_run(rerank_visits, qrels, all_ks);
            write_output(path_in(work, "eval.bm25.jsonl"), out, [&](std::ostream& o) { write_eval_json(bm25_eval, o); });
            write_output(path_in(work, "eval.rerank.jsonl"), out,
                         [&](std::ostream& o) { write_eval_json(rerank_eval, o); });
            print_eval(bm25_eval, out, "bm25");
            out << '\n';
            print_eval(rerank_eval, out, "rerank (scorer=" + std::string(to_string(config.scorer)) + ")");
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ScorerTransportError& e) {
        err << "scorer error: " << e.what() << '\n';
        return kScorerError;
    } catch (const ScorerProtocolError& e) {
        err << "scorer error: " << e.what() << '\n';
        return kScorerError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kSuccess;
}

}  // namespace cohort::cli
