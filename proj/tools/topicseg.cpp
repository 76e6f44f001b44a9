// Command-line front end: build lookup tables, sessionize logs, annotate,
// segment, render, evaluate and serve the assessment API.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "topicseg/annotate.hpp"
#include "topicseg/error.hpp"
#include "topicseg/eval.hpp"
#include "topicseg/pipeline.hpp"
#include "topicseg/segment.hpp"
#include "topicseg/service.hpp"
#include "topicseg/session.hpp"

namespace {

using namespace topicseg;
using nlohmann::json;

struct StopWordFlags {
    std::optional<std::string> en;
    std::optional<std::string> de;

    void add_to(CLI::App* app) {
        app->add_option("--stopwords-en", en, "English stop word list (one word per line)")->check(CLI::ExistingFile);
        app->add_option("--stopwords-de", de, "German stop word list (one word per line)")->check(CLI::ExistingFile);
    }
    text::StopWords load() const {
        auto to_path = [](const std::optional<std::string>& s) -> std::optional<std::filesystem::path> {
            if (s) return std::filesystem::path(*s);
            return std::nullopt;
        };
        return load_stop_words(to_path(en), to_path(de));
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    return out;
}

void write_json_file(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

// gold/predicted files: {"id", "topic_numbers": [...]} or segmented sessions
std::map<std::string, std::vector<std::size_t>> read_numberings(const std::string& path) {
    std::map<std::string, std::vector<std::size_t>> out;
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = json::parse(line);
            std::vector<std::size_t> numbers;
            if (j.contains("topic_numbers")) {
                numbers = j.at("topic_numbers").get<std::vector<std::size_t>>();
            } else {
                for (const auto& a : j.at("actions")) numbers.push_back(a.at("topic_number").get<std::size_t>());
            }
            out[j.at("id").get<std::string>()] = std::move(numbers);
        } catch (const json::exception& e) {
            throw ParseError(path, n, e.what());
        }
    }
    return out;
}

void print_metrics(const std::string& name, const SegmentationMetrics& m, std::size_t sessions) {
    std::cout << std::fixed << std::setprecision(3) << name << " (" << sessions << " sessions)\n"
              << "  boundary  P " << m.boundary_precision << "  R " << m.boundary_recall << "  F1 " << m.boundary_f1
              << "\n  pairwise  P " << m.pairwise_precision << "  R " << m.pairwise_recall << "  F1 "
              << m.pairwise_f1 << "\n  rand index " << m.rand_index << "\n";
}

SegmentationMetrics mean_metrics(const std::vector<SegmentationMetrics>& all) {
    SegmentationMetrics m;
    if (all.empty()) return m;
    for (const auto& x : all) {
        m.boundary_precision += x.boundary_precision;
        m.boundary_recall += x.boundary_recall;
        m.boundary_f1 += x.boundary_f1;
        m.pairwise_precision += x.pairwise_precision;
        m.pairwise_recall += x.pairwise_recall;
        m.pairwise_f1 += x.pairwise_f1;
        m.rand_index += x.rand_index;
    }
    const double n = static_cast<double>(all.size());
    m.boundary_precision /= n;
    m.boundary_recall /= n;
    m.boundary_f1 /= n;
    m.pairwise_precision /= n;
    m.pairwise_recall /= n;
    m.pairwise_f1 /= n;
    m.rand_index /= n;
    return m;
}

AssessmentService* g_service = nullptr;

void handle_signal(int) {
    if (g_service) g_service->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topic annotation and segmentation of search-session logs"};
    app.require_subcommand(1);

    // build-lookup
    std::string corpus_path, thesaurus_path, classification_path, crosswalk_path, out_path, in_path;
    std::string native_vocab = "thesaurus";
    auto* lookup_cmd = app.add_subcommand("build-lookup", "Build the keyword -> category table from a corpus");
    lookup_cmd->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
    lookup_cmd->add_option("--thesaurus", thesaurus_path)->required()->check(CLI::ExistingFile);
    lookup_cmd->add_option("--classification", classification_path)->check(CLI::ExistingFile);
    lookup_cmd->add_option("--native-vocab", native_vocab, "Vocabulary tag of thesaurus keywords");
    lookup_cmd->add_option("--out", out_path)->required();

    // build-str
    StrOptions str_opts;
    StopWordFlags stop_flags;
    auto* str_cmd = app.add_subcommand("build-str", "Build the free-term -> descriptor co-occurrence model");
    str_cmd->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
    str_cmd->add_option("--thesaurus", thesaurus_path)->required()->check(CLI::ExistingFile);
    str_cmd->add_option("--min-count", str_opts.min_count)->check(CLI::PositiveNumber);
    str_cmd->add_option("--top-k", str_opts.top_k)->check(CLI::PositiveNumber);
    str_cmd->add_option("--native-vocab", native_vocab);
    str_cmd->add_option("--out", out_path)->required();
    stop_flags.add_to(str_cmd);

    // sessionize
    double timeout_min = 30.0, max_duration_min = 120.0;
    FilterOptions filter;
    SampleOptions sample;
    sample.target_n = 0;
    bool no_filter = false;
    auto* sess_cmd = app.add_subcommand("sessionize", "Group a transaction log into sessions, filter and sample");
    sess_cmd->add_option("--log", in_path, "JSON Lines transaction log")->required()->check(CLI::ExistingFile);
    sess_cmd->add_option("--out", out_path)->required();
    sess_cmd->add_option("--timeout-min", timeout_min, "Inactivity timeout in minutes")->check(CLI::PositiveNumber);
    sess_cmd->add_option("--min-actions", filter.min_actions);
    sess_cmd->add_option("--max-actions", filter.max_actions);
    sess_cmd->add_option("--max-duration-min", max_duration_min);
    sess_cmd->add_flag("--no-filter", no_filter, "Keep every session");
    sess_cmd->add_option("--sample", sample.target_n, "Evaluation set size (0 = no sampling)");
    sess_cmd->add_option("--cap", sample.per_length_cap, "Sessions per action count");
    sess_cmd->add_option("--seed", sample.seed);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Summary statistics of a sessions file");
    stats_cmd->add_option("--in", in_path)->required()->check(CLI::ExistingFile);

    // annotate
    std::optional<std::string> str_model_path, lookup_path, crosswalk_opt;
    double epsilon = kDefaultEpsilon;
    bool serial = false;
    int threads = 0;
    auto* ann_cmd = app.add_subcommand("annotate", "Annotate sessions with keywords, categories and session topics");
    ann_cmd->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
    ann_cmd->add_option("--thesaurus", thesaurus_path)->required()->check(CLI::ExistingFile);
    ann_cmd->add_option("--classification", classification_path)->required()->check(CLI::ExistingFile);
    ann_cmd->add_option("--crosswalk", crosswalk_opt)->check(CLI::ExistingFile);
    ann_cmd->add_option("--str-model", str_model_path, "Built from the corpus when omitted")->check(CLI::ExistingFile);
    ann_cmd->add_option("--lookup", lookup_path, "Built from the corpus when omitted")->check(CLI::ExistingFile);
    ann_cmd->add_option("--native-vocab", native_vocab);
    ann_cmd->add_option("--in", in_path, "Sessions (JSON Lines)")->required()->check(CLI::ExistingFile);
    ann_cmd->add_option("--out", out_path)->required();
    ann_cmd->add_option("--epsilon", epsilon, "Relative closeness for category re-ranking")->check(CLI::NonNegativeNumber);
    ann_cmd->add_flag("--serial", serial, "Use the single-threaded reference path");
    ann_cmd->add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
    stop_flags.add_to(ann_cmd);

    // segment
    auto* seg_cmd = app.add_subcommand("segment", "Assign topic numbers to annotated sessions");
    seg_cmd->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
    seg_cmd->add_option("--out", out_path)->required();
    seg_cmd->add_option("--classification", classification_path)->check(CLI::ExistingFile);
    seg_cmd->add_option("--epsilon", epsilon, "Used only for sessions that lack session topics")
        ->check(CLI::NonNegativeNumber);
    stop_flags.add_to(seg_cmd);

    // render
    std::string session_id;
    bool html = false;
    auto* render_cmd = app.add_subcommand("render", "Print one session as a table");
    render_cmd->add_option("--in", in_path, "Segmented sessions")->required()->check(CLI::ExistingFile);
    render_cmd->add_option("--session", session_id)->required();
    render_cmd->add_option("--corpus", corpus_path)->check(CLI::ExistingFile);
    render_cmd->add_option("--classification", classification_path)->check(CLI::ExistingFile);
    render_cmd->add_flag("--html", html);

    // evaluate
    std::string ratings_path, gold_path, predicted_path, icc_variant = "average";
    std::optional<double> baseline_gap_min;
    auto* eval_cmd = app.add_subcommand("evaluate", "Rating summary, inter-rater agreement and segmentation metrics");
    eval_cmd->add_option("--ratings", ratings_path)->check(CLI::ExistingFile);
    eval_cmd->add_option("--gold", gold_path)->check(CLI::ExistingFile);
    eval_cmd->add_option("--predicted", predicted_path)->check(CLI::ExistingFile);
    eval_cmd->add_option("--icc", icc_variant)->check(CLI::IsMember({"single", "average"}));
    eval_cmd->add_option("--baseline-gap-min", baseline_gap_min,
                         "Also score a timeout baseline on the predicted sessions' timestamps");

    // serve
    ServiceConfig svc;
    std::optional<std::string> static_dir, svc_classification;
    std::string sessions_file, ratings_file;
    auto* serve_cmd = app.add_subcommand("serve", "Run the assessment HTTP service");
    serve_cmd->add_option("--sessions", sessions_file, "Segmented sessions")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--ratings", ratings_file, "Rating log (created if missing)")->required();
    serve_cmd->add_option("--host", svc.host);
    serve_cmd->add_option("--port", svc.port);
    serve_cmd->add_option("--classification", svc_classification)->check(CLI::ExistingFile);
    serve_cmd->add_option("--static-dir", static_dir)->check(CLI::ExistingDirectory);

    // run
    std::string log_path;
    bool print_tables = false;
    auto* run_cmd = app.add_subcommand("run", "Sessionize, annotate and segment a log in one go");
    run_cmd->add_option("--log", log_path)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--corpus", corpus_path)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--thesaurus", thesaurus_path)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--classification", classification_path)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--crosswalk", crosswalk_opt)->check(CLI::ExistingFile);
    run_cmd->add_option("--native-vocab", native_vocab);
    run_cmd->add_option("--timeout-min", timeout_min)->check(CLI::PositiveNumber);
    run_cmd->add_option("--epsilon", epsilon)->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--out", out_path)->required();
    run_cmd->add_flag("--render", print_tables, "Print every session as a text table");
    stop_flags.add_to(run_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (lookup_cmd->parsed()) {
            const auto thesaurus = Thesaurus::load(thesaurus_path);
            std::optional<Classification> cls;
            if (!classification_path.empty()) cls = Classification::load(classification_path);
            const auto corpus = Corpus::load(corpus_path);
            const auto table =
                build_keyword_category_table(corpus, thesaurus, native_vocab, cls ? &*cls : nullptr);
            write_json_file(out_path, table.to_json());
            std::cerr << "lookup: " << table.size() << " keywords\n";
        } else if (str_cmd->parsed()) {
            str_opts.native_vocabulary = native_vocab;
            const auto thesaurus = Thesaurus::load(thesaurus_path);
            const auto corpus = Corpus::load(corpus_path);
            const auto model = build_str_model(corpus, thesaurus, stop_flags.load(), str_opts);
            write_json_file(out_path, model.to_json());
            std::cerr << "str model: " << model.size() << " terms\n";
        } else if (sess_cmd->parsed()) {
            auto sessions = sessionize(parse_log(in_path), timeout_min * 60.0);
            const auto formed = sessions.size();
            filter.max_duration = max_duration_min * 60.0;
            if (!no_filter) sessions = filter_sessions(sessions, filter);
            if (sample.target_n > 0) sessions = sample_evaluation_set(sessions, sample);
            auto out = open_out(out_path);
            write_sessions(out, sessions);
            std::cerr << "sessions: " << formed << " formed, " << sessions.size() << " written\n"
                      << to_json(dataset_stats(sessions)).dump(2) << '\n';
        } else if (stats_cmd->parsed()) {
            std::cout << to_json(dataset_stats(read_sessions(std::filesystem::path(in_path)))).dump(2) << '\n';
        } else if (ann_cmd->parsed()) {
#ifdef _OPENMP
            if (threads > 0) omp_set_num_threads(threads);
#endif
            KnowledgePaths paths;
            paths.corpus = corpus_path;
            paths.thesaurus = thesaurus_path;
            paths.classification = classification_path;
            if (crosswalk_opt) paths.crosswalk = *crosswalk_opt;
            if (str_model_path) paths.str_model = *str_model_path;
            if (lookup_path) paths.lookup = *lookup_path;
            if (stop_flags.en) paths.stopwords_en = *stop_flags.en;
            if (stop_flags.de) paths.stopwords_de = *stop_flags.de;
            paths.native_vocabulary = native_vocab;
            const auto kb = load_knowledge_base(paths);
            const Annotator annotator(kb, serial ? resolve_all_documents_serial(kb) : resolve_all_documents(kb));
            const auto sessions = read_sessions(std::filesystem::path(in_path));
            PipelineOptions opts{epsilon, Stage::topics};
            const auto annotated = serial ? process_sessions_serial(sessions, annotator, opts)
                                          : process_sessions(sessions, annotator, opts);
            auto out = open_out(out_path);
            write_annotated(out, annotated, &kb.classification);
            std::size_t flagged = 0;
            for (const auto& s : annotated) {
                for (const auto& a : s.actions) flagged += a.flagged;
            }
            std::cerr << "annotated " << annotated.size() << " sessions (" << flagged << " flagged actions)\n";
        } else if (seg_cmd->parsed()) {
            auto sessions = read_annotated(std::filesystem::path(in_path));
            std::optional<Classification> cls;
            if (!classification_path.empty()) cls = Classification::load(classification_path);
            segment_sessions(sessions, stop_flags.load(), epsilon);
            auto out = open_out(out_path);
            write_annotated(out, sessions, cls ? &*cls : nullptr);
            std::size_t boundary_count = 0;
            for (const auto& s : sessions) boundary_count += boundaries(s).size();
            std::cerr << "segmented " << sessions.size() << " sessions, " << boundary_count << " boundaries\n";
        } else if (render_cmd->parsed()) {
            const auto sessions = read_annotated(std::filesystem::path(in_path));
            std::optional<Corpus> corpus;
            std::optional<Classification> cls;
            if (!corpus_path.empty()) corpus = Corpus::load(corpus_path);
            if (!classification_path.empty()) cls = Classification::load(classification_path);
            const RenderOptions ro{corpus ? &*corpus : nullptr, cls ? &*cls : nullptr};
            for (const auto& s : sessions) {
                if (s.id != session_id) continue;
                std::cout << (html ? render_html(s, ro) : render_text(s, ro));
                return 0;
            }
            std::cerr << "no session \"" << session_id << "\" in " << in_path << '\n';
            return 2;
        } else if (eval_cmd->parsed()) {
            const auto variant = icc_variant == "single" ? IccVariant::single : IccVariant::average;
            if (!ratings_path.empty()) {
                const auto ratings = RatingStore::replay(std::filesystem::path(ratings_path)).ratings();
                std::cout << "ratings: " << ratings.size() << '\n';
                for (auto [q, name] : {std::pair{Question::topic, "topic assignment"},
                                       std::pair{Question::segmentation, "segmentation"}}) {
                    std::cout << name << ":\n";
                    try {
                        const auto s = rating_summary(ratings, q);
                        std::cout << std::fixed << std::setprecision(3) << "  mean " << s.mean << " (n=" << s.n
                                  << ", dnk=" << s.dnk << ")  histogram -2..2:";
                        for (auto c : s.histogram) std::cout << ' ' << c;
                        std::cout << '\n';
                    } catch (const InputError& e) {
                        std::cout << "  mean: " << e.what() << '\n';
                    }
                    try {
                        const auto m = build_rating_matrix(ratings, q);
                        std::cout << "  ICC(" << to_string(variant) << ", two-way random, absolute agreement) "
                                  << icc(m, variant) << "  [" << m.complete_rows().size() << " complete of "
                                  << m.subjects.size() << " sessions, " << m.raters.size() << " assessors]\n";
                    } catch (const InputError& e) {
                        std::cout << "  ICC(" << to_string(variant) << "): " << e.what() << '\n';
                    }
                }
            }
            if (!gold_path.empty() && !predicted_path.empty()) {
                const auto gold = read_numberings(gold_path);
                const auto predicted = read_numberings(predicted_path);
                std::vector<SegmentationMetrics> scores;
                for (const auto& [id, numbers] : predicted) {
                    auto g = gold.find(id);
                    if (g != gold.end()) scores.push_back(segmentation_metrics(numbers, g->second));
                }
                print_metrics("topic segmentation", mean_metrics(scores), scores.size());
                if (baseline_gap_min) {
                    std::vector<SegmentationMetrics> base;
                    for (const auto& s : read_annotated(std::filesystem::path(predicted_path))) {
                        auto g = gold.find(s.id);
                        if (g == gold.end()) continue;
                        std::vector<double> ts;
                        for (const auto& a : s.actions) ts.push_back(a.action.timestamp);
                        base.push_back(segmentation_metrics(timeout_baseline(ts, *baseline_gap_min * 60.0), g->second));
                    }
                    print_metrics("timeout baseline", mean_metrics(base), base.size());
                }
            }
        } else if (serve_cmd->parsed()) {
            svc.sessions_file = sessions_file;
            svc.ratings_file = ratings_file;
            if (svc_classification) svc.classification_file = *svc_classification;
            if (static_dir) svc.static_dir = *static_dir;
            auto state = load_assessment_state(svc);
            AssessmentService service(*state, svc.static_dir);
            const int port = service.bind(svc.host, svc.port);
            if (port < 0) {
                std::cerr << "cannot bind " << svc.host << ':' << svc.port << '\n';
                return 1;
            }
            g_service = &service;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            std::cerr << "serving " << state->total() << " sessions on http://" << svc.host << ':' << port << '\n';
            service.serve();
            g_service = nullptr;
        } else if (run_cmd->parsed()) {
            KnowledgePaths paths;
            paths.corpus = corpus_path;
            paths.thesaurus = thesaurus_path;
            paths.classification = classification_path;
            if (crosswalk_opt) paths.crosswalk = *crosswalk_opt;
            if (stop_flags.en) paths.stopwords_en = *stop_flags.en;
            if (stop_flags.de) paths.stopwords_de = *stop_flags.de;
            paths.native_vocabulary = native_vocab;
            const auto kb = load_knowledge_base(paths);
            const Annotator annotator(kb);
            const auto sessions = sessionize(parse_log(log_path), timeout_min * 60.0);
            const auto segmented = process_sessions(sessions, annotator, {epsilon, Stage::segment});
            auto out = open_out(out_path);
            write_annotated(out, segmented, &kb.classification);
            if (print_tables) {
                for (const auto& s : segmented) {
                    std::cout << render_text(s, {&kb.corpus, &kb.classification}) << '\n';
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
