// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <httplib.h>
#include <iostream>
#include <map>
#include <omp.h>
#include <set>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "topicseg/error.hpp"
#include "topicseg/pipeline.hpp"
#include "topicseg/service.hpp"

using namespace topicseg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::string kFixtures = std::string(TOPICSEG_DATA_DIR) + "/fixtures/";

std::vector<AnnotatedSession> run_fixture(const KnowledgeBase& kb) {
    const Annotator annotator(kb);
    return process_sessions(sessionize(parse_log(kFixtures + "log.jsonl")), annotator);
}

KnowledgeBase fixture_kb() {
    KnowledgePaths p;
    p.thesaurus = kFixtures + "thesaurus.json";
    p.classification = kFixtures + "classification.json";
    p.crosswalk = kFixtures + "crosswalk.json";
    p.corpus = kFixtures + "corpus.jsonl";
    return load_knowledge_base(p);
}

std::vector<std::size_t> numbers(const AnnotatedSession& s) {
    std::vector<std::size_t> out;
    for (const auto& a : s.actions) out.push_back(a.topic_number);
    return out;
}

std::string join(const std::vector<std::size_t>& v) {
    std::string out;
    for (auto x : v) out += (out.empty() ? "" : ",") + std::to_string(x);
    return out;
}

// ---------------------------------------------------------------------------

std::string formula_exactness() {
    const double tol = 1e-12;
    expect(std::abs(document_factor(1) - 1.0) <= tol, "document_factor(1)");
    expect(std::abs(document_factor(10) - 0.55) <= tol, "document_factor(10)");
    expect(std::abs(keyword_weight(1) - 1.0) <= tol, "keyword_weight(1)");
    expect(std::abs(keyword_weight(3) - 0.5) <= tol, "keyword_weight(3)");
    return "factor(1)=1, factor(10)=0.55, weight(1)=1, weight(3)=0.5";
}

std::string two_topic_session() {
    const auto t0 = Clock::now();
    const auto kb = fixture_kb();
    const auto sessions = run_fixture(kb);
    const double elapsed = seconds_since(t0);
    const auto& s = sessions.at(0);
    std::vector<std::string> labels;
    for (const auto& a : s.actions) labels.push_back(kb.classification.label_of(a.session_topic));
    expect(labels == std::vector<std::string>{"Social Psychology", "Social Psychology", "Social Psychology",
                                              "Migration", "Migration"},
           "session topics differ");
    expect(numbers(s) == std::vector<std::size_t>{1, 1, 1, 2, 2}, "topic numbers " + join(numbers(s)));
    expect(boundaries(s) == std::vector<std::size_t>{3}, "boundaries " + join(boundaries(s)));
    expect(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
    return "topics SP x3, M x2; numbers 1,1,1,2,2; boundary after step 3; " + std::to_string(elapsed) + " s";
}

std::string behaviour_fixtures() {
    const auto kb = fixture_kb();
    const auto sessions = run_fixture(kb);
    const text::StopWords& sw = kb.stop_words;

    const auto& media = sessions.at(1);
    expect(media.actions.size() == 2, "media session shape");
    expect(media.actions[0].action.query_terms == std::vector<std::string>{"facebook"} &&
               media.actions[1].action.query_terms == std::vector<std::string>{"instagram"},
           "media session queries");
    expect(media.actions[0].session_topic == media.actions[1].session_topic, "facebook/instagram topics differ");
    expect(kb.classification.label_of(media.actions[0].session_topic) == "Interactive, electronic Media",
           "media topic label");
    expect(numbers(media) == std::vector<std::size_t>{1, 1}, "facebook/instagram numbers " + join(numbers(media)));

    const auto& related = sessions.at(2);
    expect(related.actions[0].action.query_terms == std::vector<std::string>{"migrant youth welfare sector"} &&
               related.actions[1].action.query_terms == std::vector<std::string>{"migrants education"},
           "related-query session shape");
    expect(related.actions[0].session_topic != related.actions[1].session_topic,
           "rule 2 case needs distinct session topics");
    expect(text::levenshtein("migrant", "migrants") == 1, "distance migrant/migrants");
    expect(queries_share_term(related.actions[0].action, related.actions[1].action, sw), "queries not related");
    expect(related.actions[0].topic_number == related.actions[1].topic_number, "rule 2 did not link");

    const auto& author = sessions.at(3);
    expect(author.actions[0].action.query_terms == std::vector<std::string>{"Bernhard Nauck"}, "author query");
    const auto& topic = author.actions[0].session_topic;
    expect(!topic.empty() && topic != kUnclassified && kb.classification.contains(topic),
           "author query topic is '" + topic + "'");
    return "media -> 1 topic number; migrant/migrants linked by rule 2; author query -> " +
           kb.classification.label_of(topic);
}

std::string oracle_equivalence() {
    const auto t0 = Clock::now();
    const auto sw = text::StopWords::defaults();
    synth::Rng rng(20240601);
    std::size_t sessions = 0;
    for (; sessions < 1000; ++sessions) {
        auto s = synth::topic_session(rng, synth::pick(rng, 1, 8), synth::pick(rng, 1, 5));
        assign_topic_numbers(s, sw);
        const auto expected = oracle::topic_numbers(s);
        expect(numbers(s) == expected, "session " + std::to_string(sessions) + ": got " + join(numbers(s)) +
                                           " expected " + join(expected));
    }

    double worst = 0.0;
    std::size_t fixtures = 0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        synth::Rng world_rng(seed * 7919);
        const auto kb = synth::knowledge_base(world_rng);
        const Annotator ann(kb);
        for (int i = 0; i < 30; ++i, ++fixtures) {
            const auto action = synth::search_action(world_rng, kb.corpus);
            const auto got = ann.annotate_search(action);
            const auto want = oracle::annotate_search(action, kb);
            expect(got.keywords.size() == want.keywords.size(), "keyword label sets differ");
            expect(got.categories.size() == want.categories.size(), "category label sets differ");
            for (const auto& [label, w] : want.keywords) {
                const auto g = got.keywords.weight_of(label);
                expect(g.has_value(), "missing keyword " + label);
                worst = std::max(worst, std::abs(*g - w));
            }
            for (const auto& [label, w] : want.categories) {
                const auto g = got.categories.weight_of(label);
                expect(g.has_value(), "missing category " + label);
                worst = std::max(worst, std::abs(*g - w));
            }
        }
    }
    expect(worst <= 1e-9, "max weight error " + std::to_string(worst));
    const double elapsed = seconds_since(t0);
    expect(elapsed < 30.0, "took " + std::to_string(elapsed) + " s");
    std::ostringstream msg;
    msg << sessions << " sessions 100% agreement; " << fixtures << " search fixtures, max error " << worst << "; "
        << elapsed << " s";
    return msg.str();
}

std::string invariant_suite() {
    const auto sw = text::StopWords::defaults();
    synth::Rng rng(77);

    std::size_t checked = 0;
    for (int iter = 0; iter < 2000; ++iter, ++checked) {
        auto s = synth::topic_session(rng, synth::pick(rng, 1, 12), synth::pick(rng, 1, 6));
        assign_topic_numbers(s, sw);
        std::map<std::string, std::size_t> by_topic;
        std::size_t max_seen = 0;
        for (const auto& a : s.actions) {
            auto [it, fresh] = by_topic.emplace(a.session_topic, a.topic_number);
            expect(it->second == a.topic_number, "equal topic, different number");
            expect(a.topic_number >= 1 && a.topic_number <= max_seen + 1, "numbers not contiguous");
            max_seen = std::max(max_seen, a.topic_number);
        }
    }

    for (int iter = 0; iter < 1000; ++iter) {
        const auto s = synth::category_session(rng, synth::pick(rng, 1, 8), 6);
        const auto profile = session_category_profile(s);
        for (const auto& a : s.actions) {
            auto ranked = rerank_action_categories(a.categories, profile, synth::real(rng, 0.0, 1.0));
            auto original = a.categories.entries();
            auto by_label = [](const WeightedLabel& x, const WeightedLabel& y) { return x.label < y.label; };
            std::sort(ranked.begin(), ranked.end(), by_label);
            std::sort(original.begin(), original.end(), by_label);
            expect(ranked == original, "rerank changed the (label, weight) multiset");
        }
    }

    synth::Rng world_rng(5);
    const auto kb = synth::knowledge_base(world_rng);
    const Annotator ann(kb);
    for (int iter = 0; iter < 500; ++iter) {
        const auto a = ann.annotate_search(synth::search_action(world_rng, kb.corpus));
        double mapped = 0.0;
        for (const auto& kw : a.keywords) {
            if (kb.lookup.lookup(kw.label)) mapped += kw.weight;
        }
        expect(std::abs(a.categories.total_weight() - mapped) <= 1e-9, "category mass not conserved");
    }

    const auto sessions = synth::sessions(world_rng, kb.corpus, 500, 15);
    const auto serial = process_sessions_serial(sessions, ann);
    expect(process_sessions_serial(sessions, ann) == serial, "serial run not deterministic");
    std::ostringstream serial_json;
    write_annotated(serial_json, serial);
    const int saved = omp_get_max_threads();
    for (int threads : {2, 4}) {
        omp_set_num_threads(threads);
        const auto parallel = process_sessions(sessions, ann);
        std::ostringstream parallel_json;
        write_annotated(parallel_json, parallel);
        expect(parallel == serial && parallel_json.str() == serial_json.str(),
               "parallel output differs with " + std::to_string(threads) + " threads");
    }
    omp_set_num_threads(saved);
    return std::to_string(checked) + " numbered sessions; rerank, mass, determinism; parallel == serial at 2 and 4 threads";
}

std::string icc_criterion() {
    const std::vector<std::vector<double>> perfect = {{1, 1, 1}, {2, 2, 2}, {-1, -1, -1}, {0, 0, 0}, {-2, -2, -2}};
    expect(std::abs(icc(perfect, IccVariant::single) - 1.0) <= 1e-9, "perfect agreement, single");
    expect(std::abs(icc(perfect, IccVariant::average) - 1.0) <= 1e-9, "perfect agreement, average");

    synth::Rng rng(1618);
    double worst = 0.0;
    int compared = 0;
    while (compared < 100) {
        const auto rows = synth::integer_matrix(rng, 10, 3, -2, 2);
        try {
            for (auto v : {IccVariant::single, IccVariant::average}) {
                worst = std::max(worst, std::abs(icc(rows, v) - oracle::icc(rows, v)));
            }
        } catch (const DegenerateInputError&) {
            continue;
        }
        ++compared;
    }
    expect(worst <= 1e-9, "oracle mismatch " + std::to_string(worst));

    int ordered = 0, reversed = 0;
    while (ordered < 100) {
        const auto rows = synth::integer_matrix(rng, 10, 3, -2, 2);
        double single = 0.0, average = 0.0;
        try {
            single = icc(rows, IccVariant::single);
            average = icc(rows, IccVariant::average);
        } catch (const DegenerateInputError&) {
            continue;
        }
        if (single >= 0.0) {
            expect(average >= single, "average < single with non-negative single-measure ICC");
            ++ordered;
        } else if (const double predicted = 3.0 * single / (1.0 + 2.0 * single);
                   single > -0.5 && predicted > -1.0) {
            expect(std::abs(average - predicted) <= 1e-9, "average/single identity broken");
            ++reversed;
        }
    }
    std::ostringstream msg;
    msg << "perfect -> 1; " << compared << " random 10x3 vs oracle, max error " << worst << "; average >= single on "
        << ordered << " random matrices with single >= 0 (" << reversed << " negative draws follow the identity)";
    return msg.str();
}

std::string sampler_contract() {
    synth::Rng rng(500);
    const auto pool = filter_sessions(synth::sampler_pool(rng, 500));
    expect(pool.size() == 500, "synthetic pool lost sessions in filtering");
    SampleOptions opt;
    opt.seed = 42;
    const auto sample = sample_evaluation_set(pool, opt);
    expect(sample.size() <= 100, "sample larger than 100");
    std::map<std::size_t, int> per_length;
    for (const auto& s : sample) {
        expect(s.actions.size() >= 2 && s.actions.size() <= 30, "session length out of range");
        expect(s.duration() <= 7200.0, "session longer than two hours");
        expect(++per_length[s.actions.size()] <= 4, "more than four sessions of one length");
    }
    expect(sample_evaluation_set(pool, opt) == sample, "same seed, different sample");
    return std::to_string(sample.size()) + " sessions over " + std::to_string(per_length.size()) +
           " lengths; seed-deterministic";
}

class Service {
public:
    Service(const fs::path& sessions, const fs::path& ratings) {
        ServiceConfig cfg;
        cfg.sessions_file = sessions;
        cfg.ratings_file = ratings;
        state_ = load_assessment_state(cfg);
        service_ = std::make_unique<AssessmentService>(*state_);
        port_ = service_->bind("127.0.0.1", 0);
        expect(port_ > 0, "bind failed");
        thread_ = std::thread([this] { service_->serve(); });
        service_->wait_until_ready();
    }
    ~Service() {
        service_->stop();
        thread_.join();
    }
    json get(const std::string& path) const {
        httplib::Client cli("127.0.0.1", port_);
        auto res = cli.Get(path);
        expect(res && res->status == 200, "GET " + path + " failed");
        return json::parse(res->body);
    }
    int put(const std::string& path, const json& body) const {
        httplib::Client cli("127.0.0.1", port_);
        auto res = cli.Put(path, body.dump(), "application/json");
        expect(static_cast<bool>(res), "PUT " + path + " failed");
        return res->status;
    }

private:
    std::unique_ptr<AssessmentState> state_;
    std::unique_ptr<AssessmentService> service_;
    std::thread thread_;
    int port_ = -1;
};

std::string service_round_trip() {
    const auto dir = fs::temp_directory_path() / "topicseg_acceptance_service";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto sessions_file = dir / "sessions.jsonl";
    const auto ratings_file = dir / "ratings.jsonl";
    {
        const auto kb = fixture_kb();
        std::ofstream out(sessions_file);
        write_annotated(out, run_fixture(kb), &kb.classification);
    }

    json listing, detail, rating, progress;
    std::string id;
    {
        Service svc(sessions_file, ratings_file);
        listing = svc.get("/api/sessions?offset=0&limit=10");
        expect(listing["total"] == 6 && listing["items"].size() == 6, "listing");
        id = listing["items"][0]["id"];
        detail = svc.get("/api/sessions/" + id);
        expect(detail["actions"].size() == 5, "detail rows");
        expect(svc.get("/api/assessors/ann/progress")["rated"] == 0, "fresh progress");
        const int status = svc.put("/api/sessions/" + id + "/rating",
                                   {{"assessor", "ann"}, {"topic_quality", 2}, {"segmentation_quality", "dnk"}});
        expect(status == 204, "PUT returned " + std::to_string(status));
        rating = svc.get("/api/sessions/" + id + "/rating?assessor=ann");
        progress = svc.get("/api/assessors/ann/progress");
        expect(progress["rated"] == 1, "progress after PUT");
        listing = svc.get("/api/sessions?offset=0&limit=10");
    }
    {
        Service svc(sessions_file, ratings_file);
        expect(svc.get("/api/sessions/" + id + "/rating?assessor=ann") == rating, "rating lost on restart");
        expect(svc.get("/api/assessors/ann/progress") == progress, "progress lost on restart");
        expect(svc.get("/api/sessions?offset=0&limit=10") == listing, "listing changed on restart");
        expect(svc.get("/api/sessions/" + id) == detail, "detail changed on restart");
    }
    fs::remove_all(dir);
    return "list, fetch, PUT, restart: rating " + rating["topic_quality"].dump() + "/" +
           rating["segmentation_quality"].dump() + " and progress 1/6 replayed";
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
        {"formula exactness", formula_exactness},
        {"two-topic session reproduction", two_topic_session},
        {"behaviour fixtures", behaviour_fixtures},
        {"oracle equivalence", oracle_equivalence},
        {"invariant suite", invariant_suite},
        {"ICC", icc_criterion},
        {"sampler contract", sampler_contract},
        {"service round trip", service_round_trip},
    };

    const auto start = Clock::now();
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = Clock::now();
        std::string detail;
        bool ok = false;
        try {
            detail = run();
            ok = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        failed += !ok;
        std::printf("%s  %-32s %6.2f s  %s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds_since(t0), detail.c_str());
    }
    const double total = seconds_since(start);
    const bool fast = total < 60.0;
    failed += !fast;
    std::printf("%s  %-32s %6.2f s  whole suite under one minute\n", fast ? "PASS" : "FAIL", "total runtime", total);
    std::printf("%d failed\n", failed);
    return failed == 0 ? 0 : 1;
}
