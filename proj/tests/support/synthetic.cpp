#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "topicseg/topics.hpp"

namespace topicseg::synth {

namespace {

std::string numbered(const char* prefix, std::size_t i, int width = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
    return buf;
}

template <class T>
const T& one_of(Rng& rng, const std::vector<T>& v) {
    return v[pick(rng, 0, v.size() - 1)];
}

std::string phrase(Rng& rng, std::size_t lo, std::size_t hi) {
    std::string out;
    const std::size_t n = pick(rng, lo, hi);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += one_of(rng, query_words());
    }
    return out;
}

} // namespace

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

const std::vector<std::string>& query_words() {
    static const std::vector<std::string> words = {
        "migrant", "migrants", "migration", "youth",    "youths",  "welfare",  "sector",   "education",
        "media",   "medium",   "policy",    "police",   "family",  "families", "school",   "schools",
        "child",   "children", "climate",   "refugee",  "refugees", "asylum",  "labour",   "labor",
        "income",  "health",   "gender",    "social",   "network", "networks", "facebook", "instagram",
        "the",     "and",      "of",        "in",       "for",     "with",     "data",     "work"};
    return words;
}

KnowledgeBase knowledge_base(Rng& rng, const WorldOptions& options) {
    KnowledgeBase kb;

    std::vector<Descriptor> descriptors;
    for (std::size_t i = 0; i < options.descriptors; ++i) {
        Descriptor d{numbered("d", i), numbered("concept", i), {}};
        if (chance(rng, 0.3)) d.synonyms.push_back(numbered("alias", i));
        descriptors.push_back(std::move(d));
    }
    kb.thesaurus = Thesaurus(descriptors);

    std::vector<Category> categories;
    std::vector<std::string> leaf_codes;
    for (std::size_t m = 1; m <= options.main_classes; ++m) {
        const std::string main = "M" + std::to_string(m);
        categories.push_back({main, "Main class " + std::to_string(m), std::nullopt});
        for (std::size_t s = 1; s <= options.subclasses_per_main; ++s) {
            const std::string code = main + "." + std::to_string(s);
            categories.push_back({code, "Subclass " + code, main});
            leaf_codes.push_back(code);
        }
    }
    kb.classification = Classification(categories);

    std::vector<CrosswalkEntry> crosswalk;
    const std::size_t mapped_foreign = 30;
    for (std::size_t f = 0; f < mapped_foreign; ++f) {
        const std::size_t n = pick(rng, 1, 3);
        for (std::size_t j = 0; j < n; ++j) {
            crosswalk.push_back({"FOREIGN", numbered("f", f, 2), one_of(rng, descriptors).id,
                                 static_cast<Relation>(pick(rng, 0, 2))});
        }
    }
    kb.crosswalk = Crosswalk(crosswalk, kb.thesaurus);

    std::vector<Document> docs;
    for (std::size_t i = 0; i < options.documents; ++i) {
        Document doc;
        doc.id = numbered("doc", i, 4);
        doc.title = phrase(rng, 2, 6);
        if (chance(rng, 0.4)) doc.abstract = phrase(rng, 4, 12);
        doc.authors.push_back(numbered("Author ", pick(rng, 0, 50), 2));
        if (chance(rng, 0.8)) doc.year = static_cast<int>(pick(rng, 1970, 2020));

        const double roll = real(rng, 0.0, 1.0);
        if (roll < options.bare_share) {
            // title-only document
        } else if (roll < options.bare_share + options.foreign_share) {
            const std::size_t n = pick(rng, 1, 3);
            for (std::size_t j = 0; j < n; ++j) {
                doc.keywords.push_back({"FOREIGN", numbered("f", pick(rng, 0, mapped_foreign + 4), 2)});
            }
        } else {
            const std::size_t n = pick(rng, 1, options.max_keywords);
            for (std::size_t j = 0; j < n; ++j) {
                const auto& d = one_of(rng, descriptors);
                std::string term = d.preferred_label;
                if (!d.synonyms.empty() && chance(rng, 0.3)) term = d.synonyms.front();
                if (chance(rng, 0.1)) std::transform(term.begin(), term.end(), term.begin(), ::toupper);
                doc.keywords.push_back({"thesaurus", term});
            }
            if (chance(rng, 0.1)) doc.keywords.push_back({"thesaurus", "unlisted term"});
            if (chance(rng, 0.1)) doc.keywords.push_back({"FOREIGN", numbered("f", pick(rng, 0, 5), 2)});
        }
        if (!chance(rng, 0.05)) {
            const std::size_t n = pick(rng, 1, 2);
            for (std::size_t j = 0; j < n; ++j) {
                const auto& code = one_of(rng, leaf_codes);
                if (std::find(doc.categories.begin(), doc.categories.end(), code) == doc.categories.end()) {
                    doc.categories.push_back(code);
                }
            }
        }
        docs.push_back(std::move(doc));
    }
    kb.corpus = Corpus(std::move(docs));
    kb.lookup = build_keyword_category_table(kb.corpus, kb.thesaurus, kb.native_vocabulary, &kb.classification);
    kb.str_model = build_str_model_serial(kb.corpus, kb.thesaurus, kb.stop_words);
    return kb;
}

Action search_action(Rng& rng, const Corpus& corpus, std::size_t max_results) {
    Action a;
    a.kind = static_cast<ActionKind>(pick(rng, 0, 2));
    a.query_terms.push_back(phrase(rng, 1, 3));
    if (a.kind == ActionKind::facet_search) a.facet_terms.push_back(phrase(rng, 1, 2));
    const std::size_t n = pick(rng, 0, std::min(max_results, kMaxResults));
    for (std::size_t r = 0; r < n; ++r) {
        if (chance(rng, 0.05)) {
            a.result_doc_ids.push_back(numbered("missing", pick(rng, 0, 9), 1));
        } else if (r > 0 && chance(rng, 0.05)) {
            a.result_doc_ids.push_back(a.result_doc_ids[pick(rng, 0, r - 1)]);
        } else {
            a.result_doc_ids.push_back(corpus.documents()[pick(rng, 0, corpus.size() - 1)].id);
        }
    }
    return a;
}

Session session(Rng& rng, const Corpus& corpus, std::size_t n_actions, const std::string& id) {
    Session s{id, "user:" + id, {}};
    double t = real(rng, 1.4e9, 1.5e9);
    for (std::size_t i = 0; i < n_actions; ++i) {
        Action a;
        if (chance(rng, 0.45)) {
            a.kind = ActionKind::doc_view;
            a.doc_id = chance(rng, 0.02) ? "missing-doc" : corpus.documents()[pick(rng, 0, corpus.size() - 1)].id;
        } else {
            a = search_action(rng, corpus);
        }
        a.index = i + 1;
        a.timestamp = t;
        t += std::floor(real(rng, 5.0, 600.0));
        s.actions.push_back(std::move(a));
    }
    return s;
}

std::vector<Session> sessions(Rng& rng, const Corpus& corpus, std::size_t count, std::size_t max_actions) {
    std::vector<Session> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(session(rng, corpus, pick(rng, 1, max_actions), numbered("S", i + 1, 6)));
    }
    return out;
}

AnnotatedSession topic_session(Rng& rng, std::size_t n_actions, std::size_t n_topics) {
    AnnotatedSession s{"T", "user:T", {}};
    for (std::size_t i = 0; i < n_actions; ++i) {
        AnnotatedAction a;
        a.action.index = i + 1;
        a.action.timestamp = static_cast<double>(i) * 60.0;
        if (chance(rng, 0.3)) {
            a.action.kind = ActionKind::doc_view;
            a.action.doc_id = "doc";
        } else {
            a.action.kind = static_cast<ActionKind>(pick(rng, 0, 2));
            a.action.query_terms.push_back(phrase(rng, 1, 3));
            if (a.action.kind == ActionKind::facet_search && chance(rng, 0.5)) {
                a.action.facet_terms.push_back(phrase(rng, 1, 1));
            }
        }
        a.session_topic = chance(rng, 0.1) ? std::string(kUnclassified) : "C" + std::to_string(pick(rng, 1, n_topics));
        s.actions.push_back(std::move(a));
    }
    return s;
}

AnnotatedSession category_session(Rng& rng, std::size_t n_actions, std::size_t n_categories) {
    AnnotatedSession s{"K", "user:K", {}};
    for (std::size_t i = 0; i < n_actions; ++i) {
        AnnotatedAction a;
        a.action.index = i + 1;
        a.action.timestamp = static_cast<double>(i) * 60.0;
        a.action.kind = chance(rng, 0.4) ? ActionKind::doc_view : ActionKind::simple_search;
        if (a.action.kind == ActionKind::doc_view) {
            a.action.doc_id = "doc";
        } else {
            a.action.query_terms.push_back(phrase(rng, 1, 2));
        }
        std::vector<WeightedLabel> contributions;
        const std::size_t n = pick(rng, 0, 5);
        for (std::size_t j = 0; j < n; ++j) {
            // weights on a coarse grid so near-ties and exact ties both occur
            contributions.push_back({"C" + std::to_string(pick(rng, 1, n_categories)),
                                     static_cast<double>(pick(rng, 1, 40)) / 20.0});
        }
        a.categories = WeightedLabelList::accumulate(contributions);
        s.actions.push_back(std::move(a));
    }
    return s;
}

std::vector<Session> sampler_pool(Rng& rng, std::size_t count) {
    std::vector<Session> pool;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t n = pick(rng, 2, 30);
        const double step = real(rng, 1.0, 7200.0 / static_cast<double>(n - 1));
        Session s{numbered("P", i, 4), "user:" + std::to_string(i), {}};
        for (std::size_t j = 0; j < n; ++j) {
            Action a;
            a.index = j + 1;
            a.timestamp = 1.5e9 + std::floor(step * static_cast<double>(j));
            a.kind = j % 2 ? ActionKind::doc_view : ActionKind::simple_search;
            if (a.kind == ActionKind::doc_view) {
                a.doc_id = "doc";
            } else {
                a.query_terms = {"query"};
            }
            s.actions.push_back(std::move(a));
        }
        pool.push_back(std::move(s));
    }
    return pool;
}

std::vector<std::vector<double>> integer_matrix(Rng& rng, std::size_t n, std::size_t k, int lo, int hi) {
    std::uniform_int_distribution<int> dist(lo, hi);
    std::vector<std::vector<double>> m(n, std::vector<double>(k));
    for (auto& row : m) {
        for (auto& v : row) v = dist(rng);
    }
    return m;
}

std::vector<std::vector<double>> rater_model_matrix(Rng& rng, std::size_t n, std::size_t k, double noise) {
    std::normal_distribution<double> subject(0.0, 1.0), bias(0.0, 0.3), error(0.0, noise);
    std::vector<double> biases(k);
    for (auto& b : biases) b = bias(rng);
    std::vector<std::vector<double>> m(n, std::vector<double>(k));
    for (auto& row : m) {
        const double s = subject(rng);
        for (std::size_t j = 0; j < k; ++j) row[j] = std::clamp(std::round(s + biases[j] + error(rng)), -2.0, 2.0);
    }
    return m;
}

} // namespace topicseg::synth
