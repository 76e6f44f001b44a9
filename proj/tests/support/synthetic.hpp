#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "topicseg/annotate.hpp"
#include "topicseg/session.hpp"

// Seeded generators shared by unit tests, the acceptance suite and the benchmark.
namespace topicseg::synth {

using Rng = std::mt19937_64;

/// Inclusive integer range.
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi);
double real(Rng& rng, double lo, double hi);
bool chance(Rng& rng, double p);

/// ASCII query vocabulary with near-duplicates ("migrant"/"migrants") and a
/// few stop words, so term matching has something to find.
const std::vector<std::string>& query_words();

struct WorldOptions {
    std::size_t descriptors = 40;
    std::size_t main_classes = 3;
    std::size_t subclasses_per_main = 3;
    std::size_t documents = 200;
    std::size_t max_keywords = 6;
    double foreign_share = 0.15;  // documents carrying only crosswalked keywords
    double bare_share = 0.10;     // documents with no keywords at all
};

/// Thesaurus, classification, crosswalk and corpus drawn at random, with the
/// lookup table and STR model built from the corpus.
KnowledgeBase knowledge_base(Rng& rng, const WorldOptions& options = {});

/// A search over up to `max_results` corpus documents, with an occasional
/// unknown id and repeated document.
Action search_action(Rng& rng, const Corpus& corpus, std::size_t max_results = kMaxResults);

/// Mixed searches and doc views over the corpus; timestamps increase by 5..600 s.
Session session(Rng& rng, const Corpus& corpus, std::size_t n_actions, const std::string& id);
std::vector<Session> sessions(Rng& rng, const Corpus& corpus, std::size_t count, std::size_t max_actions);

/// Annotated session whose actions carry only a kind, query terms and a
/// session topic drawn from `n_topics` codes "C1".."Cn" (plus the sentinel).
AnnotatedSession topic_session(Rng& rng, std::size_t n_actions, std::size_t n_topics);

/// Annotated session with random category lists (labels "C1".."Cn").
AnnotatedSession category_session(Rng& rng, std::size_t n_actions, std::size_t n_categories);

/// Sessions of 2..30 actions lasting at most two hours.
std::vector<Session> sampler_pool(Rng& rng, std::size_t count);

/// Integer-valued n x k matrix with entries in [lo, hi].
std::vector<std::vector<double>> integer_matrix(Rng& rng, std::size_t n, std::size_t k, int lo, int hi);

/// Ratings = subject effect + rater bias + noise, rounded and clipped to [-2, 2].
std::vector<std::vector<double>> rater_model_matrix(Rng& rng, std::size_t n, std::size_t k, double noise);

} // namespace topicseg::synth
