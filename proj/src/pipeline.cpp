#include "topicseg/pipeline.hpp"

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>

namespace topicseg {

namespace {

/// Holds the first exception raised inside a parallel loop for rethrow outside it.
class FirstError {
public:
    template <typename F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr error_;
};

void finish_session(AnnotatedSession& s, const text::StopWords& stop_words, const PipelineOptions& options) {
    if (options.last_stage == Stage::annotate) return;
    assign_session_topics(s, options.epsilon);
    if (options.last_stage == Stage::topics) return;
    assign_topic_numbers(s, stop_words);
}

} // namespace

AnnotatedSession process_session(const Session& session, const Annotator& annotator, const PipelineOptions& options) {
    AnnotatedSession out = annotator.annotate(session);
    finish_session(out, annotator.knowledge().stop_words, options);
    return out;
}

std::vector<AnnotatedSession> process_sessions_serial(const std::vector<Session>& sessions,
                                                      const Annotator& annotator, const PipelineOptions& options) {
    std::vector<AnnotatedSession> out;
    out.reserve(sessions.size());
    for (const auto& s : sessions) out.push_back(process_session(s, annotator, options));
    return out;
}

std::vector<AnnotatedSession> process_sessions(const std::vector<Session>& sessions, const Annotator& annotator,
                                               const PipelineOptions& options) {
    std::vector<AnnotatedSession> out(sessions.size());
    FirstError error;
    const auto n = static_cast<std::ptrdiff_t>(sessions.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        error.run([&] { out[k] = process_session(sessions[k], annotator, options); });
    }
    error.rethrow();
    return out;
}

void segment_sessions(std::vector<AnnotatedSession>& sessions, const text::StopWords& stop_words, double epsilon) {
    FirstError error;
    const auto n = static_cast<std::ptrdiff_t>(sessions.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        error.run([&] {
            auto& s = sessions[static_cast<std::size_t>(i)];
            const bool missing = std::any_of(s.actions.begin(), s.actions.end(),
                                             [](const AnnotatedAction& a) { return a.session_topic.empty(); });
            if (missing) assign_session_topics(s, epsilon);
            assign_topic_numbers(s, stop_words);
        });
    }
    error.rethrow();
}

text::StopWords load_stop_words(const std::optional<std::filesystem::path>& english,
                                const std::optional<std::filesystem::path>& german) {
    text::StopWords sw = english ? text::StopWords::load(*english) : text::StopWords::english();
    sw.merge(german ? text::StopWords::load(*german) : text::StopWords::german());
    return sw;
}

KnowledgeBase load_knowledge_base(const KnowledgePaths& paths) {
    KnowledgeBase kb;
    kb.native_vocabulary = paths.native_vocabulary;
    kb.stop_words = load_stop_words(paths.stopwords_en, paths.stopwords_de);
    kb.thesaurus = Thesaurus::load(paths.thesaurus);
    kb.classification = Classification::load(paths.classification);
    if (paths.crosswalk) kb.crosswalk = Crosswalk::load(*paths.crosswalk, kb.thesaurus);
    kb.corpus = Corpus::load(paths.corpus);
    kb.lookup = paths.lookup ? KeywordCategoryTable::load(*paths.lookup, &kb.classification)
                             : build_keyword_category_table(kb.corpus, kb.thesaurus, kb.native_vocabulary,
                                                            &kb.classification);
    if (paths.str_model) {
        kb.str_model = StrModel::load(*paths.str_model);
    } else {
        StrOptions opts = paths.str_options;
        opts.native_vocabulary = paths.native_vocabulary;
        kb.str_model = build_str_model(kb.corpus, kb.thesaurus, kb.stop_words, opts);
    }
    return kb;
}

} // namespace topicseg
