#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "topicseg/annotate.hpp"
#include "topicseg/corpus.hpp"
#include "topicseg/segment.hpp"
#include "topicseg/session.hpp"
#include "topicseg/topics.hpp"

namespace topicseg {

enum class Stage { annotate, topics, segment };

struct PipelineOptions {
    double epsilon = kDefaultEpsilon;
    Stage last_stage = Stage::segment;
};

/// Annotate, assign session topics and number topics for one session.
AnnotatedSession process_session(const Session& session, const Annotator& annotator,
                                 const PipelineOptions& options = {});

/// Sessions are independent, so they are spread over OpenMP threads. Output
/// order matches input order and is identical to process_sessions_serial.
std::vector<AnnotatedSession> process_sessions(const std::vector<Session>& sessions, const Annotator& annotator,
                                               const PipelineOptions& options = {});
std::vector<AnnotatedSession> process_sessions_serial(const std::vector<Session>& sessions,
                                                      const Annotator& annotator,
                                                      const PipelineOptions& options = {});

/// Topic numbering of annotated sessions, in parallel. Sessions missing a
/// session topic on any action get topics assigned first with `epsilon`.
void segment_sessions(std::vector<AnnotatedSession>& sessions, const text::StopWords& stop_words,
                      double epsilon = kDefaultEpsilon);

struct KnowledgePaths {
    std::filesystem::path thesaurus;
    std::filesystem::path classification;
    std::optional<std::filesystem::path> crosswalk;
    std::filesystem::path corpus;
    std::optional<std::filesystem::path> str_model;  // built from the corpus when absent
    std::optional<std::filesystem::path> lookup;     // built from the corpus when absent
    std::optional<std::filesystem::path> stopwords_en;
    std::optional<std::filesystem::path> stopwords_de;
    std::string native_vocabulary = "thesaurus";
    StrOptions str_options;
};

/// Stop words: built-in lists, with each language replaced by its file when given.
text::StopWords load_stop_words(const std::optional<std::filesystem::path>& english,
                                const std::optional<std::filesystem::path>& german);

KnowledgeBase load_knowledge_base(const KnowledgePaths& paths);

} // namespace topicseg
