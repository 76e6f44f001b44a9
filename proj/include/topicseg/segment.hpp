#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "topicseg/annotate.hpp"
#include "topicseg/text.hpp"

namespace topicseg {

/// Two terms are related when their case-folded edit distance is at most this.
inline constexpr std::size_t kRelatedTermDistance = 2;

/// Query and facet terms of a search action under the shared term rule.
/// Doc views yield nothing.
std::vector<std::string> normalize_query_terms(const Action& action, const text::StopWords& stop_words);

bool terms_related(std::string_view a, std::string_view b);

bool queries_share_term(const Action& a, const Action& b, const text::StopWords& stop_words);

/// Walks the session in order and, for each action, looks backwards:
/// first for an action with the same session topic (rule 1), then, for
/// searches only, for an earlier search sharing a related query term
/// (rule 2). A hit reuses that action's topic number; otherwise the next
/// fresh number is issued. Requires session_topic on every action.
void assign_topic_numbers(AnnotatedSession& session, const text::StopWords& stop_words);

struct Segment {
    std::size_t topic_number = 0;
    std::size_t first = 0;  // 1-based action steps, inclusive
    std::size_t last = 0;
    std::vector<std::string> session_topics;  // distinct, in order of appearance

    bool operator==(const Segment&) const = default;
};

/// Maximal runs of equal consecutive topic numbers.
std::vector<Segment> segments(const AnnotatedSession& session);

/// Action-step indices (1-based) after which a segment boundary falls.
std::vector<std::size_t> boundaries(const AnnotatedSession& session);

struct RenderOptions {
    const Corpus* corpus = nullptr;                  // citations for doc views lacking one
    const Classification* classification = nullptr;  // topic labels instead of codes
};

/// Plain-text table with a dashed separator between rows whose topic numbers differ.
std::string render_text(const AnnotatedSession& session, const RenderOptions& options = {});

/// Standalone HTML table; rows opening a new segment carry a dashed red top border.
std::string render_html(const AnnotatedSession& session, const RenderOptions& options = {});

/// Terms shown in the "user search terms" column: query terms, or clicked
/// facet terms for facet searches.
std::string display_terms(const Action& action);

/// Citation shown for a doc view: stored citation, corpus lookup, or raw id.
std::string display_citation(const AnnotatedAction& action, const Corpus* corpus);

/// Diagnostic: adjacent actions whose topics are a main class and one of its own subclasses.
std::size_t class_subclass_alternations(const AnnotatedSession& session, const Classification& classification);

} // namespace topicseg
