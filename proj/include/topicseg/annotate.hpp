#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "topicseg/corpus.hpp"
#include "topicseg/kos.hpp"
#include "topicseg/session.hpp"
#include "topicseg/text.hpp"

namespace topicseg {

struct WeightedLabel {
    std::string label;
    double weight = 0.0;

    bool operator==(const WeightedLabel&) const = default;
};

/// (label, weight) pairs with unique labels, sorted by descending weight and
/// then by label.
class WeightedLabelList {
public:
    WeightedLabelList() = default;

    /// Sums the weights of repeated labels (in input order) and sorts.
    static WeightedLabelList accumulate(const std::vector<WeightedLabel>& contributions);

    const std::vector<WeightedLabel>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t size() const noexcept { return entries_.size(); }
    const WeightedLabel& operator[](std::size_t i) const { return entries_[i]; }
    std::optional<double> weight_of(std::string_view label) const;
    double total_weight() const noexcept;

    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    bool operator==(const WeightedLabelList&) const = default;

private:
    std::vector<WeightedLabel> entries_;
};

/// Everything the annotator reads. Immutable once assembled.
struct KnowledgeBase {
    Thesaurus thesaurus;
    Classification classification;
    Crosswalk crosswalk;
    Corpus corpus;
    StrModel str_model;
    KeywordCategoryTable lookup;
    text::StopWords stop_words = text::StopWords::defaults();
    std::string native_vocabulary = "thesaurus";
};

/// Discount for the keyword at 1-based `position`: 1 / log2(position + 1).
double keyword_weight(std::size_t position);

/// Linear damping for the result at 1-based `rank` in [1, 20]: 1.05 - 0.05 * rank.
double document_factor(std::size_t rank);

/// Ordered thesaurus descriptors for a document. Strict fallback chain:
/// native keywords, else crosswalk-mapped foreign keywords, else title terms
/// through the STR model. Later duplicates are dropped.
std::vector<std::string> resolve_document_keywords(const Document& doc, const KnowledgeBase& kb);

/// Category weight = sum of the weights of keywords mapped to it.
WeightedLabelList derive_categories(const WeightedLabelList& keywords, const KeywordCategoryTable& table);

struct AnnotatedAction {
    Action action;
    WeightedLabelList keywords;
    WeightedLabelList categories;
    std::vector<WeightedLabel> ranked_categories;  // categories after session-global re-ranking
    std::string session_topic;
    std::size_t topic_number = 0;
    std::string citation;                   // doc views only
    std::vector<std::string> missing_docs;  // referenced ids absent from the corpus
    bool flagged = false;                   // missing docs, or a doc view without keywords

    bool operator==(const AnnotatedAction&) const = default;
};

struct AnnotatedSession {
    std::string id;
    std::string user_key;
    std::vector<AnnotatedAction> actions;

    bool operator==(const AnnotatedSession&) const = default;
};

/// Resolved keyword lists for every corpus document, keyed by document id.
using DocumentKeywordIndex = std::unordered_map<std::string, std::vector<std::string>>;

/// Resolves all documents, splitting the corpus across OpenMP threads.
DocumentKeywordIndex resolve_all_documents(const KnowledgeBase& kb);
DocumentKeywordIndex resolve_all_documents_serial(const KnowledgeBase& kb);

class Annotator {
public:
    /// Borrows `kb`, which must outlive the annotator.
    explicit Annotator(const KnowledgeBase& kb);
    Annotator(const KnowledgeBase& kb, DocumentKeywordIndex index);

    const KnowledgeBase& knowledge() const noexcept { return *kb_; }
    const std::vector<std::string>* document_keywords(std::string_view doc_id) const;

    AnnotatedAction annotate_doc_view(const Action& action) const;
    AnnotatedAction annotate_search(const Action& action) const;
    AnnotatedAction annotate(const Action& action) const;
    AnnotatedSession annotate(const Session& session) const;

private:
    const KnowledgeBase* kb_;
    DocumentKeywordIndex index_;
};

/// `classification` adds "session_topic_label" when given.
nlohmann::json to_json(const AnnotatedAction& action, const Classification* classification = nullptr);
nlohmann::json to_json(const AnnotatedSession& session, const Classification* classification = nullptr);
AnnotatedAction annotated_action_from_json(const nlohmann::json& j);
AnnotatedSession annotated_session_from_json(const nlohmann::json& j);

void write_annotated(std::ostream& out, const std::vector<AnnotatedSession>& sessions,
                     const Classification* classification = nullptr);
std::vector<AnnotatedSession> read_annotated(std::istream& in, const std::string& source = "<annotated>");
std::vector<AnnotatedSession> read_annotated(const std::filesystem::path& path);

} // namespace topicseg
