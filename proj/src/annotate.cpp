#include "topicseg/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "topicseg/error.hpp"

namespace topicseg {

using nlohmann::json;

WeightedLabelList WeightedLabelList::accumulate(const std::vector<WeightedLabel>& contributions) {
    WeightedLabelList list;
    std::unordered_map<std::string, std::size_t> slot;
    for (const auto& c : contributions) {
        auto [it, inserted] = slot.emplace(c.label, list.entries_.size());
        if (inserted) {
            list.entries_.push_back(c);
        } else {
            list.entries_[it->second].weight += c.weight;
        }
    }
    std::sort(list.entries_.begin(), list.entries_.end(), [](const WeightedLabel& a, const WeightedLabel& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.label < b.label;
    });
    return list;
}

std::optional<double> WeightedLabelList::weight_of(std::string_view label) const {
    for (const auto& e : entries_) {
        if (e.label == label) return e.weight;
    }
    return std::nullopt;
}

double WeightedLabelList::total_weight() const noexcept {
    double sum = 0.0;
    for (const auto& e : entries_) sum += e.weight;
    return sum;
}

double keyword_weight(std::size_t position) {
    if (position < 1) throw std::domain_error("keyword position must be >= 1");
    return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

double document_factor(std::size_t rank) {
    if (rank < 1 || rank > kMaxResults) throw std::domain_error("result rank must lie in [1, 20]");
    // Exact decimal steps: (21 - rank) / 20 equals 1.05 - 0.05 * rank without
    // the binary rounding of 0.05.
    return static_cast<double>(21 - rank) / 20.0;
}

namespace {

void append_unique(std::vector<std::string>& out, std::vector<std::string> ids) {
    for (auto& id : ids) {
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(std::move(id));
    }
}

} // namespace

std::vector<std::string> resolve_document_keywords(const Document& doc, const KnowledgeBase& kb) {
    std::vector<std::string> ids;
    const bool has_native = std::any_of(doc.keywords.begin(), doc.keywords.end(), [&](const DocumentKeyword& k) {
        return k.vocabulary == kb.native_vocabulary;
    });
    if (has_native) {
        for (const auto& kw : doc.keywords) {
            if (kw.vocabulary != kb.native_vocabulary) continue;
            if (auto id = kb.thesaurus.resolve(kw.term)) append_unique(ids, {*id});
        }
        return ids;
    }
    if (!doc.keywords.empty()) {
        for (const auto& kw : doc.keywords) append_unique(ids, kb.crosswalk.map(kw.vocabulary, kw.term));
        return ids;
    }
    for (const auto& term : text::content_terms(doc.title, kb.stop_words)) {
        append_unique(ids, kb.str_model.map(term));
    }
    return ids;
}

WeightedLabelList derive_categories(const WeightedLabelList& keywords, const KeywordCategoryTable& table) {
    std::vector<WeightedLabel> contributions;
    contributions.reserve(keywords.size());
    for (const auto& kw : keywords) {
        if (auto code = table.lookup(kw.label)) contributions.push_back({*code, kw.weight});
    }
    return WeightedLabelList::accumulate(contributions);
}

DocumentKeywordIndex resolve_all_documents_serial(const KnowledgeBase& kb) {
    DocumentKeywordIndex index;
    index.reserve(kb.corpus.size());
    for (const auto& doc : kb.corpus.documents()) index.emplace(doc.id, resolve_document_keywords(doc, kb));
    return index;
}

DocumentKeywordIndex resolve_all_documents(const KnowledgeBase& kb) {
    const auto& docs = kb.corpus.documents();
    std::vector<std::vector<std::string>> resolved(docs.size());
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        resolved[k] = resolve_document_keywords(docs[k], kb);
    }
    DocumentKeywordIndex index;
    index.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) index.emplace(docs[i].id, std::move(resolved[i]));
    return index;
}

Annotator::Annotator(const KnowledgeBase& kb) : kb_(&kb), index_(resolve_all_documents(kb)) {}

Annotator::Annotator(const KnowledgeBase& kb, DocumentKeywordIndex index) : kb_(&kb), index_(std::move(index)) {}

const std::vector<std::string>* Annotator::document_keywords(std::string_view doc_id) const {
    auto it = index_.find(std::string(doc_id));
    return it == index_.end() ? nullptr : &it->second;
}

AnnotatedAction Annotator::annotate_doc_view(const Action& action) const {
    AnnotatedAction out;
    out.action = action;
    const Document* doc = kb_->corpus.find(action.doc_id);
    const auto* keywords = document_keywords(action.doc_id);
    if (!doc || !keywords) {
        out.missing_docs.push_back(action.doc_id);
        out.citation = action.doc_id;
        out.flagged = true;
        return out;
    }
    out.citation = citation(*doc);
    std::vector<WeightedLabel> contributions;
    for (std::size_t p = 0; p < keywords->size(); ++p) {
        contributions.push_back({(*keywords)[p], keyword_weight(p + 1)});
    }
    out.keywords = WeightedLabelList::accumulate(contributions);
    out.categories = derive_categories(out.keywords, kb_->lookup);
    out.flagged = out.keywords.empty();
    return out;
}

AnnotatedAction Annotator::annotate_search(const Action& action) const {
    AnnotatedAction out;
    out.action = action;
    std::vector<WeightedLabel> contributions;
    const std::size_t n = std::min(action.result_doc_ids.size(), kMaxResults);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& id = action.result_doc_ids[r];
        const auto* keywords = document_keywords(id);
        if (!keywords) {
            out.missing_docs.push_back(id);
            continue;
        }
        const double factor = document_factor(r + 1);
        for (std::size_t p = 0; p < keywords->size(); ++p) {
            contributions.push_back({(*keywords)[p], keyword_weight(p + 1) * factor});
        }
    }
    out.keywords = WeightedLabelList::accumulate(contributions);
    out.categories = derive_categories(out.keywords, kb_->lookup);
    out.flagged = !out.missing_docs.empty();
    return out;
}

AnnotatedAction Annotator::annotate(const Action& action) const {
    return action.kind == ActionKind::doc_view ? annotate_doc_view(action) : annotate_search(action);
}

AnnotatedSession Annotator::annotate(const Session& session) const {
    AnnotatedSession out{session.id, session.user_key, {}};
    out.actions.reserve(session.actions.size());
    for (const auto& a : session.actions) out.actions.push_back(annotate(a));
    return out;
}

namespace {

json pairs_to_json(const std::vector<WeightedLabel>& list) {
    json arr = json::array();
    for (const auto& e : list) arr.push_back(json::array({e.label, e.weight}));
    return arr;
}

std::vector<WeightedLabel> pairs_from_json(const json& j) {
    std::vector<WeightedLabel> list;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) throw detail::FieldError("expected [label, weight] pairs");
        list.push_back({pair[0].get<std::string>(), pair[1].get<double>()});
    }
    return list;
}

} // namespace

json to_json(const AnnotatedAction& a, const Classification* classification) {
    json j = to_json(a.action);
    j["keywords"] = pairs_to_json(a.keywords.entries());
    j["categories"] = pairs_to_json(a.categories.entries());
    if (!a.ranked_categories.empty()) j["ranked_categories"] = pairs_to_json(a.ranked_categories);
    if (!a.session_topic.empty()) {
        j["session_topic"] = a.session_topic;
        if (classification) j["session_topic_label"] = classification->label_of(a.session_topic);
    }
    if (a.topic_number > 0) j["topic_number"] = a.topic_number;
    if (!a.citation.empty()) j["citation"] = a.citation;
    if (!a.missing_docs.empty()) j["missing_docs"] = a.missing_docs;
    if (a.flagged) j["flagged"] = true;
    return j;
}

json to_json(const AnnotatedSession& s, const Classification* classification) {
    json actions = json::array();
    for (const auto& a : s.actions) actions.push_back(to_json(a, classification));
    return {{"id", s.id}, {"user", s.user_key}, {"actions", std::move(actions)}};
}

AnnotatedAction annotated_action_from_json(const json& j) {
    AnnotatedAction a;
    a.action = action_from_json(j);
    if (auto it = j.find("keywords"); it != j.end()) a.keywords = WeightedLabelList::accumulate(pairs_from_json(*it));
    if (auto it = j.find("categories"); it != j.end()) {
        a.categories = WeightedLabelList::accumulate(pairs_from_json(*it));
    }
    if (auto it = j.find("ranked_categories"); it != j.end()) a.ranked_categories = pairs_from_json(*it);
    a.session_topic = j.value("session_topic", std::string());
    a.topic_number = j.value("topic_number", std::size_t{0});
    a.citation = j.value("citation", std::string());
    a.missing_docs = detail::optional_strings(j, "missing_docs");
    a.flagged = j.value("flagged", false);
    return a;
}

AnnotatedSession annotated_session_from_json(const json& j) {
    AnnotatedSession s;
    s.id = detail::require_string(j, "id");
    s.user_key = j.value("user", std::string());
    for (const auto& a : j.at("actions")) s.actions.push_back(annotated_action_from_json(a));
    if (s.actions.empty()) throw detail::FieldError("session " + s.id + " has no actions");
    return s;
}

void write_annotated(std::ostream& out, const std::vector<AnnotatedSession>& sessions,
                     const Classification* classification) {
    for (const auto& s : sessions) out << to_json(s, classification).dump() << '\n';
}

std::vector<AnnotatedSession> read_annotated(std::istream& in, const std::string& source) {
    std::vector<AnnotatedSession> sessions;
    detail::for_each_json_line(in, source, [&](const json& j, std::size_t) {
        sessions.push_back(annotated_session_from_json(j));
    });
    return sessions;
}

std::vector<AnnotatedSession> read_annotated(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return read_annotated(in, path.string());
}

} // namespace topicseg
