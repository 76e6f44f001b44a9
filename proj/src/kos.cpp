#include "topicseg/kos.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "topicseg/corpus.hpp"
#include "topicseg/error.hpp"
#include "topicseg/text.hpp"

namespace topicseg {

using nlohmann::json;

Thesaurus::Thesaurus(std::vector<Descriptor> descriptors) : descriptors_(std::move(descriptors)) {
    for (std::size_t i = 0; i < descriptors_.size(); ++i) {
        const auto& d = descriptors_[i];
        if (d.id.empty()) throw ValidationError("descriptor with empty id");
        if (!by_id_.emplace(d.id, i).second) throw ValidationError("duplicate descriptor id \"" + d.id + "\"");
        if (!label_index_.emplace(text::fold_case(d.preferred_label), i).second) {
            throw ValidationError("duplicate preferred label \"" + d.preferred_label + "\"");
        }
    }
    for (std::size_t i = 0; i < descriptors_.size(); ++i) {
        for (const auto& syn : descriptors_[i].synonyms) {
            auto folded = text::fold_case(syn);
            auto label_hit = label_index_.find(folded);
            if (label_hit != label_index_.end() && label_hit->second != i) {
                throw ValidationError("synonym \"" + syn + "\" collides with label of " +
                                      descriptors_[label_hit->second].id);
            }
            auto [it, inserted] = synonym_index_.emplace(std::move(folded), i);
            if (!inserted && it->second != i) {
                throw ValidationError("synonym \"" + syn + "\" resolves to both " + descriptors_[it->second].id +
                                      " and " + descriptors_[i].id);
            }
        }
    }
}

Thesaurus Thesaurus::load(const std::filesystem::path& path) {
    return parse(detail::read_file(path), path.string());
}

Thesaurus Thesaurus::parse(std::string_view text, const std::string& source) {
    std::vector<Descriptor> descriptors;
    detail::for_each_array_record(text, source, [&](const json& j, std::size_t) {
        descriptors.push_back({detail::require_string(j, "id"), detail::require_string(j, "label"),
                               detail::optional_strings(j, "synonyms")});
    });
    return Thesaurus(std::move(descriptors));
}

std::optional<std::string> Thesaurus::resolve(std::string_view term) const {
    const auto folded = text::fold_case(term);
    if (auto it = label_index_.find(folded); it != label_index_.end()) return descriptors_[it->second].id;
    if (auto it = synonym_index_.find(folded); it != synonym_index_.end()) return descriptors_[it->second].id;
    return std::nullopt;
}

const Descriptor* Thesaurus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &descriptors_[it->second];
}

Classification::Classification(std::vector<Category> categories) : categories_(std::move(categories)) {
    for (std::size_t i = 0; i < categories_.size(); ++i) {
        if (categories_[i].code.empty()) throw ValidationError("category with empty code");
        if (!by_code_.emplace(categories_[i].code, i).second) {
            throw ValidationError("duplicate category code \"" + categories_[i].code + "\"");
        }
    }
    // Depth <= 2: a parent must exist and must itself be a main class. This
    // also rules out cycles.
    for (const auto& c : categories_) {
        if (!c.parent) continue;
        const Category* parent = find(*c.parent);
        if (!parent) throw ValidationError("category " + c.code + " has unknown parent " + *c.parent);
        if (parent->parent) {
            throw ValidationError("category " + c.code + " nests deeper than main class / subclass");
        }
    }
}

Classification Classification::load(const std::filesystem::path& path) {
    return parse(detail::read_file(path), path.string());
}

Classification Classification::parse(std::string_view text, const std::string& source) {
    std::vector<Category> categories;
    detail::for_each_array_record(text, source, [&](const json& j, std::size_t) {
        Category c{detail::require_string(j, "code"), detail::require_string(j, "label"), std::nullopt};
        if (auto it = j.find("parent"); it != j.end() && !it->is_null()) c.parent = it->get<std::string>();
        categories.push_back(std::move(c));
    });
    return Classification(std::move(categories));
}

const Category* Classification::find(std::string_view code) const {
    auto it = by_code_.find(std::string(code));
    return it == by_code_.end() ? nullptr : &categories_[it->second];
}

std::string Classification::label_of(std::string_view code) const {
    const Category* c = find(code);
    return c ? c->label : std::string(code);
}

bool Classification::parent_child(std::string_view a, std::string_view b) const {
    const Category* ca = find(a);
    const Category* cb = find(b);
    if (!ca || !cb) return false;
    return (ca->parent && *ca->parent == cb->code) || (cb->parent && *cb->parent == ca->code);
}

std::string_view to_string(Relation r) noexcept {
    switch (r) {
    case Relation::exact: return "exact";
    case Relation::broader: return "broader";
    case Relation::narrower: return "narrower";
    }
    return "exact";
}

std::optional<Relation> relation_from_string(std::string_view s) noexcept {
    if (s == "exact") return Relation::exact;
    if (s == "broader") return Relation::broader;
    if (s == "narrower") return Relation::narrower;
    return std::nullopt;
}

namespace {

std::string crosswalk_key(std::string_view vocab, std::string_view term) {
    return text::fold_case(vocab) + '\x1f' + text::fold_case(term);
}

} // namespace

Crosswalk::Crosswalk(std::vector<CrosswalkEntry> entries, const Thesaurus& thesaurus)
    : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!thesaurus.contains(e.target_descriptor_id)) {
            throw ValidationError("crosswalk target \"" + e.target_descriptor_id + "\" is not a descriptor");
        }
        index_[crosswalk_key(e.source_vocabulary, e.source_term)].push_back(i);
    }
}

Crosswalk Crosswalk::load(const std::filesystem::path& path, const Thesaurus& thesaurus) {
    return parse(detail::read_file(path), thesaurus, path.string());
}

Crosswalk Crosswalk::parse(std::string_view text, const Thesaurus& thesaurus, const std::string& source) {
    std::vector<CrosswalkEntry> entries;
    detail::for_each_array_record(text, source, [&](const json& j, std::size_t) {
        const auto rel_text = detail::require_string(j, "relation");
        auto rel = relation_from_string(rel_text);
        if (!rel) throw detail::FieldError("unknown relation \"" + rel_text + "\"");
        entries.push_back({detail::require_string(j, "vocab"), detail::require_string(j, "term"),
                           detail::require_string(j, "target"), *rel});
    });
    return Crosswalk(std::move(entries), thesaurus);
}

std::vector<std::string> Crosswalk::map(std::string_view source_vocabulary, std::string_view term) const {
    auto it = index_.find(crosswalk_key(source_vocabulary, term));
    if (it == index_.end()) return {};
    std::vector<std::size_t> hits = it->second;
    std::stable_sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
        return entries_[a].relation < entries_[b].relation;
    });
    std::vector<std::string> out;
    out.reserve(hits.size());
    for (std::size_t i : hits) out.push_back(entries_[i].target_descriptor_id);
    return out;
}

std::optional<std::string> KeywordCategoryTable::lookup(std::string_view keyword) const {
    auto it = mapping_.find(std::string(keyword));
    if (it == mapping_.end()) return std::nullopt;
    return it->second;
}

json KeywordCategoryTable::to_json() const { return json(mapping_); }

KeywordCategoryTable KeywordCategoryTable::from_json(const json& j, const Classification* classification) {
    if (!j.is_object()) throw ValidationError("keyword/category table must be a JSON object");
    std::map<std::string, std::string> mapping;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string()) throw ValidationError("category for \"" + it.key() + "\" is not a string");
        auto code = it.value().get<std::string>();
        if (classification && classification->size() > 0 && !classification->contains(code)) {
            throw ValidationError("keyword \"" + it.key() + "\" maps to unknown category \"" + code + "\"");
        }
        mapping.emplace(it.key(), std::move(code));
    }
    return KeywordCategoryTable(std::move(mapping));
}

KeywordCategoryTable KeywordCategoryTable::load(const std::filesystem::path& path,
                                                const Classification* classification) {
    const auto text = detail::read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), detail::line_at(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    return from_json(j, classification);
}

KeywordCategoryTable build_keyword_category_table(const Corpus& corpus, const Thesaurus& thesaurus,
                                                  std::string_view native_vocabulary,
                                                  const Classification* classification) {
    // keyword -> category -> number of documents carrying both
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    for (const auto& doc : corpus.documents()) {
        if (doc.categories.empty()) continue;
        std::set<std::string> keywords;
        for (const auto& kw : doc.keywords) {
            if (kw.vocabulary != native_vocabulary) continue;
            if (auto id = thesaurus.resolve(kw.term)) keywords.insert(*id);
        }
        const std::set<std::string> categories(doc.categories.begin(), doc.categories.end());
        for (const auto& k : keywords) {
            auto& row = counts[k];
            for (const auto& c : categories) ++row[c];
        }
    }
    std::map<std::string, std::string> mapping;
    for (const auto& [keyword, row] : counts) {
        // std::map iterates codes ascending, so strict '>' keeps the smallest code on ties
        const std::string* best = nullptr;
        std::size_t best_count = 0;
        for (const auto& [code, n] : row) {
            if (n > best_count) {
                best = &code;
                best_count = n;
            }
        }
        if (!best) continue;
        if (classification && classification->size() > 0 && !classification->contains(*best)) {
            throw ValidationError("document category \"" + *best + "\" is not in the classification");
        }
        mapping.emplace(keyword, *best);
    }
    return KeywordCategoryTable(std::move(mapping));
}

} // namespace topicseg
