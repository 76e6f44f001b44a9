#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace topicseg {

class Corpus;

struct Descriptor {
    std::string id;
    std::string preferred_label;
    std::vector<std::string> synonyms;
};

/// Controlled vocabulary: descriptors with preferred labels and synonyms.
/// Immutable once constructed; all lookups are case-folded.
class Thesaurus {
public:
    Thesaurus() = default;
    /// Throws ValidationError on duplicate ids, duplicate folded labels, or a
    /// synonym that would resolve to more than one descriptor.
    explicit Thesaurus(std::vector<Descriptor> descriptors);

    /// JSON array of {"id", "label", "synonyms": [...]}. An empty file is an empty thesaurus.
    static Thesaurus load(const std::filesystem::path& path);
    static Thesaurus parse(std::string_view text, const std::string& source = "<thesaurus>");

    std::optional<std::string> resolve(std::string_view term) const;
    const Descriptor* find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }

    const std::vector<Descriptor>& descriptors() const noexcept { return descriptors_; }
    std::size_t size() const noexcept { return descriptors_.size(); }
    std::size_t synonym_count() const noexcept { return synonym_index_.size(); }

private:
    std::vector<Descriptor> descriptors_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> label_index_;
    std::unordered_map<std::string, std::size_t> synonym_index_;
};

struct Category {
    std::string code;
    std::string label;
    std::optional<std::string> parent;
};

/// Two-level classification scheme (main classes and subclasses).
class Classification {
public:
    Classification() = default;
    explicit Classification(std::vector<Category> categories);

    /// JSON array of {"code", "label", "parent"?}.
    static Classification load(const std::filesystem::path& path);
    static Classification parse(std::string_view text, const std::string& source = "<classification>");

    const Category* find(std::string_view code) const;
    bool contains(std::string_view code) const { return find(code) != nullptr; }
    /// Label for `code`, or `code` itself when unknown.
    std::string label_of(std::string_view code) const;
    /// True when one code is the direct parent of the other.
    bool parent_child(std::string_view a, std::string_view b) const;

    const std::vector<Category>& categories() const noexcept { return categories_; }
    std::size_t size() const noexcept { return categories_.size(); }

private:
    std::vector<Category> categories_;
    std::unordered_map<std::string, std::size_t> by_code_;
};

enum class Relation { exact = 0, broader = 1, narrower = 2 };

std::string_view to_string(Relation r) noexcept;
std::optional<Relation> relation_from_string(std::string_view s) noexcept;

struct CrosswalkEntry {
    std::string source_vocabulary;
    std::string source_term;
    std::string target_descriptor_id;
    Relation relation = Relation::exact;
};

/// Cross-concordance from foreign vocabularies into the thesaurus.
class Crosswalk {
public:
    Crosswalk() = default;
    /// Every target must exist in `thesaurus`.
    Crosswalk(std::vector<CrosswalkEntry> entries, const Thesaurus& thesaurus);

    /// JSON array of {"vocab", "term", "target", "relation"}.
    static Crosswalk load(const std::filesystem::path& path, const Thesaurus& thesaurus);
    static Crosswalk parse(std::string_view text, const Thesaurus& thesaurus,
                           const std::string& source = "<crosswalk>");

    /// Targets for (vocabulary, term): exact before broader before narrower,
    /// file order within each relation.
    std::vector<std::string> map(std::string_view source_vocabulary, std::string_view term) const;

    const std::vector<CrosswalkEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<CrosswalkEntry> entries_;
    // (folded vocab, folded term) -> entry indices in file order
    std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

/// Descriptor id -> the category it co-occurs with most often in the corpus.
class KeywordCategoryTable {
public:
    KeywordCategoryTable() = default;
    explicit KeywordCategoryTable(std::map<std::string, std::string> mapping)
        : mapping_(std::move(mapping)) {}

    std::optional<std::string> lookup(std::string_view keyword) const;
    const std::map<std::string, std::string>& mapping() const noexcept { return mapping_; }
    std::size_t size() const noexcept { return mapping_.size(); }
    bool empty() const noexcept { return mapping_.empty(); }

    nlohmann::json to_json() const;
    /// Throws ValidationError if `classification` is non-empty and a code is unknown to it.
    static KeywordCategoryTable from_json(const nlohmann::json& j, const Classification* classification = nullptr);
    static KeywordCategoryTable load(const std::filesystem::path& path,
                                     const Classification* classification = nullptr);

private:
    std::map<std::string, std::string> mapping_;
};

/// Counts, per descriptor, the documents in which it co-occurs with each
/// category; keeps the most frequent category, smallest code on ties.
/// Only keywords tagged with `native_vocabulary` that resolve in the thesaurus
/// take part. Throws ValidationError if a chosen code is missing from a
/// non-empty classification.
KeywordCategoryTable build_keyword_category_table(const Corpus& corpus, const Thesaurus& thesaurus,
                                                  std::string_view native_vocabulary,
                                                  const Classification* classification = nullptr);

} // namespace topicseg
