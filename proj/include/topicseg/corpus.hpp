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

#include "topicseg/kos.hpp"
#include "topicseg/text.hpp"

namespace topicseg {

struct DocumentKeyword {
    std::string vocabulary;
    std::string term;

    bool operator==(const DocumentKeyword&) const = default;
};

struct Document {
    std::string id;
    std::string title;
    std::optional<std::string> abstract;
    std::vector<DocumentKeyword> keywords;  // order is significant: most specific first
    std::vector<std::string> categories;
    std::vector<std::string> authors;
    std::optional<int> year;
};

/// "Author (Year): Title", shortening to "First, et al." beyond two authors.
std::string citation(const Document& doc);

class Corpus {
public:
    Corpus() = default;
    /// Throws ValidationError on a duplicate or empty id.
    explicit Corpus(std::vector<Document> documents);

    /// JSON Lines, one document per line.
    static Corpus load(const std::filesystem::path& path);
    static Corpus read(std::istream& in, const std::string& source = "<corpus>");

    const Document* find(std::string_view id) const;
    const std::vector<Document>& documents() const noexcept { return documents_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }

private:
    std::vector<Document> documents_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

Document document_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Document& doc);

struct StrEntry {
    std::string descriptor_id;
    double score = 0.0;

    bool operator==(const StrEntry&) const = default;
};

struct StrOptions {
    std::size_t min_count = 1;
    std::size_t top_k = 5;
    std::string native_vocabulary = "thesaurus";
};

/// Co-occurrence model from free title/abstract terms to thesaurus descriptors.
class StrModel {
public:
    using Mapping = std::unordered_map<std::string, std::vector<StrEntry>>;

    StrModel() = default;
    /// Sorts every list by descending score, ties by descriptor id.
    explicit StrModel(Mapping mapping);

    /// Descriptor ids for the case-folded term in score order; empty when unknown.
    std::vector<std::string> map(std::string_view term) const;
    const std::vector<StrEntry>* entries(std::string_view term) const;

    const Mapping& mapping() const noexcept { return mapping_; }
    std::size_t size() const noexcept { return mapping_.size(); }
    bool empty() const noexcept { return mapping_.empty(); }

    bool operator==(const StrModel&) const = default;

    /// {"term": [["descriptor", score], ...], ...} with terms in sorted order.
    nlohmann::json to_json() const;
    static StrModel from_json(const nlohmann::json& j);
    static StrModel load(const std::filesystem::path& path);

private:
    Mapping mapping_;
};

/// Free terms of a document: content terms of title and abstract, deduplicated.
std::vector<std::string> document_free_terms(const Document& doc, const text::StopWords& stop_words);

/// Controlled descriptors of a document: native keywords resolved in the
/// thesaurus, deduplicated, in keyword order.
std::vector<std::string> document_descriptors(const Document& doc, const Thesaurus& thesaurus,
                                              std::string_view native_vocabulary);

/// Dice-scored term/descriptor co-occurrence over the documents that carry at
/// least one controlled descriptor. Counts are split across OpenMP threads and
/// merged; the result equals build_str_model_serial exactly.
StrModel build_str_model(const Corpus& corpus, const Thesaurus& thesaurus, const text::StopWords& stop_words,
                         const StrOptions& options = {});
StrModel build_str_model_serial(const Corpus& corpus, const Thesaurus& thesaurus,
                                const text::StopWords& stop_words, const StrOptions& options = {});

} // namespace topicseg
