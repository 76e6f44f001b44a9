#include "topicseg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json_util.hpp"
#include "topicseg/error.hpp"

namespace topicseg {

using nlohmann::json;

std::string citation(const Document& doc) {
    std::string out;
    if (doc.authors.size() == 1) {
        out = doc.authors[0];
    } else if (doc.authors.size() == 2) {
        out = doc.authors[0] + "; " + doc.authors[1];
    } else if (doc.authors.size() > 2) {
        out = doc.authors[0] + ", et al.";
    }
    const std::string year = doc.year ? std::to_string(*doc.year) : std::string("n.d.");
    if (!out.empty()) out += ' ';
    out += "(" + year + "): " + doc.title;
    return out;
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
    by_id_.reserve(documents_.size());
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        if (documents_[i].id.empty()) throw ValidationError("document with empty id");
        if (!by_id_.emplace(documents_[i].id, i).second) {
            throw ValidationError("duplicate document id \"" + documents_[i].id + "\"");
        }
    }
}

Document document_from_json(const json& j) {
    Document d;
    d.id = detail::require_string(j, "id");
    d.title = j.value("title", std::string());
    if (auto it = j.find("abstract"); it != j.end() && !it->is_null()) d.abstract = it->get<std::string>();
    if (auto it = j.find("keywords"); it != j.end() && !it->is_null()) {
        for (const auto& kw : *it) {
            if (!kw.is_object()) throw detail::FieldError("keyword entries must be {\"vocab\", \"term\"} objects");
            d.keywords.push_back({detail::require_string(kw, "vocab"), detail::require_string(kw, "term")});
        }
    }
    d.categories = detail::optional_strings(j, "categories");
    d.authors = detail::optional_strings(j, "authors");
    if (auto it = j.find("year"); it != j.end() && !it->is_null()) d.year = it->get<int>();
    return d;
}

json to_json(const Document& doc) {
    json kws = json::array();
    for (const auto& kw : doc.keywords) kws.push_back({{"vocab", kw.vocabulary}, {"term", kw.term}});
    json j = {{"id", doc.id}, {"title", doc.title}, {"keywords", kws}, {"categories", doc.categories},
              {"authors", doc.authors}};
    if (doc.abstract) j["abstract"] = *doc.abstract;
    if (doc.year) j["year"] = *doc.year;
    return j;
}

Corpus Corpus::read(std::istream& in, const std::string& source) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    detail::for_each_json_line(in, source, [&](const json& j, std::size_t line) {
        docs.push_back(document_from_json(j));
        if (!seen.insert(docs.back().id).second) {
            throw ValidationError(source + ":" + std::to_string(line) + ": duplicate document id \"" +
                                  docs.back().id + "\"");
        }
    });
    return Corpus(std::move(docs));
}

Corpus Corpus::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return read(in, path.string());
}

const Document* Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &documents_[it->second];
}

namespace {

void sort_entries(std::vector<StrEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const StrEntry& a, const StrEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.descriptor_id < b.descriptor_id;
    });
}

} // namespace

StrModel::StrModel(Mapping mapping) : mapping_(std::move(mapping)) {
    for (auto& [term, entries] : mapping_) sort_entries(entries);
}

const std::vector<StrEntry>* StrModel::entries(std::string_view term) const {
    auto it = mapping_.find(text::fold_case(term));
    return it == mapping_.end() ? nullptr : &it->second;
}

std::vector<std::string> StrModel::map(std::string_view term) const {
    std::vector<std::string> ids;
    if (const auto* list = entries(term)) {
        ids.reserve(list->size());
        for (const auto& e : *list) ids.push_back(e.descriptor_id);
    }
    return ids;
}

json StrModel::to_json() const {
    std::map<std::string, const std::vector<StrEntry>*> sorted;
    for (const auto& [term, entries] : mapping_) sorted.emplace(term, &entries);
    json j = json::object();
    for (const auto& [term, entries] : sorted) {
        json list = json::array();
        for (const auto& e : *entries) list.push_back(json::array({e.descriptor_id, e.score}));
        j[term] = std::move(list);
    }
    return j;
}

StrModel StrModel::from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("STR model must be a JSON object");
    Mapping mapping;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::vector<StrEntry> entries;
        for (const auto& pair : it.value()) {
            if (!pair.is_array() || pair.size() != 2) {
                throw ValidationError("STR entry for \"" + it.key() + "\" must be [descriptor, score]");
            }
            const double score = pair[1].get<double>();
            if (!(score > 0.0 && score <= 1.0)) {
                throw ValidationError("STR score for \"" + it.key() + "\" outside (0, 1]");
            }
            entries.push_back({pair[0].get<std::string>(), score});
        }
        mapping.emplace(text::fold_case(it.key()), std::move(entries));
    }
    return StrModel(std::move(mapping));
}

StrModel StrModel::load(const std::filesystem::path& path) {
    const auto text = detail::read_file(path);
    try {
        return from_json(json::parse(text));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string(), detail::line_at(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
}

std::vector<std::string> document_free_terms(const Document& doc, const text::StopWords& stop_words) {
    std::vector<std::string> terms = text::content_terms(doc.title, stop_words);
    if (doc.abstract) {
        auto more = text::content_terms(*doc.abstract, stop_words);
        terms.insert(terms.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    std::unordered_set<std::string> seen;
    std::vector<std::string> unique;
    for (auto& t : terms) {
        if (seen.insert(t).second) unique.push_back(std::move(t));
    }
    return unique;
}

std::vector<std::string> document_descriptors(const Document& doc, const Thesaurus& thesaurus,
                                              std::string_view native_vocabulary) {
    std::vector<std::string> ids;
    for (const auto& kw : doc.keywords) {
        if (kw.vocabulary != native_vocabulary) continue;
        auto id = thesaurus.resolve(kw.term);
        if (id && std::find(ids.begin(), ids.end(), *id) == ids.end()) ids.push_back(std::move(*id));
    }
    return ids;
}

namespace {

struct CoCounts {
    std::unordered_map<std::string, std::size_t> term;
    std::unordered_map<std::string, std::size_t> descriptor;
    // term -> descriptor -> documents
    std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> pair;

    void add(const std::vector<std::string>& terms, const std::vector<std::string>& descriptors) {
        for (const auto& d : descriptors) ++descriptor[d];
        for (const auto& t : terms) {
            ++term[t];
            auto& row = pair[t];
            for (const auto& d : descriptors) ++row[d];
        }
    }

    void merge(CoCounts&& other) {
        for (auto& [k, n] : other.term) term[k] += n;
        for (auto& [k, n] : other.descriptor) descriptor[k] += n;
        for (auto& [t, row] : other.pair) {
            auto& mine = pair[t];
            for (auto& [d, n] : row) mine[d] += n;
        }
    }
};

void count_document(CoCounts& counts, const Document& doc, const Thesaurus& thesaurus,
                    const text::StopWords& stop_words, const StrOptions& options) {
    auto descriptors = document_descriptors(doc, thesaurus, options.native_vocabulary);
    if (descriptors.empty()) return;
    counts.add(document_free_terms(doc, stop_words), descriptors);
}

StrModel finish(const CoCounts& counts, const StrOptions& options) {
    StrModel::Mapping mapping;
    for (const auto& [t, row] : counts.pair) {
        std::vector<StrEntry> entries;
        const auto nt = counts.term.at(t);
        for (const auto& [d, n] : row) {
            if (n < options.min_count) continue;
            const auto nd = counts.descriptor.at(d);
            entries.push_back({d, 2.0 * static_cast<double>(n) / static_cast<double>(nt + nd)});
        }
        if (entries.empty()) continue;
        sort_entries(entries);
        if (entries.size() > options.top_k) entries.resize(options.top_k);
        mapping.emplace(t, std::move(entries));
    }
    return StrModel(std::move(mapping));
}

void check_options(const StrOptions& options) {
    if (options.min_count < 1) throw InputError("min_count must be >= 1");
    if (options.top_k < 1) throw InputError("top_k must be >= 1");
}

} // namespace

StrModel build_str_model_serial(const Corpus& corpus, const Thesaurus& thesaurus,
                                const text::StopWords& stop_words, const StrOptions& options) {
    check_options(options);
    CoCounts counts;
    for (const auto& doc : corpus.documents()) count_document(counts, doc, thesaurus, stop_words, options);
    return finish(counts, options);
}

StrModel build_str_model(const Corpus& corpus, const Thesaurus& thesaurus, const text::StopWords& stop_words,
                         const StrOptions& options) {
    check_options(options);
    const auto& docs = corpus.documents();
    const auto n = static_cast<std::ptrdiff_t>(docs.size());
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::vector<CoCounts> partial(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
    {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        auto& local = partial[static_cast<std::size_t>(tid)];
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            count_document(local, docs[static_cast<std::size_t>(i)], thesaurus, stop_words, options);
        }
    }
    CoCounts total = std::move(partial[0]);
    for (std::size_t i = 1; i < partial.size(); ++i) total.merge(std::move(partial[i]));
    return finish(total, options);
}

} // namespace topicseg
