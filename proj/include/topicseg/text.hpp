#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace topicseg::text {

/// Decode UTF-8 into code points. Invalid bytes decode as their Latin-1 value.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Simple (one-to-one) lowercase mapping covering Latin, Greek and Cyrillic.
char32_t fold_char(char32_t c) noexcept;
std::string fold_case(std::string_view s);

/// Letters and digits. Non-ASCII code points count as letters unless they sit
/// in a known punctuation/symbol block.
bool is_word_char(char32_t c) noexcept;

/// Case-folded words of `s`, split on every non-word character.
std::vector<std::string> split_words(std::string_view s);

/// Length in code points.
std::size_t length(std::string_view s);

class StopWords {
public:
    StopWords() = default;
    explicit StopWords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    /// Built-in English and German lists.
    static StopWords defaults();
    static StopWords english();
    static StopWords german();
    /// One word per line; blank lines and lines starting with '#' are ignored.
    static StopWords load(const std::filesystem::path& path);

    void merge(const StopWords& other);
    bool contains(std::string_view folded_word) const;
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

/// Shared term rule: split on non-word chars, case-fold, drop stop words,
/// keep words longer than three code points.
std::vector<std::string> content_terms(std::string_view s, const StopWords& stop_words);

/// Unit-cost Levenshtein distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

/// True when levenshtein(a, b) <= bound; stops early once the bound is exceeded.
bool within_edit_distance(std::u32string_view a, std::u32string_view b, std::size_t bound);

} // namespace topicseg::text
