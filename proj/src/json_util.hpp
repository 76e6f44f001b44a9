#pragma once

// Internal helpers shared by the file loaders.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "topicseg/error.hpp"

namespace topicseg::detail {

/// Thrown by record visitors; the enclosing loader adds source and line.
class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::size_t line_at(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

/// Byte offsets at which the elements of a top-level JSON array start.
inline std::vector<std::size_t> array_element_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    int depth = 0;
    bool in_string = false;
    bool escape = false;
    bool expect_element = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escape) {
                escape = false;
            } else if (c == '\\') {
                escape = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
        if (depth == 1 && expect_element && c != ']') {
            offsets.push_back(i);
            expect_element = false;
        }
        switch (c) {
        case '"': in_string = true; break;
        case '[':
        case '{':
            ++depth;
            if (depth == 1 && c == '[') expect_element = true;
            break;
        case ']':
        case '}': --depth; break;
        case ',':
            if (depth == 1) expect_element = true;
            break;
        default: break;
        }
    }
    return offsets;
}

/// Parse a file holding one JSON array of objects and hand each element with
/// its source line to `visit`. Blank input is an empty array.
inline void for_each_array_record(std::string_view text, const std::string& source,
                                  const std::function<void(const nlohmann::json&, std::size_t)>& visit) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, line_at(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    if (!doc.is_array()) throw ParseError(source, 1, "expected a JSON array");
    const auto offsets = array_element_offsets(text);
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::size_t line = i < offsets.size() ? line_at(text, offsets[i]) : 0;
        if (!doc[i].is_object()) throw ParseError(source, line, "expected an object");
        try {
            visit(doc[i], line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(source, line, e.what());
        } catch (const FieldError& e) {
            throw ParseError(source, line, e.what());
        }
    }
}

/// JSON Lines: one object per non-blank line.
inline void for_each_json_line(std::istream& in, const std::string& source,
                               const std::function<void(const nlohmann::json&, std::size_t)>& visit) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(source, number, e.what());
        }
        if (!j.is_object()) throw ParseError(source, number, "expected a JSON object");
        try {
            visit(j, number);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(source, number, e.what());
        } catch (const FieldError& e) {
            throw ParseError(source, number, e.what());
        }
    }
}

inline void for_each_json_line(const std::filesystem::path& path,
                               const std::function<void(const nlohmann::json&, std::size_t)>& visit) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    for_each_json_line(in, path.string(), visit);
}

inline std::string require_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw FieldError(std::string("missing string field \"") + key + "\"");
    }
    return it->get<std::string>();
}

inline std::vector<std::string> optional_strings(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    return it->get<std::vector<std::string>>();
}

} // namespace topicseg::detail
