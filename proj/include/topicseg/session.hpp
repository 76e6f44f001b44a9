#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace topicseg {

enum class ActionKind { simple_search, advanced_search, facet_search, doc_view };

std::string_view to_string(ActionKind kind) noexcept;
std::optional<ActionKind> action_kind_from_string(std::string_view s) noexcept;
/// Human-readable label used in rendered tables ("Simple search", "Document View", ...).
std::string_view display_name(ActionKind kind) noexcept;

constexpr bool is_search(ActionKind kind) noexcept { return kind != ActionKind::doc_view; }

/// Result lists are cut to this many documents.
inline constexpr std::size_t kMaxResults = 20;

/// One log line after parsing.
struct RawEvent {
    std::size_t line = 0;
    double timestamp = 0.0;
    std::string user_key;
    ActionKind kind = ActionKind::simple_search;
    std::vector<std::string> query_terms;
    std::vector<std::string> facet_terms;
    std::string doc_id;
    std::vector<std::string> result_doc_ids;
};

struct Action {
    std::size_t index = 1;  // 1-based within the session
    ActionKind kind = ActionKind::simple_search;
    double timestamp = 0.0;
    std::vector<std::string> query_terms;
    std::vector<std::string> facet_terms;
    std::string doc_id;
    std::vector<std::string> result_doc_ids;

    bool operator==(const Action&) const = default;
};

struct Session {
    std::string id;
    std::string user_key;
    std::vector<Action> actions;

    double duration() const noexcept {
        return actions.empty() ? 0.0 : actions.back().timestamp - actions.front().timestamp;
    }
    bool operator==(const Session&) const = default;
};

/// One log record; parse_log wraps its failures in ParseError.
RawEvent parse_event(const nlohmann::json& j, std::size_t line);

/// Events in file order. Malformed lines and unknown kinds raise ParseError
/// naming the line.
std::vector<RawEvent> parse_log(const std::filesystem::path& path);
std::vector<RawEvent> parse_log(std::istream& in, const std::string& source = "<log>");

inline constexpr double kDefaultTimeoutSeconds = 30.0 * 60.0;

/// Groups each user's events into sessions, splitting where the gap to the
/// previous event exceeds `inactivity_timeout` or where time runs backwards.
/// Sessions are ordered by their first event in the input and numbered
/// "S000001", "S000002", ...
std::vector<Session> sessionize(const std::vector<RawEvent>& events, double inactivity_timeout = kDefaultTimeoutSeconds);

struct FilterOptions {
    std::size_t min_actions = 2;
    std::size_t max_actions = 30;
    double max_duration = 7200.0;
};

std::vector<Session> filter_sessions(const std::vector<Session>& sessions, const FilterOptions& options = {});

struct SampleOptions {
    std::size_t target_n = 100;
    std::size_t per_length_cap = 4;
    std::uint64_t seed = 1;
};

/// Up to `per_length_cap` sessions per action count, lengths ascending, until
/// `target_n` are taken. Selection within a length is a seeded shuffle.
std::vector<Session> sample_evaluation_set(const std::vector<Session>& sessions, const SampleOptions& options = {});

struct DatasetStats {
    std::size_t sessions = 0;
    std::size_t total_actions = 0;
    double mean_actions = 0.0;
    std::size_t min_actions = 0;
    std::size_t max_actions = 0;
    std::map<ActionKind, std::size_t> per_kind;
    double mean_duration = 0.0;

    std::size_t count(ActionKind kind) const {
        auto it = per_kind.find(kind);
        return it == per_kind.end() ? 0 : it->second;
    }
};

DatasetStats dataset_stats(const std::vector<Session>& sessions);
nlohmann::json to_json(const DatasetStats& stats);

nlohmann::json to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Session& session);
Session session_from_json(const nlohmann::json& j);

void write_sessions(std::ostream& out, const std::vector<Session>& sessions);
std::vector<Session> read_sessions(std::istream& in, const std::string& source = "<sessions>");
std::vector<Session> read_sessions(const std::filesystem::path& path);

} // namespace topicseg
