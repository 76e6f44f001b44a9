#include "topicseg/session.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "topicseg/error.hpp"

namespace topicseg {

using nlohmann::json;

std::string_view to_string(ActionKind kind) noexcept {
    switch (kind) {
    case ActionKind::simple_search: return "simple_search";
    case ActionKind::advanced_search: return "advanced_search";
    case ActionKind::facet_search: return "facet_search";
    case ActionKind::doc_view: return "doc_view";
    }
    return "simple_search";
}

std::optional<ActionKind> action_kind_from_string(std::string_view s) noexcept {
    if (s == "simple_search") return ActionKind::simple_search;
    if (s == "advanced_search") return ActionKind::advanced_search;
    if (s == "facet_search") return ActionKind::facet_search;
    if (s == "doc_view") return ActionKind::doc_view;
    return std::nullopt;
}

std::string_view display_name(ActionKind kind) noexcept {
    switch (kind) {
    case ActionKind::simple_search: return "Simple search";
    case ActionKind::advanced_search: return "Advanced search";
    case ActionKind::facet_search: return "Facet search";
    case ActionKind::doc_view: return "Document View";
    }
    return "";
}

RawEvent parse_event(const json& j, std::size_t line) {
    RawEvent e;
    e.line = line;
    auto ts = j.find("ts");
    if (ts == j.end() || !ts->is_number()) throw detail::FieldError("missing numeric field \"ts\"");
    e.timestamp = ts->get<double>();

    const auto kind_text = detail::require_string(j, "kind");
    auto kind = action_kind_from_string(kind_text);
    if (!kind) throw detail::FieldError("unknown action kind \"" + kind_text + "\"");
    e.kind = *kind;

    // Session cookie wins; otherwise (user, client address).
    if (auto s = j.find("session"); s != j.end() && s->is_string() && !s->get<std::string>().empty()) {
        e.user_key = "session:" + s->get<std::string>();
    } else {
        e.user_key = "user:" + detail::require_string(j, "user");
        if (auto ip = j.find("ip"); ip != j.end() && ip->is_string()) e.user_key += "@" + ip->get<std::string>();
    }

    if (e.kind == ActionKind::doc_view) {
        e.doc_id = detail::require_string(j, "doc");
        return e;
    }
    e.query_terms = detail::optional_strings(j, "q");
    e.facet_terms = detail::optional_strings(j, "facets");
    if (auto fields = j.find("fields"); fields != j.end() && fields->is_object()) {
        for (auto it = fields->begin(); it != fields->end(); ++it) {
            if (it->is_string()) {
                e.query_terms.push_back(it->get<std::string>());
            } else if (it->is_array()) {
                for (const auto& v : *it) e.query_terms.push_back(v.get<std::string>());
            }
        }
    }
    e.result_doc_ids = detail::optional_strings(j, "results");
    if (e.result_doc_ids.size() > kMaxResults) e.result_doc_ids.resize(kMaxResults);
    return e;
}

std::vector<RawEvent> parse_log(std::istream& in, const std::string& source) {
    std::vector<RawEvent> events;
    detail::for_each_json_line(in, source, [&](const json& j, std::size_t line) {
        events.push_back(parse_event(j, line));
    });
    return events;
}

std::vector<RawEvent> parse_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return parse_log(in, path.string());
}

namespace {

std::string session_id(std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "S%06zu", n);
    return buf;
}

Action to_action(const RawEvent& e) {
    Action a;
    a.kind = e.kind;
    a.timestamp = e.timestamp;
    a.query_terms = e.query_terms;
    a.facet_terms = e.facet_terms;
    a.doc_id = e.doc_id;
    a.result_doc_ids = e.result_doc_ids;
    return a;
}

} // namespace

std::vector<Session> sessionize(const std::vector<RawEvent>& events, double inactivity_timeout) {
    if (!(inactivity_timeout > 0.0)) throw InputError("inactivity timeout must be positive");
    std::vector<Session> sessions;
    std::unordered_map<std::string, std::size_t> open;  // user key -> index of the user's current session
    for (const auto& e : events) {
        auto it = open.find(e.user_key);
        bool start_new = it == open.end();
        if (!start_new) {
            const double gap = e.timestamp - sessions[it->second].actions.back().timestamp;
            start_new = gap > inactivity_timeout || gap < 0.0;
        }
        if (start_new) {
            sessions.push_back({session_id(sessions.size() + 1), e.user_key, {}});
            open[e.user_key] = sessions.size() - 1;
            it = open.find(e.user_key);
        }
        auto& s = sessions[it->second];
        s.actions.push_back(to_action(e));
        s.actions.back().index = s.actions.size();
    }
    return sessions;
}

std::vector<Session> filter_sessions(const std::vector<Session>& sessions, const FilterOptions& options) {
    std::vector<Session> kept;
    for (const auto& s : sessions) {
        const auto n = s.actions.size();
        if (n >= options.min_actions && n <= options.max_actions && s.duration() <= options.max_duration) {
            kept.push_back(s);
        }
    }
    return kept;
}

std::vector<Session> sample_evaluation_set(const std::vector<Session>& sessions, const SampleOptions& options) {
    std::map<std::size_t, std::vector<std::size_t>> by_length;
    for (std::size_t i = 0; i < sessions.size(); ++i) by_length[sessions[i].actions.size()].push_back(i);

    std::mt19937_64 rng(options.seed);
    std::vector<Session> picked;
    for (auto& [length, indices] : by_length) {
        if (picked.size() >= options.target_n) break;
        // Fisher-Yates driven directly by the engine
        for (std::size_t i = indices.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(indices[i - 1], indices[j]);
        }
        const std::size_t take = std::min({options.per_length_cap, indices.size(), options.target_n - picked.size()});
        for (std::size_t k = 0; k < take; ++k) picked.push_back(sessions[indices[k]]);
    }
    return picked;
}

DatasetStats dataset_stats(const std::vector<Session>& sessions) {
    DatasetStats st;
    st.sessions = sessions.size();
    if (sessions.empty()) return st;
    st.min_actions = sessions.front().actions.size();
    double duration = 0.0;
    for (const auto& s : sessions) {
        const auto n = s.actions.size();
        st.total_actions += n;
        st.min_actions = std::min(st.min_actions, n);
        st.max_actions = std::max(st.max_actions, n);
        duration += s.duration();
        for (const auto& a : s.actions) ++st.per_kind[a.kind];
    }
    st.mean_actions = static_cast<double>(st.total_actions) / static_cast<double>(st.sessions);
    st.mean_duration = duration / static_cast<double>(st.sessions);
    return st;
}

json to_json(const DatasetStats& stats) {
    json kinds = json::object();
    for (auto kind : {ActionKind::doc_view, ActionKind::simple_search, ActionKind::facet_search,
                      ActionKind::advanced_search}) {
        kinds[std::string(to_string(kind))] = stats.count(kind);
    }
    return {{"sessions", stats.sessions},          {"total_actions", stats.total_actions},
            {"mean_actions", stats.mean_actions},  {"min_actions", stats.min_actions},
            {"max_actions", stats.max_actions},    {"per_kind", kinds},
            {"mean_duration_s", stats.mean_duration}};
}

json to_json(const Action& a) {
    json j = {{"index", a.index}, {"kind", to_string(a.kind)}, {"ts", a.timestamp}};
    if (a.kind == ActionKind::doc_view) {
        j["doc"] = a.doc_id;
    } else {
        j["q"] = a.query_terms;
        if (!a.facet_terms.empty()) j["facets"] = a.facet_terms;
        j["results"] = a.result_doc_ids;
    }
    return j;
}

Action action_from_json(const json& j) {
    Action a;
    a.index = j.at("index").get<std::size_t>();
    const auto kind_text = detail::require_string(j, "kind");
    auto kind = action_kind_from_string(kind_text);
    if (!kind) throw detail::FieldError("unknown action kind \"" + kind_text + "\"");
    a.kind = *kind;
    a.timestamp = j.at("ts").get<double>();
    if (a.kind == ActionKind::doc_view) {
        a.doc_id = detail::require_string(j, "doc");
    } else {
        a.query_terms = detail::optional_strings(j, "q");
        a.facet_terms = detail::optional_strings(j, "facets");
        a.result_doc_ids = detail::optional_strings(j, "results");
    }
    return a;
}

json to_json(const Session& s) {
    json actions = json::array();
    for (const auto& a : s.actions) actions.push_back(to_json(a));
    return {{"id", s.id}, {"user", s.user_key}, {"actions", std::move(actions)}};
}

Session session_from_json(const json& j) {
    Session s;
    s.id = detail::require_string(j, "id");
    s.user_key = j.value("user", std::string());
    for (const auto& a : j.at("actions")) s.actions.push_back(action_from_json(a));
    if (s.actions.empty()) throw detail::FieldError("session " + s.id + " has no actions");
    return s;
}

void write_sessions(std::ostream& out, const std::vector<Session>& sessions) {
    for (const auto& s : sessions) out << to_json(s).dump() << '\n';
}

std::vector<Session> read_sessions(std::istream& in, const std::string& source) {
    std::vector<Session> sessions;
    detail::for_each_json_line(in, source, [&](const json& j, std::size_t) {
        sessions.push_back(session_from_json(j));
    });
    return sessions;
}

std::vector<Session> read_sessions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    return read_sessions(in, path.string());
}

} // namespace topicseg
