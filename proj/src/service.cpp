#include "topicseg/service.hpp"

#include <algorithm>
#include <fcntl.h>
#include <unistd.h>

#include <httplib.h>

#include "topicseg/error.hpp"
#include "topicseg/segment.hpp"

namespace topicseg {

using nlohmann::json;

AppendLog::AppendLog(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file_.reset(std::fopen(path.c_str(), "ab"));
    if (!file_) throw ValidationError("cannot open rating log " + path.string() + " for appending");
}

void AppendLog::append(const json& record) {
    const std::string line = record.dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_.get()) != line.size() || std::fflush(file_.get()) != 0 ||
        ::fsync(::fileno(file_.get())) != 0) {
        throw std::runtime_error("failed to append to " + path_.string());
    }
}

AssessmentState::AssessmentState(std::vector<AnnotatedSession> sessions, const std::filesystem::path& ratings_log,
                                 std::optional<Classification> classification)
    : sessions_(std::move(sessions)),
      classification_(std::move(classification)),
      store_(RatingStore::replay(ratings_log)),
      log_(ratings_log) {
    for (std::size_t i = 0; i < sessions_.size(); ++i) {
        if (!by_id_.emplace(sessions_[i].id, i).second) {
            throw ValidationError("duplicate session id \"" + sessions_[i].id + "\" in evaluation set");
        }
    }
}

json AssessmentState::list_sessions(std::size_t offset, std::size_t limit) const {
    std::shared_lock lock(mutex_);
    json items = json::array();
    for (std::size_t i = offset; i < sessions_.size() && i < offset + limit; ++i) {
        const auto& s = sessions_[i];
        const double duration =
            s.actions.empty() ? 0.0 : s.actions.back().action.timestamp - s.actions.front().action.timestamp;
        items.push_back({{"id", s.id},
                         {"action_count", s.actions.size()},
                         {"duration_s", duration},
                         {"rated_by", store_.assessors_for(s.id)}});
    }
    return {{"total", sessions_.size()}, {"offset", offset}, {"limit", limit}, {"items", std::move(items)}};
}

json AssessmentState::detail_locked(const AnnotatedSession& s) const {
    json actions = json::array();
    for (const auto& a : s.actions) {
        json row = {{"step", a.action.index},
                    {"kind", to_string(a.action.kind)},
                    {"kind_label", display_name(a.action.kind)},
                    {"terms", display_terms(a.action)},
                    {"citation", a.action.kind == ActionKind::doc_view ? display_citation(a, nullptr) : ""},
                    {"session_topic", a.session_topic},
                    {"topic_number", a.topic_number}};
        if (classification_) row["session_topic_label"] = classification_->label_of(a.session_topic);
        actions.push_back(std::move(row));
    }
    return {{"id", s.id}, {"action_count", s.actions.size()}, {"actions", std::move(actions)}};
}

std::optional<json> AssessmentState::session_detail(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return detail_locked(sessions_[it->second]);
}

SubmitResult AssessmentState::submit(std::string_view session_id, json body, std::string_view assessor_header,
                                     double now) {
    SubmitResult result;
    if (body.is_object() && !body.contains("assessor") && !assessor_header.empty()) {
        body["assessor"] = std::string(assessor_header);
    }
    result.errors = validate_rating_payload(body);
    if (!result.errors.empty()) {
        result.status = 422;
        return result;
    }

    std::unique_lock lock(mutex_);
    if (!by_id_.count(std::string(session_id))) {
        result.status = 404;
        return result;
    }
    Rating r;
    r.assessor = body.at("assessor").get<std::string>();
    r.session_id = std::string(session_id);
    r.topic_quality = parse_score(body.at("topic_quality"), "topic_quality");
    r.segmentation_quality = parse_score(body.at("segmentation_quality"), "segmentation_quality");
    if (auto it = body.find("comment"); it != body.end() && it->is_string()) r.comment = it->get<std::string>();
    r.submitted_at = now;

    if (const Rating* existing = store_.find(r.assessor, r.session_id)) {
        if (existing->same_values(r)) return result;  // resubmission: nothing to record
        r.submitted_at = std::max(now, existing->submitted_at);
    }
    log_.append(to_json(r));
    store_.apply(r);
    return result;
}

json AssessmentState::progress(std::string_view assessor) const {
    std::shared_lock lock(mutex_);
    std::size_t rated = 0;
    json next = nullptr;
    for (const auto& s : sessions_) {
        if (store_.find(assessor, s.id)) {
            ++rated;
        } else if (next.is_null()) {
            next = s.id;
        }
    }
    return {{"assessor", std::string(assessor)},
            {"rated", rated},
            {"total", sessions_.size()},
            {"next_unrated_session_id", next}};
}

std::optional<json> AssessmentState::rating(std::string_view session_id, std::string_view assessor) const {
    std::shared_lock lock(mutex_);
    const Rating* r = store_.find(assessor, session_id);
    if (!r) return std::nullopt;
    return to_json(*r);
}

std::unique_ptr<AssessmentState> load_assessment_state(const ServiceConfig& config) {
    auto sessions = read_annotated(config.sessions_file);
    std::optional<Classification> classification;
    if (config.classification_file) classification = Classification::load(*config.classification_file);
    return std::make_unique<AssessmentState>(std::move(sessions), config.ratings_file, std::move(classification));
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

std::optional<std::size_t> query_size(const httplib::Request& req, const char* key, std::size_t fallback) {
    if (!req.has_param(key)) return fallback;
    const auto v = req.get_param_value(key);
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    try {
        return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

double now_seconds() {
    using namespace std::chrono;
    return duration_cast<duration<double>>(system_clock::now().time_since_epoch()).count();
}

} // namespace

struct AssessmentService::Impl {
    AssessmentState& state;
    httplib::Server server;

    explicit Impl(AssessmentState& s) : state(s) {}
};

AssessmentService::AssessmentService(AssessmentState& state, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(state)) {
    auto& svr = impl_->server;
    auto& st = impl_->state;

    svr.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    });

    svr.Get("/api/sessions", [&st](const httplib::Request& req, httplib::Response& res) {
        const auto offset = query_size(req, "offset", 0);
        const auto limit = query_size(req, "limit", 20);
        if (!offset || !limit) {
            send_json(res, 400, {{"error", "offset and limit must be non-negative integers"}});
            return;
        }
        send_json(res, 200, st.list_sessions(*offset, std::min<std::size_t>(*limit, 1000)));
    });

    svr.Get(R"(/api/sessions/([^/]+))", [&st](const httplib::Request& req, httplib::Response& res) {
        if (auto detail = st.session_detail(req.matches[1].str())) {
            send_json(res, 200, *detail);
        } else {
            send_json(res, 404, {{"error", "unknown session"}});
        }
    });

    svr.Get(R"(/api/sessions/([^/]+)/rating)", [&st](const httplib::Request& req, httplib::Response& res) {
        std::string assessor = req.get_param_value("assessor");
        if (assessor.empty()) assessor = req.get_header_value("X-Assessor");
        if (auto r = st.rating(req.matches[1].str(), assessor)) {
            send_json(res, 200, *r);
        } else {
            send_json(res, 404, {{"error", "no rating"}});
        }
    });

    svr.Put(R"(/api/sessions/([^/]+)/rating)", [&st](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error&) {
            send_json(res, 400, {{"error", "body is not valid JSON"}});
            return;
        }
        const auto result = st.submit(req.matches[1].str(), std::move(body), req.get_header_value("X-Assessor"),
                                      now_seconds());
        if (result.status == 204) {
            res.status = 204;
        } else if (result.status == 404) {
            send_json(res, 404, {{"error", "unknown session"}});
        } else {
            send_json(res, result.status, {{"errors", result.errors}});
        }
    });

    svr.Get(R"(/api/assessors/([^/]+)/progress)", [&st](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, st.progress(req.matches[1].str()));
    });

    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        send_json(res, 500, {{"error", what}});
    });

    if (static_dir) svr.set_mount_point("/", static_dir->string());
}

AssessmentService::~AssessmentService() { stop(); }

int AssessmentService::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool AssessmentService::serve() { return impl_->server.listen_after_bind(); }

void AssessmentService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool AssessmentService::running() const { return impl_->server.is_running(); }

void AssessmentService::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace topicseg
