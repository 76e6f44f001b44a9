#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "topicseg/annotate.hpp"
#include "topicseg/eval.hpp"
#include "topicseg/kos.hpp"

namespace topicseg {

/// Append-only JSON Lines file; each record is flushed and fsync'ed before append() returns.
class AppendLog {
public:
    explicit AppendLog(const std::filesystem::path& path);
    void append(const nlohmann::json& record);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    struct Closer {
        void operator()(std::FILE* f) const noexcept { std::fclose(f); }
    };
    std::filesystem::path path_;
    std::unique_ptr<std::FILE, Closer> file_;
};

struct SubmitResult {
    int status = 204;                          // 204, 404 or 422
    std::map<std::string, std::string> errors;  // field -> message on 422
};

/// Evaluation set plus the rating store, rebuilt from the log on startup.
/// Thread-safe: reads share a lock, submissions take it exclusively so log
/// records are never interleaved.
class AssessmentState {
public:
    AssessmentState(std::vector<AnnotatedSession> sessions, const std::filesystem::path& ratings_log,
                    std::optional<Classification> classification = std::nullopt);

    std::size_t total() const noexcept { return sessions_.size(); }

    /// {total, offset, limit, items: [{id, action_count, duration_s, rated_by}]}
    nlohmann::json list_sessions(std::size_t offset, std::size_t limit) const;
    /// Rendered session or nullopt for an unknown id.
    std::optional<nlohmann::json> session_detail(std::string_view id) const;
    /// `assessor_header` is used when the body carries no assessor.
    SubmitResult submit(std::string_view session_id, nlohmann::json body, std::string_view assessor_header,
                        double now);
    /// {assessor, rated, total, next_unrated_session_id}
    nlohmann::json progress(std::string_view assessor) const;
    std::optional<nlohmann::json> rating(std::string_view session_id, std::string_view assessor) const;

private:
    nlohmann::json detail_locked(const AnnotatedSession& s) const;

    std::vector<AnnotatedSession> sessions_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::optional<Classification> classification_;
    mutable std::shared_mutex mutex_;
    RatingStore store_;
    AppendLog log_;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path sessions_file;
    std::filesystem::path ratings_file;
    std::optional<std::filesystem::path> classification_file;
    std::optional<std::filesystem::path> static_dir;  // served at "/" when set
};

/// Throws ValidationError/ParseError when the input files cannot be read.
std::unique_ptr<AssessmentState> load_assessment_state(const ServiceConfig& config);

/// HTTP front end over an AssessmentState.
class AssessmentService {
public:
    AssessmentService(AssessmentState& state, std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~AssessmentService();
    AssessmentService(const AssessmentService&) = delete;
    AssessmentService& operator=(const AssessmentService&) = delete;

    /// Binds; port 0 chooses a free one. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop().
    bool serve();
    void stop();
    bool running() const;
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace topicseg
