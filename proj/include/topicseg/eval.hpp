#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "topicseg/annotate.hpp"
#include "topicseg/session.hpp"

namespace topicseg {

/// One Likert judgement in [-2, 2]; empty means "do not know".
using Score = std::optional<int>;

inline constexpr int kMinScore = -2;
inline constexpr int kMaxScore = 2;

struct Rating {
    std::string assessor;
    std::string session_id;
    Score topic_quality;
    Score segmentation_quality;
    std::optional<std::string> comment;
    double submitted_at = 0.0;

    /// Same judgement, ignoring the submission time.
    bool same_values(const Rating& other) const {
        return assessor == other.assessor && session_id == other.session_id &&
               topic_quality == other.topic_quality && segmentation_quality == other.segmentation_quality &&
               comment == other.comment;
    }
    bool operator==(const Rating&) const = default;
};

enum class Question { topic, segmentation };

/// Score fields accept an integer in [-2, 2] or the string "dnk". Returns
/// field -> message for every problem; empty when the payload is valid.
std::map<std::string, std::string> validate_rating_payload(const nlohmann::json& body);

/// Parses a validated payload. Throws InputError on invalid input.
Score parse_score(const nlohmann::json& value, std::string_view field);
nlohmann::json score_to_json(const Score& s);

nlohmann::json to_json(const Rating& r);
Rating rating_from_json(const nlohmann::json& j);

/// Last-write-wins view over a rating log: for each (assessor, session) the
/// rating with the latest submitted_at; on equal times the later one applied.
class RatingStore {
public:
    /// Returns false when the rating replaced nothing and changed nothing.
    bool apply(const Rating& rating);
    const Rating* find(std::string_view assessor, std::string_view session_id) const;
    std::vector<Rating> ratings() const;
    std::vector<std::string> assessors_for(std::string_view session_id) const;
    std::size_t count_for(std::string_view assessor) const;
    std::size_t size() const noexcept { return by_key_.size(); }

    /// Replays a JSON Lines rating log.
    static RatingStore replay(const std::filesystem::path& path);
    static RatingStore replay(std::istream& in, const std::string& source = "<ratings>");

private:
    std::map<std::pair<std::string, std::string>, Rating> by_key_;
};

struct RatingSummary {
    double mean = 0.0;
    std::size_t n = 0;
    std::size_t dnk = 0;
    std::array<std::size_t, 5> histogram{};  // counts for -2, -1, 0, 1, 2
};

/// Mean over non-dnk answers. Throws DegenerateInputError when there are none.
RatingSummary rating_summary(const std::vector<Rating>& ratings, Question question);

/// Subjects (sessions) by raters (assessors); dnk and missing cells are empty.
struct RatingMatrix {
    std::vector<std::string> subjects;
    std::vector<std::string> raters;
    std::vector<std::vector<std::optional<double>>> cells;

    /// Rows with a value from every rater.
    std::vector<std::vector<double>> complete_rows() const;
};

RatingMatrix build_rating_matrix(const std::vector<Rating>& ratings, Question question);

enum class IccVariant { single, average };

std::string_view to_string(IccVariant v) noexcept;

/// Two-way ANOVA mean squares of an n x k table.
struct MeanSquares {
    std::size_t subjects = 0;
    std::size_t raters = 0;
    double rows = 0.0;     // between subjects
    double columns = 0.0;  // between raters
    double error = 0.0;    // residual
};

MeanSquares mean_squares(const std::vector<std::vector<double>>& rows);

/// Two-way random-effects, absolute-agreement intraclass correlation, clamped
/// to [-1, 1]. Needs >= 2 rows and >= 2 raters (InputError) and non-zero
/// total variance (DegenerateInputError).
double icc(const std::vector<std::vector<double>>& rows, IccVariant variant);
/// Complete-case rows of the matrix only.
double icc(const RatingMatrix& matrix, IccVariant variant);

struct SegmentationMetrics {
    double boundary_precision = 0.0;
    double boundary_recall = 0.0;
    double boundary_f1 = 0.0;
    double pairwise_precision = 0.0;
    double pairwise_recall = 0.0;
    double pairwise_f1 = 0.0;
    double rand_index = 0.0;
};

/// Boundary metrics compare the positions where consecutive labels change;
/// pairwise metrics treat gold same-segment pairs as positives. An empty
/// denominator scores 1 when the other side is empty too, else 0.
SegmentationMetrics segmentation_metrics(std::span<const std::size_t> predicted, std::span<const std::size_t> gold);

/// New topic number whenever the gap to the previous action exceeds `gap_threshold`.
std::vector<std::size_t> timeout_baseline(std::span<const double> timestamps, double gap_threshold);
std::vector<std::size_t> timeout_baseline(const Session& session, double gap_threshold);

std::vector<std::size_t> topic_numbers(const AnnotatedSession& session);

} // namespace topicseg
