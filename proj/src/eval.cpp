#include "topicseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "json_util.hpp"
#include "topicseg/error.hpp"

namespace topicseg {

using nlohmann::json;

namespace {

std::optional<std::string> score_problem(const json& body, const char* field) {
    auto it = body.find(field);
    if (it == body.end() || it->is_null()) return "required: integer -2..2 or \"dnk\"";
    if (it->is_string()) {
        if (it->get<std::string>() == "dnk") return std::nullopt;
        return "must be an integer -2..2 or \"dnk\"";
    }
    if (!it->is_number_integer()) return "must be an integer -2..2 or \"dnk\"";
    const auto v = it->get<long long>();
    if (v < kMinScore || v > kMaxScore) return "out of range: must lie in -2..2";
    return std::nullopt;
}

} // namespace

std::map<std::string, std::string> validate_rating_payload(const json& body) {
    std::map<std::string, std::string> errors;
    if (!body.is_object()) {
        errors["body"] = "expected a JSON object";
        return errors;
    }
    if (auto it = body.find("assessor");
        it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
        errors["assessor"] = "required: non-empty string";
    }
    for (const char* field : {"topic_quality", "segmentation_quality"}) {
        if (auto problem = score_problem(body, field)) errors[field] = *problem;
    }
    if (auto it = body.find("comment"); it != body.end() && !it->is_null() && !it->is_string()) {
        errors["comment"] = "must be a string";
    }
    return errors;
}

Score parse_score(const json& value, std::string_view field) {
    if (value.is_string() && value.get<std::string>() == "dnk") return std::nullopt;
    if (value.is_number_integer()) {
        const auto v = value.get<long long>();
        if (v >= kMinScore && v <= kMaxScore) return static_cast<int>(v);
    }
    throw InputError(std::string(field) + ": expected an integer -2..2 or \"dnk\"");
}

json score_to_json(const Score& s) { return s ? json(*s) : json("dnk"); }

json to_json(const Rating& r) {
    json j = {{"assessor", r.assessor},
              {"session_id", r.session_id},
              {"topic_quality", score_to_json(r.topic_quality)},
              {"segmentation_quality", score_to_json(r.segmentation_quality)},
              {"submitted_at", r.submitted_at}};
    if (r.comment) j["comment"] = *r.comment;
    return j;
}

Rating rating_from_json(const json& j) {
    Rating r;
    r.assessor = detail::require_string(j, "assessor");
    r.session_id = detail::require_string(j, "session_id");
    try {
        r.topic_quality = parse_score(j.at("topic_quality"), "topic_quality");
        r.segmentation_quality = parse_score(j.at("segmentation_quality"), "segmentation_quality");
    } catch (const InputError& e) {
        throw detail::FieldError(e.what());
    }
    if (auto it = j.find("comment"); it != j.end() && it->is_string()) r.comment = it->get<std::string>();
    r.submitted_at = j.value("submitted_at", 0.0);
    return r;
}

bool RatingStore::apply(const Rating& rating) {
    auto key = std::make_pair(rating.assessor, rating.session_id);
    auto it = by_key_.find(key);
    if (it == by_key_.end()) {
        by_key_.emplace(std::move(key), rating);
        return true;
    }
    if (rating.submitted_at < it->second.submitted_at) return false;
    const bool changed = !it->second.same_values(rating);
    it->second = rating;
    return changed;
}

const Rating* RatingStore::find(std::string_view assessor, std::string_view session_id) const {
    auto it = by_key_.find({std::string(assessor), std::string(session_id)});
    return it == by_key_.end() ? nullptr : &it->second;
}

std::vector<Rating> RatingStore::ratings() const {
    std::vector<Rating> out;
    out.reserve(by_key_.size());
    for (const auto& [key, r] : by_key_) out.push_back(r);
    return out;
}

std::vector<std::string> RatingStore::assessors_for(std::string_view session_id) const {
    std::vector<std::string> out;
    for (const auto& [key, r] : by_key_) {
        if (key.second == session_id) out.push_back(key.first);
    }
    return out;
}

std::size_t RatingStore::count_for(std::string_view assessor) const {
    std::size_t n = 0;
    for (const auto& [key, r] : by_key_) {
        if (key.first == assessor) ++n;
    }
    return n;
}

RatingStore RatingStore::replay(std::istream& in, const std::string& source) {
    RatingStore store;
    detail::for_each_json_line(in, source, [&](const json& j, std::size_t) { store.apply(rating_from_json(j)); });
    return store;
}

RatingStore RatingStore::replay(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {};
    return replay(in, path.string());
}

namespace {

const Score& answer(const Rating& r, Question q) {
    return q == Question::topic ? r.topic_quality : r.segmentation_quality;
}

} // namespace

RatingSummary rating_summary(const std::vector<Rating>& ratings, Question question) {
    RatingSummary s;
    long long sum = 0;
    for (const auto& r : ratings) {
        const auto& v = answer(r, question);
        if (!v) {
            ++s.dnk;
            continue;
        }
        sum += *v;
        ++s.n;
        ++s.histogram[static_cast<std::size_t>(*v - kMinScore)];
    }
    if (s.n == 0) throw DegenerateInputError("mean undefined: no answers other than \"do not know\"");
    s.mean = static_cast<double>(sum) / static_cast<double>(s.n);
    return s;
}

std::vector<std::vector<double>> RatingMatrix::complete_rows() const {
    std::vector<std::vector<double>> rows;
    for (const auto& row : cells) {
        if (std::all_of(row.begin(), row.end(), [](const auto& c) { return c.has_value(); })) {
            std::vector<double> values;
            values.reserve(row.size());
            for (const auto& c : row) values.push_back(*c);
            rows.push_back(std::move(values));
        }
    }
    return rows;
}

RatingMatrix build_rating_matrix(const std::vector<Rating>& ratings, Question question) {
    std::set<std::string> subjects;
    std::set<std::string> raters;
    for (const auto& r : ratings) {
        subjects.insert(r.session_id);
        raters.insert(r.assessor);
    }
    RatingMatrix m;
    m.subjects.assign(subjects.begin(), subjects.end());
    m.raters.assign(raters.begin(), raters.end());
    m.cells.assign(m.subjects.size(), std::vector<std::optional<double>>(m.raters.size()));
    auto index_of = [](const std::vector<std::string>& v, const std::string& x) {
        return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    for (const auto& r : ratings) {
        const auto& v = answer(r, question);
        if (v) m.cells[index_of(m.subjects, r.session_id)][index_of(m.raters, r.assessor)] = *v;
    }
    return m;
}

std::string_view to_string(IccVariant v) noexcept { return v == IccVariant::single ? "single" : "average"; }

MeanSquares mean_squares(const std::vector<std::vector<double>>& rows) {
    MeanSquares ms;
    ms.subjects = rows.size();
    ms.raters = rows.empty() ? 0 : rows.front().size();
    if (ms.subjects < 2 || ms.raters < 2) throw InputError("ICC needs at least 2 complete subjects and 2 raters");
    const auto n = static_cast<double>(ms.subjects);
    const auto k = static_cast<double>(ms.raters);

    std::vector<double> row_mean(ms.subjects, 0.0);
    std::vector<double> col_mean(ms.raters, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < ms.subjects; ++i) {
        if (rows[i].size() != ms.raters) throw InputError("ragged rating table");
        for (std::size_t j = 0; j < ms.raters; ++j) {
            row_mean[i] += rows[i][j];
            col_mean[j] += rows[i][j];
            grand += rows[i][j];
        }
    }
    for (auto& m : row_mean) m /= k;
    for (auto& m : col_mean) m /= n;
    grand /= n * k;

    double ss_rows = 0.0;
    double ss_cols = 0.0;
    double ss_err = 0.0;
    for (double m : row_mean) ss_rows += (m - grand) * (m - grand);
    for (double m : col_mean) ss_cols += (m - grand) * (m - grand);
    ss_rows *= k;
    ss_cols *= n;
    for (std::size_t i = 0; i < ms.subjects; ++i) {
        for (std::size_t j = 0; j < ms.raters; ++j) {
            const double r = rows[i][j] - row_mean[i] - col_mean[j] + grand;
            ss_err += r * r;
        }
    }
    ms.rows = ss_rows / (n - 1.0);
    ms.columns = ss_cols / (k - 1.0);
    ms.error = ss_err / ((n - 1.0) * (k - 1.0));
    return ms;
}

double icc(const std::vector<std::vector<double>>& rows, IccVariant variant) {
    const MeanSquares ms = mean_squares(rows);
    const auto n = static_cast<double>(ms.subjects);
    const auto k = static_cast<double>(ms.raters);
    if (ms.rows == 0.0 && ms.columns == 0.0 && ms.error == 0.0) {
        throw DegenerateInputError("ICC undefined: ratings have zero total variance");
    }
    const double numerator = ms.rows - ms.error;
    const double denominator = variant == IccVariant::single
                                   ? ms.rows + (k - 1.0) * ms.error + k * (ms.columns - ms.error) / n
                                   : ms.rows + (ms.columns - ms.error) / n;
    if (denominator == 0.0) throw DegenerateInputError("ICC undefined: zero denominator");
    return std::clamp(numerator / denominator, -1.0, 1.0);
}

double icc(const RatingMatrix& matrix, IccVariant variant) { return icc(matrix.complete_rows(), variant); }

namespace {

double ratio(std::size_t hits, std::size_t denominator, std::size_t other_side) {
    if (denominator == 0) return other_side == 0 ? 1.0 : 0.0;
    return static_cast<double>(hits) / static_cast<double>(denominator);
}

double f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

} // namespace

SegmentationMetrics segmentation_metrics(std::span<const std::size_t> predicted, std::span<const std::size_t> gold) {
    if (predicted.size() != gold.size()) throw InputError("predicted and gold numberings differ in length");
    if (predicted.empty()) throw InputError("segmentation metrics need at least one action");
    const std::size_t n = predicted.size();

    std::size_t pb = 0, gb = 0, both_b = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const bool p = predicted[i] != predicted[i - 1];
        const bool g = gold[i] != gold[i - 1];
        pb += p;
        gb += g;
        both_b += p && g;
    }

    std::size_t pp = 0, gp = 0, both_p = 0, agree = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool p = predicted[i] == predicted[j];
            const bool g = gold[i] == gold[j];
            pp += p;
            gp += g;
            both_p += p && g;
            agree += p == g;
            ++pairs;
        }
    }

    SegmentationMetrics m;
    m.boundary_precision = ratio(both_b, pb, gb);
    m.boundary_recall = ratio(both_b, gb, pb);
    m.boundary_f1 = f1(m.boundary_precision, m.boundary_recall);
    m.pairwise_precision = ratio(both_p, pp, gp);
    m.pairwise_recall = ratio(both_p, gp, pp);
    m.pairwise_f1 = f1(m.pairwise_precision, m.pairwise_recall);
    m.rand_index = pairs == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(pairs);
    return m;
}

std::vector<std::size_t> timeout_baseline(std::span<const double> timestamps, double gap_threshold) {
    if (!(gap_threshold > 0.0)) throw InputError("gap threshold must be positive");
    std::vector<std::size_t> numbers;
    numbers.reserve(timestamps.size());
    std::size_t current = 1;
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        if (i > 0 && timestamps[i] - timestamps[i - 1] > gap_threshold) ++current;
        numbers.push_back(current);
    }
    return numbers;
}

std::vector<std::size_t> timeout_baseline(const Session& session, double gap_threshold) {
    std::vector<double> ts;
    for (const auto& a : session.actions) ts.push_back(a.timestamp);
    return timeout_baseline(ts, gap_threshold);
}

std::vector<std::size_t> topic_numbers(const AnnotatedSession& session) {
    std::vector<std::size_t> out;
    for (const auto& a : session.actions) out.push_back(a.topic_number);
    return out;
}

} // namespace topicseg
