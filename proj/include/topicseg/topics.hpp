#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topicseg/annotate.hpp"

namespace topicseg {

/// Topic given to actions with no category evidence anywhere before them.
inline constexpr std::string_view kUnclassified = "UNCLASSIFIED";

inline constexpr double kDefaultEpsilon = 0.2;

/// Session-wide category weights: each category's weight summed over all actions.
class SessionProfile {
public:
    SessionProfile() = default;
    explicit SessionProfile(WeightedLabelList profile);

    const WeightedLabelList& list() const noexcept { return profile_; }
    /// 0-based position in the profile; categories not in it rank last.
    std::size_t rank_of(std::string_view code) const;

private:
    WeightedLabelList profile_;
    std::unordered_map<std::string, std::size_t> rank_;
};

SessionProfile session_category_profile(const AnnotatedSession& session);

/// Adjacent-swap passes until stable: a neighbouring pair (a, b) is swapped
/// when b's weight is at least (1 - epsilon) times a's and b ranks above a in
/// the profile. Weights stay attached to their labels.
std::vector<WeightedLabel> rerank_action_categories(const WeightedLabelList& action_categories,
                                                    const SessionProfile& profile, double epsilon = kDefaultEpsilon);

/// Fills ranked_categories and session_topic on every action.
///  - search: top re-ranked category;
///  - doc view: topic of the nearest preceding search, or its own top
///    category when no search precedes it;
///  - nothing to go on: previous action's topic, else kUnclassified.
void assign_session_topics(AnnotatedSession& session, double epsilon = kDefaultEpsilon);

} // namespace topicseg
