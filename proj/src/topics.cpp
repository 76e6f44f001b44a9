#include "topicseg/topics.hpp"

#include <optional>

#include "topicseg/error.hpp"

namespace topicseg {

SessionProfile::SessionProfile(WeightedLabelList profile) : profile_(std::move(profile)) {
    for (std::size_t i = 0; i < profile_.size(); ++i) rank_.emplace(profile_[i].label, i);
}

std::size_t SessionProfile::rank_of(std::string_view code) const {
    auto it = rank_.find(std::string(code));
    return it == rank_.end() ? std::numeric_limits<std::size_t>::max() : it->second;
}

SessionProfile session_category_profile(const AnnotatedSession& session) {
    std::vector<WeightedLabel> all;
    for (const auto& a : session.actions) {
        all.insert(all.end(), a.categories.begin(), a.categories.end());
    }
    return SessionProfile(WeightedLabelList::accumulate(all));
}

std::vector<WeightedLabel> rerank_action_categories(const WeightedLabelList& action_categories,
                                                    const SessionProfile& profile, double epsilon) {
    if (!(epsilon >= 0.0)) throw InputError("epsilon must be >= 0");
    std::vector<WeightedLabel> list = action_categories.entries();
    bool swapped = true;
    while (swapped) {
        swapped = false;
        for (std::size_t i = 0; i + 1 < list.size(); ++i) {
            const bool close = list[i + 1].weight >= (1.0 - epsilon) * list[i].weight;
            if (close && profile.rank_of(list[i + 1].label) < profile.rank_of(list[i].label)) {
                std::swap(list[i], list[i + 1]);
                swapped = true;
            }
        }
    }
    return list;
}

void assign_session_topics(AnnotatedSession& session, double epsilon) {
    const SessionProfile profile = session_category_profile(session);
    std::optional<std::string> last_search_topic;
    std::optional<std::string> previous_topic;
    for (auto& a : session.actions) {
        a.ranked_categories = rerank_action_categories(a.categories, profile, epsilon);
        std::optional<std::string> own;
        if (!a.ranked_categories.empty()) own = a.ranked_categories.front().label;

        std::string topic;
        if (a.action.kind == ActionKind::doc_view && last_search_topic) {
            topic = *last_search_topic;
        } else if (own) {
            topic = *own;
        } else if (previous_topic) {
            topic = *previous_topic;
        } else {
            topic = std::string(kUnclassified);
        }
        a.session_topic = topic;
        previous_topic = topic;
        if (is_search(a.action.kind)) last_search_topic = topic;
    }
}

} // namespace topicseg
