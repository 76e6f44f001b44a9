#include "topicseg/segment.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "topicseg/error.hpp"

namespace topicseg {

std::vector<std::string> normalize_query_terms(const Action& action, const text::StopWords& stop_words) {
    std::vector<std::string> terms;
    if (!is_search(action.kind)) return terms;
    auto add = [&](const std::vector<std::string>& source) {
        for (const auto& phrase : source) {
            for (auto& t : text::content_terms(phrase, stop_words)) terms.push_back(std::move(t));
        }
    };
    add(action.query_terms);
    add(action.facet_terms);
    return terms;
}

bool terms_related(std::string_view a, std::string_view b) {
    const auto fa = text::decode_utf8(text::fold_case(a));
    const auto fb = text::decode_utf8(text::fold_case(b));
    return text::within_edit_distance(fa, fb, kRelatedTermDistance);
}

namespace {

std::vector<std::u32string> folded_terms(const Action& action, const text::StopWords& stop_words) {
    std::vector<std::u32string> out;
    for (const auto& t : normalize_query_terms(action, stop_words)) out.push_back(text::decode_utf8(t));
    return out;
}

bool share_term(const std::vector<std::u32string>& a, const std::vector<std::u32string>& b) {
    for (const auto& x : a) {
        for (const auto& y : b) {
            if (text::within_edit_distance(x, y, kRelatedTermDistance)) return true;
        }
    }
    return false;
}

} // namespace

bool queries_share_term(const Action& a, const Action& b, const text::StopWords& stop_words) {
    return share_term(folded_terms(a, stop_words), folded_terms(b, stop_words));
}

void assign_topic_numbers(AnnotatedSession& session, const text::StopWords& stop_words) {
    auto& actions = session.actions;
    std::vector<std::vector<std::u32string>> terms(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i].session_topic.empty()) {
            throw InputError("action " + std::to_string(i + 1) + " of session " + session.id + " has no session topic");
        }
        terms[i] = folded_terms(actions[i].action, stop_words);
    }

    std::size_t max_assigned = 0;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        std::size_t number = 0;
        for (std::size_t j = i; j-- > 0;) {
            if (actions[j].session_topic == actions[i].session_topic) {
                number = actions[j].topic_number;
                break;
            }
        }
        if (number == 0 && is_search(actions[i].action.kind)) {
            for (std::size_t j = i; j-- > 0;) {
                if (is_search(actions[j].action.kind) && share_term(terms[i], terms[j])) {
                    number = actions[j].topic_number;
                    break;
                }
            }
        }
        if (number == 0) number = ++max_assigned;
        actions[i].topic_number = number;
    }
}

std::vector<Segment> segments(const AnnotatedSession& session) {
    std::vector<Segment> out;
    for (std::size_t i = 0; i < session.actions.size(); ++i) {
        const auto& a = session.actions[i];
        if (out.empty() || out.back().topic_number != a.topic_number) {
            out.push_back({a.topic_number, i + 1, i + 1, {}});
        }
        auto& seg = out.back();
        seg.last = i + 1;
        if (std::find(seg.session_topics.begin(), seg.session_topics.end(), a.session_topic) ==
            seg.session_topics.end()) {
            seg.session_topics.push_back(a.session_topic);
        }
    }
    return out;
}

std::vector<std::size_t> boundaries(const AnnotatedSession& session) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < session.actions.size(); ++i) {
        if (session.actions[i].topic_number != session.actions[i - 1].topic_number) out.push_back(i);
    }
    return out;
}

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string topic_text(const AnnotatedAction& a, const RenderOptions& options) {
    if (options.classification) return options.classification->label_of(a.session_topic);
    return a.session_topic;
}

std::vector<std::string> row_cells(const AnnotatedAction& a, const RenderOptions& options) {
    return {"[" + std::to_string(a.action.index) + "]",
            std::string(display_name(a.action.kind)),
            display_terms(a.action),
            a.action.kind == ActionKind::doc_view ? display_citation(a, options.corpus) : std::string(),
            topic_text(a, options),
            a.topic_number ? "T" + std::to_string(a.topic_number) : std::string()};
}

const std::vector<std::string> kHeader = {"Action step", "Action type", "User search terms",
                                          "Citation",    "Session topic", "Topic number"};

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string display_terms(const Action& action) {
    if (action.kind == ActionKind::doc_view) return {};
    if (action.kind == ActionKind::facet_search && !action.facet_terms.empty()) return join(action.facet_terms, ", ");
    return join(action.query_terms, " ");
}

std::string display_citation(const AnnotatedAction& action, const Corpus* corpus) {
    if (!action.citation.empty()) return action.citation;
    if (corpus) {
        if (const Document* doc = corpus->find(action.action.doc_id)) return citation(*doc);
    }
    return action.action.doc_id;
}

std::string render_text(const AnnotatedSession& session, const RenderOptions& options) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& a : session.actions) rows.push_back(row_cells(a, options));

    std::vector<std::size_t> width(kHeader.size());
    for (std::size_t c = 0; c < kHeader.size(); ++c) width[c] = text::length(kHeader[c]);
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], text::length(r[c]));
    }
    std::size_t total = 0;
    for (auto w : width) total += w;
    total += 3 * (width.size() - 1);

    auto emit = [&](std::ostringstream& os, const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) line += " | ";
            line += cells[c];
            if (c + 1 < cells.size()) line.append(width[c] - text::length(cells[c]), ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        os << line << '\n';
    };

    std::ostringstream os;
    os << "Session " << session.id << '\n';
    emit(os, kHeader);
    os << std::string(total, '=') << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && session.actions[i].topic_number != session.actions[i - 1].topic_number) {
            os << std::string(total, '-') << '\n';
        }
        emit(os, rows[i]);
    }
    return os.str();
}

std::string render_html(const AnnotatedSession& session, const RenderOptions& options) {
    std::ostringstream os;
    os << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Session " << html_escape(session.id)
       << "</title>\n<style>table{border-collapse:collapse}td,th{padding:4px 8px;text-align:left}"
          "tr.segment-start td{border-top:2px dashed red}</style></head>\n<body>\n";
    os << "<table class=\"session\" data-session=\"" << html_escape(session.id) << "\">\n<tr>";
    for (const auto& h : kHeader) os << "<th>" << html_escape(h) << "</th>";
    os << "</tr>\n";
    for (std::size_t i = 0; i < session.actions.size(); ++i) {
        const bool boundary = i > 0 && session.actions[i].topic_number != session.actions[i - 1].topic_number;
        os << (boundary ? "<tr class=\"segment-start\">" : "<tr>");
        for (const auto& cell : row_cells(session.actions[i], options)) os << "<td>" << html_escape(cell) << "</td>";
        os << "</tr>\n";
    }
    os << "</table>\n</body></html>\n";
    return os.str();
}

std::size_t class_subclass_alternations(const AnnotatedSession& session, const Classification& classification) {
    std::size_t n = 0;
    for (std::size_t i = 1; i < session.actions.size(); ++i) {
        if (classification.parent_child(session.actions[i - 1].session_topic, session.actions[i].session_topic)) ++n;
    }
    return n;
}

} // namespace topicseg
