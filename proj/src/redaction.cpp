#include "pagegate/redaction.hpp"

#include "pagegate/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace pagegate {

namespace {

struct Edit {
    SourceRange range;
    std::string replacement;
};

constexpr std::string_view kPlaceholderPrefix = "[REDACTED:";

bool is_form_control(std::string_view tag) { return tag == "input" || tag == "textarea" || tag == "select"; }

bool deletes_element(RedactionMode mode, const ElementInfo& e) {
    switch (mode) {
        case RedactionMode::delete_element: return true;
        case RedactionMode::delete_text:    return false;
        case RedactionMode::automatic:
            return is_form_control(e.tag) && (e.source == TextSource::value || e.source == TextSource::placeholder);
    }
    return false;
}

// Occurrences of `needle` in `text` that are not part of an earlier placeholder.
std::vector<std::size_t> live_occurrences(std::string_view text, std::string_view needle) {
    std::vector<SourceRange> tokens;
    for (std::size_t p = text.find(kPlaceholderPrefix); p != std::string_view::npos;
         p = text.find(kPlaceholderPrefix, p + 1)) {
        const auto close = text.find(']', p);
        if (close == std::string_view::npos) break;
        tokens.push_back({p, close + 1});
    }
    std::vector<std::size_t> out;
    for (std::size_t pos : find_all(text, needle)) {
        const SourceRange m{pos, pos + needle.size()};
        const bool inside = std::any_of(tokens.begin(), tokens.end(), [&](const SourceRange& t) {
            return m.begin < t.end && t.begin < m.end && !(m.begin <= t.begin && t.end <= m.end);
        });
        if (!inside) out.push_back(pos);
    }
    return out;
}

// Merges overlapping edits (the earliest, longest one names the placeholder)
// and applies them right to left.
std::string apply_edits(const std::string& raw, std::vector<Edit> edits) {
    if (edits.empty()) return raw;
    std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
        if (a.range.begin != b.range.begin) return a.range.begin < b.range.begin;
        return a.range.end > b.range.end;
    });
    std::vector<Edit> merged;
    for (auto& e : edits) {
        if (!merged.empty() && e.range.begin < merged.back().range.end) {
            auto& last = merged.back();
            if (e.range.end > last.range.end) last.range.end = e.range.end;
            // An element deletion swallows any placeholder inside it.
            if (e.replacement.empty() && e.range.begin == last.range.begin) last.replacement.clear();
            continue;
        }
        merged.push_back(std::move(e));
    }
    std::string out = raw;
    for (auto it = merged.rbegin(); it != merged.rend(); ++it) {
        out.replace(it->range.begin, it->range.end - it->range.begin, it->replacement);
    }
    return out;
}

// Edits for every live occurrence of `text` in any human-readable region.
std::vector<Edit> sweep_edits(const std::string& raw, const html::Document& dom, const std::vector<const Removal*>& todo) {
    std::vector<Edit> edits;
    for (const auto& region : text_regions(dom)) {
        const std::string_view slice(raw.data() + region.range.begin, region.range.end - region.range.begin);
        const MappedText mapped = decode_and_normalize(slice, region.range.begin, region.decode_entities);
        if (mapped.text.empty()) continue;
        for (const Removal* r : todo) {
            for (std::size_t pos : live_occurrences(mapped.text, r->matched_text)) {
                edits.push_back({mapped.raw_range(pos, pos + r->matched_text.size()), placeholder_for(r->label)});
            }
        }
    }
    return edits;
}

bool occurs_anywhere(const InterfaceSnapshot& snap, std::string_view text) {
    for (const auto& e : snap.elements()) {
        if (!live_occurrences(e.text, text).empty()) return true;
    }
    Removal probe{"", std::string(text), "x"};
    return !sweep_edits(snap.raw_document(), snap.dom(), {&probe}).empty();
}

InterfaceSnapshot reparse(const InterfaceSnapshot& like, std::string raw) {
    return parse_snapshot(std::move(raw), like.session_id(), like.seq(), like.source_url(), like.captured_at());
}

} // namespace

std::string_view to_string(RedactionMode mode) {
    switch (mode) {
        case RedactionMode::automatic:      return "auto";
        case RedactionMode::delete_text:    return "delete_text";
        case RedactionMode::delete_element: return "delete_element";
    }
    return "auto";
}

std::optional<RedactionMode> parse_redaction_mode(std::string_view name) {
    for (auto m : {RedactionMode::automatic, RedactionMode::delete_text, RedactionMode::delete_element})
        if (to_string(m) == name) return m;
    return std::nullopt;
}

std::string placeholder_for(std::string_view label) {
    std::string out(kPlaceholderPrefix);
    out += label;
    out += ']';
    return out;
}

InterfaceSnapshot redact(const InterfaceSnapshot& snapshot, const RedactionPlan& plan) {
    if (plan.removals.empty()) return snapshot;

    std::vector<Edit> edits;
    std::vector<const Removal*> todo;
    for (const auto& r : plan.removals) {
        if (r.matched_text.empty()) continue;
        todo.push_back(&r);
        if (r.element_id.empty()) continue;
        const ElementInfo* e = snapshot.find(r.element_id);
        if (!e) {
            if (occurs_anywhere(snapshot, r.matched_text))
                throw Error(ErrorCode::unknown_element, "no element " + r.element_id);
            continue;
        }
        if (deletes_element(plan.mode, *e)) {
            if (!live_occurrences(e->text, r.matched_text).empty())
                edits.push_back({snapshot.dom().node(e->node).outer, ""});
            continue;
        }
        for (std::size_t pos : live_occurrences(e->text, r.matched_text)) {
            edits.push_back({e->mapping.raw_range(pos, pos + r.matched_text.size()), placeholder_for(r.label)});
        }
    }
    if (todo.empty()) return snapshot;

    InterfaceSnapshot current = reparse(snapshot, apply_edits(snapshot.raw_document(), std::move(edits)));
    // Placeholders can merge neighbouring text into a fresh occurrence, so sweep
    // until nothing is left; the bound only guards against pathological input.
    for (int round = 0; round < 8; ++round) {
        auto more = sweep_edits(current.raw_document(), current.dom(), todo);
        if (more.empty()) break;
        current = reparse(current, apply_edits(current.raw_document(), std::move(more)));
    }
    // Last resort for text hidden in markup itself (tag or attribute names).
    std::string raw = current.raw_document();
    bool touched = false;
    for (const Removal* r : todo) {
        for (auto hits = live_occurrences(raw, r->matched_text); !hits.empty(); hits = live_occurrences(raw, r->matched_text)) {
            for (auto it = hits.rbegin(); it != hits.rend(); ++it) raw.erase(*it, r->matched_text.size());
            touched = true;
        }
    }
    if (touched) current = reparse(current, std::move(raw));

    std::vector<std::pair<std::string, Rect>> rects;
    for (const auto& e : snapshot.elements())
        if (e.bbox) rects.emplace_back(e.dom_path, *e.bbox);
    if (!rects.empty()) current.attach_geometry(rects);
    return current;
}

std::vector<HighlightInstruction> build_highlights(const InterfaceSnapshot& snapshot,
                                                   const std::vector<PiiFinding>& findings, int duration_ms) {
    std::vector<HighlightInstruction> out;
    out.reserve(findings.size());
    for (const auto& f : findings) {
        HighlightInstruction h;
        h.finding_id = f.finding_id;
        h.element_id = f.element_id;
        h.category = f.category;
        h.tier = tier_of(f.category);
        if (const auto* e = snapshot.find(f.element_id)) h.bbox = e->bbox;
        h.color = std::string(color_of(h.tier));
        h.duration_ms = duration_ms > 0 ? duration_ms : kDefaultHighlightMs;
        h.marker = h.tier == SensitivityTier::high;
        out.push_back(std::move(h));
    }
    return out;
}

} // namespace pagegate
