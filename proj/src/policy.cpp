#include "pagegate/policy.hpp"

#include "pagegate/error.hpp"
#include "pagegate/text.hpp"

#include <algorithm>

namespace pagegate {

using nlohmann::ordered_json;

namespace {

void erase_pending(SessionState& state, const FindingKey& key) {
    std::erase_if(state.pending, [&](const PendingItem& p) { return p.key == key; });
}

ordered_json decision_payload(std::string_view finding_id, const PolicyDecision& d) {
    ordered_json j;
    j["finding_id"] = finding_id;
    j["label"] = d.key.label;
    j["disposition"] = to_string(d.disposition);
    j["decided_by"] = to_string(d.decided_by);
    return j;
}

} // namespace

FindingKey key_of(const PiiFinding& finding) {
    return {std::string(to_string(finding.category)), normalize_whitespace(finding.matched_text)};
}

std::string_view to_string(Disposition d) {
    switch (d) {
        case Disposition::blocked_default: return "blocked_default";
        case Disposition::allowed:         return "allowed";
        case Disposition::denied:          return "denied";
        case Disposition::manual_redacted: return "manual_redacted";
    }
    return "denied";
}

std::string_view to_string(DecidedBy d) { return d == DecidedBy::system ? "system" : "user"; }
std::string_view to_string(Action a) { return a == Action::allow ? "allow" : "deny"; }

std::optional<Action> parse_action(std::string_view name) {
    if (name == "allow") return Action::allow;
    if (name == "deny") return Action::deny;
    return std::nullopt;
}

bool is_terminal(Disposition d) { return d == Disposition::denied || d == Disposition::manual_redacted; }

std::string_view to_string(AuditKind kind) {
    switch (kind) {
        case AuditKind::snapshot_received: return "snapshot_received";
        case AuditKind::finding:           return "finding";
        case AuditKind::pause:             return "pause";
        case AuditKind::decision:          return "decision";
        case AuditKind::manual_redact:     return "manual_redact";
        case AuditKind::snapshot_served:   return "snapshot_served";
        case AuditKind::detector_error:    return "detector_error";
        case AuditKind::timeout_deny:      return "timeout_deny";
        case AuditKind::ui_client_dropped: return "ui_client_dropped";
    }
    return "unknown";
}

std::optional<AuditKind> parse_audit_kind(std::string_view name) {
    for (int k = 0; k <= static_cast<int>(AuditKind::ui_client_dropped); ++k) {
        const auto kind = static_cast<AuditKind>(k);
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

const PolicyDecision* SessionState::decision_for(const FindingKey& key) const {
    const auto it = decisions.find(key);
    return it == decisions.end() ? nullptr : &it->second;
}

bool SessionState::is_pending(std::string_view finding_id) const {
    return std::any_of(pending.begin(), pending.end(), [&](const PendingItem& p) { return p.finding_id == finding_id; });
}

std::vector<std::string> SessionState::pending_ids() const {
    std::vector<std::string> ids;
    for (const auto& p : pending) ids.push_back(p.finding_id);
    return ids;
}

const AuditEvent& SessionState::record(AuditKind kind, ordered_json payload, std::int64_t now) {
    AuditEvent e;
    e.index = audit.size();
    e.at = zero_timestamps ? 0 : (audit.empty() ? now : std::max(now, audit.back().at));
    e.kind = kind;
    e.payload = std::move(payload);
    audit.push_back(std::move(e));
    return audit.back();
}

PolicyOutcome apply_policy(SessionState& state, const InterfaceSnapshot& snapshot,
                           const std::vector<PiiFinding>& findings, std::int64_t now) {
    PolicyOutcome out;
    for (const auto& f : findings) {
        ordered_json j;
        j["seq"] = snapshot.seq();
        j["finding_id"] = f.finding_id;
        j["element_id"] = f.element_id;
        j["category"] = to_string(f.category);
        j["tier"] = to_string(f.tier);
        j["detector"] = to_string(f.detector);
        state.record(AuditKind::finding, std::move(j), now);
    }
    for (const auto& f : findings) {
        const FindingKey key = key_of(f);
        state.seen_findings.insert(key);
        state.finding_keys[f.finding_id] = key;
        const PolicyDecision* d = state.decision_for(key);
        if (d && d->disposition == Disposition::allowed) continue;
        out.removals.push_back({f.element_id, f.matched_text, key.label});
        if (d) continue;
        if (tier_of(f.category) == SensitivityTier::high) {
            const bool queued = std::any_of(state.pending.begin(), state.pending.end(),
                                            [&](const PendingItem& p) { return p.key == key; });
            if (!queued) {
                state.pending.push_back({f.finding_id, key, f.element_id, f.category, now});
                out.new_pending.push_back(f.finding_id);
            }
        } else {
            const PolicyDecision decision{key, Disposition::blocked_default, DecidedBy::system, now};
            state.decisions[key] = decision;
            state.record(AuditKind::decision, decision_payload(f.finding_id, decision), now);
        }
    }
    if (!out.new_pending.empty()) {
        ordered_json j;
        j["seq"] = snapshot.seq();
        j["pending"] = state.pending_ids();
        state.record(AuditKind::pause, std::move(j), now);
    }
    auto remembered = remembered_removals(state);
    out.removals.insert(out.removals.end(), remembered.begin(), remembered.end());
    return out;
}

std::vector<Removal> remembered_removals(const SessionState& state) {
    std::vector<Removal> out;
    for (const auto& [key, d] : state.decisions)
        if (d.disposition != Disposition::allowed) out.push_back({"", key.text, key.label});
    for (const auto& p : state.pending) out.push_back({"", p.key.text, p.key.label});
    return out;
}

std::vector<Removal> current_removals(const SessionState& state, const std::vector<PiiFinding>& findings) {
    std::vector<Removal> out;
    for (const auto& f : findings) {
        const FindingKey key = key_of(f);
        const PolicyDecision* d = state.decision_for(key);
        if (d && d->disposition == Disposition::allowed) continue;
        out.push_back({f.element_id, f.matched_text, key.label});
    }
    auto remembered = remembered_removals(state);
    out.insert(out.end(), remembered.begin(), remembered.end());
    return out;
}

ResolveResult resolve(SessionState& state, std::string_view finding_id, Action action, std::int64_t now) {
    std::optional<FindingKey> key;
    for (const auto& p : state.pending)
        if (p.finding_id == finding_id) key = p.key;
    if (!key) {
        const auto it = state.finding_keys.find(std::string(finding_id));
        if (it != state.finding_keys.end()) {
            const PolicyDecision* d = state.decision_for(it->second);
            if (d && d->disposition == Disposition::blocked_default) key = it->second;
        }
    }
    if (!key) {
        ordered_json j;
        j["finding_id"] = finding_id;
        j["action"] = to_string(action);
        j["error"] = "unknown_pending";
        state.record(AuditKind::decision, std::move(j), now);
        return ResolveResult::unknown_pending;
    }
    const PolicyDecision decision{*key, action == Action::allow ? Disposition::allowed : Disposition::denied,
                                  DecidedBy::user, now};
    state.decisions[*key] = decision;
    erase_pending(state, *key);
    state.record(AuditKind::decision, decision_payload(finding_id, decision), now);
    return ResolveResult::applied;
}

FindingKey manual_redact(SessionState& state, const InterfaceSnapshot& snapshot,
                         const std::vector<PiiFinding>& findings, std::string_view element_id, std::int64_t now) {
    const ElementInfo* e = snapshot.find(element_id);
    if (!e) throw Error(ErrorCode::unknown_element, "no element " + std::string(element_id));
    std::string label(kUserMarked);
    const PiiFinding* best = nullptr;
    for (const auto& f : findings)
        if (f.element_id == element_id && (!best || f.tier < best->tier)) best = &f;
    if (best) label = std::string(to_string(best->category));

    FindingKey key{label, normalize_whitespace(e->text)};
    const PolicyDecision* existing = state.decision_for(key);
    if (existing && is_terminal(existing->disposition)) return key;
    const PolicyDecision decision{key, Disposition::manual_redacted, DecidedBy::user, now};
    state.decisions[key] = decision;
    state.seen_findings.insert(key);
    erase_pending(state, key);
    ordered_json j;
    j["element_id"] = element_id;
    j["label"] = label;
    j["disposition"] = to_string(Disposition::manual_redacted);
    j["decided_by"] = to_string(DecidedBy::user);
    state.record(AuditKind::manual_redact, std::move(j), now);
    return key;
}

bool decision_timeout(SessionState& state, std::string_view finding_id, std::int64_t now) {
    const auto it = std::find_if(state.pending.begin(), state.pending.end(),
                                 [&](const PendingItem& p) { return p.finding_id == finding_id; });
    if (it == state.pending.end()) return false;
    const FindingKey key = it->key;
    const PolicyDecision decision{key, Disposition::denied, DecidedBy::system, now};
    state.decisions[key] = decision;
    erase_pending(state, key);
    state.record(AuditKind::timeout_deny, decision_payload(finding_id, decision), now);
    return true;
}

std::vector<std::string> expired_pending(const SessionState& state, std::int64_t now, int timeout_s) {
    std::vector<std::string> out;
    if (timeout_s <= 0) return out;
    for (const auto& p : state.pending)
        if (now - p.since >= static_cast<std::int64_t>(timeout_s) * 1000) out.push_back(p.finding_id);
    return out;
}

std::optional<std::int64_t> next_expiry(const SessionState& state, int timeout_s) {
    if (timeout_s <= 0 || state.pending.empty()) return std::nullopt;
    std::int64_t best = state.pending.front().since;
    for (const auto& p : state.pending) best = std::min(best, p.since);
    return best + static_cast<std::int64_t>(timeout_s) * 1000;
}

ordered_json to_json(const AuditEvent& event, std::string_view session_id) {
    ordered_json j;
    j["index"] = event.index;
    j["at"] = event.at;
    j["session"] = session_id;
    j["kind"] = to_string(event.kind);
    j["payload"] = event.payload;
    return j;
}

ordered_json to_json(const PolicyDecision& d) {
    ordered_json j;
    j["label"] = d.key.label;
    j["text"] = d.key.text;
    j["disposition"] = to_string(d.disposition);
    j["decided_by"] = to_string(d.decided_by);
    j["decided_at"] = d.decided_at;
    j["session_scope"] = d.session_scope;
    return j;
}

ordered_json decisions_json(const SessionState& state) {
    ordered_json j;
    j["session"] = state.session_id;
    j["decisions"] = ordered_json::array();
    for (const auto& [key, d] : state.decisions) {
        j["decisions"].push_back(to_json(d));
        if (state.zero_timestamps) j["decisions"].back()["decided_at"] = 0;
    }
    j["pending"] = state.pending_ids();
    return j;
}

} // namespace pagegate
