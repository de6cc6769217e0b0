#pragma once

#include "pagegate/detection.hpp"
#include "pagegate/redaction.hpp"
#include "pagegate/snapshot.hpp"

#include "json.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pagegate {

inline constexpr std::string_view kUserMarked = "user_marked";

// Decisions are remembered per piece of information, not per element.
struct FindingKey {
    std::string label;   // category name or user_marked
    std::string text;    // whitespace-normalized

    auto operator<=>(const FindingKey&) const = default;
};

FindingKey key_of(const PiiFinding& finding);

enum class Disposition { blocked_default, allowed, denied, manual_redacted };
enum class DecidedBy { system, user };
enum class Action { allow, deny };

std::string_view to_string(Disposition d);
std::string_view to_string(DecidedBy d);
std::string_view to_string(Action a);
std::optional<Action> parse_action(std::string_view name);

bool is_terminal(Disposition d);

struct PolicyDecision {
    FindingKey key;
    Disposition disposition = Disposition::blocked_default;
    DecidedBy decided_by = DecidedBy::system;
    std::int64_t decided_at = 0;
    bool session_scope = true;
};

enum class AuditKind {
    snapshot_received,
    finding,
    pause,
    decision,
    manual_redact,
    snapshot_served,
    detector_error,
    timeout_deny,
    ui_client_dropped,
};

std::string_view to_string(AuditKind kind);
std::optional<AuditKind> parse_audit_kind(std::string_view name);

struct AuditEvent {
    std::uint64_t index = 0;
    std::int64_t at = 0;
    AuditKind kind = AuditKind::snapshot_received;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

struct PendingItem {
    std::string finding_id;
    FindingKey key;
    std::string element_id;
    PiiCategory category = PiiCategory::email;
    std::int64_t since = 0;
};

struct SessionState {
    std::string session_id;
    std::map<FindingKey, PolicyDecision> decisions;
    std::vector<PendingItem> pending;   // arrival order, at most one per key
    std::set<FindingKey> seen_findings;
    std::map<std::string, FindingKey> finding_keys;   // every finding_id seen, for decisions on notified items
    std::vector<AuditEvent> audit;
    // Replay writes 0 for every timestamp.
    bool zero_timestamps = false;

    bool paused() const { return !pending.empty(); }
    const PolicyDecision* decision_for(const FindingKey& key) const;
    bool is_pending(std::string_view finding_id) const;
    std::vector<std::string> pending_ids() const;

    const AuditEvent& record(AuditKind kind, nlohmann::ordered_json payload, std::int64_t now);
};

struct PolicyOutcome {
    std::vector<Removal> removals;
    std::vector<std::string> new_pending;
};

// Every finding is redacted unless its key was allowed. New high-tier keys go
// pending and pause the session; new medium/low keys are blocked by default.
// Also plans a document-wide removal for every remembered non-allowed key, so
// a text stays redacted even where detection misses it.
PolicyOutcome apply_policy(SessionState& state, const InterfaceSnapshot& snapshot,
                           const std::vector<PiiFinding>& findings, std::int64_t now);

// Removals for remembered non-allowed keys only; used when nothing new was
// detected or detection failed.
std::vector<Removal> remembered_removals(const SessionState& state);

// Removals for `findings` under the decisions as they stand now, plus the
// remembered ones. Unlike apply_policy this changes nothing.
std::vector<Removal> current_removals(const SessionState& state, const std::vector<PiiFinding>& findings);

enum class ResolveResult { applied, unknown_pending };

// Accepts a pending finding, or a notified medium/low finding whose key is
// still blocked by default. Anything else is audited as unknown_pending.
ResolveResult resolve(SessionState& state, std::string_view finding_id, Action action, std::int64_t now);

// `findings` are those of `snapshot`, used to pick the element's category.
// Throws Error{unknown_element}.
FindingKey manual_redact(SessionState& state, const InterfaceSnapshot& snapshot,
                         const std::vector<PiiFinding>& findings, std::string_view element_id, std::int64_t now);

// Denies a still-pending finding. Returns false when it was already resolved.
bool decision_timeout(SessionState& state, std::string_view finding_id, std::int64_t now);

// Pending ids older than `timeout_s` (0 disables).
std::vector<std::string> expired_pending(const SessionState& state, std::int64_t now, int timeout_s);

// Absolute time of the next expiry, if any.
std::optional<std::int64_t> next_expiry(const SessionState& state, int timeout_s);

nlohmann::ordered_json to_json(const AuditEvent& event, std::string_view session_id);
nlohmann::ordered_json to_json(const PolicyDecision& decision);
nlohmann::ordered_json decisions_json(const SessionState& state);

} // namespace pagegate
