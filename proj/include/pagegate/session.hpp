#pragma once

#include "pagegate/clock.hpp"
#include "pagegate/detection.hpp"
#include "pagegate/driver.hpp"
#include "pagegate/policy.hpp"
#include "pagegate/redaction.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace pagegate {

// Receives gateway -> UI messages.
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void publish(const nlohmann::ordered_json& message) = 0;
};

// Persists audit lines. Must not return before the line is durable.
class AuditSink {
public:
    virtual ~AuditSink() = default;
    virtual void append(const nlohmann::ordered_json& line) = 0;
    virtual void store_decisions(const std::string& /*session*/, const nlohmann::ordered_json& /*decisions*/) {}
};

struct CoreOptions {
    int decision_timeout_s = 300;
    int highlight_duration_ms = kDefaultHighlightMs;
    RedactionMode mode = RedactionMode::automatic;
    bool zero_timestamps = false;
};

struct ServedSnapshot {
    std::uint64_t seq = 0;
    SnapshotFormat format = SnapshotFormat::element_list;
    std::string body;
};

// The pipeline for one session: parse -> detect -> policy -> redact -> serve.
// Single owner; the gateway serializes access.
class SessionCore {
public:
    SessionCore(std::string session_id, CoreOptions options, Detector& detector, const Clock& clock,
                EventSink* events = nullptr, AuditSink* audit = nullptr);

    const std::string& session_id() const { return state_.session_id; }
    const SessionState& state() const { return state_; }
    bool paused() const { return state_.paused(); }
    // A snapshot passed analysis and may be emitted once not paused.
    bool servable() const { return servable_; }
    const InterfaceSnapshot* latest() const { return latest_ ? &*latest_ : nullptr; }
    const std::vector<PiiFinding>& latest_findings() const { return findings_; }

    // Throws Error{unparseable_document, detector_unavailable,
    // malformed_detector_output}; afterwards nothing is servable until the
    // next successful ingest.
    void ingest(const PageCapture& capture);

    ResolveResult decide(std::string_view finding_id, Action action);
    // Throws Error{unknown_element}.
    void manual_redact(std::string_view element_id);
    // Denies pending items older than the timeout. True if any fired.
    bool tick();
    // Denies every pending item now, as an expired timeout would.
    void expire_all();
    std::optional<std::int64_t> next_expiry() const;

    // Requires servable() && !paused(). Audits snapshot_served before returning.
    ServedSnapshot emit(SnapshotFormat format);

    nlohmann::ordered_json sync_state() const;

private:
    void flush();
    void after_change(bool was_paused);
    std::int64_t now() const { return clock_->now_ms(); }

    CoreOptions options_;
    Detector* detector_;
    const Clock* clock_;
    EventSink* events_;
    AuditSink* audit_;
    SessionState state_;
    std::optional<InterfaceSnapshot> latest_;
    std::vector<PiiFinding> findings_;
    bool servable_ = false;
    std::uint64_t seq_ = 0;
    std::size_t flushed_ = 0;
    std::size_t decisions_stored_ = 0;
};

} // namespace pagegate
