#include "pagegate/session.hpp"

#include "pagegate/error.hpp"
#include "pagegate/wire.hpp"

#include <stdexcept>

namespace pagegate {

using nlohmann::ordered_json;

SessionCore::SessionCore(std::string session_id, CoreOptions options, Detector& detector, const Clock& clock,
                         EventSink* events, AuditSink* audit)
    : options_(options), detector_(&detector), clock_(&clock), events_(events), audit_(audit) {
    state_.session_id = std::move(session_id);
    state_.zero_timestamps = options.zero_timestamps;
}

void SessionCore::flush() {
    bool decisions_changed = false;
    for (; flushed_ < state_.audit.size(); ++flushed_) {
        const auto& event = state_.audit[flushed_];
        const auto line = to_json(event, state_.session_id);
        if (audit_) audit_->append(line);
        if (events_) events_->publish(wire::log_message(line));
        decisions_changed = decisions_changed || event.kind == AuditKind::decision ||
                            event.kind == AuditKind::manual_redact || event.kind == AuditKind::timeout_deny;
    }
    if (decisions_changed && audit_) audit_->store_decisions(state_.session_id, decisions_json(state_));
}

void SessionCore::after_change(bool was_paused) {
    flush();
    if (events_ && was_paused && !paused()) events_->publish(wire::resume_message(state_.session_id));
}

void SessionCore::ingest(const PageCapture& capture) {
    const bool was_paused = paused();
    servable_ = false;
    findings_.clear();
    const std::uint64_t seq = ++seq_;

    ordered_json received;
    received["seq"] = seq;
    received["url"] = capture.url;
    received["bytes"] = capture.html.size();
    state_.record(AuditKind::snapshot_received, std::move(received), now());

    std::optional<InterfaceSnapshot> snap;
    try {
        snap = parse_snapshot(capture.html, state_.session_id, seq, capture.url, state_.zero_timestamps ? 0 : now());
    } catch (const Error&) {
        latest_.reset();
        flush();
        throw;
    }
    if (!capture.rects.empty()) snap->attach_geometry(capture.rects);
    latest_ = std::move(snap);

    DetectionResult result;
    try {
        result = detect(*latest_, *detector_);
    } catch (const std::exception& e) {
        const auto* err = dynamic_cast<const Error*>(&e);
        ordered_json j;
        j["seq"] = seq;
        j["code"] = to_string(err ? err->code() : ErrorCode::detector_unavailable);
        j["detail"] = e.what();
        state_.record(AuditKind::detector_error, std::move(j), now());
        flush();
        if (err) throw;
        throw Error(ErrorCode::detector_unavailable, e.what());
    }
    findings_ = result.findings;

    const auto outcome = apply_policy(state_, *latest_, findings_, now());
    if (result.partial) {
        ordered_json j;
        j["seq"] = seq;
        j["code"] = to_string(ErrorCode::malformed_detector_output);
        j["malformed_count"] = result.malformed_count;
        state_.record(AuditKind::detector_error, std::move(j), now());
    }
    if (events_) {
        const auto highlights = build_highlights(*latest_, findings_, options_.highlight_duration_ms);
        for (std::size_t i = 0; i < findings_.size(); ++i) {
            events_->publish(wire::finding_message(state_.session_id, findings_[i]));
            events_->publish(wire::highlight_message(state_.session_id, highlights[i]));
        }
    }
    flush();
    if (events_ && !outcome.new_pending.empty())
        events_->publish(wire::pause_message(state_.session_id, state_.pending_ids()));
    else if (events_ && was_paused && !paused())
        events_->publish(wire::resume_message(state_.session_id));
    if (result.partial)
        throw Error(ErrorCode::malformed_detector_output,
                    std::to_string(result.malformed_count) + " unusable detector lines; nothing served");
    servable_ = true;
}

ResolveResult SessionCore::decide(std::string_view finding_id, Action action) {
    const bool was = paused();
    const auto r = resolve(state_, finding_id, action, now());
    after_change(was);
    return r;
}

void SessionCore::manual_redact(std::string_view element_id) {
    const bool was = paused();
    if (!latest_) throw Error(ErrorCode::unknown_element, "no snapshot yet");
    pagegate::manual_redact(state_, *latest_, findings_, element_id, now());
    after_change(was);
}

bool SessionCore::tick() {
    const bool was = paused();
    bool fired = false;
    for (const auto& id : expired_pending(state_, now(), options_.decision_timeout_s))
        fired = decision_timeout(state_, id, now()) || fired;
    if (fired) after_change(was);
    return fired;
}

void SessionCore::expire_all() {
    const bool was = paused();
    for (const auto& id : state_.pending_ids()) decision_timeout(state_, id, now());
    after_change(was);
}

std::optional<std::int64_t> SessionCore::next_expiry() const {
    return pagegate::next_expiry(state_, options_.decision_timeout_s);
}

ServedSnapshot SessionCore::emit(SnapshotFormat format) {
    if (!servable_ || paused() || !latest_) throw std::logic_error("emit on a session that cannot serve");
    const auto removals = current_removals(state_, findings_);
    const auto redacted = redact(*latest_, {state_.session_id, latest_->seq(), removals, options_.mode});
    ServedSnapshot out{latest_->seq(), format, serialize_snapshot(redacted, format)};
    ordered_json j;
    j["seq"] = out.seq;
    j["format"] = to_string(format);
    j["bytes"] = out.body.size();
    j["removals"] = removals.size();
    state_.record(AuditKind::snapshot_served, std::move(j), now());
    flush();
    return out;
}

ordered_json SessionCore::sync_state() const {
    ordered_json j;
    j["seq"] = seq_;
    j["paused"] = paused();
    j["pending"] = ordered_json::array();
    for (const auto& p : state_.pending) {
        ordered_json item;
        item["finding_id"] = p.finding_id;
        item["element_id"] = p.element_id;
        item["category"] = to_string(p.category);
        item["tier"] = to_string(tier_of(p.category));
        item["label"] = descriptor(p.category).human_label;
        j["pending"].push_back(std::move(item));
    }
    j["decisions"] = decisions_json(state_)["decisions"];
    return j;
}

} // namespace pagegate
