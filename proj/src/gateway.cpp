#include "pagegate/gateway.hpp"

#include "pagegate/error.hpp"

#include <algorithm>
#include <chrono>

namespace pagegate {

using nlohmann::ordered_json;

Gateway::Gateway(GatewayOptions options, Detector& detector, DriverAdapter& driver, const Clock& clock,
                 EventSink* events, AuditSink* audit)
    : options_(options), detector_(&detector), driver_(&driver), clock_(&clock), events_(events), audit_(audit) {}

Gateway::~Gateway() { stop(); }

std::shared_ptr<Gateway::Slot> Gateway::find(const std::string& id) {
    std::lock_guard lock(map_mu_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<Gateway::Slot> Gateway::find_or_create(const std::string& id) {
    std::lock_guard lock(map_mu_);
    auto& slot = sessions_[id];
    if (!slot) slot = std::make_shared<Slot>(id, options_.core, *detector_, *clock_, events_, audit_);
    return slot;
}

std::variant<std::string, ordered_json> Gateway::pick_session(const std::optional<std::string>& requested, bool agent) {
    if (requested) return *requested;
    std::vector<std::string> known = agent ? driver_->sessions() : std::vector<std::string>{};
    {
        std::lock_guard lock(map_mu_);
        for (const auto& [id, slot] : sessions_)
            if (std::find(known.begin(), known.end(), id) == known.end()) known.push_back(id);
    }
    if (known.size() == 1) return known.front();
    if (known.empty()) return wire::error_message(to_string(ErrorCode::session_unknown), "no session yet");
    return wire::error_message(wire::kSessionRequired, "several sessions are active; name one");
}

ordered_json Gateway::handle(const wire::GetSnapshot& request) {
    auto picked = pick_session(request.session, true);
    if (auto* err = std::get_if<ordered_json>(&picked)) return *err;
    const std::string id = std::get<std::string>(picked);
    const SnapshotFormat format = request.format.value_or(options_.default_format);

    const bool existed = find(id) != nullptr;
    auto slot = find_or_create(id);
    std::lock_guard serving(slot->serve_mu);
    PageCapture capture;
    try {
        capture = driver_->capture(id);
    } catch (const Error& e) {
        if (!existed && e.code() == ErrorCode::session_unknown) {
            std::lock_guard lock(map_mu_);
            sessions_.erase(id);
        }
        return wire::error_message(e);
    }

    std::unique_lock lock(slot->mu);
    try {
        slot->core.ingest(capture);
    } catch (const Error& e) {
        return wire::error_message(e);
    }
    while (slot->core.paused()) {
        {
            std::lock_guard m(map_mu_);
            if (stopping_) return wire::error_message(kShuttingDown, "gateway stopped while paused");
        }
        auto wait = std::chrono::milliseconds(options_.poll_ms);
        if (const auto due = slot->core.next_expiry()) {
            const auto left = std::max<std::int64_t>(0, *due - clock_->now_ms());
            wait = std::min(wait, std::chrono::milliseconds(left));
        }
        slot->cv.wait_for(lock, wait);
        slot->core.tick();
    }
    if (!slot->core.servable()) return wire::error_message(to_string(ErrorCode::protocol), "snapshot not servable");
    const auto served = slot->core.emit(format);
    auto reply = wire::snapshot_message(id, served.seq, served.format, served.body);
    if (wire::encode(reply).size() > wire::kMaxMessageBytes)
        return wire::error_message(wire::kTooLarge, "redacted snapshot exceeds 1 MiB");
    return reply;
}

std::optional<ordered_json> Gateway::handle(const wire::UiCommand& command) {
    const auto& requested = std::visit([](const auto& c) -> const std::optional<std::string>& { return c.session; }, command);
    auto picked = pick_session(requested, false);
    if (auto* err = std::get_if<ordered_json>(&picked)) return *err;
    const std::string id = std::get<std::string>(picked);
    auto slot = find(id);
    if (!slot) return wire::error_message(to_string(ErrorCode::session_unknown), "unknown session " + id);

    std::optional<ordered_json> reply;
    {
        std::lock_guard lock(slot->mu);
        if (const auto* d = std::get_if<wire::DecisionCommand>(&command)) {
            if (slot->core.decide(d->finding_id, d->action) == ResolveResult::unknown_pending)
                reply = wire::error_message(to_string(ErrorCode::unknown_pending), "not pending: " + d->finding_id);
        } else {
            const auto& m = std::get<wire::ManualRedactCommand>(command);
            try {
                slot->core.manual_redact(m.element_id);
            } catch (const Error& e) {
                reply = wire::error_message(e);
            }
        }
    }
    slot->cv.notify_all();
    return reply;
}

std::string Gateway::handle_agent_line(std::string_view line) {
    auto decoded = wire::decode_agent(line);
    if (const auto* err = std::get_if<wire::DecodeError>(&decoded)) return wire::encode(wire::error_message(err->code, err->detail));
    return wire::encode(handle(std::get<wire::GetSnapshot>(decoded)));
}

std::optional<std::string> Gateway::handle_ui_line(std::string_view line) {
    auto decoded = wire::decode_ui(line);
    if (const auto* err = std::get_if<wire::DecodeError>(&decoded)) return wire::encode(wire::error_message(err->code, err->detail));
    if (auto reply = handle(std::get<wire::UiCommand>(decoded))) return wire::encode(*reply);
    return std::nullopt;
}

std::vector<ordered_json> Gateway::sync_messages() {
    std::vector<std::pair<std::string, std::shared_ptr<Slot>>> slots;
    {
        std::lock_guard lock(map_mu_);
        slots.assign(sessions_.begin(), sessions_.end());
    }
    std::vector<ordered_json> out;
    for (const auto& [id, slot] : slots) {
        std::lock_guard lock(slot->mu);
        out.push_back(wire::sync_message(id, slot->core.sync_state()));
    }
    return out;
}

std::vector<std::string> Gateway::session_ids() {
    std::lock_guard lock(map_mu_);
    std::vector<std::string> ids;
    for (const auto& [id, slot] : sessions_) ids.push_back(id);
    return ids;
}

void Gateway::tick() {
    std::vector<std::shared_ptr<Slot>> slots;
    {
        std::lock_guard lock(map_mu_);
        for (const auto& [id, slot] : sessions_) slots.push_back(slot);
    }
    for (const auto& slot : slots) {
        bool fired = false;
        {
            std::lock_guard lock(slot->mu);
            fired = slot->core.tick();
        }
        if (fired) slot->cv.notify_all();
    }
}

void Gateway::stop() {
    std::vector<std::shared_ptr<Slot>> slots;
    {
        std::lock_guard lock(map_mu_);
        stopping_ = true;
        for (const auto& [id, slot] : sessions_) slots.push_back(slot);
    }
    for (const auto& slot : slots) {
        std::lock_guard lock(slot->mu);
        slot->cv.notify_all();
    }
}

void Gateway::record_client_dropped(const ordered_json& payload) {
    ordered_json line;
    {
        std::lock_guard lock(map_mu_);
        line["index"] = gateway_events_++;
    }
    line["at"] = options_.core.zero_timestamps ? 0 : clock_->now_ms();
    line["session"] = "";
    line["kind"] = to_string(AuditKind::ui_client_dropped);
    line["payload"] = payload;
    if (audit_) audit_->append(line);
}

bool Gateway::with_session(const std::string& id, const std::function<void(SessionCore&)>& fn) {
    auto slot = find(id);
    if (!slot) return false;
    {
        std::lock_guard lock(slot->mu);
        fn(slot->core);
    }
    slot->cv.notify_all();
    return true;
}

} // namespace pagegate
