#pragma once

#include "pagegate/session.hpp"
#include "pagegate/wire.hpp"

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pagegate {

struct GatewayOptions {
    CoreOptions core;
    SnapshotFormat default_format = SnapshotFormat::element_list;
    // Longest single wait before re-checking timeouts and shutdown.
    int poll_ms = 200;
};

inline constexpr std::string_view kShuttingDown = "shutting_down";

// Thread-safe front of all sessions. Agent requests for a paused session block
// until every pending item is decided or times out; UI commands and timeouts
// for that session run meanwhile.
class Gateway {
public:
    Gateway(GatewayOptions options, Detector& detector, DriverAdapter& driver, const Clock& clock,
            EventSink* events = nullptr, AuditSink* audit = nullptr);
    ~Gateway();

    // Always returns a snapshot or error message.
    nlohmann::ordered_json handle(const wire::GetSnapshot& request);
    // Returns an error reply, if any.
    std::optional<nlohmann::ordered_json> handle(const wire::UiCommand& command);

    std::string handle_agent_line(std::string_view line);
    std::optional<std::string> handle_ui_line(std::string_view line);

    // One sync message per known session, for a newly connected UI.
    std::vector<nlohmann::ordered_json> sync_messages();
    std::vector<std::string> session_ids();

    // Fires due timeouts in every session.
    void tick();
    // Wakes blocked requests; they answer with a shutting_down error.
    void stop();

    void record_client_dropped(const nlohmann::ordered_json& payload);

    // Runs `fn` on the session under its lock; false if it does not exist.
    bool with_session(const std::string& id, const std::function<void(SessionCore&)>& fn);

private:
    struct Slot {
        Slot(std::string id, CoreOptions o, Detector& d, const Clock& c, EventSink* e, AuditSink* a)
            : core(std::move(id), o, d, c, e, a) {}
        std::mutex serve_mu;   // one agent request at a time
        std::mutex mu;         // guards core
        std::condition_variable cv;
        SessionCore core;
    };

    std::shared_ptr<Slot> find(const std::string& id);
    std::shared_ptr<Slot> find_or_create(const std::string& id);
    // Picks the session a message without "session" refers to.
    std::variant<std::string, nlohmann::ordered_json> pick_session(const std::optional<std::string>& requested, bool agent);

    GatewayOptions options_;
    Detector* detector_;
    DriverAdapter* driver_;
    const Clock* clock_;
    EventSink* events_;
    AuditSink* audit_;

    std::mutex map_mu_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    bool stopping_ = false;
    std::uint64_t gateway_events_ = 0;
};

} // namespace pagegate
