#include "doctest.h"

#include "pagegate/gateway.hpp"
#include "pagegate/rules_detector.hpp"
#include "pagegate/server.hpp"
#include "pagegate/sinks.hpp"
#include "support/fixtures.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <future>
#include <thread>

using namespace pagegate;
using namespace pagegate::testing;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> kinds(const std::vector<nlohmann::ordered_json>& lines) {
    std::vector<std::string> out;
    for (const auto& l : lines) out.push_back(l["kind"].get<std::string>());
    return out;
}

std::vector<std::string> event_types(const MemorySink& sink) {
    std::vector<std::string> out;
    for (const auto& e : sink.events())
        if (e["type"] != "log") out.push_back(e["type"].get<std::string>());
    return out;
}

std::string pending_id(const MemorySink& sink) {
    for (const auto& e : sink.events())
        if (e["type"] == "pause") return e["pending"][0].get<std::string>();
    return {};
}

wire::GetSnapshot get(const std::string& session, SnapshotFormat f = SnapshotFormat::html) { return {session, f}; }

struct Rig {
    MapDriver driver;
    RulesDetector rules;
    SystemClock clock;
    MemorySink sink;
    GatewayOptions options;
    std::unique_ptr<Gateway> gw;

    explicit Rig(int timeout_s = 300) {
        options.core.decision_timeout_s = timeout_s;
        options.poll_ms = 10;
        gw = std::make_unique<Gateway>(options, rules, driver, clock, &sink, &sink);
    }
};

int connect_to(int port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    timeval tv{5, 0};
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
    return fd;
}

nlohmann::json read_json(LineReader& r) {
    std::string line;
    REQUIRE(r.next(line) == LineReader::Status::line);
    return nlohmann::json::parse(line);
}

// Reads until a message of `type` arrives.
nlohmann::json read_until(LineReader& r, const std::string& type) {
    for (int i = 0; i < 200; ++i) {
        auto j = read_json(r);
        if (j["type"] == type) return j;
    }
    FAIL("no " << type << " message");
    return {};
}

} // namespace

TEST_CASE("page without PII is served unchanged") {
    Rig rig;
    const std::string page = "<html><body><div>Weather today: sunny</div></body></html>";
    rig.driver.set("s1", page);
    const auto reply = rig.gw->handle(get("s1"));
    CHECK(reply["type"] == "snapshot");
    CHECK(reply["body"] == page);
    CHECK(reply["seq"] == 1);
    CHECK(kinds(rig.sink.audit_lines()) == std::vector<std::string>{"snapshot_received", "snapshot_served"});
}

TEST_CASE("medium finding is redacted and announced") {
    Rig rig;
    rig.driver.set("s1", "<div>Signed in as Maria Garcia</div>");
    const auto reply = rig.gw->handle(get("s1"));
    CHECK(reply["body"] == "<div>Signed in as [REDACTED:name]</div>");
    CHECK(event_types(rig.sink) == std::vector<std::string>{"finding", "highlight"});
    for (const auto& e : rig.sink.events())
        if (e["type"] == "highlight") {
            CHECK(e["color"] == "orange");
            CHECK(e["marker"] == false);
        }
}

TEST_CASE("high finding blocks the agent until the user decides") {
    Rig rig;
    rig.driver.set("s1", "<div>Contact: maria.garcia@example.com</div>");
    auto served = std::async(std::launch::async, [&] { return rig.gw->handle(get("s1")); });
    CHECK(served.wait_for(300ms) == std::future_status::timeout);
    const auto id = pending_id(rig.sink);
    REQUIRE_FALSE(id.empty());

    // Unknown ids get an error and leave the pause in place.
    auto bad = rig.gw->handle(wire::UiCommand{wire::DecisionCommand{std::string("s1"), "nope", Action::allow}});
    REQUIRE(bad.has_value());
    CHECK((*bad)["code"] == "unknown_pending");
    CHECK(served.wait_for(100ms) == std::future_status::timeout);

    CHECK_FALSE(rig.gw->handle(wire::UiCommand{wire::DecisionCommand{std::nullopt, id, Action::deny}}).has_value());
    REQUIRE(served.wait_for(5s) == std::future_status::ready);
    const auto reply = served.get();
    CHECK(reply["body"] == "<div>Contact: [REDACTED:email]</div>");

    const auto k = kinds(rig.sink.audit_lines());
    const auto at = [&](const std::string& name) { return std::find(k.begin(), k.end(), name) - k.begin(); };
    CHECK(at("finding") < at("pause"));
    CHECK(at("pause") < k.size());
    CHECK(at("snapshot_served") < static_cast<long>(k.size()));
    // pause -> (rejected decision) -> decision -> served
    CHECK(k.back() == "snapshot_served");
    CHECK(k[k.size() - 2] == "decision");
    CHECK(event_types(rig.sink).back() == "resume");
}

TEST_CASE("allowed text is served on later requests") {
    Rig rig;
    rig.driver.set("s1", "<div>maria.garcia@example.com</div>");
    auto served = std::async(std::launch::async, [&] { return rig.gw->handle(get("s1")); });
    std::string id;
    for (int i = 0; i < 100 && id.empty(); ++i) {
        std::this_thread::sleep_for(10ms);
        id = pending_id(rig.sink);
    }
    REQUIRE_FALSE(id.empty());
    rig.gw->handle(wire::UiCommand{wire::DecisionCommand{std::nullopt, id, Action::allow}});
    CHECK(served.get()["body"] == "<div>maria.garcia@example.com</div>");
    rig.driver.set("s1", "<p>again</p><div>maria.garcia@example.com</div>");
    CHECK(rig.gw->handle(get("s1"))["body"] == "<p>again</p><div>maria.garcia@example.com</div>");
}

TEST_CASE("a paused session is released by the timeout") {
    Rig rig(1);
    rig.driver.set("s1", "<div>SSN 123-45-6789</div>");
    const auto start = std::chrono::steady_clock::now();
    const auto reply = rig.gw->handle(get("s1"));
    CHECK(std::chrono::steady_clock::now() - start >= 900ms);
    CHECK(reply["body"].get<std::string>().find("123-45-6789") == std::string::npos);
    const auto k = kinds(rig.sink.audit_lines());
    CHECK(std::find(k.begin(), k.end(), "timeout_deny") != k.end());
}

TEST_CASE("detector failures fail closed") {
    MapDriver driver;
    ScriptedDetector det;
    det.items = {{PiiCategory::name, "Alice"}};
    SystemClock clock;
    MemorySink sink;
    Gateway gw({}, det, driver, clock, &sink, &sink);
    driver.set("s1", "<div>Alice</div>");

    det.fail = true;
    auto reply = gw.handle(get("s1"));
    CHECK(reply["type"] == "error");
    CHECK(reply["code"] == "detector_unavailable");

    det.fail = false;
    det.garble = true;
    reply = gw.handle(get("s1"));
    CHECK(reply["code"] == "malformed_detector_output");

    det.garble = false;
    reply = gw.handle(get("s1"));
    CHECK(reply["body"] == "<div>[REDACTED:name]</div>");
    int errors = 0;
    for (const auto& k : kinds(sink.audit_lines())) errors += k == "detector_error";
    CHECK(errors == 2);
}

TEST_CASE("sessions are isolated") {
    Rig rig;
    rig.driver.set("a", "<div>Maria Garcia</div>");
    rig.driver.set("b", "<div>Maria Garcia</div>");
    CHECK(rig.gw->handle(get("a"))["body"] == "<div>[REDACTED:name]</div>");
    // Release the name in session a only.
    std::string id;
    for (const auto& e : rig.sink.events())
        if (e["type"] == "finding") id = e["finding_id"];
    CHECK_FALSE(rig.gw->handle(wire::UiCommand{wire::DecisionCommand{std::string("a"), id, Action::allow}}).has_value());
    CHECK(rig.gw->handle(get("a"))["body"] == "<div>Maria Garcia</div>");
    CHECK(rig.gw->handle(get("b"))["body"] == "<div>[REDACTED:name]</div>");

    auto ambiguous = rig.gw->handle(wire::UiCommand{wire::DecisionCommand{std::nullopt, id, Action::allow}});
    REQUIRE(ambiguous.has_value());
    CHECK((*ambiguous)["code"] == "session_required");
    CHECK(rig.gw->handle(get("zzz"))["code"] == "session_unknown");
    CHECK(rig.gw->session_ids() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("manual redaction from the UI") {
    Rig rig;
    rig.driver.set("s1", "<div>project kestrel</div><p>x</p>");
    rig.gw->handle(get("s1"));
    std::string element;
    rig.gw->with_session("s1", [&](SessionCore& c) { element = c.latest()->elements()[0].id; });
    CHECK_FALSE(rig.gw->handle(wire::UiCommand{wire::ManualRedactCommand{std::nullopt, element}}).has_value());
    CHECK(rig.gw->handle(get("s1"))["body"] == "<div>[REDACTED:user_marked]</div><p>x</p>");
    auto bad = rig.gw->handle(wire::UiCommand{wire::ManualRedactCommand{std::nullopt, "0000000000000000"}});
    REQUIRE(bad.has_value());
    CHECK((*bad)["code"] == "unknown_element");
}

TEST_CASE("audit reaches disk before the snapshot is served") {
    const auto dir = fs::temp_directory_path() / ("pagegate_audit_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    {
        MapDriver driver;
        RulesDetector rules;
        SystemClock clock;
        FileAuditSink audit(dir);
        Gateway gw({}, rules, driver, clock, nullptr, &audit);
        driver.set("s1", "<div>Maria Garcia</div>");
        CHECK(gw.handle(get("s1"))["type"] == "snapshot");
        const auto lines = lines_of(dir / "audit.jsonl");
        REQUIRE_FALSE(lines.empty());
        CHECK(nlohmann::json::parse(lines.back())["kind"] == "snapshot_served");
        CHECK(fs::exists(dir / "decisions_s1.json"));
    }
    fs::remove_all(dir);
}

TEST_CASE("slow UI clients are dropped") {
    UiHub hub(2);
    int pair[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, pair) == 0);
    std::vector<std::pair<int, std::size_t>> drops;
    hub.on_drop = [&](int fd, std::size_t q) { drops.emplace_back(fd, q); };
    auto client = hub.add(pair[0], {});
    for (int i = 0; i < 3; ++i) hub.publish(wire::resume_message("s1"));
    REQUIRE(drops.size() == 1);
    CHECK(drops[0].first == pair[0]);
    std::string line;
    CHECK_FALSE(hub.next_line(client, line));
    hub.remove(client);
    ::close(pair[0]);
    ::close(pair[1]);
}

TEST_CASE("TCP: sync on connect, pause, decision, serve") {
    MapDriver driver;
    RulesDetector rules;
    SystemClock clock;
    MemorySink audit;
    UiHub hub;
    Gateway gw({}, rules, driver, clock, &hub, &audit);
    Server server(gw, hub, "127.0.0.1", 0, 0);
    server.start();
    driver.set("s1", "<div>Signed in as Maria Garcia</div>");

    // First request creates the session.
    const int agent = connect_to(server.agent_port());
    LineReader agent_in(agent, wire::kMaxMessageBytes);
    REQUIRE(write_line(agent, R"({"type":"get_snapshot","session":"s1","format":"html"})"));
    CHECK(read_json(agent_in)["body"] == "<div>Signed in as [REDACTED:name]</div>");

    const int ui = connect_to(server.ui_port());
    LineReader ui_in(ui, wire::kMaxMessageBytes);
    const auto sync = read_json(ui_in);
    CHECK(sync["type"] == "sync");
    CHECK(sync["session"] == "s1");
    CHECK(sync["state"]["decisions"].size() == 1);

    // Malformed input gets an error; the connection stays usable.
    REQUIRE(write_line(ui, "this is not json"));
    CHECK(read_until(ui_in, "error")["code"] == "protocol");

    driver.set("s1", "<div>Signed in as Maria Garcia</div><div>maria.garcia@example.com</div>");
    REQUIRE(write_line(agent, R"({"type":"get_snapshot","session":"s1","format":"html"})"));
    const auto pause = read_until(ui_in, "pause");
    const std::string id = pause["pending"][0];
    REQUIRE(write_line(ui, nlohmann::json{{"type", "decision"}, {"finding_id", id}, {"action", "allow"}}.dump()));
    CHECK(read_json(agent_in)["body"] == "<div>Signed in as [REDACTED:name]</div><div>maria.garcia@example.com</div>");
    read_until(ui_in, "resume");

    // Oversized lines are refused without closing the socket.
    REQUIRE(write_line(agent, std::string(wire::kMaxMessageBytes + 10, 'x')));
    CHECK(read_json(agent_in)["code"] == "too_large");
    REQUIRE(write_line(agent, R"({"type":"get_snapshot","session":"s1"})"));
    CHECK(read_json(agent_in)["type"] == "snapshot");

    ::close(agent);
    ::close(ui);
    server.stop();
}
