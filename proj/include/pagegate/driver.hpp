#pragma once

#include "pagegate/snapshot.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pagegate {

struct PageCapture {
    std::string html;
    std::string url;
    std::vector<std::pair<std::string, Rect>> rects;   // dom_path -> box, when the driver knows layout
};

// Supplies the current raw page of a browsing session.
class DriverAdapter {
public:
    virtual ~DriverAdapter() = default;
    // Throws Error{session_unknown} or Error{driver_unavailable}.
    virtual PageCapture capture(const std::string& session) = 0;
    // Sessions known up front; empty when discovered on demand.
    virtual std::vector<std::string> sessions() const { return {}; }
};

// A recorded trace: step_NNN.html files, optionally trace.json with
// {"session","url","format"} and decisions.jsonl with scripted user input.
struct Trace {
    std::string session = "replay";
    std::string url;
    std::optional<SnapshotFormat> format;
    std::vector<std::filesystem::path> steps;
    std::vector<nlohmann::json> script;   // decisions.jsonl lines, validated
};

// Throws Error{malformed_trace}.
Trace load_trace(const std::filesystem::path& dir);

// Serves the trace's steps in order, repeating the last one once exhausted.
class ReplayDriver final : public DriverAdapter {
public:
    explicit ReplayDriver(Trace trace) : trace_(std::move(trace)) {}
    PageCapture capture(const std::string& session) override;
    std::vector<std::string> sessions() const override { return {trace_.session}; }

private:
    Trace trace_;
    std::size_t next_ = 0;
    std::mutex mu_;
};

// Reads the live page of a W3C WebDriver session. The gateway session id is
// the WebDriver session id.
class WebDriverAdapter final : public DriverAdapter {
public:
    explicit WebDriverAdapter(std::string base_url, int timeout_s = 10);
    PageCapture capture(const std::string& session) override;

private:
    std::string base_url_;
    int timeout_s_;
};

// Script run in the page to report element boxes keyed by the same dom_path
// scheme the snapshot model uses.
std::string_view geometry_script();

} // namespace pagegate
