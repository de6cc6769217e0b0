#pragma once

#include "pagegate/config.hpp"
#include "pagegate/driver.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pagegate {

struct ServedStep {
    std::size_t step = 0;
    std::optional<std::string> body;   // empty when the step failed closed
    nlohmann::ordered_json agent_message;
};

struct ReplayResult {
    SnapshotFormat format = SnapshotFormat::element_list;
    std::vector<ServedStep> steps;
    std::vector<nlohmann::ordered_json> audit;
    std::vector<nlohmann::ordered_json> ui_events;
    nlohmann::ordered_json decisions;
    std::vector<std::string> diagnostics;
};

// Plays a recorded trace through the full pipeline with a stopped clock, so
// the result depends only on the trace and config. Scripted input for step N
// is applied while step N is being served; whatever is still pending after
// that is denied as if its timeout had expired.
// Throws Error{malformed_trace}.
ReplayResult run_replay(const Trace& trace, const SessionConfig& config);
ReplayResult run_replay(const std::filesystem::path& trace_dir, const SessionConfig& config);

// agent.jsonl, audit.jsonl, ui_events.jsonl, decisions.json and
// served/step_NNN.{txt,html}.
void write_replay(const ReplayResult& result, const std::filesystem::path& out_dir);

} // namespace pagegate
