#include "pagegate/replay.hpp"

#include "pagegate/error.hpp"
#include "pagegate/llm_detector.hpp"
#include "pagegate/rules_detector.hpp"
#include "pagegate/session.hpp"
#include "pagegate/sinks.hpp"
#include "pagegate/wire.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace pagegate {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::malformed_trace, "cannot read " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string finding_for_match(const SessionCore& core, const json& match) {
    const auto category = parse_category(match["category"].get<std::string>());
    const auto text = match["text"].get<std::string>();
    for (const auto& f : core.latest_findings())
        if (f.category == *category && f.matched_text == text) return f.finding_id;
    return {};
}

void apply_script(SessionCore& core, const json& entry, std::vector<std::string>& diagnostics) {
    const auto step = entry["step"].get<long long>();
    if (entry["type"] == "decision") {
        std::string id = entry.contains("finding_id") ? entry["finding_id"].get<std::string>() : finding_for_match(core, entry["match"]);
        if (id.empty()) {
            diagnostics.push_back("step " + std::to_string(step) + ": scripted decision matches no finding");
            id = "unmatched";
        }
        if (core.decide(id, *parse_action(entry["action"].get<std::string>())) == ResolveResult::unknown_pending)
            diagnostics.push_back("step " + std::to_string(step) + ": decision for " + id + " was not pending");
        return;
    }
    std::string element_id;
    if (entry.contains("element_id")) {
        element_id = entry["element_id"].get<std::string>();
    } else if (const auto* snap = core.latest()) {
        const auto text = entry["text"].get<std::string>();
        for (const auto& e : snap->elements())
            if (e.text == text) {
                element_id = e.id;
                break;
            }
    }
    try {
        core.manual_redact(element_id);
    } catch (const Error& e) {
        diagnostics.push_back("step " + std::to_string(step) + ": " + e.what());
    }
}

void write_lines(const fs::path& p, const std::vector<ordered_json>& lines) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::malformed_trace, "cannot write " + p.string());
    for (const auto& l : lines) out << wire::encode(l) << '\n';
}

} // namespace

ReplayResult run_replay(const Trace& trace, const SessionConfig& config) {
    const SnapshotFormat format = trace.format.value_or(config.format);
    auto detector = make_detector(config);
    ManualClock clock(0);
    MemorySink sink;
    CoreOptions options{config.decision_timeout_s, config.highlight_duration_ms, config.redaction_mode, true};
    SessionCore core(trace.session, options, *detector, clock, &sink, &sink);

    ReplayResult result;
    result.format = format;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const std::size_t step = i + 1;
        ServedStep served{step, std::nullopt, {}};
        std::optional<Error> failure;
        try {
            core.ingest({read_file(trace.steps[i]), trace.url, {}});
        } catch (const Error& e) {
            if (e.code() == ErrorCode::malformed_trace) throw;
            failure = e;
        }
        for (const auto& entry : trace.script)
            if (entry["step"].get<long long>() == static_cast<long long>(step)) apply_script(core, entry, result.diagnostics);
        if (core.paused()) core.expire_all();

        if (failure) {
            served.agent_message = wire::error_message(*failure);
        } else {
            const auto out = core.emit(format);
            served.body = out.body;
            served.agent_message = wire::snapshot_message(trace.session, out.seq, format, out.body);
        }
        result.steps.push_back(std::move(served));
    }
    result.audit = sink.audit_lines();
    result.ui_events = sink.events();
    result.decisions = decisions_json(core.state());
    return result;
}

ReplayResult run_replay(const fs::path& trace_dir, const SessionConfig& config) {
    return run_replay(load_trace(trace_dir), config);
}

void write_replay(const ReplayResult& result, const fs::path& out_dir) {
    const SnapshotFormat format = result.format;
    std::error_code ec;
    fs::create_directories(out_dir / "served", ec);
    if (ec) throw Error(ErrorCode::malformed_trace, "cannot create " + out_dir.string());
    std::vector<ordered_json> agent;
    for (const auto& s : result.steps) {
        agent.push_back(s.agent_message);
        if (!s.body) continue;
        char name[32];
        std::snprintf(name, sizeof name, "step_%03zu.%s", s.step, format == SnapshotFormat::html ? "html" : "txt");
        std::ofstream out(out_dir / "served" / name, std::ios::binary | std::ios::trunc);
        out << *s.body;
    }
    write_lines(out_dir / "agent.jsonl", agent);
    write_lines(out_dir / "audit.jsonl", result.audit);
    write_lines(out_dir / "ui_events.jsonl", result.ui_events);
    std::ofstream(out_dir / "decisions.json", std::ios::binary | std::ios::trunc) << result.decisions.dump(2) << '\n';
}

} // namespace pagegate
