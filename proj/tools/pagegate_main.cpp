#include "pagegate/config.hpp"
#include "pagegate/driver.hpp"
#include "pagegate/error.hpp"
#include "pagegate/eval.hpp"
#include "pagegate/gateway.hpp"
#include "pagegate/policy.hpp"
#include "pagegate/redaction.hpp"
#include "pagegate/replay.hpp"
#include "pagegate/server.hpp"
#include "pagegate/sinks.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace pagegate;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

// Validation problems found after parsing, reported like CLI11's own.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::config_invalid, "cannot read " + p.string());
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
}

SessionConfig config_from(const std::string& path) { return path.empty() ? SessionConfig{} : load_config(path); }

void apply_detector(SessionConfig& config, const std::string& name) {
    if (name.empty()) return;
    if (name == "rules") config.detector = DetectorKind::rules;
    else if (name == "llm") config.detector = DetectorKind::llm;
    else throw UsageError("--detector must be rules or llm");
}

int run_serve(const std::string& config_path) {
    const auto config = load_config(config_path);
    auto detector = make_detector(config);
    std::unique_ptr<DriverAdapter> driver;
    if (config.driver.kind == "webdriver") driver = std::make_unique<WebDriverAdapter>(config.driver.webdriver_url);
    else driver = std::make_unique<ReplayDriver>(load_trace(config.driver.trace));

    std::unique_ptr<FileAuditSink> audit;
    if (!config.log_path.empty()) audit = std::make_unique<FileAuditSink>(config.log_path);
    SystemClock clock;
    UiHub hub;
    GatewayOptions options;
    options.core = {config.decision_timeout_s, config.highlight_duration_ms, config.redaction_mode, false};
    options.default_format = config.format;
    Gateway gateway(options, *detector, *driver, clock, &hub, audit.get());
    Server server(gateway, hub, config.bind, config.agent_port, config.ui_port);
    server.start();
    std::cerr << "pagegate: agent port " << server.agent_port() << ", ui port " << server.ui_port() << "\n";

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        gateway.tick();
    }
    gateway.stop();
    server.stop();
    return kOk;
}

int run_replay_cmd(const std::string& trace, const std::string& config_path, const std::string& out) {
    const auto config = config_from(config_path);
    const auto result = run_replay(fs::path(trace), config);
    write_replay(result, out);
    std::size_t served = 0;
    for (const auto& s : result.steps)
        if (s.body) ++served;
    for (const auto& d : result.diagnostics) std::cerr << "replay: " << d << "\n";
    ordered_json summary;
    summary["steps"] = result.steps.size();
    summary["served"] = served;
    summary["audit_events"] = result.audit.size();
    summary["out"] = out;
    std::cout << summary.dump() << "\n";
    return kOk;
}

int run_eval(const std::string& corpus_dir, const std::string& detector_name, const std::string& config_path,
             const std::string& matching_name, bool latency, bool table) {
    auto config = config_from(config_path);
    config.detector = DetectorKind::rules;
    apply_detector(config, detector_name);
    const auto matching = parse_matching(matching_name);
    if (!matching) throw UsageError("--matching must be exact or overlap");
    const auto corpus = load_corpus(corpus_dir);
    auto detector = make_detector(config);
    auto report = evaluate(corpus, *detector, *matching);
    if (latency) report.latency = measure_latency(corpus, *detector);
    if (table) std::cout << format_table(report);
    else std::cout << to_json(report).dump(2) << "\n";
    return kOk;
}

int run_redact(const std::string& in, const std::string& out, const std::string& detector_name,
               const std::string& config_path, const std::string& mode_name) {
    auto config = config_from(config_path);
    config.detector = DetectorKind::rules;
    apply_detector(config, detector_name);
    RedactionPlan plan;
    plan.session_id = "redact";
    plan.mode = config.redaction_mode;
    if (!mode_name.empty()) {
        const auto mode = parse_redaction_mode(mode_name);
        if (!mode) throw UsageError("--mode must be auto, delete_text or delete_element");
        plan.mode = *mode;
    }
    const auto snapshot = parse_snapshot(read_file(in), "redact", 1, in);
    auto detector = make_detector(config);
    const auto result = detect(snapshot, *detector);
    if (result.partial) throw Error(ErrorCode::malformed_detector_output, "detector output was incomplete");
    for (const auto& f : result.findings) plan.removals.push_back({f.element_id, f.matched_text, std::string(to_string(f.category))});
    const auto redacted = redact(snapshot, plan);
    std::ofstream o(out, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write " + out);
    o << serialize_snapshot(redacted, SnapshotFormat::html);
    std::cerr << "redact: " << result.findings.size() << " finding(s) removed\n";
    return kOk;
}

// Summarises an audit log and checks its shape: consecutive indexes per
// session, known kinds and non-decreasing timestamps.
int run_inspect(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::config_invalid, "cannot read " + file);
    std::map<std::string, int> kinds;
    std::map<std::string, std::int64_t> next_index, last_at;
    std::vector<std::string> problems;
    std::size_t events = 0, n = 0;
    for (std::string line; std::getline(in, line);) {
        ++n;
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line, nullptr, false);
        const std::string where = "line " + std::to_string(n) + ": ";
        if (j.is_discarded() || !j.is_object()) {
            problems.push_back(where + "not a JSON object");
            continue;
        }
        if (!j.contains("index") || !j["index"].is_number_integer() || !j.contains("at") || !j["at"].is_number_integer() ||
            !j.contains("session") || !j["session"].is_string() || !j.contains("kind") || !j["kind"].is_string()) {
            problems.push_back(where + "missing index, at, session or kind");
            continue;
        }
        ++events;
        const auto session = j["session"].get<std::string>();
        const auto kind = j["kind"].get<std::string>();
        if (!parse_audit_kind(kind)) problems.push_back(where + "unknown kind " + kind);
        ++kinds[kind];
        const auto index = j["index"].get<std::int64_t>();
        if (next_index.count(session) && index != next_index[session])
            problems.push_back(where + "index " + std::to_string(index) + " out of sequence");
        next_index[session] = index + 1;
        const auto at = j["at"].get<std::int64_t>();
        if (last_at.count(session) && at < last_at[session]) problems.push_back(where + "timestamp goes backwards");
        last_at[session] = at;
    }
    ordered_json out;
    out["events"] = events;
    out["sessions"] = ordered_json::array();
    for (const auto& [s, _] : next_index) out["sessions"].push_back(s);
    out["kinds"] = kinds;
    out["problems"] = problems;
    out["valid"] = problems.empty();
    std::cout << out.dump(2) << "\n";
    return problems.empty() ? kOk : kRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Privacy gateway between a web agent and the pages it reads"};
    app.require_subcommand(1);

    std::string config_path, trace, out, corpus, detector, matching = "overlap", in, mode, log_file;
    bool latency = false, table = false;

    auto* serve = app.add_subcommand("serve", "Run the gateway");
    serve->add_option("--config", config_path, "Session config JSON")->required()->check(CLI::ExistingFile);

    auto* replay = app.add_subcommand("replay", "Play a recorded trace through the pipeline");
    replay->add_option("--trace", trace, "Trace directory")->required()->check(CLI::ExistingDirectory);
    replay->add_option("--config", config_path, "Session config JSON")->check(CLI::ExistingFile);
    replay->add_option("--out", out, "Output directory")->required();

    auto* eval = app.add_subcommand("eval", "Score a detector on an annotated corpus");
    eval->add_option("--corpus", corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
    eval->add_option("--detector", detector, "rules or llm (default rules)");
    eval->add_option("--config", config_path, "Session config JSON, for llm settings")->check(CLI::ExistingFile);
    eval->add_option("--matching", matching, "overlap or exact");
    eval->add_flag("--latency", latency, "Measure per-page latency");
    eval->add_flag("--table", table, "Print an aligned table instead of JSON");

    auto* red = app.add_subcommand("redact", "Redact every detected item in one HTML file");
    red->add_option("--in", in, "Input HTML")->required()->check(CLI::ExistingFile);
    red->add_option("--out", out, "Output HTML")->required();
    red->add_option("--detector", detector, "rules or llm (default rules)");
    red->add_option("--config", config_path, "Session config JSON")->check(CLI::ExistingFile);
    red->add_option("--mode", mode, "auto, delete_text or delete_element");

    auto* inspect = app.add_subcommand("inspect-log", "Summarise and check an audit log");
    inspect->add_option("file", log_file, "audit.jsonl")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*serve) return run_serve(config_path);
        if (*replay) return run_replay_cmd(trace, config_path, out);
        if (*eval) return run_eval(corpus, detector, config_path, matching, latency, table);
        if (*red) return run_redact(in, out, detector, config_path, mode);
        if (*inspect) return run_inspect(log_file);
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "pagegate: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == ErrorCode::config_invalid ? kUsage : kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "pagegate: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
