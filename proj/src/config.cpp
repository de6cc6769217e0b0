#include "pagegate/config.hpp"

#include "pagegate/error.hpp"
#include "pagegate/llm_detector.hpp"
#include "pagegate/rules_detector.hpp"

#include <fstream>
#include <sstream>

namespace pagegate {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::config_invalid, what); }

std::string get_string(const nlohmann::json& j, const char* key) {
    if (!j.is_string()) invalid(std::string(key) + " must be a string");
    return j.get<std::string>();
}

int get_int(const nlohmann::json& j, const char* key, int lo, int hi) {
    if (!j.is_number_integer()) invalid(std::string(key) + " must be an integer");
    const auto v = j.get<long long>();
    if (v < lo || v > hi) invalid(std::string(key) + " out of range");
    return static_cast<int>(v);
}

DriverConfig parse_driver(const nlohmann::json& j) {
    if (!j.is_object()) invalid("driver must be an object");
    DriverConfig d;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") d.kind = get_string(value, "driver.kind");
        else if (key == "trace") d.trace = get_string(value, "driver.trace");
        else if (key == "webdriver_url") d.webdriver_url = get_string(value, "driver.webdriver_url");
        else invalid("unknown driver key: " + key);
    }
    if (d.kind != "replay" && d.kind != "webdriver") invalid("driver.kind must be replay or webdriver");
    return d;
}

} // namespace

SessionConfig parse_config(const nlohmann::json& j) {
    if (!j.is_object()) invalid("config must be a JSON object");
    SessionConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "detector") {
            const auto k = parse_detector_kind(get_string(value, "detector"));
            if (!k || *k == DetectorKind::manual) invalid("detector must be rules or llm");
            c.detector = *k;
        } else if (key == "llm_endpoint") c.llm_endpoint = get_string(value, "llm_endpoint");
        else if (key == "llm_model") c.llm_model = get_string(value, "llm_model");
        else if (key == "llm_timeout_s") c.llm_timeout_s = get_int(value, "llm_timeout_s", 1, 3600);
        else if (key == "decision_timeout_s") c.decision_timeout_s = get_int(value, "decision_timeout_s", 0, 86400);
        else if (key == "highlight_duration_ms") c.highlight_duration_ms = get_int(value, "highlight_duration_ms", 1, 600000);
        else if (key == "redaction_mode") {
            const auto m = parse_redaction_mode(get_string(value, "redaction_mode"));
            if (!m) invalid("redaction_mode must be auto, delete_text or delete_element");
            c.redaction_mode = *m;
        } else if (key == "log_path") c.log_path = get_string(value, "log_path");
        else if (key == "format") {
            const auto f = parse_snapshot_format(get_string(value, "format"));
            if (!f) invalid("format must be element_list or html");
            c.format = *f;
        } else if (key == "bind") c.bind = get_string(value, "bind");
        else if (key == "agent_port") c.agent_port = get_int(value, "agent_port", 0, 65535);
        else if (key == "ui_port") c.ui_port = get_int(value, "ui_port", 0, 65535);
        else if (key == "driver") c.driver = parse_driver(value);
        else invalid("unknown config key: " + key);
    }
    return c;
}

SessionConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) invalid("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto j = nlohmann::json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) invalid("config is not valid JSON: " + path.string());
    return parse_config(j);
}

nlohmann::ordered_json to_json(const SessionConfig& c) {
    nlohmann::ordered_json j;
    j["detector"] = to_string(c.detector);
    j["llm_endpoint"] = c.llm_endpoint;
    j["llm_model"] = c.llm_model;
    j["llm_timeout_s"] = c.llm_timeout_s;
    j["decision_timeout_s"] = c.decision_timeout_s;
    j["highlight_duration_ms"] = c.highlight_duration_ms;
    j["redaction_mode"] = to_string(c.redaction_mode);
    j["log_path"] = c.log_path;
    j["format"] = to_string(c.format);
    j["bind"] = c.bind;
    j["agent_port"] = c.agent_port;
    j["ui_port"] = c.ui_port;
    j["driver"] = {{"kind", c.driver.kind}, {"trace", c.driver.trace}, {"webdriver_url", c.driver.webdriver_url}};
    return j;
}

std::unique_ptr<Detector> make_detector(const SessionConfig& config) {
    if (config.detector == DetectorKind::llm)
        return std::make_unique<LlmDetector>(LlmOptions{config.llm_endpoint, config.llm_model, config.llm_timeout_s});
    return std::make_unique<RulesDetector>();
}

} // namespace pagegate
