#pragma once

#include "pagegate/detection.hpp"
#include "pagegate/redaction.hpp"
#include "pagegate/snapshot.hpp"

#include "json.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace pagegate {

struct DriverConfig {
    std::string kind = "replay";        // replay | webdriver
    std::string trace;                  // replay: trace directory
    std::string webdriver_url = "http://127.0.0.1:4444";
};

struct SessionConfig {
    DetectorKind detector = DetectorKind::rules;
    std::string llm_endpoint = "http://127.0.0.1:11434/api/generate";
    std::string llm_model = "qwen3:8b";
    int llm_timeout_s = 30;
    int decision_timeout_s = 300;   // 0 disables
    int highlight_duration_ms = 3000;
    RedactionMode redaction_mode = RedactionMode::automatic;
    std::string log_path;           // directory; empty: no files
    SnapshotFormat format = SnapshotFormat::element_list;
    std::string bind = "127.0.0.1";
    int agent_port = 7301;
    int ui_port = 7302;
    DriverConfig driver;
};

// Unknown keys and out-of-range values are rejected. Throws Error{config_invalid}.
SessionConfig parse_config(const nlohmann::json& j);
SessionConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const SessionConfig& config);

std::unique_ptr<Detector> make_detector(const SessionConfig& config);

} // namespace pagegate
