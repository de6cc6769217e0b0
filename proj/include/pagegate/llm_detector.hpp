#pragma once

#include "pagegate/detection.hpp"

#include <string>

namespace pagegate {

struct LlmOptions {
    std::string endpoint = "http://127.0.0.1:11434/api/generate";
    std::string model = "qwen3:8b";
    int timeout_s = 30;
};

struct ParsedUrl {
    std::string scheme;
    std::string host;
    int port = 80;
    std::string path;   // starts with '/'
};

// http://host[:port][/path]. Throws Error{config_invalid}.
ParsedUrl parse_http_url(std::string_view url);

// Sends the detection prompt to a locally hosted model server:
// POST {"model","prompt","stream":false,"options":{"temperature":0}} and reads
// the "response" text of the reply.
class LlmDetector final : public Detector {
public:
    explicit LlmDetector(LlmOptions options);

    DetectorKind kind() const override { return DetectorKind::llm; }
    // Throws Error{detector_unavailable} on transport failure, timeout, non-200
    // status or a reply without a "response" string.
    DetectorResponse run(const DetectorRequest& request) override;

    const LlmOptions& options() const { return options_; }

private:
    LlmOptions options_;
    ParsedUrl url_;
};

} // namespace pagegate
