#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pagegate {

enum class ErrorCode {
    unparseable_document,
    detector_unavailable,
    malformed_detector_output,
    unknown_element,
    unknown_pending,
    session_unknown,
    malformed_trace,
    corpus_invalid,
    config_invalid,
    driver_unavailable,
    protocol,
};

std::string_view to_string(ErrorCode code);

// Every failure the pipeline can surface to a caller. The code is what goes on
// the wire; the message is free-form detail for logs.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace pagegate
