#include "pagegate/error.hpp"

namespace pagegate {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::unparseable_document: return "unparseable_document";
    case ErrorCode::detector_unavailable: return "detector_unavailable";
    case ErrorCode::malformed_detector_output: return "malformed_detector_output";
    case ErrorCode::unknown_element: return "unknown_element";
    case ErrorCode::unknown_pending: return "unknown_pending";
    case ErrorCode::session_unknown: return "session_unknown";
    case ErrorCode::malformed_trace: return "malformed_trace";
    case ErrorCode::corpus_invalid: return "corpus_invalid";
    case ErrorCode::config_invalid: return "config_invalid";
    case ErrorCode::driver_unavailable: return "driver_unavailable";
    case ErrorCode::protocol: return "protocol";
    }
    return "unknown";
}

} // namespace pagegate
