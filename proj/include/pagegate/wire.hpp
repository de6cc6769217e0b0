#pragma once

#include "pagegate/detection.hpp"
#include "pagegate/error.hpp"
#include "pagegate/policy.hpp"
#include "pagegate/redaction.hpp"
#include "pagegate/snapshot.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pagegate::wire {

using nlohmann::ordered_json;

inline constexpr std::size_t kMaxMessageBytes = 1u << 20;

// Wire error codes beyond the pipeline's own ErrorCode names.
inline constexpr std::string_view kUnknownType = "unknown_type";
inline constexpr std::string_view kTooLarge = "too_large";
inline constexpr std::string_view kSessionRequired = "session_required";
inline constexpr std::string_view kBadRequest = "bad_request";

// One line, no trailing newline. Invalid UTF-8 is replaced, never thrown.
std::string encode(const ordered_json& message);

// gateway -> agent
ordered_json snapshot_message(std::string_view session, std::uint64_t seq, SnapshotFormat format, std::string_view body);
ordered_json error_message(std::string_view code, std::string_view detail);
ordered_json error_message(const Error& error);

// gateway -> UI. `session` is added so one panel can follow several sessions.
ordered_json finding_message(std::string_view session, const PiiFinding& finding);
ordered_json highlight_message(std::string_view session, const HighlightInstruction& h);
ordered_json pause_message(std::string_view session, const std::vector<std::string>& pending);
ordered_json resume_message(std::string_view session);
ordered_json log_message(const ordered_json& audit_line);
ordered_json sync_message(std::string_view session, const ordered_json& state);

struct GetSnapshot {
    std::optional<std::string> session;
    std::optional<SnapshotFormat> format;
};

struct DecisionCommand {
    std::optional<std::string> session;
    std::string finding_id;
    Action action = Action::deny;
};

struct ManualRedactCommand {
    std::optional<std::string> session;
    std::string element_id;
};

using UiCommand = std::variant<DecisionCommand, ManualRedactCommand>;

struct DecodeError {
    std::string code;
    std::string detail;
};

// Total functions: any input gives a value or a DecodeError.
std::variant<GetSnapshot, DecodeError> decode_agent(std::string_view line);
std::variant<UiCommand, DecodeError> decode_ui(std::string_view line);

} // namespace pagegate::wire
