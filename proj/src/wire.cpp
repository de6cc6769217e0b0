#include "pagegate/wire.hpp"

#include "pagegate/error.hpp"

namespace pagegate::wire {

namespace {

ordered_json bbox_json(const std::optional<Rect>& r) {
    if (!r) return nullptr;
    ordered_json j;
    j["x"] = r->x;
    j["y"] = r->y;
    j["width"] = r->width;
    j["height"] = r->height;
    return j;
}

// Shared envelope checks; on success `out` holds the object and `type` its type.
std::optional<DecodeError> envelope(std::string_view line, nlohmann::json& out, std::string& type) {
    if (line.size() > kMaxMessageBytes) return DecodeError{std::string(kTooLarge), "message exceeds 1 MiB"};
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (out.is_discarded()) return DecodeError{std::string(to_string(ErrorCode::protocol)), "not valid JSON"};
    if (!out.is_object()) return DecodeError{std::string(to_string(ErrorCode::protocol)), "message must be an object"};
    const auto it = out.find("type");
    if (it == out.end() || !it->is_string())
        return DecodeError{std::string(to_string(ErrorCode::protocol)), "missing string field \"type\""};
    type = it->get<std::string>();
    return std::nullopt;
}

std::optional<DecodeError> optional_session(const nlohmann::json& j, std::optional<std::string>& session) {
    const auto it = j.find("session");
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) return DecodeError{std::string(kBadRequest), "session must be a string"};
    session = it->get<std::string>();
    return std::nullopt;
}

std::optional<std::string> required_string(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) return std::nullopt;
    return it->get<std::string>();
}

} // namespace

std::string encode(const ordered_json& message) {
    return message.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ordered_json snapshot_message(std::string_view session, std::uint64_t seq, SnapshotFormat format, std::string_view body) {
    ordered_json j;
    j["type"] = "snapshot";
    j["session"] = session;
    j["seq"] = seq;
    j["format"] = to_string(format);
    j["body"] = body;
    return j;
}

ordered_json error_message(std::string_view code, std::string_view detail) {
    ordered_json j;
    j["type"] = "error";
    j["code"] = code;
    j["detail"] = detail;
    return j;
}

ordered_json error_message(const Error& error) { return error_message(to_string(error.code()), error.what()); }

ordered_json finding_message(std::string_view session, const PiiFinding& f) {
    ordered_json j;
    j["type"] = "finding";
    j["session"] = session;
    j["finding_id"] = f.finding_id;
    j["element_id"] = f.element_id;
    j["category"] = to_string(f.category);
    j["tier"] = to_string(f.tier);
    j["label"] = descriptor(f.category).human_label;
    return j;
}

ordered_json highlight_message(std::string_view session, const HighlightInstruction& h) {
    ordered_json j;
    j["type"] = "highlight";
    j["session"] = session;
    j["element_id"] = h.element_id;
    j["color"] = h.color;
    j["duration_ms"] = h.duration_ms;
    j["marker"] = h.marker;
    j["bbox"] = bbox_json(h.bbox);
    return j;
}

ordered_json pause_message(std::string_view session, const std::vector<std::string>& pending) {
    ordered_json j;
    j["type"] = "pause";
    j["session"] = session;
    j["pending"] = pending;
    return j;
}

ordered_json resume_message(std::string_view session) {
    ordered_json j;
    j["type"] = "resume";
    j["session"] = session;
    return j;
}

ordered_json log_message(const ordered_json& audit_line) {
    ordered_json j;
    j["type"] = "log";
    j["event"] = audit_line;
    return j;
}

ordered_json sync_message(std::string_view session, const ordered_json& state) {
    ordered_json j;
    j["type"] = "sync";
    j["session"] = session;
    j["state"] = state;
    return j;
}

std::variant<GetSnapshot, DecodeError> decode_agent(std::string_view line) {
    nlohmann::json j;
    std::string type;
    if (auto err = envelope(line, j, type)) return *err;
    if (type != "get_snapshot") return DecodeError{std::string(kUnknownType), "agent message type: " + type};
    GetSnapshot out;
    if (auto err = optional_session(j, out.session)) return *err;
    const auto it = j.find("format");
    if (it != j.end() && !it->is_null()) {
        const auto f = it->is_string() ? parse_snapshot_format(it->get<std::string>()) : std::nullopt;
        if (!f) return DecodeError{std::string(kBadRequest), "format must be element_list or html"};
        out.format = f;
    }
    return out;
}

std::variant<UiCommand, DecodeError> decode_ui(std::string_view line) {
    nlohmann::json j;
    std::string type;
    if (auto err = envelope(line, j, type)) return *err;
    if (type == "decision") {
        DecisionCommand c;
        if (auto err = optional_session(j, c.session)) return *err;
        const auto id = required_string(j, "finding_id");
        if (!id) return DecodeError{std::string(kBadRequest), "decision needs finding_id"};
        const auto action = required_string(j, "action");
        const auto parsed = action ? parse_action(*action) : std::nullopt;
        if (!parsed) return DecodeError{std::string(kBadRequest), "action must be allow or deny"};
        c.finding_id = *id;
        c.action = *parsed;
        return UiCommand{c};
    }
    if (type == "manual_redact") {
        ManualRedactCommand c;
        if (auto err = optional_session(j, c.session)) return *err;
        const auto id = required_string(j, "element_id");
        if (!id) return DecodeError{std::string(kBadRequest), "manual_redact needs element_id"};
        c.element_id = *id;
        return UiCommand{c};
    }
    return DecodeError{std::string(kUnknownType), "ui message type: " + type};
}

} // namespace pagegate::wire
