#include "pagegate/llm_detector.hpp"

#include "pagegate/error.hpp"

#include "httplib.h"
#include "json.hpp"

#include <charconv>

namespace pagegate {

ParsedUrl parse_http_url(std::string_view url) {
    ParsedUrl out;
    const auto sep = url.find("://");
    if (sep == std::string_view::npos) throw Error(ErrorCode::config_invalid, "endpoint needs a scheme: " + std::string(url));
    out.scheme = std::string(url.substr(0, sep));
    if (out.scheme != "http") throw Error(ErrorCode::config_invalid, "only http endpoints are supported");
    std::string_view rest = url.substr(sep + 3);
    const auto slash = rest.find('/');
    std::string_view authority = rest.substr(0, slash);
    out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        const auto digits = authority.substr(colon + 1);
        int port = 0;
        const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
        if (ec != std::errc{} || p != digits.data() + digits.size() || port <= 0 || port > 65535)
            throw Error(ErrorCode::config_invalid, "bad port in endpoint: " + std::string(url));
        out.port = port;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) throw Error(ErrorCode::config_invalid, "endpoint has no host: " + std::string(url));
    out.host = std::string(authority);
    return out;
}

LlmDetector::LlmDetector(LlmOptions options) : options_(std::move(options)), url_(parse_http_url(options_.endpoint)) {}

DetectorResponse LlmDetector::run(const DetectorRequest& request) {
    if (request.candidates.empty()) return {};
    nlohmann::ordered_json body;
    body["model"] = options_.model;
    body["prompt"] = build_detection_prompt(request.candidates);
    body["stream"] = false;
    body["options"] = {{"temperature", 0}};

    httplib::Client client(url_.host, url_.port);
    const auto timeout = std::chrono::seconds(options_.timeout_s > 0 ? options_.timeout_s : 30);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const auto res = client.Post(url_.path, body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::detector_unavailable, "model server: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorCode::detector_unavailable, "model server returned status " + std::to_string(res->status));
    const auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("response") || !reply["response"].is_string())
        throw Error(ErrorCode::detector_unavailable, "model server reply has no response text");
    return parse_llm_output(reply["response"].get<std::string>(), request);
}

} // namespace pagegate
