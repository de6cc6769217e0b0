#include "pagegate/driver.hpp"

#include "pagegate/error.hpp"
#include "pagegate/llm_detector.hpp"

#include "httplib.h"
#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace pagegate {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::malformed_trace, what); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) malformed("cannot read " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void validate_script_line(const nlohmann::json& j, std::size_t steps, std::size_t line_no) {
    const std::string where = "decisions.jsonl line " + std::to_string(line_no) + ": ";
    if (!j.is_object()) malformed(where + "not an object");
    if (!j.contains("step") || !j["step"].is_number_integer()) malformed(where + "needs integer step");
    const auto step = j["step"].get<long long>();
    if (step < 1 || static_cast<std::size_t>(step) > steps) malformed(where + "step out of range");
    const auto type = j.value("type", std::string());
    if (type == "decision") {
        const auto action = j.value("action", std::string());
        if (action != "allow" && action != "deny") malformed(where + "action must be allow or deny");
        const bool by_id = j.contains("finding_id") && j["finding_id"].is_string();
        const bool by_match = j.contains("match") && j["match"].is_object() && j["match"].contains("category") &&
                              j["match"]["category"].is_string() && j["match"].contains("text") &&
                              j["match"]["text"].is_string();
        if (by_id == by_match) malformed(where + "decision needs exactly one of finding_id or match");
        if (by_match && !parse_category(j["match"]["category"].get<std::string>()))
            malformed(where + "unknown category");
    } else if (type == "manual_redact") {
        const bool by_id = j.contains("element_id") && j["element_id"].is_string();
        const bool by_text = j.contains("text") && j["text"].is_string();
        if (by_id == by_text) malformed(where + "manual_redact needs exactly one of element_id or text");
    } else {
        malformed(where + "type must be decision or manual_redact");
    }
}

} // namespace

Trace load_trace(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) malformed("not a directory: " + dir.string());
    Trace t;
    static const std::regex step_name(R"(step_(\d+)\.html)");
    std::vector<std::pair<long, fs::path>> numbered;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        std::smatch m;
        if (entry.is_regular_file() && std::regex_match(name, m, step_name)) numbered.emplace_back(std::stol(m[1]), entry.path());
    }
    std::sort(numbered.begin(), numbered.end());
    for (std::size_t i = 0; i < numbered.size(); ++i) {
        if (numbered[i].first != static_cast<long>(i + 1)) malformed("steps must be numbered 1..N without gaps");
        t.steps.push_back(numbered[i].second);
    }
    if (fs::exists(dir / "trace.json")) {
        const auto j = nlohmann::json::parse(read_file(dir / "trace.json"), nullptr, false);
        if (j.is_discarded() || !j.is_object()) malformed("trace.json is not a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (key == "session" && value.is_string() && !value.get<std::string>().empty()) t.session = value.get<std::string>();
            else if (key == "url" && value.is_string()) t.url = value.get<std::string>();
            else if (key == "format" && value.is_string() && parse_snapshot_format(value.get<std::string>()))
                t.format = parse_snapshot_format(value.get<std::string>());
            else malformed("trace.json: bad key " + key);
        }
    }
    if (fs::exists(dir / "decisions.jsonl")) {
        std::istringstream lines(read_file(dir / "decisions.jsonl"));
        std::string line;
        std::size_t n = 0;
        while (std::getline(lines, line)) {
            ++n;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) malformed("decisions.jsonl line " + std::to_string(n) + ": not JSON");
            validate_script_line(j, t.steps.size(), n);
            t.script.push_back(std::move(j));
        }
    }
    return t;
}

PageCapture ReplayDriver::capture(const std::string& session) {
    if (session != trace_.session) throw Error(ErrorCode::session_unknown, "unknown session " + session);
    std::lock_guard lock(mu_);
    if (trace_.steps.empty()) throw Error(ErrorCode::driver_unavailable, "trace has no steps");
    const auto& path = trace_.steps[std::min(next_, trace_.steps.size() - 1)];
    if (next_ < trace_.steps.size()) ++next_;
    return {read_file(path), trace_.url, {}};
}

WebDriverAdapter::WebDriverAdapter(std::string base_url, int timeout_s)
    : base_url_(std::move(base_url)), timeout_s_(timeout_s) {
    parse_http_url(base_url_);
}

std::string_view geometry_script() {
    return R"JS(
const tags = new Set(["div","span","a","input","textarea","select","p","li","td","th","label","h1","h2","h3","h4","h5","h6","button","option"]);
function pathOf(el) {
  const parts = [];
  for (let n = el; n && n.nodeType === 1; n = n.parentElement) {
    const tag = n.tagName.toLowerCase();
    if (tag === "html") { parts.push("html"); break; }
    let i = 0;
    for (let s = n.previousElementSibling; s; s = s.previousElementSibling)
      if (s.tagName.toLowerCase() === tag) i++;
    parts.push(tag + "[" + i + "]");
  }
  return parts.reverse().join("/");
}
const out = [];
for (const el of document.querySelectorAll("*")) {
  if (!tags.has(el.tagName.toLowerCase())) continue;
  const r = el.getBoundingClientRect();
  out.push([pathOf(el), r.x, r.y, r.width, r.height]);
}
return {html: document.documentElement.outerHTML, url: location.href, rects: out};
)JS";
}

PageCapture WebDriverAdapter::capture(const std::string& session) {
    const auto url = parse_http_url(base_url_);
    httplib::Client client(url.host, url.port);
    client.set_connection_timeout(std::chrono::seconds(timeout_s_));
    client.set_read_timeout(std::chrono::seconds(timeout_s_));
    std::string prefix = url.path == "/" ? "" : url.path;
    if (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    nlohmann::json body = {{"script", std::string(geometry_script())}, {"args", nlohmann::json::array()}};
    const auto res = client.Post(prefix + "/session/" + session + "/execute/sync", body.dump(), "application/json");
    if (!res) throw Error(ErrorCode::driver_unavailable, "webdriver: " + httplib::to_string(res.error()));
    if (res->status == 404) throw Error(ErrorCode::session_unknown, "webdriver has no session " + session);
    if (res->status != 200) throw Error(ErrorCode::driver_unavailable, "webdriver status " + std::to_string(res->status));
    const auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("value") || !reply["value"].is_object())
        throw Error(ErrorCode::driver_unavailable, "webdriver reply has no value object");
    const auto& v = reply["value"];
    PageCapture cap;
    if (!v.contains("html") || !v["html"].is_string()) throw Error(ErrorCode::driver_unavailable, "webdriver reply has no html");
    cap.html = v["html"].get<std::string>();
    if (v.contains("url") && v["url"].is_string()) cap.url = v["url"].get<std::string>();
    if (v.contains("rects") && v["rects"].is_array()) {
        for (const auto& r : v["rects"]) {
            if (!r.is_array() || r.size() != 5 || !r[0].is_string()) continue;
            bool numeric = true;
            for (std::size_t i = 1; i < 5; ++i) numeric = numeric && r[i].is_number();
            if (!numeric) continue;
            cap.rects.emplace_back(r[0].get<std::string>(),
                                   Rect{r[1].get<double>(), r[2].get<double>(), r[3].get<double>(), r[4].get<double>()});
        }
    }
    return cap;
}

} // namespace pagegate
