#include "pagegate/sinks.hpp"

#include "pagegate/error.hpp"
#include "pagegate/wire.hpp"

#include <fstream>

namespace pagegate {

namespace fs = std::filesystem;

std::string safe_file_component(std::string_view name) {
    std::string out;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    if (out.empty() || out == "." || out == "..") out = "_" + out;
    return out;
}

FileAuditSink::FileAuditSink(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    audit_ = std::fopen((dir_ / "audit.jsonl").string().c_str(), "ab");
    if (!audit_) throw Error(ErrorCode::config_invalid, "cannot open audit log in " + dir_.string());
}

FileAuditSink::~FileAuditSink() {
    if (audit_) std::fclose(audit_);
}

void FileAuditSink::append(const nlohmann::ordered_json& line) {
    const std::string text = wire::encode(line) + "\n";
    std::lock_guard lock(mu_);
    std::fwrite(text.data(), 1, text.size(), audit_);
    std::fflush(audit_);
}

void FileAuditSink::store_decisions(const std::string& session, const nlohmann::ordered_json& decisions) {
    std::lock_guard lock(mu_);
    const auto target = dir_ / ("decisions_" + safe_file_component(session) + ".json");
    const auto tmp = fs::path(target.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << decisions.dump(2) << "\n";
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
}

void MemorySink::append(const nlohmann::ordered_json& line) {
    std::lock_guard lock(mu_);
    audit_.push_back(line);
}

void MemorySink::store_decisions(const std::string& session, const nlohmann::ordered_json& decisions) {
    std::lock_guard lock(mu_);
    decisions_[session] = decisions;
}

void MemorySink::publish(const nlohmann::ordered_json& message) {
    std::lock_guard lock(mu_);
    events_.push_back(message);
}

std::vector<nlohmann::ordered_json> MemorySink::audit_lines() const {
    std::lock_guard lock(mu_);
    return audit_;
}

std::vector<nlohmann::ordered_json> MemorySink::events() const {
    std::lock_guard lock(mu_);
    return events_;
}

nlohmann::ordered_json MemorySink::decisions(const std::string& session) const {
    std::lock_guard lock(mu_);
    const auto it = decisions_.find(session);
    return it == decisions_.end() ? nlohmann::ordered_json() : it->second;
}

} // namespace pagegate
