#pragma once

#include "pagegate/session.hpp"

#include <cstdio>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace pagegate {

// <dir>/audit.jsonl, one flushed line per event, and
// <dir>/decisions_<session>.json rewritten on every change.
class FileAuditSink final : public AuditSink {
public:
    explicit FileAuditSink(std::filesystem::path dir);
    ~FileAuditSink() override;
    FileAuditSink(const FileAuditSink&) = delete;
    FileAuditSink& operator=(const FileAuditSink&) = delete;

    void append(const nlohmann::ordered_json& line) override;
    void store_decisions(const std::string& session, const nlohmann::ordered_json& decisions) override;

private:
    std::filesystem::path dir_;
    std::FILE* audit_ = nullptr;
    std::mutex mu_;
};

// Keeps everything in memory; used by replay and tests.
class MemorySink final : public AuditSink, public EventSink {
public:
    void append(const nlohmann::ordered_json& line) override;
    void store_decisions(const std::string& session, const nlohmann::ordered_json& decisions) override;
    void publish(const nlohmann::ordered_json& message) override;

    std::vector<nlohmann::ordered_json> audit_lines() const;
    std::vector<nlohmann::ordered_json> events() const;
    nlohmann::ordered_json decisions(const std::string& session) const;

private:
    mutable std::mutex mu_;
    std::vector<nlohmann::ordered_json> audit_;
    std::vector<nlohmann::ordered_json> events_;
    std::map<std::string, nlohmann::ordered_json> decisions_;
};

// Session ids are used in file names; anything outside [A-Za-z0-9._-] becomes '_'.
std::string safe_file_component(std::string_view name);

} // namespace pagegate
