#pragma once

// Test-only helpers shared by the gateway tests and the acceptance suite.

#include "pagegate/detection.hpp"
#include "pagegate/driver.hpp"
#include "pagegate/error.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace pagegate::testing {

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
}

inline std::vector<std::string> lines_of(const std::filesystem::path& p) {
    std::vector<std::string> out;
    std::istringstream in(slurp(p));
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) out.push_back(l);
    return out;
}

// Driver whose pages are set by the test.
class MapDriver final : public DriverAdapter {
public:
    void set(const std::string& session, std::string html) {
        std::lock_guard lock(mu_);
        pages_[session] = std::move(html);
    }
    PageCapture capture(const std::string& session) override {
        std::lock_guard lock(mu_);
        const auto it = pages_.find(session);
        if (it == pages_.end()) throw Error(ErrorCode::session_unknown, "unknown session " + session);
        return {it->second, "https://example.test/" + session, {}};
    }
    std::vector<std::string> sessions() const override {
        std::lock_guard lock(mu_);
        std::vector<std::string> out;
        for (const auto& [k, v] : pages_) out.push_back(k);
        return out;
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::string> pages_;
};

// Reports every configured text wherever it occurs; can be told to fail.
class ScriptedDetector final : public Detector {
public:
    std::vector<std::pair<PiiCategory, std::string>> items;
    bool fail = false;
    bool garble = false;

    DetectorKind kind() const override { return DetectorKind::llm; }
    DetectorResponse run(const DetectorRequest& request) override {
        if (fail) throw Error(ErrorCode::detector_unavailable, "scripted outage");
        DetectorResponse r;
        for (const auto& c : request.candidates)
            for (const auto& [cat, text] : items)
                if (c.text.find(text) != std::string::npos) r.spans.push_back({c.element_id, cat, text, std::nullopt});
        if (garble) r.malformed_count = 1;
        return r;
    }
};

} // namespace pagegate::testing
