#pragma once

#include "pagegate/detection.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace pagegate {

// One row of the shipped rule table: a Perl-syntax pattern whose match (or
// capture group `group`) is reported as `category`.
struct RuleInfo {
    std::string_view name;
    PiiCategory category;
    std::string_view pattern;
    int group;
};

// The compiled rule table, gazetteer alternations expanded. Stable order.
std::span<const RuleInfo> rule_table();

// Applies every rule to every candidate. Deterministic; offsets are set.
std::vector<DetectedSpan> detect_rules(std::span<const DetectorCandidate> candidates);

class RulesDetector final : public Detector {
public:
    DetectorKind kind() const override { return DetectorKind::rules; }
    DetectorResponse run(const DetectorRequest& request) override;
};

} // namespace pagegate
