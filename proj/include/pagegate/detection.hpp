#pragma once

#include "pagegate/pii_schema.hpp"
#include "pagegate/snapshot.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pagegate {

enum class DetectorKind { rules, llm, manual };

std::string_view to_string(DetectorKind kind);
std::optional<DetectorKind> parse_detector_kind(std::string_view name);

struct PiiFinding {
    std::string finding_id;
    std::string element_id;
    PiiCategory category = PiiCategory::name;
    std::string matched_text;
    SensitivityTier tier = SensitivityTier::high;
    DetectorKind detector = DetectorKind::rules;
    double confidence = 1.0;
    std::size_t element_index = 0;   // position in snapshot.elements()
    std::size_t offset = 0;          // byte offset of the first match in the element text
};

// Deterministic: same element, category and text always give the same id.
std::string finding_id(std::string_view element_id, PiiCategory category, std::string_view matched_text);

struct DetectorCandidate {
    std::string element_id;
    std::string text;
};

struct DetectorRequest {
    std::vector<DetectorCandidate> candidates;

    const DetectorCandidate* find(std::string_view element_id) const;
};

struct DetectedSpan {
    std::string element_id;
    PiiCategory category = PiiCategory::name;
    std::string matched_text;
    std::optional<std::size_t> offset;   // known for rule matches
};

struct DetectorResponse {
    std::vector<DetectedSpan> spans;
    std::size_t malformed_count = 0;   // lines or entries that could not be used
    std::size_t unknown_ids = 0;       // entries citing an element not in the request
    std::vector<std::string> diagnostics;
};

class Detector {
public:
    virtual ~Detector() = default;
    virtual DetectorKind kind() const = 0;
    // Throws Error{detector_unavailable} when the backend cannot answer.
    virtual DetectorResponse run(const DetectorRequest& request) = 0;
};

struct DetectionResult {
    std::vector<PiiFinding> findings;
    // Some detector output was unusable; serving must fail closed.
    bool partial = false;
    std::size_t malformed_count = 0;
    std::vector<std::string> diagnostics;
};

DetectorRequest make_request(const InterfaceSnapshot& snapshot);

// Runs the detector over every element of the snapshot. Overlapping matches in
// one element keep the longest (then higher tier, then earlier start); results
// are deduplicated on (element, category, text) and ordered by tier, then
// document order.
DetectionResult detect(const InterfaceSnapshot& snapshot, Detector& detector);

// Resolves spans into findings against the snapshot; shared by detect() and
// tests that feed synthetic detector output.
DetectionResult resolve_spans(const InterfaceSnapshot& snapshot, const DetectorResponse& response,
                              DetectorKind kind);

// Requires a non-empty candidate list.
std::string build_detection_prompt(std::span<const DetectorCandidate> candidates);

// Tolerant parser for model output. One finding per line:
// element_id <TAB> category <TAB> matched_text (pipes are also accepted).
// Never throws.
DetectorResponse parse_llm_output(std::string_view raw, const DetectorRequest& request);

} // namespace pagegate
