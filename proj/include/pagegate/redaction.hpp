#pragma once

#include "pagegate/detection.hpp"
#include "pagegate/pii_schema.hpp"
#include "pagegate/snapshot.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagegate {

// automatic: delete_text everywhere except value/placeholder sources of form
// controls, where the whole control is removed.
enum class RedactionMode { automatic, delete_text, delete_element };

std::string_view to_string(RedactionMode mode);
std::optional<RedactionMode> parse_redaction_mode(std::string_view name);

struct Removal {
    std::string element_id;   // empty: not tied to an element, swept document-wide
    std::string matched_text;
    std::string label;   // category name, or "user_marked"
};

struct RedactionPlan {
    std::string session_id;
    std::uint64_t seq = 0;
    std::vector<Removal> removals;
    RedactionMode mode = RedactionMode::automatic;
};

std::string placeholder_for(std::string_view label);

// Removes every planned text from the snapshot. Besides the element named by a
// removal, any other place the same text survives in the document (attribute
// values, comments, non-extracted text) is swept too. A removal whose element
// is gone is accepted when its text no longer occurs, so redaction of an
// already redacted snapshot is a no-op.
// Throws Error{unknown_element}.
InterfaceSnapshot redact(const InterfaceSnapshot& snapshot, const RedactionPlan& plan);

struct HighlightInstruction {
    std::string finding_id;
    std::string element_id;
    PiiCategory category = PiiCategory::name;
    SensitivityTier tier = SensitivityTier::high;
    std::optional<Rect> bbox;
    std::string color;
    int duration_ms = 3000;
    bool marker = false;   // high tier only
};

inline constexpr int kDefaultHighlightMs = 3000;

std::vector<HighlightInstruction> build_highlights(const InterfaceSnapshot& snapshot,
                                                   const std::vector<PiiFinding>& findings,
                                                   int duration_ms = kDefaultHighlightMs);

} // namespace pagegate
