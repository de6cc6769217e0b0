#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace pagegate {

enum class PiiCategory : std::uint8_t {
    name,
    address,
    email,
    phone_number,
    id,
    online_identity,
    geo_location,
    affiliation,
    demographic_attribute,
    time,
    health_information,
    financial_information,
    educational_record,
};

inline constexpr std::size_t kCategoryCount = 13;

inline constexpr std::array<PiiCategory, kCategoryCount> kAllCategories = {
    PiiCategory::name,
    PiiCategory::address,
    PiiCategory::email,
    PiiCategory::phone_number,
    PiiCategory::id,
    PiiCategory::online_identity,
    PiiCategory::geo_location,
    PiiCategory::affiliation,
    PiiCategory::demographic_attribute,
    PiiCategory::time,
    PiiCategory::health_information,
    PiiCategory::financial_information,
    PiiCategory::educational_record,
};

// Ordered most to least sensitive; comparisons on the underlying value rank tiers.
enum class SensitivityTier : std::uint8_t { high, medium, low };

struct CategoryDescriptor {
    PiiCategory category;
    SensitivityTier tier;
    bool explicit_control;
    std::string_view human_label;
    std::string_view description;
};

const std::array<CategoryDescriptor, kCategoryCount>& pii_schema();
const CategoryDescriptor& descriptor(PiiCategory category);

SensitivityTier tier_of(PiiCategory category);
bool requires_explicit_control(PiiCategory category);
std::string_view color_of(SensitivityTier tier);

std::string_view to_string(PiiCategory category);
std::string_view to_string(SensitivityTier tier);

// Accepts the canonical snake_case name; also tolerates case, spaces and
// hyphens ("Phone Number", "geo-location").
std::optional<PiiCategory> parse_category(std::string_view name);
std::optional<SensitivityTier> parse_tier(std::string_view name);

// [{"category","tier","color","explicit_control","label","description"}, ...]
nlohmann::ordered_json schema_json();

} // namespace pagegate
