#include "doctest.h"

#include "pagegate/pii_schema.hpp"

#include <map>

using namespace pagegate;

TEST_CASE("thirteen categories with the published tiers") {
    CHECK(pii_schema().size() == 13);
    std::map<SensitivityTier, int> per_tier;
    for (const auto& d : pii_schema()) ++per_tier[d.tier];
    CHECK(per_tier[SensitivityTier::high] == 4);
    CHECK(per_tier[SensitivityTier::medium] == 5);
    CHECK(per_tier[SensitivityTier::low] == 4);

    CHECK(tier_of(PiiCategory::financial_information) == SensitivityTier::high);
    CHECK(tier_of(PiiCategory::id) == SensitivityTier::high);
    CHECK(tier_of(PiiCategory::online_identity) == SensitivityTier::high);
    CHECK(tier_of(PiiCategory::email) == SensitivityTier::high);
    CHECK(tier_of(PiiCategory::name) == SensitivityTier::medium);
    CHECK(tier_of(PiiCategory::address) == SensitivityTier::medium);
    CHECK(tier_of(PiiCategory::phone_number) == SensitivityTier::medium);
    CHECK(tier_of(PiiCategory::demographic_attribute) == SensitivityTier::medium);
    CHECK(tier_of(PiiCategory::health_information) == SensitivityTier::medium);
    CHECK(tier_of(PiiCategory::geo_location) == SensitivityTier::low);
    CHECK(tier_of(PiiCategory::affiliation) == SensitivityTier::low);
    CHECK(tier_of(PiiCategory::time) == SensitivityTier::low);
    CHECK(tier_of(PiiCategory::educational_record) == SensitivityTier::low);
}

TEST_CASE("explicit control follows tier") {
    for (const auto c : kAllCategories) {
        CHECK(requires_explicit_control(c) == (tier_of(c) == SensitivityTier::high));
    }
    CHECK(color_of(SensitivityTier::high) == "red");
    CHECK(color_of(SensitivityTier::medium) == "orange");
    CHECK(color_of(SensitivityTier::low) == "yellow");
}

TEST_CASE("names round trip") {
    for (const auto c : kAllCategories) {
        const auto parsed = parse_category(to_string(c));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == c);
        CHECK_FALSE(descriptor(c).description.empty());
    }
    CHECK(parse_category("Phone Number") == PiiCategory::phone_number);
    CHECK(parse_category("online-identity") == PiiCategory::online_identity);
    CHECK_FALSE(parse_category("favourite colour").has_value());
    CHECK(parse_tier("medium") == SensitivityTier::medium);
}

TEST_CASE("schema export") {
    const auto j = schema_json();
    REQUIRE(j.is_array());
    CHECK(j.size() == 13);
    CHECK(j[0].contains("category"));
    CHECK(j[0].contains("tier"));
    CHECK(j[0].contains("color"));
    CHECK(j.dump() == schema_json().dump());
}
