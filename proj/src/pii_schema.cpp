#include "pagegate/pii_schema.hpp"

#include "pagegate/text.hpp"

namespace pagegate {

namespace {

using C = PiiCategory;
using T = SensitivityTier;

// Descriptions feed the detection prompt.
constexpr std::array<CategoryDescriptor, kCategoryCount> kSchema = {{
    {C::name, T::medium, false, "Name",
     "A person's given name, family name or full name, including names with titles such as Dr. or Ms."},
    {C::address, T::medium, false, "Address",
     "A postal or street address of a home, workplace or delivery location."},
    {C::email, T::high, true, "Email", "An email address belonging to a person or account."},
    {C::phone_number, T::medium, false, "Phone number",
     "A telephone or mobile number in any national or international format."},
    {C::id, T::high, true, "ID",
     "A government or institutional identifier such as a passport, national ID, social security, driver's "
     "license, student or employee number."},
    {C::online_identity, T::high, true, "Online identity",
     "An account username, handle, screen name, profile link or IP address that identifies a person online."},
    {C::geo_location, T::low, false, "Geo-location",
     "A city, region, country or coordinates describing where a person is, lives or travels."},
    {C::affiliation, T::low, false, "Affiliation",
     "An organization a person belongs to, such as an employer, school, club, religious or political group."},
    {C::demographic_attribute, T::medium, false, "Demographic attribute",
     "A personal attribute such as age, gender, ethnicity, nationality, religion or marital status."},
    {C::time, T::low, false, "Time",
     "A date or time tied to the person, such as a birth date, appointment, booking or travel time."},
    {C::health_information, T::medium, false, "Health information",
     "A medical condition, diagnosis, medication, allergy, blood type or other health detail."},
    {C::financial_information, T::high, true, "Financial information",
     "A payment card, bank account, IBAN, balance, salary or other financial detail of a person."},
    {C::educational_record, T::low, false, "Educational record",
     "A degree, grade, GPA, transcript, graduation year or other record of a person's education."},
}};

constexpr std::string_view kNames[kCategoryCount] = {
    "name", "address", "email", "phone_number", "id", "online_identity", "geo_location", "affiliation",
    "demographic_attribute", "time", "health_information", "financial_information", "educational_record",
};

// Every table row sits at the index of its own enumerator.
constexpr bool schema_is_indexed() {
    for (std::size_t i = 0; i < kCategoryCount; ++i)
        if (static_cast<std::size_t>(kSchema[i].category) != i) return false;
    return true;
}
static_assert(schema_is_indexed());

} // namespace

const std::array<CategoryDescriptor, kCategoryCount>& pii_schema() { return kSchema; }

const CategoryDescriptor& descriptor(PiiCategory category) {
    return kSchema[static_cast<std::size_t>(category)];
}

SensitivityTier tier_of(PiiCategory category) { return descriptor(category).tier; }

bool requires_explicit_control(PiiCategory category) { return descriptor(category).explicit_control; }

std::string_view color_of(SensitivityTier tier) {
    switch (tier) {
        case T::high:   return "red";
        case T::medium: return "orange";
        case T::low:    return "yellow";
    }
    return "red";
}

std::string_view to_string(PiiCategory category) { return kNames[static_cast<std::size_t>(category)]; }

std::string_view to_string(SensitivityTier tier) {
    switch (tier) {
        case T::high:   return "high";
        case T::medium: return "medium";
        case T::low:    return "low";
    }
    return "high";
}

std::optional<PiiCategory> parse_category(std::string_view name) {
    std::string folded;
    for (char c : name) {
        if (c == ' ' || c == '-') c = '_';
        folded.push_back(c);
    }
    folded = to_lower_ascii(folded);
    while (!folded.empty() && folded.back() == '_') folded.pop_back();
    while (!folded.empty() && folded.front() == '_') folded.erase(folded.begin());
    if (folded == "geolocation") folded = "geo_location";
    for (std::size_t i = 0; i < kCategoryCount; ++i)
        if (kNames[i] == folded) return static_cast<PiiCategory>(i);
    return std::nullopt;
}

std::optional<SensitivityTier> parse_tier(std::string_view name) {
    for (auto t : {T::high, T::medium, T::low})
        if (to_string(t) == name) return t;
    return std::nullopt;
}

nlohmann::ordered_json schema_json() {
    auto out = nlohmann::ordered_json::array();
    for (const auto& d : kSchema) {
        nlohmann::ordered_json row;
        row["category"] = to_string(d.category);
        row["tier"] = to_string(d.tier);
        row["color"] = color_of(d.tier);
        row["explicit_control"] = d.explicit_control;
        row["label"] = d.human_label;
        row["description"] = d.description;
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace pagegate
