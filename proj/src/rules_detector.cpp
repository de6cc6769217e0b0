#include "pagegate/rules_detector.hpp"

#include <boost/regex.hpp>

#include <algorithm>
#include <functional>
#include <string>

namespace pagegate {

namespace {

// ── Gazetteers ───────────────────────────────────────────────────────────────

constexpr std::string_view kFirstNames[] = {
    "Aaron", "Ahmed", "Aisha", "Alejandro", "Alex", "Alexander", "Alice", "Amanda", "Amy", "Ana", "Andrew",
    "Angela", "Anna", "Anthony", "Arjun", "Ashley", "Barbara", "Benjamin", "Bob", "Brandon", "Brian",
    "Carlos", "Carol", "Charles", "Charlotte", "Chloe", "Chris", "Cynthia", "Daniel", "David", "Deborah",
    "Diego", "Donna", "Edward", "Elena", "Elizabeth", "Ella", "Emily", "Emma", "Eric", "Ethan", "Fatima",
    "George", "Hannah", "Henry", "Hiroshi", "Ingrid", "Isabella", "Ivan", "Jack", "Jacob", "James", "Jane",
    "Jason", "Jennifer", "Jessica", "John", "Jonathan", "Joseph", "Joshua", "Juan", "Karen", "Kate",
    "Kathleen", "Kevin", "Kimberly", "Kyle", "Lars", "Laura", "Lena", "Liam", "Linda", "Lisa", "Lucas",
    "Lucy", "Luis", "Margaret", "Maria", "Mary", "Mateo", "Matthew", "Melissa", "Mia", "Michael", "Michelle",
    "Mohammed", "Nancy", "Nathan", "Nina", "Noah", "Olga", "Oliver", "Olivia", "Omar", "Patricia", "Patrick",
    "Paul", "Peter", "Priya", "Rachel", "Raj", "Rebecca", "Richard", "Robert", "Ryan", "Samuel", "Sandra",
    "Sarah", "Scott", "Sharon", "Sofia", "Sophia", "Stephanie", "Stephen", "Steven", "Susan", "Sven",
    "Thomas", "Timothy", "Tom", "Tyler", "Wei", "William", "Yuki", "Zoe",
};

constexpr std::string_view kPlaces[] = {
    // Cities
    "Amsterdam", "Athens", "Atlanta", "Auckland", "Austin", "Bangalore", "Bangkok", "Barcelona", "Beijing",
    "Berlin", "Boston", "Buenos Aires", "Cairo", "Cape Town", "Chicago", "Copenhagen", "Dallas", "Delhi",
    "Denver", "Dubai", "Dublin", "Geneva", "Helsinki", "Hong Kong", "Houston", "Istanbul", "Kyoto", "Lagos",
    "Las Vegas", "Lisbon", "London", "Los Angeles", "Madrid", "Melbourne", "Mexico City", "Miami",
    "Montreal", "Moscow", "Mumbai", "Munich", "Nairobi", "New York", "New York City", "Osaka", "Oslo",
    "Paris", "Philadelphia", "Phoenix", "Portland", "Prague", "Rio de Janeiro", "Rome", "San Diego",
    "San Francisco", "San Jose", "Sao Paulo", "Seattle", "Seoul", "Shanghai", "Shenzhen", "Singapore",
    "Stockholm", "Sydney", "Tokyo", "Toronto", "Vancouver", "Vienna", "Warsaw", "Zurich",
    // Regions and countries
    "Argentina", "Australia", "Austria", "Belgium", "Brazil", "California", "Canada", "China", "Denmark",
    "Egypt", "Finland", "Florida", "France", "Germany", "Greece", "India", "Indonesia", "Ireland", "Italy",
    "Japan", "Kenya", "Mexico", "Netherlands", "New Zealand", "Nigeria", "Norway", "Ohio", "Oregon", "Poland",
    "Portugal", "Russia", "South Africa", "South Korea", "Spain", "Sweden", "Switzerland", "Texas",
    "Thailand", "Turkey", "United Kingdom", "United States", "Vietnam",
};

constexpr std::string_view kHealthTerms[] = {
    "ADHD", "anxiety disorder", "arthritis", "asthma", "autism", "bipolar disorder", "breast cancer",
    "cancer", "celiac disease", "chemotherapy", "COPD", "depression", "diabetes", "epilepsy", "hepatitis B",
    "hepatitis C", "high blood pressure", "HIV", "hypertension", "insulin", "leukemia", "lisinopril",
    "metformin", "migraine", "migraines", "pregnant", "pregnancy", "sertraline", "type 1 diabetes",
    "type 2 diabetes", "albuterol", "physical therapy", "eczema", "celiac",
};

constexpr std::string_view kDemographicTerms[] = {
    "non-binary", "nonbinary", "transgender", "Hispanic", "Latino", "Latina", "Caucasian",
    "African American", "Asian American", "Catholic", "Muslim", "Jewish", "Buddhist", "Hindu", "Sikh",
    "divorced", "widowed", "widower",
};

std::string escape_regex(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::string_view(".^$|()[]{}*+?\\").find(c) != std::string_view::npos) out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

template <std::size_t N>
std::string alternation(const std::string_view (&terms)[N]) {
    std::vector<std::string_view> sorted(std::begin(terms), std::end(terms));
    // Longest first so "New York City" beats "New York".
    std::sort(sorted.begin(), sorted.end(), [](std::string_view a, std::string_view b) {
        return a.size() != b.size() ? a.size() > b.size() : a < b;
    });
    std::string out = "(?:";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i) out.push_back('|');
        out += escape_regex(sorted[i]);
    }
    out += ")";
    return out;
}

// ── Post filters ─────────────────────────────────────────────────────────────

std::size_t digit_count(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }));
}

bool luhn_valid(std::string_view s) {
    int sum = 0;
    bool doubled = false;
    std::size_t digits = 0;
    for (auto it = s.rbegin(); it != s.rend(); ++it) {
        if (*it < '0' || *it > '9') continue;
        int d = *it - '0';
        if (doubled) {
            d *= 2;
            if (d > 9) d -= 9;
        }
        sum += d;
        doubled = !doubled;
        ++digits;
    }
    return digits >= 13 && digits <= 19 && sum % 10 == 0;
}

bool valid_ipv4(std::string_view s) {
    std::size_t start = 0;
    for (int part = 0; part < 4; ++part) {
        const std::size_t dot = s.find('.', start);
        const std::string_view octet = s.substr(start, dot == std::string_view::npos ? s.size() - start : dot - start);
        if (octet.empty() || octet.size() > 3 || std::stoi(std::string(octet)) > 255) return false;
        start = dot + 1;
    }
    return true;
}

bool phone_digits(std::string_view s) {
    const std::size_t d = digit_count(s);
    return d >= 7 && d <= 15;
}

// ── The table ────────────────────────────────────────────────────────────────

struct Rule {
    RuleInfo info;
    std::string expanded;
    boost::regex regex;
    std::function<bool(std::string_view)> accept;
};

const std::string kMonth =
    "(?:Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|June?|July?|Aug(?:ust)?|Sep(?:t(?:ember)?)?|"
    "Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?)";
const std::string kWeekday = "(?:Monday|Tuesday|Wednesday|Thursday|Friday|Saturday|Sunday)";
const std::string kCap = "[A-Z][a-z]+";
const std::string kSurname = "(?:(?:Mc|Mac|O')?[A-Z][a-z]+(?:-[A-Z][a-z]+)?)";
const std::string kStreetType =
    "(?:Street|St|Avenue|Ave|Road|Rd|Boulevard|Blvd|Lane|Ln|Drive|Dr|Court|Ct|Way|Place|Pl|Terrace|"
    "Parkway|Pkwy|Highway|Hwy|Circle|Square)";
const std::string kOrgSuffix =
    "(?:University|College|Institute|Hospital|Clinic|Bank|Inc\\.?|Corp\\.?|Corporation|LLC|Ltd\\.?|Group|"
    "Labs|Foundation|Association|Society|Church|Party|Union|Club|Academy|School)";

struct RuleSpec {
    std::string_view name;
    PiiCategory category;
    std::string pattern;
    int group;
    std::function<bool(std::string_view)> accept;
};

std::vector<RuleSpec> rule_specs() {
    using C = PiiCategory;
    std::vector<RuleSpec> specs = {
        {"email.address", C::email,
         R"((?<![\w.%+-])[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}(?![\w-]))", 0, {}},

        {"phone.nanp", C::phone_number,
         R"((?<![\w+])(?:\+?1[-. ]?)?(?:\(\d{3}\)\s?|\d{3}[-. ])\d{3}[-. ]\d{4}(?![\d-]))", 0, {}},
        {"phone.international", C::phone_number,
         R"((?<![\w+])\+[2-9]\d{0,2}(?:[ -]\(?\d{1,4}\)?){2,5}(?![\d-]))", 0, phone_digits},
        {"phone.labelled", C::phone_number,
         R"((?i:\b(?:phone|tel|telephone|mobile|cell)\b\.?(?: number)?\s*[:#]?\s*)(\+?\d[\d ().-]{5,}\d))", 1,
         phone_digits},

        {"id.ssn", C::id, R"((?<![\d-])\d{3}-\d{2}-\d{4}(?![\d-]))", 0, {}},
        {"id.labelled", C::id,
         R"((?i:\b(?:passport|driver'?s licen[cs]e|licen[cs]e|national id|id card|identity card|ssn|social security|student id|employee id|staff id|member id|membership|patient id|badge|tax id)\b\.?\s*(?:no\.?|number|#)?\s*[:#]?\s*)((?=[A-Z0-9-]*\d)[A-Z0-9][A-Z0-9-]{4,}[A-Z0-9]))",
         1, {}},
        // A bare "ID:" label, unless it names an order, transaction or account record.
        {"id.bare", C::id,
         R"((?<![Oo]rder )(?<![Tt]racking )(?<![Tt]ransaction )(?<![Pp]roduct )(?<![Ss]ession )(?<![Uu]ser )(?<![Rr]equest )(?i:\bid\b\.?\s*(?:no\.?|number|#)?\s*[:#]\s*)((?=[A-Z0-9-]*\d)[A-Z0-9][A-Z0-9-]{4,}[A-Z0-9]))",
         1, {}},
        {"id.document_number", C::id, R"(\b[A-Z]{1,2}\d{7,8}\b)", 0, {}},

        {"financial.card", C::financial_information, R"((?<![\d-])(?:\d{4}[ -]?){3}\d{1,4}(?![\d-]))", 0,
         luhn_valid},
        {"financial.masked_card", C::financial_information,
         R"((?:[*xX•]{4}[ -]?){3}\d{4}\b|(?i:\bending in\s+)\d{4}\b)", 0, {}},
        {"financial.iban", C::financial_information, R"(\b[A-Z]{2}\d{2}(?: ?[A-Z0-9]{4}){3,7}(?: ?[A-Z0-9]{1,3})?\b)",
         0, {}},
        {"financial.account", C::financial_information,
         R"((?i:\b(?:account|acct|routing|sort code|swift|bic)\b\.?\s*(?:no\.?|number|#|code)?\s*[:#]?\s*)([A-Z0-9][A-Z0-9-]{5,20}[0-9]))",
         1, {}},
        {"financial.amount", C::financial_information,
         R"((?i:\b(?:balance|salary|income|credit limit|net worth|debt|loan|mortgage|payout|earnings)\b[^$€£\d]{0,20})([$€£] ?\d[\d,]*(?:\.\d{2})?))",
         1, {}},

        {"online.handle", C::online_identity, R"((?<![\w@.])@[A-Za-z0-9_]{3,30}(?![\w@.]))", 0, {}},
        {"online.username", C::online_identity,
         R"((?i:\b(?:(?:username|user name|user id|userid|login|handle|screen name|gamertag|nickname)\s*[:=]|(?:signed|logged) in as)\s*)([A-Za-z0-9][A-Za-z0-9._-]{2,39}))",
         1, {}},
        {"online.ipv4", C::online_identity, R"((?<![\d.])(?:\d{1,3}\.){3}\d{1,3}(?![\d.]))", 0, valid_ipv4},
        {"online.profile_url", C::online_identity,
         R"(\b(?:https?://)?(?:www\.)?(?:github|twitter|x|linkedin|facebook|instagram|tiktok|reddit)\.com/(?:in/|u/|user/)?[A-Za-z0-9_.-]{2,})",
         0, {}},

        {"name.honorific", C::name, "\\b(?:Mr|Mrs|Ms|Miss|Dr|Prof)\\.? " + kCap + "(?: " + kSurname + ")?\\b", 0, {}},
        {"name.gazetteer", C::name,
         "\\b" + alternation(kFirstNames) + "(?: [A-Z]\\.)? " + kSurname + "\\b", 0, {}},
        {"name.labelled", C::name,
         "(?i:\\b(?:full name|name|cardholder|card holder|recipient|patient|contact|dear|welcome back|"
         "hello|hi)\\b\\s*[:,]?\\s*)(" + kCap + "(?: " + kSurname + "){0,2})",
         1, {}},

        {"address.street", C::address,
         "\\b\\d{1,5} (?:" + kCap + " ){1,3}" + kStreetType +
             "\\.?(?:,? (?:Apt|Suite|Unit|#) ?[A-Za-z0-9]+)?(?:, (?:" + kCap + " ?){1,3}(?:, [A-Z]{2})?(?: \\d{5}(?:-\\d{4})?)?)?",
         0, {}},
        {"address.po_box", C::address, R"((?i:\bP\.?\s?O\.?\s?Box\s+\d{1,6}\b))", 0, {}},

        {"geo.gazetteer", C::geo_location, "\\b" + alternation(kPlaces) + "\\b", 0, {}},
        {"geo.coordinates", C::geo_location, R"((?<![\d.])-?\d{1,2}\.\d{3,},\s?-?\d{1,3}\.\d{3,}(?![\d.]))", 0, {}},

        {"affiliation.suffix", C::affiliation,
         "\\b(?:[A-Z][A-Za-z&'-]+ ){1,4}" + kOrgSuffix + "(?![A-Za-z])", 0, {}},
        {"affiliation.of", C::affiliation,
         "\\b(?:University|College|Institute|Bank|Church) of (?:the )?" + kCap + "(?: " + kCap + "){0,2}\\b", 0, {}},
        {"affiliation.labelled", C::affiliation,
         "(?i:\\b(?:works at|working at|employed by|employed at|employer|company|organization|organisation|"
         "member of|intern at|studies at|student at|alumni of|affiliation)\\b\\s*[:,]?\\s*)(" + kCap +
             "(?: " + kCap + "){0,3})",
         1, {}},

        {"demographic.terms", C::demographic_attribute, "(?i:\\b" + alternation(kDemographicTerms) + "\\b)", 0, {}},
        {"demographic.gender", C::demographic_attribute,
         R"((?i:\b(?:gender|sex)\s*:\s*)((?i:male|female|non-binary|nonbinary|other|man|woman)))", 1, {}},
        {"demographic.age", C::demographic_attribute,
         R"((?i:\b\d{1,3}[- ]years?[- ]old\b|\bage[d:]?\s+\d{1,3}\b))", 0, {}},
        {"demographic.labelled", C::demographic_attribute,
         "(?i:\\b(?:nationality|ethnicity|religion|marital status|race|citizenship)\\s*:\\s*)([A-Z][a-z]+(?: [A-Z][a-z]+)?)",
         1, {}},

        {"time.iso", C::time, R"(\b\d{4}-\d{2}-\d{2}(?:[T ]\d{2}:\d{2}(?::\d{2})?)?\b)", 0, {}},
        {"time.slash", C::time, R"((?<![\d/])\d{1,2}/\d{1,2}/(?:\d{4}|\d{2})(?![\d/]))", 0, {}},
        {"time.month_day", C::time,
         "\\b" + kMonth + "\\.? \\d{1,2}(?:st|nd|rd|th)?(?:, \\d{4})?(?:,? (?:at )?\\d{1,2}(?::\\d{2})? ?(?:[AaPp]\\.?[Mm]\\.?))?\\b",
         0, {}},
        {"time.day_month", C::time, "\\b\\d{1,2} " + kMonth + "\\.? \\d{4}\\b", 0, {}},
        {"time.clock", C::time, R"(\b\d{1,2}:\d{2} ?(?:[AaPp]\.?[Mm]\.?)(?![A-Za-z]))", 0, {}},
        {"time.relative", C::time,
         "(?i:\\b(?:next|last|this) (?:" + kWeekday + "|week|weekend|month|year)\\b|\\b(?:tomorrow|yesterday|tonight)\\b)",
         0, {}},

        {"health.terms", C::health_information, "(?i:\\b" + alternation(kHealthTerms) + "\\b)", 0, {}},
        {"health.allergy", C::health_information,
         R"((?i:\b(?:allergic to|allergy to|allergies:|diagnosed with)\s+[a-z]+(?: [a-z]+)?))", 0, {}},
        {"health.blood_type", C::health_information, R"((?i:\bblood type:?\s*)(?:AB|A|B|O)[+-])", 0, {}},

        {"education.gpa", C::educational_record, R"((?i:\bGPA\b:?\s*)\d\.\d{1,2}(?:\s*/\s*\d\.\d{1,2})?)", 0, {}},
        {"education.degree", C::educational_record,
         "\\b(?:Bachelor|Master|Doctor)(?:'s)?(?: of (?:Science|Arts|Engineering|Business Administration|Fine Arts|"
         "Laws|Philosophy|Education))?(?: (?:degree )?in " + kCap + "(?: " + kCap + ")?)?\\b(?!')",
         0, {}},
        {"education.degree_abbrev", C::educational_record,
         "\\b(?:B\\.S\\.|B\\.Sc\\.|B\\.A\\.|M\\.S\\.|M\\.Sc\\.|M\\.A\\.|MBA|Ph\\.D\\.|PhD) in " + kCap + "(?: " + kCap + ")?\\b",
         0, {}},
        {"education.class_of", C::educational_record, R"((?i:\bclass of \d{4}\b))", 0, {}},
        {"education.record", C::educational_record,
         R"((?i:\b(?:official transcript|transcript|dean's list|honor roll|graduated (?:summa |magna )?cum laude)\b))", 0,
         {}},
        {"education.grade", C::educational_record, R"((?i:\b(?:final grade|course grade|grade)\s*:\s*)[A-F][+-]?(?![A-Za-z]))",
         0, {}},
    };
    return specs;
}

struct CompiledTable {
    std::vector<Rule> rules;
    std::vector<RuleInfo> infos;
};

const CompiledTable& table() {
    static const CompiledTable compiled = [] {
        CompiledTable t;
        auto specs = rule_specs();
        t.rules.reserve(specs.size());
        for (auto& s : specs) {
            Rule r;
            r.expanded = std::move(s.pattern);
            r.regex = boost::regex(r.expanded, boost::regex::perl);
            r.accept = std::move(s.accept);
            r.info = {s.name, s.category, {}, s.group};
            t.rules.push_back(std::move(r));
        }
        // Patterns point into the rule storage, which no longer moves.
        for (auto& r : t.rules) {
            r.info.pattern = r.expanded;
            t.infos.push_back(r.info);
        }
        return t;
    }();
    return compiled;
}

} // namespace

std::span<const RuleInfo> rule_table() { return table().infos; }

std::vector<DetectedSpan> detect_rules(std::span<const DetectorCandidate> candidates) {
    std::vector<DetectedSpan> spans;
    const auto& rules = table().rules;
    for (const auto& candidate : candidates) {
        const std::string& text = candidate.text;
        for (const auto& rule : rules) {
            boost::sregex_iterator it(text.begin(), text.end(), rule.regex);
            for (; it != boost::sregex_iterator(); ++it) {
                const auto& m = (*it)[rule.info.group];
                if (!m.matched || m.length() == 0) continue;
                const std::string matched = m.str();
                if (rule.accept && !rule.accept(matched)) continue;
                spans.push_back({candidate.element_id, rule.info.category, matched,
                                 static_cast<std::size_t>(m.first - text.begin())});
            }
        }
    }
    return spans;
}

DetectorResponse RulesDetector::run(const DetectorRequest& request) {
    DetectorResponse response;
    response.spans = detect_rules(request.candidates);
    return response;
}

} // namespace pagegate
