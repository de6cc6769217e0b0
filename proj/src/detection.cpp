#include "pagegate/detection.hpp"

#include "pagegate/hash.hpp"
#include "pagegate/text.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace pagegate {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view strip_wrapping(std::string_view s) {
    s = trim(s);
    while (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'') ||
                             (s.front() == '[' && s.back() == ']') || (s.front() == '`' && s.back() == '`') ||
                             (s.front() == '<' && s.back() == '>')))
        s = trim(s.substr(1, s.size() - 2));
    return s;
}

// Drops "- ", "* ", "1. ", "1) " list markers.
std::string_view strip_list_marker(std::string_view s) {
    if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && s[1] == ' ') return trim(s.substr(2));
    std::size_t i = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') return trim(s.substr(i + 2));
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    auto split_on = [&](std::string_view sep) {
        fields.clear();
        std::size_t start = 0;
        while (true) {
            const std::size_t at = line.find(sep, start);
            if (at == std::string_view::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, at - start));
            start = at + sep.size();
        }
    };
    split_on("\t");
    if (fields.size() < 3) split_on("|");
    return fields;
}

// Removes <think>...</think> reasoning blocks some local models emit.
std::string strip_reasoning(std::string_view raw) {
    std::string out;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const std::size_t open = raw.find("<think>", pos);
        if (open == std::string_view::npos) {
            out.append(raw.substr(pos));
            break;
        }
        out.append(raw.substr(pos, open - pos));
        const std::size_t close = raw.find("</think>", open);
        if (close == std::string_view::npos) break;
        pos = close + 8;
    }
    return out;
}

} // namespace

std::string_view to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::rules:  return "rules";
        case DetectorKind::llm:    return "llm";
        case DetectorKind::manual: return "manual";
    }
    return "rules";
}

std::optional<DetectorKind> parse_detector_kind(std::string_view name) {
    for (auto k : {DetectorKind::rules, DetectorKind::llm, DetectorKind::manual})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

std::string finding_id(std::string_view element_id, PiiCategory category, std::string_view matched_text) {
    return short_id({"finding", element_id, to_string(category), matched_text});
}

const DetectorCandidate* DetectorRequest::find(std::string_view element_id) const {
    for (const auto& c : candidates)
        if (c.element_id == element_id) return &c;
    return nullptr;
}

DetectorRequest make_request(const InterfaceSnapshot& snapshot) {
    DetectorRequest request;
    request.candidates.reserve(snapshot.elements().size());
    for (const auto& e : snapshot.elements()) request.candidates.push_back({e.id, e.text});
    return request;
}

DetectionResult resolve_spans(const InterfaceSnapshot& snapshot, const DetectorResponse& response,
                              DetectorKind kind) {
    DetectionResult result;
    result.malformed_count = response.malformed_count + response.unknown_ids;
    result.diagnostics = response.diagnostics;

    std::unordered_map<std::string_view, std::size_t> index_of;
    const auto& elements = snapshot.elements();
    for (std::size_t i = 0; i < elements.size(); ++i) index_of.emplace(elements[i].id, i);

    struct Candidate {
        std::size_t start;
        std::size_t length;
        PiiCategory category;
        std::string text;
    };
    std::map<std::size_t, std::vector<Candidate>> by_element;
    for (const auto& span : response.spans) {
        auto it = index_of.find(span.element_id);
        if (it == index_of.end()) {
            ++result.malformed_count;
            result.diagnostics.push_back("unknown element id " + span.element_id);
            continue;
        }
        const std::string& text = elements[it->second].text;
        const std::string matched = normalize_whitespace(span.matched_text);
        std::size_t start = std::string::npos;
        if (span.offset && text.compare(*span.offset, matched.size(), matched) == 0) start = *span.offset;
        if (start == std::string::npos && !matched.empty()) start = text.find(matched);
        if (matched.empty() || start == std::string::npos) {
            ++result.malformed_count;
            result.diagnostics.push_back("matched text not found in element " + span.element_id);
            continue;
        }
        by_element[it->second].push_back({start, matched.size(), span.category, matched});
    }

    std::set<std::tuple<std::size_t, PiiCategory, std::string>> seen;
    for (auto& [element, candidates] : by_element) {
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            if (a.length != b.length) return a.length > b.length;
            if (tier_of(a.category) != tier_of(b.category)) return tier_of(a.category) < tier_of(b.category);
            if (a.start != b.start) return a.start < b.start;
            return a.category < b.category;
        });
        std::vector<const Candidate*> kept;
        for (const auto& c : candidates) {
            const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const Candidate* k) {
                return c.start < k->start + k->length && k->start < c.start + c.length;
            });
            if (!overlaps) kept.push_back(&c);
        }
        for (const Candidate* c : kept) {
            if (!seen.emplace(element, c->category, c->text).second) continue;
            PiiFinding f;
            f.element_id = elements[element].id;
            f.category = c->category;
            f.tier = tier_of(c->category);
            f.matched_text = c->text;
            f.detector = kind;
            f.confidence = 1.0;
            f.element_index = element;
            f.offset = c->start;
            f.finding_id = finding_id(f.element_id, f.category, f.matched_text);
            result.findings.push_back(std::move(f));
        }
    }
    // Same (element, category, text) at a later offset keeps the earliest.
    for (auto& f : result.findings) f.offset = std::min(f.offset, elements[f.element_index].text.find(f.matched_text));

    std::sort(result.findings.begin(), result.findings.end(), [](const PiiFinding& a, const PiiFinding& b) {
        return std::tie(a.tier, a.element_index, a.offset, a.category) <
               std::tie(b.tier, b.element_index, b.offset, b.category);
    });
    result.partial = result.malformed_count > 0;
    return result;
}

DetectionResult detect(const InterfaceSnapshot& snapshot, Detector& detector) {
    if (snapshot.elements().empty()) return {};
    const DetectorRequest request = make_request(snapshot);
    return resolve_spans(snapshot, detector.run(request), detector.kind());
}

std::string build_detection_prompt(std::span<const DetectorCandidate> candidates) {
    std::ostringstream p;
    p << "## Task\n"
         "You are a privacy filter that sits between a user's browser and a web agent. Detect every piece of "
         "personally identifiable information (PII) in the interface elements listed below, and output the "
         "class of each PII together with the exact PII text.\n\n";
    p << "## Definition of PII\n"
         "PII is any information that identifies, describes or can be linked to a specific person, such as the "
         "user of the browser or the people and accounts shown on the page. Information is PII when, alone or "
         "combined with other page content, it reveals who someone is, how to reach them, or private facts "
         "about them.\n\n";
    p << "## PII categories\n";
    for (const auto& d : pii_schema()) p << "- " << to_string(d.category) << ": " << d.description << "\n";
    p << "\n";
    p << "## Rules\n"
         "1. Exclude generic interface text: navigation labels, headings, button captions, field labels such as "
         "\"Email\" or \"Phone\", and placeholder examples that do not describe a real person.\n"
         "2. Exclude product prices, product names, order or tracking numbers, and public facts about "
         "businesses that are not tied to the person.\n"
         "3. Exclude the current date or time shown by a site unless it is tied to the person, such as a "
         "booking, appointment or birth date.\n"
         "4. Copy matched_text exactly as it appears in the element text. Do not paraphrase, translate, "
         "complete or merge separate items.\n"
         "5. Use only the category names listed above, spelled exactly as shown.\n"
         "6. Use only element ids listed below.\n"
         "7. If no element contains PII, output exactly NONE.\n\n";
    p << "## Output format\n"
         "One line per detected item, fields separated by a single tab character:\n"
         "element_id<TAB>category<TAB>matched_text\n"
         "Output nothing else.\n\n";
    p << "## Elements\n";
    std::size_t n = 1;
    for (const auto& c : candidates) p << n++ << ". " << c.element_id << "\t" << c.text << "\n";
    return p.str();
}

DetectorResponse parse_llm_output(std::string_view raw, const DetectorRequest& request) {
    DetectorResponse response;
    const std::string cleaned = strip_reasoning(raw);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= cleaned.size()) {
        std::size_t end = cleaned.find('\n', pos);
        if (end == std::string::npos) end = cleaned.size();
        const std::string_view raw_line(cleaned.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;

        std::string_view line = strip_list_marker(trim(raw_line));
        if (line.empty() || line.starts_with("```")) continue;
        if (to_lower_ascii(line) == "none") continue;

        const auto fields = split_fields(line);
        if (fields.size() < 3) {
            ++response.malformed_count;
            response.diagnostics.push_back("line " + std::to_string(line_no) + ": not a finding");
            continue;
        }
        const std::string id(strip_wrapping(fields[0]));
        const auto category = parse_category(strip_wrapping(fields[1]));
        // Any further separators belong to the matched text.
        const std::size_t text_begin = static_cast<std::size_t>(fields[2].data() - line.data());
        const std::string text = normalize_whitespace(strip_wrapping(line.substr(text_begin)));

        if (!category) {
            ++response.malformed_count;
            response.diagnostics.push_back("line " + std::to_string(line_no) + ": unknown category");
            continue;
        }
        const DetectorCandidate* candidate = request.find(id);
        if (!candidate) {
            ++response.unknown_ids;
            response.diagnostics.push_back("line " + std::to_string(line_no) + ": unknown element id " + id);
            continue;
        }
        if (text.empty() || candidate->text.find(text) == std::string::npos) {
            ++response.malformed_count;
            response.diagnostics.push_back("line " + std::to_string(line_no) + ": text not in element " + id);
            continue;
        }
        response.spans.push_back({id, *category, text, std::nullopt});
    }
    return response;
}

} // namespace pagegate
