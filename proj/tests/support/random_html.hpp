#pragma once

// Test-only generator of tag-soup documents with planted personal data.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pagegate::testing {

struct PlantedItem {
    std::string text;
    std::string category;   // expected category name
};

struct RandomDocument {
    std::string html;
    std::vector<PlantedItem> planted;
    std::vector<std::string> words;   // unique plain-word runs placed in extraction-set elements
};

class RandomHtml {
public:
    explicit RandomHtml(std::uint64_t seed) : rng_(seed) {}

    RandomDocument generate(bool plant_pii = true) {
        doc_ = {};
        plant_ = plant_pii;
        std::string body;
        const int blocks = pick(1, 6);
        for (int i = 0; i < blocks; ++i) body += block(0);
        if (chance(0.3)) body += "<!-- note " + word() + " -->";
        if (chance(0.2)) body += "<script>var cfg = {\"a\": 1};</script>";
        if (chance(0.5))
            doc_.html = "<!DOCTYPE html><html><head><title>Page</title></head><body>" + body + "</body></html>";
        else
            doc_.html = body;
        return doc_;
    }

    static const std::vector<PlantedItem>& pool() {
        static const std::vector<PlantedItem> items = {
            {"alice.smith@example.com", "email"},   {"j.doe+shop@mail.example.org", "email"},
            {"+1-202-555-0143", "phone_number"},    {"(415) 555-0199", "phone_number"},
            {"123-45-6789", "id"},                  {"4111 1111 1111 1111", "financial_information"},
            {"@quietfox_42", "online_identity"},    {"Maria Garcia", "name"},
            {"Dr. Chen", "name"},                   {"742 Evergreen Terrace", "address"},
            {"Berlin", "geo_location"},             {"Stanford University", "affiliation"},
            {"type 2 diabetes", "health_information"}, {"GPA 3.85", "educational_record"},
            {"2024-03-15", "time"},                 {"34 years old", "demographic_attribute"},
            {"192.168.10.24", "online_identity"},   {"GB82 WEST 1234 5698 7654 32", "financial_information"},
        };
        return items;
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    std::string word() {
        static const char* kWords[] = {"apple", "river", "stone", "cloud", "lemon", "violet", "copper", "garden"};
        std::string w = kWords[pick(0, 7)];
        w += "q" + std::to_string(counter_++) + "z";
        return w;
    }

    std::string space() {
        static const char* kSpaces[] = {" ", "  ", "\n", " \t ", "&nbsp;"};
        return kSpaces[pick(0, 4)];
    }

    // A text run; may carry a planted item. Returns raw HTML.
    std::string text(bool extracted) {
        std::string out;
        const int parts = pick(1, 3);
        for (int i = 0; i < parts; ++i) {
            if (i) out += space();
            if (plant_ && chance(0.35)) {
                const auto& item = pool()[static_cast<std::size_t>(pick(0, static_cast<int>(pool().size()) - 1))];
                doc_.planted.push_back(item);
                out += item.text;
            } else {
                std::string w = word();
                if (extracted) doc_.words.push_back(w);
                out += w;
            }
            if (chance(0.1)) out += " &amp; more";
        }
        return out;
    }

    std::string attr_value() {
        if (plant_ && chance(0.4)) {
            const auto& item = pool()[static_cast<std::size_t>(pick(0, static_cast<int>(pool().size()) - 1))];
            doc_.planted.push_back(item);
            return item.text;
        }
        return word();
    }

    // Only div and section take block children, so no implicit close can move
    // a text run out of the element it was written in.
    std::string block(int depth, bool inline_only = false) {
        static const char* kContainers[] = {"div", "span", "p", "section", "b", "em", "a", "label", "h2", "button", "li", "td"};
        static const char* kInline[] = {"span", "b", "em", "label"};
        const std::string tag = inline_only ? kInline[pick(0, 3)] : kContainers[pick(0, 11)];
        const bool blocks_inside = tag == "div" || tag == "section";
        std::string open = "<" + tag;
        if (chance(0.2)) open += " aria-label=\"" + attr_value() + "\"";
        if (chance(0.15)) open += " title='" + attr_value() + "'";
        if (tag == "a" && chance(0.5)) open += " href=\"mailto:" + attr_value() + "\"";
        if (chance(0.1)) open += " data-x=\"" + attr_value() + "\"";
        open += ">";

        std::string inner;
        const int children = depth > 3 ? 0 : pick(0, 3);
        inner += text(tag != "section" && tag != "b" && tag != "em");
        for (int i = 0; i < children; ++i) {
            const int kind = pick(0, 5);
            if (kind <= 2) inner += block(depth + 1, !blocks_inside);
            else if (kind == 3) inner += "<input placeholder=\"" + attr_value() + "\" value=\"" + attr_value() + "\">";
            else if (kind == 4) inner += "<select><option value=\"" + word() + "\">" + text(true) + "</option></select>";
            else inner += "<textarea>" + text(true) + "</textarea>";
            if (chance(0.5)) inner += space() + text(tag != "section" && tag != "b" && tag != "em");
        }
        // Leave some elements unclosed to exercise recovery.
        const bool close = tag == "b" || tag == "em" || tag == "a" || chance(0.85);
        return open + inner + (close ? "</" + tag + ">" : "");
    }

    std::mt19937_64 rng_;
    RandomDocument doc_;
    bool plant_ = true;
    std::uint64_t counter_ = 0;
};

} // namespace pagegate::testing
