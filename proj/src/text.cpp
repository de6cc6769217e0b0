#include "pagegate/text.hpp"

#include <algorithm>
#include <iterator>
#include <cstdint>
#include <utility>

namespace pagegate {

namespace {

struct NamedEntity {
    std::string_view name;
    char32_t code;
};

// Sorted by name for binary search.
constexpr NamedEntity kEntities[] = {
    {"AElig", 0xC6},  {"Aacute", 0xC1}, {"Eacute", 0xC9}, {"Ntilde", 0xD1},
    {"Ouml", 0xD6},   {"Uuml", 0xDC},   {"aacute", 0xE1}, {"acirc", 0xE2},
    {"aelig", 0xE6},  {"agrave", 0xE0}, {"amp", 0x26},    {"apos", 0x27},
    {"aring", 0xE5},  {"auml", 0xE4},   {"bull", 0x2022}, {"ccedil", 0xE7},
    {"cent", 0xA2},   {"copy", 0xA9},   {"deg", 0xB0},    {"eacute", 0xE9},
    {"ecirc", 0xEA},  {"egrave", 0xE8}, {"euml", 0xEB},   {"euro", 0x20AC},
    {"gt", 0x3E},     {"hellip", 0x2026}, {"iacute", 0xED}, {"iuml", 0xEF},
    {"laquo", 0xAB},  {"ldquo", 0x201C}, {"lsquo", 0x2018}, {"lt", 0x3C},
    {"mdash", 0x2014}, {"middot", 0xB7}, {"nbsp", 0xA0},  {"ndash", 0x2013},
    {"ntilde", 0xF1}, {"oacute", 0xF3}, {"ocirc", 0xF4},  {"ouml", 0xF6},
    {"para", 0xB6},   {"plusmn", 0xB1}, {"pound", 0xA3},  {"quot", 0x22},
    {"raquo", 0xBB},  {"rdquo", 0x201D}, {"reg", 0xAE},   {"rsquo", 0x2019},
    {"sect", 0xA7},   {"shy", 0xAD},    {"szlig", 0xDF},  {"times", 0xD7},
    {"trade", 0x2122}, {"uacute", 0xFA}, {"ucirc", 0xFB}, {"uuml", 0xFC},
    {"yen", 0xA5},    {"zwnj", 0x200C},
};

static_assert(std::is_sorted(std::begin(kEntities), std::end(kEntities),
                             [](const NamedEntity& a, const NamedEntity& b) { return a.name < b.name; }));

// Entities browsers still honour without the trailing semicolon.
bool legacy_entity(std::string_view name) {
    return name == "amp" || name == "lt" || name == "gt" || name == "quot" || name == "nbsp" ||
           name == "copy" || name == "reg";
}

const NamedEntity* find_entity(std::string_view name) {
    auto it = std::lower_bound(std::begin(kEntities), std::end(kEntities), name,
                               [](const NamedEntity& e, std::string_view n) { return e.name < n; });
    if (it != std::end(kEntities) && it->name == name) return &*it;
    return nullptr;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Tries to decode a character reference starting at raw[pos] == '&'.
// Returns the number of raw bytes consumed, 0 if it is not a reference.
std::size_t decode_reference(std::string_view raw, std::size_t pos, std::string& out) {
    std::size_t i = pos + 1;
    if (i < raw.size() && raw[i] == '#') {
        ++i;
        bool hex = false;
        if (i < raw.size() && (raw[i] == 'x' || raw[i] == 'X')) {
            hex = true;
            ++i;
        }
        const std::size_t digits_begin = i;
        std::uint32_t value = 0;
        while (i < raw.size() && (hex ? is_hex(raw[i]) : (raw[i] >= '0' && raw[i] <= '9'))) {
            const char c = raw[i];
            const std::uint32_t d = (c >= '0' && c <= '9') ? static_cast<std::uint32_t>(c - '0')
                                    : (c >= 'a')          ? static_cast<std::uint32_t>(c - 'a' + 10)
                                                          : static_cast<std::uint32_t>(c - 'A' + 10);
            if (value < 0x110000) value = value * (hex ? 16 : 10) + d;
            ++i;
        }
        if (i == digits_begin) return 0;
        if (i < raw.size() && raw[i] == ';') ++i;
        append_utf8(out, value);
        return i - pos;
    }
    while (i < raw.size() && is_alnum(raw[i]) && i - pos <= 10) ++i;
    const std::string_view name = raw.substr(pos + 1, i - pos - 1);
    if (name.empty()) return 0;
    const NamedEntity* entity = find_entity(name);
    if (!entity) return 0;
    if (i < raw.size() && raw[i] == ';') {
        ++i;
    } else if (!legacy_entity(name)) {
        return 0;
    }
    append_utf8(out, entity->code);
    return i - pos;
}

// Length of a whitespace unit at raw[pos], 0 if none. U+00A0 counts.
std::size_t whitespace_len(std::string_view s, std::size_t pos) {
    const char c = s[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') return 1;
    if (static_cast<unsigned char>(c) == 0xC2 && pos + 1 < s.size() &&
        static_cast<unsigned char>(s[pos + 1]) == 0xA0)
        return 2;
    return 0;
}

} // namespace

SourceRange MappedText::raw_range(std::size_t begin, std::size_t end) const {
    return {origin[begin].begin, origin[end - 1].end};
}

MappedText decode_and_normalize(std::string_view raw, std::size_t base, bool decode) {
    // First pass: decode into units that each remember their raw span.
    struct Unit {
        std::string bytes;
        SourceRange range;
        bool space;
    };
    std::vector<Unit> units;
    units.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        if (decode && raw[i] == '&') {
            std::string decoded;
            if (std::size_t used = decode_reference(raw, i, decoded)) {
                const bool space = whitespace_len(decoded, 0) == decoded.size() && !decoded.empty();
                units.push_back({std::move(decoded), {base + i, base + i + used}, space});
                i += used;
                continue;
            }
        }
        if (std::size_t ws = whitespace_len(raw, i)) {
            units.push_back({std::string(raw.substr(i, ws)), {base + i, base + i + ws}, true});
            i += ws;
            continue;
        }
        units.push_back({std::string(1, raw[i]), {base + i, base + i + 1}, false});
        ++i;
    }

    MappedText out;
    std::size_t u = 0;
    while (u < units.size() && units[u].space) ++u;
    std::size_t last = units.size();
    while (last > u && units[last - 1].space) --last;
    while (u < last) {
        if (units[u].space) {
            SourceRange run = units[u].range;
            while (u < last && units[u].space) {
                run.end = units[u].range.end;
                ++u;
            }
            out.text.push_back(' ');
            out.origin.push_back(run);
            continue;
        }
        for (char c : units[u].bytes) {
            out.text.push_back(c);
            out.origin.push_back(units[u].range);
        }
        ++u;
    }
    return out;
}

std::string normalize_whitespace(std::string_view text) {
    return decode_and_normalize(text, 0, false).text;
}

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '&') {
            if (std::size_t used = decode_reference(text, i, out)) {
                i += used;
                continue;
            }
        }
        out.push_back(text[i++]);
    }
    return out;
}

bool is_valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        const auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= bytes.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong encodings and surrogates.
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            return false;
        i += extra + 1;
    }
    return true;
}

std::vector<std::size_t> find_all(std::string_view haystack, std::string_view needle) {
    std::vector<std::size_t> hits;
    if (needle.empty()) return hits;
    std::size_t pos = haystack.find(needle);
    while (pos != std::string_view::npos) {
        hits.push_back(pos);
        pos = haystack.find(needle, pos + needle.size());
    }
    return hits;
}

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

} // namespace pagegate
