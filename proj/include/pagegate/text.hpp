#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pagegate {

// Half-open byte range into a raw document.
struct SourceRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool empty() const { return begin >= end; }
    friend bool operator==(const SourceRange&, const SourceRange&) = default;
};

// Decoded, whitespace-normalized text together with, for each output byte, the
// raw range that produced it. Lets redaction translate offsets in the
// human-visible text back into edits on the original document.
struct MappedText {
    std::string text;
    std::vector<SourceRange> origin;   // origin.size() == text.size()

    // Raw range covering normalized bytes [begin, end). Requires begin < end <= size.
    SourceRange raw_range(std::size_t begin, std::size_t end) const;
};

// Decodes character references (when `decode_entities`) and collapses runs of
// whitespace (ASCII whitespace and U+00A0) to one space, trimming both ends.
// `base` is the offset of `raw` within the enclosing document.
MappedText decode_and_normalize(std::string_view raw, std::size_t base, bool decode_entities);

std::string normalize_whitespace(std::string_view text);
std::string decode_entities(std::string_view text);

bool is_valid_utf8(std::string_view bytes);

// All start offsets of `needle` in `haystack`, non-overlapping, left to right.
std::vector<std::size_t> find_all(std::string_view haystack, std::string_view needle);

std::string to_lower_ascii(std::string_view text);

} // namespace pagegate
