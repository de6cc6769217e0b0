#pragma once

#include "pagegate/html.hpp"
#include "pagegate/text.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pagegate {

struct Rect {
    double x = 0;
    double y = 0;
    double width = 0;
    double height = 0;

    friend bool operator==(const Rect&, const Rect&) = default;
};

enum class TextSource { visible_text, accessibility_label, placeholder, value };

std::string_view to_string(TextSource source);
std::optional<TextSource> parse_text_source(std::string_view name);

// One text source of one DOM element: the unit that is detected on and redacted.
struct ElementInfo {
    std::string id;          // 16 hex chars, see element_id()
    std::string dom_path;
    std::string tag;
    TextSource source = TextSource::visible_text;
    std::size_t occurrence = 0;   // index among entries sharing (dom_path, source)
    std::string text;             // decoded, whitespace-normalized, never empty
    std::optional<Rect> bbox;

    std::size_t node = html::kNoNode;   // owning element in the parsed document
    MappedText mapping;                 // raw offsets for each byte of `text`
};

// id = first 16 hex chars of SHA-256(dom_path US source US occurrence), where US
// is U+001F and occurrence is written in decimal.
std::string element_id(std::string_view dom_path, TextSource source, std::size_t occurrence);

// Tags whose text is extracted. Text under any other element is attributed to
// its nearest ancestor in this set.
bool is_extraction_tag(std::string_view tag);

class InterfaceSnapshot {
public:
    const std::string& session_id() const { return session_id_; }
    std::uint64_t seq() const { return seq_; }
    const std::string& source_url() const { return source_url_; }
    const std::string& raw_document() const { return raw_; }
    const std::vector<ElementInfo>& elements() const { return elements_; }
    std::int64_t captured_at() const { return captured_at_; }
    const html::Document& dom() const { return dom_; }

    const ElementInfo* find(std::string_view element_id) const;

    // Attaches geometry reported by a live driver, keyed by dom_path.
    void attach_geometry(std::span<const std::pair<std::string, Rect>> rects);

private:
    friend InterfaceSnapshot parse_snapshot(std::string, std::string, std::uint64_t, std::string, std::int64_t);
    std::string session_id_;
    std::uint64_t seq_ = 0;
    std::string source_url_;
    std::string raw_;
    std::vector<ElementInfo> elements_;
    std::int64_t captured_at_ = 0;
    html::Document dom_;
};

// Throws Error{unparseable_document}.
InterfaceSnapshot parse_snapshot(std::string raw_document, std::string session_id, std::uint64_t seq,
                                 std::string source_url, std::int64_t captured_at = 0);

enum class SnapshotFormat { element_list, html };

std::string_view to_string(SnapshotFormat format);
std::optional<SnapshotFormat> parse_snapshot_format(std::string_view name);

// element_list: "id\tdom_path\tsource\ttext\n" per element; html: the document.
std::string serialize_snapshot(const InterfaceSnapshot& snapshot, SnapshotFormat format);

// Every stretch of the raw document that carries human-readable content:
// all text nodes, comments and attribute values, whether or not they are
// extracted as element information.
struct TextRegion {
    SourceRange range;
    bool decode_entities = true;
};
std::vector<TextRegion> text_regions(const html::Document& dom);

} // namespace pagegate
