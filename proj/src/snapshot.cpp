#include "pagegate/snapshot.hpp"

#include "pagegate/error.hpp"
#include "pagegate/hash.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace pagegate {

namespace {

constexpr std::string_view kExtractionTags[] = {
    "div", "span", "a", "input", "textarea", "select", "p", "li", "td", "th", "label",
    "h1", "h2", "h3", "h4", "h5", "h6", "button", "option", "address", "dt", "dd", "caption", "figcaption", "blockquote", "legend", "summary",
};

// Text beneath these is not rendered as page text.
bool hides_text(std::string_view tag) {
    return tag == "script" || tag == "style" || tag == "template" || tag == "noscript";
}

} // namespace

std::string_view to_string(TextSource source) {
    switch (source) {
        case TextSource::visible_text:        return "visible_text";
        case TextSource::accessibility_label: return "accessibility_label";
        case TextSource::placeholder:         return "placeholder";
        case TextSource::value:               return "value";
    }
    return "visible_text";
}

std::optional<TextSource> parse_text_source(std::string_view name) {
    for (auto s : {TextSource::visible_text, TextSource::accessibility_label, TextSource::placeholder,
                   TextSource::value})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

std::string_view to_string(SnapshotFormat format) {
    return format == SnapshotFormat::html ? "html" : "element_list";
}

std::optional<SnapshotFormat> parse_snapshot_format(std::string_view name) {
    if (name == "element_list") return SnapshotFormat::element_list;
    if (name == "html") return SnapshotFormat::html;
    return std::nullopt;
}

std::string element_id(std::string_view dom_path, TextSource source, std::size_t occurrence) {
    const std::string index = std::to_string(occurrence);
    return short_id({dom_path, to_string(source), index});
}

bool is_extraction_tag(std::string_view tag) {
    return std::find(std::begin(kExtractionTags), std::end(kExtractionTags), tag) != std::end(kExtractionTags);
}

const ElementInfo* InterfaceSnapshot::find(std::string_view id) const {
    for (const auto& e : elements_)
        if (e.id == id) return &e;
    return nullptr;
}

void InterfaceSnapshot::attach_geometry(std::span<const std::pair<std::string, Rect>> rects) {
    for (auto& e : elements_) {
        for (const auto& [path, rect] : rects) {
            if (path == e.dom_path && rect.width >= 0 && rect.height >= 0) {
                e.bbox = rect;
                break;
            }
        }
    }
}

InterfaceSnapshot parse_snapshot(std::string raw_document, std::string session_id, std::uint64_t seq,
                                 std::string source_url, std::int64_t captured_at) {
    InterfaceSnapshot snap;
    snap.session_id_ = std::move(session_id);
    snap.seq_ = seq;
    snap.source_url_ = std::move(source_url);
    snap.captured_at_ = captured_at;
    snap.raw_ = std::move(raw_document);
    snap.dom_ = html::parse(snap.raw_);

    const auto& nodes = snap.dom_.nodes();
    const std::string_view raw = snap.raw_;

    // Visible text: each text node belongs to its nearest extraction-set ancestor.
    std::map<std::size_t, std::vector<std::size_t>> owned_text;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const html::Node& n = nodes[i];
        if (n.kind != html::NodeKind::text || n.raw_text) continue;
        std::size_t at = n.parent;
        std::size_t owner = html::kNoNode;
        bool hidden = false;
        while (at != html::kNoNode && at != 0) {
            const html::Node& a = nodes[at];
            if (hides_text(a.tag)) {
                hidden = true;
                break;
            }
            if (owner == html::kNoNode && is_extraction_tag(a.tag)) owner = at;
            at = a.parent;
        }
        if (!hidden && owner != html::kNoNode) owned_text[owner].push_back(i);
    }

    std::map<std::pair<std::string, TextSource>, std::size_t> occurrences;
    auto emit = [&](std::size_t element, const std::string& path, TextSource source, SourceRange range) {
        MappedText mapped = decode_and_normalize(raw.substr(range.begin, range.end - range.begin), range.begin, true);
        if (mapped.text.empty()) return;
        std::size_t& counter = occurrences[{path, source}];
        ElementInfo info;
        info.dom_path = path;
        info.tag = nodes[element].tag;
        info.source = source;
        info.occurrence = counter++;
        info.id = element_id(path, source, info.occurrence);
        info.text = std::move(mapped.text);
        info.mapping.origin = std::move(mapped.origin);
        info.mapping.text = info.text;
        info.node = element;
        snap.elements_.push_back(std::move(info));
    };

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const html::Node& n = nodes[i];
        if (n.kind != html::NodeKind::element || !is_extraction_tag(n.tag)) continue;
        bool hidden = false;
        for (std::size_t at = n.parent; at != html::kNoNode && at != 0; at = nodes[at].parent)
            if (hides_text(nodes[at].tag)) hidden = true;
        if (hidden) continue;

        const std::string path = snap.dom_.path_of(i);
        for (std::string_view attr : {"aria-label", "alt", "title"})
            if (const auto* a = n.attribute(attr)) emit(i, path, TextSource::accessibility_label, a->value_range);
        if (const auto* a = n.attribute("placeholder")) emit(i, path, TextSource::placeholder, a->value_range);
        if (const auto* a = n.attribute("value")) emit(i, path, TextSource::value, a->value_range);
        if (auto it = owned_text.find(i); it != owned_text.end())
            for (std::size_t t : it->second) emit(i, path, TextSource::visible_text, nodes[t].outer);
    }
    return snap;
}

std::string serialize_snapshot(const InterfaceSnapshot& snapshot, SnapshotFormat format) {
    if (format == SnapshotFormat::html) return snapshot.raw_document();
    std::string out;
    for (const auto& e : snapshot.elements()) {
        out += e.id;
        out += '\t';
        out += e.dom_path;
        out += '\t';
        out += to_string(e.source);
        out += '\t';
        out += e.text;
        out += '\n';
    }
    return out;
}

std::vector<TextRegion> text_regions(const html::Document& dom) {
    std::vector<TextRegion> regions;
    for (const auto& n : dom.nodes()) {
        switch (n.kind) {
            case html::NodeKind::text:
                regions.push_back({n.outer, !n.raw_text});
                break;
            case html::NodeKind::comment:
                regions.push_back({n.outer, false});
                break;
            case html::NodeKind::element:
                for (const auto& a : n.attributes)
                    if (!a.value_range.empty()) regions.push_back({a.value_range, true});
                break;
            case html::NodeKind::document:
                break;
        }
    }
    std::sort(regions.begin(), regions.end(),
              [](const TextRegion& a, const TextRegion& b) { return a.range.begin < b.range.begin; });
    return regions;
}

} // namespace pagegate
