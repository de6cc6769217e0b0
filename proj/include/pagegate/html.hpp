#pragma once

#include "pagegate/text.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagegate::html {

struct Attribute {
    std::string name;          // lowercased
    std::string value;         // raw (not decoded)
    SourceRange value_range;   // raw range of the value inside the quotes; empty if no value
};

enum class NodeKind { document, element, text, comment };

inline constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

struct Node {
    NodeKind kind = NodeKind::element;
    std::string tag;                  // lowercased; empty for non-elements
    std::vector<Attribute> attributes;
    std::size_t parent = kNoNode;
    std::vector<std::size_t> children;
    // Elements: start of the start tag to the end of the end tag (or to wherever
    // the element was implicitly closed). Text/comment: the content bytes.
    SourceRange outer;
    bool synthetic = false;           // implied html/head/body with no source tag
    bool raw_text = false;            // text child of script/style: never entity-decoded

    const Attribute* attribute(std::string_view name) const;
};

// Error-recovering tree. Nodes are stored in document order; index 0 is the
// document node and the html root is always present.
class Document {
public:
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t html() const { return html_; }
    std::size_t body() const { return body_; }

    // "html/body[0]/div[2]" with same-tag sibling indices below the root.
    std::string path_of(std::size_t element) const;

private:
    friend class TreeBuilder;
    std::vector<Node> nodes_;
    std::size_t html_ = kNoNode;
    std::size_t head_ = kNoNode;
    std::size_t body_ = kNoNode;
};

// Throws Error{unparseable_document} when the bytes are not valid UTF-8 or
// contain NUL; everything else parses.
Document parse(std::string_view raw);

bool is_void_element(std::string_view tag);

} // namespace pagegate::html
