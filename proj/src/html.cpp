#include "pagegate/html.hpp"

#include "pagegate/error.hpp"

#include <algorithm>
#include <array>
#include <initializer_list>

namespace pagegate::html {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool in(std::string_view tag, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

bool is_head_tag(std::string_view tag) {
    return in(tag, {"base", "link", "meta", "title", "style", "script"});
}

bool is_raw_text_tag(std::string_view tag) { return in(tag, {"script", "style", "xmp", "noembed"}); }

bool is_rcdata_tag(std::string_view tag) { return in(tag, {"textarea", "title"}); }

bool closes_paragraph(std::string_view tag) {
    return in(tag, {"address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",
                    "div", "dl", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
                    "h4", "h5", "h6", "header", "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre",
                    "section", "summary", "table", "ul", "li", "dd", "dt"});
}

bool is_heading(std::string_view tag) { return in(tag, {"h1", "h2", "h3", "h4", "h5", "h6"}); }

bool is_scope_boundary(std::string_view tag) {
    return in(tag, {"html", "body", "table", "td", "th", "caption", "marquee", "object", "applet",
                    "template", "button"});
}

bool istarts_with(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != prefix[i]) return false;
    }
    return true;
}

struct StartTag {
    std::string name;
    std::vector<Attribute> attributes;
    bool self_closing = false;
    std::size_t end = 0;   // one past '>'
};

// Parses a start tag whose '<' is at `pos`. Returns nullopt if the input ends
// before the closing '>'.
std::optional<StartTag> read_start_tag(std::string_view raw, std::size_t pos) {
    StartTag tag;
    std::size_t i = pos + 1;
    while (i < raw.size() && !is_space(raw[i]) && raw[i] != '>' && raw[i] != '/') ++i;
    tag.name = to_lower_ascii(raw.substr(pos + 1, i - pos - 1));
    while (true) {
        while (i < raw.size() && (is_space(raw[i]) || raw[i] == '/')) {
            if (raw[i] == '/' && i + 1 < raw.size() && raw[i + 1] == '>') tag.self_closing = true;
            ++i;
        }
        if (i >= raw.size()) return std::nullopt;
        if (raw[i] == '>') {
            tag.end = i + 1;
            return tag;
        }
        const std::size_t name_begin = i;
        ++i;   // a leading '=' belongs to the name
        while (i < raw.size() && !is_space(raw[i]) && raw[i] != '>' && raw[i] != '/' && raw[i] != '=') ++i;
        Attribute attr;
        attr.name = to_lower_ascii(raw.substr(name_begin, i - name_begin));
        std::size_t j = i;
        while (j < raw.size() && is_space(raw[j])) ++j;
        if (j < raw.size() && raw[j] == '=') {
            ++j;
            while (j < raw.size() && is_space(raw[j])) ++j;
            if (j >= raw.size()) return std::nullopt;
            if (raw[j] == '"' || raw[j] == '\'') {
                const char quote = raw[j];
                const std::size_t close = raw.find(quote, j + 1);
                if (close == std::string_view::npos) return std::nullopt;
                attr.value_range = {j + 1, close};
                i = close + 1;
            } else {
                std::size_t k = j;
                while (k < raw.size() && !is_space(raw[k]) && raw[k] != '>') ++k;
                attr.value_range = {j, k};
                i = k;
            }
            attr.value = std::string(raw.substr(attr.value_range.begin, attr.value_range.end - attr.value_range.begin));
        }
        // Duplicate attributes: first one wins, as in browsers.
        const bool duplicate = std::any_of(tag.attributes.begin(), tag.attributes.end(),
                                           [&](const Attribute& a) { return a.name == attr.name; });
        if (!duplicate) tag.attributes.push_back(std::move(attr));
    }
}

} // namespace

const Attribute* Node::attribute(std::string_view name) const {
    for (const auto& a : attributes)
        if (a.name == name) return &a;
    return nullptr;
}

bool is_void_element(std::string_view tag) {
    return in(tag, {"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param",
                    "source", "track", "wbr", "keygen"});
}

class TreeBuilder {
public:
    explicit TreeBuilder(std::string_view raw) : raw_(raw) {
        Node document;
        document.kind = NodeKind::document;
        document.outer = {0, raw.size()};
        doc_.nodes_.push_back(std::move(document));
    }

    Document build() {
        std::size_t pos = 0;
        std::size_t text_begin = 0;
        const std::size_t n = raw_.size();
        while (pos < n) {
            if (raw_[pos] != '<' || !markup_starts(pos)) {
                ++pos;
                continue;
            }
            flush_text(text_begin, pos);
            pos = consume_markup(pos);
            text_begin = pos;
        }
        flush_text(text_begin, n);
        ensure_html(n);
        while (!stack_.empty()) pop(n);
        doc_.nodes_[doc_.html_].outer.end = n;
        return std::move(doc_);
    }

private:
    bool markup_starts(std::size_t pos) const {
        if (pos + 1 >= raw_.size()) return false;
        const char next = raw_[pos + 1];
        if (is_alpha(next) || next == '!' || next == '?') return true;
        return next == '/' && pos + 2 < raw_.size() && is_alpha(raw_[pos + 2]);
    }

    // Consumes the construct at raw_[pos] == '<'; returns the new position.
    // Incomplete tags at end of input fall through as text.
    std::size_t consume_markup(std::size_t pos) {
        const std::size_t n = raw_.size();
        if (raw_.compare(pos, 4, "<!--") == 0) {
            const std::size_t close = raw_.find("-->", pos + 4);
            const std::size_t content_end = close == std::string_view::npos ? n : close;
            add_leaf(NodeKind::comment, {pos + 4, content_end}, false);
            return close == std::string_view::npos ? n : close + 3;
        }
        if (raw_[pos + 1] == '!' || raw_[pos + 1] == '?') {
            const std::size_t close = raw_.find('>', pos);
            return close == std::string_view::npos ? n : close + 1;
        }
        if (raw_[pos + 1] == '/') {
            const std::size_t close = raw_.find('>', pos);
            if (close == std::string_view::npos) return as_text(pos);
            std::size_t i = pos + 2;
            while (i < close && !is_space(raw_[i]) && raw_[i] != '/') ++i;
            end_tag(to_lower_ascii(raw_.substr(pos + 2, i - pos - 2)), pos, close + 1);
            return close + 1;
        }
        auto tag = read_start_tag(raw_, pos);
        if (!tag) return as_text(pos);
        return start_tag(std::move(*tag), pos);
    }

    std::size_t as_text(std::size_t pos) {
        flush_text(pos, raw_.size());
        return raw_.size();
    }

    void flush_text(std::size_t begin, std::size_t end) {
        if (begin >= end) return;
        const std::string_view content = raw_.substr(begin, end - begin);
        const bool blank = std::all_of(content.begin(), content.end(), is_space);
        if (doc_.body_ == kNoNode) {
            if (blank) return;
            ensure_body(begin);
        }
        add_leaf(NodeKind::text, {begin, end}, false);
    }

    std::size_t add_node(Node node, std::size_t parent) {
        node.parent = parent;
        const std::size_t index = doc_.nodes_.size();
        doc_.nodes_.push_back(std::move(node));
        doc_.nodes_[parent].children.push_back(index);
        return index;
    }

    std::size_t current() const { return stack_.empty() ? 0 : stack_.back(); }

    void add_leaf(NodeKind kind, SourceRange range, bool raw_text) {
        Node leaf;
        leaf.kind = kind;
        leaf.outer = range;
        leaf.raw_text = raw_text;
        add_node(std::move(leaf), current());
    }

    std::size_t add_element(std::string tag, std::vector<Attribute> attrs, SourceRange range,
                            std::size_t parent, bool synthetic) {
        Node element;
        element.kind = NodeKind::element;
        element.tag = std::move(tag);
        element.attributes = std::move(attrs);
        element.outer = range;
        element.synthetic = synthetic;
        return add_node(std::move(element), parent);
    }

    void pop(std::size_t end) {
        doc_.nodes_[stack_.back()].outer.end = end;
        stack_.pop_back();
    }

    bool on_stack(std::size_t node) const {
        return std::find(stack_.begin(), stack_.end(), node) != stack_.end();
    }

    void ensure_html(std::size_t pos) {
        if (doc_.html_ != kNoNode) return;
        doc_.html_ = add_element("html", {}, {pos, pos}, 0, true);
        stack_.push_back(doc_.html_);
    }

    void close_head(std::size_t pos) {
        if (doc_.head_ != kNoNode && on_stack(doc_.head_)) {
            while (stack_.back() != doc_.head_) pop(pos);
            pop(pos);
        }
    }

    void ensure_body(std::size_t pos) {
        ensure_html(pos);
        if (doc_.body_ != kNoNode) return;
        close_head(pos);
        doc_.body_ = add_element("body", {}, {pos, pos}, doc_.html_, true);
        stack_.push_back(doc_.body_);
    }

    // Pops up to and including the nearest open `tag`, unless a node in
    // `stop` (or a scope boundary) is reached first.
    bool close_in_scope(std::string_view tag, std::size_t pos, std::initializer_list<std::string_view> stop = {}) {
        for (std::size_t i = stack_.size(); i-- > 0;) {
            const std::string& t = doc_.nodes_[stack_[i]].tag;
            if (t == tag) {
                while (stack_.size() > i) pop(pos);
                return true;
            }
            if (is_scope_boundary(t) || in(t, stop)) return false;
        }
        return false;
    }

    void implicit_close(std::string_view tag, std::size_t pos) {
        if (closes_paragraph(tag)) close_in_scope("p", pos);
        if (tag == "li") {
            close_in_scope("li", pos, {"ul", "ol"});
        } else if (tag == "dd" || tag == "dt") {
            if (!close_in_scope("dd", pos, {"dl"})) close_in_scope("dt", pos, {"dl"});
        } else if (tag == "option" || tag == "optgroup") {
            if (doc_.nodes_[current()].tag == "option") pop(pos);
            if (tag == "optgroup" && doc_.nodes_[current()].tag == "optgroup") pop(pos);
        } else if (tag == "tr") {
            for (std::size_t i = stack_.size(); i-- > 0;) {
                const std::string& t = doc_.nodes_[stack_[i]].tag;
                if (t == "tr") {
                    while (stack_.size() > i) pop(pos);
                    break;
                }
                if (in(t, {"table", "tbody", "thead", "tfoot", "html", "body"})) break;
            }
        } else if (tag == "td" || tag == "th") {
            for (std::size_t i = stack_.size(); i-- > 0;) {
                const std::string& t = doc_.nodes_[stack_[i]].tag;
                if (t == "td" || t == "th") {
                    while (stack_.size() > i) pop(pos);
                    break;
                }
                if (in(t, {"tr", "table", "html", "body"})) break;
            }
        } else if (is_heading(tag)) {
            if (is_heading(doc_.nodes_[current()].tag)) pop(pos);
        } else if (tag == "a") {
            close_in_scope("a", pos);
        }
    }

    // Text content of script/style/textarea/title runs to the matching end tag.
    std::size_t consume_text_content(std::size_t element, std::string_view tag, std::size_t begin, bool raw_text) {
        const std::string closer = "</" + std::string(tag);
        std::size_t close = begin;
        while (true) {
            close = raw_.find("</", close);
            if (close == std::string_view::npos || istarts_with(raw_, close, closer)) break;
            close += 2;
        }
        const std::size_t content_end = close == std::string_view::npos ? raw_.size() : close;
        if (content_end > begin) {
            Node text;
            text.kind = NodeKind::text;
            text.outer = {begin, content_end};
            text.raw_text = raw_text;
            add_node(std::move(text), element);
        }
        std::size_t after = raw_.size();
        if (close != std::string_view::npos) {
            const std::size_t gt = raw_.find('>', close);
            after = gt == std::string_view::npos ? raw_.size() : gt + 1;
        }
        doc_.nodes_[element].outer.end = after;
        return after;
    }

    std::size_t start_tag(StartTag tag, std::size_t pos) {
        const std::string& name = tag.name;
        if (name == "html") {
            if (doc_.html_ == kNoNode) {
                doc_.html_ = add_element("html", std::move(tag.attributes), {pos, pos}, 0, false);
                stack_.push_back(doc_.html_);
            }
            return tag.end;
        }
        ensure_html(pos);
        if (name == "head") {
            if (doc_.head_ == kNoNode && doc_.body_ == kNoNode) {
                doc_.head_ = add_element("head", std::move(tag.attributes), {pos, pos}, doc_.html_, false);
                stack_.push_back(doc_.head_);
            }
            return tag.end;
        }
        if (name == "body") {
            if (doc_.body_ == kNoNode) {
                close_head(pos);
                doc_.body_ = add_element("body", std::move(tag.attributes), {pos, pos}, doc_.html_, false);
                stack_.push_back(doc_.body_);
            }
            return tag.end;
        }

        std::size_t parent;
        if (doc_.body_ == kNoNode && is_head_tag(name)) {
            if (doc_.head_ == kNoNode) {
                doc_.head_ = add_element("head", {}, {pos, pos}, doc_.html_, true);
                stack_.push_back(doc_.head_);
            }
            parent = doc_.head_;
        } else {
            ensure_body(pos);
            implicit_close(name, pos);
            parent = current();
        }

        const std::size_t element = add_element(name, std::move(tag.attributes), {pos, tag.end}, parent, false);
        if (is_raw_text_tag(name) || is_rcdata_tag(name))
            return consume_text_content(element, name, tag.end, is_raw_text_tag(name));
        if (is_void_element(name)) return tag.end;
        if (parent == doc_.head_ && doc_.body_ == kNoNode) return tag.end;
        stack_.push_back(element);
        return tag.end;
    }

    void end_tag(const std::string& name, std::size_t begin, std::size_t end) {
        if (name == "head") {
            if (doc_.head_ != kNoNode && on_stack(doc_.head_)) {
                while (stack_.back() != doc_.head_) pop(begin);
                pop(end);
            }
            return;
        }
        if (name == "html" || name == "body" || name == "br") return;
        for (std::size_t i = stack_.size(); i-- > 0;) {
            const std::string& t = doc_.nodes_[stack_[i]].tag;
            if (t == "html" || t == "body") return;
            if (t == name) {
                while (stack_.size() > i + 1) pop(begin);
                pop(end);
                return;
            }
        }
    }

    std::string_view raw_;
    Document doc_;
    std::vector<std::size_t> stack_;
};

std::string Document::path_of(std::size_t element) const {
    std::vector<std::string> parts;
    std::size_t at = element;
    while (at != kNoNode && at != 0) {
        const Node& n = nodes_[at];
        if (at == html_) {
            parts.push_back("html");
            break;
        }
        std::size_t index = 0;
        for (std::size_t sibling : nodes_[n.parent].children) {
            if (sibling == at) break;
            const Node& s = nodes_[sibling];
            if (s.kind == NodeKind::element && s.tag == n.tag) ++index;
        }
        parts.push_back(n.tag + "[" + std::to_string(index) + "]");
        at = n.parent;
    }
    std::string path;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (!path.empty()) path.push_back('/');
        path += *it;
    }
    return path;
}

Document parse(std::string_view raw) {
    if (raw.find('\0') != std::string_view::npos)
        throw Error(ErrorCode::unparseable_document, "document contains NUL bytes");
    if (!is_valid_utf8(raw)) throw Error(ErrorCode::unparseable_document, "document is not valid UTF-8");
    return TreeBuilder(raw).build();
}

} // namespace pagegate::html
