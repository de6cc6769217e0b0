#include "doctest.h"

#include "pagegate/error.hpp"
#include "pagegate/html.hpp"
#include "pagegate/text.hpp"

#include <string>

using namespace pagegate;

namespace {

std::string tags(const html::Document& doc) {
    std::string out;
    for (const auto& n : doc.nodes())
        if (n.kind == html::NodeKind::element) out += n.tag + " ";
    return out;
}

std::string paths(const html::Document& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.nodes().size(); ++i)
        if (doc.node(i).kind == html::NodeKind::element) out += doc.path_of(i) + "\n";
    return out;
}

} // namespace

TEST_CASE("entity decoding and whitespace normalization") {
    CHECK(decode_entities("AT&amp;T &lt;b&gt; &#65;&#x42; &copy") == "AT&T <b> AB \xC2\xA9");
    CHECK(decode_entities("&unknown; & &;") == "&unknown; & &;");
    CHECK(normalize_whitespace("  a \n\t b  ") == "a b");
    CHECK(normalize_whitespace("John\xC2\xA0Smith") == "John Smith");

    const std::string raw = "x  Tom &amp;  Jerry ";
    const MappedText m = decode_and_normalize(raw, 100, true);
    CHECK(m.text == "x Tom & Jerry");
    REQUIRE(m.origin.size() == m.text.size());
    // "&" comes from the 5-byte entity at raw[7..12).
    CHECK(m.origin[6] == SourceRange{107, 112});
    // The collapsed space before "Tom" covers both raw spaces.
    CHECK(m.origin[1] == SourceRange{101, 103});
    CHECK(m.raw_range(2, 7) == SourceRange{103, 112});
}

TEST_CASE("utf8 validation") {
    CHECK(is_valid_utf8("plain"));
    CHECK(is_valid_utf8("caf\xC3\xA9 \xE2\x82\xAC \xF0\x9F\x98\x80"));
    CHECK_FALSE(is_valid_utf8("\xC3"));
    CHECK_FALSE(is_valid_utf8("\xC0\xAF"));        // overlong
    CHECK_FALSE(is_valid_utf8("\xED\xA0\x80"));    // surrogate
    CHECK_FALSE(is_valid_utf8("\xFF"));
}

TEST_CASE("implicit html and body are synthesized") {
    const auto doc = html::parse("<div>Alice</div>");
    CHECK(tags(doc) == "html body div ");
    CHECK(paths(doc) == "html\nhtml/body[0]\nhtml/body[0]/div[0]\n");
}

TEST_CASE("head content stays in head") {
    const auto doc = html::parse("<title>T</title><meta charset=utf-8><p>hi</p>");
    CHECK(tags(doc) == "html head title meta body p ");
}

TEST_CASE("sibling indices count same-tag siblings") {
    const auto doc = html::parse("<html><body><div></div><p></p><div><input><input></div></body></html>");
    CHECK(paths(doc) ==
          "html\nhtml/body[0]\nhtml/body[0]/div[0]\nhtml/body[0]/p[0]\nhtml/body[0]/div[1]\n"
          "html/body[0]/div[1]/input[0]\nhtml/body[0]/div[1]/input[1]\n");
}

TEST_CASE("implicit closes") {
    SUBCASE("p closed by div") {
        const auto doc = html::parse("<p>one<div>two</div>");
        CHECK(paths(doc) == "html\nhtml/body[0]\nhtml/body[0]/p[0]\nhtml/body[0]/div[0]\n");
    }
    SUBCASE("li closes li") {
        const auto doc = html::parse("<ul><li>a<li>b</ul>");
        CHECK(paths(doc) == "html\nhtml/body[0]\nhtml/body[0]/ul[0]\nhtml/body[0]/ul[0]/li[0]\nhtml/body[0]/ul[0]/li[1]\n");
    }
    SUBCASE("option closes option") {
        const auto doc = html::parse("<select><option>a<option>b</select>");
        CHECK(paths(doc).find("select[0]/option[1]") != std::string::npos);
    }
    SUBCASE("td closes td") {
        const auto doc = html::parse("<table><tr><td>a<td>b<tr><td>c</table>");
        const std::string p = paths(doc);
        CHECK(p.find("table[0]/tr[0]/td[1]") != std::string::npos);
        CHECK(p.find("table[0]/tr[1]/td[0]") != std::string::npos);
    }
}

TEST_CASE("source ranges of elements") {
    const std::string raw = "<div><span>x</span><input value='v'></div>tail";
    const auto doc = html::parse(raw);
    for (const auto& n : doc.nodes()) {
        if (n.tag == "div") CHECK(raw.substr(n.outer.begin, n.outer.end - n.outer.begin) == "<div><span>x</span><input value='v'></div>");
        if (n.tag == "span") CHECK(raw.substr(n.outer.begin, n.outer.end - n.outer.begin) == "<span>x</span>");
        if (n.tag == "input") {
            CHECK(raw.substr(n.outer.begin, n.outer.end - n.outer.begin) == "<input value='v'>");
            const auto* v = n.attribute("value");
            REQUIRE(v != nullptr);
            CHECK(v->value == "v");
            CHECK(raw.substr(v->value_range.begin, 1) == "v");
        }
    }
}

TEST_CASE("raw text elements are not tokenized") {
    const auto doc = html::parse("<div><script>if (a<b) { x = '</div>'; }</script>after</div>");
    bool saw_script_text = false;
    for (const auto& n : doc.nodes())
        if (n.kind == html::NodeKind::text && n.raw_text) saw_script_text = true;
    CHECK(saw_script_text);
    // The '</div>' inside the script does not close the div.
    CHECK(tags(doc) == "html body div script ");
}

TEST_CASE("tag soup never throws") {
    for (const char* soup : {"<", "<<>>", "</", "<div", "<a href='x", "</p></p><p", "<!-- open", "<!doctype",
                             "<div><span></div></span>", "&&&;;<b>", "<input value=>", "<?xml?>"}) {
        CHECK_NOTHROW(html::parse(soup));
    }
}

TEST_CASE("unparseable input") {
    CHECK_THROWS_AS(html::parse(std::string("a\0b", 3)), Error);
    CHECK_THROWS_AS(html::parse("\xFF\xFE"), Error);
}
