#include "pagegate/eval.hpp"

#include "pagegate/error.hpp"
#include "pagegate/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pagegate {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::corpus_invalid, what); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) invalid("cannot read " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::optional<double> ratio(int num, int den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / den;
}

ordered_json number_or_null(std::optional<double> v) {
    if (!v) return nullptr;
    return std::round(*v * 1e6) / 1e6;
}

struct Span {
    std::size_t page = 0;
    std::string element_id;
    std::size_t begin = 0;
    std::size_t end = 0;
};

bool overlaps(const Span& a, const Span& b) {
    return a.page == b.page && a.element_id == b.element_id && a.begin < b.end && b.begin < a.end;
}

std::vector<Span> locate(const InterfaceSnapshot& snap, std::size_t page, const std::string& text,
                         const std::optional<std::string>& hint) {
    std::vector<Span> out;
    for (const auto& e : snap.elements()) {
        if (hint && e.dom_path != *hint) continue;
        for (std::size_t pos : find_all(e.text, text)) out.push_back({page, e.id, pos, pos + text.size()});
    }
    return out;
}

struct Prediction {
    PiiCategory category;
    std::string text;
    std::vector<Span> spans;
};

struct GoldItem {
    const GoldEntity* entity;
    std::vector<Span> spans;
};

bool matches(const Prediction& p, const GoldItem& g, Matching m) {
    if (m == Matching::exact) return p.text == g.entity->text;
    for (const auto& a : p.spans)
        for (const auto& b : g.spans)
            if (overlaps(a, b)) return true;
    return false;
}

} // namespace

std::map<PiiCategory, int> AnnotatedCorpus::counts() const {
    std::map<PiiCategory, int> out;
    for (const auto c : kAllCategories) out[c] = 0;
    for (const auto& p : pages)
        for (const auto& g : p.gold) ++out[g.category];
    return out;
}

AnnotatedCorpus load_corpus(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) invalid("not a directory: " + dir.string());
    AnnotatedCorpus corpus;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".html") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) invalid("corpus has no .html pages: " + dir.string());
    std::map<std::string, std::size_t> by_name;
    for (const auto& f : files) {
        by_name[f.filename().string()] = corpus.pages.size();
        corpus.pages.push_back({f.filename().string(), f.filename().string(), read_file(f), {}});
    }

    const auto gold_path = dir / "gold.jsonl";
    if (!fs::exists(gold_path)) invalid("missing gold.jsonl in " + dir.string());
    std::istringstream lines(read_file(gold_path));
    std::string line;
    std::size_t n = 0;
    std::set<std::tuple<std::string, PiiCategory, std::string>> seen;
    std::map<std::string, std::string> task_of;
    while (std::getline(lines, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "gold.jsonl line " + std::to_string(n) + ": ";
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) invalid(where + "not a JSON object");
        if (!j.contains("file") || !j["file"].is_string()) invalid(where + "needs file");
        if (!j.contains("category") || !j["category"].is_string()) invalid(where + "needs category");
        if (!j.contains("text") || !j["text"].is_string()) invalid(where + "needs text");
        const auto file = j["file"].get<std::string>();
        const auto it = by_name.find(file);
        if (it == by_name.end()) invalid(where + "no page " + file);
        const auto category = parse_category(j["category"].get<std::string>());
        if (!category) invalid(where + "unknown category " + j["category"].get<std::string>());
        GoldEntity g{*category, normalize_whitespace(j["text"].get<std::string>()), std::nullopt};
        if (g.text.empty()) invalid(where + "empty text");
        if (j.contains("element_hint") && j["element_hint"].is_string()) g.element_hint = j["element_hint"].get<std::string>();
        auto& page = corpus.pages[it->second];
        if (j.contains("task") && j["task"].is_string()) {
            const auto task = j["task"].get<std::string>();
            const auto [t, inserted] = task_of.emplace(file, task);
            if (!inserted && t->second != task) invalid(where + "page " + file + " is listed under two tasks");
            page.task = task;
        }
        if (!seen.emplace(page.task, g.category, g.text).second) continue;
        page.gold.push_back(std::move(g));
    }
    // Every gold text has to be findable where it is said to be.
    for (const auto& page : corpus.pages) {
        if (page.gold.empty()) continue;
        const auto snap = parse_snapshot(page.html, "corpus", 0, page.file);
        for (const auto& g : page.gold)
            if (locate(snap, 0, g.text, g.element_hint).empty())
                invalid("gold text not found in " + page.file + ": " + g.text);
    }
    return corpus;
}

std::string_view to_string(Matching m) { return m == Matching::exact ? "exact" : "overlap"; }

std::optional<Matching> parse_matching(std::string_view name) {
    if (name == "exact") return Matching::exact;
    if (name == "overlap") return Matching::overlap;
    return std::nullopt;
}

std::optional<double> CategoryStats::accuracy() const { return ratio(detected, gold); }
std::optional<double> CategoryStats::precision() const { return ratio(correct_predictions, predictions); }

int EvalReport::gold_total() const {
    int n = 0;
    for (const auto& c : categories) n += c.gold;
    return n;
}

int EvalReport::detected_total() const {
    int n = 0;
    for (const auto& c : categories) n += c.detected;
    return n;
}

std::optional<double> EvalReport::accuracy() const { return ratio(detected_total(), gold_total()); }

std::optional<double> EvalReport::precision() const {
    int correct = 0, total = 0;
    for (const auto& c : categories) {
        correct += c.correct_predictions;
        total += c.predictions;
    }
    return ratio(correct, total);
}

EvalReport evaluate(const AnnotatedCorpus& corpus, Detector& detector, Matching matching) {
    if (corpus.pages.empty()) invalid("empty corpus");
    EvalReport report;
    report.detector = std::string(to_string(detector.kind()));
    report.matching = matching;
    report.pages = corpus.pages.size();
    for (const auto c : kAllCategories) {
        auto& row = report.confusion[std::string(to_string(c))];
        for (const auto p : kAllCategories) row[std::string(to_string(p))] = 0;
        row[std::string(kNoneLabel)] = 0;
    }
    auto& none_row = report.confusion[std::string(kNoneLabel)];
    for (const auto p : kAllCategories) none_row[std::string(to_string(p))] = 0;

    // Tasks in order of first appearance.
    std::vector<std::string> tasks;
    for (const auto& p : corpus.pages)
        if (std::find(tasks.begin(), tasks.end(), p.task) == tasks.end()) tasks.push_back(p.task);

    for (const auto& task : tasks) {
        std::vector<std::size_t> pages;
        for (std::size_t i = 0; i < corpus.pages.size(); ++i)
            if (corpus.pages[i].task == task) pages.push_back(i);

        std::vector<InterfaceSnapshot> snaps;
        std::vector<Prediction> preds;
        for (std::size_t k = 0; k < pages.size(); ++k) {
            const auto& page = corpus.pages[pages[k]];
            snaps.push_back(parse_snapshot(page.html, "eval", pages[k], page.file));
            const auto& snap = snaps.back();
            for (const auto& f : detect(snap, detector).findings) {
                auto it = std::find_if(preds.begin(), preds.end(), [&](const Prediction& p) {
                    return p.category == f.category && p.text == f.matched_text;
                });
                if (it == preds.end()) {
                    preds.push_back({f.category, f.matched_text, {}});
                    it = preds.end() - 1;
                }
                const auto* e = snap.find(f.element_id);
                for (std::size_t pos : find_all(e->text, f.matched_text))
                    it->spans.push_back({k, f.element_id, pos, pos + f.matched_text.size()});
            }
        }

        std::vector<GoldItem> golds;
        for (std::size_t i : pages)
            for (const auto& g : corpus.pages[i].gold) {
                GoldItem item{&g, {}};
                for (std::size_t k = 0; k < pages.size(); ++k) {
                    auto spans = locate(snaps[k], k, g.text, g.element_hint);
                    item.spans.insert(item.spans.end(), spans.begin(), spans.end());
                }
                golds.push_back(std::move(item));
            }

        for (const auto& g : golds) {
            auto& stats = report.categories[static_cast<std::size_t>(g.entity->category)];
            ++stats.gold;
            std::string predicted(kNoneLabel);
            bool hit = false;
            for (const auto& p : preds) {
                if (!matches(p, g, matching)) continue;
                if (p.category == g.entity->category) {
                    hit = true;
                    break;
                }
                if (predicted == kNoneLabel) predicted = std::string(to_string(p.category));
            }
            if (hit) {
                ++stats.detected;
                predicted = std::string(to_string(g.entity->category));
            }
            ++report.confusion[std::string(to_string(g.entity->category))][predicted];
        }

        for (const auto& p : preds) {
            auto& stats = report.categories[static_cast<std::size_t>(p.category)];
            ++stats.predictions;
            bool correct = false, touches = false;
            for (const auto& g : golds) {
                if (!matches(p, g, matching)) continue;
                touches = true;
                if (g.entity->category == p.category) correct = true;
            }
            if (correct) ++stats.correct_predictions;
            else ++stats.false_positives;
            if (!touches) ++none_row[std::string(to_string(p.category))];
        }
    }
    return report;
}

LatencyStats measure_latency(const AnnotatedCorpus& corpus, Detector& detector) {
    LatencyStats s;
    for (std::size_t i = 0; i < corpus.pages.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        const auto snap = parse_snapshot(corpus.pages[i].html, "latency", i, corpus.pages[i].file);
        const auto result = detect(snap, detector);
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        (void)result;
        s.per_page_s.push_back(took.count());
    }
    s.pages = s.per_page_s.size();
    if (s.pages == 0) return s;
    std::vector<double> sorted = s.per_page_s;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0;
    for (double v : sorted) sum += v;
    s.mean_s = sum / static_cast<double>(s.pages);
    s.median_s = s.pages % 2 ? sorted[s.pages / 2] : (sorted[s.pages / 2 - 1] + sorted[s.pages / 2]) / 2;
    double var = 0;
    for (double v : sorted) var += (v - s.mean_s) * (v - s.mean_s);
    s.sd_s = std::sqrt(var / static_cast<double>(s.pages));
    s.min_s = sorted.front();
    s.max_s = sorted.back();
    return s;
}

ordered_json to_json(const EvalReport& r) {
    ordered_json j;
    j["detector"] = r.detector;
    j["matching"] = to_string(r.matching);
    j["pages"] = r.pages;
    j["gold_total"] = r.gold_total();
    j["detected_total"] = r.detected_total();
    j["accuracy"] = number_or_null(r.accuracy());
    j["precision"] = number_or_null(r.precision());
    j["categories"] = ordered_json::array();
    for (const auto c : kAllCategories) {
        const auto& s = r.categories[static_cast<std::size_t>(c)];
        ordered_json row;
        row["category"] = to_string(c);
        row["tier"] = to_string(tier_of(c));
        row["gold"] = s.gold;
        row["detected"] = s.detected;
        row["accuracy"] = number_or_null(s.accuracy());
        row["predictions"] = s.predictions;
        row["correct_predictions"] = s.correct_predictions;
        row["false_positives"] = s.false_positives;
        row["precision"] = number_or_null(s.precision());
        j["categories"].push_back(std::move(row));
    }
    ordered_json labels = ordered_json::array();
    for (const auto c : kAllCategories) labels.push_back(to_string(c));
    labels.push_back(kNoneLabel);
    ordered_json rows;
    for (const auto& gold_label : labels) {
        const auto& src = r.confusion.at(gold_label.get<std::string>());
        ordered_json row;
        for (const auto& l : labels) {
            const auto it = src.find(l.get<std::string>());
            if (it != src.end()) row[l.get<std::string>()] = it->second;
        }
        rows[gold_label.get<std::string>()] = std::move(row);
    }
    j["confusion"] = {{"labels", labels}, {"rows", rows}};
    if (r.latency) {
        const auto& l = *r.latency;
        ordered_json lat;
        lat["pages"] = l.pages;
        lat["mean_s"] = l.mean_s;
        lat["median_s"] = l.median_s;
        lat["sd_s"] = l.sd_s;
        lat["min_s"] = l.min_s;
        lat["max_s"] = l.max_s;
        ordered_json refs = ordered_json::array();
        for (const auto& ref : reference_latency()) refs.push_back({{"model", ref.model}, {"seconds_per_page", ref.seconds_per_page}});
        lat["reference"] = refs;
        j["latency"] = std::move(lat);
    }
    return j;
}

namespace {

std::string percent(std::optional<double> v) {
    if (!v) return "-";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f%%", *v * 100.0);
    return buf;
}

std::string pad(std::string s, std::size_t width, bool right = false) {
    if (s.size() >= width) return s;
    return right ? std::string(width - s.size(), ' ') + s : s + std::string(width - s.size(), ' ');
}

} // namespace

std::string format_table(const EvalReport& r) {
    std::ostringstream out;
    const auto& refs = reference_accuracy();
    out << pad("Category", 24) << pad("Tier", 8) << pad("Gold", 6, true) << pad("Found", 7, true)
        << pad("Accuracy", 10, true) << pad("Precision", 11, true) << "  |";
    for (const auto& ref : refs) out << pad(std::string(ref.model), 10, true);
    out << "\n";
    for (const auto c : kAllCategories) {
        const auto& s = r.categories[static_cast<std::size_t>(c)];
        out << pad(std::string(descriptor(c).human_label), 24) << pad(std::string(to_string(tier_of(c))), 8)
            << pad(std::to_string(s.gold), 6, true) << pad(std::to_string(s.detected), 7, true)
            << pad(percent(s.accuracy()), 10, true) << pad(percent(s.precision()), 11, true) << "  |";
        for (const auto& ref : refs) out << pad(percent(ref.per_category[static_cast<std::size_t>(c)] / 100.0), 10, true);
        out << "\n";
    }
    out << pad("Avg.", 32) << pad(std::to_string(r.gold_total()), 6, true) << pad(std::to_string(r.detected_total()), 7, true)
        << pad(percent(r.accuracy()), 10, true) << pad(percent(r.precision()), 11, true) << "  |";
    for (const auto& ref : refs) out << pad(percent(ref.average / 100.0), 10, true);
    out << "\n";
    if (r.latency) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "\nLatency (s/page, %s): median %.4f  mean %.4f  sd %.4f  over %zu pages\n",
                      r.detector.c_str(), r.latency->median_s, r.latency->mean_s, r.latency->sd_s, r.latency->pages);
        out << buf << "Reference (s/page):";
        for (const auto& ref : reference_latency()) {
            std::snprintf(buf, sizeof buf, "  %s %.2f", std::string(ref.model).c_str(), ref.seconds_per_page);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

// Published figures for locally hosted and API models, schema order. Shown for
// context only; the corpus behind them is not available.
const std::vector<ReferenceAccuracy>& reference_accuracy() {
    static const std::vector<ReferenceAccuracy> rows = {
        {"gpt-4o", {77.8, 100.0, 83.3, 100.0, 82.2, 76.3, 100.0, 76.9, 100.0, 100.0, 100.0, 100.0, 74.3}, 82.1},
        {"qwen3-8b", {75.0, 100.0, 85.7, 92.9, 72.5, 71.1, 100.0, 63.0, 100.0, 83.3, 100.0, 100.0, 70.7}, 75.4},
        {"qwen3-4b", {70.0, 75.0, 78.6, 87.5, 41.7, 52.1, 61.8, 52.4, 80.0, 75.0, 83.3, 75.3, 54.6}, 58.9},
    };
    return rows;
}

const std::vector<ReferenceLatency>& reference_latency() {
    static const std::vector<ReferenceLatency> rows = {
        {"deepseek-7b", 8.52}, {"qwen3-8b", 6.42}, {"qwen3-4b", 4.05}, {"qwen3-1.7b", 2.86}};
    return rows;
}

} // namespace pagegate
