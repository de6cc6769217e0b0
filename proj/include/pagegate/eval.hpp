#pragma once

#include "pagegate/detection.hpp"
#include "pagegate/pii_schema.hpp"

#include "json.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pagegate {

struct GoldEntity {
    PiiCategory category = PiiCategory::name;
    std::string text;
    std::optional<std::string> element_hint;   // dom_path
};

struct CorpusPage {
    std::string file;
    std::string task;                // pages of one task share gold identity
    std::string html;
    std::vector<GoldEntity> gold;    // after per-task deduplication
};

struct AnnotatedCorpus {
    std::vector<CorpusPage> pages;
    std::map<PiiCategory, int> counts() const;
};

// Directory of .html pages plus gold.jsonl lines
// {"file","category","text","element_hint"?, "task"?}. A (task, category, text)
// triple is kept once; task defaults to the file name.
// Throws Error{corpus_invalid}.
AnnotatedCorpus load_corpus(const std::filesystem::path& dir);

enum class Matching { exact, overlap };
std::string_view to_string(Matching m);
std::optional<Matching> parse_matching(std::string_view name);

inline constexpr std::string_view kNoneLabel = "none";

struct CategoryStats {
    int gold = 0;
    int detected = 0;              // gold entities found with the right category
    int predictions = 0;           // unique (task, category, text) predictions
    int correct_predictions = 0;   // predictions matching some gold of their category
    int false_positives = 0;

    std::optional<double> accuracy() const;
    std::optional<double> precision() const;
};

struct LatencyStats {
    std::size_t pages = 0;
    double mean_s = 0;
    double median_s = 0;
    double sd_s = 0;   // population standard deviation
    double min_s = 0;
    double max_s = 0;
    std::vector<double> per_page_s;
};

struct EvalReport {
    std::string detector;
    Matching matching = Matching::overlap;
    std::size_t pages = 0;
    std::array<CategoryStats, kCategoryCount> categories{};
    // confusion[gold category][predicted label]; predicted label is a category
    // name or "none". The extra gold row "none" counts predictions that touch
    // no gold entity at all.
    std::map<std::string, std::map<std::string, int>> confusion;
    std::optional<LatencyStats> latency;

    int gold_total() const;
    int detected_total() const;
    std::optional<double> accuracy() const;    // micro average
    std::optional<double> precision() const;   // micro average
};

// Throws Error{corpus_invalid} for an empty corpus.
EvalReport evaluate(const AnnotatedCorpus& corpus, Detector& detector, Matching matching = Matching::overlap);

// Wall clock of parse + detect per page.
LatencyStats measure_latency(const AnnotatedCorpus& corpus, Detector& detector);

// Deterministic for a deterministic detector; latency only when measured.
nlohmann::ordered_json to_json(const EvalReport& report);

// Aligned per-category table with published reference figures beside ours.
std::string format_table(const EvalReport& report);

struct ReferenceAccuracy {
    std::string_view model;
    std::array<double, kCategoryCount> per_category;   // schema order
    double average;
};
const std::vector<ReferenceAccuracy>& reference_accuracy();

struct ReferenceLatency {
    std::string_view model;
    double seconds_per_page;
};
const std::vector<ReferenceLatency>& reference_latency();

} // namespace pagegate
