// Acceptance suite: one PASS/FAIL line per headline criterion. Exit status is
// nonzero when any criterion fails.

#include "pagegate/clock.hpp"
#include "pagegate/eval.hpp"
#include "pagegate/gateway.hpp"
#include "pagegate/pii_schema.hpp"
#include "pagegate/replay.hpp"
#include "pagegate/rules_detector.hpp"
#include "pagegate/session.hpp"
#include "pagegate/wire.hpp"
#include "support/eval_fixture.hpp"
#include "support/fixtures.hpp"
#include "support/random_html.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pagegate;
using namespace pagegate::testing;
namespace fs = std::filesystem;
using Wall = std::chrono::steady_clock;

namespace {

const fs::path kData = fs::path(PAGEGATE_TEST_DATA) / "data";
const fs::path kCorpus = fs::path(PAGEGATE_SOURCE_DIR) / "corpus";

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 5) failures.push_back(what);
    }
};

double seconds_since(Wall::time_point t0) { return std::chrono::duration<double>(Wall::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ── Redaction completeness ───────────────────────────────────────────────────

// Every served serialization of >=1000 random documents is scanned for the
// text of every finding the user did not allow. Half the documents go through
// the rules detector, half through a detector that reports exactly the planted
// items; a random subset of findings is allowed.
Outcome redaction_completeness() {
    Outcome o;
    const auto t0 = Wall::now();
    RandomHtml gen(7100);
    std::mt19937 rng(99);
    RulesDetector rules;
    ManualClock clock;
    constexpr int kDocs = 1000;
    std::size_t scanned = 0;
    for (int i = 0; i < kDocs; ++i) {
        const auto doc = gen.generate();
        ScriptedDetector scripted;
        for (const auto& p : doc.planted) scripted.items.emplace_back(*parse_category(p.category), p.text);
        Detector& det = i % 2 ? static_cast<Detector&>(scripted) : static_cast<Detector&>(rules);
        SessionCore core("acc", {}, det, clock);
        try {
            core.ingest({doc.html, "https://example.test/", {}});
        } catch (const Error& e) {
            o.expect(false, "doc " + std::to_string(i) + ": ingest threw " + std::string(to_string(e.code())));
            continue;
        }
        std::set<std::string> allowed;
        for (const auto& f : core.latest_findings()) {
            if (rng() % 3 != 0) continue;
            if (core.decide(f.finding_id, Action::allow) == ResolveResult::applied) allowed.insert(f.matched_text);
        }
        core.expire_all();
        std::vector<std::string> forbidden;
        for (const auto& f : core.latest_findings())
            if (!allowed.count(f.matched_text)) forbidden.push_back(f.matched_text);
        for (const auto format : {SnapshotFormat::html, SnapshotFormat::element_list}) {
            const auto body = core.emit(format).body;
            for (const auto& text : forbidden) {
                // An allowed text may itself contain a forbidden one.
                bool inside_allowed = false;
                for (const auto& a : allowed) inside_allowed = inside_allowed || a.find(text) != std::string::npos;
                if (inside_allowed) continue;
                ++scanned;
                o.expect(body.find(text) == std::string::npos, "doc " + std::to_string(i) + " leaks \"" + text + "\"");
            }
        }
    }
    const double took = seconds_since(t0);
    o.expect(took < 60.0, "took " + fmt("%.1f s", took));
    o.detail = std::to_string(kDocs) + " documents, " + std::to_string(scanned) + " forbidden-text scans, " +
               fmt("%.1f s (limit 60 s)", took);
    return o;
}

// ── Fail-closed policy ───────────────────────────────────────────────────────

enum class Sym { find_high, find_medium, find_low, allow, deny, timeout, detector_error, serve };
constexpr Sym kSymbols[] = {Sym::find_high, Sym::find_medium, Sym::find_low, Sym::allow,
                            Sym::deny,      Sym::timeout,     Sym::detector_error, Sym::serve};

struct World {
    std::vector<std::pair<PiiCategory, std::string>> page;
    int next_item = 0;
    bool outstanding = false;   // an agent request blocked on a pause
    std::set<std::string> allowed, denied;
    std::optional<SessionCore> core;
};

struct Explorer {
    ScriptedDetector det;
    ManualClock clock;
    std::size_t sequences = 0, serves = 0;
    Outcome* o = nullptr;
    std::vector<Sym> path;

    std::string path_text() const {
        static const char* names[] = {"fh", "fm", "fl", "allow", "deny", "timeout", "det_err", "serve"};
        std::string s;
        for (auto p : path) s += std::string(s.empty() ? "" : " ") + names[static_cast<int>(p)];
        return s;
    }

    // The fixed paragraph means every ingest consults the detector; a page
    // with no text never reaches it.
    std::string page_html(const World& w) const {
        std::string h = "<div><p>Inbox</p>";
        for (const auto& [c, t] : w.page) h += "<p>" + t + "</p>";
        return h + "</div>";
    }

    void check_serve(World& w) {
        const auto body = w.core->emit(SnapshotFormat::element_list).body;
        ++serves;
        for (const auto& [c, t] : w.page) {
            if (tier_of(c) != SensitivityTier::high) continue;
            const bool permitted = w.allowed.count(t) && !w.denied.count(t);
            o->expect(permitted || body.find(t) == std::string::npos, "[" + path_text() + "] served \"" + t + "\"");
        }
    }

    void release(World& w) {
        if (w.outstanding && !w.core->paused() && w.core->servable()) {
            w.outstanding = false;
            check_serve(w);
        }
    }

    // Picks the oldest pending item, else the latest notified finding.
    const PiiFinding* target(const World& w) const {
        const auto& findings = w.core->latest_findings();
        const auto& pending = w.core->state().pending;
        if (!pending.empty()) {
            for (const auto& f : findings)
                if (f.finding_id == pending.front().finding_id) return &f;
        }
        return findings.empty() ? nullptr : &findings.back();
    }

    void step(World& w, Sym s) {
        switch (s) {
            case Sym::find_high:
            case Sym::find_medium:
            case Sym::find_low: {
                const int n = w.next_item++;
                if (s == Sym::find_high) w.page.emplace_back(PiiCategory::email, "u" + std::to_string(n) + "@mail.test");
                else if (s == Sym::find_medium) w.page.emplace_back(PiiCategory::name, "Person Q" + std::to_string(n));
                else w.page.emplace_back(PiiCategory::time, "slot T" + std::to_string(n));
                break;
            }
            case Sym::allow:
            case Sym::deny: {
                const auto* f = target(w);
                if (!f) break;
                const std::string text = f->matched_text;
                const auto r = w.core->decide(f->finding_id, s == Sym::allow ? Action::allow : Action::deny);
                if (r == ResolveResult::applied) (s == Sym::allow ? w.allowed : w.denied).insert(text);
                release(w);
                break;
            }
            case Sym::timeout:
                w.core->expire_all();
                release(w);
                break;
            case Sym::detector_error:
                if (w.outstanding) break;   // requests are served one at a time
                det.fail = true;
                try {
                    w.core->ingest({page_html(w), "u", {}});
                    o->expect(false, "[" + path_text() + "] failing detector did not raise");
                } catch (const Error&) {
                }
                det.fail = false;
                o->expect(!w.core->servable(), "[" + path_text() + "] servable after detector failure");
                break;
            case Sym::serve:
                if (w.outstanding) break;
                det.items = w.page;
                w.core->ingest({page_html(w), "u", {}});
                if (w.core->paused()) w.outstanding = true;
                else check_serve(w);
                break;
        }
    }

    void dfs(const World& w, int depth) {
        ++sequences;
        if (depth == 0) return;
        for (const auto s : kSymbols) {
            World next = w;
            next.core.emplace(*w.core);
            path.push_back(s);
            step(next, s);
            dfs(next, depth - 1);
            path.pop_back();
        }
    }
};

Outcome fail_closed() {
    Outcome o;
    const auto t0 = Wall::now();
    Explorer ex;
    ex.o = &o;
    World root;
    root.core.emplace("fsm", CoreOptions{}, ex.det, ex.clock);
    constexpr int kDepth = 6;
    ex.dfs(root, kDepth);
    o.detail = std::to_string(ex.sequences) + " sequences (length <= " + std::to_string(kDepth) + ", 8 symbols), " +
               std::to_string(ex.serves) + " serves checked, " + fmt("%.1f s", seconds_since(t0));
    return o;
}

// ── Schema fidelity ──────────────────────────────────────────────────────────

Outcome schema_fidelity() {
    Outcome o;
    const std::map<std::string, SensitivityTier> table = {
        {"financial_information", SensitivityTier::high}, {"id", SensitivityTier::high},
        {"online_identity", SensitivityTier::high},       {"email", SensitivityTier::high},
        {"name", SensitivityTier::medium},                {"address", SensitivityTier::medium},
        {"phone_number", SensitivityTier::medium},        {"demographic_attribute", SensitivityTier::medium},
        {"health_information", SensitivityTier::medium},  {"geo_location", SensitivityTier::low},
        {"affiliation", SensitivityTier::low},            {"time", SensitivityTier::low},
        {"educational_record", SensitivityTier::low},
    };
    const std::set<std::string> explicit_set = {"financial_information", "id", "online_identity", "email"};
    o.expect(pii_schema().size() == 13, "schema has " + std::to_string(pii_schema().size()) + " categories");
    std::map<SensitivityTier, int> per_tier;
    std::set<std::string> explicit_found;
    for (const auto& d : pii_schema()) {
        const std::string name(to_string(d.category));
        ++per_tier[d.tier];
        const auto it = table.find(name);
        o.expect(it != table.end(), "unexpected category " + name);
        if (it != table.end()) o.expect(it->second == d.tier, "tier of " + name);
        if (requires_explicit_control(d.category)) explicit_found.insert(name);
    }
    o.expect(per_tier[SensitivityTier::high] == 4 && per_tier[SensitivityTier::medium] == 5 &&
                 per_tier[SensitivityTier::low] == 4,
             "tier sizes");
    o.expect(explicit_found == explicit_set, "explicit-control set");
    o.expect(color_of(SensitivityTier::high) == "red" && color_of(SensitivityTier::medium) == "orange" &&
                 color_of(SensitivityTier::low) == "yellow",
             "tier colors");
    o.detail = "4 high / 5 medium / 4 low; explicit control = {financial_information, id, online_identity, email}";
    return o;
}

// ── Rules-detector benchmark ─────────────────────────────────────────────────

Outcome rules_benchmark() {
    Outcome o;
    const auto t0 = Wall::now();
    const auto corpus = load_corpus(kCorpus);
    for (const auto& [c, n] : corpus.counts())
        o.expect(n >= 10, std::string(to_string(c)) + " has only " + std::to_string(n) + " gold entities");
    RulesDetector rules;
    const auto report = evaluate(corpus, rules);
    const auto first = to_json(report).dump();
    const auto second = to_json(evaluate(corpus, rules)).dump();
    o.expect(first == second, "reports differ between runs");
    std::ostringstream d;
    for (const auto c : {PiiCategory::email, PiiCategory::phone_number, PiiCategory::id}) {
        const auto& s = report.categories[static_cast<std::size_t>(c)];
        const double recall = s.accuracy().value_or(0), precision = s.precision().value_or(0);
        o.expect(recall >= 0.90, std::string(to_string(c)) + fmt(" recall %.3f", recall));
        o.expect(precision >= 0.90, std::string(to_string(c)) + fmt(" precision %.3f", precision));
        d << to_string(c) << fmt(" R=%.3f", recall) << fmt(" P=%.3f; ", precision);
    }
    const double overall = report.accuracy().value_or(0);
    o.expect(overall >= 0.70, fmt("overall recall %.3f", overall));
    const double took = seconds_since(t0);
    o.expect(took < 30.0, fmt("took %.1f s", took));
    d << fmt("overall R=%.3f (>= 0.70); ", overall) << report.gold_total() << " gold over " << report.pages
      << " pages; byte-identical; " << fmt("%.2f s (limit 30 s)", took);
    o.detail = d.str();
    return o;
}

// ── Metrics oracle ───────────────────────────────────────────────────────────

Outcome metrics_oracle() {
    Outcome o;
    const auto corpus = load_corpus(eval_fixture_dir() / "corpus");
    auto det = eval_fixture_detector();
    for (const auto m : {Matching::overlap, Matching::exact}) {
        const auto got = confusion_summary(evaluate(corpus, det, m));
        o.expect(got == eval_fixture_expected(m), std::string(to_string(m)) + " matrix differs: " + got.dump());
    }
    RulesDetector rules;
    const auto got = confusion_summary(evaluate(corpus, rules));
    o.expect(got == nlohmann::json::parse(slurp(eval_fixture_dir() / "expected_rules.json")), "rules matrix differs: " + got.dump());
    o.detail = "6 gold entities, 1 category confusion; overlap, exact and rules matrices equal the committed goldens";
    return o;
}

// ── Replay determinism ───────────────────────────────────────────────────────

Outcome replay_determinism() {
    Outcome o;
    const auto a = run_replay(kData / "replay_3step", SessionConfig{});
    const auto b = run_replay(kData / "replay_3step", SessionConfig{});
    o.expect(a.steps.size() == 3, "steps: " + std::to_string(a.steps.size()));
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const auto expected = slurp(kData / "replay_3step/expected/served" / ("step_00" + std::to_string(i + 1) + ".html"));
        o.expect(a.steps[i].body && *a.steps[i].body == expected, "served step " + std::to_string(i + 1));
        o.expect(b.steps[i].body == a.steps[i].body, "second run differs at step " + std::to_string(i + 1));
    }
    std::string kinds;
    for (const auto& line : a.audit) kinds += line["kind"].get<std::string>() + "\n";
    o.expect(kinds == slurp(kData / "replay_3step/expected/audit_kinds.txt"), "audit order:\n" + kinds);
    std::string da, db;
    for (const auto& l : a.audit) da += l.dump() + "\n";
    for (const auto& l : b.audit) db += l.dump() + "\n";
    o.expect(da == db, "audit logs differ between runs");

    // Step 2 carries finding -> pause -> decision(allowed by user) -> snapshot_served.
    std::vector<std::string> step2;
    int served = 0;
    for (const auto& l : a.audit) {
        if (served == 1) step2.push_back(l["kind"].get<std::string>() +
                                         (l["kind"] == "decision" ? ":" + l["payload"]["disposition"].get<std::string>() : ""));
        if (l["kind"] == "snapshot_served") ++served;
    }
    const std::vector<std::string> want = {"snapshot_received", "finding", "finding", "pause", "decision:allowed", "snapshot_served"};
    o.expect(step2 == want, "step 2 order");
    o.detail = "3 steps served as expected; " + std::to_string(a.audit.size()) +
               " audit events, step 2 finding -> pause -> decision -> snapshot_served; byte-identical reruns";
    return o;
}

// ── Latency harness ──────────────────────────────────────────────────────────

Outcome latency_harness() {
    Outcome o;
    const auto corpus = load_corpus(kCorpus);
    RulesDetector rules;
    const auto l = measure_latency(corpus, rules);
    o.expect(l.pages == corpus.pages.size() && l.per_page_s.size() == l.pages, "per-page stats missing");
    o.expect(l.median_s < 0.050, fmt("median %.4f s", l.median_s));
    double ref = 0;
    for (const auto& r : reference_latency())
        if (r.model == "qwen3-8b") ref = r.seconds_per_page;
    o.expect(ref == 6.42, "reference row missing");
    std::ostringstream d;
    d << "rules median " << fmt("%.4f", l.median_s) << " s/page (limit 0.050), mean " << fmt("%.4f", l.mean_s) << ", sd "
      << fmt("%.4f", l.sd_s) << " over " << l.pages << " pages; reference:";
    for (const auto& r : reference_latency()) d << " " << r.model << " " << fmt("%.2f", r.seconds_per_page);
    o.detail = d.str();
    return o;
}

// ── Protocol conformance ─────────────────────────────────────────────────────

Outcome protocol_conformance() {
    Outcome o;
    const auto wire_dir = kData / "wire";
    auto golden = [&](const std::string& file, std::size_t i) {
        const auto lines = lines_of(wire_dir / file);
        return i < lines.size() ? lines[i] : std::string();
    };
    int checked = 0;
    auto same = [&](const std::string& got, const std::string& file, std::size_t i) {
        ++checked;
        o.expect(got == golden(file, i), file + "[" + std::to_string(i) + "]: " + got);
    };

    const auto snap = parse_snapshot("<div>Alice</div>", "s1", 3, "u");
    same(wire::encode(wire::snapshot_message("s1", 3, SnapshotFormat::element_list,
                                             serialize_snapshot(snap, SnapshotFormat::element_list))),
         "snapshot.jsonl", 0);
    same(wire::encode(wire::error_message("protocol", "not valid JSON")), "error.jsonl", 0);
    same(wire::encode(wire::error_message(Error(ErrorCode::session_unknown, "unknown session s9"))), "error.jsonl", 1);

    PiiFinding f;
    f.finding_id = "f0a1b2c3d4e5f607";
    f.element_id = "c3b4e37561fa16b1";
    f.category = PiiCategory::email;
    f.tier = SensitivityTier::high;
    f.matched_text = "a@b.co";
    same(wire::encode(wire::finding_message("s1", f)), "finding.jsonl", 0);
    same(wire::encode(wire::highlight_message("s1", {f.finding_id, f.element_id, f.category, f.tier, std::nullopt, "red", 3000, true})),
         "highlight.jsonl", 0);
    same(wire::encode(wire::highlight_message("s1", {f.finding_id, f.element_id, PiiCategory::time, SensitivityTier::low,
                                                     Rect{10, 20, 300.5, 40}, "yellow", 3000, false})),
         "highlight.jsonl", 1);
    same(wire::encode(wire::pause_message("s1", {"f0a1b2c3d4e5f607"})), "pause.jsonl", 0);
    same(wire::encode(wire::resume_message("s1")), "resume.jsonl", 0);
    SessionState state{"s1"};
    state.zero_timestamps = true;
    nlohmann::ordered_json payload;
    payload["seq"] = 1;
    payload["pending"] = {"f0a1b2c3d4e5f607"};
    same(wire::encode(wire::log_message(to_json(state.record(AuditKind::pause, payload, 1234), "s1"))), "log.jsonl", 0);
    RulesDetector rules;
    ManualClock manual;
    SessionCore core("s1", {}, rules, manual);
    same(wire::encode(wire::sync_message("s1", core.sync_state())), "sync.jsonl", 0);

    // Inbound messages.
    const auto g0 = wire::decode_agent(golden("get_snapshot.jsonl", 0));
    o.expect(std::holds_alternative<wire::GetSnapshot>(g0) && std::get<wire::GetSnapshot>(g0).session == "s1", "get_snapshot[0]");
    const auto g2 = wire::decode_agent(golden("get_snapshot.jsonl", 2));
    o.expect(std::holds_alternative<wire::GetSnapshot>(g2) && !std::get<wire::GetSnapshot>(g2).session, "get_snapshot[2]");
    const auto d0 = wire::decode_ui(golden("decision.jsonl", 0));
    o.expect(std::holds_alternative<wire::UiCommand>(d0) &&
                 std::holds_alternative<wire::DecisionCommand>(std::get<wire::UiCommand>(d0)) &&
                 std::get<wire::DecisionCommand>(std::get<wire::UiCommand>(d0)).action == Action::allow,
             "decision[0]");
    const auto m0 = wire::decode_ui(golden("manual_redact.jsonl", 0));
    o.expect(std::holds_alternative<wire::UiCommand>(m0) &&
                 std::holds_alternative<wire::ManualRedactCommand>(std::get<wire::UiCommand>(m0)),
             "manual_redact[0]");
    checked += 4;
    for (const auto& text : lines_of(wire_dir / "rejects.jsonl")) {
        const auto spec = nlohmann::json::parse(text);
        const auto line = spec["line"].get<std::string>();
        std::string code;
        if (spec.value("agent", false)) {
            const auto r = wire::decode_agent(line);
            if (std::holds_alternative<wire::DecodeError>(r)) code = std::get<wire::DecodeError>(r).code;
        } else {
            const auto r = wire::decode_ui(line);
            if (std::holds_alternative<wire::DecodeError>(r)) code = std::get<wire::DecodeError>(r).code;
        }
        ++checked;
        o.expect(code == spec["code"].get<std::string>(), "reject " + line + " gave '" + code + "'");
    }

    // Fuzzed lines against a live gateway.
    MapDriver driver;
    driver.set("s1", "<div>mail bob@example.org</div><p>Maria Garcia</p>");
    SystemClock clock;
    GatewayOptions opts;
    opts.core.decision_timeout_s = 1;
    opts.poll_ms = 5;
    Gateway gw(opts, rules, driver, clock);
    std::mt19937 rng(4321);
    const std::vector<std::string> seeds = {
        R"({"type":"get_snapshot","session":"s1"})", R"({"type":"decision","finding_id":"x","action":"allow"})",
        R"({"type":"manual_redact","element_id":"y"})", R"({"type":"get_snapshot","format":"html"})", "{}", "[]", "\"\""};
    const std::string noise = std::string("{}[]\":,\\ \x00\x7f\xc3\xa9\xff", 16) + "abcnulltruefalse0123456789-.eE";
    constexpr int kFuzz = 3000;
    for (int i = 0; i < kFuzz; ++i) {
        std::string line = seeds[rng() % seeds.size()];
        const int edits = static_cast<int>(rng() % 6);
        for (int k = 0; k < edits && !line.empty(); ++k) {
            const auto pos = rng() % line.size();
            switch (rng() % 3) {
                case 0: line[pos] = noise[rng() % noise.size()]; break;
                case 1: line.erase(pos, 1); break;
                default: line.insert(pos, 1, noise[rng() % noise.size()]); break;
            }
        }
        try {
            const auto a = nlohmann::json::parse(gw.handle_agent_line(line), nullptr, false);
            o.expect(!a.is_discarded() && (a["type"] == "snapshot" || a["type"] == "error"), "bad agent reply");
            const auto u = gw.handle_ui_line(line);
            o.expect(!u || !nlohmann::json::parse(*u, nullptr, false).is_discarded(), "bad ui reply");
        } catch (const std::exception& e) {
            o.expect(false, std::string("gateway threw: ") + e.what());
        }
    }
    const auto oversized = wire::decode_agent(std::string(wire::kMaxMessageBytes + 1, ' '));
    o.expect(std::holds_alternative<wire::DecodeError>(oversized) && std::get<wire::DecodeError>(oversized).code == "too_large",
             "oversized line");
    o.detail = std::to_string(checked) + " golden checks over 12 message files; " + std::to_string(kFuzz) +
               " fuzzed lines survived";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"redaction completeness", redaction_completeness},
        {"fail-closed policy", fail_closed},
        {"schema fidelity", schema_fidelity},
        {"rules-detector benchmark", rules_benchmark},
        {"metrics oracle", metrics_oracle},
        {"replay determinism", replay_determinism},
        {"latency harness", latency_harness},
        {"protocol conformance", protocol_conformance},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.failures.push_back(std::string("threw: ") + e.what());
        }
        std::printf("%s  %-26s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        for (const auto& f : o.failures) std::printf("      - %s\n", f.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
