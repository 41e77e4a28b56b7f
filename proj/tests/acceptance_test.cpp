// Acceptance suite: runs every acceptance criterion at its stated bound and
// prints one pass/fail line per criterion. Exits nonzero on any failure.
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "property_suites.hpp"
#include "ptdmon/benchgen.hpp"
#include "ptdmon/io.hpp"
#include "ptdmon/model.hpp"
#include "ptdmon/monitor.hpp"
#include "ptdmon/oracle.hpp"

using namespace ptdmon;
using Clock = std::chrono::steady_clock;

namespace {

struct Context {
    std::string specs;
    std::string cli;
    std::string tmp;
    int failures = 0;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

model::Ptda load_spec(const Context& ctx, const std::string& name) {
    return io::parse_spec(read_file(ctx.specs + "/" + name));
}

model::TimedDataWord load_log(const Context& ctx, const model::Ptda& ptda, const std::string& name) {
    std::ifstream in(ctx.specs + "/" + name);
    return io::parse_log(in, ptda);
}

int run_cli(const Context& ctx, const std::string& args) {
    int rc = std::system((ctx.cli + " " + args).c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

void report(Context& ctx, const std::string& label, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " " << label << ": " << detail << "\n";
    std::cout.flush();
    if (!pass) ++ctx.failures;
}

void report(Context& ctx, int criterion, bool pass, const std::string& detail) {
    report(ctx, "criterion-" + std::to_string(criterion), pass, detail);
}

monitor::ValidityDomain run_monitor(const model::Ptda& ptda, const model::TimedDataWord& word,
                                    bool merging) {
    monitor::MonitorOptions options;
    options.merging = merging;
    monitor::Monitor mon(ptda, options);
    for (const auto& ev : word) mon.step(ev);
    mon.finalize();
    return mon.result();
}

monitor::ValidityDomain copy_expected_domain(const model::Ptda& copy) {
    monitor::ValidityDomain expected;
    auto tp = *copy.dim_id("tp");
    auto block = [&](const char* value, Rational hi) {
        return monitor::Block{
            poly::Polyhedron::universe(copy.tp_dims())
                .intersect({poly::LinearAtom::cmp(tp, poly::Rel::Ge, 0),
                            poly::LinearAtom::cmp(tp, poly::Rel::Le, hi)}),
            {{"px", strdom::StringParamConstraint::equals(value)}},
            poly::Polyhedron::universe(copy.vp_dims())};
    };
    expected.add(block("c", 2));
    expected.add(block("a", 1));
    return expected;
}

// ---------------------------------------------------------------------------

void criterion_1(Context& ctx, bool no_merge, int number) {
    auto copy = load_spec(ctx, "copy.spec");
    std::string flags = no_merge ? " --no-merge" : "";
    std::string json_path = ctx.tmp + "/copy_domain.json";
    std::string text_path = ctx.tmp + "/copy_domain.txt";
    auto t0 = Clock::now();
    int rc = run_cli(ctx, "monitor -f " + ctx.specs + "/copy.spec -i " + ctx.specs +
                              "/fig1a.log --format json -o " + json_path + flags);
    double wall = seconds_since(t0);
    int rc2 = run_cli(ctx, "monitor -f " + ctx.specs + "/copy.spec -i " + ctx.specs +
                               "/fig1a.log -o " + text_path + flags);
    bool ok = rc == 0 && rc2 == 0;
    std::string detail;
    if (ok) {
        auto domain = io::parse_domain_json(read_file(json_path), copy);
        auto expected = copy_expected_domain(copy);
        bool fwd = monitor::domain_includes(copy, expected, domain);
        bool bwd = monitor::domain_includes(copy, domain, expected);
        std::string text = read_file(text_path);
        std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
        ok = fwd && bwd && wall < 1.0 && lines == 2;
        std::ostringstream os;
        os << "copy monitor on the worked-example log" << (no_merge ? " (--no-merge)" : "")
           << ": domain == {px=c, 0<=tp<=2} u {px=a, 0<=tp<=1} exactly (covered=" << fwd
           << " covering=" << bwd << "), " << lines << " output blocks, wall " << wall << "s < 1s";
        detail = os.str();
    } else {
        detail = "cli exited with " + std::to_string(rc) + "/" + std::to_string(rc2);
    }
    report(ctx, number, ok, detail);
}

void criterion_2(Context& ctx, bool merging, int number) {
    auto file = load_spec(ctx, "file.spec");
    auto word = load_log(ctx, file, "fig2a.log");
    auto domain = run_monitor(file, word, merging);
    std::map<std::string, model::Value> zeta{{"vp", std::string("Hakuchi.txt")}};
    bool in100 = monitor::domain_contains(file, domain, {{"tp", 100}}, zeta);
    bool in130 = monitor::domain_contains(file, domain, {{"tp", 130}}, zeta);
    bool dec100 = oracle::decide(file, {{"tp", 100}}, zeta, word);
    bool dec130 = oracle::decide(file, {{"tp", 130}}, zeta, word);
    bool ok = in100 && dec100 && !in130 && !dec130;
    std::ostringstream os;
    os << "file monitor membership" << (merging ? "" : " (no merge)")
       << ": tp=100 inside (monitor=" << in100 << " oracle=" << dec100
       << "), tp=130 outside (monitor=" << !in130 << " oracle=" << !dec130 << ")";
    report(ctx, number, ok, os.str());
}

struct EquivalenceResult {
    std::size_t points = 0;
    std::size_t disagreements = 0;
};

EquivalenceResult check_equivalence(const model::Ptda& ptda, const model::TimedDataWord& word,
                                    bool merging, std::uint64_t seed) {
    auto domain = run_monitor(ptda, word, merging);
    auto points = oracle::sample_grid(domain, ptda, {seed, 200});
    EquivalenceResult res;
    res.points = points.size();
    for (const auto& pt : points) {
        bool concrete = oracle::decide(ptda, pt.timing, pt.data, word);
        if (concrete != pt.inside) ++res.disagreements;
    }
    return res;
}

void criterion_3(Context& ctx, bool merging, int number) {
    auto t0 = Clock::now();
    std::size_t total_points = 0, total_disagreements = 0;
    std::ostringstream os;
    struct Bench {
        const char* spec;
        benchgen::Benchmark kind;
    };
    const Bench benches[] = {{"copy.spec", benchgen::Benchmark::Copy},
                             {"dominant.spec", benchgen::Benchmark::Dominant},
                             {"periodic.spec", benchgen::Benchmark::Periodic}};
    for (const auto& bench : benches) {
        auto ptda = load_spec(ctx, bench.spec);
        for (std::size_t length : {50, 100, 200}) {
            benchgen::GenConfig cfg;
            cfg.benchmark = bench.kind;
            cfg.length = length;
            cfg.seed = 1000 + length;
            auto word = benchgen::generate(cfg);
            auto res = check_equivalence(ptda, word, merging, 31 + length);
            total_points += res.points;
            total_disagreements += res.disagreements;
            if (res.disagreements)
                os << " [" << bench.spec << " n=" << length << ": " << res.disagreements
                   << " disagreements]";
        }
    }
    double wall = seconds_since(t0);
    bool ok = total_disagreements == 0 && wall < 600.0;
    std::ostringstream head;
    head << "symbolic monitor vs concrete oracle" << (merging ? "" : " (no merge)") << ": "
         << total_points << " sampled parameter points across 9 generated logs, "
         << total_disagreements << " disagreements, wall " << wall << "s < 600s" << os.str();
    report(ctx, number, ok, head.str());
}

struct StatsLine {
    double wall = -1;
    double peak = -1;
};

StatsLine parse_stats(const std::string& path) {
    StatsLine out;
    std::istringstream in(read_file(path));
    std::string token;
    while (in >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        std::string key = token.substr(0, eq), value = token.substr(eq + 1);
        if (key == "wall_s") out.wall = std::stod(value);
        if (key == "peak_confs") out.peak = std::stod(value);
    }
    return out;
}

void criterion_4(Context& ctx) {
    auto gen_to = [&](std::size_t length, const std::string& path) {
        benchgen::GenConfig cfg;
        cfg.benchmark = benchgen::Benchmark::Dominant;
        cfg.length = length;
        cfg.seed = 7;
        std::ofstream out(path);
        for (const auto& ev : benchgen::generate(cfg)) out << io::render_event(ev) << "\n";
    };
    std::string small_log = ctx.tmp + "/dominant_2k.log", big_log = ctx.tmp + "/dominant_20k.log";
    gen_to(2000, small_log);
    gen_to(20000, big_log);
    auto run = [&](const std::string& log, const std::string& stats) {
        return run_cli(ctx, "monitor -f " + ctx.specs + "/dominant.spec -i " + log +
                                " --online --stats -o /dev/null 2> " + stats);
    };
    int rc1 = run(small_log, ctx.tmp + "/stats_2k.txt");
    int rc2 = run(big_log, ctx.tmp + "/stats_20k.txt");
    StatsLine small = parse_stats(ctx.tmp + "/stats_2k.txt");
    StatsLine big = parse_stats(ctx.tmp + "/stats_20k.txt");
    bool ok = rc1 == 0 && rc2 == 0 && small.wall > 0 && big.wall > 0 && small.peak > 0 &&
              big.peak > 0 && small.wall <= 120.0 && big.wall / small.wall <= 20.0 &&
              big.peak / small.peak <= 2.0;
    std::ostringstream os;
    os << "dominant scaling shape: 2k events in " << small.wall << "s <= 120s, time ratio "
       << (small.wall > 0 ? big.wall / small.wall : -1) << " <= 20, peak configurations "
       << small.peak << " -> " << big.peak << " (ratio "
       << (small.peak > 0 ? big.peak / small.peak : -1) << " <= 2)";
    report(ctx, 4, ok, os.str());
}

void criterion_5(Context& ctx) {
    // Criteria 1-3 again with merging disabled; they report under this number.
    criterion_1(ctx, /*no_merge=*/true, 5);
    criterion_2(ctx, /*merging=*/false, 5);
    criterion_3(ctx, /*merging=*/false, 5);
    // Merging never increases the configuration count on periodic logs.
    auto periodic = load_spec(ctx, "periodic.spec");
    benchgen::GenConfig cfg;
    cfg.benchmark = benchgen::Benchmark::Periodic;
    cfg.length = 300;
    cfg.seed = 11;
    auto word = benchgen::generate(cfg);
    std::size_t peaks[2] = {0, 0};
    for (int merging = 0; merging < 2; ++merging) {
        monitor::MonitorOptions options;
        options.merging = merging == 1;
        monitor::Monitor mon(periodic, options);
        for (const auto& ev : word) mon.step(ev);
        mon.finalize();
        peaks[merging] = mon.peak_configurations();
    }
    bool ok = peaks[1] <= peaks[0];
    std::ostringstream os;
    os << "periodic peak configurations with merging " << peaks[1] << " <= " << peaks[0]
       << " without";
    report(ctx, 5, ok, os.str());
}

void criterion_6(Context& ctx) {
    struct Suite {
        const char* name;
        suites::Outcome outcome;
    };
    auto t0 = Clock::now();
    const Suite all[] = {
        {"projection-soundness", suites::projection_soundness(101, 1000)},
        {"emptiness", suites::emptiness_vs_vertices(102, 1000)},
        {"reset-idempotence", suites::reset_idempotent(103, 1000)},
        {"elapse-monotonicity", suites::elapse_monotone(104, 1000)},
        {"merge-exactness", suites::merge_exactness(105, 1000)},
        {"strdom-small-universe", suites::strdom_small_universe(106, 500)},
    };
    bool ok = true;
    std::ostringstream os;
    os << "randomized property suites:";
    for (const auto& s : all) {
        ok = ok && s.outcome.ok();
        os << " " << s.name << "=" << (s.outcome.cases - s.outcome.failures.size()) << "/"
           << s.outcome.cases;
        for (const auto& f : s.outcome.failures) std::cerr << s.name << ": " << f << "\n";
    }
    os << ", wall " << seconds_since(t0) << "s";
    report(ctx, 6, ok, os.str());
}

// Unnumbered command-line contract checks: exit codes, the check subcommand's
// verdict strings, online/offline block-set agreement, flat streaming memory.
void interface_checks(Context& ctx) {
    bool ok = true;
    std::ostringstream os;
    int missing = run_cli(ctx, "monitor -f " + ctx.tmp + "/no_such.spec 2> /dev/null");
    ok = ok && missing == 1;
    os << "missing spec exits " << missing << ",";
    std::string bad_spec = ctx.tmp + "/bad.spec";
    {
        std::ofstream out(bad_spec);
        out << R"({"actions": [], "locations": ["l0"], "initial": "l0",
                   "edges": [{"source": "l0", "target": "l0", "action": "eps"}]})";
    }
    int invalid = run_cli(ctx, "validate -f " + bad_spec + " 2> /dev/null > /dev/null");
    ok = ok && invalid == 2;
    os << " invalid spec exits " << invalid << ",";
    int inside_rc = run_cli(ctx, "check -f " + ctx.specs + "/copy.spec -i " + ctx.specs +
                                     "/fig1a.log -p tp=3/2 -p px=c > " + ctx.tmp + "/verdict.txt");
    std::string verdict = read_file(ctx.tmp + "/verdict.txt");
    ok = ok && inside_rc == 0 && verdict == "inside\n";
    os << " check verdict '" << verdict.substr(0, verdict.find('\n')) << "',";

    // The streamed blocks (prefix stripped) form the same set as the stored run.
    std::string online_path = ctx.tmp + "/copy_online.txt";
    run_cli(ctx, "monitor -f " + ctx.specs + "/copy.spec -i " + ctx.specs + "/fig1a.log --online -o " +
                     online_path);
    std::set<std::string> streamed;
    {
        std::istringstream in(read_file(online_path));
        std::string line;
        while (std::getline(in, line)) {
            auto sp = line.find("] ");
            if (sp != std::string::npos) streamed.insert(line.substr(sp + 2));
        }
    }
    auto copy = load_spec(ctx, "copy.spec");
    auto word = load_log(ctx, copy, "fig1a.log");
    auto domain = run_monitor(copy, word, true);
    std::set<std::string> stored;
    for (const auto& b : domain.blocks()) stored.insert(io::render_block(b, copy));
    ok = ok && streamed == stored;
    os << " online block set " << (streamed == stored ? "==" : "!=") << " stored (" << streamed.size()
       << " blocks),";

    // Streaming keeps memory flat between the 2k and 20k scale runs.
    auto rss_of = [&](const std::string& path) {
        std::istringstream in(read_file(path));
        std::string token;
        double rss = -1;
        while (in >> token)
            if (token.rfind("rss_kib=", 0) == 0) rss = std::stod(token.substr(8));
        return rss;
    };
    double rss2k = rss_of(ctx.tmp + "/stats_2k.txt");
    double rss20k = rss_of(ctx.tmp + "/stats_20k.txt");
    ok = ok && rss2k > 0 && rss20k > 0 && rss20k / rss2k <= 2.0;
    os << " rss " << rss2k << " -> " << rss20k << " KiB (ratio " << (rss2k > 0 ? rss20k / rss2k : -1)
       << " <= 2)";
    report(ctx, "interface", ok, "command-line contract:" + os.str());
}

void criterion_7(Context& ctx) {
    auto [loop_ptda, loop_diags] = io::parse_spec_checked(R"({
        "actions": [{"name": "a", "params": []}],
        "locations": ["l0"], "initial": "l0",
        "edges": [{"source": "l0", "target": "l0", "action": "eps"}]
    })");
    bool loop_rejected = !loop_ptda.has_value();
    std::string loop_rule;
    for (const auto& d : loop_diags)
        if (d.rule == "unobservable-cycle") loop_rule = d.rule;

    auto [scope_ptda, scope_diags] = io::parse_spec_checked(R"({
        "actions": [{"name": "a", "params": []},
                    {"name": "b", "params": [{"name": "v", "sort": "number"}]}],
        "variables": [{"name": "w", "sort": "number", "init": 0}],
        "locations": ["l0"], "initial": "l0",
        "edges": [{"source": "l0", "target": "l0", "action": "a", "data_guard": ["w < v"]}]
    })");
    bool scope_rejected = !scope_ptda.has_value();
    std::string scope_rule;
    for (const auto& d : scope_diags)
        if (d.rule == "guard-local-scope") scope_rule = d.rule;

    bool ok = loop_rejected && loop_rule == "unobservable-cycle" && scope_rejected &&
              scope_rule == "guard-local-scope";
    std::ostringstream os;
    os << "well-formedness diagnostics: unobservable self-loop -> [" << loop_rule
       << "], out-of-signature guard local -> [" << scope_rule << "]";
    report(ctx, 7, ok, os.str());
}

}  // namespace

int main(int argc, char** argv) {
    Context ctx;
    ctx.specs = "specs";
    ctx.tmp = "/tmp";
    for (int i = 1; i + 1 < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--specs") ctx.specs = argv[++i];
        if (arg == "--cli") ctx.cli = argv[++i];
        if (arg == "--tmp") ctx.tmp = argv[++i];
    }
    if (ctx.cli.empty()) {
        std::cerr << "usage: acceptance --specs <dir> --cli <ptdmon binary> [--tmp <dir>]\n";
        return 2;
    }
    try {
        criterion_1(ctx, /*no_merge=*/false, 1);
        criterion_2(ctx, /*merging=*/true, 2);
        criterion_3(ctx, /*merging=*/true, 3);
        criterion_4(ctx);
        criterion_5(ctx);
        criterion_6(ctx);
        criterion_7(ctx);
        interface_checks(ctx);
    } catch (const std::exception& e) {
        std::cout << "FAIL: unexpected error: " << e.what() << "\n";
        return 1;
    }
    std::cout << (ctx.failures == 0 ? "all criteria passed" : "criteria failed") << "\n";
    return ctx.failures == 0 ? 0 : 1;
}
