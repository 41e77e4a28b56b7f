// Command-line front end: online symbolic monitoring, concrete-point checks,
// benchmark log generation, and specification linting.
#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ptdmon/benchgen.hpp"
#include "ptdmon/io.hpp"
#include "ptdmon/model.hpp"
#include "ptdmon/monitor.hpp"
#include "ptdmon/oracle.hpp"

namespace {

using namespace ptdmon;

constexpr std::size_t kCompactionLimit = 2000;  // skip O(n^2) compaction on huge domains

struct CliError {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{1, "cannot open '" + path + "'"};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

model::Ptda load_spec(const std::string& path) {
    std::string text = read_file(path);
    try {
        return io::parse_spec(text);
    } catch (const io::SpecValidationError& e) {
        throw CliError{2, e.what()};
    } catch (const io::SpecSyntaxError& e) {
        throw CliError{1, path + ": " + e.what()};
    }
}

struct InputStream {
    std::istream* in = nullptr;
    std::ifstream file;
};

void open_input(InputStream& s, const std::string& path) {
    if (path.empty() || path == "-") {
        s.in = &std::cin;
        return;
    }
    s.file.open(path);
    if (!s.file) throw CliError{1, "cannot open '" + path + "'"};
    s.in = &s.file;
}

struct OutputStream {
    std::ostream* out = nullptr;
    std::ofstream file;
};

void open_output(OutputStream& s, const std::string& path) {
    if (path.empty() || path == "-") {
        s.out = &std::cout;
        return;
    }
    s.file.open(path);
    if (!s.file) throw CliError{1, "cannot open '" + path + "'"};
    s.out = &s.file;
}

long max_rss_kib() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return ru.ru_maxrss;
}

int run_monitor(const std::string& spec_path, const std::string& input_path,
                const std::string& output_path, const std::string& format, bool online,
                bool no_merge, bool stats) {
    model::Ptda ptda = load_spec(spec_path);
    InputStream in;
    open_input(in, input_path);
    OutputStream out;
    open_output(out, output_path);

    monitor::MonitorOptions options;
    options.merging = !no_merge;
    options.store_results = !online;
    if (online)
        options.sink = [&](std::size_t index, const monitor::Block& block) {
            *out.out << "[" << index << "] " << io::render_block(block, ptda) << "\n";
            out.out->flush();
        };
    monitor::Monitor mon(ptda, options);

    auto t0 = std::chrono::steady_clock::now();
    std::size_t events = 0;
    io::LogReader reader(*in.in, ptda);
    while (auto ev = reader.next()) {
        mon.step(std::move(*ev));
        ++events;
    }
    mon.finalize();
    auto t1 = std::chrono::steady_clock::now();

    if (!online) {
        const monitor::ValidityDomain& raw = mon.result();
        if (raw.size() <= kCompactionLimit) {
            *out.out << io::render_domain(monitor::minimize_domain(raw), ptda,
                                          format == "json" ? io::DomainFormat::Json
                                                           : io::DomainFormat::Text);
        } else {
            *out.out << io::render_domain(raw, ptda,
                                          format == "json" ? io::DomainFormat::Json
                                                           : io::DomainFormat::Text);
        }
    }
    if (stats) {
        double wall = std::chrono::duration<double>(t1 - t0).count();
        std::cerr << "events=" << events << " wall_s=" << wall
                  << " events_per_s=" << (wall > 0 ? static_cast<double>(events) / wall : 0.0)
                  << " peak_confs=" << mon.peak_configurations() << " blocks=" << mon.blocks_found()
                  << " rss_kib=" << max_rss_kib() << "\n";
    }
    return 0;
}

int run_check(const std::string& spec_path, const std::string& input_path,
              const std::vector<std::string>& bindings) {
    model::Ptda ptda = load_spec(spec_path);
    InputStream in;
    open_input(in, input_path);
    std::map<std::string, Rational> timing;
    std::map<std::string, model::Value> data;
    for (const auto& b : bindings) {
        auto eq = b.find('=');
        if (eq == std::string::npos) throw CliError{1, "binding '" + b + "' is not name=value"};
        std::string name = b.substr(0, eq), value = b.substr(eq + 1);
        bool is_timing = false;
        for (const auto& tp : ptda.timing_params()) is_timing |= tp == name;
        if (is_timing) {
            auto q = parse_rational(value);
            if (!q) throw CliError{1, "timing parameter '" + name + "' needs a rational value"};
            timing[name] = *q;
            continue;
        }
        bool found = false;
        for (const auto& [pname, sort] : ptda.data_params()) {
            if (pname != name) continue;
            found = true;
            if (sort == model::Sort::Number) {
                auto q = parse_rational(value);
                if (!q) throw CliError{1, "data parameter '" + name + "' needs a rational value"};
                data[name] = *q;
            } else {
                if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                    value = value.substr(1, value.size() - 2);
                data[name] = value;
            }
        }
        if (!found) throw CliError{1, "unknown parameter '" + name + "'"};
    }
    model::TimedDataWord word = io::parse_log(*in.in, ptda);
    bool inside = oracle::decide(ptda, timing, data, word);
    std::cout << (inside ? "inside" : "outside") << "\n";
    return 0;
}

int run_gen(const std::string& bench, std::size_t length, std::uint64_t seed,
            const std::string& output_path, unsigned users, long min_amount, long max_amount,
            unsigned max_gap, unsigned echo_delay, unsigned echo_percent) {
    benchgen::GenConfig cfg;
    if (bench == "copy")
        cfg.benchmark = benchgen::Benchmark::Copy;
    else if (bench == "dominant")
        cfg.benchmark = benchgen::Benchmark::Dominant;
    else if (bench == "periodic")
        cfg.benchmark = benchgen::Benchmark::Periodic;
    else
        throw CliError{1, "unknown benchmark '" + bench + "'"};
    cfg.length = length;
    cfg.seed = seed;
    cfg.users = users;
    cfg.min_amount = min_amount;
    cfg.max_amount = max_amount;
    cfg.max_gap = max_gap;
    cfg.max_echo_delay = echo_delay;
    cfg.echo_percent = echo_percent;
    OutputStream out;
    open_output(out, output_path);
    try {
        for (const auto& ev : benchgen::generate(cfg)) *out.out << io::render_event(ev) << "\n";
    } catch (const benchgen::ConfigError& e) {
        throw CliError{1, e.what()};
    }
    return 0;
}

int run_validate(const std::string& spec_path) {
    std::string text = read_file(spec_path);
    std::vector<model::Diagnostic> diags;
    try {
        auto [ptda, d] = io::parse_spec_checked(text);
        diags = std::move(d);
        if (ptda) {
            std::cout << "ok\n";
            return 0;
        }
    } catch (const io::SpecSyntaxError& e) {
        throw CliError{1, spec_path + ": " + e.what()};
    }
    for (const auto& d : diags) std::cerr << "[" << d.rule << "] " << d.message << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Symbolic monitoring of timed data logs against parametric timed data automata"};
    app.require_subcommand(1);

    auto* mon = app.add_subcommand("monitor", "monitor a log and print the validity domain");
    std::string spec_path, input_path, output_path, format = "text";
    bool online = false, no_merge = false, stats = false;
    mon->add_option("-f,--spec", spec_path, "automaton file")->required();
    mon->add_option("-i,--input", input_path, "log file (default: stdin)");
    mon->add_option("-o,--output", output_path, "output file (default: stdout)");
    mon->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    mon->add_flag("--online", online, "print each block as soon as it is found");
    mon->add_flag("--no-merge", no_merge, "disable configuration merging");
    mon->add_flag("--stats", stats, "print a one-line run summary to stderr");

    auto* chk = app.add_subcommand("check", "decide membership of one parameter valuation");
    std::string c_spec, c_input;
    std::vector<std::string> c_bindings;
    chk->add_option("-f,--spec", c_spec, "automaton file")->required();
    chk->add_option("-i,--input", c_input, "log file (default: stdin)");
    chk->add_option("-p,--param", c_bindings, "parameter binding name=value (repeatable)");

    auto* gen = app.add_subcommand("gen", "generate a benchmark log");
    std::string g_bench, g_output;
    std::size_t g_length = 100;
    std::uint64_t g_seed = 0;
    unsigned g_users = 3, g_gap = 5, g_echo_delay = 3, g_echo_percent = 90;
    long g_min_amount = 1, g_max_amount = 100;
    gen->add_option("-b,--benchmark", g_bench, "copy, dominant, or periodic")->required();
    gen->add_option("-n,--length", g_length, "number of events");
    gen->add_option("-s,--seed", g_seed, "generator seed");
    gen->add_option("-o,--output", g_output, "output file (default: stdout)");
    gen->add_option("--users", g_users, "dominant: number of users");
    gen->add_option("--min-amount", g_min_amount, "dominant: smallest amount");
    gen->add_option("--max-amount", g_max_amount, "dominant: largest amount");
    gen->add_option("--max-gap", g_gap, "copy: largest gap between base updates");
    gen->add_option("--echo-delay", g_echo_delay, "copy: largest copy-to-b delay");
    gen->add_option("--echo-percent", g_echo_percent, "copy: echo probability in percent");

    auto* val = app.add_subcommand("validate", "check an automaton for well-formedness");
    std::string v_spec;
    val->add_option("-f,--spec", v_spec, "automaton file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(mon))
            return run_monitor(spec_path, input_path, output_path, format, online, no_merge, stats);
        if (app.got_subcommand(chk)) return run_check(c_spec, c_input, c_bindings);
        if (app.got_subcommand(gen))
            return run_gen(g_bench, g_length, g_seed, g_output, g_users, g_min_amount, g_max_amount,
                           g_gap, g_echo_delay, g_echo_percent);
        return run_validate(v_spec);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const model::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const io::SpecSyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
