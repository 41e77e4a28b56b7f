// Python bindings: thin string-oriented wrappers over the monitoring core.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ptdmon/benchgen.hpp"
#include "ptdmon/io.hpp"
#include "ptdmon/model.hpp"
#include "ptdmon/monitor.hpp"
#include "ptdmon/oracle.hpp"

namespace py = pybind11;
using namespace ptdmon;

namespace {

io::DomainFormat format_of(const std::string& fmt) {
    if (fmt == "text") return io::DomainFormat::Text;
    if (fmt == "json") return io::DomainFormat::Json;
    throw model::InputError("format must be 'text' or 'json'");
}

void split_bindings(const model::Ptda& ptda, const std::map<std::string, std::string>& bindings,
                    std::map<std::string, Rational>& timing,
                    std::map<std::string, model::Value>& data) {
    for (const auto& [name, value] : bindings) {
        bool is_timing = false;
        for (const auto& tp : ptda.timing_params()) is_timing |= tp == name;
        if (is_timing) {
            timing[name] = parse_rational_or_throw(value);
            continue;
        }
        bool found = false;
        for (const auto& [pname, sort] : ptda.data_params()) {
            if (pname != name) continue;
            found = true;
            if (sort == model::Sort::Number)
                data[name] = parse_rational_or_throw(value);
            else
                data[name] = value;
        }
        if (!found) throw model::InputError("unknown parameter '" + name + "'");
    }
}

// Owns the automaton the monitor references.
class PyMonitor {
public:
    PyMonitor(const std::string& spec_text, bool merging, bool store)
        : ptda_(io::parse_spec(spec_text)) {
        monitor::MonitorOptions options;
        options.merging = merging;
        options.store_results = store;
        mon_.emplace(ptda_, options);
    }

    std::vector<std::string> feed(const std::string& text) {
        std::istringstream in(text);
        io::LogReader reader(in, ptda_);
        std::vector<std::string> out;
        while (auto ev = reader.next())
            for (const auto& block : mon_->step(std::move(*ev)))
                out.push_back(io::render_block(block, ptda_));
        return out;
    }

    std::vector<std::string> finish() {
        std::vector<std::string> out;
        for (const auto& block : mon_->finalize()) out.push_back(io::render_block(block, ptda_));
        return out;
    }

    std::string domain(const std::string& fmt, bool compact) const {
        const auto& raw = mon_->result();
        if (compact && raw.size() <= 2000)
            return io::render_domain(monitor::minimize_domain(raw), ptda_, format_of(fmt));
        return io::render_domain(raw, ptda_, format_of(fmt));
    }

    bool contains(const std::map<std::string, std::string>& bindings) const {
        std::map<std::string, Rational> timing;
        std::map<std::string, model::Value> data;
        split_bindings(ptda_, bindings, timing, data);
        return monitor::domain_contains(ptda_, mon_->result(), timing, data);
    }

    py::dict stats() const {
        py::dict d;
        d["events"] = mon_->event_index();
        d["peak_configurations"] = mon_->peak_configurations();
        d["blocks"] = mon_->blocks_found();
        d["finalized"] = mon_->finalized();
        return d;
    }

private:
    model::Ptda ptda_;
    std::optional<monitor::Monitor> mon_;
};

std::string monitor_log(const std::string& spec_text, const std::string& log_text, bool merging,
                        const std::string& fmt, bool compact) {
    PyMonitor mon(spec_text, merging, /*store=*/true);
    mon.feed(log_text);
    mon.finish();
    return mon.domain(fmt, compact);
}

bool check_point(const std::string& spec_text, const std::string& log_text,
                 const std::map<std::string, std::string>& bindings) {
    auto ptda = io::parse_spec(spec_text);
    std::istringstream in(log_text);
    auto word = io::parse_log(in, ptda);
    std::map<std::string, Rational> timing;
    std::map<std::string, model::Value> data;
    split_bindings(ptda, bindings, timing, data);
    return oracle::decide(ptda, timing, data, word);
}

std::string generate_log(const std::string& benchmark, std::size_t length, std::uint64_t seed) {
    benchgen::GenConfig cfg;
    if (benchmark == "copy")
        cfg.benchmark = benchgen::Benchmark::Copy;
    else if (benchmark == "dominant")
        cfg.benchmark = benchgen::Benchmark::Dominant;
    else if (benchmark == "periodic")
        cfg.benchmark = benchgen::Benchmark::Periodic;
    else
        throw model::InputError("unknown benchmark '" + benchmark + "'");
    cfg.length = length;
    cfg.seed = seed;
    std::string out;
    for (const auto& ev : benchgen::generate(cfg)) out += io::render_event(ev) + "\n";
    return out;
}

std::vector<std::string> validate(const std::string& spec_text) {
    auto [ptda, diags] = io::parse_spec_checked(spec_text);
    (void)ptda;
    std::vector<std::string> out;
    for (const auto& d : diags) out.push_back("[" + d.rule + "] " + d.message);
    return out;
}

std::string minimize(const std::string& spec_text, const std::string& domain_json) {
    auto ptda = io::parse_spec(spec_text);
    auto vd = io::parse_domain_json(domain_json, ptda);
    return io::render_domain(monitor::minimize_domain(vd), ptda, io::DomainFormat::Json);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Symbolic monitoring of timed data logs against parametric timed data automata";

    py::register_exception<model::InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<io::SpecSyntaxError>(m, "SpecSyntaxError", PyExc_ValueError);
    py::register_exception<io::SpecValidationError>(m, "SpecValidationError", PyExc_ValueError);
    py::register_exception<benchgen::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<PyMonitor>(m, "Monitor")
        .def(py::init<const std::string&, bool, bool>(), py::arg("spec"), py::arg("merging") = true,
             py::arg("store") = true)
        .def("feed", &PyMonitor::feed, py::arg("text"),
             "Consume one or more log lines; returns the newly found blocks.")
        .def("finish", &PyMonitor::finish, "Run the final unobservable closure.")
        .def("domain", &PyMonitor::domain, py::arg("fmt") = "text", py::arg("compact") = true)
        .def("contains", &PyMonitor::contains, py::arg("bindings"))
        .def("stats", &PyMonitor::stats);

    m.def("monitor_log", &monitor_log, py::arg("spec"), py::arg("log"), py::arg("merging") = true,
          py::arg("fmt") = "text", py::arg("compact") = true,
          "Monitor a whole log and return the validity domain.");
    m.def("check_point", &check_point, py::arg("spec"), py::arg("log"), py::arg("bindings"),
          "Decide membership of one concrete parameter valuation.");
    m.def("generate_log", &generate_log, py::arg("benchmark"), py::arg("length"),
          py::arg("seed") = 0, "Generate a benchmark log (copy, dominant, or periodic).");
    m.def("validate", &validate, py::arg("spec"),
          "Well-formedness diagnostics; an empty list means the automaton is valid.");
    m.def("minimize", &minimize, py::arg("spec"), py::arg("domain_json"),
          "Compact a JSON validity domain without changing its point set.");
}
