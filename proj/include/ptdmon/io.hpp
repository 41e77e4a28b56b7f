// Parsers and serializers: the timestamped log format, the JSON automaton
// format, and the validity-domain output formats.
#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptdmon/model.hpp"
#include "ptdmon/monitor.hpp"

namespace ptdmon::io {

// Malformed document or expression text.
struct SpecSyntaxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Well-formedness violations found while compiling a parsed document.
struct SpecValidationError : std::runtime_error {
    SpecValidationError(std::string what, std::vector<model::Diagnostic> diagnostics)
        : std::runtime_error(std::move(what)), diagnostics(std::move(diagnostics)) {}
    std::vector<model::Diagnostic> diagnostics;
};

// Guard/update expression sub-grammar.
model::AstAtom parse_atom(const std::string& text);
model::AstSide parse_side(const std::string& text);

model::RawPtda parse_raw_spec(const std::string& text);
std::pair<std::optional<model::Ptda>, std::vector<model::Diagnostic>> parse_spec_checked(
    const std::string& text);
// Fully validated automaton; throws SpecSyntaxError or SpecValidationError.
model::Ptda parse_spec(const std::string& text);

// Streaming log reader: one event per "@<timestamp> <action>(<arg>,...)"
// line; blank lines and lines starting with '#' are skipped. Enforces
// non-decreasing timestamps and the declared action signatures.
class LogReader {
public:
    LogReader(std::istream& in, const model::Ptda& ptda) : in_(in), ptda_(ptda) {}
    std::optional<model::Event> next();
    std::size_t line_number() const { return line_no_; }

private:
    std::istream& in_;
    const model::Ptda& ptda_;
    std::size_t line_no_ = 0;
    Rational last_ts_ = 0;
    bool any_ = false;
};

model::TimedDataWord parse_log(std::istream& in, const model::Ptda& ptda);

std::string render_event(const model::Event& ev);

enum class DomainFormat { Text, Json };

// One block as a text line: string constraints in parameter declaration
// order, then timing atoms, then numeric atoms, " && "-joined.
std::string render_block(const monitor::Block& block, const model::Ptda& ptda);
std::string render_domain(const monitor::ValidityDomain& vd, const model::Ptda& ptda,
                          DomainFormat format);
monitor::ValidityDomain parse_domain_json(const std::string& text, const model::Ptda& ptda);

}  // namespace ptdmon::io
