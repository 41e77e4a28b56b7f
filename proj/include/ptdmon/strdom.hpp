// Symbolic domain for string-valued state: variables carry concrete strings,
// each string parameter carries either a forced value or a finite exclusion
// set (denoting the co-finite complement).
#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptdmon::strdom {

struct StrError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class StringParamConstraint {
public:
    static StringParamConstraint equals(std::string value);
    static StringParamConstraint not_in(std::set<std::string> excluded);
    static StringParamConstraint unconstrained() { return not_in({}); }

    bool is_equals() const { return is_equals_; }
    const std::string& value() const { return value_; }
    const std::set<std::string>& excluded() const { return excluded_; }

    bool admits(const std::string& s) const;
    // a includes b: every string admitted by b is admitted by a.
    bool includes(const StringParamConstraint& other) const;
    bool operator==(const StringParamConstraint& other) const;

    std::string render(const std::string& param_name) const;  // "" when unconstrained

private:
    bool is_equals_ = false;
    std::string value_;
    std::set<std::string> excluded_;
};

// Operand of a string comparison or update right-hand side.
struct Operand {
    enum class Kind { Const, Var, Local, Param } kind;
    std::string name;  // literal text for Const, identifier otherwise

    static Operand constant(std::string s) { return {Kind::Const, std::move(s)}; }
    static Operand var(std::string s) { return {Kind::Var, std::move(s)}; }
    static Operand local(std::string s) { return {Kind::Local, std::move(s)}; }
    static Operand param(std::string s) { return {Kind::Param, std::move(s)}; }
};

struct Atom {
    Operand lhs;
    Operand rhs;
    bool equal;  // false for !=
};

class StringState {
public:
    StringState() = default;
    StringState(std::map<std::string, std::string> vars, std::vector<std::string> param_names);

    const std::map<std::string, std::string>& vars() const { return vars_; }
    const std::map<std::string, StringParamConstraint>& params() const { return params_; }

    // Refines the state by one comparison; nullopt when unsatisfiable.
    std::optional<StringState> assume_atom(const Atom& atom,
                                           const std::map<std::string, std::string>& locals) const;
    // Simultaneous update: all right-hand sides read the pre-state.
    StringState apply_update(const std::vector<std::pair<std::string, Operand>>& updates,
                             const std::map<std::string, std::string>& locals) const;
    std::map<std::string, StringParamConstraint> project_params() const { return params_; }

    bool operator==(const StringState& other) const;
    std::string canonical_key() const;

private:
    // Concrete value of a Const/Var/Local operand; nullopt for Param.
    std::optional<std::string> resolve(const Operand& op,
                                       const std::map<std::string, std::string>& locals) const;

    std::map<std::string, std::string> vars_;
    std::map<std::string, StringParamConstraint> params_;
};

inline bool equal_states(const StringState& a, const StringState& b) { return a == b; }

}  // namespace ptdmon::strdom
