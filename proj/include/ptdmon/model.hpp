// Parametric timed data automata: declarations, edges, guards, updates,
// well-formedness checking, and the concrete single-step semantics.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ptdmon/poly.hpp"
#include "ptdmon/rational.hpp"
#include "ptdmon/strdom.hpp"

namespace ptdmon::model {

enum class Sort { String, Number };

// Structural problems in an automaton description.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problems in runtime inputs (events, parameter bindings).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Diagnostic {
    std::string rule;  // short rule identifier, e.g. "unobservable-cycle"
    std::string message;
};

struct ActionSig {
    std::string name;
    std::vector<std::pair<std::string, Sort>> params;
};

using Value = std::variant<std::string, Rational>;

inline Sort sort_of(const Value& v) {
    return std::holds_alternative<std::string>(v) ? Sort::String : Sort::Number;
}

struct Event {
    std::string action;
    Rational timestamp;
    std::vector<Value> args;
    int action_index = -1;  // resolved against an automaton by check_event
};

using TimedDataWord = std::vector<Event>;

// ---------------------------------------------------------------------------
// Syntax-level description, produced by the automaton document parser (io)
// or built directly by tests.

struct AstSide {
    bool is_string_literal = false;
    std::string literal;
    std::vector<std::pair<Rational, std::string>> terms;  // coef * ident
    Rational constant = 0;
};

struct AstAtom {
    AstSide lhs;
    AstSide rhs;
    poly::Rel rel = poly::Rel::Le;  // used when !neq
    bool neq = false;
    std::string text;  // original source, for diagnostics
};

struct RawEdge {
    std::string source, target, action;  // action "eps" marks unobservable edges
    std::vector<AstAtom> timed_guard;
    std::vector<AstAtom> data_guard;
    std::vector<std::string> resets;
    std::vector<std::pair<std::string, AstSide>> updates;
};

struct RawVariable {
    std::string name;
    Sort sort;
    Value init;
};

struct RawPtda {
    std::string name;
    std::vector<ActionSig> actions;
    std::vector<std::string> clocks;
    std::vector<std::string> timing_params;
    std::vector<RawVariable> variables;
    std::vector<std::pair<std::string, Sort>> data_params;
    std::vector<std::string> locations;
    std::string initial;
    std::vector<std::string> accepting;
    std::vector<AstAtom> initial_constraint;
    std::vector<RawEdge> edges;
};

// ---------------------------------------------------------------------------
// Compiled form.

// Linear expression over polyhedron dimensions plus the acting edge's numeric
// locals (by argument position); locals are folded in at event time.
struct NumExpr {
    std::vector<std::pair<std::uint32_t, Rational>> dim_terms;
    std::vector<std::pair<std::size_t, Rational>> local_terms;
    Rational constant = 0;
};

struct NumAtom {
    NumExpr expr;  // expr REL 0
    poly::Rel rel;
};

struct Edge {
    std::uint32_t source = 0, target = 0;
    int action = -1;  // -1: unobservable
    std::vector<NumAtom> timed_guard;
    std::vector<strdom::Atom> string_guard;
    std::vector<NumAtom> data_guard;
    std::set<std::uint32_t> resets;
    std::vector<std::pair<std::string, strdom::Operand>> string_updates;
    std::vector<std::pair<std::uint32_t, NumExpr>> numeric_updates;
    std::size_t index = 0;
};

namespace detail {
class Builder;
}

class Ptda {
public:
    const std::string& name() const { return name_; }
    const std::vector<ActionSig>& actions() const { return actions_; }
    int action_index(const std::string& name) const;
    const std::vector<std::string>& locations() const { return locations_; }
    const std::string& location_name(std::uint32_t loc) const { return locations_[loc]; }
    std::uint32_t initial_location() const { return initial_; }
    bool accepting(std::uint32_t loc) const { return accepting_.count(loc) != 0; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<const Edge*>& eps_edges_from(std::uint32_t loc) const { return eps_from_[loc]; }
    const std::vector<const Edge*>& obs_edges_from(std::uint32_t loc, int action) const {
        return obs_from_[loc][static_cast<std::size_t>(action)];
    }
    bool has_eps_edges() const { return has_eps_; }

    const poly::DimVec& timed_dims() const { return timed_dims_; }
    const poly::DimVec& timed_plus_dims() const { return timed_plus_dims_; }
    const poly::DimVec& data_dims() const { return data_dims_; }
    const poly::DimVec& tp_dims() const { return tp_dims_; }
    const poly::DimVec& vp_dims() const { return vp_dims_; }
    std::uint32_t elapsed_dim_id() const { return elapsed_id_; }
    const std::set<std::uint32_t>& clock_ids() const { return clock_ids_; }
    const std::set<std::uint32_t>& tp_ids() const { return tp_ids_; }

    std::optional<std::uint32_t> dim_id(const std::string& name) const;
    const std::vector<std::string>& string_param_names() const { return string_params_; }
    const std::vector<std::pair<std::string, Sort>>& data_params() const { return data_params_; }
    const std::vector<std::string>& timing_params() const { return timing_params_; }
    std::optional<Sort> variable_sort(const std::string& name) const;

    poly::Polyhedron initial_timed() const;
    poly::Polyhedron initial_data() const;
    strdom::StringState initial_strings() const;
    const std::map<std::string, Rational>& numeric_var_init() const { return numeric_var_init_; }
    const std::map<std::string, std::string>& string_var_init() const { return string_var_init_; }

    // Resolves the action, checks arity and argument sorts; throws InputError.
    void check_event(Event& ev) const;

    // Locals map for string-sorted arguments of the event's action.
    std::map<std::string, std::string> string_locals(const Event& ev) const;

    friend class detail::Builder;

private:
    std::string name_;
    std::vector<ActionSig> actions_;
    std::vector<std::string> locations_;
    std::uint32_t initial_ = 0;
    std::set<std::uint32_t> accepting_;
    std::vector<Edge> edges_;
    bool has_eps_ = false;
    std::vector<std::vector<const Edge*>> eps_from_;
    std::vector<std::vector<std::vector<const Edge*>>> obs_from_;

    std::vector<std::string> clocks_;
    std::vector<std::string> timing_params_;
    std::vector<std::string> string_params_;
    std::vector<std::pair<std::string, Sort>> data_params_;
    std::map<std::string, std::string> string_var_init_;
    std::map<std::string, Rational> numeric_var_init_;

    std::map<std::string, std::uint32_t> dim_by_name_;
    poly::DimVec timed_dims_, timed_plus_dims_, data_dims_, tp_dims_, vp_dims_;
    std::uint32_t elapsed_id_ = 0;
    std::set<std::uint32_t> clock_ids_, tp_ids_;
    std::vector<poly::LinearAtom> initial_timed_atoms_;
    std::vector<poly::LinearAtom> initial_data_atoms_;
};

// Compiles and validates; the Ptda is present iff there are no diagnostics.
std::pair<std::optional<Ptda>, std::vector<Diagnostic>> build(const RawPtda& raw);

// Well-formedness diagnostics only (empty = well-formed).
std::vector<Diagnostic> validate(const RawPtda& raw);

// Instantiation of compiled guards/updates with an event's arguments
// (args == nullptr for unobservable edges).
poly::LinearAtom instantiate_atom(const NumAtom& atom, const std::vector<Value>* args);
poly::LinearExpr instantiate_expr(const NumExpr& expr, const std::vector<Value>* args);

// ---------------------------------------------------------------------------
// Concrete semantics of a single combined delay + discrete step, used by the
// oracle and the tests.

struct ConcreteState {
    std::uint32_t loc = 0;
    std::map<std::string, std::string> svars;
    std::map<std::string, Rational> nvars;
    std::map<std::string, Rational> clocks;
};

ConcreteState initial_concrete_state(const Ptda& ptda);

std::optional<ConcreteState> concrete_step(const Ptda& ptda,
                                           const std::map<std::string, Rational>& timing_valuation,
                                           const std::map<std::string, Value>& param_valuation,
                                           const ConcreteState& state, const Edge& edge,
                                           const std::map<std::string, Value>& locals,
                                           const Rational& delay);

}  // namespace ptdmon::model
