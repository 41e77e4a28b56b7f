#include "ptdmon/model.hpp"

#include <algorithm>
#include <sstream>

namespace ptdmon::model {

namespace {

enum class IdKind { Clock, TimingParam, StringVar, NumericVar, StringParam, NumericParam };

struct SymbolTable {
    std::map<std::string, IdKind> kinds;
    std::map<std::string, std::uint32_t> dims;  // clocks, tps, numeric vars, numeric params
};

std::string value_text(const Value& v) {
    if (std::holds_alternative<std::string>(v)) return "\"" + std::get<std::string>(v) + "\"";
    return to_string(std::get<Rational>(v));
}

}  // namespace

int Ptda::action_index(const std::string& name) const {
    for (std::size_t i = 0; i < actions_.size(); ++i)
        if (actions_[i].name == name) return static_cast<int>(i);
    return -1;
}

std::optional<std::uint32_t> Ptda::dim_id(const std::string& name) const {
    auto it = dim_by_name_.find(name);
    if (it == dim_by_name_.end()) return std::nullopt;
    return it->second;
}

std::optional<Sort> Ptda::variable_sort(const std::string& name) const {
    if (string_var_init_.count(name)) return Sort::String;
    if (numeric_var_init_.count(name)) return Sort::Number;
    return std::nullopt;
}

poly::Polyhedron Ptda::initial_timed() const {
    std::vector<poly::LinearAtom> atoms;
    for (auto id : clock_ids_) atoms.push_back(poly::LinearAtom::cmp(id, poly::Rel::Eq, 0));
    for (auto id : tp_ids_) atoms.push_back(poly::LinearAtom::cmp(id, poly::Rel::Ge, 0));
    for (const auto& a : initial_timed_atoms_) atoms.push_back(a);
    return poly::Polyhedron::universe(timed_dims_).intersect(atoms);
}

poly::Polyhedron Ptda::initial_data() const {
    std::vector<poly::LinearAtom> atoms;
    for (const auto& [name, init] : numeric_var_init_)
        atoms.push_back(poly::LinearAtom::cmp(dim_by_name_.at(name), poly::Rel::Eq, init));
    for (const auto& a : initial_data_atoms_) atoms.push_back(a);
    return poly::Polyhedron::universe(data_dims_).intersect(atoms);
}

strdom::StringState Ptda::initial_strings() const {
    return strdom::StringState(string_var_init_, string_params_);
}

void Ptda::check_event(Event& ev) const {
    int idx = action_index(ev.action);
    if (idx < 0) throw InputError("unknown action '" + ev.action + "'");
    ev.action_index = idx;
    const ActionSig& sig = actions_[static_cast<std::size_t>(idx)];
    if (ev.args.size() != sig.params.size())
        throw InputError("action '" + ev.action + "' expects " + std::to_string(sig.params.size()) +
                         " argument(s), got " + std::to_string(ev.args.size()));
    for (std::size_t i = 0; i < ev.args.size(); ++i) {
        if (sort_of(ev.args[i]) != sig.params[i].second)
            throw InputError("argument " + std::to_string(i + 1) + " of action '" + ev.action +
                             "' has the wrong sort: " + value_text(ev.args[i]));
    }
    if (sgn(ev.timestamp) < 0) throw InputError("negative timestamp " + to_string(ev.timestamp));
}

std::map<std::string, std::string> Ptda::string_locals(const Event& ev) const {
    std::map<std::string, std::string> locals;
    const ActionSig& sig = actions_[static_cast<std::size_t>(ev.action_index)];
    for (std::size_t i = 0; i < sig.params.size(); ++i)
        if (sig.params[i].second == Sort::String)
            locals.emplace(sig.params[i].first, std::get<std::string>(ev.args[i]));
    return locals;
}

poly::LinearAtom instantiate_atom(const NumAtom& atom, const std::vector<Value>* args) {
    poly::LinearAtom out;
    out.terms = atom.expr.dim_terms;
    out.constant = atom.expr.constant;
    out.rel = atom.rel;
    for (const auto& [slot, coef] : atom.expr.local_terms) {
        if (!args) throw ModelError("local variable used without event arguments");
        out.constant += coef * std::get<Rational>((*args)[slot]);
    }
    return out;
}

poly::LinearExpr instantiate_expr(const NumExpr& expr, const std::vector<Value>* args) {
    poly::LinearExpr out;
    out.terms = expr.dim_terms;
    out.constant = expr.constant;
    for (const auto& [slot, coef] : expr.local_terms) {
        if (!args) throw ModelError("local variable used without event arguments");
        out.constant += coef * std::get<Rational>((*args)[slot]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Builder.

namespace detail {

class Builder {
public:
    explicit Builder(const RawPtda& raw) : raw_(raw) {}

    std::pair<std::optional<Ptda>, std::vector<Diagnostic>> run() {
        declare();
        if (fatal_) return {std::nullopt, diags_};
        compile_initial_constraint();
        for (std::size_t i = 0; i < raw_.edges.size(); ++i) compile_edge(i);
        check_unobservable_cycles();
        if (!diags_.empty()) return {std::nullopt, diags_};
        finalize();
        return {std::move(ptda_), diags_};
    }

private:
    void diag(const std::string& rule, const std::string& message) {
        diags_.push_back({rule, message});
    }
    void fatal(const std::string& rule, const std::string& message) {
        diag(rule, message);
        fatal_ = true;
    }

    void declare_name(const std::string& name, IdKind kind) {
        if (name.empty()) {
            fatal("empty-name", "declaration with empty name");
            return;
        }
        if (syms_.kinds.count(name)) {
            fatal("duplicate-name", "name '" + name + "' is declared more than once");
            return;
        }
        syms_.kinds.emplace(name, kind);
    }

    void declare() {
        Ptda& a = out_;
        a.name_ = raw_.name;
        std::uint32_t next_dim = 0;
        for (const auto& c : raw_.clocks) {
            declare_name(c, IdKind::Clock);
            syms_.dims[c] = next_dim;
            a.clock_ids_.insert(next_dim);
            ++next_dim;
            a.clocks_.push_back(c);
        }
        for (const auto& t : raw_.timing_params) {
            declare_name(t, IdKind::TimingParam);
            syms_.dims[t] = next_dim;
            a.tp_ids_.insert(next_dim);
            ++next_dim;
            a.timing_params_.push_back(t);
        }
        for (const auto& v : raw_.variables) {
            declare_name(v.name, v.sort == Sort::String ? IdKind::StringVar : IdKind::NumericVar);
            if (v.sort == Sort::String) {
                if (sort_of(v.init) != Sort::String)
                    fatal("sort-mismatch", "initial value of string variable '" + v.name + "' is numeric");
                else
                    a.string_var_init_[v.name] = std::get<std::string>(v.init);
            } else {
                if (sort_of(v.init) != Sort::Number)
                    fatal("sort-mismatch", "initial value of numeric variable '" + v.name + "' is a string");
                else {
                    a.numeric_var_init_[v.name] = std::get<Rational>(v.init);
                    syms_.dims[v.name] = next_dim++;
                }
            }
        }
        for (const auto& [name, sort] : raw_.data_params) {
            declare_name(name, sort == Sort::String ? IdKind::StringParam : IdKind::NumericParam);
            a.data_params_.emplace_back(name, sort);
            if (sort == Sort::String)
                a.string_params_.push_back(name);
            else
                syms_.dims[name] = next_dim++;
        }
        for (const auto& act : raw_.actions) {
            if (act.name == "eps") fatal("reserved-action", "action name 'eps' is reserved for unobservable edges");
            for (const auto& other : raw_.actions)
                if (&other != &act && other.name == act.name)
                    fatal("duplicate-name", "action '" + act.name + "' is declared more than once");
            std::set<std::string> seen;
            for (const auto& [pname, sort] : act.params) {
                (void)sort;
                if (!seen.insert(pname).second)
                    fatal("duplicate-name", "action '" + act.name + "' repeats argument name '" + pname + "'");
                if (syms_.kinds.count(pname))
                    fatal("ambiguous-name", "argument '" + pname + "' of action '" + act.name +
                                                "' shadows a declared name");
            }
        }
        a.actions_ = raw_.actions;
        std::set<std::string> locs;
        for (const auto& l : raw_.locations) {
            if (!locs.insert(l).second) fatal("duplicate-name", "location '" + l + "' is declared more than once");
        }
        a.locations_ = raw_.locations;
        if (a.locations_.empty()) fatal("no-locations", "automaton declares no locations");
        if (auto idx = location_index(raw_.initial); idx)
            a.initial_ = *idx;
        else
            fatal("unknown-location", "initial location '" + raw_.initial + "' is not declared");
        for (const auto& l : raw_.accepting) {
            if (auto idx = location_index(l); idx)
                a.accepting_.insert(*idx);
            else
                fatal("unknown-location", "accepting location '" + l + "' is not declared");
        }
        // Dimension vectors. The elapsed-time dimension takes the next free id.
        std::vector<poly::Dim> timed, data, tp, vp;
        for (const auto& c : a.clocks_) timed.push_back({syms_.dims.at(c), poly::DimKind::Clock, c});
        for (const auto& t : a.timing_params_) {
            timed.push_back({syms_.dims.at(t), poly::DimKind::TimingParam, t});
            tp.push_back({syms_.dims.at(t), poly::DimKind::TimingParam, t});
        }
        for (const auto& v : raw_.variables)
            if (v.sort == Sort::Number)
                data.push_back({syms_.dims.at(v.name), poly::DimKind::NumericVar, v.name});
        for (const auto& [name, sort] : a.data_params_)
            if (sort == Sort::Number) {
                data.push_back({syms_.dims.at(name), poly::DimKind::NumericParam, name});
                vp.push_back({syms_.dims.at(name), poly::DimKind::NumericParam, name});
            }
        a.elapsed_id_ = next_dim;
        auto timed_plus = timed;
        timed_plus.push_back({a.elapsed_id_, poly::DimKind::Elapsed, "$t"});
        a.timed_dims_ = poly::make_dims(std::move(timed));
        a.timed_plus_dims_ = poly::make_dims(std::move(timed_plus));
        a.data_dims_ = poly::make_dims(std::move(data));
        a.tp_dims_ = poly::make_dims(std::move(tp));
        a.vp_dims_ = poly::make_dims(std::move(vp));
        a.dim_by_name_ = syms_.dims;
    }

    std::optional<std::uint32_t> location_index(const std::string& name) const {
        for (std::size_t i = 0; i < raw_.locations.size(); ++i)
            if (raw_.locations[i] == name) return static_cast<std::uint32_t>(i);
        return std::nullopt;
    }

    // Identifier resolution inside an edge context. action < 0 means eps.
    struct Resolved {
        IdKind kind;
        std::uint32_t dim = 0;     // for dim-backed kinds
        std::size_t local_slot = 0;  // for locals
        bool is_local = false;
        Sort local_sort = Sort::String;
    };

    std::optional<Resolved> resolve(const std::string& ident, int action, const char* where,
                                    const std::string& atom_text) {
        auto it = syms_.kinds.find(ident);
        if (it != syms_.kinds.end()) {
            Resolved r;
            r.kind = it->second;
            auto d = syms_.dims.find(ident);
            if (d != syms_.dims.end()) r.dim = d->second;
            return r;
        }
        if (action >= 0) {
            const ActionSig& sig = raw_.actions[static_cast<std::size_t>(action)];
            for (std::size_t i = 0; i < sig.params.size(); ++i)
                if (sig.params[i].first == ident) {
                    Resolved r;
                    r.is_local = true;
                    r.local_slot = i;
                    r.local_sort = sig.params[i].second;
                    r.kind = sig.params[i].second == Sort::String ? IdKind::StringVar : IdKind::NumericVar;
                    return r;
                }
        }
        for (const auto& act : raw_.actions)
            for (const auto& [pname, sort] : act.params) {
                (void)sort;
                if (pname == ident) {
                    diag("guard-local-scope",
                         std::string(where) + " '" + atom_text + "' uses local variable '" + ident +
                             "' which is not an argument of action '" +
                             (action < 0 ? std::string("eps") : raw_.actions[static_cast<std::size_t>(action)].name) +
                             "'");
                    return std::nullopt;
                }
            }
        diag("unknown-identifier", std::string(where) + " '" + atom_text + "' references undeclared name '" + ident + "'");
        return std::nullopt;
    }

    bool side_is_stringish(const AstSide& side, int action) {
        if (side.is_string_literal) return true;
        for (const auto& [coef, ident] : side.terms) {
            (void)coef;
            auto it = syms_.kinds.find(ident);
            if (it != syms_.kinds.end() &&
                (it->second == IdKind::StringVar || it->second == IdKind::StringParam))
                return true;
            if (it == syms_.kinds.end() && action >= 0) {
                const ActionSig& sig = raw_.actions[static_cast<std::size_t>(action)];
                for (const auto& [pname, sort] : sig.params)
                    if (pname == ident && sort == Sort::String) return true;
            }
        }
        return false;
    }

    std::optional<strdom::Operand> string_operand(const AstSide& side, int action, const char* where,
                                                  const std::string& text) {
        if (side.is_string_literal) return strdom::Operand::constant(side.literal);
        if (side.terms.size() != 1 || side.terms[0].first != 1 || side.constant != 0) {
            diag("string-atom-shape", std::string(where) + " '" + text + "' compares strings with arithmetic");
            return std::nullopt;
        }
        auto r = resolve(side.terms[0].second, action, where, text);
        if (!r) return std::nullopt;
        const std::string& ident = side.terms[0].second;
        if (r->is_local) {
            if (r->local_sort != Sort::String) {
                diag("sort-mismatch", std::string(where) + " '" + text + "' mixes string and numeric operands");
                return std::nullopt;
            }
            return strdom::Operand::local(ident);
        }
        switch (r->kind) {
            case IdKind::StringVar: return strdom::Operand::var(ident);
            case IdKind::StringParam: return strdom::Operand::param(ident);
            default:
                diag("sort-mismatch", std::string(where) + " '" + text + "' mixes string and numeric operands");
                return std::nullopt;
        }
    }

    // Numeric expression lhs - rhs with identifiers constrained to `allowed`.
    std::optional<NumExpr> numeric_expr(const AstSide& lhs, const AstSide& rhs, int action,
                                        const std::set<IdKind>& allowed, const char* where,
                                        const std::string& text, const char* scope_rule) {
        NumExpr out;
        out.constant = lhs.constant - rhs.constant;
        auto add_side = [&](const AstSide& side, int sign) -> bool {
            if (side.is_string_literal) {
                diag("sort-mismatch", std::string(where) + " '" + text + "' mixes string and numeric operands");
                return false;
            }
            for (const auto& [coef, ident] : side.terms) {
                auto r = resolve(ident, action, where, text);
                if (!r) return false;
                Rational c = coef * sign;
                if (r->is_local) {
                    if (r->local_sort != Sort::Number) {
                        diag("sort-mismatch",
                             std::string(where) + " '" + text + "' uses string-valued '" + ident + "' numerically");
                        return false;
                    }
                    if (!allowed.count(IdKind::NumericVar)) {
                        diag(scope_rule, std::string(where) + " '" + text + "' may not use local '" + ident + "'");
                        return false;
                    }
                    out.local_terms.emplace_back(r->local_slot, c);
                    continue;
                }
                if (!allowed.count(r->kind)) {
                    diag(scope_rule, std::string(where) + " '" + text + "' may not reference '" + ident + "'");
                    return false;
                }
                if (r->kind == IdKind::StringVar || r->kind == IdKind::StringParam) {
                    diag("sort-mismatch",
                         std::string(where) + " '" + text + "' uses string-valued '" + ident + "' numerically");
                    return false;
                }
                out.dim_terms.emplace_back(r->dim, c);
            }
            return true;
        };
        if (!add_side(lhs, 1) || !add_side(rhs, -1)) return std::nullopt;
        return out;
    }

    void compile_initial_constraint() {
        for (const auto& atom : raw_.initial_constraint) {
            if (atom.neq) {
                diag("neq-on-numeric", "initial constraint '" + atom.text + "' uses != on numbers");
                continue;
            }
            bool has_tp = false, has_vp = false, bad = false;
            for (const AstSide* side : {&atom.lhs, &atom.rhs}) {
                if (side->is_string_literal) bad = true;
                for (const auto& [coef, ident] : side->terms) {
                    (void)coef;
                    auto it = syms_.kinds.find(ident);
                    if (it == syms_.kinds.end()) {
                        diag("unknown-identifier",
                             "initial constraint '" + atom.text + "' references undeclared name '" + ident + "'");
                        bad = true;
                    } else if (it->second == IdKind::TimingParam)
                        has_tp = true;
                    else if (it->second == IdKind::NumericParam)
                        has_vp = true;
                    else
                        bad = true;
                }
            }
            if (bad || (has_tp && has_vp)) {
                if (!bad)
                    diag("initial-constraint-scope",
                         "initial constraint '" + atom.text +
                             "' mixes timing parameters with numeric data parameters");
                else if (atom.lhs.is_string_literal || atom.rhs.is_string_literal)
                    diag("initial-constraint-scope",
                         "initial constraint '" + atom.text + "' must range over parameters only");
                continue;
            }
            std::set<IdKind> allowed =
                has_vp ? std::set<IdKind>{IdKind::NumericParam} : std::set<IdKind>{IdKind::TimingParam};
            auto expr = numeric_expr(atom.lhs, atom.rhs, -1, allowed, "initial constraint", atom.text,
                                     "initial-constraint-scope");
            if (!expr) continue;
            poly::LinearAtom la;
            la.terms = expr->dim_terms;
            la.constant = expr->constant;
            la.rel = atom.rel;
            (has_vp ? out_.initial_data_atoms_ : out_.initial_timed_atoms_).push_back(std::move(la));
        }
    }

    void compile_edge(std::size_t index) {
        const RawEdge& re = raw_.edges[index];
        Edge e;
        e.index = index;
        std::string label = "edge " + std::to_string(index + 1) + " (" + re.source + " -> " + re.target + ")";
        if (auto s = location_index(re.source); s)
            e.source = *s;
        else {
            diag("unknown-location", label + ": source is not declared");
            return;
        }
        if (auto t = location_index(re.target); t)
            e.target = *t;
        else {
            diag("unknown-location", label + ": target is not declared");
            return;
        }
        if (re.action == "eps") {
            e.action = -1;
        } else {
            int idx = -1;
            for (std::size_t i = 0; i < raw_.actions.size(); ++i)
                if (raw_.actions[i].name == re.action) idx = static_cast<int>(i);
            if (idx < 0) {
                diag("unknown-action", label + ": action '" + re.action + "' is not declared");
                return;
            }
            e.action = idx;
        }
        for (const auto& atom : re.timed_guard) {
            if (atom.neq) {
                diag("neq-on-numeric", label + ": timed guard '" + atom.text + "' uses !=");
                continue;
            }
            auto expr = numeric_expr(atom.lhs, atom.rhs, e.action,
                                     {IdKind::Clock, IdKind::TimingParam}, "timed guard", atom.text,
                                     "timed-guard-scope");
            if (!expr) continue;
            bool has_clock = false;
            for (const auto& [dim, coef] : expr->dim_terms) {
                (void)coef;
                if (out_.clock_ids_.count(dim)) has_clock = true;
            }
            if (!expr->local_terms.empty()) {
                diag("timed-guard-scope", label + ": timed guard '" + atom.text + "' uses a local variable");
                continue;
            }
            if (!has_clock) {
                diag("timed-guard-no-clock",
                     label + ": timed guard '" + atom.text + "' mentions no clock (pure parameter " +
                         "constraints belong in initial_constraint)");
                continue;
            }
            e.timed_guard.push_back({std::move(*expr), atom.rel});
        }
        for (const auto& atom : re.data_guard) {
            bool stringish = side_is_stringish(atom.lhs, e.action) || side_is_stringish(atom.rhs, e.action);
            if (stringish) {
                if (!atom.neq && atom.rel != poly::Rel::Eq) {
                    diag("string-atom-rel",
                         label + ": data guard '" + atom.text + "' orders strings (only = and != apply)");
                    continue;
                }
                auto l = string_operand(atom.lhs, e.action, "data guard", atom.text);
                auto r = string_operand(atom.rhs, e.action, "data guard", atom.text);
                if (!l || !r) continue;
                if (l->kind == strdom::Operand::Kind::Param && r->kind == strdom::Operand::Kind::Param) {
                    diag("string-param-pair",
                         label + ": data guard '" + atom.text +
                             "' compares two string parameters; the per-parameter string domain cannot " +
                             "represent their correlation");
                    continue;
                }
                e.string_guard.push_back({std::move(*l), std::move(*r), !atom.neq});
            } else {
                if (atom.neq) {
                    diag("neq-on-numeric", label + ": data guard '" + atom.text + "' uses != on numbers");
                    continue;
                }
                auto expr = numeric_expr(atom.lhs, atom.rhs, e.action,
                                         {IdKind::NumericVar, IdKind::NumericParam}, "data guard",
                                         atom.text, "data-guard-scope");
                if (!expr) continue;
                e.data_guard.push_back({std::move(*expr), atom.rel});
            }
        }
        for (const auto& r : re.resets) {
            auto it = syms_.kinds.find(r);
            if (it == syms_.kinds.end() || it->second != IdKind::Clock) {
                diag("reset-scope", label + ": reset target '" + r + "' is not a clock");
                continue;
            }
            e.resets.insert(syms_.dims.at(r));
        }
        std::set<std::string> updated;
        for (const auto& [target, rhs] : re.updates) {
            if (!updated.insert(target).second) {
                diag("duplicate-update", label + ": variable '" + target + "' is updated twice");
                continue;
            }
            auto it = syms_.kinds.find(target);
            if (it == syms_.kinds.end() ||
                (it->second != IdKind::StringVar && it->second != IdKind::NumericVar)) {
                diag("update-target", label + ": update target '" + target + "' is not a variable");
                continue;
            }
            std::string text = target + " := ...";
            if (it->second == IdKind::StringVar) {
                auto op = string_operand(rhs, e.action, "update", text);
                if (!op) continue;
                if (op->kind == strdom::Operand::Kind::Param) {
                    diag("string-update-rhs",
                         label + ": string variable '" + target +
                             "' may only be assigned a string, a string variable, or a local");
                    continue;
                }
                e.string_updates.emplace_back(target, std::move(*op));
            } else {
                AstSide zero;
                auto expr = numeric_expr(rhs, zero, e.action, {IdKind::NumericVar, IdKind::NumericParam},
                                         "update", text, "update-scope");
                if (!expr) continue;
                e.numeric_updates.emplace_back(syms_.dims.at(target), std::move(*expr));
            }
        }
        edges_.push_back(std::move(e));
    }

    void check_unobservable_cycles() {
        const std::size_t n = raw_.locations.size();
        std::vector<std::vector<std::uint32_t>> adj(n);
        for (const auto& e : edges_)
            if (e.action < 0) adj[e.source].push_back(e.target);
        std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
        std::string cycle_at;
        auto dfs = [&](auto&& self, std::uint32_t u) -> bool {
            state[u] = 1;
            for (auto v : adj[u]) {
                if (state[v] == 1) {
                    cycle_at = raw_.locations[v];
                    return true;
                }
                if (state[v] == 0 && self(self, v)) return true;
            }
            state[u] = 2;
            return false;
        };
        for (std::uint32_t u = 0; u < n; ++u)
            if (state[u] == 0 && dfs(dfs, u)) {
                diag("unobservable-cycle",
                     "unobservable edges form a cycle through location '" + cycle_at +
                         "'; monitoring requires an acyclic unobservable subgraph");
                return;
            }
    }

    void finalize() {
        Ptda& a = out_;
        a.edges_ = std::move(edges_);
        a.eps_from_.assign(a.locations_.size(), {});
        a.obs_from_.assign(a.locations_.size(),
                           std::vector<std::vector<const Edge*>>(a.actions_.size()));
        for (const auto& e : a.edges_) {
            if (e.action < 0) {
                a.eps_from_[e.source].push_back(&e);
                a.has_eps_ = true;
            } else {
                a.obs_from_[e.source][static_cast<std::size_t>(e.action)].push_back(&e);
            }
        }
        ptda_ = std::move(a);
    }

    const RawPtda& raw_;
    SymbolTable syms_;
    Ptda out_;
    std::vector<Edge> edges_;
    std::vector<Diagnostic> diags_;
    std::optional<Ptda> ptda_;
    bool fatal_ = false;
};

}  // namespace detail

std::pair<std::optional<Ptda>, std::vector<Diagnostic>> build(const RawPtda& raw) {
    return detail::Builder(raw).run();
}

std::vector<Diagnostic> validate(const RawPtda& raw) { return build(raw).second; }

// ---------------------------------------------------------------------------
// Concrete semantics.

ConcreteState initial_concrete_state(const Ptda& ptda) {
    ConcreteState s;
    s.loc = ptda.initial_location();
    s.svars = ptda.string_var_init();
    s.nvars = ptda.numeric_var_init();
    for (const auto& d : *ptda.timed_dims())
        if (d.kind == poly::DimKind::Clock) s.clocks[d.name] = 0;
    return s;
}

namespace {

Rational eval_expr(const Ptda& ptda, const NumExpr& expr,
                   const std::map<std::string, Rational>& timing_valuation,
                   const std::map<std::string, Value>& param_valuation,
                   const ConcreteState& state, const std::map<std::string, Value>& locals,
                   const ActionSig* sig) {
    Rational v = expr.constant;
    auto dim_name = [&](std::uint32_t id) -> const std::string& {
        for (const auto& d : *ptda.timed_plus_dims())
            if (d.id == id) return d.name;
        for (const auto& d : *ptda.data_dims())
            if (d.id == id) return d.name;
        throw ModelError("unknown dimension id in expression");
    };
    for (const auto& [id, coef] : expr.dim_terms) {
        const std::string& name = dim_name(id);
        Rational val;
        if (auto it = state.clocks.find(name); it != state.clocks.end())
            val = it->second;
        else if (auto it2 = state.nvars.find(name); it2 != state.nvars.end())
            val = it2->second;
        else if (auto it3 = timing_valuation.find(name); it3 != timing_valuation.end())
            val = it3->second;
        else if (auto it4 = param_valuation.find(name); it4 != param_valuation.end())
            val = std::get<Rational>(it4->second);
        else
            throw InputError("no value bound for '" + name + "'");
        v += coef * val;
    }
    for (const auto& [slot, coef] : expr.local_terms) {
        if (!sig) throw ModelError("local variable on an unobservable edge");
        const std::string& lname = sig->params[slot].first;
        auto it = locals.find(lname);
        if (it == locals.end()) throw InputError("local '" + lname + "' is not bound");
        v += coef * std::get<Rational>(it->second);
    }
    return v;
}

bool holds(poly::Rel rel, const Rational& v) {
    int s = sgn(v);
    switch (rel) {
        case poly::Rel::Lt: return s < 0;
        case poly::Rel::Le: return s <= 0;
        case poly::Rel::Eq: return s == 0;
        case poly::Rel::Ge: return s >= 0;
        default: return s > 0;
    }
}

}  // namespace

std::optional<ConcreteState> concrete_step(const Ptda& ptda,
                                           const std::map<std::string, Rational>& timing_valuation,
                                           const std::map<std::string, Value>& param_valuation,
                                           const ConcreteState& state, const Edge& edge,
                                           const std::map<std::string, Value>& locals,
                                           const Rational& delay) {
    if (sgn(delay) < 0) throw InputError("negative delay");
    if (state.loc != edge.source) return std::nullopt;
    const ActionSig* sig =
        edge.action >= 0 ? &ptda.actions()[static_cast<std::size_t>(edge.action)] : nullptr;
    if (sig) {
        if (locals.size() != sig->params.size())
            throw InputError("local valuation does not match the action signature of '" + sig->name + "'");
        for (const auto& [pname, sort] : sig->params) {
            auto it = locals.find(pname);
            if (it == locals.end() || sort_of(it->second) != sort)
                throw InputError("local valuation does not match the action signature of '" + sig->name + "'");
        }
    } else if (!locals.empty()) {
        throw InputError("unobservable edges take no arguments");
    }
    ConcreteState cur = state;
    for (auto& [name, val] : cur.clocks) val += delay;
    for (const auto& atom : edge.timed_guard)
        if (!holds(atom.rel, eval_expr(ptda, atom.expr, timing_valuation, param_valuation, cur, locals, sig)))
            return std::nullopt;
    std::map<std::string, std::string> slocals;
    if (sig)
        for (std::size_t i = 0; i < sig->params.size(); ++i)
            if (sig->params[i].second == Sort::String)
                slocals[sig->params[i].first] = std::get<std::string>(locals.at(sig->params[i].first));
    auto resolve_string = [&](const strdom::Operand& op) -> std::string {
        switch (op.kind) {
            case strdom::Operand::Kind::Const: return op.name;
            case strdom::Operand::Kind::Var: return cur.svars.at(op.name);
            case strdom::Operand::Kind::Local: return slocals.at(op.name);
            default: return std::get<std::string>(param_valuation.at(op.name));
        }
    };
    for (const auto& atom : edge.string_guard) {
        bool eq = resolve_string(atom.lhs) == resolve_string(atom.rhs);
        if (eq != atom.equal) return std::nullopt;
    }
    for (const auto& atom : edge.data_guard)
        if (!holds(atom.rel, eval_expr(ptda, atom.expr, timing_valuation, param_valuation, cur, locals, sig)))
            return std::nullopt;
    ConcreteState next = cur;
    next.loc = edge.target;
    for (const auto& d : *ptda.timed_dims())
        if (edge.resets.count(d.id)) next.clocks[d.name] = 0;
    for (const auto& [target, op] : edge.string_updates) next.svars[target] = resolve_string(op);
    std::vector<std::pair<std::string, Rational>> nupd;
    for (const auto& [dim, expr] : edge.numeric_updates) {
        for (const auto& d : *ptda.data_dims())
            if (d.id == dim)
                nupd.emplace_back(d.name,
                                  eval_expr(ptda, expr, timing_valuation, param_valuation, cur, locals, sig));
    }
    for (auto& [nname, v] : nupd) next.nvars[nname] = v;
    return next;
}

}  // namespace ptdmon::model
