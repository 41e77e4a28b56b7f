#include "ptdmon/oracle.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace ptdmon::oracle {

using model::InputError;

namespace {

struct State {
    std::uint32_t loc;
    std::map<std::string, std::string> svars;
    std::map<std::string, Rational> nvars;
    poly::Polyhedron zone;  // clocks only, plus the elapsed dim inside the eps phase
};

std::string state_key(const State& s) {
    std::ostringstream os;
    os << s.loc << "|";
    for (const auto& [k, v] : s.svars) os << k << "=" << v << ";";
    os << "|";
    for (const auto& [k, v] : s.nvars) os << k << "=" << to_string(v) << ";";
    os << "|" << s.zone.canonical_key();
    return os.str();
}

class Decider {
public:
    Decider(const model::Ptda& ptda, const std::map<std::string, Rational>& timing,
            const std::map<std::string, model::Value>& data)
        : ptda_(ptda), timing_(timing), data_(data) {
        for (const auto& name : ptda_.timing_params()) {
            auto it = timing_.find(name);
            if (it == timing_.end()) throw InputError("no value for timing parameter '" + name + "'");
            if (sgn(it->second) < 0)
                throw InputError("timing parameter '" + name + "' must be non-negative");
        }
        for (const auto& [name, sort] : ptda_.data_params()) {
            auto it = data_.find(name);
            if (it == data_.end()) throw InputError("no value for data parameter '" + name + "'");
            if (model::sort_of(it->second) != sort)
                throw InputError("data parameter '" + name + "' bound to a value of the wrong sort");
        }
        std::vector<poly::Dim> zdims;
        for (const auto& d : *ptda_.timed_dims())
            if (d.kind == poly::DimKind::Clock) zdims.push_back(d);
        zone_dims_ = poly::make_dims(std::move(zdims));
        for (const auto& d : *ptda_.timed_dims()) {
            if (d.kind == poly::DimKind::Clock)
                clock_ids_.insert(d.id);
            else
                tp_value_[d.id] = timing_.at(d.name);
        }
        for (const auto& d : *ptda_.data_dims()) {
            if (d.kind == poly::DimKind::NumericVar)
                nvar_name_[d.id] = d.name;
            else
                vp_value_[d.id] = std::get<Rational>(data_.at(d.name));
        }
        flow_plus_ = clock_ids_;
        flow_plus_.insert(ptda_.elapsed_dim_id());
    }

    bool run(const model::TimedDataWord& word) {
        std::vector<State> states;
        State init{ptda_.initial_location(), ptda_.string_var_init(), ptda_.numeric_var_init(),
                   initial_zone()};
        states.push_back(std::move(init));
        Rational last_ts = 0;
        for (const auto& raw_ev : word) {
            model::Event ev = raw_ev;
            ptda_.check_event(ev);
            if (ev.timestamp < last_ts) throw InputError("timestamps must be non-decreasing");
            Rational delta = ev.timestamp - last_ts;
            std::vector<State> next;
            std::unordered_set<std::string> seen;
            auto push_next = [&](State s) {
                auto key = state_key(s);
                if (seen.insert(key).second) next.push_back(std::move(s));
            };
            if (ptda_.has_eps_edges() && sgn(delta) > 0 &&
                eps_phase(states, delta, &push_next)) return true;
            for (const auto& s : states)
                push_next(State{s.loc, s.svars, s.nvars, s.zone.shift(clock_ids_, delta)});
            states = std::move(next);
            std::vector<State> after;
            std::unordered_set<std::string> seen_after;
            for (const auto& s : states) {
                for (const model::Edge* e : ptda_.obs_edges_from(s.loc, ev.action_index)) {
                    auto succ = try_edge(s, *e, &ev);
                    if (!succ) continue;
                    if (ptda_.accepting(e->target)) return true;
                    auto key = state_key(*succ);
                    if (seen_after.insert(key).second) after.push_back(std::move(*succ));
                }
            }
            states = std::move(after);
            last_ts = ev.timestamp;
        }
        // Trailing unobservable actions with no time bound.
        std::vector<State> work = states;
        std::unordered_set<std::string> visited;
        while (!work.empty()) {
            State s = std::move(work.back());
            work.pop_back();
            if (ptda_.eps_edges_from(s.loc).empty()) continue;
            State flowed{s.loc, s.svars, s.nvars, s.zone.elapse(clock_ids_, /*strict=*/true)};
            for (const model::Edge* e : ptda_.eps_edges_from(s.loc)) {
                auto succ = try_edge(flowed, *e, nullptr);
                if (!succ) continue;
                if (ptda_.accepting(e->target)) return true;
                if (visited.insert(state_key(*succ)).second) work.push_back(std::move(*succ));
            }
        }
        return false;
    }

private:
    poly::Polyhedron initial_zone() const {
        std::vector<poly::LinearAtom> atoms;
        for (auto id : clock_ids_) atoms.push_back(poly::LinearAtom::cmp(id, poly::Rel::Eq, 0));
        return poly::Polyhedron::universe(zone_dims_).intersect(atoms);
    }

    // Timed guard with timing parameters substituted by their values.
    std::vector<poly::LinearAtom> timed_atoms(const model::Edge& e) const {
        std::vector<poly::LinearAtom> out;
        for (const auto& atom : e.timed_guard) {
            poly::LinearAtom la;
            la.constant = atom.expr.constant;
            la.rel = atom.rel;
            for (const auto& [id, coef] : atom.expr.dim_terms) {
                auto it = tp_value_.find(id);
                if (it != tp_value_.end())
                    la.constant += coef * it->second;
                else
                    la.terms.emplace_back(id, coef);
            }
            out.push_back(std::move(la));
        }
        return out;
    }

    Rational eval_num(const model::NumExpr& expr, const State& s, const model::Event* ev) const {
        Rational v = expr.constant;
        for (const auto& [id, coef] : expr.dim_terms) {
            auto vp = vp_value_.find(id);
            if (vp != vp_value_.end()) {
                v += coef * vp->second;
            } else {
                v += coef * s.nvars.at(nvar_name_.at(id));
            }
        }
        for (const auto& [slot, coef] : expr.local_terms)
            v += coef * std::get<Rational>(ev->args[slot]);
        return v;
    }

    static bool holds(poly::Rel rel, const Rational& v) {
        int s = sgn(v);
        switch (rel) {
            case poly::Rel::Lt: return s < 0;
            case poly::Rel::Le: return s <= 0;
            case poly::Rel::Eq: return s == 0;
            case poly::Rel::Ge: return s >= 0;
            default: return s > 0;
        }
    }

    std::string resolve_string(const strdom::Operand& op, const State& s, const model::Edge& e,
                               const model::Event* ev) const {
        switch (op.kind) {
            case strdom::Operand::Kind::Const:
                return op.name;
            case strdom::Operand::Kind::Var:
                return s.svars.at(op.name);
            case strdom::Operand::Kind::Param:
                return std::get<std::string>(data_.at(op.name));
            default: {
                const auto& sig = ptda_.actions()[static_cast<std::size_t>(e.action)];
                for (std::size_t i = 0; i < sig.params.size(); ++i)
                    if (sig.params[i].first == op.name)
                        return std::get<std::string>(ev->args[i]);
                throw InputError("unbound local '" + op.name + "'");
            }
        }
    }

    std::optional<State> try_edge(const State& s, const model::Edge& e, const model::Event* ev) const {
        poly::Polyhedron zone = s.zone;
        auto tg = timed_atoms(e);
        if (!tg.empty()) {
            zone = zone.intersect(tg);
            if (zone.is_empty()) return std::nullopt;
        }
        for (const auto& atom : e.string_guard) {
            bool eq = resolve_string(atom.lhs, s, e, ev) == resolve_string(atom.rhs, s, e, ev);
            if (eq != atom.equal) return std::nullopt;
        }
        for (const auto& atom : e.data_guard)
            if (!holds(atom.rel, eval_num(atom.expr, s, ev))) return std::nullopt;
        State next = s;
        next.loc = e.target;
        next.zone = e.resets.empty() ? std::move(zone) : zone.reset(e.resets);
        for (const auto& [target, op] : e.string_updates)
            next.svars[target] = resolve_string(op, s, e, ev);
        std::vector<std::pair<std::string, Rational>> writes;
        for (const auto& [dim, expr] : e.numeric_updates)
            writes.emplace_back(nvar_name_.at(dim), eval_num(expr, s, ev));
        for (auto& [name, v] : writes) next.nvars[name] = v;
        return next;
    }

    template <typename Push>
    bool eps_phase(const std::vector<State>& states, const Rational& delta, Push* push_next) {
        const std::uint32_t t_id = ptda_.elapsed_dim_id();
        poly::Dim elapsed{t_id, poly::DimKind::Elapsed, "$t"};
        std::vector<State> work;
        std::unordered_set<std::string> visited;
        for (const auto& s : states) {
            if (ptda_.eps_edges_from(s.loc).empty()) continue;
            work.push_back(State{
                s.loc, s.svars, s.nvars,
                s.zone.with_dim(elapsed).intersect({poly::LinearAtom::cmp(t_id, poly::Rel::Eq, 0)})});
        }
        while (!work.empty()) {
            State u = std::move(work.back());
            work.pop_back();
            if (ptda_.eps_edges_from(u.loc).empty()) continue;
            State flowed{u.loc, u.svars, u.nvars,
                         u.zone.elapse(flow_plus_, /*strict=*/true)
                             .intersect({poly::LinearAtom::cmp(t_id, poly::Rel::Le, delta)})};
            if (flowed.zone.is_empty()) continue;
            for (const model::Edge* e : ptda_.eps_edges_from(u.loc)) {
                auto succ = try_edge(flowed, *e, nullptr);
                if (!succ) continue;
                if (ptda_.accepting(e->target)) return true;
                (*push_next)(State{succ->loc, succ->svars, succ->nvars,
                                   succ->zone.shift_minus_dim(clock_ids_, delta, t_id)});
                if (visited.insert(state_key(*succ)).second) work.push_back(std::move(*succ));
            }
        }
        return false;
    }

    const model::Ptda& ptda_;
    const std::map<std::string, Rational>& timing_;
    const std::map<std::string, model::Value>& data_;
    poly::DimVec zone_dims_;
    std::set<std::uint32_t> clock_ids_, flow_plus_;
    std::map<std::uint32_t, Rational> tp_value_, vp_value_;
    std::map<std::uint32_t, std::string> nvar_name_;
};

}  // namespace

bool decide(const model::Ptda& ptda, const std::map<std::string, Rational>& timing_valuation,
            const std::map<std::string, model::Value>& param_valuation,
            const model::TimedDataWord& word) {
    return Decider(ptda, timing_valuation, param_valuation).run(word);
}

// ---------------------------------------------------------------------------
// Sampling.

namespace {

// Exact bounds of a one-dimensional projection.
struct Bounds {
    std::optional<Rational> lo, hi;
};

Bounds bounds_of(const poly::Polyhedron& p, std::uint32_t dim) {
    std::set<std::uint32_t> others;
    for (const auto& d : p.dims())
        if (d.id != dim) others.insert(d.id);
    auto proj = p.eliminate(others);
    Bounds b;
    for (const auto& a : proj.constraints()) {
        if (a.coef.size() != 1 || a.coef[0] == 0) continue;
        Rational bound = -a.cst / Rational(a.coef[0]);
        bool upper = a.coef[0] > 0;
        if (a.rel == poly::Rel::Eq) {
            b.lo = b.hi = bound;
        } else if (upper) {
            if (!b.hi || bound < *b.hi) b.hi = bound;
        } else {
            if (!b.lo || bound > *b.lo) b.lo = bound;
        }
    }
    return b;
}

}  // namespace

std::vector<SamplePoint> sample_grid(const monitor::ValidityDomain& vd, const model::Ptda& ptda,
                                     const SampleStrategy& strategy) {
    std::map<std::string, std::set<Rational>> numeric_candidates;
    std::map<std::string, std::set<std::string>> string_candidates;
    std::vector<std::string> numeric_names;  // timing params then numeric data params
    for (const auto& name : ptda.timing_params()) numeric_names.push_back(name);
    for (const auto& [name, sort] : ptda.data_params())
        if (sort == model::Sort::Number) numeric_names.push_back(name);
    for (const auto& name : numeric_names)
        numeric_candidates[name] = {Rational(0), Rational(1), Rational(3, 2), Rational(10)};
    for (const auto& name : ptda.string_param_names())
        string_candidates[name] = {"@fresh", "@fresh2"};

    auto note_bounds = [&](const std::string& name, const Bounds& b) {
        auto& set = numeric_candidates[name];
        auto add = [&](Rational q) { set.insert(std::move(q)); };
        if (b.lo) {
            add(*b.lo);
            add(*b.lo - 1);
            add(*b.lo + Rational(1, 2));
        }
        if (b.hi) {
            add(*b.hi);
            add(*b.hi + 1);
            add(*b.hi - Rational(1, 2));
        }
        if (b.lo && b.hi) add((*b.lo + *b.hi) / 2);
    };
    for (const auto& block : vd.blocks()) {
        for (const auto& name : ptda.timing_params())
            note_bounds(name, bounds_of(block.timing, *ptda.dim_id(name)));
        for (const auto& [name, sort] : ptda.data_params())
            if (sort == model::Sort::Number)
                note_bounds(name, bounds_of(block.numeric, *ptda.dim_id(name)));
        for (const auto& [name, c] : block.strings) {
            if (c.is_equals())
                string_candidates[name].insert(c.value());
            else
                string_candidates[name].insert(c.excluded().begin(), c.excluded().end());
        }
    }
    for (const auto& name : numeric_names) {
        bool is_timing = std::find(ptda.timing_params().begin(), ptda.timing_params().end(), name) !=
                         ptda.timing_params().end();
        if (is_timing) {
            auto& set = numeric_candidates[name];
            for (auto it = set.begin(); it != set.end();)
                it = sgn(*it) < 0 ? set.erase(it) : std::next(it);
            if (set.empty()) set.insert(Rational(0));
        }
    }

    std::vector<std::vector<Rational>> numeric_values;
    for (const auto& name : numeric_names)
        numeric_values.emplace_back(numeric_candidates[name].begin(), numeric_candidates[name].end());
    std::vector<std::vector<std::string>> string_values;
    for (const auto& name : ptda.string_param_names())
        string_values.emplace_back(string_candidates[name].begin(), string_candidates[name].end());

    std::mt19937_64 rng(strategy.seed);
    std::set<std::string> seen;
    std::vector<SamplePoint> out;
    auto emit = [&](const std::vector<std::size_t>& num_idx, const std::vector<std::size_t>& str_idx) {
        std::ostringstream key;
        SamplePoint pt;
        pt.inside = false;
        for (std::size_t i = 0; i < numeric_names.size(); ++i) {
            const Rational& v = numeric_values[i][num_idx[i]];
            key << to_string(v) << ";";
            bool timing_param = std::find(ptda.timing_params().begin(), ptda.timing_params().end(),
                                          numeric_names[i]) != ptda.timing_params().end();
            if (timing_param)
                pt.timing[numeric_names[i]] = v;
            else
                pt.data[numeric_names[i]] = v;
        }
        key << "|";
        for (std::size_t i = 0; i < string_values.size(); ++i) {
            const std::string& v = string_values[i][str_idx[i]];
            key << v << ";";
            pt.data[ptda.string_param_names()[i]] = v;
        }
        if (!seen.insert(key.str()).second) return;
        pt.inside = domain_contains(ptda, vd, pt.timing, pt.data);
        out.push_back(std::move(pt));
    };

    // Full grid when small enough, then random fill to the requested count.
    std::size_t total = 1;
    for (const auto& vs : numeric_values) total *= std::max<std::size_t>(vs.size(), 1);
    for (const auto& vs : string_values) total *= std::max<std::size_t>(vs.size(), 1);
    if (total <= std::max<std::size_t>(strategy.min_points * 4, 512)) {
        std::vector<std::size_t> num_idx(numeric_values.size(), 0), str_idx(string_values.size(), 0);
        for (;;) {
            emit(num_idx, str_idx);
            std::size_t k = 0;
            for (; k < num_idx.size(); ++k) {
                if (++num_idx[k] < numeric_values[k].size()) break;
                num_idx[k] = 0;
            }
            if (k < num_idx.size()) continue;
            for (k = 0; k < str_idx.size(); ++k) {
                if (++str_idx[k] < string_values[k].size()) break;
                str_idx[k] = 0;
            }
            if (k == str_idx.size()) break;
        }
    }
    std::size_t guard = 0;
    while (out.size() < strategy.min_points && guard++ < strategy.min_points * 64) {
        std::vector<std::size_t> num_idx, str_idx;
        for (const auto& vs : numeric_values)
            num_idx.push_back(vs.empty() ? 0 : rng() % vs.size());
        for (const auto& vs : string_values)
            str_idx.push_back(vs.empty() ? 0 : rng() % vs.size());
        // Random denominators widen the grid beyond the block corners.
        for (std::size_t i = 0; i < num_idx.size() && !numeric_values[i].empty(); ++i) {
            if (rng() % 4 == 0) {
                Rational v = numeric_values[i][num_idx[i]] + Rational(static_cast<long>(rng() % 7) - 3,
                                                                      1 + static_cast<long>(rng() % 4));
                bool timing_param = std::find(ptda.timing_params().begin(), ptda.timing_params().end(),
                                              numeric_names[i]) != ptda.timing_params().end();
                if (timing_param && sgn(v) < 0) v = -v;
                numeric_values[i].push_back(v);
                num_idx[i] = numeric_values[i].size() - 1;
            }
        }
        emit(num_idx, str_idx);
    }
    return out;
}

}  // namespace ptdmon::oracle
