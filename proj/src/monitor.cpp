#include "ptdmon/monitor.hpp"

#include <algorithm>
#include <sstream>

namespace ptdmon::monitor {

using model::InputError;

std::string Block::canonical_key() const {
    std::ostringstream os;
    os << timing.canonical_key() << "|";
    for (const auto& [name, c] : strings) {
        if (c.is_equals())
            os << name << "=\"" << c.value() << "\";";
        else {
            os << name << "!{";
            for (const auto& s : c.excluded()) os << "\"" << s << "\",";
            os << "};";
        }
    }
    os << "|" << numeric.canonical_key();
    return os.str();
}

bool block_includes(const Block& a, const Block& b) {
    for (const auto& [name, cb] : b.strings) {
        auto it = a.strings.find(name);
        if (it == a.strings.end()) throw InputError("blocks over different string parameters");
        if (!it->second.includes(cb)) return false;
    }
    return a.timing.includes(b.timing) && a.numeric.includes(b.numeric);
}

bool ValidityDomain::add(Block b) {
    auto key = b.canonical_key();
    if (!keys_.insert(key).second) return false;
    blocks_.push_back(std::move(b));
    return true;
}

bool domain_contains(const model::Ptda& ptda, const ValidityDomain& vd,
                     const std::map<std::string, Rational>& timing_valuation,
                     const std::map<std::string, model::Value>& param_valuation) {
    std::map<std::uint32_t, Rational> tp_point, vp_point;
    for (const auto& name : ptda.timing_params()) {
        auto it = timing_valuation.find(name);
        if (it == timing_valuation.end())
            throw InputError("no value for timing parameter '" + name + "'");
        tp_point[*ptda.dim_id(name)] = it->second;
    }
    std::map<std::string, std::string> strings;
    for (const auto& [name, sort] : ptda.data_params()) {
        auto it = param_valuation.find(name);
        if (it == param_valuation.end()) throw InputError("no value for data parameter '" + name + "'");
        if (model::sort_of(it->second) != sort)
            throw InputError("data parameter '" + name + "' bound to a value of the wrong sort");
        if (sort == model::Sort::String)
            strings[name] = std::get<std::string>(it->second);
        else
            vp_point[*ptda.dim_id(name)] = std::get<Rational>(it->second);
    }
    for (const auto& block : vd.blocks()) {
        if (!block.timing.contains_point(tp_point)) continue;
        if (!block.numeric.contains_point(vp_point)) continue;
        bool ok = true;
        for (const auto& [name, c] : block.strings)
            if (!c.admits(strings.at(name))) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

namespace {

// Product of the timing and numeric parts as one polyhedron over TP + VP dims.
poly::Polyhedron block_product(const model::Ptda& ptda, const Block& b) {
    std::vector<poly::Dim> dims = *ptda.tp_dims();
    for (const auto& d : *ptda.vp_dims()) dims.push_back(d);
    auto base = poly::Polyhedron::universe(poly::make_dims(std::move(dims)));
    std::vector<poly::LinearAtom> atoms;
    auto push_atoms = [&](const poly::Polyhedron& p) {
        for (const auto& a : p.constraints()) {
            poly::LinearAtom la;
            for (std::size_t i = 0; i < a.coef.size(); ++i)
                if (a.coef[i] != 0) la.terms.emplace_back(p.dims()[i].id, Rational(a.coef[i]));
            la.constant = a.cst;
            la.rel = a.rel;
            atoms.push_back(std::move(la));
        }
    };
    push_atoms(b.timing);
    push_atoms(b.numeric);
    if (b.timing.marked_empty() || b.numeric.marked_empty()) return poly::Polyhedron::bottom(base.dim_vec());
    return base.intersect(atoms);
}

std::vector<std::map<std::string, std::string>> string_assignments(const model::Ptda& ptda,
                                                                   const ValidityDomain& a,
                                                                   const ValidityDomain& b) {
    std::vector<std::string> params = ptda.string_param_names();
    std::map<std::string, std::set<std::string>> mentioned;
    for (const auto& p : params) mentioned[p] = {};
    for (const ValidityDomain* vd : {&a, &b})
        for (const auto& block : vd->blocks())
            for (const auto& [name, c] : block.strings) {
                if (c.is_equals())
                    mentioned[name].insert(c.value());
                else
                    mentioned[name].insert(c.excluded().begin(), c.excluded().end());
            }
    std::vector<std::map<std::string, std::string>> out;
    out.emplace_back();
    for (const auto& p : params) {
        std::set<std::string> values = mentioned[p];
        std::string fresh = "@fresh";
        while (values.count(fresh)) fresh += "'";
        values.insert(fresh);
        std::vector<std::map<std::string, std::string>> next;
        for (const auto& partial : out)
            for (const auto& v : values) {
                auto m = partial;
                m[p] = v;
                next.push_back(std::move(m));
            }
        out = std::move(next);
        if (out.size() > 100000) throw InputError("domain comparison over too many string combinations");
    }
    return out;
}

}  // namespace

bool domain_includes(const model::Ptda& ptda, const ValidityDomain& super, const ValidityDomain& sub) {
    if (sub.blocks().empty()) return true;
    auto assignments = string_assignments(ptda, super, sub);
    std::vector<poly::Dim> dims = *ptda.tp_dims();
    for (const auto& d : *ptda.vp_dims()) dims.push_back(d);
    auto prod_dims = poly::make_dims(std::move(dims));
    std::vector<poly::Polyhedron> super_products, sub_products;
    super_products.reserve(super.blocks().size());
    for (const auto& blk : super.blocks()) super_products.push_back(block_product(ptda, blk));
    sub_products.reserve(sub.blocks().size());
    for (const auto& blk : sub.blocks()) sub_products.push_back(block_product(ptda, blk));
    for (const auto& assignment : assignments) {
        auto admitted = [&](const Block& blk) {
            for (const auto& [name, c] : blk.strings)
                if (!c.admits(assignment.at(name))) return false;
            return true;
        };
        poly::PolySet cover(prod_dims);
        bool cover_built = false;
        for (std::size_t i = 0; i < sub.blocks().size(); ++i) {
            if (!admitted(sub.blocks()[i])) continue;
            if (!cover_built) {
                for (std::size_t j = 0; j < super.blocks().size(); ++j)
                    if (admitted(super.blocks()[j])) cover.add(super_products[j]);
                cover_built = true;
            }
            if (!cover.covers(sub_products[i])) return false;
        }
    }
    return true;
}

bool domain_equal(const model::Ptda& ptda, const ValidityDomain& a, const ValidityDomain& b) {
    return domain_includes(ptda, a, b) && domain_includes(ptda, b, a);
}

ValidityDomain minimize_domain(const ValidityDomain& vd) {
    // Absorption and merging are applied within groups of identical string
    // constraints; cross-group subsumption is rare and left in place.
    std::map<std::string, std::vector<Block>> groups;
    for (const auto& b : vd.blocks()) {
        std::ostringstream key;
        for (const auto& [name, c] : b.strings) {
            key << name << (c.is_equals() ? "=" : "!") << "\"" << (c.is_equals() ? c.value() : "") << "\"";
            for (const auto& s : c.excluded()) key << "\"" << s << "\",";
            key << ";";
        }
        groups[key.str()].push_back(b);
    }
    ValidityDomain out;
    for (auto& [key, blocks] : groups) {
        (void)key;
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<bool> drop(blocks.size(), false);
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                if (drop[i]) continue;
                for (std::size_t j = 0; j < blocks.size(); ++j) {
                    if (i == j || drop[i] || drop[j]) continue;
                    if (block_includes(blocks[j], blocks[i]) &&
                        (!block_includes(blocks[i], blocks[j]) || j < i)) {
                        drop[i] = true;
                        changed = true;
                    }
                }
            }
            std::vector<Block> kept;
            for (std::size_t i = 0; i < blocks.size(); ++i)
                if (!drop[i]) kept.push_back(std::move(blocks[i]));
            blocks = std::move(kept);
            for (std::size_t i = 0; i < blocks.size() && !changed; ++i) {
                for (std::size_t j = i + 1; j < blocks.size() && !changed; ++j) {
                    if (blocks[i].timing.same_set(blocks[j].timing)) {
                        if (auto m = blocks[i].numeric.try_merge(blocks[j].numeric)) {
                            blocks[i].numeric = std::move(*m);
                            blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(j));
                            changed = true;
                        }
                    } else if (blocks[i].numeric.same_set(blocks[j].numeric)) {
                        if (auto m = blocks[i].timing.try_merge(blocks[j].timing)) {
                            blocks[i].timing = std::move(*m);
                            blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(j));
                            changed = true;
                        }
                    }
                }
            }
        }
        for (auto& b : blocks) out.add(std::move(b));
    }
    return out;
}

std::vector<Configuration> merge_confs(std::vector<Configuration> confs) {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < confs.size(); ++i) {
        std::string key = std::to_string(confs[i].location) + "|" + confs[i].timed.canonical_key() +
                          "|" + confs[i].data.strings.canonical_key();
        groups[key].push_back(i);
    }
    std::vector<Configuration> out;
    out.reserve(confs.size());
    for (auto& [key, idxs] : groups) {
        (void)key;
        std::vector<Configuration> group;
        for (auto i : idxs) group.push_back(std::move(confs[i]));
        bool merged_any = true;
        while (merged_any) {
            merged_any = false;
            for (std::size_t i = 0; i < group.size() && !merged_any; ++i)
                for (std::size_t j = i + 1; j < group.size() && !merged_any; ++j) {
                    if (auto m = group[i].data.numeric.try_merge(group[j].data.numeric)) {
                        group[i].data.numeric = std::move(*m);
                        group.erase(group.begin() + static_cast<std::ptrdiff_t>(j));
                        merged_any = true;
                    }
                }
        }
        for (auto& c : group) out.push_back(std::move(c));
    }
    return out;
}

Monitor::Monitor(const model::Ptda& ptda, MonitorOptions options)
    : ptda_(ptda), options_(std::move(options)) {
    current_.push_back(Configuration{ptda_.initial_location(), ptda_.initial_timed(),
                                     DataConf{ptda_.initial_strings(), ptda_.initial_data()}});
    if (current_.back().timed.is_empty() || current_.back().data.numeric.is_empty())
        current_.clear();  // contradictory initial constraint
    for (const auto& d : *ptda_.data_dims())
        if (d.kind == poly::DimKind::NumericVar) var_ids_.insert(d.id);
    clock_and_elapsed_ = ptda_.clock_ids();
    clock_and_elapsed_.insert(ptda_.elapsed_dim_id());
    clocks_and_elapsed_removed_ = clock_and_elapsed_;
    peak_confs_ = current_.size();
}

std::optional<DataConf> Monitor::apply_data(const model::Edge& edge, const DataConf& data,
                                            const model::Event* ev,
                                            const std::map<std::string, std::string>* slocals) const {
    static const std::map<std::string, std::string> no_locals;
    const auto& locals = slocals ? *slocals : no_locals;
    strdom::StringState st = data.strings;
    for (const auto& atom : edge.string_guard) {
        auto next = st.assume_atom(atom, locals);
        if (!next) return std::nullopt;
        st = std::move(*next);
    }
    const std::vector<model::Value>* args = ev ? &ev->args : nullptr;
    poly::Polyhedron num = data.numeric;
    if (!edge.data_guard.empty()) {
        std::vector<poly::LinearAtom> atoms;
        atoms.reserve(edge.data_guard.size());
        for (const auto& a : edge.data_guard) atoms.push_back(model::instantiate_atom(a, args));
        num = num.intersect(atoms);
        if (num.is_empty()) return std::nullopt;
    }
    if (!edge.string_updates.empty()) st = st.apply_update(edge.string_updates, locals);
    if (!edge.numeric_updates.empty()) {
        std::vector<std::pair<std::uint32_t, poly::LinearExpr>> updates;
        updates.reserve(edge.numeric_updates.size());
        for (const auto& [dim, expr] : edge.numeric_updates)
            updates.emplace_back(dim, model::instantiate_expr(expr, args));
        num = num.assign_all(updates);
    }
    return DataConf{std::move(st), std::move(num)};
}

void Monitor::emit(std::size_t index, Block block, std::vector<Block>& out) {
    ++blocks_found_;
    if (options_.store_results) {
        Block copy = block;
        if (!result_.add(std::move(copy))) return;  // syntactic duplicate
    }
    if (options_.sink) options_.sink(index, block);
    out.push_back(std::move(block));
}

std::vector<Block> Monitor::step(model::Event ev) {
    if (finalized_) throw InputError("monitor already finalized");
    ptda_.check_event(ev);
    if (ev.timestamp < last_ts_)
        throw InputError("timestamp regression: " + to_string(ev.timestamp) + " after " +
                         to_string(last_ts_));
    const Rational delta = ev.timestamp - last_ts_;
    const std::size_t index = event_index_ + 1;
    std::vector<Block> found;
    std::vector<Configuration> next;

    // Unobservable saturation between the previous and the current event.
    if (ptda_.has_eps_edges() && sgn(delta) > 0) {
        poly::Dim elapsed{ptda_.elapsed_dim_id(), poly::DimKind::Elapsed, "$t"};
        std::vector<UConfiguration> stack;
        for (const auto& conf : current_) {
            if (ptda_.eps_edges_from(conf.location).empty()) continue;
            auto lifted = conf.timed.with_dim(elapsed).intersect(
                {poly::LinearAtom::cmp(elapsed.id, poly::Rel::Eq, 0)});
            stack.push_back(UConfiguration{conf.location, std::move(lifted), conf.data});
        }
        while (!stack.empty()) {
            UConfiguration u = std::move(stack.back());
            stack.pop_back();
            if (ptda_.eps_edges_from(u.location).empty()) continue;
            auto flowed = u.timed_plus.elapse(clock_and_elapsed_, /*strict=*/true)
                              .intersect({poly::LinearAtom::cmp(elapsed.id, poly::Rel::Le, delta)});
            if (flowed.is_empty()) continue;
            for (const model::Edge* e : ptda_.eps_edges_from(u.location)) {
                poly::Polyhedron vt = flowed;
                if (!e->timed_guard.empty()) {
                    std::vector<poly::LinearAtom> atoms;
                    for (const auto& a : e->timed_guard)
                        atoms.push_back(model::instantiate_atom(a, nullptr));
                    vt = vt.intersect(atoms);
                    if (vt.is_empty()) continue;
                }
                if (!e->resets.empty()) vt = vt.reset(e->resets);
                auto vd = apply_data(*e, u.data, nullptr, nullptr);
                if (!vd) continue;
                if (ptda_.accepting(e->target)) {
                    Block block{vt.eliminate(clocks_and_elapsed_removed_),
                                vd->strings.project_params(),
                                vd->numeric.eliminate(var_ids_)};
                    emit(index, std::move(block), found);
                }
                next.push_back(Configuration{
                    e->target, vt.shift_minus_dim(ptda_.clock_ids(), delta, elapsed.id), *vd});
                stack.push_back(UConfiguration{e->target, std::move(vt), std::move(*vd)});
                peak_confs_ = std::max(peak_confs_, current_.size() + next.size() + stack.size());
            }
        }
    }

    // Time elapse of the surviving configurations to the new timestamp.
    for (auto& conf : current_)
        next.push_back(Configuration{conf.location, conf.timed.shift(ptda_.clock_ids(), delta),
                                     std::move(conf.data)});
    current_ = std::move(next);
    next.clear();

    // Observable step.
    const auto slocals = ptda_.string_locals(ev);
    for (const auto& conf : current_) {
        for (const model::Edge* e : ptda_.obs_edges_from(conf.location, ev.action_index)) {
            poly::Polyhedron vt = conf.timed;
            if (!e->timed_guard.empty()) {
                std::vector<poly::LinearAtom> atoms;
                for (const auto& a : e->timed_guard) atoms.push_back(model::instantiate_atom(a, nullptr));
                vt = vt.intersect(atoms);
                if (vt.is_empty()) continue;
            }
            if (!e->resets.empty()) vt = vt.reset(e->resets);
            auto vd = apply_data(*e, conf.data, &ev, &slocals);
            if (!vd) continue;
            if (ptda_.accepting(e->target)) {
                Block block{vt.eliminate(ptda_.clock_ids()), vd->strings.project_params(),
                            vd->numeric.eliminate(var_ids_)};
                emit(index, std::move(block), found);
            }
            next.push_back(Configuration{e->target, std::move(vt), std::move(*vd)});
            peak_confs_ = std::max(peak_confs_, current_.size() + next.size());
        }
    }
    current_ = options_.merging ? merge_confs(std::move(next)) : std::move(next);
    peak_confs_ = std::max(peak_confs_, current_.size());
    last_ts_ = ev.timestamp;
    ++event_index_;
    return found;
}

std::vector<Block> Monitor::finalize() {
    if (finalized_) throw InputError("monitor already finalized");
    finalized_ = true;
    std::vector<Block> found;
    if (!ptda_.has_eps_edges()) return found;
    const std::size_t index = event_index_ + 1;
    std::vector<Configuration> stack = std::move(current_);
    current_.clear();
    while (!stack.empty()) {
        Configuration c = std::move(stack.back());
        stack.pop_back();
        if (ptda_.eps_edges_from(c.location).empty()) continue;
        auto flowed = c.timed.elapse(ptda_.clock_ids(), /*strict=*/true);
        if (flowed.is_empty()) continue;
        for (const model::Edge* e : ptda_.eps_edges_from(c.location)) {
            poly::Polyhedron vt = flowed;
            if (!e->timed_guard.empty()) {
                std::vector<poly::LinearAtom> atoms;
                for (const auto& a : e->timed_guard) atoms.push_back(model::instantiate_atom(a, nullptr));
                vt = vt.intersect(atoms);
                if (vt.is_empty()) continue;
            }
            if (!e->resets.empty()) vt = vt.reset(e->resets);
            auto vd = apply_data(*e, c.data, nullptr, nullptr);
            if (!vd) continue;
            if (ptda_.accepting(e->target)) {
                Block block{vt.eliminate(ptda_.clock_ids()), vd->strings.project_params(),
                            vd->numeric.eliminate(var_ids_)};
                emit(index, std::move(block), found);
            }
            stack.push_back(Configuration{e->target, std::move(vt), std::move(*vd)});
        }
    }
    return found;
}

}  // namespace ptdmon::monitor
