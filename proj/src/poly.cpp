#include "ptdmon/poly.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace ptdmon::poly {

namespace {

int rel_rank(Rel r) {
    switch (r) {
        case Rel::Eq: return 0;
        case Rel::Lt: return 1;
        default: return 2;
    }
}

const char* rel_symbol(Rel r) {
    switch (r) {
        case Rel::Eq: return "=";
        case Rel::Lt: return "<";
        default: return "<=";
    }
}

// 1 trivially true, -1 trivially false, 0 normal atom written to `out`.
int normalize_raw(std::vector<Rational> rcoef, Rational rcst, Rel rel, Polyhedron::Atom& out) {
    if (rel == Rel::Ge || rel == Rel::Gt) {
        for (auto& c : rcoef) c = -c;
        rcst = -rcst;
        rel = (rel == Rel::Ge) ? Rel::Le : Rel::Lt;
    }
    bool all_zero = true;
    for (const auto& c : rcoef)
        if (c != 0) {
            all_zero = false;
            break;
        }
    if (all_zero) {
        int s = sgn(rcst);
        bool ok = (rel == Rel::Eq) ? (s == 0) : (rel == Rel::Lt ? s < 0 : s <= 0);
        return ok ? 1 : -1;
    }
    Integer scale = 1;
    for (const auto& c : rcoef) scale = lcm(scale, c.get_den());
    std::vector<Integer> icoef(rcoef.size());
    for (std::size_t i = 0; i < rcoef.size(); ++i) {
        Rational t = rcoef[i] * scale;
        icoef[i] = t.get_num();
    }
    Rational cst = rcst * scale;
    Integer g = 0;
    for (const auto& c : icoef) g = gcd(g, c);
    if (g > 1) {
        for (auto& c : icoef) c /= g;
        cst /= g;
    }
    if (rel == Rel::Eq) {
        for (const auto& c : icoef) {
            if (c == 0) continue;
            if (c < 0) {
                for (auto& x : icoef) x = -x;
                cst = -cst;
            }
            break;
        }
    }
    out.coef = std::move(icoef);
    out.cst = std::move(cst);
    out.rel = rel;
    return 0;
}

// Re-normalizes an atom produced by a positive combination (coefficients
// already integers). Same return convention as normalize_raw.
int primitivize(Polyhedron::Atom& a) {
    bool all_zero = true;
    for (const auto& c : a.coef)
        if (c != 0) {
            all_zero = false;
            break;
        }
    if (all_zero) {
        int s = sgn(a.cst);
        bool ok = (a.rel == Rel::Eq) ? (s == 0) : (a.rel == Rel::Lt ? s < 0 : s <= 0);
        return ok ? 1 : -1;
    }
    Integer g = 0;
    for (const auto& c : a.coef) g = gcd(g, c);
    if (g > 1) {
        for (auto& c : a.coef) c /= g;
        a.cst /= g;
    }
    if (a.rel == Rel::Eq) {
        for (const auto& c : a.coef) {
            if (c == 0) continue;
            if (c < 0) {
                for (auto& x : a.coef) x = -x;
                a.cst = -a.cst;
            }
            break;
        }
    }
    return 0;
}

bool atom_less(const Polyhedron::Atom& a, const Polyhedron::Atom& b) {
    for (std::size_t i = 0; i < a.coef.size(); ++i) {
        int c = cmp(a.coef[i], b.coef[i]);
        if (c != 0) return c < 0;
    }
    if (rel_rank(a.rel) != rel_rank(b.rel)) return rel_rank(a.rel) < rel_rank(b.rel);
    return cmp(a.cst, b.cst) < 0;
}

bool coef_equal(const std::vector<Integer>& a, const std::vector<Integer>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

bool coef_opposite(const std::vector<Integer>& a, const std::vector<Integer>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != -b[i]) return false;
    return true;
}

// Deduplication, single-constraint subsumption, and pairwise contradiction
// probes over opposite-direction bounds; sets `empty` on contradiction.
void canonicalize(std::vector<Polyhedron::Atom>& atoms, bool& empty) {
    if (empty) {
        atoms.clear();
        return;
    }
    bool changed = true;
    while (changed && !empty) {
        changed = false;
        // Constant atoms introduced by combinations.
        for (std::size_t i = 0; i < atoms.size();) {
            int v = primitivize(atoms[i]);
            if (v == -1) {
                empty = true;
                break;
            }
            if (v == 1) {
                atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
            } else {
                ++i;
            }
        }
        if (empty) break;
        std::vector<bool> drop(atoms.size(), false);
        std::vector<Polyhedron::Atom> added;
        for (std::size_t i = 0; i < atoms.size() && !empty; ++i) {
            if (drop[i]) continue;
            for (std::size_t j = i + 1; j < atoms.size() && !empty; ++j) {
                if (drop[j]) continue;
                const auto& A = atoms[i];
                const auto& B = atoms[j];
                if (coef_equal(A.coef, B.coef)) {
                    if (A.rel == Rel::Eq && B.rel == Rel::Eq) {
                        if (A.cst == B.cst)
                            drop[j] = true;
                        else
                            empty = true;
                    } else if (A.rel == Rel::Eq || B.rel == Rel::Eq) {
                        const auto& eq = (A.rel == Rel::Eq) ? A : B;
                        const auto& in = (A.rel == Rel::Eq) ? B : A;
                        // value of the expression is -eq.cst; check in: e + cst REL 0
                        Rational v = in.cst - eq.cst;
                        bool ok = (in.rel == Rel::Lt) ? v < 0 : v <= 0;
                        if (ok)
                            drop[(A.rel == Rel::Eq) ? j : i] = true;
                        else
                            empty = true;
                    } else {
                        int c = cmp(A.cst, B.cst);
                        if (c > 0 || (c == 0 && (A.rel == Rel::Lt || B.rel == Rel::Le)))
                            drop[j] = true;
                        else
                            drop[i] = true;
                    }
                    changed = true;
                } else if (coef_opposite(A.coef, B.coef)) {
                    // With e = A.coef*x: A bounds e above (e <= -A.cst, strict iff
                    // Lt, pinned if Eq); B bounds e below (e >= B.cst likewise).
                    Rational up = -A.cst, lo = B.cst;
                    bool up_strict = A.rel == Rel::Lt, lo_strict = B.rel == Rel::Lt;
                    int c = cmp(lo, up);
                    if (c > 0 || (c == 0 && (up_strict || lo_strict))) {
                        empty = true;
                    } else if (A.rel == Rel::Eq && B.rel == Rel::Eq) {
                        if (c == 0) {
                            drop[j] = true;  // same hyperplane, flipped signs
                            changed = true;
                        } else {
                            empty = true;
                        }
                    } else if (A.rel == Rel::Eq) {
                        drop[j] = true;  // bound implied by the pinned value
                        changed = true;
                    } else if (B.rel == Rel::Eq) {
                        drop[i] = true;
                        changed = true;
                    } else if (c == 0) {
                        // lo == up, both non-strict: tighten into an equality.
                        Polyhedron::Atom eq{A.coef, A.cst, Rel::Eq};
                        primitivize(eq);
                        drop[i] = drop[j] = true;
                        added.push_back(std::move(eq));
                        changed = true;
                    }
                }
                if (drop[i]) break;
            }
        }
        if (empty) break;
        std::vector<Polyhedron::Atom> kept;
        kept.reserve(atoms.size() + added.size());
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (!drop[i]) kept.push_back(std::move(atoms[i]));
        for (auto& a : added) kept.push_back(std::move(a));
        atoms = std::move(kept);
    }
    if (empty) {
        atoms.clear();
        return;
    }
    std::sort(atoms.begin(), atoms.end(), atom_less);
    atoms.erase(std::unique(atoms.begin(), atoms.end(),
                            [](const Polyhedron::Atom& a, const Polyhedron::Atom& b) {
                                return a.rel == b.rel && a.cst == b.cst && coef_equal(a.coef, b.coef);
                            }),
                atoms.end());
}

// Removes all dependence on column k (Fourier-Motzkin / Gaussian step); the
// column itself stays, zeroed.
void fm_zero_column(std::vector<Polyhedron::Atom>& atoms, std::size_t k, bool& empty) {
    if (empty) return;
    std::ptrdiff_t pivot = -1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].rel == Rel::Eq && atoms[i].coef[k] != 0) {
            if (pivot < 0 || cmp(abs(atoms[i].coef[k]), abs(atoms[pivot].coef[k])) < 0)
                pivot = static_cast<std::ptrdiff_t>(i);
        }
    }
    std::vector<Polyhedron::Atom> out;
    out.reserve(atoms.size());
    if (pivot >= 0) {
        Polyhedron::Atom eq = atoms[static_cast<std::size_t>(pivot)];
        const Integer& e = eq.coef[k];
        Integer abse = abs(e);
        int se = sgn(e);
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (i == static_cast<std::size_t>(pivot)) continue;
            const auto& a = atoms[i];
            if (a.coef[k] == 0) {
                out.push_back(a);
                continue;
            }
            Integer m = a.coef[k] * se;  // eq multiplier is -m, atom multiplier abse > 0
            Polyhedron::Atom n;
            n.rel = a.rel;
            n.coef.resize(a.coef.size());
            for (std::size_t c = 0; c < a.coef.size(); ++c) n.coef[c] = a.coef[c] * abse - eq.coef[c] * m;
            n.cst = a.cst * Rational(abse) - eq.cst * Rational(m);
            assert(n.coef[k] == 0);
            out.push_back(std::move(n));
        }
    } else {
        std::vector<std::size_t> pos, neg;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            int s = sgn(atoms[i].coef[k]);
            if (s == 0)
                out.push_back(atoms[i]);
            else if (s > 0)
                pos.push_back(i);
            else
                neg.push_back(i);
        }
        for (std::size_t ip : pos) {
            for (std::size_t in : neg) {
                const auto& p = atoms[ip];
                const auto& n = atoms[in];
                Integer mp = -n.coef[k];  // > 0
                Integer mn = p.coef[k];   // > 0
                Polyhedron::Atom c;
                c.rel = (p.rel == Rel::Lt || n.rel == Rel::Lt) ? Rel::Lt : Rel::Le;
                c.coef.resize(p.coef.size());
                for (std::size_t x = 0; x < p.coef.size(); ++x)
                    c.coef[x] = p.coef[x] * mp + n.coef[x] * mn;
                c.cst = p.cst * Rational(mp) + n.cst * Rational(mn);
                assert(c.coef[k] == 0);
                out.push_back(std::move(c));
            }
        }
    }
    atoms = std::move(out);
    canonicalize(atoms, empty);
}

// Eliminates several columns, cheapest first.
void fm_zero_columns(std::vector<Polyhedron::Atom>& atoms, std::vector<std::size_t> cols, bool& empty) {
    while (!cols.empty() && !empty) {
        std::size_t best = 0;
        long best_cost = -1;
        for (std::size_t ci = 0; ci < cols.size(); ++ci) {
            std::size_t k = cols[ci];
            long p = 0, n = 0;
            bool eq = false;
            for (const auto& a : atoms) {
                int s = sgn(a.coef[k]);
                if (s == 0) continue;
                if (a.rel == Rel::Eq) eq = true;
                (s > 0 ? p : n)++;
            }
            long cost = eq ? 0 : p * n;
            if (best_cost < 0 || cost < best_cost) {
                best_cost = cost;
                best = ci;
            }
        }
        std::size_t k = cols[best];
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(best));
        fm_zero_column(atoms, k, empty);
    }
}

std::vector<Polyhedron::Atom> negation_pieces(const Polyhedron::Atom& a) {
    std::vector<Polyhedron::Atom> out;
    auto negated = [&]() {
        Polyhedron::Atom n;
        n.coef.resize(a.coef.size());
        for (std::size_t i = 0; i < a.coef.size(); ++i) n.coef[i] = -a.coef[i];
        n.cst = -a.cst;
        return n;
    };
    switch (a.rel) {
        case Rel::Le: {
            auto n = negated();
            n.rel = Rel::Lt;
            out.push_back(std::move(n));
            break;
        }
        case Rel::Lt: {
            auto n = negated();
            n.rel = Rel::Le;
            out.push_back(std::move(n));
            break;
        }
        default: {  // Eq
            Polyhedron::Atom lt{a.coef, a.cst, Rel::Lt};
            out.push_back(std::move(lt));
            auto gt = negated();
            gt.rel = Rel::Lt;
            out.push_back(std::move(gt));
        }
    }
    return out;
}

}  // namespace

DimVec make_dims(std::vector<Dim> dims) {
    for (std::size_t i = 0; i < dims.size(); ++i)
        for (std::size_t j = i + 1; j < dims.size(); ++j)
            if (dims[i].id == dims[j].id)
                throw PolyError("duplicate dimension id in dimension set: " + dims[i].name);
    return std::make_shared<const std::vector<Dim>>(std::move(dims));
}

Polyhedron::Polyhedron(DimVec dims, std::vector<Atom> atoms, bool empty)
    : dims_(std::move(dims)), atoms_(std::move(atoms)), empty_(empty) {
    if (empty_) atoms_.clear();
}

Polyhedron Polyhedron::universe(DimVec dims) { return Polyhedron(std::move(dims), {}, false); }

Polyhedron Polyhedron::bottom(DimVec dims) { return Polyhedron(std::move(dims), {}, true); }

std::size_t Polyhedron::position_of(std::uint32_t dim_id, const char* what) const {
    for (std::size_t i = 0; i < dims_->size(); ++i)
        if ((*dims_)[i].id == dim_id) return i;
    throw PolyError(std::string(what) + ": unknown dimension id " + std::to_string(dim_id));
}

Polyhedron Polyhedron::intersect(const std::vector<LinearAtom>& atoms) const {
    if (empty_) return *this;
    std::vector<Atom> extra;
    extra.reserve(atoms.size());
    bool empty = false;
    for (const auto& la : atoms) {
        std::vector<Rational> rcoef(dims_->size(), Rational(0));
        for (const auto& [id, q] : la.terms) rcoef[position_of(id, "intersect")] += q;
        Atom a;
        int v = normalize_raw(std::move(rcoef), la.constant, la.rel, a);
        if (v == -1) {
            empty = true;
            break;
        }
        if (v == 0) extra.push_back(std::move(a));
    }
    if (empty) return bottom(dims_);
    return intersect_atoms(std::move(extra));
}

Polyhedron Polyhedron::intersect_atoms(std::vector<Atom> extra) const {
    if (empty_) return *this;
    std::vector<Atom> all = atoms_;
    for (auto& a : extra) all.push_back(std::move(a));
    bool empty = false;
    canonicalize(all, empty);
    return Polyhedron(dims_, std::move(all), empty);
}

bool Polyhedron::is_empty() const {
    if (empty_) return true;
    if (atoms_.empty()) return false;
    std::vector<Atom> work = atoms_;
    bool empty = false;
    std::vector<std::size_t> cols(dims_->size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
    fm_zero_columns(work, std::move(cols), empty);
    return empty;
}

Polyhedron Polyhedron::eliminate(const std::set<std::uint32_t>& removed) const {
    std::vector<std::size_t> cols;
    for (auto id : removed) cols.push_back(position_of(id, "eliminate"));
    std::vector<Dim> new_dims;
    for (std::size_t i = 0; i < dims_->size(); ++i)
        if (!removed.count((*dims_)[i].id)) new_dims.push_back((*dims_)[i]);
    if (empty_) return bottom(make_dims(std::move(new_dims)));
    std::vector<Atom> work = atoms_;
    bool empty = false;
    fm_zero_columns(work, cols, empty);
    std::sort(cols.begin(), cols.end(), std::greater<>());
    for (auto& a : work)
        for (auto c : cols) a.coef.erase(a.coef.begin() + static_cast<std::ptrdiff_t>(c));
    canonicalize(work, empty);
    return Polyhedron(make_dims(std::move(new_dims)), std::move(work), empty);
}

Polyhedron Polyhedron::reset(const std::set<std::uint32_t>& zeroed) const {
    if (empty_) return *this;
    std::vector<std::size_t> cols;
    for (auto id : zeroed) cols.push_back(position_of(id, "reset"));
    std::vector<Atom> work = atoms_;
    bool empty = false;
    fm_zero_columns(work, cols, empty);
    for (auto c : cols) {
        Atom eq;
        eq.coef.assign(dims_->size(), Integer(0));
        eq.coef[c] = 1;
        eq.cst = 0;
        eq.rel = Rel::Eq;
        work.push_back(std::move(eq));
    }
    canonicalize(work, empty);
    return Polyhedron(dims_, std::move(work), empty);
}

Polyhedron Polyhedron::assign(std::uint32_t target, const LinearExpr& expr) const {
    return assign_all({{target, expr}});
}

Polyhedron Polyhedron::assign_all(const std::vector<std::pair<std::uint32_t, LinearExpr>>& updates) const {
    if (updates.empty() || empty_) return *this;
    const std::size_t n = dims_->size();
    const std::size_t m = updates.size();
    std::vector<std::size_t> targets;
    for (const auto& [id, expr] : updates) {
        std::size_t t = position_of(id, "assign");
        if (std::find(targets.begin(), targets.end(), t) != targets.end())
            throw PolyError("assign: duplicate target dimension");
        targets.push_back(t);
        (void)expr;
    }
    std::vector<Atom> work = atoms_;
    for (auto& a : work) a.coef.resize(n + m, Integer(0));
    bool empty = false;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Rational> rcoef(n + m, Rational(0));
        for (const auto& [id, q] : updates[i].second.terms) rcoef[position_of(id, "assign")] += q;
        rcoef[n + i] = -1;
        Atom a;
        int v = normalize_raw(std::move(rcoef), updates[i].second.constant, Rel::Eq, a);
        assert(v == 0);
        (void)v;
        work.push_back(std::move(a));
    }
    fm_zero_columns(work, targets, empty);
    for (auto& a : work) {
        for (std::size_t i = 0; i < m; ++i) a.coef[targets[i]] = a.coef[n + i];
        a.coef.resize(n);
    }
    canonicalize(work, empty);
    return Polyhedron(dims_, std::move(work), empty);
}

Polyhedron Polyhedron::elapse(const std::set<std::uint32_t>& flowing, bool strict) const {
    if (empty_) return *this;
    const std::size_t n = dims_->size();
    std::vector<std::size_t> fpos;
    for (auto id : flowing) {
        std::size_t p = position_of(id, "elapse");
        if (kind_is_param((*dims_)[p].kind))
            throw PolyError("elapse: parameter dimension '" + (*dims_)[p].name + "' cannot flow");
        fpos.push_back(p);
    }
    std::vector<Atom> work = atoms_;
    for (auto& a : work) {
        Integer s = 0;
        for (auto p : fpos) s += a.coef[p];
        a.coef.resize(n + 1, Integer(0));
        a.coef[n] = -s;
    }
    Atom pos;
    pos.coef.assign(n + 1, Integer(0));
    pos.coef[n] = -1;
    pos.cst = 0;
    pos.rel = strict ? Rel::Lt : Rel::Le;
    work.push_back(std::move(pos));
    bool empty = false;
    fm_zero_column(work, n, empty);
    for (auto& a : work) a.coef.resize(n);
    canonicalize(work, empty);
    return Polyhedron(dims_, std::move(work), empty);
}

Polyhedron Polyhedron::shift(const std::set<std::uint32_t>& flowing, const Rational& amount) const {
    if (sgn(amount) < 0) throw PolyError("shift: negative amount");
    if (empty_ || sgn(amount) == 0) return *this;
    std::vector<std::size_t> fpos;
    for (auto id : flowing) {
        std::size_t p = position_of(id, "shift");
        if (kind_is_param((*dims_)[p].kind))
            throw PolyError("shift: parameter dimension '" + (*dims_)[p].name + "' cannot flow");
        fpos.push_back(p);
    }
    std::vector<Atom> work = atoms_;
    for (auto& a : work) {
        Integer s = 0;
        for (auto p : fpos) s += a.coef[p];
        a.cst -= amount * Rational(s);
    }
    bool empty = false;
    canonicalize(work, empty);
    return Polyhedron(dims_, std::move(work), empty);
}

Polyhedron Polyhedron::shift_minus_dim(const std::set<std::uint32_t>& flowing, const Rational& amount,
                                       std::uint32_t subtrahend) const {
    if (sgn(amount) < 0) throw PolyError("shift: negative amount");
    std::size_t sub = position_of(subtrahend, "shift");
    std::vector<Dim> new_dims;
    for (std::size_t i = 0; i < dims_->size(); ++i)
        if (i != sub) new_dims.push_back((*dims_)[i]);
    if (empty_) return bottom(make_dims(std::move(new_dims)));
    std::vector<std::size_t> fpos;
    for (auto id : flowing) {
        std::size_t p = position_of(id, "shift");
        if (kind_is_param((*dims_)[p].kind))
            throw PolyError("shift: parameter dimension '" + (*dims_)[p].name + "' cannot flow");
        fpos.push_back(p);
    }
    std::vector<Atom> work = atoms_;
    for (auto& a : work) {
        Integer s = 0;
        for (auto p : fpos) s += a.coef[p];
        a.coef[sub] += s;
        a.cst -= amount * Rational(s);
        primitivize(a);
    }
    bool empty = false;
    fm_zero_column(work, sub, empty);
    for (auto& a : work) a.coef.erase(a.coef.begin() + static_cast<std::ptrdiff_t>(sub));
    canonicalize(work, empty);
    return Polyhedron(make_dims(std::move(new_dims)), std::move(work), empty);
}

bool Polyhedron::contains_point(const std::map<std::uint32_t, Rational>& point) const {
    if (empty_) return false;
    std::vector<Rational> vals(dims_->size());
    for (std::size_t i = 0; i < dims_->size(); ++i) {
        auto it = point.find((*dims_)[i].id);
        if (it == point.end())
            throw PolyError("contains_point: no value for dimension '" + (*dims_)[i].name + "'");
        vals[i] = it->second;
    }
    for (const auto& a : atoms_) {
        Rational v = a.cst;
        for (std::size_t i = 0; i < vals.size(); ++i)
            if (a.coef[i] != 0) v += Rational(a.coef[i]) * vals[i];
        int s = sgn(v);
        bool ok = (a.rel == Rel::Eq) ? (s == 0) : (a.rel == Rel::Lt ? s < 0 : s <= 0);
        if (!ok) return false;
    }
    return true;
}

bool Polyhedron::includes(const Polyhedron& other) const {
    if (dims_->size() != other.dims_->size())
        throw PolyError("includes: dimension sets differ");
    for (std::size_t i = 0; i < dims_->size(); ++i)
        if ((*dims_)[i].id != (*other.dims_)[i].id) throw PolyError("includes: dimension sets differ");
    if (other.empty_) return true;
    if (empty_) return other.is_empty();
    for (const auto& a : atoms_)
        for (auto& piece : negation_pieces(a))
            if (!other.intersect_atoms({piece}).is_empty()) return false;
    return true;
}

bool Polyhedron::same_set(const Polyhedron& other) const {
    return includes(other) && other.includes(*this);
}

Polyhedron Polyhedron::with_dim(const Dim& d) const {
    std::vector<Dim> nd = *dims_;
    for (const auto& existing : nd)
        if (existing.id == d.id) throw PolyError("with_dim: dimension id already present");
    nd.push_back(d);
    std::vector<Atom> work = atoms_;
    for (auto& a : work) a.coef.resize(nd.size(), Integer(0));
    return Polyhedron(make_dims(std::move(nd)), std::move(work), empty_);
}

std::optional<Polyhedron> Polyhedron::try_merge(const Polyhedron& other) const {
    if (dims_->size() != other.dims_->size())
        throw PolyError("try_merge: dimension sets differ");
    for (std::size_t i = 0; i < dims_->size(); ++i)
        if ((*dims_)[i].id != (*other.dims_)[i].id)
            throw PolyError("try_merge: dimension sets differ");
    if (empty_ || other.empty_) return empty_ ? other : *this;
    auto valid_for = [](const Polyhedron& p, const Atom& a) {
        for (auto& piece : negation_pieces(a))
            if (!p.intersect_atoms({piece}).is_empty()) return false;
        return true;
    };
    std::vector<Atom> env_atoms;
    for (const auto& a : atoms_)
        if (valid_for(other, a)) env_atoms.push_back(a);
    for (const auto& a : other.atoms_)
        if (valid_for(*this, a)) env_atoms.push_back(a);
    bool empty = false;
    canonicalize(env_atoms, empty);
    Polyhedron env(dims_, std::move(env_atoms), empty);
    for (const auto& piece : subtract(env, *this))
        for (const auto& rest : subtract(piece, other))
            if (!rest.is_empty()) return std::nullopt;
    return env;
}

std::vector<Polyhedron> subtract(const Polyhedron& p, const Polyhedron& q) {
    if (p.dims_->size() != q.dims_->size()) throw PolyError("subtract: dimension sets differ");
    for (std::size_t i = 0; i < p.dims_->size(); ++i)
        if ((*p.dims_)[i].id != (*q.dims_)[i].id) throw PolyError("subtract: dimension sets differ");
    std::vector<Polyhedron> out;
    if (p.empty_ || p.is_empty()) return out;
    if (q.empty_) {
        out.push_back(p);
        return out;
    }
    Polyhedron prefix = p;
    for (const auto& a : q.atoms_) {
        for (auto& piece : negation_pieces(a)) {
            Polyhedron cand = prefix.intersect_atoms({piece});
            if (!cand.is_empty()) out.push_back(std::move(cand));
        }
        prefix = prefix.intersect_atoms({a});
        if (prefix.is_empty()) break;
    }
    return out;
}

std::string Polyhedron::to_string() const {
    if (empty_) return "false";
    if (atoms_.empty()) return "true";
    std::ostringstream os;
    bool first_atom = true;
    for (const auto& a : atoms_) {
        if (!first_atom) os << " && ";
        first_atom = false;
        auto term = [&](const Integer& c, const std::string& name) {
            if (c == 1) return name;
            return c.get_str() + "*" + name;
        };
        std::string lhs, rhs;
        for (std::size_t i = 0; i < a.coef.size(); ++i) {
            if (a.coef[i] > 0) {
                if (!lhs.empty()) lhs += " + ";
                lhs += term(a.coef[i], (*dims_)[i].name);
            } else if (a.coef[i] < 0) {
                if (!rhs.empty()) rhs += " + ";
                rhs += term(-a.coef[i], (*dims_)[i].name);
            }
        }
        Rational rc = -a.cst;
        if (lhs.empty()) {
            lhs = ptdmon::to_string(a.cst);
        } else if (rhs.empty()) {
            rhs = ptdmon::to_string(rc);
        } else if (sgn(rc) > 0) {
            rhs += " + " + ptdmon::to_string(rc);
        } else if (sgn(rc) < 0) {
            rhs += " - " + ptdmon::to_string(Rational(-rc));
        }
        if (rhs.empty()) rhs = "0";
        os << lhs << " " << rel_symbol(a.rel) << " " << rhs;
    }
    return os.str();
}

void PolySet::add(Polyhedron p) {
    if (p.dims().size() != dims_->size()) throw PolyError("PolySet::add: dimension sets differ");
    for (std::size_t i = 0; i < dims_->size(); ++i)
        if (p.dims()[i].id != (*dims_)[i].id) throw PolyError("PolySet::add: dimension sets differ");
    if (p.is_empty()) return;
    disjuncts_.push_back(std::move(p));
}

void PolySet::subtract_poly(const Polyhedron& q) {
    std::vector<Polyhedron> next;
    for (const auto& d : disjuncts_)
        for (auto& piece : subtract(d, q)) next.push_back(std::move(piece));
    disjuncts_ = std::move(next);
}

bool PolySet::covers(const Polyhedron& p) const {
    std::vector<Polyhedron> pieces;
    if (!p.is_empty()) pieces.push_back(p);
    for (const auto& d : disjuncts_) {
        if (pieces.empty()) return true;
        std::vector<Polyhedron> next;
        for (const auto& piece : pieces)
            for (auto& rest : subtract(piece, d)) next.push_back(std::move(rest));
        pieces = std::move(next);
    }
    return pieces.empty();
}

bool PolySet::covers(const PolySet& other) const {
    for (const auto& d : other.disjuncts_)
        if (!covers(d)) return false;
    return true;
}

}  // namespace ptdmon::poly
