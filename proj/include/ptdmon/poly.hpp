// Exact rational convex polyhedra in constraint representation, with the
// operations the symbolic monitor needs: intersection, Fourier-Motzkin
// elimination, affine image, time elapse, translation, exact convex union.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ptdmon/rational.hpp"

namespace ptdmon::poly {

enum class DimKind { Clock, TimingParam, NumericVar, NumericParam, Elapsed };

inline bool kind_is_param(DimKind k) {
    return k == DimKind::TimingParam || k == DimKind::NumericParam;
}

struct Dim {
    std::uint32_t id;
    DimKind kind;
    std::string name;
};

using DimVec = std::shared_ptr<const std::vector<Dim>>;

DimVec make_dims(std::vector<Dim> dims);

enum class Rel { Lt, Le, Eq, Ge, Gt };

// Atom for building/intersecting: sum(terms) + constant REL 0.
struct LinearAtom {
    std::vector<std::pair<std::uint32_t, Rational>> terms;
    Rational constant = 0;
    Rel rel = Rel::Le;

    static LinearAtom cmp(std::uint32_t dim, Rel rel, const Rational& bound) {
        // dim REL bound
        LinearAtom a;
        a.terms.emplace_back(dim, Rational(1));
        a.constant = -bound;
        a.rel = rel;
        return a;
    }
};

struct LinearExpr {
    std::vector<std::pair<std::uint32_t, Rational>> terms;
    Rational constant = 0;
};

struct PolyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Polyhedron {
public:
    // Normalized stored atom: primitive integer coefficients aligned with the
    // dimension order, rational constant, rel in {Lt, Le, Eq}.
    struct Atom {
        std::vector<Integer> coef;
        Rational cst;
        Rel rel;
    };

    static Polyhedron universe(DimVec dims);
    static Polyhedron bottom(DimVec dims);

    const std::vector<Dim>& dims() const { return *dims_; }
    const DimVec& dim_vec() const { return dims_; }
    const std::vector<Atom>& constraints() const { return atoms_; }
    bool marked_empty() const { return empty_; }

    Polyhedron intersect(const std::vector<LinearAtom>& atoms) const;
    bool is_empty() const;
    Polyhedron eliminate(const std::set<std::uint32_t>& removed) const;
    Polyhedron reset(const std::set<std::uint32_t>& zeroed) const;
    Polyhedron assign(std::uint32_t target, const LinearExpr& expr) const;
    Polyhedron assign_all(const std::vector<std::pair<std::uint32_t, LinearExpr>>& updates) const;
    Polyhedron elapse(const std::set<std::uint32_t>& flowing, bool strict) const;
    Polyhedron shift(const std::set<std::uint32_t>& flowing, const Rational& amount) const;
    // Image of x_f := x_f + (amount - x_sub) for f in flowing; the subtrahend
    // dimension is projected away from the result.
    Polyhedron shift_minus_dim(const std::set<std::uint32_t>& flowing, const Rational& amount,
                               std::uint32_t subtrahend) const;
    std::optional<Polyhedron> try_merge(const Polyhedron& other) const;
    bool contains_point(const std::map<std::uint32_t, Rational>& point) const;

    bool includes(const Polyhedron& other) const;  // other subset-of this
    bool same_set(const Polyhedron& other) const;
    Polyhedron with_dim(const Dim& d) const;  // append an unconstrained dimension

    std::string to_string() const;
    // Canonical text of the constraint system; equal strings imply equal sets
    // for polyhedra produced by the same operation pipeline.
    std::string canonical_key() const { return to_string(); }

    // p minus q as a finite list of disjoint nonempty polyhedra.
    friend std::vector<Polyhedron> subtract(const Polyhedron& p, const Polyhedron& q);

private:
    Polyhedron(DimVec dims, std::vector<Atom> atoms, bool empty);

    std::size_t position_of(std::uint32_t dim_id, const char* what) const;
    Polyhedron intersect_atoms(std::vector<Atom> extra) const;

    DimVec dims_;
    std::vector<Atom> atoms_;
    bool empty_ = false;
};

std::vector<Polyhedron> subtract(const Polyhedron& p, const Polyhedron& q);

// Finite union of polyhedra over a common dimension set. Empty disjuncts are
// dropped eagerly.
class PolySet {
public:
    explicit PolySet(DimVec dims) : dims_(std::move(dims)) {}

    void add(Polyhedron p);
    bool is_empty() const { return disjuncts_.empty(); }
    const std::vector<Polyhedron>& disjuncts() const { return disjuncts_; }
    const DimVec& dim_vec() const { return dims_; }

    void subtract_poly(const Polyhedron& q);
    bool covers(const Polyhedron& p) const;  // p subset-of union
    bool covers(const PolySet& other) const;

private:
    DimVec dims_;
    std::vector<Polyhedron> disjuncts_;
};

}  // namespace ptdmon::poly
