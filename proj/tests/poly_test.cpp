#include <doctest.h>

#include "ptdmon/poly.hpp"
#include "property_suites.hpp"

using namespace ptdmon;
using poly::Dim;
using poly::DimKind;
using poly::LinearAtom;
using poly::LinearExpr;
using poly::Polyhedron;
using poly::Rel;

namespace {

poly::DimVec dims_xy() {
    return poly::make_dims({{0, DimKind::NumericVar, "x"}, {1, DimKind::NumericVar, "y"}});
}

poly::DimVec dims_clock_tp() {
    return poly::make_dims({{0, DimKind::Clock, "x"}, {1, DimKind::TimingParam, "tp"}});
}

LinearAtom atom(std::vector<std::pair<std::uint32_t, Rational>> terms, Rel rel, Rational rhs) {
    LinearAtom a;
    a.terms = std::move(terms);
    a.constant = -rhs;
    a.rel = rel;
    return a;
}

}  // namespace

TEST_CASE("intersect: conjunction, contradiction, segment") {
    auto u = Polyhedron::universe(dims_xy());
    auto a = u.intersect({LinearAtom::cmp(0, Rel::Ge, 0)}).intersect({LinearAtom::cmp(0, Rel::Le, 2)});
    CHECK(a.contains_point({{0, 1}, {1, 99}}));
    CHECK(a.contains_point({{0, 0}, {1, 0}}));
    CHECK(!a.contains_point({{0, 3}, {1, 0}}));

    auto b = u.intersect({LinearAtom::cmp(0, Rel::Le, 1), LinearAtom::cmp(0, Rel::Ge, 2)});
    CHECK(b.is_empty());

    // {x >= 0, y >= 0, x + y <= 2} with x = y: the segment 0 <= x = y <= 1.
    auto tri = u.intersect({LinearAtom::cmp(0, Rel::Ge, 0), LinearAtom::cmp(1, Rel::Ge, 0),
                            atom({{0, 1}, {1, 1}}, Rel::Le, 2)});
    auto seg = tri.intersect({atom({{0, 1}, {1, -1}}, Rel::Eq, 0)});
    // Derived by solving the system by hand; cross-checked on grid points.
    for (long num = 0; num <= 4; ++num) {
        Rational v(num, 4);
        CHECK(seg.contains_point({{0, v}, {1, v}}));
    }
    CHECK(seg.contains_point({{0, 1}, {1, 1}}));
    CHECK(!seg.contains_point({{0, Rational(5, 4)}, {1, Rational(5, 4)}}));
    CHECK(!seg.contains_point({{0, Rational(1, 2)}, {1, Rational(1, 4)}}));

    CHECK_THROWS_AS(u.intersect({LinearAtom::cmp(7, Rel::Le, 1)}), poly::PolyError);
}

TEST_CASE("is_empty: strict irreflexive, universe, dense rationals") {
    auto u = Polyhedron::universe(dims_xy());
    CHECK(u.intersect({atom({{0, 1}, {0, -1}}, Rel::Lt, 0)}).is_empty());  // x < x
    CHECK(!u.is_empty());
    // x > 0 and x < 1e-9 still has rational points, e.g. 1/(2e9).
    auto thin = u.intersect(
        {LinearAtom::cmp(0, Rel::Gt, 0), LinearAtom::cmp(0, Rel::Lt, Rational(1, 1000000000))});
    CHECK(!thin.is_empty());
    CHECK(thin.contains_point({{0, Rational(1, 2000000000)}, {1, 0}}));
}

TEST_CASE("eliminate: triangle projection, empty input, witness direction") {
    auto u = Polyhedron::universe(dims_xy());
    auto tri = u.intersect({LinearAtom::cmp(0, Rel::Ge, 0), LinearAtom::cmp(1, Rel::Ge, 0),
                            atom({{0, 1}, {1, 1}}, Rel::Le, 2)});
    auto proj = tri.eliminate({1});
    // Fourier-Motzkin by hand gives 0 <= x <= 2.
    CHECK(proj.contains_point({{0, 0}}));
    CHECK(proj.contains_point({{0, 2}}));
    CHECK(proj.contains_point({{0, Rational(3, 2)}}));
    CHECK(!proj.contains_point({{0, Rational(-1, 2)}}));
    CHECK(!proj.contains_point({{0, Rational(5, 2)}}));

    CHECK(Polyhedron::bottom(dims_xy()).eliminate({0}).is_empty());

    // eliminate({x = tp}, {x}) is the universe over {tp}.
    auto eq = Polyhedron::universe(dims_clock_tp()).intersect({atom({{0, 1}, {1, -1}}, Rel::Eq, 0)});
    auto all_tp = eq.eliminate({0});
    CHECK(all_tp.constraints().empty());
    CHECK(all_tp.dims().size() == 1);
    CHECK(all_tp.dims()[0].name == "tp");
}

TEST_CASE("reset: value, empty, relational") {
    auto ct = dims_clock_tp();
    auto p = Polyhedron::universe(ct).intersect(
        {LinearAtom::cmp(0, Rel::Eq, 5), LinearAtom::cmp(1, Rel::Le, 3)});
    auto r = p.reset({0});
    CHECK(r.contains_point({{0, 0}, {1, 3}}));
    CHECK(!r.contains_point({{0, 5}, {1, 3}}));
    CHECK(!r.contains_point({{0, 0}, {1, 4}}));

    CHECK(Polyhedron::bottom(ct).reset({0}).is_empty());

    // reset({x >= y, y >= 1}, {x}) = {x = 0, y >= 1}
    auto q = Polyhedron::universe(dims_xy()).intersect(
        {atom({{0, 1}, {1, -1}}, Rel::Ge, 0), LinearAtom::cmp(1, Rel::Ge, 1)});
    auto rq = q.reset({0});
    CHECK(rq.contains_point({{0, 0}, {1, 2}}));
    CHECK(!rq.contains_point({{0, 0}, {1, Rational(1, 2)}}));
    CHECK(!rq.contains_point({{0, 1}, {1, 2}}));
}

TEST_CASE("assign: affine image, identity, constant with alias, swap") {
    auto u = Polyhedron::universe(dims_xy());
    // v1 := 2*v1 + v2 - 2 + 1 on the point (1, 2) gives (3, 2); the -2 and +1
    // stand for a bound local and a fixed numeric parameter.
    auto pt = u.intersect({LinearAtom::cmp(0, Rel::Eq, 1), LinearAtom::cmp(1, Rel::Eq, 2)});
    LinearExpr e;
    e.terms = {{0, 2}, {1, 1}};
    e.constant = -1;
    auto img = pt.assign(0, e);
    CHECK(img.contains_point({{0, 3}, {1, 2}}));
    CHECK(!img.contains_point({{0, 1}, {1, 2}}));

    LinearExpr ident;
    ident.terms = {{0, 1}};
    auto same = pt.assign(0, ident);
    CHECK(same.same_set(pt));

    // v := 0 on {v >= 5, w = v} gives {v = 0, w >= 5}.
    auto rel = u.intersect({LinearAtom::cmp(0, Rel::Ge, 5), atom({{1, 1}, {0, -1}}, Rel::Eq, 0)});
    LinearExpr zero;
    auto z = rel.assign(0, zero);
    CHECK(z.contains_point({{0, 0}, {1, 5}}));
    CHECK(z.contains_point({{0, 0}, {1, 7}}));
    CHECK(!z.contains_point({{0, 0}, {1, 4}}));

    // Simultaneous swap keeps both values.
    auto two = u.intersect({LinearAtom::cmp(0, Rel::Eq, 5), LinearAtom::cmp(1, Rel::Eq, 7)});
    LinearExpr ex, ey;
    ex.terms = {{1, 1}};
    ey.terms = {{0, 1}};
    auto swapped = two.assign_all({{0, ex}, {1, ey}});
    CHECK(swapped.contains_point({{0, 7}, {1, 5}}));
    CHECK(!swapped.contains_point({{0, 5}, {1, 7}}));
}

TEST_CASE("elapse: strictness, selective flow, parameter contract") {
    auto ct = dims_clock_tp();
    auto origin = Polyhedron::universe(ct).intersect({LinearAtom::cmp(0, Rel::Eq, 0)});
    auto strict = origin.elapse({0}, true);
    CHECK(strict.contains_point({{0, Rational(1, 100)}, {1, 0}}));
    CHECK(!strict.contains_point({{0, 0}, {1, 0}}));
    auto loose = origin.elapse({0}, false);
    CHECK(loose.contains_point({{0, 0}, {1, 0}}));

    auto xy = Polyhedron::universe(dims_xy()).intersect(
        {LinearAtom::cmp(0, Rel::Eq, 0), LinearAtom::cmp(1, Rel::Eq, 3)});
    auto moved = xy.elapse({0}, false);
    CHECK(moved.contains_point({{0, 12}, {1, 3}}));
    CHECK(!moved.contains_point({{0, 12}, {1, 4}}));

    CHECK_THROWS_AS(origin.elapse({1}, true), poly::PolyError);  // tp must not flow

    // {x = t, t = 0, x <= tp}: after a strict elapse of {x, t} and t < 5,
    // exactly {x = t, 0 < t < 5, tp >= 0} remains.
    auto d3 = poly::make_dims({{0, DimKind::Clock, "x"},
                               {1, DimKind::Elapsed, "t"},
                               {2, DimKind::TimingParam, "tp"}});
    auto start = Polyhedron::universe(d3).intersect({atom({{0, 1}, {1, -1}}, Rel::Eq, 0),
                                                     LinearAtom::cmp(1, Rel::Eq, 0),
                                                     atom({{0, 1}, {2, -1}}, Rel::Le, 0)});
    auto flowed = start.elapse({0, 1}, true).intersect({LinearAtom::cmp(1, Rel::Lt, 5)});
    CHECK(flowed.contains_point({{0, 1}, {1, 1}, {2, 2}}));
    CHECK(flowed.contains_point({{0, 1}, {1, 1}, {2, Rational(1, 2)}}));
    CHECK(!flowed.contains_point({{0, 6}, {1, 6}, {2, 10}}));
    CHECK(!flowed.contains_point({{0, 1}, {1, 1}, {2, -1}}));
}

TEST_CASE("shift: translate, zero, elapsed-time subtrahend") {
    auto ct = dims_clock_tp();
    auto origin = Polyhedron::universe(ct).intersect({LinearAtom::cmp(0, Rel::Eq, 0)});
    auto moved = origin.shift({0}, 3);
    CHECK(moved.contains_point({{0, 3}, {1, 0}}));
    CHECK(!moved.contains_point({{0, 0}, {1, 0}}));
    CHECK(origin.shift({0}, 0).same_set(origin));
    CHECK_THROWS_AS(origin.shift({0}, -1), poly::PolyError);

    // x := x + (2 - t) on {x = t, 0 < t < 2} pins x = 2.
    auto d2 = poly::make_dims({{0, DimKind::Clock, "x"}, {1, DimKind::Elapsed, "t"}});
    auto band = Polyhedron::universe(d2).intersect({atom({{0, 1}, {1, -1}}, Rel::Eq, 0),
                                                    LinearAtom::cmp(1, Rel::Gt, 0),
                                                    LinearAtom::cmp(1, Rel::Lt, 2)});
    auto shifted = band.shift_minus_dim({0}, 2, 1);
    CHECK(shifted.dims().size() == 1);
    CHECK(shifted.contains_point({{0, 2}}));
    CHECK(!shifted.contains_point({{0, Rational(199, 100)}}));
    CHECK(!shifted.contains_point({{0, Rational(201, 100)}}));
}

TEST_CASE("try_merge: abutting, separated, stacked segments") {
    auto d1 = poly::make_dims({{0, DimKind::NumericVar, "x"}});
    auto u = Polyhedron::universe(d1);
    auto i01 = u.intersect({LinearAtom::cmp(0, Rel::Ge, 0), LinearAtom::cmp(0, Rel::Le, 1)});
    auto i12 = u.intersect({LinearAtom::cmp(0, Rel::Ge, 1), LinearAtom::cmp(0, Rel::Le, 2)});
    auto i23 = u.intersect({LinearAtom::cmp(0, Rel::Ge, 2), LinearAtom::cmp(0, Rel::Le, 3)});
    auto m = i01.try_merge(i12);
    REQUIRE(m.has_value());
    CHECK(m->contains_point({{0, Rational(3, 2)}}));
    CHECK(m->includes(i01));
    CHECK(m->includes(i12));
    CHECK(!m->contains_point({{0, Rational(5, 2)}}));
    CHECK(!i01.try_merge(i23).has_value());  // the hull would contain 1.5

    // Two parallel segments at y = 0 and y = 1: the hull contains (0, 1/2).
    auto xy = dims_xy();
    auto s0 = Polyhedron::universe(xy).intersect({LinearAtom::cmp(0, Rel::Ge, 0),
                                                  LinearAtom::cmp(0, Rel::Le, 1),
                                                  LinearAtom::cmp(1, Rel::Eq, 0)});
    auto s1 = Polyhedron::universe(xy).intersect({LinearAtom::cmp(0, Rel::Ge, 0),
                                                  LinearAtom::cmp(0, Rel::Le, 1),
                                                  LinearAtom::cmp(1, Rel::Eq, 1)});
    CHECK(!s0.try_merge(s1).has_value());
}

TEST_CASE("contains_point: closed and strict bounds, missing dimension") {
    auto d1 = poly::make_dims({{0, DimKind::TimingParam, "tp"}});
    auto le = Polyhedron::universe(d1).intersect({LinearAtom::cmp(0, Rel::Le, 2)});
    CHECK(le.contains_point({{0, 2}}));
    auto lt = Polyhedron::universe(d1).intersect({LinearAtom::cmp(0, Rel::Lt, 2)});
    CHECK(!lt.contains_point({{0, 2}}));
    // The first block of the copy example admits tp = 3/2.
    auto block = Polyhedron::universe(d1).intersect(
        {LinearAtom::cmp(0, Rel::Ge, 0), LinearAtom::cmp(0, Rel::Le, 2)});
    CHECK(block.contains_point({{0, Rational(3, 2)}}));
    CHECK_THROWS_AS(le.contains_point({}), poly::PolyError);
}

TEST_CASE("rendering uses declared names and exact rationals") {
    auto ct = dims_clock_tp();
    auto p = Polyhedron::universe(ct).intersect(
        {LinearAtom::cmp(1, Rel::Ge, 0), LinearAtom::cmp(1, Rel::Le, Rational(3, 2))});
    CHECK(p.to_string() == "0 <= tp && tp <= 3/2");
    CHECK(Polyhedron::universe(ct).to_string() == "true");
    CHECK(Polyhedron::bottom(ct).to_string() == "false");
}

TEST_CASE("polyset drops empty disjuncts and decides coverage") {
    auto d1 = poly::make_dims({{0, DimKind::NumericVar, "x"}});
    auto u = Polyhedron::universe(d1);
    poly::PolySet set(d1);
    set.add(u.intersect({LinearAtom::cmp(0, Rel::Lt, 0), LinearAtom::cmp(0, Rel::Gt, 0)}));
    CHECK(set.is_empty());
    set.add(u.intersect({LinearAtom::cmp(0, Rel::Ge, 0), LinearAtom::cmp(0, Rel::Le, 1)}));
    set.add(u.intersect({LinearAtom::cmp(0, Rel::Gt, 1), LinearAtom::cmp(0, Rel::Le, 2)}));
    CHECK(set.disjuncts().size() == 2);
    CHECK(set.covers(u.intersect({LinearAtom::cmp(0, Rel::Ge, 0), LinearAtom::cmp(0, Rel::Le, 2)})));
    CHECK(!set.covers(u.intersect({LinearAtom::cmp(0, Rel::Ge, 0), LinearAtom::cmp(0, Rel::Le, 3)})));
}

TEST_CASE("randomized property suites (reduced counts)") {
    auto run = [](suites::Outcome o) {
        for (const auto& f : o.failures) MESSAGE(f);
        CHECK(o.failures.empty());
    };
    run(suites::projection_soundness(11, 120));
    run(suites::emptiness_vs_vertices(12, 200));
    run(suites::reset_idempotent(13, 200));
    run(suites::elapse_monotone(14, 200));
    run(suites::merge_exactness(15, 200));
}
