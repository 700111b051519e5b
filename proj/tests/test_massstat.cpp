#include "doctest.h"
#include "fleet.hpp"
#include "palmlab/generators.hpp"
#include "palmlab/massstat.hpp"
#include "palmlab/palm.hpp"
#include "palmlab/util.hpp"

using namespace palmlab;

namespace {

Scalar half() { return Scalar::rational(1, 2); }

MarkField binary_field(std::vector<long> moduli) {
    return make_mark_field(make_group(std::move(moduli)), {Scalar(0), Scalar(1)}, {half(), half()});
}

OmegaMeasure palm_of(const MarkField& mf) {
    return palm_measure(mf.P, mf.xi, Subset::singleton(mf.space->group(), 0)).measure;
}

// The recentering average for one window and one basis pair, summed directly
// from kernel rows. Mirrors the checked identity without sharing its
// accumulation loop.
Scalar direct_window_lhs(const OmegaMeasure& Q, const RandomMeasure& xi, const Subset& C,
                         int target_w, int target_g) {
    const FlowSpace& sp = *Q.space;
    const FiniteAbelianGroup& g = sp.group();
    Scalar acc;
    for (int w = 0; w < sp.outcomes(); ++w) {
        if (Q.at(w).is_zero()) continue;
        for (int r : C.members) {
            GMeasure row = window_kernel_row(xi, C, w, g.neg(r));
            for (int s = 0; s < static_cast<int>(g.order()); ++s) {
                if (row.at(s).is_zero()) continue;
                if (sp.flow(s, w) == target_w && g.add(s, r) == target_g)
                    acc += Q.at(w) * row.at(s);
            }
        }
    }
    return acc / Scalar(C.size());
}

}  // namespace

TEST_CASE("window kernel rows renormalize the field inside the shifted window") {
    MarkField mf = binary_field({3});
    const FiniteAbelianGroup& g = mf.space->group();
    const Subset C = Subset::of(g, {0, 1});
    const int w = 5;  // marks 1,0,1
    GMeasure r0 = window_kernel_row(mf.xi, C, w, 0);
    CHECK(r0.at(0) == Scalar(1));
    CHECK(r0.at(1).is_zero());
    GMeasure r1 = window_kernel_row(mf.xi, C, w, 1);
    CHECK(r1.at(2) == Scalar(1));
    GMeasure r2 = window_kernel_row(mf.xi, C, w, 2);
    CHECK(r2.at(2) == half());
    CHECK(r2.at(0) == half());

    // no mass in the window: the row stays put
    GMeasure stay = window_kernel_row(mf.xi, C, 0, 1);
    CHECK(measures_equal(stay, dirac(mf.space->group_ptr(), 1)));

    TransportKernel T = window_kernel(mf.xi, C);
    CHECK(T.markovian());
    CHECK(is_invariant_kernel(T).ok);
    CHECK(measures_equal(T.at(w, 2), r2));
}

TEST_CASE("recentering laws pass and jittered tables fail with a real witness") {
    MarkField mf = binary_field({2});
    OmegaMeasure Q = palm_of(mf);
    MassStatReport good = is_mass_stationary(Q, mf.xi);
    CHECK(good.holds);
    CHECK(good.complete);
    CHECK(good.sets_checked == 3);

    OmegaMeasure bad = Q;
    bad.at(1) = Scalar::rational(1, 4);  // outcome 01 has mass but no point at 0
    MassStatReport r = is_mass_stationary(bad, mf.xi);
    REQUIRE(!r.holds);
    CHECK(!r.witness.window.empty());
    const Subset C = Subset::of(mf.space->group(), r.witness.window);
    Scalar lhs = direct_window_lhs(bad, mf.xi, C, r.witness.omega, r.witness.g);
    CHECK(lhs == r.witness.lhs);
    CHECK(lhs != r.witness.rhs);
    Scalar expect = C.contains(r.witness.g) ? bad.at(r.witness.omega) / Scalar(C.size()) : Scalar();
    CHECK(expect == r.witness.rhs);
}

TEST_CASE("one-point configurations exercise the stay-put fallback") {
    GroupPtr g = make_group({4});
    SpacePtr sp = make_one_point_space(g);
    OmegaMeasure P(sp);
    RandomMeasure xi(sp);
    for (int w = 0; w < 4; ++w) {
        P.at(w) = Scalar::rational(1, 4);
        xi.at(w).at(w) = Scalar(1);
    }
    OmegaMeasure Q = palm_measure(P, xi, Subset::singleton(*g, 0)).measure;
    CHECK(is_mass_stationary(Q, xi).holds);
}

TEST_CASE("window universe is exhaustive up to order 12 and thinned past it") {
    CHECK(default_window_universe(*make_group({3})).size() == 7);
    CHECK(default_window_universe(*make_group({2, 5})).size() == 1023);
    GroupPtr big = make_group({13});
    std::vector<Subset> u = default_window_universe(*big);
    CHECK(u.size() == 25);  // 13 singletons + 12 prefixes
    CHECK(u.back().size() == 13);

    SpacePtr sp = make_translation_space(big);
    OmegaMeasure P(sp);
    RandomMeasure xi(sp);
    for (int w = 0; w < 13; ++w) {
        P.at(w) = Scalar::rational(1, 13);
        xi.at(w).at(big->sub(0, w)) = Scalar(1);
    }
    OmegaMeasure Q = palm_measure(P, xi, Subset::singleton(*big, 0)).measure;
    MassStatReport r = is_mass_stationary(Q, xi);
    CHECK(r.holds);
    CHECK(!r.complete);
    CHECK(r.sets_checked == 25);
}

TEST_CASE("explicit window lists are validated and reported incomplete") {
    MarkField mf = binary_field({2});
    OmegaMeasure Q = palm_of(mf);
    const FiniteAbelianGroup& g = mf.space->group();
    std::vector<Subset> singles = {Subset::singleton(g, 0), Subset::singleton(g, 1)};
    MassStatReport r = is_mass_stationary(Q, mf.xi, singles);
    CHECK(r.holds);
    CHECK(!r.complete);
    CHECK(r.sets_checked == 2);
    std::vector<Subset> with_empty = {Subset::of(g, {})};
    CHECK_THROWS_AS(is_mass_stationary(Q, mf.xi, with_empty), InvalidInput);
}

TEST_CASE("charging a massless outcome is refused") {
    MarkField mf = binary_field({2});
    OmegaMeasure Q(mf.space);
    Q.at(0) = Scalar(1);
    CHECK_THROWS_AS(is_mass_stationary(Q, mf.xi), InvalidInput);
}

TEST_CASE("window-pair kernels scale the field by the overlap share") {
    MarkField mf = binary_field({3});
    const FiniteAbelianGroup& g = mf.space->group();
    const Subset C = Subset::of(g, {0, 1});
    for (const auto& d_members :
         {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{0, 1}, std::vector<int>{2},
          std::vector<int>{0, 2}, std::vector<int>{0, 1, 2}}) {
        const Subset D = Subset::of(g, d_members);
        CHECK(check_window_pair_push(mf.xi, C, D).ok);
        TransportKernel T = window_pair_kernel(mf.xi, C, D);
        CHECK(is_invariant_kernel(T).ok);
        CHECK(T.sup_total() <= Scalar(1));
        // push equals (|C meet D| / |C|) xi at every outcome
        Subset meet = Subset::of(g, [&] {
            std::vector<int> m;
            for (int c : C.members)
                if (D.contains(c)) m.push_back(c);
            return m;
        }());
        Scalar share = Scalar::rational(meet.size(), C.size());
        RandomMeasure pushed = push_through(mf.xi, T);
        for (int w = 0; w < mf.space->outcomes(); ++w)
            CHECK(measures_equal(pushed.at(w), scale_measure(mf.xi.at(w), share)));
    }
}

TEST_CASE("window-pair kernels add up over disjoint targets") {
    MarkField mf = binary_field({3});
    const FiniteAbelianGroup& g = mf.space->group();
    const Subset C = Subset::of(g, {0, 2});
    TransportKernel t0 = window_pair_kernel(mf.xi, C, Subset::singleton(g, 0));
    TransportKernel t1 = window_pair_kernel(mf.xi, C, Subset::singleton(g, 1));
    TransportKernel t01 = window_pair_kernel(mf.xi, C, Subset::of(g, {0, 1}));
    for (int w = 0; w < mf.space->outcomes(); ++w)
        for (int t = 0; t < 3; ++t)
            CHECK(measures_equal(add_measures(t0.at(w, t), t1.at(w, t)), t01.at(w, t)));
}

TEST_CASE("both battery routes reach the verdict of the windowed identity") {
    MarkField mf = binary_field({2, 2});
    OmegaMeasure Q = palm_of(mf);
    BatteryReport good = check_preserving_battery(Q, mf.xi, 6, 11);
    CHECK(good.direct.holds);
    CHECK(good.battery);
    CHECK(good.agree());
    CHECK(good.kernels_checked > 6);

    auto bad = fleet::perturb_off_palm(Q, mf.xi, 5);
    REQUIRE(bad.has_value());
    BatteryReport broken = check_preserving_battery(*bad, mf.xi, 6, 11);
    CHECK(!broken.direct.holds);
    CHECK(!broken.battery);
    CHECK(broken.agree());
    CHECK(broken.lhs != broken.rhs);
}

TEST_CASE("skipping the window shift biases the two-site average") {
    WindowBiasValues v = window_bias_example();
    CHECK(v.lhs == Scalar::rational(3, 8));
    CHECK(v.rhs == half());
    CHECK(v.lhs != v.rhs);
    CHECK(v.whole_group_lhs == v.whole_group_rhs);
    CHECK(v.full_event_lhs == Scalar(1));
    CHECK(v.full_event_rhs == Scalar(1));
}

TEST_CASE("two species split the preservation and recentering verdicts") {
    TwoSpeciesReport z2 = two_species_example({2});
    CHECK(z2.palm_verified);
    CHECK(z2.irrational_masses);
    CHECK(z2.germs_enumerated == 24);
    CHECK(z2.preserving_germs == 11);
    CHECK(z2.all_preserving_fix_first);
    CHECK(z2.all_preserving_invariant);
    CHECK(!z2.combined.holds);
    CHECK(z2.first_only.holds);

    TwoSpeciesReport z3 = two_species_example({3});
    CHECK(z3.palm_verified);
    CHECK(z3.irrational_masses);
    CHECK(z3.germs_enumerated == 492);
    CHECK(z3.preserving_germs == 68);
    CHECK(z3.all_preserving_fix_first);
    CHECK(z3.all_preserving_invariant);
    CHECK(!z3.combined.holds);
    CHECK(z3.first_only.holds);

    // a lopsided species law keeps the same structure
    TwoSpeciesReport skew = two_species_example({2}, 1, 3);
    CHECK(skew.palm_verified);
    CHECK(!skew.combined.holds);
    CHECK(skew.first_only.holds);
    CHECK(skew.preserving_germs > 0);
}
