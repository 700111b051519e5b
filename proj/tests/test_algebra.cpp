#include <cmath>

#include "doctest.h"
#include "palmlab/group.hpp"
#include "palmlab/scalar.hpp"
#include "palmlab/util.hpp"

using namespace palmlab;

TEST_CASE("scalar arithmetic stays exact in the quadratic field") {
    const Scalar r2 = Scalar::root_two();
    CHECK(r2 * r2 == Scalar(2));

    const Scalar x = Scalar(1) + r2;
    CHECK(x * x == Scalar(3) + Scalar(2) * r2);
    // (1 + r2)(r2 - 1) = 1
    CHECK(x * (r2 - Scalar(1)) == Scalar(1));
    CHECK(x * x.inverse() == Scalar(1));

    const Scalar y = Scalar::rational(3, 8) - Scalar::rational(5, 7) * r2;
    CHECK(y * y.inverse() == Scalar(1));
    CHECK((y / y) == Scalar(1));
    CHECK(y - y == Scalar(0));
}

TEST_CASE("scalar ordering is the real-number order") {
    const Scalar r2 = Scalar::root_two();
    CHECK(Scalar(1) + r2 > Scalar(2));          // 2.414 vs 2
    CHECK(Scalar(3) - Scalar(2) * r2 > Scalar(0));  // 0.17
    CHECK(Scalar(2) - Scalar(2) * r2 < Scalar(0));  // -0.83
    CHECK(Scalar::rational(7, 5) < r2);         // 1.4 < 1.414
    CHECK(Scalar::rational(3, 2) > r2);
    CHECK((Scalar::rational(7, 5) - r2).sign() == -1);
    CHECK(Scalar(0).sign() == 0);
    CHECK(r2.sign() == 1);
    CHECK((-r2).sign() == -1);
}

TEST_CASE("rational constructor canonicalizes") {
    CHECK(Scalar::rational(2, 4) == Scalar::rational(1, 2));
    CHECK(Scalar::rational(-3, -6) == Scalar::rational(1, 2));
    CHECK(Scalar::rational(0, 5) == Scalar(0));
    CHECK_THROWS_AS(Scalar::rational(1, 0), InvalidInput);
}

TEST_CASE("scalar text round trips bit-exactly") {
    const Scalar vals[] = {
        Scalar(0),
        Scalar(7),
        Scalar(-3),
        Scalar::rational(22, 7),
        Scalar::rational(-9, 4) + Scalar::rational(5, 6) * Scalar::root_two(),
        Scalar::root_two(),
        -Scalar::root_two(),
    };
    for (const Scalar& v : vals) CHECK(Scalar::parse(v.str()) == v);
    CHECK(Scalar::rational(1, 2).str() == "1/2+0/1*r2");
    CHECK_THROWS_AS(Scalar::parse("1/2"), InvalidInput);
    CHECK_THROWS_AS(Scalar::parse("x+y*r2"), InvalidInput);
    CHECK_THROWS_AS(Scalar::parse(""), InvalidInput);
}

TEST_CASE("zero has no inverse") {
    CHECK_THROWS_AS(Scalar(0).inverse(), InvalidInput);
    CHECK_THROWS_AS(Scalar(3) / Scalar(0), InvalidInput);
}

TEST_CASE("approx is close for display purposes") {
    CHECK(std::abs(Scalar::root_two().approx() - 1.41421356237) < 1e-9);
    CHECK(Scalar::rational(1, 4).approx() == 0.25);
}

TEST_CASE("group arithmetic on a cyclic group") {
    GroupPtr g = make_group({6});
    CHECK(g->order() == 6);
    CHECK(g->add(4, 5) == 3);
    CHECK(g->neg(2) == 4);
    CHECK(g->neg(0) == 0);
    CHECK(g->sub(1, 5) == 2);
    for (int a = 0; a < 6; ++a) {
        CHECK(g->add(a, 0) == a);
        for (int b = 0; b < 6; ++b) CHECK(g->add(a, b) == g->add(b, a));
    }
}

TEST_CASE("group tuples and element text on a product group") {
    GroupPtr g = make_group({2, 3});
    CHECK(g->order() == 6);
    // First coordinate most significant.
    CHECK(g->tuple_of(0) == std::vector<long>{0, 0});
    CHECK(g->tuple_of(5) == std::vector<long>{1, 2});
    CHECK(g->index_of({1, 2}) == 5);
    for (int e = 0; e < 6; ++e) CHECK(g->index_of(g->tuple_of(e)) == e);
    CHECK(g->element_text(4) == "(1,1)");
    CHECK(g->parse_element("(1,1)") == 4);
    CHECK(g->parse_element(g->element_text(3)) == 3);
    // (1,2) + (1,2) = (0,1)
    CHECK(g->add(5, 5) == g->index_of({0, 1}));
    CHECK_THROWS_AS(g->index_of({0}), InvalidInput);
    CHECK_THROWS_AS(g->index_of({2, 0}), InvalidInput);
    CHECK_THROWS_AS(g->parse_element("1,1"), InvalidInput);
}

TEST_CASE("group construction validates moduli") {
    CHECK_THROWS_AS(make_group({}), InvalidInput);
    CHECK_THROWS_AS(make_group({0}), InvalidInput);
    CHECK_THROWS_AS(make_group({-2}), InvalidInput);
    CHECK(make_group({1})->order() == 1);
}

TEST_CASE("subsets sort, dedupe and answer membership") {
    GroupPtr g = make_group({5});
    Subset s = Subset::of(*g, {3, 0, 3});
    CHECK(s.members == std::vector<int>{0, 3});
    CHECK(s.size() == 2);
    CHECK(s.contains(0));
    CHECK(s.contains(3));
    CHECK(!s.contains(1));
    CHECK(s.text(*g) == "{(0),(3)}");

    CHECK(Subset::full(*g).size() == 5);
    CHECK(Subset::singleton(*g, 2).members == std::vector<int>{2});
    CHECK(Subset::from_mask_bits(*g, 0b10110).members == std::vector<int>{1, 2, 4});
    CHECK_THROWS_AS(Subset::of(*g, {5}), InvalidInput);
    CHECK(Subset::of(*g, {}).empty());
}

TEST_CASE("seed derivation separates streams and counters") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}
