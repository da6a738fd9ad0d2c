#include "doctest.h"
#include "wnorm/indices.hpp"

#include <boost/multiprecision/cpp_int.hpp>

using namespace wnorm;

TEST_CASE("conjugate exponents") {
    CHECK(conjugate(2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(conjugate(4.0 / 3.0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(conjugate(Real::parse("4/3")).str() == "4");

    // p' = p / (p - 1) in rationals
    Rational p(10001, 10000);
    Rational pp = p / (p - 1);
    CHECK(conjugate(1.0001) == doctest::Approx(static_cast<double>(pp)).epsilon(1e-10));
    CHECK(std::abs(conjugate(1.0001) - 10001.0) < 1e-6 * 10001.0);

    CHECK_THROWS_AS(conjugate(1.0), std::domain_error);
    CHECK_THROWS_AS(conjugate(0.5), std::domain_error);
    CHECK_THROWS_AS(conjugate(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("gap between reciprocal exponents") {
    CHECK(gamma_gap(2.0, 4.0) == doctest::Approx(0.25));
    CHECK(gamma_gap(3.0, 3.0) == 0.0);
    CHECK(gamma_gap(4.0, 2.0) == doctest::Approx(-0.25));
    CHECK(gamma_gap(Real(2), Real(4)).str() == "1/4");
    CHECK_THROWS(gamma_gap(1.0, 2.0));
}

TEST_CASE("signed parts") {
    auto a = positive_part(Real::parse("-0.5"));
    CHECK(a.value.value() == 0.0);
    CHECK_FALSE(a.at_boundary);
    auto b = positive_part(Real(0));
    CHECK(b.value.value() == 0.0);
    CHECK(b.at_boundary);
    auto c = positive_part(Real::parse("1.2"));
    CHECK(c.value.value() == doctest::Approx(1.2));
    CHECK_FALSE(c.at_boundary);
    CHECK(negative_part(Real::parse("-0.5")).value.value() == doctest::Approx(0.5));
    CHECK(negative_part(Real(0)).at_boundary);
}

TEST_CASE("delta bracket") {
    auto z = delta_bracket(Real(0), Real(0), 1, Real(2), Real(4));
    CHECK(z.value.value() == 0.0);
    CHECK_FALSE(z.any_boundary);
    auto one = delta_bracket(Real::parse("1.25"), Real(0), 1, Real(2), Real(4));
    CHECK(one.value.value() == doctest::Approx(1.0));
    CHECK_FALSE(one.any_boundary);
    auto edge = delta_bracket(Real::parse("1/4"), Real(0), 1, Real(2), Real(4));
    CHECK(edge.value.value() == 0.0);
    CHECK(edge.any_boundary);
}

TEST_CASE("rational literals stay exact") {
    Real p = Real::parse("4/3");
    REQUIRE(p.is_exact());
    CHECK(p.value() == doctest::Approx(4.0 / 3.0));
    Real third = Real::parse("1/3");
    CHECK((third + third + third).str() == "1");
    CHECK(compare(Real::parse("0.1") + Real::parse("0.2"), Real::parse("0.3")) == 0);
    CHECK_THROWS(Real::parse("abc"));
    CHECK_THROWS(Real::parse("1/0"));
}

TEST_CASE("index tuples from key=value text") {
    auto idx = parse_indices("m=1,n=2,p=2,q=4,alpha=1/4,beta=1/2");
    CHECK(idx.m == 1);
    CHECK(idx.n == 2);
    CHECK(idx.alpha.str() == "1/4");
    CHECK(idx.gap().str() == "1/4");
    CHECK(idx.p_prime().str() == "2");
    CHECK_THROWS(parse_indices("m=1,n=1,p=1,q=4,alpha=0,beta=0"));
    CHECK_THROWS(parse_indices("m=0,n=1,p=2,q=4,alpha=0,beta=0"));
    CHECK_THROWS(parse_indices("m=1,n=1,p=2"));
}
