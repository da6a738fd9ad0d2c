#include "doctest.h"
#include "wnorm/experiments.hpp"
#include "wnorm/laws.hpp"

#include <algorithm>
#include <cmath>

using namespace wnorm;

namespace {

// Maximal function of the origin atom at (2^k, 2^{-rho k}): the smallest dyadic
// intervals holding 0 and the point are [0, 2^{j}) with j = floor(log2 x) + 1.
double simple_quotient_oracle(double rho, double alpha, double beta, double q, int K) {
    std::vector<double> M;
    for (int k = 1; k <= K; ++k) {
        double x = std::ldexp(1.0, k), y = std::exp2(-rho * k);
        int j1 = static_cast<int>(std::floor(std::log2(x))) + 1, j2 = static_cast<int>(std::floor(std::log2(y))) + 1;
        M.push_back(std::exp2(j1 * (alpha - 1) + j2 * (beta - 1)));
    }
    std::sort(M.rbegin(), M.rend());
    double best = 0;
    for (size_t i = 0; i < M.size(); ++i) best = std::max(best, M[i] * std::pow(double(i + 1), 1 / q));
    return best;
}

bool factor_equality(const Real& gap, const Real& order, const Real& target_exp, const Real& source_exp) {
    // one-parameter balance: 1/p - 1/q = order - gamma - delta (dimension 1)
    return compare(gap, order - target_exp - source_exp) == 0;
}

}  // namespace

TEST_CASE("simple counterexample at the critical ratio") {
    auto r = example_simple(1.0, 0.5, 0.5, 2, 2, 64);
    CHECK(r.rho_star == doctest::Approx(1.0));
    CHECK(r.characteristic_bounded);
    CHECK(r.weak_quotient >= 0.5 * std::sqrt(64.0) * (1 - 1e-12));
    CHECK(r.weak_quotient == doctest::Approx(simple_quotient_oracle(1.0, 0.5, 0.5, 2, 64)));
    CHECK(r.maximal_values.size() == 64);
}

TEST_CASE("simple counterexample below the critical ratio") {
    auto a = example_simple(0.5, 0.5, 0.5, 2, 2, 16), b = example_simple(0.5, 0.5, 0.5, 2, 2, 64);
    CHECK(a.characteristic_bounded);
    CHECK(a.weak_quotient == doctest::Approx(simple_quotient_oracle(0.5, 0.5, 0.5, 2, 16)));
    CHECK(b.weak_quotient / a.weak_quotient < 1.1);
}

TEST_CASE("simple counterexample above the critical ratio") {
    auto g = simple_growth(2.0, 0.5, 0.5, 2, 2, {16, 32, 64, 128});
    // grows at least like K^{1/q}
    CHECK(g.quotient_exponent >= 0.5 - 0.1);
    for (size_t i = 0; i < g.Ks.size(); ++i)
        CHECK(g.quotient[i] == doctest::Approx(simple_quotient_oracle(2.0, 0.5, 0.5, 2, g.Ks[i])));
}

TEST_CASE("half example") {
    auto r = example_half(Real(2), Real(4), 1, 32);
    CHECK(r.plain_bounded);
    CHECK(std::isfinite(r.max_local));
    CHECK(r.shell_exponent.str() == "0");
    CHECK(r.partial_sum_exact);
    CHECK(r.exact_partial_sum == 33.0);
    CHECK(r.numeric_partial_sum == doctest::Approx(33.0).epsilon(1e-9));
    CHECK(r.one_tailed.diverging);
    CHECK(r.ap_window.holds());

    auto d = example_half(Real(2), Real(4), 1, 64);
    CHECK(d.exact_partial_sum / r.exact_partial_sum == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sandwich: unweighted balanced tuple") {
    auto idx = parse_indices("m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4");
    auto d = sandwich_decompose(idx, Real(0), Real(0), 1000);
    CHECK(d.case_id == 1);
    REQUIRE(d.lambda_used);
    CHECK(d.lambda_used->str() == "0");
    REQUIRE(d.pairs.size() == 1);
    const auto& p = d.pairs[0];
    for (const Real* e : {&p.v1, &p.v2, &p.w1, &p.w2}) CHECK(e->str() == "0");
    CHECK(p.first.holds());
    CHECK(p.second.holds());
    CHECK(d.pointwise_ok);
}

TEST_CASE("sandwich: both exponents positive") {
    auto idx = parse_indices("m=1,n=1,p=2,q=4,alpha=0.35,beta=0.35");
    Real g = Real::parse("0.1");
    auto d = sandwich_decompose(idx, g, g, 1000);
    CHECK(d.case_id == 1);
    CHECK(compare(d.interval_lo, d.interval_hi) < 0);
    REQUIRE(d.pairs.size() == 1);
    const auto& p = d.pairs[0];
    CHECK(factor_equality(idx.gap(), idx.alpha, p.w1, p.v1));
    CHECK(factor_equality(idx.gap(), idx.beta, p.w2, p.v2));
    // the split exponents add back to the product weights
    CHECK(compare(p.w1 + p.w2, g) == 0);
    CHECK(compare(p.v1 + p.v2, g) == 0);
    CHECK(d.pointwise_ok);
}

TEST_CASE("sandwich: opposite signs") {
    auto idx = parse_indices("m=1,n=1,p=2,q=4,alpha=0.35,beta=0.35");
    Real g = Real::parse("-0.1"), de = Real::parse("0.3");
    REQUIRE(product_stein_weiss_valid(idx, g, de).holds());
    auto d = sandwich_decompose(idx, g, de, 1000);
    CHECK(d.case_id == 2);
    CHECK(d.pairs.size() == 2);
    REQUIRE(d.rho1);
    // (m+n)(beta/n - Gamma)
    CHECK(compare(*d.rho1, Real(2) * (idx.beta - idx.gap())) == 0);
    CHECK(compare(*d.rho1, Real(0)) >= 0);
    for (const auto& p : d.pairs) {
        CHECK(p.first.holds());
        CHECK(p.second.holds());
    }
    CHECK(d.pointwise_ok);

    auto mirror = sandwich_decompose(idx, de, g, 1000);
    CHECK(mirror.case_id == 3);
    CHECK(mirror.pointwise_ok);
}

TEST_CASE("sandwich refuses invalid tuples") {
    auto idx = parse_indices("m=1,n=1,p=2,q=4,alpha=0.3,beta=0.2");
    CHECK_THROWS(sandwich_decompose(idx, Real(0), Real(0), 10));
}

TEST_CASE("sharpness fits") {
    auto one = sharpness_fit(2, 4, 1, 1, 8);
    CHECK(one.target == doctest::Approx(3));
    CHECK(one.slope >= 2.6);
    CHECK(one.slope <= 3.1);
    CHECK(one.parameters.size() >= 5);

    auto two = sharpness_fit(2, 4, 1, 2, 8);
    CHECK(two.target == doctest::Approx(6));
    CHECK(two.slope >= 5.2);
    CHECK(two.slope <= 6.1);
    REQUIRE(two.factors.size() == 2);
    CHECK(two.slope == doctest::Approx(two.factors[0].slope + two.factors[1].slope));

    CHECK(optimal_exponent(2, 2, 1) == doctest::Approx(2));
    CHECK_THROWS(sharpness_fit(2, 2, 1, 1, 8));
}

TEST_CASE("one-tailed against plain for power weights") {
    auto r = one_tailed_vs_plain_power(2, 4, 1, 5);
    CHECK(r.exponent == doctest::Approx(3));
    CHECK(r.holds);
    CHECK(r.max_refined_over_C <= 1.2);
    const double pp = 2;
    for (const auto& s : r.samples) {
        CHECK(s.ratio >= 0.05);
        CHECK(s.refined_plain <= s.refined_one_tailed * (1 + 1e-12));
        // sigma = |x|^{-gamma p'} on the line
        CHECK(s.rd_epsilon == doctest::Approx(1 - s.gamma * pp).epsilon(1e-6));
        CHECK(s.rd_ratio <= r.rd_constant);
    }
}

TEST_CASE("one-tailed and plain for the unweighted case") {
    auto leb = lebesgue();
    LatticeConfig L;
    L.k_min = -6;
    L.k_max = 6;
    L.shifts = 0;
    double A = characteristic_1param(*leb, *leb, 0.25, 2, 4, 1, CharKind::Plain, L).sup_value;
    double A1 = characteristic_1param(*leb, *leb, 0.25, 2, 4, 1, CharKind::OneTailed, L, 40).sup_value;
    CHECK(A == doctest::Approx(1.0));
    CHECK(A1 >= A);
    CHECK(A1 <= 4.0);
}
