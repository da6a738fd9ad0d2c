#include "doctest.h"
#include "wnorm/laws.hpp"

#include <random>

using namespace wnorm;

namespace {

Rational rat(std::mt19937_64& rng, int lo, int hi, int den) {
    std::uniform_int_distribution<int> d(lo, hi);
    return Rational(d(rng), den);
}

}  // namespace

TEST_CASE("conjugate is an involution and parts split a number") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        Real p(Rational(101, 100) + rat(rng, 0, 900, 100));
        CHECK(compare(conjugate(conjugate(p)), p) == 0);
        CHECK(compare(Real(1) / p + Real(1) / conjugate(p), Real(1)) == 0);
        Real t(rat(rng, -50, 50, 7));
        CHECK(compare(positive_part(t).value - negative_part(t).value, t) == 0);
        CHECK(compare(positive_part(t).value, Real(0)) >= 0);
        CHECK(compare(negative_part(t).value, Real(0)) >= 0);
    }
}

TEST_CASE("gap identities") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        Real p(Rational(11, 10) + rat(rng, 0, 50, 10)), q(Rational(11, 10) + rat(rng, 0, 50, 10));
        CHECK(compare(gamma_gap(p, q), -gamma_gap(q, p)) == 0);
        CHECK(compare(gamma_gap(p, q), Real(1) / conjugate(q) - Real(1) / conjugate(p)) == 0);
        // duality maps (p, q) to (q', p') and keeps the gap
        CHECK(compare(gamma_gap(conjugate(q), conjugate(p)), gamma_gap(p, q)) == 0);
    }
}

TEST_CASE("regimes are exhaustive and agree with the dual tuple") {
    std::mt19937_64 rng(13);
    int seen[5] = {};
    for (int i = 0; i < 500; ++i) {
        ProductIndices idx;
        idx.m = 1 + static_cast<int>(rng() % 2);
        idx.n = 1 + static_cast<int>(rng() % 2);
        idx.p = Real(Rational(11, 10) + rat(rng, 0, 30, 10));
        idx.q = Real(Rational(11, 10) + rat(rng, 0, 30, 10));
        idx.alpha = Real(rat(rng, 1, 2 * idx.m * 8 - 1, 8));
        idx.beta = Real(rat(rng, 1, 2 * idx.n * 8 - 1, 8));
        Regime r = classify(idx);
        seen[static_cast<int>(r)]++;
        CHECK(classify(idx.dual()) == r);
    }
    CHECK(seen[static_cast<int>(Regime::Balanced)] + seen[static_cast<int>(Regime::HalfBalanced)] +
              seen[static_cast<int>(Regime::StrictlySubbalanced)] + seen[static_cast<int>(Regime::Supercritical)] +
              seen[static_cast<int>(Regime::Degenerate)] ==
          500);
}

TEST_CASE("power-weight routes agree and respect duality") {
    std::mt19937_64 rng(17);
    int checked = 0, valid = 0;
    for (int i = 0; i < 400; ++i) {
        ProductIndices idx;
        idx.p = Real(Rational(11, 10) + rat(rng, 0, 30, 10));
        idx.q = Real(compare(idx.p, Real(2)) < 0 ? Rational(2) + rat(rng, 0, 20, 10) : Rational(idx.p.exact().value()) + rat(rng, 0, 20, 10));
        Real G = idx.gap();
        idx.alpha = G + Real(rat(rng, 0, 6, 10));
        idx.beta = G + Real(rat(rng, 0, 6, 10));
        if (compare(idx.alpha, Real(1)) >= 0 || compare(idx.beta, Real(1)) >= 0) continue;
        Real g(rat(rng, -10, 10, 10)), d(rat(rng, -10, 10, 10));
        Verdict v;
        REQUIRE_NOTHROW(v = product_stein_weiss_valid(idx, g, d));
        ++checked;
        // dual operator exchanges the weights
        Verdict vd = product_stein_weiss_valid(idx.dual(), d, g);
        CHECK(vd.holds() == v.holds());
        if (v.holds()) {
            ++valid;
            CHECK(power_characteristic_finite(idx, g, d).holds());
            CHECK(power_corollary_bounds(idx, g, d).holds());
            CHECK(compare(g + d, Real(0)) >= 0);
        }
    }
    CHECK(checked > 100);
    CHECK(valid > 0);
}

TEST_CASE("optimal exponent is symmetric under duality") {
    for (double p : {1.5, 2.0, 3.0})
        for (double q : {p, p + 0.5, 2 * p}) {
            double pp = conjugate(p), qp = conjugate(q);
            CHECK(optimal_exponent(p, q, 1) == doctest::Approx(optimal_exponent(qp, pp, 1)));
            CHECK(optimal_exponent(p, q, 2) == doctest::Approx(2 * optimal_exponent(p, q, 1)));
            CHECK(optimal_exponent(p, q, 1) >= 2);
        }
}
