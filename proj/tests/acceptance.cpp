#include "wnorm/characteristics.hpp"
#include "wnorm/experiments.hpp"
#include "wnorm/laws.hpp"
#include "wnorm/operators.hpp"
#include "wnorm/weights.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace wnorm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... xs) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

Rational rnd(std::mt19937_64& rng, int lo, int hi, int den) {
    return Rational(std::uniform_int_distribution<int>(lo, hi)(rng), den);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// ---------------------------------------------------------------------------

Outcome route_agreement() {
    std::mt19937_64 rng(1);
    int total = 0, agree = 0, valid = 0, rejected = 0;
    std::string first_bad;
    while (total < 10000) {
        ProductIndices idx;
        idx.m = 1 + static_cast<int>(rng() % 3);
        idx.n = 1 + static_cast<int>(rng() % 3);
        idx.p = Real(Rational(21, 20) + rnd(rng, 0, 80, 20));
        idx.q = Real(Rational(21, 20) + rnd(rng, 0, 120, 20));
        idx.alpha = Real(rnd(rng, 1, 20 * idx.m - 1, 20));
        idx.beta = Real(rnd(rng, 1, 20 * idx.n - 1, 20));
        Real g(rnd(rng, -40, 60, 40));
        Real d;
        // most draws sit on the weight equality, the rest miss it by a rational offset
        Real mn(idx.m + idx.n);
        if (rng() % 4 != 0)
            d = idx.alpha + idx.beta - g - mn * idx.gap();
        else
            d = Real(rnd(rng, -40, 60, 40));
        Verdict lit = stein_weiss_index_conditions(idx, g, d, true);
        Verdict fin = power_characteristic_finite(idx, g, d);
        bool near = false;
        for (const auto* v : {&lit, &fin})
            for (const auto& c : v->witnesses) {
                double gap = std::abs(c.lhs - c.rhs);
                if (c.rel == Relation::Equal ? (gap != 0 && gap < 1e-3) : gap < 1e-3) near = true;
            }
        if (near) {
            ++rejected;
            continue;
        }
        ++total;
        bool expected = compare(idx.p, idx.q) <= 0 && fin.holds();
        bool got = false;
        try {
            got = product_stein_weiss_valid(idx, g, d).holds();
        } catch (const RouteContradiction& e) {
            if (first_bad.empty()) first_bad = e.what();
            continue;
        }
        if (got) ++valid;
        if (got == expected)
            ++agree;
        else if (first_bad.empty())
            first_bad = idx.str() + " gamma=" + g.str() + " delta=" + d.str();
    }
    Outcome o;
    o.pass = agree == total && valid > 0;
    o.detail = fmt("%d/%d agree, %d valid, %d near-boundary draws skipped", agree, total, valid, rejected);
    if (!first_bad.empty()) o.detail += "; first mismatch " + first_bad;
    return o;
}

// ---------------------------------------------------------------------------
// Origin-anchored rectangle 2^a x 2^b for |z|^e on R^{m+n}: mass exponent is
// piecewise linear in (a, b), with a kink only on a = b.

double mass_rate(int m, int n, double e, double a, double b) {
    if (a >= b) return (n + m + e) * b + std::max(0.0, m + e) * (a - b);
    return (m + n + e) * a + std::max(0.0, n + e) * (b - a);
}

double value_rate(const ProductIndices& idx, double g, double d, double a, double b) {
    double p = idx.p.value(), q = idx.q.value(), pp = conjugate(p);
    return (idx.alpha.value() - idx.m) * a + (idx.beta.value() - idx.n) * b +
           mass_rate(idx.m, idx.n, -g * q, a, b) / q + mass_rate(idx.m, idx.n, -d * pp, a, b) / pp;
}

struct RayOracle {
    double best_rate = -1e9, best_slope = 0, runner_up = -1e9;
};

RayOracle ray_oracle(const ProductIndices& idx, double g, double d) {
    RayOracle o;
    std::vector<std::pair<double, double>> rays;
    for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2)
            if (d1 || d2) rays.push_back({value_rate(idx, g, d, d1, d2), (std::abs(d1) + std::abs(d2))});
    std::sort(rays.rbegin(), rays.rend());
    o.best_rate = rays[0].first;
    o.best_slope = rays[0].first / rays[0].second * std::numbers::ln2;
    for (size_t i = 1; i < rays.size(); ++i)
        if (std::abs(rays[i].first / rays[i].second * std::numbers::ln2 - o.best_slope) > 1e-12) {
            o.runner_up = rays[i].first;
            break;
        }
    return o;
}

Outcome finiteness_cross_check() {
    std::mt19937_64 rng(2);
    LatticeConfig lat;
    lat.k_min = -12;
    lat.k_max = 12;
    lat.shifts = 0;
    int fin = 0, inf = 0, fin_ok = 0, inf_ok = 0, oracle_mismatch = 0;
    double worst = 0;
    long draws = 0;
    while ((fin < 25 || inf < 25) && draws < 2000000) {
        ++draws;
        ProductIndices idx;
        idx.m = 1 + static_cast<int>(rng() % 2);
        idx.n = 1 + static_cast<int>(rng() % 2);
        idx.p = Real(Rational(6, 5) + rnd(rng, 0, 36, 20));
        idx.q = Real(idx.p.exact().value() + rnd(rng, 4, 60, 20));
        Real mn(idx.m + idx.n);
        Real g(rnd(rng, -30, 40, 20)), d(rnd(rng, -30, 40, 20));
        idx.alpha = Real(rnd(rng, 1, 20 * idx.m - 1, 20));
        Real off = rng() % 3 == 0 ? Real(rnd(rng, -8, 8, 20)) : Real(0);
        idx.beta = mn * idx.gap() + g + d - idx.alpha + off;
        if (compare(idx.beta, Real(0)) <= 0 || compare(idx.beta, Real(idx.n)) >= 0) continue;
        double gv = g.value(), dv = d.value(), q = idx.q.value(), pp = idx.p_prime().value();
        bool clean = true;
        for (double e : {-gv * q, -dv * pp}) {
            if (idx.m + idx.n + e < 0.3) clean = false;
            if (std::abs(idx.m + e) < 0.3 || std::abs(idx.n + e) < 0.3) clean = false;
        }
        if (!clean) continue;
        Verdict v = power_characteristic_finite(idx, g, d);
        int failing = 0;
        bool margins = true;
        for (const auto& c : v.witnesses) {
            double gap = std::abs(c.lhs - c.rhs);
            if (!c.satisfied) {
                ++failing;
                if (gap < 0.05) margins = false;
            } else if (c.rel != Relation::Equal && gap < 0.05) {
                margins = false;
            }
        }
        if (!margins) continue;
        RayOracle ro = ray_oracle(idx, gv, dv);
        bool want_finite = v.holds();
        if (want_finite != (ro.best_rate <= 1e-12)) {
            ++oracle_mismatch;
            continue;
        }
        if (want_finite && fin >= 25) continue;
        if (!want_finite && (inf >= 25 || failing != 1 || ro.best_rate - ro.runner_up < 0.2)) continue;

        auto sigma = density(radial_power(-dv * pp)), omega = density(radial_power(-gv * q));
        auto rep = characteristic_sup(*sigma, *omega, idx, lat);
        if (want_finite) {
            ++fin;
            if (!rep.diverging) ++fin_ok;
        } else {
            ++inf;
            double err = std::abs(rep.growth_trend - ro.best_slope) / ro.best_slope;
            worst = std::max(worst, err);
            if (rep.diverging && err <= 0.3) ++inf_ok;
        }
    }
    Outcome o;
    o.pass = fin == 25 && inf == 25 && fin_ok == 25 && inf_ok == 25 && oracle_mismatch == 0;
    o.detail = fmt("finite %d/%d not diverging, infinite %d/%d diverging with slope in 30%% (worst %.3f), "
                   "oracle/verdict mismatches %d",
                   fin_ok, fin, inf_ok, inf, worst, oracle_mismatch);
    return o;
}

// ---------------------------------------------------------------------------

Outcome maximal_weak_type() {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    DyadicConfig cfg;
    cfg.k_min = -10;
    cfg.k_max = 10;
    int violations = 0;
    double worst = 0;
    for (int it = 0; it < 200; ++it) {
        double alpha = 0.05 + 0.9 * U(rng), p = 1.1 + 2.9 * U(rng), q = p + 4 * U(rng);
        auto pos = [&] {
            // mix of lattice points and generic positions across many scales
            double x = std::ldexp(std::floor(U(rng) * 64) - 32, static_cast<int>(rng() % 9) - 4);
            return rng() % 2 ? x : x + (U(rng) - 0.5) * std::exp2(-6);
        };
        Atomic sigma, omega, fs;
        int ns = 1 + static_cast<int>(rng() % 10), no = 1 + static_cast<int>(rng() % 10);
        double fnorm = 0;
        for (int i = 0; i < ns; ++i) {
            double x = pos(), s = 0.01 + 2 * U(rng), f = U(rng) < 0.2 ? 0.0 : 3 * U(rng);
            sigma.atoms.push_back({{x}, s});
            fs.atoms.push_back({{x}, f * s});
            fnorm += std::pow(f, p) * s;
        }
        if (!(fnorm > 0)) fs.atoms.back().mass = sigma.atoms.back().mass, fnorm = sigma.atoms.back().mass;
        fnorm = std::pow(fnorm, 1 / p);
        std::vector<double> pts, masses;
        for (int i = 0; i < no; ++i) {
            double x = rng() % 4 == 0 ? sigma.atoms[rng() % ns].point[0] : pos(), w = 0.01 + 2 * U(rng);
            omega.atoms.push_back({{x}, w});
            pts.push_back(x);
            masses.push_back(w);
        }
        auto M = dyadic_fractional_maximal_1d(fs, alpha, cfg, pts);
        std::vector<double> vals;
        for (const auto& mv : M) vals.push_back(mv.value);
        double lhs = weak_type_quotient(vals, masses, q, fnorm);
        double A = dyadic_characteristic_1d(sigma, omega, alpha, p, q, cfg);
        double ratio = A > 0 ? lhs / A : (lhs > 0 ? INFINITY : 0);
        worst = std::max(worst, ratio);
        if (ratio > 1 + 1e-12) ++violations;
    }
    return {violations == 0, fmt("%d violations in 200 instances, max quotient/A = %.6f", violations, worst)};
}

// ---------------------------------------------------------------------------

Outcome simple_transition() {
    std::vector<int> Ks{16, 32, 64, 128};
    auto g = simple_growth(1.0, 0.5, 0.5, 2, 2, Ks);
    bool floors = true;
    double min_over = INFINITY;
    for (size_t i = 0; i < Ks.size(); ++i) {
        double floor = 0.5 * std::sqrt(double(Ks[i]));
        min_over = std::min(min_over, g.quotient[i] / floor);
        if (g.quotient[i] < floor * (1 - 1e-12)) floors = false;
    }
    bool stable = g.characteristic_spread <= 0.1;
    bool slope = std::abs(g.quotient_exponent - 0.5) <= 0.1;
    return {floors && stable && slope,
            fmt("characteristic spread %.4f, min quotient/floor %.6f, exponent %.4f", g.characteristic_spread, min_over,
                g.quotient_exponent)};
}

// ---------------------------------------------------------------------------

Outcome half_example() {
    auto r = example_half(Real(2), Real(4), 1, 64);
    bool radii = r.log2_radii.size() == 17 && r.log2_radii.front() == -8 && r.log2_radii.back() == 8;
    double worst_local = *std::max_element(r.local_values.begin(), r.local_values.end()) / r.value_at_one;
    bool bounded = radii && worst_local <= 4;
    int exact = 0;
    double worst_numeric = 0;
    for (int K = 1; K <= 64; ++K) {
        auto h = example_half(Real(2), Real(4), 1, K);
        if (h.partial_sum_exact && h.exact_partial_sum == K + 1.0) ++exact;
        worst_numeric = std::max(worst_numeric, rel_err(h.numeric_partial_sum, K + 1.0));
    }
    return {bounded && exact == 64,
            fmt("max local / value at R=1 = %.4f over 2^-8..2^8, exact K+1 for %d/64 K (numeric rel err %.2e)",
                worst_local, exact, worst_numeric)};
}

// ---------------------------------------------------------------------------

// int_a^b |x - u|^{s-1} du
double cell_kernel(double s, double x, double a, double b) {
    if (x <= a) return (std::pow(b - x, s) - std::pow(a - x, s)) / s;
    if (x >= b) return (std::pow(x - a, s) - std::pow(x - b, s)) / s;
    return (std::pow(x - a, s) + std::pow(b - x, s)) / s;
}

GridFunction bump(int N) {
    auto f = GridFunction::zeros(-1.5, 1.5, -1.5, 1.5, N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double x = f.mid1(i), y = f.mid2(j), r2 = (x * x + y * y) / 1.44;
            f.at(i, j) = r2 < 1 ? std::exp(-1 / (1 - r2)) : 0.0;
        }
    return f;
}

double max_rel(const GridFunction& a, const GridFunction& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        num = std::max(num, std::abs(a.values[i] - b.values[i]));
        den = std::max(den, std::abs(b.values[i]));
    }
    return num / den;
}

Outcome iterated_operator() {
    const double al = 0.4, be = 0.7;
    auto f = bump(512);
    auto A = product_fractional_integral(f, al, be, AxisOrder::FirstAxisFirst);
    auto B = product_fractional_integral(f, al, be, AxisOrder::SecondAxisFirst);
    double order_err = max_rel(A, B);

    const int N = 64;
    auto g = bump(N);
    auto It = product_fractional_integral(g, al, be);
    auto D = g;
    std::vector<double> K1(N * N), K2(N * N);
    for (int p = 0; p < N; ++p)
        for (int i = 0; i < N; ++i) {
            K1[p * N + i] = cell_kernel(al, g.mid1(p), g.a1 + i * g.h1(), g.a1 + (i + 1) * g.h1());
            K2[p * N + i] = cell_kernel(be, g.mid2(p), g.a2 + i * g.h2(), g.a2 + (i + 1) * g.h2());
        }
    for (int p = 0; p < N; ++p)
        for (int r = 0; r < N; ++r) {
            double s = 0;
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) s += K1[p * N + i] * K2[r * N + j] * g.at(i, j);
            D.at(p, r) = s;
        }
    double direct_err = max_rel(It, D);
    return {order_err <= 1e-9 && direct_err <= 1e-6,
            fmt("orders differ by %.2e at 512^2, direct 4-loop differs by %.2e at 64^2", order_err, direct_err)};
}

// ---------------------------------------------------------------------------

Outcome product_factorization() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    double worst = 0;
    int ok = 0;
    for (int it = 0; it < 20; ++it) {
        auto line = [&] {
            Atomic a;
            int k = 1 + static_cast<int>(rng() % 5);
            for (int i = 0; i < k; ++i) a.atoms.push_back({{(U(rng) - 0.5) * 20}, 0.1 + U(rng)});
            return a;
        };
        Atomic s1 = line(), s2 = line(), w1 = line(), w2 = line();
        auto prod = [](const Atomic& a, const Atomic& b) {
            Atomic c;
            for (const auto& x : a.atoms)
                for (const auto& y : b.atoms) c.atoms.push_back({{x.point[0], y.point[0]}, x.mass * y.mass});
            return c;
        };
        ProductIndices idx;
        idx.p = Real(1.2 + 1.8 * U(rng));
        idx.q = Real(idx.p.value() + 3 * U(rng));
        idx.alpha = Real(0.1 + 0.8 * U(rng));
        idx.beta = Real(0.1 + 0.8 * U(rng));
        LatticeConfig L1, L2;
        L1.k_min = L2.k_min = -4;
        L1.k_max = L2.k_max = 4;
        L1.shifts = L2.shifts = 2;
        L1.seed = rng();
        L2.seed = rng();
        const int K = 20;
        auto sigma = atomic(prod(s1, s2).atoms), omega = atomic(prod(w1, w2).atoms);
        double two = tailed_characteristic(*sigma, *omega, idx, CharKind::TwoTailed, L1, L2, K).sup_value;
        auto a1 = atomic(s1.atoms), b1 = atomic(w1.atoms), a2 = atomic(s2.atoms), b2 = atomic(w2.atoms);
        double f1 = characteristic_1param(*a1, *b1, idx.alpha.value(), idx.p.value(), idx.q.value(), 1,
                                          CharKind::TwoTailed, L1, K)
                        .sup_value;
        double f2 = characteristic_1param(*a2, *b2, idx.beta.value(), idx.p.value(), idx.q.value(), 1,
                                          CharKind::TwoTailed, L2, K)
                        .sup_value;
        double e = rel_err(two, f1 * f2);
        worst = std::max(worst, e);
        if (e <= 1e-9) ++ok;
    }
    return {ok == 20, fmt("%d/20 within 1e-9, worst relative difference %.2e", ok, worst)};
}

// ---------------------------------------------------------------------------

Outcome sandwich_soundness() {
    std::mt19937_64 rng(8);
    int tuples = 0, good = 0, boundary = 0;
    long samples = 0;
    double worst_ratio = 0;
    std::string first_bad;
    while (tuples < 1000) {
        ProductIndices idx;
        idx.m = 1 + static_cast<int>(rng() % 3);
        idx.n = 1 + static_cast<int>(rng() % 3);
        idx.p = Real(Rational(11, 10) + rnd(rng, 0, 30, 10));
        idx.q = Real(idx.p.exact().value() + rnd(rng, 0, 40, 10));
        idx.alpha = Real(rnd(rng, 1, 20 * idx.m - 1, 20));
        idx.beta = Real(rnd(rng, 1, 20 * idx.n - 1, 20));
        Real g(rnd(rng, -40, 40, 20));
        Real d = idx.alpha + idx.beta - g - Real(idx.m + idx.n) * idx.gap();
        Verdict v = product_stein_weiss_valid(idx, g, d);
        if (!v.holds()) continue;
        bool near = std::any_of(v.witnesses.begin(), v.witnesses.end(), [](const Condition& c) {
            return c.rel != Relation::Equal && std::abs(c.lhs - c.rhs) < 1e-3;
        });
        if (near) {
            ++boundary;
            continue;
        }
        ++tuples;
        bool ok = true;
        try {
            auto dec = sandwich_decompose(idx, g, d, 10000, rng());
            if (compare(dec.interval_lo, dec.interval_hi) > 0 || dec.pairs.empty()) ok = false;
            for (const auto& sp : dec.pairs) {
                if (!stein_weiss_1param_valid(idx.m, idx.p, idx.q, idx.alpha, sp.w1, sp.v1).holds()) ok = false;
                if (!stein_weiss_1param_valid(idx.n, idx.p, idx.q, idx.beta, sp.w2, sp.v2).holds()) ok = false;
            }
            if (!dec.pointwise_ok || dec.samples_checked != 10000) ok = false;
            samples += dec.samples_checked;
            worst_ratio = std::max(worst_ratio, dec.max_sample_ratio);
        } catch (const std::exception& e) {
            ok = false;
            if (first_bad.empty()) first_bad = e.what();
        }
        if (ok)
            ++good;
        else if (first_bad.empty())
            first_bad = idx.str() + " gamma=" + g.str();
    }
    Outcome o{good == 1000, fmt("%d/1000 tuples sound, %ld samples, max sample ratio %.6f, %d boundary tuples skipped", good,
                    samples, worst_ratio, boundary)};
    if (!first_bad.empty()) o.detail += "; first failure " + first_bad;
    return o;
}

// ---------------------------------------------------------------------------

Outcome sharpness() {
    bool ok = true;
    std::ostringstream os;
    for (auto [p, q] : {std::pair{2.0, 4.0}, std::pair{4.0 / 3.0, 4.0}}) {
        auto one = sharpness_fit(p, q, 1, 1);
        auto two = sharpness_fit(p, q, 1, 2);
        bool a = one.slope >= one.target - 0.4 && one.slope <= one.target + 0.1;
        bool b = two.slope >= two.target - 0.8 && two.slope <= two.target + 0.1;
        auto ot = one_tailed_vs_plain_power(p, q, 1, 8);
        bool c = ot.holds && ot.max_refined_over_C <= 1.2;
        ok = ok && a && b && c;
        os << fmt("(p,q)=(%.4g,%g): 1-param %.3f/%.3f, 2-param %.3f/%.3f, one-tailed C=%.3f refined/C=%.3f; ", p, q,
                  one.slope, one.target, two.slope, two.target, ot.C, ot.max_refined_over_C);
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------

Outcome sans_serif() {
    boost::math::quadrature::tanh_sinh<double> ts;
    double lo = INFINITY, hi = 0;
    for (double eta : {-1.5, -1.0, -0.5, 0.0, 0.5})
        for (int j = -10; j <= 10; ++j) {
            double s = std::exp2(0.5 * j), t = std::exp2(-0.5 * j);
            double quad = ts.integrate(
                [&](double y) {
                    return ts.integrate(
                        [&](double x) {
                            double r = x + y;
                            return r > 1e-150 ? std::pow(r, eta) : 0.0;
                        },
                        0.0, s, 1e-10);
                },
                0.0, t, 1e-9);
            double closed = sans_serif_local_integral(1, 1, s, t, eta).value;
            double r = closed / quad;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    return {lo >= 0.1 && hi <= 10, fmt("closed/quadrature ratio in [%.4f, %.4f]", lo, hi)};
}

}  // namespace

int main() {
    std::vector<Criterion> all{
        {1, "index-law route agreement", 5, route_agreement},
        {2, "finiteness oracle cross-check", 30, finiteness_cross_check},
        {3, "dyadic maximal weak type", 10, maximal_weak_type},
        {4, "simple counterexample transition", 20, simple_transition},
        {5, "half counterexample", 5, half_example},
        {6, "iterated operator", 60, iterated_operator},
        {7, "tailed product factorization", 10, product_factorization},
        {8, "sandwich soundness", 60, sandwich_soundness},
        {9, "sharpness fits", 120, sharpness},
        {10, "sans-serif closed form", 10, sans_serif},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.budget_s;
        bool pass = o.pass && in_time;
        if (!pass) ++failed;
        std::printf("%s %2d %s: %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
