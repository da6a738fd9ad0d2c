#include "wnorm/experiments.hpp"

#include "wnorm/laws.hpp"
#include "wnorm/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wnorm {

namespace {

struct LineFit {
    double slope = 0, intercept = 0, residual = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    double den = n * sxx - sx * sx;
    if (den == 0) throw std::invalid_argument("degenerate regression");
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double r = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - f.intercept - f.slope * x[i];
        r += e * e;
    }
    f.residual = std::sqrt(r / n);
    return f;
}

ProductIndices line_indices(double p, double q, double alpha, double beta) {
    ProductIndices idx;
    idx.p = Real(p);
    idx.q = Real(q);
    idx.alpha = Real(alpha);
    idx.beta = Real(beta);
    return idx;
}

struct SimpleCore {
    double characteristic = 0;
    std::optional<Rectangle> argmax;
};

SimpleCore simple_characteristic(const MeasureSpec& sigma, double rho, double alpha, double beta, double p,
                                 double q, int K) {
    MeasurePtr omega;
    {
        std::vector<Atom> atoms;
        for (int k = 1; k <= K; ++k) atoms.push_back({{std::ldexp(1.0, k), std::exp2(-rho * k)}, 1.0});
        omega = atomic(std::move(atoms));
    }
    LatticeConfig first, second;
    first.k_min = -2;
    first.k_max = K + 3;
    first.shifts = 0;
    second.k_min = -static_cast<int>(std::ceil(rho * K)) - 3;
    second.k_max = 3;
    second.shifts = 0;
    auto rep = characteristic_sup(sigma, *omega, line_indices(p, q, alpha, beta), first, second);
    return {rep.sup_value, rep.argmax};
}

}  // namespace

SimpleReport example_simple(double rho, double alpha, double beta, double p, double q, int K) {
    if (!(alpha > 0 && alpha < 1 && beta > 0 && beta < 1)) throw std::invalid_argument("need 0 < alpha, beta < 1");
    if (!(p > 1 && q > 1 && std::isfinite(p) && std::isfinite(q))) throw std::invalid_argument("need 1 < p, q < inf");
    if (K < 8) throw std::invalid_argument("need K >= 8 atoms");
    if (!(rho > 0)) throw std::invalid_argument("need rho > 0");
    SimpleReport r;
    r.alpha = alpha;
    r.beta = beta;
    r.p = p;
    r.q = q;
    r.rho = rho;
    r.K = K;
    r.rho_star = (1 - alpha) / (1 - beta);

    auto sigma = dirac_origin();
    auto full = simple_characteristic(*sigma, rho, alpha, beta, p, q, K);
    auto half = simple_characteristic(*sigma, rho, alpha, beta, p, q, K / 2);
    r.characteristic = full.characteristic;
    r.argmax = full.argmax;
    r.characteristic_half = half.characteristic;
    r.characteristic_bounded =
        std::isfinite(full.characteristic) && full.characteristic <= 1.1 * half.characteristic;

    Atomic origin{{{{0.0, 0.0}, 1.0}}};
    std::vector<std::vector<double>> points;
    for (int k = 1; k <= K; ++k) points.push_back({std::ldexp(1.0, k), std::exp2(-rho * k)});
    DyadicConfig c1{-4, K + 4, 0.0};
    DyadicConfig c2{-static_cast<int>(std::ceil(rho * K)) - 4, 4, 0.0};
    auto mx = product_dyadic_maximal(origin, alpha, beta, 1, 1, c1, c2, points);
    std::vector<double> masses(points.size(), 1.0);
    for (const auto& v : mx) r.maximal_values.push_back(v.value);
    r.weak_quotient = weak_type_quotient(r.maximal_values, masses, q, 1.0);
    r.quotient_floor = 0.5 * std::pow(static_cast<double>(K), 1 / q);
    return r;
}

SimpleGrowth simple_growth(double rho, double alpha, double beta, double p, double q, const std::vector<int>& Ks) {
    if (Ks.size() < 2) throw std::invalid_argument("need at least two atom counts");
    SimpleGrowth g;
    g.Ks = Ks;
    std::vector<double> lx, ly;
    for (int K : Ks) {
        auto r = example_simple(rho, alpha, beta, p, q, K);
        g.characteristic.push_back(r.characteristic);
        g.quotient.push_back(r.weak_quotient);
        lx.push_back(std::log(static_cast<double>(K)));
        ly.push_back(std::log(r.weak_quotient));
    }
    g.quotient_exponent = least_squares(lx, ly).slope;
    auto [lo, hi] = std::minmax_element(g.characteristic.begin(), g.characteristic.end());
    g.characteristic_spread = *hi / *lo - 1;
    return g;
}

HalfReport example_half(const Real& p, const Real& q, int m, int K) {
    if (m < 1 || m > 3) throw std::invalid_argument("dimension m must be 1, 2 or 3");
    if (!(compare(Real(1), p) < 0 && compare(p, q) < 0)) throw std::invalid_argument("need 1 < p < q");
    if (K < 1) throw std::invalid_argument("need K >= 1");
    HalfReport r;
    r.p = p;
    r.q = q;
    r.m = m;
    r.K = K;
    Real M(m), pp = conjugate(p);
    r.alpha = M * gamma_gap(p, q);
    const double a = r.alpha.value(), pd = p.value(), qd = q.value(), ppd = pp.value();

    auto sigma = density(radial_power((M * pp / q).value()));
    auto omega = density(shifted_power(-m * qd));
    for (int j = -8; j <= 8; ++j) {
        Cube Q{std::vector<double>(m, 0.0), std::ldexp(2.0, j)};
        double v = local_characteristic(*sigma, *omega, Q, a, pd, qd);
        r.log2_radii.push_back(j);
        r.local_values.push_back(v);
        if (j == 0) r.value_at_one = v;
        r.max_local = std::max(r.max_local, v);
    }
    r.plain_bounded = std::isfinite(r.max_local) && r.max_local <= 4 * r.value_at_one;

    r.shell_exponent = pp * (r.alpha + M / q - M / p);
    if (r.shell_exponent.is_exact() && *r.shell_exponent.exact() == 0) {
        r.exact_partial_sum = K + 1.0;
        r.partial_sum_exact = true;
    } else {
        for (int k = 0; k <= K; ++k) r.exact_partial_sum += std::exp2(k * r.shell_exponent.value());
    }
    Cube unit{std::vector<double>(m, 0.0), 2.0};
    auto shell = shell_sum(*sigma, unit, (a - m) * ppd, K);
    r.numeric_partial_sum = shell.sum / cube_mass(*sigma, unit).value;

    LatticeConfig lat;
    lat.k_min = -4;
    lat.k_max = 4;
    lat.shifts = 0;
    lat.cornered = false;
    r.one_tailed = characteristic_1param(*sigma, *omega, a, pd, qd, m, CharKind::OneTailed, lat, K);

    Real e = M * pp / q;
    r.ap_window.add(check("-m < m p'/q", Real(-m), Relation::Less, e));
    r.ap_window.add(check("m p'/q < m(p'-1)", e, Relation::Less, M * (pp - Real(1))));
    r.ap_window.settle();
    return r;
}

namespace {

double log_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return 0.5 * std::log(s);
}

}  // namespace

SandwichDecomposition sandwich_decompose(const ProductIndices& idx, const Real& gamma, const Real& delta,
                                         int samples, std::uint64_t seed) {
    idx.validate();
    if (compare(idx.alpha, Real(idx.m)) >= 0 || compare(idx.beta, Real(idx.n)) >= 0)
        throw std::domain_error("exceptional case alpha = m or beta = n: use the reduced one-parameter branch");
    if (!product_stein_weiss_valid(idx, gamma, delta).holds())
        throw std::domain_error("power-weight tuple is not valid");
    const Real m(idx.m), n(idx.n), mn(idx.m + idx.n), zero(0), one(1);
    const Real G = idx.gap(), pp = idx.p_prime(), q = idx.q;
    const Real& a = idx.alpha;
    const Real& b = idx.beta;

    SandwichDecomposition d;
    d.seed = seed;
    auto add_pair = [&](Real v1, Real v2, Real w1, Real w2) {
        SandwichPair sp{v1, v2, w1, w2, {}, {}};
        sp.first = stein_weiss_1param_valid(idx.m, idx.p, idx.q, a, w1, v1);
        sp.second = stein_weiss_1param_valid(idx.n, idx.p, idx.q, b, w2, v2);
        d.pairs.push_back(std::move(sp));
    };

    bool g_neg = compare(gamma, zero) < 0, d_neg = compare(delta, zero) < 0;
    if (!g_neg && !d_neg) {
        d.case_id = 1;
        Real base0 = delta - b + n * G, base1 = b - n * G;
        Real lo_open = max(base0 - m / pp, -(n / q)), hi_open = min(m / q - gamma, n / pp - base1);
        Real lo_sign = max(-gamma, -base1), hi_sign = min(zero, base0);
        Real lo = max(lo_open, lo_sign), hi = min(hi_open, hi_sign);
        int c = compare(lo, hi);
        bool ok = c < 0 || (c == 0 && compare(lo_open, lo) < 0 && compare(hi, hi_open) < 0);
        if (!ok) throw FeasibilityContradiction("empty feasibility interval for a valid tuple");
        d.interval_lo = lo;
        d.interval_hi = hi;
        Real lam = (lo + hi) / Real(2);
        d.lambda_used = lam;
        add_pair(base0 - lam, base1 + lam, gamma + lam, -lam);
        d.young_constant = 1;
    } else {
        bool case2 = g_neg;
        d.case_id = case2 ? 2 : 3;
        Real eta = case2 ? -gamma : -delta;
        Real rho = gamma + delta;
        Real eta1 = a + eta - (m / n) * b, rho1 = rho - (a + b) + (mn / n) * b;
        Real eta2 = b + eta - (n / m) * a, rho2 = rho - (a + b) + (mn / m) * a;
        d.eta1 = eta1;
        d.rho1 = rho1;
        d.eta2 = eta2;
        d.rho2 = rho2;
        Real s1 = rho1 * m / mn + eta1, t1 = rho1 * n / mn;
        Real s2 = rho2 * m / mn, t2 = rho2 * n / mn + eta2;
        if (case2) {
            add_pair(s1, t1, -eta, zero);
            add_pair(s2, t2, zero, -eta);
        } else {
            add_pair(-eta, zero, s1, t1);
            add_pair(zero, -eta, s2, t2);
        }
        d.young_constant = std::max(1.0, std::exp2(eta.value() - 1));
    }

    std::mt19937_64 rng(seed);
    auto coords = [&](int dim) {
        std::vector<double> v(dim);
        for (auto& x : v) {
            double sign = portable_uniform(rng()) < 0.5 ? -1.0 : 1.0;
            x = sign * std::exp2(16 * portable_uniform(rng()) - 8);
        }
        return v;
    };
    const double gd = gamma.value(), dd = delta.value(), logC = std::log(d.young_constant);
    d.max_sample_ratio = 0;
    for (int i = 0; i < samples; ++i) {
        auto x = coords(idx.m), y = coords(idx.n), u = coords(idx.m), t = coords(idx.n);
        std::vector<double> xy(x), ut(u);
        xy.insert(xy.end(), y.begin(), y.end());
        ut.insert(ut.end(), t.begin(), t.end());
        double lhs = -gd * log_norm(xy) - dd * log_norm(ut);
        double lx = log_norm(x), ly = log_norm(y), lu = log_norm(u), lt = log_norm(t);
        std::vector<double> terms;
        for (const auto& sp : d.pairs)
            terms.push_back(-sp.w1.value() * lx - sp.w2.value() * ly - sp.v1.value() * lu - sp.v2.value() * lt);
        double top = *std::max_element(terms.begin(), terms.end());
        double s = 0;
        for (double e : terms) s += std::exp(e - top);
        double rhs = logC + top + std::log(s);
        d.max_sample_ratio = std::max(d.max_sample_ratio, std::exp(lhs - rhs));
        ++d.samples_checked;
    }
    d.pointwise_ok = d.max_sample_ratio <= 1 + 1e-9;
    return d;
}

namespace {

ExponentFit factor_fit(double p, double q, int family_size) {
    const double pp = conjugate(p), qp = conjugate(q), alpha = 1 / p - 1 / q;
    if (!(alpha > 0)) throw std::domain_error("balanced order vanishes when p = q; no fractional integral to test");
    bool omega_side = q / pp >= pp / q;
    ExponentFit f;
    f.family = omega_side ? "omega = |x|^{d-1}, sigma = omega^{-p'/q}, dual test 1_[0,1]"
                          : "sigma = |x|^{d-1}, omega = sigma^{-q/p'}, test 1_[0,1]";
    f.target = 1 + std::max(pp / q, q / pp);
    LatticeConfig lat;
    lat.k_min = -4;
    lat.k_max = 4;
    lat.shifts = 0;
    std::vector<double> lx, ly;
    for (int j = 0; j < family_size; ++j) {
        double d = 0.1 * std::ldexp(1.0, -j);
        double e_near = d - 1;
        double e_far = omega_side ? -e_near * pp / q : -e_near * q / pp;
        auto near = density(radial_power(e_near)), far = density(radial_power(e_far));
        const MeasureSpec& sigma = omega_side ? *far : *near;
        const MeasureSpec& omega = omega_side ? *near : *far;
        double A = characteristic_1param(sigma, omega, alpha, p, q, 1, CharKind::Plain, lat).sup_value;
        double N = omega_side ? power_testing_norm(alpha, e_near, e_far, 0, 1, pp) / std::pow(1 / d, 1 / qp)
                              : power_testing_norm(alpha, e_near, e_far, 0, 1, q) / std::pow(1 / d, 1 / p);
        if (!std::isfinite(A) || !std::isfinite(N) || !(A > 0) || !(N > 0)) {
            ++f.dropped;
            continue;
        }
        f.parameters.push_back(d);
        f.characteristic.push_back(A);
        f.norm_lower.push_back(N);
        lx.push_back(std::log(A));
        ly.push_back(std::log(N));
    }
    if (lx.size() < 5) throw std::runtime_error("fewer than five usable family points");
    auto lf = least_squares(lx, ly);
    f.slope = lf.slope;
    f.intercept = lf.intercept;
    f.residual = lf.residual;
    return f;
}

}  // namespace

ExponentFit sharpness_fit(double p, double q, int m, int parameters, int family_size) {
    if (m != 1) throw std::invalid_argument("sharpness fits are implemented on the line (m = 1)");
    if (!(p > 1 && p <= q && std::isfinite(q))) throw std::invalid_argument("need 1 < p <= q < inf");
    if (family_size < 5) throw std::invalid_argument("family needs at least five points");
    if (parameters == 1) return factor_fit(p, q, family_size);
    if (parameters != 2) throw std::invalid_argument("parameters must be 1 or 2");
    ExponentFit first = factor_fit(p, q, family_size), second = factor_fit(p, q, family_size);
    ExponentFit f;
    f.family = "product of two one-parameter families";
    f.target = 2 * first.target;
    f.slope = first.slope + second.slope;
    f.residual = std::hypot(first.residual, second.residual);
    f.dropped = first.dropped + second.dropped;
    size_t n = std::min(first.parameters.size(), second.parameters.size());
    for (size_t i = 0; i < n; ++i) {
        f.parameters.push_back(first.parameters[i]);
        f.characteristic.push_back(first.characteristic[i] * second.characteristic[i]);
        f.norm_lower.push_back(first.norm_lower[i] * second.norm_lower[i]);
    }
    f.intercept = first.intercept + second.intercept;
    f.factors = {std::move(first), std::move(second)};
    return f;
}

OneTailedReport one_tailed_vs_plain_power(double p, double q, int m, int samples) {
    if (m < 1 || m > 3) throw std::invalid_argument("dimension m must be 1, 2 or 3");
    if (!(p > 1 && p < q && std::isfinite(q))) throw std::invalid_argument("need 1 < p < q < inf");
    if (samples < 2) throw std::invalid_argument("need at least two samples");
    const double pp = conjugate(p), alpha = m * (1 / p - 1 / q);
    OneTailedReport rep;
    rep.exponent = 1 + std::max(pp / q, q / pp);
    // w = |x|^g is admissible for -m/q < g < m/p'
    const double lo = -m / q, hi = m / pp;
    LatticeConfig coarse;
    coarse.k_min = -2;
    coarse.k_max = 2;
    coarse.shifts = 0;
    coarse.cornered = false;
    LatticeConfig fine = coarse;
    fine.cornered = true;
    fine.shifts = 3;
    std::vector<Cube> probes;
    for (int k : {-2, 0, 2}) probes.push_back({std::vector<double>(m, 0.0), std::ldexp(1.0, k)});
    for (int i = 0; i < samples; ++i) {
        double c = std::cos(std::numbers::pi * i / (samples - 1));
        double g = 0.5 * (lo + hi) + 0.49 * (hi - lo) * c;
        auto sigma = density(radial_power(-g * pp)), omega = density(radial_power(g * q));
        OneTailedSample s;
        s.gamma = g;
        s.plain = characteristic_1param(*sigma, *omega, alpha, p, q, m, CharKind::Plain, coarse).sup_value;
        s.one_tailed =
            characteristic_1param(*sigma, *omega, alpha, p, q, m, CharKind::OneTailed, coarse, 1 << 20).sup_value;
        s.ratio = s.one_tailed / std::pow(s.plain, rep.exponent);
        s.refined_plain = characteristic_1param(*sigma, *omega, alpha, p, q, m, CharKind::Plain, fine).sup_value;
        s.refined_one_tailed =
            characteristic_1param(*sigma, *omega, alpha, p, q, m, CharKind::OneTailed, fine, 40).sup_value;
        s.refined_ratio = s.refined_one_tailed / std::pow(s.refined_plain, rep.exponent);
        s.rd_epsilon = reverse_doubling_estimate(*sigma, probes, 4).epsilon;
        s.rd_ratio = (1 / s.rd_epsilon) / std::pow(s.plain, pp);
        rep.C = std::max(rep.C, s.ratio);
        rep.rd_constant = std::max(rep.rd_constant, s.rd_ratio);
        rep.samples.push_back(s);
    }
    for (const auto& s : rep.samples) rep.max_refined_over_C = std::max(rep.max_refined_over_C, s.refined_ratio / rep.C);
    rep.holds = rep.max_refined_over_C <= 1.2;
    return rep;
}

}  // namespace wnorm
