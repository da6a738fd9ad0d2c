#include "wnorm/laws.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wnorm {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Balanced: return "Balanced";
        case Regime::HalfBalanced: return "HalfBalanced";
        case Regime::StrictlySubbalanced: return "StrictlySubbalanced";
        case Regime::Supercritical: return "Supercritical";
        case Regime::Degenerate: return "Degenerate";
    }
    return "?";
}

Regime classify(const ProductIndices& idx, double tol) {
    idx.validate();
    Real G = idx.gap();
    if (compare(G, Real(0), tol) <= 0) return Regime::Degenerate;
    Real a = idx.alpha / Real(idx.m), b = idx.beta / Real(idx.n);
    Real lo = min(a, b);
    int c = compare(lo, G, tol);
    if (c < 0) return Regime::Supercritical;
    if (c > 0) return Regime::StrictlySubbalanced;
    return compare(a, b, tol) == 0 ? Regime::Balanced : Regime::HalfBalanced;
}

Verdict one_weight_necessary(const ProductIndices& idx, double tol) {
    idx.validate();
    Verdict v;
    Real G = idx.gap();
    v.add(check("p < q", idx.p, Relation::Less, idx.q, tol));
    v.add(check("alpha/m = Gamma", idx.alpha / Real(idx.m), Relation::Equal, G, tol));
    v.add(check("beta/n = Gamma", idx.beta / Real(idx.n), Relation::Equal, G, tol));
    v.settle();
    return v;
}

namespace {

// (i)-(iii) of the rectangle characteristic criterion, appended to v.
void characteristic_conditions(Verdict& v, const ProductIndices& idx, const Real& gamma,
                               const Real& delta, double tol) {
    Real m(idx.m), n(idx.n), mn(idx.m + idx.n);
    Real G = idx.gap();
    Real pp = idx.p_prime();
    v.add(check("gamma*q < m+n", gamma * idx.q, Relation::Less, mn, tol));
    v.add(check("delta*p' < m+n", delta * pp, Relation::Less, mn, tol));
    v.add(check("Gamma*(m+n) = alpha+beta-gamma-delta", G * mn, Relation::Equal,
                idx.alpha + idx.beta - gamma - delta, tol));

    auto Dn = delta_bracket(gamma, delta, idx.n, idx.p, idx.q, tol);
    auto Dm = delta_bracket(gamma, delta, idx.m, idx.p, idx.q, tol);
    auto rel = [](bool strict) { return strict ? Relation::Less : Relation::LessEq; };
    if (Dn.any_boundary) v.strictness_notes.push_back("Delta(n) has a vanishing positive part: strict inequality");
    if (Dm.any_boundary) v.strictness_notes.push_back("Delta(m) has a vanishing positive part: strict inequality");

    Real a = idx.alpha / m, b = idx.beta / n;
    v.add(check("Gamma + Delta(n)/m <= alpha/m", G + Dn.value / m, rel(Dn.any_boundary), a, tol));
    v.add(check("alpha/m <= Gamma + (gamma+delta)/m - Delta(m)/m", a, rel(Dm.any_boundary),
                G + (gamma + delta) / m - Dm.value / m, tol));
    v.add(check("Gamma + Delta(m)/n <= beta/n", G + Dm.value / n, rel(Dm.any_boundary), b, tol));
    v.add(check("beta/n <= Gamma + (gamma+delta)/n - Delta(n)/n", b, rel(Dn.any_boundary),
                G + (gamma + delta) / n - Dn.value / n, tol));
}

}  // namespace

Verdict power_characteristic_finite(const ProductIndices& idx, const Real& gamma, const Real& delta,
                                    double tol) {
    idx.validate();
    Verdict v;
    characteristic_conditions(v, idx, gamma, delta, tol);
    v.settle();
    return v;
}

Verdict stein_weiss_index_conditions(const ProductIndices& idx, const Real& gamma, const Real& delta,
                                     bool literal, double tol) {
    idx.validate();
    Verdict v;
    Real m(idx.m), n(idx.n), mn(idx.m + idx.n);
    Real G = idx.gap();
    Real pp = idx.p_prime(), qp = idx.q_prime();
    v.add(check("p <= q", idx.p, Relation::LessEq, idx.q, tol));
    v.add(check("Gamma + (gamma+delta)/(m+n) = (alpha+beta)/(m+n)", G + (gamma + delta) / mn,
                Relation::Equal, (idx.alpha + idx.beta) / mn, tol));
    v.add(check("gamma + delta >= 0", gamma + delta, Relation::GreaterEq, Real(0), tol));
    int sg = compare(gamma, Real(0), tol), sd = compare(delta, Real(0), tol);
    if (sg >= 0 && sd <= 0) {
        v.add(check("beta - n/p < delta", idx.beta - n / idx.p, Relation::Less, delta, tol));
        v.add(check("alpha - m/p < delta", idx.alpha - m / idx.p, Relation::Less, delta, tol));
    }
    if (sd >= 0 && sg <= 0) {
        v.add(check("beta - n/q' < gamma", idx.beta - n / qp, Relation::Less, gamma, tol));
        v.add(check("alpha - m/q' < gamma", idx.alpha - m / qp, Relation::Less, gamma, tol));
    }
    if (!literal) {
        v.add(check("gamma*q < m+n", gamma * idx.q, Relation::Less, mn, tol));
        v.add(check("delta*p' < m+n", delta * pp, Relation::Less, mn, tol));
        v.add(check("alpha/m >= Gamma", idx.alpha / m, Relation::GreaterEq, G, tol));
        v.add(check("beta/n >= Gamma", idx.beta / n, Relation::GreaterEq, G, tol));
        v.add(check("alpha <= m", idx.alpha, Relation::LessEq, m, tol));
        v.add(check("beta <= n", idx.beta, Relation::LessEq, n, tol));
        Real one(1);
        v.add(check("alpha/m <= gamma/m + 1/q'", idx.alpha / m, Relation::LessEq, gamma / m + one / qp, tol));
        v.add(check("alpha/m <= delta/m + 1/p", idx.alpha / m, Relation::LessEq, delta / m + one / idx.p, tol));
        v.add(check("beta/n <= gamma/n + 1/q'", idx.beta / n, Relation::LessEq, gamma / n + one / qp, tol));
        v.add(check("beta/n <= delta/n + 1/p", idx.beta / n, Relation::LessEq, delta / n + one / idx.p, tol));
    }
    v.settle();
    return v;
}

Verdict stein_weiss_1param_valid(int m, const Real& p, const Real& q, const Real& alpha,
                                 const Real& gamma, const Real& delta, double tol) {
    if (m < 1) throw std::domain_error("dimension must be >= 1");
    Real pp = conjugate(p);
    conjugate(q);
    Real M(m);
    Verdict v;
    v.add(check("0 < alpha", Real(0), Relation::Less, alpha, tol));
    v.add(check("alpha < m", alpha, Relation::Less, M, tol));
    v.add(check("p <= q", p, Relation::LessEq, q, tol));
    v.add(check("q*gamma < m", q * gamma, Relation::Less, M, tol));
    v.add(check("p'*delta < m", pp * delta, Relation::Less, M, tol));
    v.add(check("gamma + delta >= 0", gamma + delta, Relation::GreaterEq, Real(0), tol));
    v.add(check("1/p - 1/q = (alpha-gamma-delta)/m", gamma_gap(p, q), Relation::Equal,
                (alpha - gamma - delta) / M, tol));
    v.settle();
    return v;
}

Verdict power_corollary_bounds(const ProductIndices& idx, const Real& gamma, const Real& delta,
                               double tol) {
    idx.validate();
    Verdict v;
    Real m(idx.m), n(idx.n), one(1);
    Real pp = idx.p_prime(), qp = idx.q_prime();
    v.add(check("alpha <= m", idx.alpha, Relation::LessEq, m, tol));
    v.add(check("beta <= n", idx.beta, Relation::LessEq, n, tol));
    v.add(check("alpha/m <= gamma/m + 1/q'", idx.alpha / m, Relation::LessEq, gamma / m + one / qp, tol));
    v.add(check("alpha/m <= delta/m + 1/p", idx.alpha / m, Relation::LessEq, delta / m + one / idx.p, tol));
    v.add(check("alpha/m <= (gamma+delta)/m + Gamma", idx.alpha / m, Relation::LessEq,
                (gamma + delta) / m + idx.gap(), tol));
    v.add(check("beta/n <= gamma/n + 1/q'", idx.beta / n, Relation::LessEq, gamma / n + one / qp, tol));
    v.add(check("beta/n <= delta/n + 1/p", idx.beta / n, Relation::LessEq, delta / n + one / idx.p, tol));
    v.add(check("beta/n <= (gamma+delta)/n + Gamma", idx.beta / n, Relation::LessEq,
                (gamma + delta) / n + idx.gap(), tol));
    v.settle();
    return v;
}

namespace {

// alpha = m: the first factor integrates out and the second must satisfy the
// one-parameter inequality with weights shifted by m/q and m/p'.
Verdict exceptional_branch(const ProductIndices& idx, const Real& gamma, const Real& delta,
                           bool first, double tol) {
    int d = first ? idx.m : idx.n;
    int other = first ? idx.n : idx.m;
    const Real& order = first ? idx.beta : idx.alpha;
    Real D(d);
    Real pp = idx.p_prime();
    Verdict v;
    v.add(check("p <= q", idx.p, Relation::LessEq, idx.q, tol));
    v.add(check(first ? "gamma > m/q" : "gamma > n/q", gamma, Relation::Greater, D / idx.q, tol));
    v.add(check(first ? "delta > m/p'" : "delta > n/p'", delta, Relation::Greater, D / pp, tol));
    Verdict sw = stein_weiss_1param_valid(other, idx.p, idx.q, order, gamma - D / idx.q, delta - D / pp, tol);
    for (auto c : sw.witnesses) {
        c.name = "reduced: " + c.name;
        v.add(std::move(c));
    }
    v.settle();
    return v;
}

}  // namespace

namespace {

// an inequality witness decided with equality, exactly or within tolerance
bool touches_boundary(const Verdict& v, double tol) {
    return std::any_of(v.witnesses.begin(), v.witnesses.end(), [tol](const Condition& c) {
        return c.near_boundary || (c.rel != Relation::Equal && std::abs(c.lhs - c.rhs) <= tol);
    });
}

}  // namespace

Verdict product_stein_weiss_valid(const ProductIndices& idx, const Real& gamma, const Real& delta,
                                  double tol) {
    idx.validate();
    bool alpha_edge = compare(idx.alpha, Real(idx.m), tol) == 0;
    bool beta_edge = compare(idx.beta, Real(idx.n), tol) == 0;

    Verdict route3;
    if (alpha_edge || beta_edge) {
        route3 = exceptional_branch(idx, gamma, delta, alpha_edge, tol);
        route3.strictness_notes.push_back(alpha_edge ? "exceptional case alpha = m" : "exceptional case beta = n");
    } else {
        route3 = stein_weiss_index_conditions(idx, gamma, delta, false, tol);
    }

    Verdict routeA;
    routeA.add(check("p <= q", idx.p, Relation::LessEq, idx.q, tol));
    characteristic_conditions(routeA, idx, gamma, delta, tol);
    routeA.settle();

    if (route3.decision != routeA.decision) {
        bool boundary = touches_boundary(route3, tol) || touches_boundary(routeA, tol) || alpha_edge || beta_edge ||
                        !route3.strictness_notes.empty() || !routeA.strictness_notes.empty();
        if (!boundary) {
            std::ostringstream os;
            os << "index routes disagree at " << idx.str() << ", gamma=" << gamma.str()
               << ", delta=" << delta.str();
            throw RouteContradiction(os.str());
        }
        route3.warnings.push_back("routes disagree at a boundary case; reporting the index-condition route");
    }
    return route3;
}

Verdict half_balanced_sufficiency(const ProductIndices& idx, const WeightSpec& v, const WeightSpec& w) {
    if (classify(idx) != Regime::HalfBalanced)
        throw std::invalid_argument("half_balanced_sufficiency needs half-balanced indices");
    double q = idx.q.value(), pp = idx.p_prime().value();
    auto wq = power_of(w, q);
    auto vp = power_of(v, -pp);
    auto mw = a1_product_membership(*wq, idx.m, idx.n);
    auto mv = a1_product_membership(*vp, idx.m, idx.n);
    Verdict out;
    auto note = [](const char* name, const A1Membership& a) {
        std::ostringstream os;
        os << name << ": " << to_string(a.member);
        if (a.bound) os << " (bound " << *a.bound << ")";
        return os.str();
    };
    out.strictness_notes.push_back(note("w^q in A1 x A1", mw));
    out.strictness_notes.push_back(note("v^{-p'} in A1 x A1", mv));
    Condition c;
    c.name = "w^q or v^{-p'} in A1 x A1";
    c.lhs = (mw.member == Decision::True) + (mv.member == Decision::True);
    c.rel = Relation::GreaterEq;
    c.rhs = 1;
    c.satisfied = c.lhs >= 1;
    c.exact = true;
    out.add(c);
    if (mw.member == Decision::True || mv.member == Decision::True) {
        out.decision = Decision::True;
    } else if (mw.member == Decision::Unknown || mv.member == Decision::Unknown) {
        out.decision = Decision::Unknown;
        out.warnings.push_back("product A1 membership undecidable for a tabulated weight");
    } else {
        out.decision = Decision::False;
        out.warnings.push_back("neither side is product A1: a finite characteristic does not give the norm bound");
    }
    return out;
}

double optimal_exponent(double p, double q, int parameters) {
    if (parameters != 1 && parameters != 2) throw std::invalid_argument("parameters must be 1 or 2");
    double pp = conjugate(p);
    conjugate(q);
    double e = 1.0 + std::max(pp / q, q / pp);
    return parameters * e;
}

}  // namespace wnorm
