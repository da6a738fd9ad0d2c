#include "wnorm/operators.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace wnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double riesz(double r, double e) {
    if (r == 0) return e < 0 ? kInf : (e == 0 ? 1.0 : 0.0);
    return std::pow(r, e);
}

void check_order(double alpha) {
    if (!(alpha > 0 && alpha < 1)) throw std::domain_error("fractional order must lie in (0, 1)");
}

double G(double alpha, double v) { return std::copysign(std::pow(std::abs(v), alpha), v) / alpha; }
double H(double alpha, double v) { return std::pow(std::abs(v), alpha + 1) / (alpha * (alpha + 1)); }

using Gauss7 = boost::math::quadrature::gauss<double, 7>;

}  // namespace

double tail_factor(const Cube& Q, double order, std::span<const double> x) {
    if (order >= Q.dim()) throw std::domain_error("tail needs order < dimension");
    return std::pow(1.0 + dist(x, Q.c) / Q.s, order - Q.dim());
}

double tail_value(const TailFunction& tf, std::span<const double> x, std::span<const double> y) {
    if (tf.alpha >= tf.m || tf.beta >= tf.n) throw std::domain_error("tail needs alpha < m and beta < n");
    if (tf.rect.m() != tf.m || tf.rect.n() != tf.n) throw std::invalid_argument("tail dimension mismatch");
    return tail_factor(tf.rect.first(), tf.alpha, x) * tail_factor(tf.rect.second(), tf.beta, y);
}

double kernel_cell_integral(double alpha, double x, double a, double b) {
    double h = b - a;
    if (h <= 0) return 0;
    double c = 0.5 * (a + b);
    if (std::abs(x - c) > 8 * h) {
        return Gauss7::integrate([&](double u) { return std::pow(std::abs(x - u), alpha - 1); }, a, b);
    }
    return G(alpha, x - a) - G(alpha, x - b);
}

double kernel_cell_pair_integral(double alpha, double a, double b, double c, double d) {
    double w = std::max(b - a, d - c);
    if (b <= a || d <= c) return 0;
    double gap = std::max(c - b, a - d);
    if (gap > 4 * w) {
        return Gauss7::integrate([&](double x) { return kernel_cell_integral(alpha, x, c, d); }, a, b);
    }
    return H(alpha, b - c) - H(alpha, a - c) - H(alpha, b - d) + H(alpha, a - d);
}

std::vector<double> fractional_integral_1d(const Grid1D& f, double alpha, std::span<const double> points) {
    check_order(alpha);
    if (f.size() == 0 || !(f.b > f.a)) throw std::invalid_argument("empty grid");
    std::vector<double> out(points.size(), 0.0);
    double h = f.h();
    for (size_t k = 0; k < points.size(); ++k) {
        double s = 0;
        for (int i = 0; i < f.size(); ++i) {
            if (f.values[i] == 0) continue;
            double a = f.a + i * h;
            s += f.values[i] * kernel_cell_integral(alpha, points[k], a, a + h);
        }
        out[k] = s;
    }
    return out;
}

Grid1D fractional_integral_1d(const Grid1D& f, double alpha) {
    std::vector<double> pts(f.size());
    for (int i = 0; i < f.size(); ++i) pts[i] = f.mid(i);
    return {f.a, f.b, fractional_integral_1d(f, alpha, pts)};
}

namespace {

// K[p][i] = int_{cell i} |x_p - u|^{order-1} du, x_p the midpoint of cell p
std::vector<double> kernel_matrix(double order, double a, double b, int n) {
    double h = (b - a) / n;
    std::vector<double> K(static_cast<size_t>(n) * n);
    // depends only on p - i
    std::vector<double> diag(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) diag[d + n - 1] = kernel_cell_integral(order, (d + 0.5) * h, 0.0, h);
    for (int p = 0; p < n; ++p)
        for (int i = 0; i < n; ++i) K[static_cast<size_t>(p) * n + i] = diag[p - i + n - 1];
    return K;
}

}  // namespace

GridFunction product_fractional_integral(const GridFunction& f, double alpha, double beta, AxisOrder order) {
    check_order(alpha);
    check_order(beta);
    f.validate();
    const int n1 = f.n1, n2 = f.n2;
    auto K1 = kernel_matrix(alpha, f.a1, f.b1, n1);
    auto K2 = kernel_matrix(beta, f.a2, f.b2, n2);
    GridFunction mid = f, out = f;
    if (order == AxisOrder::FirstAxisFirst) {
        for (int p = 0; p < n1; ++p)
            for (int j = 0; j < n2; ++j) {
                double s = 0;
                for (int i = 0; i < n1; ++i) s += K1[static_cast<size_t>(p) * n1 + i] * f.at(i, j);
                mid.at(p, j) = s;
            }
        for (int p = 0; p < n1; ++p)
            for (int r = 0; r < n2; ++r) {
                double s = 0;
                for (int j = 0; j < n2; ++j) s += K2[static_cast<size_t>(r) * n2 + j] * mid.at(p, j);
                out.at(p, r) = s;
            }
    } else {
        for (int i = 0; i < n1; ++i)
            for (int r = 0; r < n2; ++r) {
                double s = 0;
                for (int j = 0; j < n2; ++j) s += K2[static_cast<size_t>(r) * n2 + j] * f.at(i, j);
                mid.at(i, r) = s;
            }
        for (int p = 0; p < n1; ++p)
            for (int r = 0; r < n2; ++r) {
                double s = 0;
                for (int i = 0; i < n1; ++i) s += K1[static_cast<size_t>(p) * n1 + i] * mid.at(i, r);
                out.at(p, r) = s;
            }
    }
    return out;
}

std::vector<double> product_fractional_integral_atomic(const Atomic& mu, double alpha, double beta, int m, int n,
                                                       const std::vector<std::vector<double>>& points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& z : points) {
        if (static_cast<int>(z.size()) != m + n) throw std::invalid_argument("point dimension mismatch");
        std::span<const double> zs(z);
        double s = 0;
        for (const auto& a : mu.atoms) {
            std::span<const double> as(a.point);
            s += a.mass * riesz(dist(zs.subspan(0, m), as.subspan(0, m)), alpha - m) *
                 riesz(dist(zs.subspan(m, n), as.subspan(m, n)), beta - n);
        }
        out.push_back(s);
    }
    return out;
}

void DyadicConfig::validate() const {
    if (k_min > k_max) throw std::invalid_argument("empty dyadic generation range");
}

namespace {

// integer coordinates of the generation-k dyadic cube containing x
std::vector<double> dyadic_index(std::span<const double> x, int k, double origin) {
    std::vector<double> idx(x.size());
    for (size_t i = 0; i < x.size(); ++i) idx[i] = std::floor(std::ldexp(x[i] - origin, -k));
    return idx;
}

}  // namespace

std::vector<MaximalValue> dyadic_fractional_maximal_1d(const Atomic& mu, double alpha, const DyadicConfig& cfg,
                                                       std::span<const double> points) {
    cfg.validate();
    std::vector<MaximalValue> out(points.size());
    for (const auto& a : mu.atoms)
        if (a.point.size() != 1) throw std::invalid_argument("atoms must lie on the line");
    for (size_t j = 0; j < points.size(); ++j) {
        MaximalValue best;
        for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
            double cell = std::floor(std::ldexp(points[j] - cfg.origin, -k));
            double mass = 0;
            for (const auto& a : mu.atoms)
                if (std::floor(std::ldexp(a.point[0] - cfg.origin, -k)) == cell) mass += a.mass;
            if (mass == 0) continue;
            double v = std::exp2(k * (alpha - 1)) * mass;
            if (v > best.value) best = {v, k, 0, k == cfg.k_min || k == cfg.k_max};
        }
        out[j] = best;
    }
    return out;
}

std::vector<MaximalValue> product_dyadic_maximal(const Atomic& mu, double alpha, double beta, int m, int n,
                                                 const DyadicConfig& cfg1, const DyadicConfig& cfg2,
                                                 const std::vector<std::vector<double>>& points) {
    cfg1.validate();
    cfg2.validate();
    for (const auto& a : mu.atoms)
        if (static_cast<int>(a.point.size()) != m + n) throw std::invalid_argument("atom dimension mismatch");
    std::vector<MaximalValue> out;
    out.reserve(points.size());
    for (const auto& z : points) {
        if (static_cast<int>(z.size()) != m + n) throw std::invalid_argument("point dimension mismatch");
        std::span<const double> zs(z);
        MaximalValue best;
        std::vector<size_t> hit;
        for (int k1 = cfg1.k_min; k1 <= cfg1.k_max; ++k1) {
            auto c1 = dyadic_index(zs.subspan(0, m), k1, cfg1.origin);
            hit.clear();
            for (size_t i = 0; i < mu.atoms.size(); ++i)
                if (dyadic_index(std::span<const double>(mu.atoms[i].point).subspan(0, m), k1, cfg1.origin) == c1)
                    hit.push_back(i);
            if (hit.empty()) continue;
            for (int k2 = cfg2.k_min; k2 <= cfg2.k_max; ++k2) {
                auto c2 = dyadic_index(zs.subspan(m, n), k2, cfg2.origin);
                double mass = 0;
                for (size_t i : hit)
                    if (dyadic_index(std::span<const double>(mu.atoms[i].point).subspan(m, n), k2, cfg2.origin) == c2)
                        mass += mu.atoms[i].mass;
                if (mass == 0) continue;
                double v = std::exp2(k1 * (alpha - m) + k2 * (beta - n)) * mass;
                if (v > best.value)
                    best = {v, k1, k2,
                            k1 == cfg1.k_min || k1 == cfg1.k_max || k2 == cfg2.k_min || k2 == cfg2.k_max};
            }
        }
        out.push_back(best);
    }
    return out;
}

double weak_type_quotient(std::span<const double> values, std::span<const double> omega_masses, double q,
                          double f_norm) {
    if (values.size() != omega_masses.size()) throw std::invalid_argument("values and masses differ in length");
    if (!(f_norm > 0)) throw std::domain_error("zero input norm");
    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] > values[b]; });
    double best = 0, mass = 0;
    for (size_t i = 0; i < order.size(); ++i) {
        mass += omega_masses[order[i]];
        double v = values[order[i]];
        if (i + 1 < order.size() && values[order[i + 1]] == v) continue;
        if (v > 0) best = std::max(best, v * std::pow(mass, 1.0 / q));
    }
    return best / f_norm;
}

double dyadic_characteristic_1d(const Atomic& sigma, const Atomic& omega, double alpha, double p, double q,
                                const DyadicConfig& cfg) {
    cfg.validate();
    double pp = conjugate(p);
    double best = 0;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        std::map<double, double> s, w;
        for (const auto& a : sigma.atoms) s[std::floor(std::ldexp(a.point.at(0) - cfg.origin, -k))] += a.mass;
        for (const auto& a : omega.atoms) w[std::floor(std::ldexp(a.point.at(0) - cfg.origin, -k))] += a.mass;
        double scale = std::exp2(k * (alpha - 1));
        for (const auto& [cell, ms] : s) {
            auto it = w.find(cell);
            if (it == w.end()) continue;
            best = std::max(best, scale * std::pow(it->second, 1.0 / q) * std::pow(ms, 1.0 / pp));
        }
    }
    return best;
}

NormBound norm_lower_bound(const Atomic& sigma, const Atomic& omega, const ProductIndices& idx,
                           const std::vector<AtomicTestPair>& family) {
    idx.validate();
    const int m = idx.m, n = idx.n;
    double p = idx.p.value(), q = idx.q.value(), qp = idx.q_prime().value();
    double a = idx.alpha.value(), b = idx.beta.value();
    const size_t S = sigma.atoms.size(), W = omega.atoms.size();
    std::vector<double> K(S * W);
    for (size_t i = 0; i < S; ++i) {
        std::span<const double> u(sigma.atoms[i].point);
        if (static_cast<int>(u.size()) != m + n) throw std::invalid_argument("sigma atom dimension mismatch");
        for (size_t j = 0; j < W; ++j) {
            std::span<const double> x(omega.atoms[j].point);
            if (static_cast<int>(x.size()) != m + n) throw std::invalid_argument("omega atom dimension mismatch");
            K[i * W + j] = riesz(dist(x.subspan(0, m), u.subspan(0, m)), a - m) *
                           riesz(dist(x.subspan(m, n), u.subspan(m, n)), b - n);
        }
    }
    NormBound nb;
    for (size_t t = 0; t < family.size(); ++t) {
        const auto& tp = family[t];
        if (tp.f.size() != S) throw std::invalid_argument("test function f has the wrong length");
        double fn = 0;
        for (size_t i = 0; i < S; ++i) fn += std::pow(std::abs(tp.f[i]), p) * sigma.atoms[i].mass;
        fn = std::pow(fn, 1.0 / p);
        std::vector<double> If(W, 0.0);
        for (size_t i = 0; i < S; ++i) {
            double c = tp.f[i] * sigma.atoms[i].mass;
            if (c == 0) continue;
            for (size_t j = 0; j < W; ++j) If[j] += c * K[i * W + j];
        }
        double value;
        if (tp.h) {
            if (tp.h->size() != W) throw std::invalid_argument("test function h has the wrong length");
            double hn = 0, pair = 0;
            for (size_t j = 0; j < W; ++j) {
                hn += std::pow(std::abs((*tp.h)[j]), qp) * omega.atoms[j].mass;
                if ((*tp.h)[j] != 0) pair += If[j] * (*tp.h)[j] * omega.atoms[j].mass;
            }
            hn = std::pow(hn, 1.0 / qp);
            if (fn == 0 || hn == 0) {
                ++nb.skipped;
                continue;
            }
            value = pair / (fn * hn);
        } else {
            if (fn == 0) {
                ++nb.skipped;
                continue;
            }
            double s = 0;
            for (size_t j = 0; j < W; ++j)
                if (If[j] != 0) s += std::pow(If[j], q) * omega.atoms[j].mass;
            value = std::pow(s, 1.0 / q) / fn;
        }
        if (nb.best < 0 || value > nb.value) {
            nb.value = value;
            nb.best = static_cast<int>(t);
        }
    }
    return nb;
}

namespace {

// C[k][i] = int_{B cell k} int_{A cell i} |x-u|^{order-1} du dx
std::vector<double> pair_matrix(double order, double a0, double a1, int na, double b0, double b1, int nb) {
    double ha = (a1 - a0) / na, hb = (b1 - b0) / nb;
    std::vector<double> C(static_cast<size_t>(nb) * na);
    for (int k = 0; k < nb; ++k)
        for (int i = 0; i < na; ++i)
            C[static_cast<size_t>(k) * na + i] =
                kernel_cell_pair_integral(order, b0 + k * hb, b0 + (k + 1) * hb, a0 + i * ha, a0 + (i + 1) * ha);
    return C;
}

bool same_grid(const GridFunction& a, const GridFunction& b) {
    return a.a1 == b.a1 && a.b1 == b.b1 && a.a2 == b.a2 && a.b2 == b.b2 && a.n1 == b.n1 && a.n2 == b.n2;
}

}  // namespace

NormBound norm_lower_bound(const GridFunction& sigma, const GridFunction& omega, const ProductIndices& idx,
                           const std::vector<GridTestPair>& family) {
    idx.validate();
    if (idx.m != 1 || idx.n != 1) throw std::invalid_argument("grid path needs m = n = 1");
    sigma.validate();
    omega.validate();
    double p = idx.p.value(), q = idx.q.value(), qp = idx.q_prime().value();
    double a = idx.alpha.value(), b = idx.beta.value();
    check_order(a);
    check_order(b);
    auto C1 = pair_matrix(a, sigma.a1, sigma.b1, sigma.n1, omega.a1, omega.b1, omega.n1);
    auto C2 = pair_matrix(b, sigma.a2, sigma.b2, sigma.n2, omega.a2, omega.b2, omega.n2);
    const double As = sigma.h1() * sigma.h2(), Aw = omega.h1() * omega.h2();
    NormBound nb;
    for (size_t t = 0; t < family.size(); ++t) {
        const auto& tp = family[t];
        if (!same_grid(tp.f, sigma)) throw std::invalid_argument("f must live on the sigma grid");
        double fn = 0;
        for (size_t i = 0; i < sigma.values.size(); ++i) fn += std::pow(tp.f.values[i], p) * sigma.values[i];
        fn = std::pow(fn * As, 1.0 / p);
        if (fn == 0) {
            ++nb.skipped;
            continue;
        }
        // P[k][l] = integral of I(f sigma) over omega cell (k, l)
        std::vector<double> T(static_cast<size_t>(omega.n1) * sigma.n2, 0.0);
        for (int k = 0; k < omega.n1; ++k)
            for (int i = 0; i < sigma.n1; ++i) {
                double c = C1[static_cast<size_t>(k) * sigma.n1 + i];
                for (int j = 0; j < sigma.n2; ++j)
                    T[static_cast<size_t>(k) * sigma.n2 + j] += c * tp.f.at(i, j) * sigma.at(i, j);
            }
        std::vector<double> P(static_cast<size_t>(omega.n1) * omega.n2, 0.0);
        for (int k = 0; k < omega.n1; ++k)
            for (int l = 0; l < omega.n2; ++l) {
                double s = 0;
                for (int j = 0; j < sigma.n2; ++j)
                    s += C2[static_cast<size_t>(l) * sigma.n2 + j] * T[static_cast<size_t>(k) * sigma.n2 + j];
                P[static_cast<size_t>(k) * omega.n2 + l] = s;
            }
        double value;
        if (tp.h) {
            if (!same_grid(*tp.h, omega)) throw std::invalid_argument("h must live on the omega grid");
            double hn = 0, pair = 0;
            for (size_t c = 0; c < P.size(); ++c) {
                hn += std::pow(tp.h->values[c], qp) * omega.values[c];
                pair += P[c] * tp.h->values[c] * omega.values[c];
            }
            hn = std::pow(hn * Aw, 1.0 / qp);
            if (hn == 0) {
                ++nb.skipped;
                continue;
            }
            value = pair / (fn * hn);
        } else {
            // Jensen on each cell: (int_cell g)^q / |cell|^{q-1} <= int_cell g^q
            double s = 0;
            for (size_t c = 0; c < P.size(); ++c)
                if (omega.values[c] > 0 && P[c] > 0) s += omega.values[c] * std::pow(P[c], q) / std::pow(Aw, q - 1);
            value = std::pow(s, 1.0 / q) / fn;
        }
        if (nb.best < 0 || value > nb.value) {
            nb.value = value;
            nb.best = static_cast<int>(t);
        }
    }
    return nb;
}

}  // namespace wnorm
