#include "wnorm/characteristics.hpp"

#include "wnorm/laws.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Local value from the two masses; a vanishing mass wins over a divergent one.
double combine(double scale, const Mass& w, const Mass& s, double q, double pp) {
    if (w.value == 0 || s.value == 0) return 0;
    if (w.divergent || s.divergent || !std::isfinite(w.value) || !std::isfinite(s.value)) return kInf;
    return scale * std::pow(w.value, 1.0 / q) * std::pow(s.value, 1.0 / pp);
}

int center_index(int k_min, int k_max) { return (k_min <= 0 && 0 <= k_max) ? -k_min : (k_max - k_min) / 2; }

struct Trend {
    double slope = 0;
    bool infinite = false;
};

// Least-squares slope of ln(value) per generation |dk1| + |dk2| over the outer
// half of the compass ray (from the unit scale) whose far end is largest.
Trend growth_trend(const std::vector<double>& table, int n1, int n2, int c1, int c2) {
    for (double v : table)
        if (std::isinf(v)) return {kInf, true};
    double best_end = -1;
    Trend out;
    for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2) {
            if (d1 == 0 && d2 == 0) continue;
            int T = 0;
            while (true) {
                int i = c1 + (T + 1) * d1, j = c2 + (T + 1) * d2;
                if (i < 0 || j < 0 || i >= n1 || j >= n2) break;
                ++T;
            }
            if (T < 2) continue;
            double end = table[static_cast<size_t>(c1 + T * d1) * n2 + (c2 + T * d2)];
            if (!(end > best_end)) continue;
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int cnt = 0;
            for (int t = (T + 1) / 2; t <= T; ++t) {
                double v = table[static_cast<size_t>(c1 + t * d1) * n2 + (c2 + t * d2)];
                if (!(v > 0)) continue;
                double x = t * (std::abs(d1) + std::abs(d2)), y = std::log(v);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++cnt;
            }
            if (cnt < 2) continue;
            best_end = end;
            double den = cnt * sxx - sx * sx;
            out.slope = den > 0 ? (cnt * sxy - sx * sy) / den : 0.0;
        }
    return out;
}

std::vector<double> factor_terms(const MeasureSpec& mu, const Cube& Q, double e, int K, const QuadratureConfig& quad,
                                 bool& divergent) {
    std::vector<double> a(K + 1);
    for (int k = 0; k <= K; ++k) {
        Mass m = cube_mass(mu, Q.dilate(std::ldexp(1.0, k)), quad);
        if (m.divergent) divergent = true;
        a[k] = m.value == 0 ? 0.0 : std::exp2(k * e) * m.value;
    }
    return a;
}

bool centered(const Cube& Q) {
    return std::all_of(Q.c.begin(), Q.c.end(), [](double c) { return c == 0; });
}

// homogeneous density on a centered cube: mu(2^k Q) = 2^{k(d+e)} mu(Q)
std::optional<double> homogeneity(const MeasureSpec& mu, int d) {
    const auto* dens = std::get_if<Density>(&mu.kind);
    if (!dens) return std::nullopt;
    if (const auto* r = std::get_if<RadialPower>(&dens->weight->kind)) return d + r->exponent * dens->power;
    if (std::holds_alternative<Constant>(dens->weight->kind)) return static_cast<double>(d);
    return std::nullopt;
}

// sum_{k=0}^{K} 2^{kx}
double geometric(double x, int K) {
    if (x == 0) return K + 1.0;
    return std::expm1((K + 1.0) * x * std::numbers::ln2) / std::expm1(x * std::numbers::ln2);
}

ShellSum from_terms(const std::vector<double>& a, bool divergent) {
    ShellSum s;
    int K = static_cast<int>(a.size()) - 1;
    for (double v : a) s.sum += v;
    s.last_layer = a[K];
    s.prev_layer = K > 0 ? a[K - 1] : 0;
    s.divergent = divergent;
    if (divergent) s.sum = kInf;
    return s;
}

ShellSum product_of(const std::vector<double>& a, const std::vector<double>& b, bool divergent) {
    int K = static_cast<int>(a.size()) - 1;
    std::vector<double> A(K + 1), B(K + 1);
    double sa = 0, sb = 0;
    for (int k = 0; k <= K; ++k) {
        A[k] = sa += a[k];
        B[k] = sb += b[k];
    }
    auto P = [&](int L) { return L < 0 ? 0.0 : A[L] * B[L]; };
    ShellSum s;
    s.sum = P(K);
    s.last_layer = P(K) - P(K - 1);
    s.prev_layer = P(K - 1) - P(K - 2);
    s.divergent = divergent;
    if (divergent) s.sum = kInf;
    return s;
}

// factor measures of a measure that is a product across the two factors
std::optional<std::pair<MeasurePtr, MeasurePtr>> factorize(const MeasureSpec& mu) {
    if (const auto* pm = std::get_if<ProductMeasure>(&mu.kind)) return std::make_pair(pm->mu1, pm->mu2);
    const auto* dens = std::get_if<Density>(&mu.kind);
    if (!dens) return std::nullopt;
    WeightPtr w = dens->power == 1 ? dens->weight : power_of(*dens->weight, dens->power);
    return std::visit(
        overloaded{
            [&](const ProductPower& k) -> std::optional<std::pair<MeasurePtr, MeasurePtr>> {
                return std::make_pair(density(radial_power(k.e1)), density(radial_power(k.e2)));
            },
            [&](const ProductWeight& k) -> std::optional<std::pair<MeasurePtr, MeasurePtr>> {
                return std::make_pair(density(k.left), density(k.right));
            },
            [&](const ShiftedPower& k) -> std::optional<std::pair<MeasurePtr, MeasurePtr>> {
                auto s = density(shifted_power(k.exponent, k.factor));
                return k.factor == 1 ? std::make_pair(s, lebesgue()) : std::make_pair(lebesgue(), s);
            },
            [&](const Constant& k) -> std::optional<std::pair<MeasurePtr, MeasurePtr>> {
                return std::make_pair(density(constant_weight(k.c)), lebesgue());
            },
            [&](const auto&) -> std::optional<std::pair<MeasurePtr, MeasurePtr>> { return std::nullopt; },
        },
        w->kind);
}

// smallest k in [0, K] with x in the k-th concentric dilate of Q, or -1
int entry_generation(const Cube& Q, std::span<const double> x, int K) {
    for (int k = 0; k <= K; ++k)
        if (Q.dilate(std::ldexp(1.0, k)).contains(x)) return k;
    return -1;
}

void check_cutoff(int K, bool closed_form) {
    if (K < 1) throw std::invalid_argument("shell cutoff K must be >= 1");
    if (!closed_form && K > 400) throw std::invalid_argument("shell cutoff too large for direct summation");
}

}  // namespace

std::string to_string(CharKind k) {
    switch (k) {
        case CharKind::Plain: return "plain";
        case CharKind::OneTailed: return "one-tailed";
        case CharKind::TwoTailed: return "two-tailed";
    }
    return "?";
}

CharKind parse_char_kind(const std::string& s) {
    if (s == "plain") return CharKind::Plain;
    if (s == "one-tailed" || s == "one_tailed") return CharKind::OneTailed;
    if (s == "two-tailed" || s == "two_tailed") return CharKind::TwoTailed;
    throw std::invalid_argument("unknown characteristic kind '" + s + "'");
}

double portable_uniform(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

std::vector<LatticeCube> cube_lattice(int dim, const LatticeConfig& cfg) {
    if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    if (cfg.k_min > cfg.k_max) throw std::invalid_argument("empty lattice scale range");
    std::mt19937_64 rng(cfg.seed);
    std::vector<LatticeCube> out;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
        double s = std::ldexp(1.0, k);
        if (cfg.centered) out.push_back({{std::vector<double>(dim, 0.0), s}, k});
        if (cfg.cornered) out.push_back({{std::vector<double>(dim, s / 2), s}, k});
        for (int i = 0; i < cfg.shifts; ++i) {
            std::vector<double> c(dim);
            for (auto& v : c) v = s * (8 * portable_uniform(rng()) - 4);
            out.push_back({{std::move(c), s}, k});
        }
    }
    return out;
}

double local_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega, const Rectangle& R,
                            const ProductIndices& idx, const QuadratureConfig& quad) {
    idx.validate();
    double scale = std::pow(R.s, idx.alpha.value() - idx.m) * std::pow(R.t, idx.beta.value() - idx.n);
    return combine(scale, rectangle_mass(omega, R, quad), rectangle_mass(sigma, R, quad), idx.q.value(),
                   idx.p_prime().value());
}

double local_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega, const Cube& Q, double alpha,
                            double p, double q, const QuadratureConfig& quad) {
    double scale = std::pow(Q.s, alpha - Q.dim());
    return combine(scale, cube_mass(omega, Q, quad), cube_mass(sigma, Q, quad), q, conjugate(p));
}

ShellSum shell_sum(const MeasureSpec& mu, const Cube& Q, double e, int K, const QuadratureConfig& quad) {
    if (centered(Q)) {
        if (auto h = homogeneity(mu, Q.dim())) {
            check_cutoff(K, true);
            Mass m0 = cube_mass(mu, Q, quad);
            ShellSum s;
            if (m0.divergent) return {kInf, kInf, kInf, true};
            double x = e + *h;
            s.sum = m0.value * geometric(x, K);
            s.last_layer = m0.value * std::exp2(K * x);
            s.prev_layer = m0.value * std::exp2((K - 1) * x);
            return s;
        }
    }
    check_cutoff(K, false);
    bool div = false;
    auto a = factor_terms(mu, Q, e, K, quad, div);
    return from_terms(a, div);
}

ShellSum shell_sum(const MeasureSpec& mu, const Rectangle& R, double e1, double e2, int K,
                   const QuadratureConfig& quad) {
    check_cutoff(K, false);
    if (auto f = factorize(mu)) {
        bool div = false;
        auto a = factor_terms(*f->first, R.first(), e1, K, quad, div);
        auto b = factor_terms(*f->second, R.second(), e2, K, quad, div);
        return product_of(a, b, div);
    }
    auto atom_path = [&](const std::vector<Atom>& atoms) {
        std::vector<double> g1(K + 1), g2(K + 1);
        ShellSum s;
        int m = R.m(), n = R.n();
        for (const auto& a : atoms) {
            if (static_cast<int>(a.point.size()) != m + n)
                throw std::invalid_argument("atom dimension does not match the rectangle");
            std::span<const double> z(a.point);
            int k1 = entry_generation(R.first(), z.subspan(0, m), K);
            int k2 = entry_generation(R.second(), z.subspan(m, n), K);
            if (k1 < 0 || k2 < 0) continue;
            // partial sums P(L) = sum_{i=k*}^{L} 2^{ie}
            auto P = [&](int k0, double e, int L) {
                double t = 0;
                for (int i = k0; i <= L; ++i) t += std::exp2(i * e);
                return t;
            };
            double PK = P(k1, e1, K) * P(k2, e2, K);
            double PK1 = P(k1, e1, K - 1) * P(k2, e2, K - 1);
            double PK2 = K >= 2 ? P(k1, e1, K - 2) * P(k2, e2, K - 2) : 0.0;
            s.sum += a.mass * PK;
            s.last_layer += a.mass * (PK - PK1);
            s.prev_layer += a.mass * (PK1 - PK2);
        }
        return s;
    };
    if (const auto* at = std::get_if<Atomic>(&mu.kind)) return atom_path(at->atoms);
    if (std::holds_alternative<DiracOrigin>(mu.kind)) {
        std::vector<Atom> o{{std::vector<double>(R.m() + R.n(), 0.0), 1.0}};
        return atom_path(o);
    }
    ShellSum s;
    for (int k1 = 0; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) {
            Mass m = rectangle_mass(mu, R.dilate(std::ldexp(1.0, k1), std::ldexp(1.0, k2)), quad);
            if (m.divergent) return {kInf, kInf, kInf, true};
            if (m.value == 0) continue;
            double v = std::exp2(k1 * e1 + k2 * e2) * m.value;
            s.sum += v;
            int L = std::max(k1, k2);
            if (L == K) s.last_layer += v;
            if (L == K - 1) s.prev_layer += v;
        }
    return s;
}

namespace {

enum class Side { None, Omega, Sigma, Both };

struct LatticeRun {
    double sup = 0;
    size_t arg_i = 0, arg_j = 0;
    bool found = false;
    std::vector<double> table;
    double last_fraction = 0;
    bool nondecaying = false;
    bool comparable = false;
    long evaluated = 0;
};

void note_shell(LatticeRun& run, const ShellSum& s) {
    if (s.divergent || !(s.sum > 0)) return;
    run.last_fraction = std::max(run.last_fraction, s.last_layer / s.sum);
    if (s.prev_layer > 0 && s.last_layer >= s.prev_layer) run.nondecaying = true;
}

LatticeRun run_2param(const MeasureSpec& sigma, const MeasureSpec& omega, const ProductIndices& idx,
                      const std::vector<LatticeCube>& L1, const std::vector<LatticeCube>& L2, int kmin1, int kmin2,
                      int n1, int n2, Side side, int K, const QuadratureConfig& quad) {
    const double a = idx.alpha.value(), b = idx.beta.value();
    const double q = idx.q.value(), pp = idx.p_prime().value();
    const int m = idx.m, n = idx.n;
    LatticeRun run;
    run.table.assign(static_cast<size_t>(n1) * n2, 0.0);
    for (size_t i = 0; i < L1.size(); ++i)
        for (size_t j = 0; j < L2.size(); ++j) {
            Rectangle R{L1[i].cube.c, L2[j].cube.c, L1[i].cube.s, L2[j].cube.s};
            double scale = std::pow(R.s, a - m) * std::pow(R.t, b - n);
            double v;
            if (side == Side::None) {
                Mass mw = rectangle_mass(omega, R, quad), ms = rectangle_mass(sigma, R, quad);
                run.comparable = run.comparable || mw.comparable_only || ms.comparable_only;
                v = combine(scale, mw, ms, q, pp);
            } else {
                Mass mw, ms;
                if (side == Side::Omega || side == Side::Both) {
                    auto s = shell_sum(omega, R, (a - m) * q, (b - n) * q, K, quad);
                    note_shell(run, s);
                    mw = {s.sum, s.divergent, false};
                } else {
                    mw = rectangle_mass(omega, R, quad);
                }
                if (side == Side::Sigma || side == Side::Both) {
                    auto s = shell_sum(sigma, R, (a - m) * pp, (b - n) * pp, K, quad);
                    note_shell(run, s);
                    ms = {s.sum, s.divergent, false};
                } else {
                    ms = rectangle_mass(sigma, R, quad);
                }
                run.comparable = run.comparable || mw.comparable_only || ms.comparable_only;
                v = combine(scale, mw, ms, q, pp);
            }
            ++run.evaluated;
            size_t cell = static_cast<size_t>(L1[i].k - kmin1) * n2 + (L2[j].k - kmin2);
            run.table[cell] = std::max(run.table[cell], v);
            if (!run.found || v > run.sup) {
                run.sup = v;
                run.arg_i = i;
                run.arg_j = j;
                run.found = true;
            }
        }
    return run;
}

LatticeRun run_1param(const MeasureSpec& sigma, const MeasureSpec& omega, double alpha, double p, double q,
                      const std::vector<LatticeCube>& L, int kmin, int nk, Side side, int K,
                      const QuadratureConfig& quad) {
    const double pp = conjugate(p);
    LatticeRun run;
    run.table.assign(nk, 0.0);
    for (size_t i = 0; i < L.size(); ++i) {
        const Cube& Q = L[i].cube;
        int d = Q.dim();
        double scale = std::pow(Q.s, alpha - d);
        Mass mw, ms;
        if (side == Side::Omega || side == Side::Both) {
            auto s = shell_sum(omega, Q, (alpha - d) * q, K, quad);
            note_shell(run, s);
            mw = {s.sum, s.divergent, false};
        } else {
            mw = cube_mass(omega, Q, quad);
        }
        if (side == Side::Sigma || side == Side::Both) {
            auto s = shell_sum(sigma, Q, (alpha - d) * pp, K, quad);
            note_shell(run, s);
            ms = {s.sum, s.divergent, false};
        } else {
            ms = cube_mass(sigma, Q, quad);
        }
        double v = combine(scale, mw, ms, q, pp);
        ++run.evaluated;
        size_t cell = L[i].k - kmin;
        run.table[cell] = std::max(run.table[cell], v);
        if (!run.found || v > run.sup) {
            run.sup = v;
            run.arg_i = i;
            run.found = true;
        }
    }
    return run;
}

void finish(CharacteristicReport& rep, const LatticeRun& run, int n1, int n2, int c1, int c2) {
    rep.sup_value = run.sup;
    auto tr = growth_trend(run.table, n1, n2, c1, c2);
    rep.growth_trend = tr.slope;
    rep.diverging = tr.infinite || tr.slope > kDivergenceSlope || std::isinf(run.sup);
    rep.shell_last_fraction = run.last_fraction;
    rep.shell_nondecaying = run.nondecaying;
    rep.shell_cutoff_warning = run.last_fraction > 1e-6;
    if (run.nondecaying) {
        rep.diverging = true;
        rep.notes.push_back("shell terms do not decay: the tailed sum diverges as K grows");
    } else if (rep.shell_cutoff_warning) {
        rep.notes.push_back("last shell layer exceeds 1e-6 of the sum: increase K");
    }
    rep.comparable_only = run.comparable;
    rep.evaluated = run.evaluated;
    if (rep.comparable_only) rep.notes.push_back("power masses from comparable closed forms");
}

}  // namespace

CharacteristicReport tailed_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega,
                                           const ProductIndices& idx, CharKind kind, const LatticeConfig& first,
                                           const LatticeConfig& second, int K, const QuadratureConfig& quad) {
    idx.validate();
    if (kind != CharKind::Plain && (idx.alpha.value() >= idx.m || idx.beta.value() >= idx.n))
        throw std::domain_error("tailed characteristics need alpha < m and beta < n");
    auto L1 = cube_lattice(idx.m, first);
    auto L2 = cube_lattice(idx.n, second);
    int n1 = first.k_max - first.k_min + 1, n2 = second.k_max - second.k_min + 1;
    int c1 = center_index(first.k_min, first.k_max), c2 = center_index(second.k_min, second.k_max);
    CharacteristicReport rep;
    rep.kind = kind;
    LatticeRun run;
    if (kind == CharKind::Plain) {
        run = run_2param(sigma, omega, idx, L1, L2, first.k_min, second.k_min, n1, n2, Side::None, K, quad);
    } else if (kind == CharKind::TwoTailed) {
        run = run_2param(sigma, omega, idx, L1, L2, first.k_min, second.k_min, n1, n2, Side::Both, K, quad);
        rep.tailed_side = "both";
    } else {
        auto ro = run_2param(sigma, omega, idx, L1, L2, first.k_min, second.k_min, n1, n2, Side::Omega, K, quad);
        auto rs = run_2param(sigma, omega, idx, L1, L2, first.k_min, second.k_min, n1, n2, Side::Sigma, K, quad);
        bool omega_wins = ro.sup >= rs.sup;
        run = omega_wins ? ro : rs;
        run.evaluated = ro.evaluated + rs.evaluated;
        run.nondecaying = ro.nondecaying || rs.nondecaying;
        run.last_fraction = std::max(ro.last_fraction, rs.last_fraction);
        rep.tailed_side = omega_wins ? "omega" : "sigma";
    }
    if (run.found) {
        const auto& I = L1[run.arg_i].cube;
        const auto& J = L2[run.arg_j].cube;
        rep.argmax = Rectangle{I.c, J.c, I.s, J.s};
    }
    finish(rep, run, n1, n2, c1, c2);
    return rep;
}

CharacteristicReport tailed_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega,
                                           const ProductIndices& idx, CharKind kind, const LatticeConfig& lattice,
                                           int K, const QuadratureConfig& quad) {
    LatticeConfig second = lattice;
    second.seed = lattice.seed ^ 0x9E3779B97F4A7C15ull;
    return tailed_characteristic(sigma, omega, idx, kind, lattice, second, K, quad);
}

CharacteristicReport characteristic_sup(const MeasureSpec& sigma, const MeasureSpec& omega,
                                        const ProductIndices& idx, const LatticeConfig& first,
                                        const LatticeConfig& second, const QuadratureConfig& quad) {
    return tailed_characteristic(sigma, omega, idx, CharKind::Plain, first, second, 1, quad);
}

CharacteristicReport characteristic_sup(const MeasureSpec& sigma, const MeasureSpec& omega,
                                        const ProductIndices& idx, const LatticeConfig& lattice,
                                        const QuadratureConfig& quad) {
    return tailed_characteristic(sigma, omega, idx, CharKind::Plain, lattice, 1, quad);
}

CharacteristicReport characteristic_1param(const MeasureSpec& sigma, const MeasureSpec& omega, double alpha,
                                           double p, double q, int dim, CharKind kind,
                                           const LatticeConfig& lattice, int K, const QuadratureConfig& quad) {
    conjugate(p);
    conjugate(q);
    if (kind != CharKind::Plain && alpha >= dim) throw std::domain_error("tailed characteristics need alpha < dim");
    auto L = cube_lattice(dim, lattice);
    int nk = lattice.k_max - lattice.k_min + 1;
    int c = center_index(lattice.k_min, lattice.k_max);
    CharacteristicReport rep;
    rep.kind = kind;
    LatticeRun run;
    if (kind == CharKind::Plain) {
        run = run_1param(sigma, omega, alpha, p, q, L, lattice.k_min, nk, Side::None, K, quad);
    } else if (kind == CharKind::TwoTailed) {
        run = run_1param(sigma, omega, alpha, p, q, L, lattice.k_min, nk, Side::Both, K, quad);
        rep.tailed_side = "both";
    } else {
        auto ro = run_1param(sigma, omega, alpha, p, q, L, lattice.k_min, nk, Side::Omega, K, quad);
        auto rs = run_1param(sigma, omega, alpha, p, q, L, lattice.k_min, nk, Side::Sigma, K, quad);
        bool omega_wins = ro.sup >= rs.sup;
        run = omega_wins ? ro : rs;
        run.evaluated = ro.evaluated + rs.evaluated;
        run.nondecaying = ro.nondecaying || rs.nondecaying;
        run.last_fraction = std::max(ro.last_fraction, rs.last_fraction);
        rep.tailed_side = omega_wins ? "omega" : "sigma";
    }
    if (run.found) rep.argmax_cube = L[run.arg_i].cube;
    finish(rep, run, nk, 1, c, 0);
    return rep;
}

DiracNorm dirac_norm(const MeasureSpec& omega, const ProductIndices& idx) {
    idx.validate();
    const double q = idx.q.value();
    const double e1 = (idx.alpha.value() - idx.m) * q, e2 = (idx.beta.value() - idx.n) * q;
    auto radial = [](std::span<const double> x, double e) {
        double s = 0;
        for (double v : x) s += v * v;
        if (s == 0) return e < 0 ? kInf : (e == 0 ? 1.0 : 0.0);
        return std::pow(std::sqrt(s), e);
    };
    auto factor = [&](const MeasureSpec& mu, double e, int d) -> DiracNorm {
        if (const auto* at = std::get_if<Atomic>(&mu.kind)) {
            double s = 0;
            for (const auto& a : at->atoms) {
                if (static_cast<int>(a.point.size()) != d) throw std::invalid_argument("atom dimension mismatch");
                s += a.mass * radial(a.point, e);
            }
            return {s, std::isinf(s)};
        }
        return {kInf, true};
    };
    return std::visit(overloaded{
                          [&](const Atomic& at) -> DiracNorm {
                              double s = 0;
                              for (const auto& a : at.atoms) {
                                  if (static_cast<int>(a.point.size()) != idx.m + idx.n)
                                      throw std::invalid_argument("atom dimension mismatch");
                                  std::span<const double> z(a.point);
                                  s += a.mass * radial(z.subspan(0, idx.m), e1) * radial(z.subspan(idx.m), e2);
                              }
                              if (std::isinf(s)) return {kInf, true};
                              return {std::pow(s, 1.0 / q), false};
                          },
                          [&](const ProductMeasure& pm) -> DiracNorm {
                              auto a = factor(*pm.mu1, e1, idx.m), b = factor(*pm.mu2, e2, idx.n);
                              if (a.value == 0 || b.value == 0) return {0, false};
                              if (a.divergent || b.divergent) return {kInf, true};
                              return {std::pow(a.value * b.value, 1.0 / q), false};
                          },
                          [&](const auto&) -> DiracNorm { return {kInf, true}; },
                      },
                      omega.kind);
}

namespace {

struct Fit {
    double sum_rj = 0, sum_jj = 0;
    std::vector<double> per;  // per-halving estimates
};

ReverseDoubling finish_fit(const Fit& f, int used, int excluded) {
    if (used == 0) throw std::runtime_error("reverse doubling: every probe lost its mass under halving");
    ReverseDoubling rd;
    rd.epsilon = f.sum_rj / f.sum_jj;
    double s = 0;
    for (double e : f.per) s += (e - rd.epsilon) * (e - rd.epsilon);
    rd.residual = std::sqrt(s / f.per.size());
    rd.used_probes = used;
    rd.excluded_probes = excluded;
    return rd;
}

}  // namespace

ReverseDoubling reverse_doubling_estimate(const MeasureSpec& mu, const std::vector<Rectangle>& probes, int halvings,
                                          Shrink shrink, const QuadratureConfig& quad) {
    if (halvings < 1) throw std::invalid_argument("need at least one halving");
    Fit f;
    int used = 0, excluded = 0;
    for (const auto& R : probes) {
        int D = shrink == Shrink::Both ? R.m() + R.n() : (shrink == Shrink::First ? R.m() : R.n());
        Mass base = rectangle_mass(mu, R, quad);
        if (!(base.value > 0) || base.divergent) {
            ++excluded;
            continue;
        }
        std::vector<double> r;
        bool ok = true;
        for (int j = 1; j <= halvings && ok; ++j) {
            double h = std::ldexp(1.0, -j);
            Rectangle S = R.dilate(shrink == Shrink::Second ? 1.0 : h, shrink == Shrink::First ? 1.0 : h);
            Mass mj = rectangle_mass(mu, S, quad);
            if (!(mj.value > 0) || mj.divergent) ok = false;
            else r.push_back(std::log(mj.value / base.value));
        }
        if (!ok) {
            ++excluded;
            continue;
        }
        ++used;
        for (int j = 1; j <= halvings; ++j) {
            double scale = D * std::numbers::ln2;
            f.sum_rj += -r[j - 1] * j / scale;
            f.sum_jj += static_cast<double>(j) * j;
            f.per.push_back(-r[j - 1] / (j * scale));
        }
    }
    return finish_fit(f, used, excluded);
}

ReverseDoubling reverse_doubling_estimate(const MeasureSpec& mu, const std::vector<Cube>& probes, int halvings,
                                          const QuadratureConfig& quad) {
    if (halvings < 1) throw std::invalid_argument("need at least one halving");
    Fit f;
    int used = 0, excluded = 0;
    for (const auto& Q : probes) {
        Mass base = cube_mass(mu, Q, quad);
        if (!(base.value > 0) || base.divergent) {
            ++excluded;
            continue;
        }
        std::vector<double> r;
        bool ok = true;
        for (int j = 1; j <= halvings && ok; ++j) {
            Mass mj = cube_mass(mu, Q.dilate(std::ldexp(1.0, -j)), quad);
            if (!(mj.value > 0) || mj.divergent) ok = false;
            else r.push_back(std::log(mj.value / base.value));
        }
        if (!ok) {
            ++excluded;
            continue;
        }
        ++used;
        double scale = Q.dim() * std::numbers::ln2;
        for (int j = 1; j <= halvings; ++j) {
            f.sum_rj += -r[j - 1] * j / scale;
            f.sum_jj += static_cast<double>(j) * j;
            f.per.push_back(-r[j - 1] / (j * scale));
        }
    }
    return finish_fit(f, used, excluded);
}

EquivalenceReport equivalence_check(const MeasureSpec& sigma, const MeasureSpec& omega, const ProductIndices& idx,
                                    const LatticeConfig& lattice, int K, const QuadratureConfig& quad) {
    idx.validate();
    EquivalenceReport rep;
    std::vector<Rectangle> probes;
    for (int k : {-6, -2, 2, 6}) {
        double s = std::ldexp(1.0, k);
        probes.push_back({std::vector<double>(idx.m, 0.0), std::vector<double>(idx.n, 0.0), s, s});
        probes.push_back({std::vector<double>(idx.m, 3 * s), std::vector<double>(idx.n, -2 * s), s, s});
    }
    // reverse doubling in each factor separately; the smallest per-probe rate counts
    auto assess = [&](const MeasureSpec& mu, ReverseDoubling& out, const char* name) {
        double worst = kInf;
        try {
            out = reverse_doubling_estimate(mu, probes, 4, Shrink::Both, quad);
            for (const auto& R : probes)
                for (Shrink sh : {Shrink::First, Shrink::Second}) {
                    auto one = reverse_doubling_estimate(mu, std::vector<Rectangle>{R}, 4, sh, quad);
                    worst = std::min(worst, one.epsilon);
                }
        } catch (const std::exception& e) {
            rep.refused = true;
            rep.diagnostic += std::string(name) + ": " + e.what() + "; ";
            return;
        }
        out.epsilon = worst;
        if (!(worst >= kMinReverseDoubling)) {
            rep.refused = true;
            std::ostringstream os;
            os << name << " is not uniformly reverse doubling on the probes (smallest rate " << worst << "); ";
            rep.diagnostic += os.str();
        }
    };
    assess(sigma, rep.sigma_rd, "sigma");
    assess(omega, rep.omega_rd, "omega");
    if (rep.refused) return rep;
    rep.plain = tailed_characteristic(sigma, omega, idx, CharKind::Plain, lattice, K, quad).sup_value;
    rep.one_tailed = tailed_characteristic(sigma, omega, idx, CharKind::OneTailed, lattice, K, quad).sup_value;
    rep.two_tailed = tailed_characteristic(sigma, omega, idx, CharKind::TwoTailed, lattice, K, quad).sup_value;
    rep.two_over_one = rep.two_tailed / rep.one_tailed;
    rep.one_over_plain = rep.one_tailed / rep.plain;
    return rep;
}

namespace {

// One factor of a product measure on the line, as |x|^e dx.
std::optional<double> line_power(const MeasureSpec& mu) {
    const auto* d = std::get_if<Density>(&mu.kind);
    if (!d) return std::nullopt;
    if (const auto* r = std::get_if<RadialPower>(&d->weight->kind)) return r->exponent * d->power;
    if (std::holds_alternative<Constant>(d->weight->kind)) return 0.0;
    return std::nullopt;
}

}  // namespace

namespace {

struct PowerFactor {
    double c, e;  // |u - c|^e
};

using Smooth = std::function<double(double)>;

double gk(const Smooth& f, double lo = 0.0, double hi = 1.0) {
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 8, 1e-11);
}

double factors_at(const std::vector<PowerFactor>& fs, double u, int skip) {
    double v = 1;
    for (int i = 0; i < static_cast<int>(fs.size()); ++i) {
        if (i == skip) continue;
        double d = std::abs(u - fs[i].c);
        if (fs[i].e != 0) v *= std::pow(d, fs[i].e);
    }
    return v;
}

// int over u = end + dir L e^{-t}, t >= 0, of |u - end|^s h(u); the part below
// one ulp of `end` is closed in form with h frozen.
double half_piece(double end, double dir, double L, double s, const Smooth& h, const std::vector<double>& others) {
    if (s <= -1) return kInf;
    double ulp = end == 0 ? 1e-300 : std::abs(std::nextafter(end, 2 * end + 1) - end);
    double tcut = std::max(1.0, std::log(L / ulp));
    double k = 1 + s, lnL = std::log(L);
    auto f = [&](double t) { return std::exp(k * (lnL - t)) * h(end + dir * L * std::exp(-t)); };
    std::vector<double> br{0.0, tcut};
    for (double c : others) {
        double d = (c - end) * dir;
        double tt = std::log(L / std::abs(d));
        if (std::isfinite(tt) && tt > 0 && tt < tcut)
            for (double w : {-3.0, 0.0, 3.0})
                if (tt + w > 0 && tt + w < tcut) br.push_back(tt + w);
    }
    std::sort(br.begin(), br.end());
    double total = 0;
    for (size_t i = 0; i + 1 < br.size(); ++i)
        if (br[i + 1] > br[i]) total += gk(f, br[i], br[i + 1]);
    double u_end = end + dir * L * std::exp(-tcut);
    if (u_end == end) u_end = std::nextafter(end, end + dir);
    total += std::exp(k * (lnL - tcut)) / k * h(u_end);
    return total;
}

// int_lo^hi prod |u - c_i|^{e_i} g(u) du, split at every c_i inside and at the
// midpoints between; each half is integrated on a logarithmic scale toward its
// breakpoint, absorbing that breakpoint's factor.
double integrate_powers(std::vector<PowerFactor> fs, const Smooth& g, double lo, double hi) {
    // centers a few ulps apart would leave sub-ulp pieces
    std::vector<double> anchors{lo, hi};
    for (auto& f : fs) {
        for (double c : anchors)
            if (f.c != c && std::abs(f.c - c) <= 8 * std::numeric_limits<double>::epsilon() * std::abs(c)) {
                f.c = c;
                break;
            }
        anchors.push_back(f.c);
    }
    std::vector<PowerFactor> merged;
    for (const auto& f : fs) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const PowerFactor& g) { return g.c == f.c; });
        if (it == merged.end())
            merged.push_back(f);
        else
            it->e += f.e;
    }
    fs = std::move(merged);
    std::vector<double> cuts{lo, hi};
    std::vector<double> sing;
    for (const auto& f : fs) {
        if (f.c > lo && f.c < hi) cuts.push_back(f.c);
        sing.push_back(f.c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1], L = 0.5 * (b - a);
        for (int side = 0; side < 2; ++side) {
            double end = side == 0 ? a : b, dir = side == 0 ? 1.0 : -1.0;
            int k = -1;
            double s = 0;
            for (int j = 0; j < static_cast<int>(fs.size()); ++j)
                if (fs[j].c == end) {
                    k = j;
                    s = fs[j].e;
                    break;
                }
            Smooth h = [&](double u) { return factors_at(fs, u, k) * g(u); };
            std::vector<double> others;
            for (double c : sing)
                if (c != end) others.push_back(c);
            total += half_piece(end, dir, L, s, h, others);
        }
    }
    return total;
}

}  // namespace

double power_testing_norm(double alpha, double e_in, double e_out, double a, double b, double r) {
    if (!(b > a)) return 0;
    if (e_in <= -1 || e_out <= -1) return kInf;
    const Smooth one = [](double) { return 1.0; };
    auto T = [&](double x) {
        std::vector<PowerFactor> fs{{x, alpha - 1}};
        if (e_in != 0) fs.push_back({0.0, e_in});
        return integrate_powers(fs, one, a, b);
    };
    double mass = integrate_powers({{0.0, e_in}}, one, a, b);
    double tau = r * (alpha - 1) + e_out;
    if (tau >= -1) return kInf;
    // near the origin T behaves like |x|^{min(0, alpha + e_in)} when 0 is in [a, b]
    double s0 = e_out;
    bool origin_inside = a <= 0 && 0 <= b;
    if (origin_inside && alpha + e_in < 0) s0 += r * (alpha + e_in);
    if (s0 <= -1) return kInf;
    double shift = s0 - e_out;
    Smooth g = [&](double x) {
        double t = T(x);
        if (shift != 0) t *= std::pow(std::abs(x), -shift / r);
        return std::pow(t, r);
    };
    double lo = std::min(a, -1.0), hi = std::max(b, 1.0);
    double sum = integrate_powers({{0.0, s0}, {a, 0.0}, {b, 0.0}}, g, lo, hi);
    // tails: x = h z^{-1/eps} with |x|^{tau} (T |x|^{1-alpha})^r
    double eps = -1 - tau;
    auto tail = [&](double h, double sign) {
        double lim = std::pow(mass, r);
        double scale = std::pow(h, -eps) / eps;
        return scale * gk([&](double z) {
            if (z == 0) return lim;
            // z^{-1/eps} overflows long before z reaches 0
            double x = h * std::pow(z, -1 / eps);
            if (!std::isfinite(x) || x > 1e200) return lim;
            return std::pow(T(sign * x) * std::pow(x, 1 - alpha), r);
        });
    };
    sum += tail(hi, 1.0) + tail(-lo, -1.0);
    return std::pow(sum, 1.0 / r);
}

namespace {

double power_interval_mass(double e, double a, double b) {
    return power_cube_integral(e, Cube{{0.5 * (a + b)}, b - a}).value;
}

}  // namespace

TestingReport testing_condition_check(const MeasureSpec& sigma, const MeasureSpec& omega, const ProductIndices& idx,
                                      const std::vector<Rectangle>& sample, const LatticeConfig& lattice) {
    idx.validate();
    TestingReport rep;
    auto refuse = [&](const std::string& why) {
        rep.refused = true;
        rep.diagnostic = why;
        return rep;
    };
    if (idx.m != 1 || idx.n != 1) return refuse("testing check supports m = n = 1 only");
    if (compare(idx.p, idx.q) >= 0) return refuse("testing conditions need p < q");
    if (classify(idx) != Regime::StrictlySubbalanced) return refuse("indices are not strictly subbalanced");
    const double a = idx.alpha.value(), b = idx.beta.value();
    if (!(a > 0 && a < 1 && b > 0 && b < 1)) return refuse("orders must lie in (0, 1)");
    const auto* ps = std::get_if<ProductMeasure>(&sigma.kind);
    const auto* pw = std::get_if<ProductMeasure>(&omega.kind);
    if (!ps || !pw) return refuse("testing check needs product measures");
    auto s1 = line_power(*ps->mu1), s2 = line_power(*ps->mu2);
    auto w1 = line_power(*pw->mu1), w2 = line_power(*pw->mu2);
    if (!s1 || !s2 || !w1 || !w2)
        return refuse("factors must be power densities |x|^e (atoms are not reverse doubling)");
    const double p = idx.p.value(), q = idx.q.value(), pp = idx.p_prime().value(), qp = idx.q_prime().value();
    const double denom = 1 / q + 1 / pp;
    auto in_window = [&](double eps, double order) { return 1 - order < eps && eps < (1 - order) / denom; };
    // reverse doubling exponent of |x|^e on the line is 1 + e
    if (!in_window(1 + *s1, a) || !in_window(1 + *s2, b)) {
        std::ostringstream os;
        os << "sigma reverse doubling exponents (" << 1 + *s1 << ", " << 1 + *s2 << ") outside the windows ("
           << 1 - a << ", " << (1 - a) / denom << ") and (" << 1 - b << ", " << (1 - b) / denom << ")";
        return refuse(os.str());
    }
    bool dual = in_window(1 + *w1, a) && in_window(1 + *w2, b);
    if (!dual) rep.notes.push_back("omega reverse doubling exponents outside the window: dual testing skipped");

    auto A = characteristic_sup(sigma, omega, idx, lattice);
    rep.characteristic = A.sup_value;
    if (!(A.sup_value > 0) || !std::isfinite(A.sup_value)) return refuse("characteristic is zero or infinite on the lattice");

    for (const auto& R : sample) {
        if (R.m() != 1 || R.n() != 1) throw std::invalid_argument("sample rectangles must lie in R x R");
        double x0 = R.c1[0] - R.s / 2, x1 = R.c1[0] + R.s / 2;
        double y0 = R.c2[0] - R.t / 2, y1 = R.c2[0] + R.t / 2;
        double ms = power_interval_mass(*s1, x0, x1) * power_interval_mass(*s2, y0, y1);
        if (!(ms > 0)) {
            ++rep.skipped;
            continue;
        }
        double num = power_testing_norm(a, *s1, *w1, x0, x1, q) * power_testing_norm(b, *s2, *w2, y0, y1, q);
        double quotient = num / (A.sup_value * std::pow(ms, 1 / p));
        if (!rep.argmax || quotient > rep.max_quotient) {
            rep.max_quotient = quotient;
            rep.argmax = R;
        }
        if (dual) {
            double mw = power_interval_mass(*w1, x0, x1) * power_interval_mass(*w2, y0, y1);
            if (mw > 0) {
                double dn = power_testing_norm(a, *w1, *s1, x0, x1, pp) * power_testing_norm(b, *w2, *s2, y0, y1, pp);
                double dq = dn / (A.sup_value * std::pow(mw, 1 / qp));
                rep.max_dual_quotient = std::max(rep.max_dual_quotient.value_or(0.0), dq);
            }
        }
    }
    return rep;
}

}  // namespace wnorm
