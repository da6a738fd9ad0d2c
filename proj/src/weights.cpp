#include "wnorm/weights.hpp"

#include "wnorm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double norm(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double pow_abs(double r, double e) {
    if (e == 0) return 1;
    if (r == 0) return e < 0 ? kInf : 0.0;
    return std::pow(r, e);
}

}  // namespace

GridFunction GridFunction::zeros(double a1, double b1, double a2, double b2, int n1, int n2) {
    GridFunction g{a1, b1, a2, b2, n1, n2, {}};
    g.values.assign(static_cast<size_t>(n1) * n2, 0.0);
    g.validate();
    return g;
}

double GridFunction::integral() const {
    double s = 0;
    for (double v : values) s += v;
    return s * h1() * h2();
}

void GridFunction::validate() const {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("grid resolution must be positive");
    if (!(b1 > a1) || !(b2 > a2)) throw std::invalid_argument("grid box must have positive extent");
    if (values.size() != static_cast<size_t>(n1) * n2) throw std::invalid_argument("grid value count mismatch");
    for (double v : values)
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("grid values must be finite and >= 0");
}

void write_csv(std::ostream& os, const GridFunction& g) {
    os.precision(17);
    os << "a1,b1,a2,b2,n1,n2\n" << g.a1 << ',' << g.b1 << ',' << g.a2 << ',' << g.b2 << ',' << g.n1 << ','
       << g.n2 << '\n';
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) os << (j ? "," : "") << g.at(i, j);
        os << '\n';
    }
}

GridFunction read_csv(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto next = [&]() {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };
    auto fields = [&]() {
        std::vector<double> out;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            ++col;
            try {
                size_t used = 0;
                out.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw std::invalid_argument("csv line " + std::to_string(lineno) + ", column " +
                                            std::to_string(col) + ": not a number '" + cell + "'");
            }
        }
        return out;
    };
    if (!next()) throw std::invalid_argument("csv: empty input");
    if (line.rfind("a1", 0) == 0 && !next()) throw std::invalid_argument("csv: missing box row");
    auto box = fields();
    if (box.size() != 6) throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected 6 header fields");
    GridFunction g{box[0], box[1], box[2], box[3], static_cast<int>(box[4]), static_cast<int>(box[5]), {}};
    for (int i = 0; i < g.n1; ++i) {
        if (!next()) throw std::invalid_argument("csv: expected " + std::to_string(g.n1) + " value rows");
        auto row = fields();
        if (static_cast<int>(row.size()) != g.n2)
            throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(g.n2) + " values");
        g.values.insert(g.values.end(), row.begin(), row.end());
    }
    g.validate();
    return g;
}

WeightPtr radial_power(double e) { return std::make_shared<WeightSpec>(WeightSpec{RadialPower{e}}); }
WeightPtr product_power(double e1, double e2) {
    return std::make_shared<WeightSpec>(WeightSpec{ProductPower{e1, e2}});
}
WeightPtr shifted_power(double e, int factor) {
    if (factor != 1 && factor != 2) throw std::invalid_argument("shifted power factor must be 1 or 2");
    return std::make_shared<WeightSpec>(WeightSpec{ShiftedPower{e, factor}});
}
WeightPtr constant_weight(double c) {
    if (!(c > 0) || !std::isfinite(c)) throw std::invalid_argument("constant weight must be positive");
    return std::make_shared<WeightSpec>(WeightSpec{Constant{c}});
}
WeightPtr product_weight(WeightPtr left, WeightPtr right) {
    if (!left || !right) throw std::invalid_argument("product weight needs two factors");
    return std::make_shared<WeightSpec>(WeightSpec{ProductWeight{std::move(left), std::move(right)}});
}
WeightPtr tabulated(GridFunction g) {
    g.validate();
    return std::make_shared<WeightSpec>(WeightSpec{Tabulated{std::move(g)}});
}

WeightPtr power_of(const WeightSpec& w, double r) {
    return std::visit(overloaded{
                          [&](const RadialPower& k) { return radial_power(k.exponent * r); },
                          [&](const ProductPower& k) { return product_power(k.e1 * r, k.e2 * r); },
                          [&](const ShiftedPower& k) { return shifted_power(k.exponent * r, k.factor); },
                          [&](const Constant& k) { return constant_weight(std::pow(k.c, r)); },
                          [&](const ProductWeight& k) {
                              return product_weight(power_of(*k.left, r), power_of(*k.right, r));
                          },
                          [&](const Tabulated& k) {
                              GridFunction g = k.grid;
                              for (double& v : g.values) {
                                  if (v == 0 && r < 0)
                                      throw std::domain_error("negative power of a vanishing tabulated weight");
                                  v = std::pow(v, r);
                              }
                              return tabulated(std::move(g));
                          },
                      },
                      w.kind);
}

double evaluate_factor(const WeightSpec& w, std::span<const double> x) {
    return std::visit(overloaded{
                          [&](const RadialPower& k) { return pow_abs(norm(x), k.exponent); },
                          [&](const ShiftedPower& k) { return std::pow(1.0 + norm(x), k.exponent); },
                          [&](const Constant& k) { return k.c; },
                          [&](const auto&) -> double {
                              throw std::invalid_argument("weight is not a single-factor weight");
                          },
                      },
                      w.kind);
}

double evaluate(const WeightSpec& w, std::span<const double> x, std::span<const double> y) {
    return std::visit(overloaded{
                          [&](const RadialPower& k) {
                              double s = 0;
                              for (double v : x) s += v * v;
                              for (double v : y) s += v * v;
                              return pow_abs(std::sqrt(s), k.exponent);
                          },
                          [&](const ProductPower& k) { return pow_abs(norm(x), k.e1) * pow_abs(norm(y), k.e2); },
                          [&](const ShiftedPower& k) {
                              return std::pow(1.0 + norm(k.factor == 1 ? x : y), k.exponent);
                          },
                          [&](const Constant& k) { return k.c; },
                          [&](const ProductWeight& k) {
                              return evaluate_factor(*k.left, x) * evaluate_factor(*k.right, y);
                          },
                          [&](const Tabulated& k) {
                              if (x.size() != 1 || y.size() != 1)
                                  throw std::invalid_argument("tabulated weights live on R x R");
                              const GridFunction& g = k.grid;
                              double u = (x[0] - g.a1) / g.h1(), v = (y[0] - g.a2) / g.h2();
                              if (u < 0 || v < 0 || u >= g.n1 || v >= g.n2) return 0.0;
                              return g.at(static_cast<int>(u), static_cast<int>(v));
                          },
                      },
                      w.kind);
}

double evaluate(const WeightSpec& w, std::span<const double> point, int m, int n) {
    if (m < 1 || n < 1 || static_cast<int>(point.size()) != m + n)
        throw std::invalid_argument("point dimension does not match (m, n)");
    return evaluate(w, point.subspan(0, m), point.subspan(m, n));
}

MeasurePtr atomic(std::vector<Atom> atoms) {
    for (const auto& a : atoms) {
        if (!(a.mass > 0) || !std::isfinite(a.mass)) throw std::invalid_argument("atom masses must be positive");
        for (double v : a.point)
            if (!std::isfinite(v)) throw std::invalid_argument("atom points must be finite");
    }
    return std::make_shared<MeasureSpec>(MeasureSpec{Atomic{std::move(atoms)}});
}
MeasurePtr density(WeightPtr w, double power) {
    if (!w) throw std::invalid_argument("density needs a weight");
    return std::make_shared<MeasureSpec>(MeasureSpec{Density{std::move(w), power}});
}
MeasurePtr product_measure(MeasurePtr mu1, MeasurePtr mu2) {
    if (!mu1 || !mu2) throw std::invalid_argument("product measure needs two factors");
    return std::make_shared<MeasureSpec>(MeasureSpec{ProductMeasure{std::move(mu1), std::move(mu2)}});
}
MeasurePtr dirac_origin() { return std::make_shared<MeasureSpec>(MeasureSpec{DiracOrigin{}}); }
MeasurePtr lebesgue() { return density(constant_weight(1.0), 1.0); }

bool Cube::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("cube dimension mismatch");
    for (int i = 0; i < dim(); ++i)
        if (!(x[i] >= c[i] - s / 2 && x[i] < c[i] + s / 2)) return false;
    return true;
}

double Rectangle::volume() const { return std::pow(s, m()) * std::pow(t, n()); }

bool Rectangle::contains(std::span<const double> x, std::span<const double> y) const {
    return first().contains(x) && second().contains(y);
}

namespace {

// int_a^b |x|^e dx
Mass power_interval(double e, double a, double b) {
    if (b <= a) return {};
    if (a < 0 && b > 0) {
        Mass l = power_interval(e, 0, -a), r = power_interval(e, 0, b);
        return {l.value + r.value, l.divergent || r.divergent, false};
    }
    if (b <= 0) return power_interval(e, -b, -a);
    double k = e + 1;
    if (a == 0) {
        if (k <= 0) return {kInf, true, false};
        return {std::pow(b, k) / k, false, false};
    }
    double L = std::log(b / a);
    if (k == 0) return {L, false, false};
    return {std::pow(a, k) * std::expm1(k * L) / k, false, false};
}

// antiderivative of (1+|x|)^e that is odd in x
double shifted_primitive(double e, double x) {
    double u = std::abs(x);
    double k = e + 1;
    double g = k == 0 ? std::log1p(u) : std::expm1(k * std::log1p(u)) / k;
    return x < 0 ? -g : g;
}

bool anchored(const Cube& Q, bool& centered) {
    bool cen = true, cor = true;
    for (double c : Q.c) {
        if (c != 0) cen = false;
        if (std::abs(c) != Q.s / 2) cor = false;
    }
    centered = cen;
    return cen || cor;
}

Mass power_cube_quadrature(double e, const Cube& Q, const QuadratureConfig& quad) {
    int d = Q.dim();
    std::vector<double> lo(d), hi(d);
    bool closed_origin = true;
    for (int i = 0; i < d; ++i) {
        lo[i] = Q.c[i] - Q.s / 2;
        hi[i] = Q.c[i] + Q.s / 2;
        if (!(lo[i] <= 0 && 0 <= hi[i])) closed_origin = false;
    }
    if (closed_origin && e + d <= 0) return {kInf, true, false};
    BoxQuadrature cfg;
    cfg.min_rel_size = std::ldexp(1.0, -quad.max_depth);
    auto f = [e](std::span<const double> z) { return pow_abs(norm(z), e); };
    auto r = integrate_box(f, lo, hi, SingularPoint{std::vector<double>(d, 0.0), e}, cfg);
    return {r.value, r.divergent, false};
}

Mass weight_cube_mass(const WeightSpec& w, const Cube& Q, const QuadratureConfig& quad) {
    return std::visit(overloaded{
                          [&](const RadialPower& k) { return power_cube_integral(k.exponent, Q, quad); },
                          [&](const ShiftedPower& k) { return shifted_power_cube_integral(k.exponent, Q, quad); },
                          [&](const Constant& k) { return Mass{k.c * std::pow(Q.s, Q.dim()), false, false}; },
                          [&](const auto&) -> Mass {
                              throw std::invalid_argument("weight is not a single-factor weight");
                          },
                      },
                      w.kind);
}

Mass times(const Mass& a, const Mass& b) {
    if (a.value == 0 || b.value == 0) return {0, false, a.comparable_only || b.comparable_only};
    return {a.value * b.value, a.divergent || b.divergent, a.comparable_only || b.comparable_only};
}

Mass tabulated_mass(const GridFunction& g, const Rectangle& R) {
    if (R.m() != 1 || R.n() != 1) throw std::invalid_argument("tabulated weights live on R x R");
    double x0 = R.c1[0] - R.s / 2, x1 = R.c1[0] + R.s / 2;
    double y0 = R.c2[0] - R.t / 2, y1 = R.c2[0] + R.t / 2;
    double total = 0;
    for (int i = 0; i < g.n1; ++i) {
        double u0 = std::max(x0, g.a1 + i * g.h1()), u1 = std::min(x1, g.a1 + (i + 1) * g.h1());
        if (u1 <= u0) continue;
        for (int j = 0; j < g.n2; ++j) {
            double v0 = std::max(y0, g.a2 + j * g.h2()), v1 = std::min(y1, g.a2 + (j + 1) * g.h2());
            if (v1 <= v0) continue;
            total += g.at(i, j) * (u1 - u0) * (v1 - v0);
        }
    }
    return {total, false, false};
}

Mass radial_rectangle_mass(double e, const Rectangle& R, const QuadratureConfig& quad) {
    int m = R.m(), n = R.n();
    bool cen1 = false, cen2 = false;
    if (quad.prefer_closed_form && anchored(R.first(), cen1) && anchored(R.second(), cen2)) {
        double s = cen1 ? R.s / 2 : R.s, t = cen2 ? R.t / 2 : R.t;
        auto ss = sans_serif_local_integral(m, n, s, t, e);
        if (ss.divergent) return {kInf, true, true};
        double copies = std::ldexp(1.0, (cen1 ? m : 0) + (cen2 ? n : 0));
        return {copies * ss.value, false, true};
    }
    int d = m + n;
    if (d > 4) throw std::invalid_argument("radial power quadrature supports m + n <= 4");
    std::vector<double> lo(d), hi(d);
    bool closed_origin = true;
    for (int i = 0; i < d; ++i) {
        double c = i < m ? R.c1[i] : R.c2[i - m];
        double h = (i < m ? R.s : R.t) / 2;
        lo[i] = c - h;
        hi[i] = c + h;
        if (!(lo[i] <= 0 && 0 <= hi[i])) closed_origin = false;
    }
    if (closed_origin && e + d <= 0) return {kInf, true, false};
    BoxQuadrature cfg;
    cfg.min_rel_size = std::ldexp(1.0, -quad.max_depth);
    auto f = [e](std::span<const double> z) { return pow_abs(norm(z), e); };
    auto r = integrate_box(f, lo, hi, SingularPoint{std::vector<double>(d, 0.0), e}, cfg);
    return {r.value, r.divergent, false};
}

Mass density_mass(const WeightSpec& w, const Rectangle& R, const QuadratureConfig& quad) {
    Cube I = R.first(), J = R.second();
    return std::visit(overloaded{
                          [&](const RadialPower& k) { return radial_rectangle_mass(k.exponent, R, quad); },
                          [&](const ProductPower& k) {
                              return times(power_cube_integral(k.e1, I, quad), power_cube_integral(k.e2, J, quad));
                          },
                          [&](const ShiftedPower& k) {
                              Mass a = shifted_power_cube_integral(k.exponent, k.factor == 1 ? I : J, quad);
                              Cube other = k.factor == 1 ? J : I;
                              return times(a, Mass{std::pow(other.s, other.dim()), false, false});
                          },
                          [&](const Constant& k) { return Mass{k.c * R.volume(), false, false}; },
                          [&](const ProductWeight& k) {
                              return times(weight_cube_mass(*k.left, I, quad), weight_cube_mass(*k.right, J, quad));
                          },
                          [&](const Tabulated& k) { return tabulated_mass(k.grid, R); },
                      },
                      w.kind);
}

}  // namespace

Mass power_cube_integral(double e, const Cube& Q, const QuadratureConfig& quad) {
    if (Q.dim() == 1) return power_interval(e, Q.c[0] - Q.s / 2, Q.c[0] + Q.s / 2);
    if (e == 0) return {std::pow(Q.s, Q.dim()), false, false};
    return power_cube_quadrature(e, Q, quad);
}

Mass shifted_power_cube_integral(double e, const Cube& Q, const QuadratureConfig& quad) {
    int d = Q.dim();
    if (d == 1) {
        double a = Q.c[0] - Q.s / 2, b = Q.c[0] + Q.s / 2;
        return {shifted_primitive(e, b) - shifted_primitive(e, a), false, false};
    }
    std::vector<double> lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        lo[i] = Q.c[i] - Q.s / 2;
        hi[i] = Q.c[i] + Q.s / 2;
    }
    BoxQuadrature cfg;
    cfg.min_rel_size = std::ldexp(1.0, -quad.max_depth);
    auto f = [e](std::span<const double> z) { return std::pow(1.0 + norm(z), e); };
    auto r = integrate_box(f, lo, hi, SingularPoint{std::vector<double>(d, 0.0), std::nullopt}, cfg);
    return {r.value, r.divergent, false};
}

Mass cube_mass(const MeasureSpec& mu, const Cube& Q, const QuadratureConfig& quad) {
    return std::visit(overloaded{
                          [&](const Atomic& a) {
                              double s = 0;
                              for (const auto& atom : a.atoms)
                                  if (Q.contains(atom.point)) s += atom.mass;
                              return Mass{s, false, false};
                          },
                          [&](const DiracOrigin&) {
                              std::vector<double> o(Q.dim(), 0.0);
                              return Mass{Q.contains(o) ? 1.0 : 0.0, false, false};
                          },
                          [&](const Density& d) {
                              auto w = d.power == 1 ? d.weight : power_of(*d.weight, d.power);
                              return weight_cube_mass(*w, Q, quad);
                          },
                          [&](const ProductMeasure&) -> Mass {
                              throw std::invalid_argument("product measure used on a single factor");
                          },
                      },
                      mu.kind);
}

Mass rectangle_mass(const MeasureSpec& mu, const Rectangle& R, const QuadratureConfig& quad) {
    if (!(R.s > 0) || !(R.t > 0)) throw std::invalid_argument("rectangle sides must be positive");
    return std::visit(overloaded{
                          [&](const Atomic& a) {
                              double s = 0;
                              int m = R.m(), n = R.n();
                              for (const auto& atom : a.atoms) {
                                  if (static_cast<int>(atom.point.size()) != m + n)
                                      throw std::invalid_argument("atom dimension does not match the rectangle");
                                  std::span<const double> z(atom.point);
                                  if (R.contains(z.subspan(0, m), z.subspan(m, n))) s += atom.mass;
                              }
                              return Mass{s, false, false};
                          },
                          [&](const DiracOrigin&) {
                              std::vector<double> x(R.m(), 0.0), y(R.n(), 0.0);
                              return Mass{R.contains(x, y) ? 1.0 : 0.0, false, false};
                          },
                          [&](const Density& d) {
                              auto w = d.power == 1 ? d.weight : power_of(*d.weight, d.power);
                              return density_mass(*w, R, quad);
                          },
                          [&](const ProductMeasure& p) {
                              return times(cube_mass(*p.mu1, R.first(), quad), cube_mass(*p.mu2, R.second(), quad));
                          },
                      },
                      mu.kind);
}

SansSerif sans_serif_local_integral(int m, int n, double s, double t, double eta) {
    if (m < 1 || n < 1) throw std::invalid_argument("dimensions must be >= 1");
    if (!(s > 0) || !(t > 0)) throw std::invalid_argument("sides must be positive");
    if (m + n + eta <= 0) return {kInf, true, false};
    if (s > t) return sans_serif_local_integral(n, m, t, s, eta);
    double k = n + eta;
    if (k > 0) return {std::pow(s, m) * std::pow(t, k), false, false};
    if (k < 0) return {std::pow(s, m + k), false, false};
    return {std::pow(s, m) / m * (1.0 / m + std::log(t / s)), false, true};
}

A1Membership a1_factor_membership(const WeightSpec& w, int d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    return std::visit(overloaded{
                          [&](const RadialPower& k) {
                              double e = k.exponent;
                              if (!(e > -d && e <= 0)) return A1Membership{Decision::False, std::nullopt};
                              std::optional<double> bound;
                              if (d == 1) bound = 1.0 / (1.0 + e);
                              return A1Membership{Decision::True, bound};
                          },
                          [&](const ShiftedPower& k) {
                              double e = k.exponent;
                              if (!(e > -d && e <= 0)) return A1Membership{Decision::False, std::nullopt};
                              return A1Membership{Decision::True, std::nullopt};
                          },
                          [&](const Constant&) { return A1Membership{Decision::True, 1.0}; },
                          [&](const auto&) { return A1Membership{Decision::Unknown, std::nullopt}; },
                      },
                      w.kind);
}

A1Membership a1_product_membership(const WeightSpec& w, int m, int n) {
    auto combine = [](const A1Membership& a, const A1Membership& b) {
        A1Membership r;
        if (a.member == Decision::False || b.member == Decision::False) r.member = Decision::False;
        else if (a.member == Decision::True && b.member == Decision::True) r.member = Decision::True;
        if (r.member == Decision::True && a.bound && b.bound) r.bound = *a.bound * *b.bound;
        return r;
    };
    return std::visit(overloaded{
                          [&](const RadialPower& k) {
                              if (k.exponent == 0) return A1Membership{Decision::True, 1.0};
                              return A1Membership{Decision::Unknown, std::nullopt};
                          },
                          [&](const ProductPower& k) {
                              return combine(a1_factor_membership(WeightSpec{RadialPower{k.e1}}, m),
                                             a1_factor_membership(WeightSpec{RadialPower{k.e2}}, n));
                          },
                          [&](const ShiftedPower& k) {
                              return a1_factor_membership(WeightSpec{k}, k.factor == 1 ? m : n);
                          },
                          [&](const Constant&) { return A1Membership{Decision::True, 1.0}; },
                          [&](const ProductWeight& k) {
                              return combine(a1_factor_membership(*k.left, m), a1_factor_membership(*k.right, n));
                          },
                          [&](const Tabulated&) { return A1Membership{Decision::Unknown, std::nullopt}; },
                      },
                      w.kind);
}

}  // namespace wnorm
