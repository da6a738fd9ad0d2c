#pragma once

#include "wnorm/verdict.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wnorm {

// Samples of a nonnegative function at the cell midpoints of a box
// [a1,b1] x [a2,b2]; values are row-major, index i*n2 + j with i along axis 1.
struct GridFunction {
    double a1 = 0, b1 = 1, a2 = 0, b2 = 1;
    int n1 = 0, n2 = 0;
    std::vector<double> values;

    static GridFunction zeros(double a1, double b1, double a2, double b2, int n1, int n2);

    double h1() const { return (b1 - a1) / n1; }
    double h2() const { return (b2 - a2) / n2; }
    double mid1(int i) const { return a1 + (i + 0.5) * h1(); }
    double mid2(int j) const { return a2 + (j + 0.5) * h2(); }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * n2 + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * n2 + j]; }
    double integral() const;
    void validate() const;
};

void write_csv(std::ostream& os, const GridFunction& g);
GridFunction read_csv(std::istream& is);

struct WeightSpec;
using WeightPtr = std::shared_ptr<const WeightSpec>;

struct RadialPower { double exponent = 0; };
struct ProductPower { double e1 = 0, e2 = 0; };
struct ShiftedPower { double exponent = 0; int factor = 1; };
struct Constant { double c = 1; };
struct ProductWeight { WeightPtr left, right; };
struct Tabulated { GridFunction grid; };

struct WeightSpec {
    std::variant<RadialPower, ProductPower, ShiftedPower, Constant, ProductWeight, Tabulated> kind;
};

WeightPtr radial_power(double e);
WeightPtr product_power(double e1, double e2);
WeightPtr shifted_power(double e, int factor = 1);
WeightPtr constant_weight(double c = 1);
WeightPtr product_weight(WeightPtr left, WeightPtr right);
WeightPtr tabulated(GridFunction g);

// w^r for the power-type variants; Tabulated raises samples to r.
WeightPtr power_of(const WeightSpec& w, double r);

double evaluate(const WeightSpec& w, std::span<const double> x, std::span<const double> y);
double evaluate(const WeightSpec& w, std::span<const double> point, int m, int n);
// A weight used on a single factor R^d (RadialPower means |x|^e there).
double evaluate_factor(const WeightSpec& w, std::span<const double> x);

struct MeasureSpec;
using MeasurePtr = std::shared_ptr<const MeasureSpec>;

struct Atom {
    std::vector<double> point;
    double mass = 0;
};
struct Atomic { std::vector<Atom> atoms; };
struct Density { WeightPtr weight; double power = 1; };
struct ProductMeasure { MeasurePtr mu1, mu2; };
struct DiracOrigin {};

struct MeasureSpec {
    std::variant<Atomic, Density, ProductMeasure, DiracOrigin> kind;
};

MeasurePtr atomic(std::vector<Atom> atoms);
MeasurePtr density(WeightPtr w, double power = 1);
MeasurePtr product_measure(MeasurePtr mu1, MeasurePtr mu2);
MeasurePtr dirac_origin();
MeasurePtr lebesgue();

struct Cube {
    std::vector<double> c;
    double s = 1;
    int dim() const { return static_cast<int>(c.size()); }
    bool contains(std::span<const double> x) const;  // half-open
    Cube dilate(double k) const { return {c, s * k}; }
};

struct Rectangle {
    std::vector<double> c1, c2;
    double s = 1, t = 1;
    int m() const { return static_cast<int>(c1.size()); }
    int n() const { return static_cast<int>(c2.size()); }
    double volume() const;
    Cube first() const { return {c1, s}; }
    Cube second() const { return {c2, t}; }
    bool contains(std::span<const double> x, std::span<const double> y) const;
    Rectangle dilate(double ks, double kt) const { return {c1, c2, s * ks, t * kt}; }
};

struct QuadratureConfig {
    double rel_tol = 1e-4;
    int max_depth = 22;
    bool prefer_closed_form = true;
};

struct Mass {
    double value = 0;
    bool divergent = false;
    bool comparable_only = false;  // closed form equal to the mass up to a fixed factor
};

Mass rectangle_mass(const MeasureSpec& mu, const Rectangle& R, const QuadratureConfig& quad = {});
// Mass of a cube for a measure living on a single factor R^d.
Mass cube_mass(const MeasureSpec& mu, const Cube& Q, const QuadratureConfig& quad = {});

// Integral of |x|^e over a cube in R^d (exact for d = 1).
Mass power_cube_integral(double e, const Cube& Q, const QuadratureConfig& quad = {});
// Integral of (1+|x|)^e over a cube in R^d (exact for d = 1).
Mass shifted_power_cube_integral(double e, const Cube& Q, const QuadratureConfig& quad = {});

struct SansSerif {
    double value = 0;
    bool divergent = false;
    bool log_case = false;
};

SansSerif sans_serif_local_integral(int m, int n, double s, double t, double eta);

struct A1Membership {
    Decision member = Decision::Unknown;
    std::optional<double> bound;
};

A1Membership a1_factor_membership(const WeightSpec& w, int d);
A1Membership a1_product_membership(const WeightSpec& w, int m, int n);

}  // namespace wnorm
