#pragma once

#include "wnorm/indices.hpp"
#include "wnorm/weights.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wnorm {

struct TailFunction {
    Rectangle rect;
    double alpha = 0, beta = 0;
    int m = 1, n = 1;
};

// (1 + |x - c_I|/s)^{alpha-m} (1 + |y - c_J|/t)^{beta-n}
double tail_value(const TailFunction& tf, std::span<const double> x, std::span<const double> y);
// one factor: (1 + |x - c|/s)^{order - d}
double tail_factor(const Cube& Q, double order, std::span<const double> x);

// Piecewise-constant samples on [a, b], one value per cell.
struct Grid1D {
    double a = 0, b = 1;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double h() const { return (b - a) / size(); }
    double mid(int i) const { return a + (i + 0.5) * h(); }
};

// int_a^b |x - u|^{alpha-1} du
double kernel_cell_integral(double alpha, double x, double a, double b);
// int_a^b int_c^d |x - u|^{alpha-1} du dx
double kernel_cell_pair_integral(double alpha, double a, double b, double c, double d);

// I_alpha f at the given points, f piecewise constant on its cells.
std::vector<double> fractional_integral_1d(const Grid1D& f, double alpha, std::span<const double> points);
// Same, sampled at the cell midpoints of f's own grid.
Grid1D fractional_integral_1d(const Grid1D& f, double alpha);

enum class AxisOrder { FirstAxisFirst, SecondAxisFirst };

// I_{alpha,beta} on R x R as two one-dimensional passes.
GridFunction product_fractional_integral(const GridFunction& f, double alpha, double beta,
                                         AxisOrder order = AxisOrder::FirstAxisFirst);

// sum_k mass_k |x - u_k|^{alpha-m} |y - t_k|^{beta-n}
std::vector<double> product_fractional_integral_atomic(const Atomic& mu, double alpha, double beta, int m,
                                                       int n, const std::vector<std::vector<double>>& points);

struct DyadicConfig {
    int k_min = -20;
    int k_max = 20;
    double origin = 0;

    void validate() const;
};

struct MaximalValue {
    double value = 0;
    int k1 = 0, k2 = 0;              // generations of the maximizing cube(s)
    bool touches_range_edge = false;
};

// sup over dyadic Q containing x of l(Q)^{alpha-1} mu(Q), generations in cfg.
std::vector<MaximalValue> dyadic_fractional_maximal_1d(const Atomic& mu, double alpha, const DyadicConfig& cfg,
                                                       std::span<const double> points);

// sup over dyadic I x J containing (x, y) of l(I)^{alpha-m} l(J)^{beta-n} mu(I x J).
std::vector<MaximalValue> product_dyadic_maximal(const Atomic& mu, double alpha, double beta, int m, int n,
                                                 const DyadicConfig& cfg1, const DyadicConfig& cfg2,
                                                 const std::vector<std::vector<double>>& points);

// max_i v_i * omega({M >= v_i})^{1/q} / f_norm, omega given by its masses at the points.
double weak_type_quotient(std::span<const double> values, std::span<const double> omega_masses, double q,
                          double f_norm);

// sup over dyadic Q of l(Q)^{alpha-1} omega(Q)^{1/q} sigma(Q)^{1/p'} on the real line.
double dyadic_characteristic_1d(const Atomic& sigma, const Atomic& omega, double alpha, double p, double q,
                                const DyadicConfig& cfg);

struct AtomicTestPair {
    std::vector<double> f;                 // values at the atoms of sigma
    std::optional<std::vector<double>> h;  // values at the atoms of omega; nullopt = optimal dual
};

struct GridTestPair {
    GridFunction f;                 // on the density grid of sigma
    std::optional<GridFunction> h;  // on the density grid of omega; nullopt = optimal dual
};

struct NormBound {
    double value = 0;
    int best = -1;     // index of the maximizing pair
    int skipped = 0;   // pairs with a vanishing norm
};

// max over the family of <I(f sigma), h omega> / (|f|_{L^p(sigma)} |h|_{L^{q'}(omega)}).
NormBound norm_lower_bound(const Atomic& sigma, const Atomic& omega, const ProductIndices& idx,
                           const std::vector<AtomicTestPair>& family);
// m = n = 1 with piecewise-constant densities on a common grid; kernel
// interactions between cells are integrated exactly.
NormBound norm_lower_bound(const GridFunction& sigma, const GridFunction& omega, const ProductIndices& idx,
                           const std::vector<GridTestPair>& family);

}  // namespace wnorm
