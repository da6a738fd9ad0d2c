#pragma once

#include "wnorm/indices.hpp"
#include "wnorm/verdict.hpp"
#include "wnorm/weights.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace wnorm {

enum class Regime { Balanced, HalfBalanced, StrictlySubbalanced, Supercritical, Degenerate };

std::string to_string(Regime r);

// Raised when two independent decision routes disagree away from the boundary.
struct RouteContradiction : std::logic_error {
    using std::logic_error::logic_error;
};

Regime classify(const ProductIndices& idx, double tol = kBoundaryTol);

Verdict one_weight_necessary(const ProductIndices& idx, double tol = kBoundaryTol);

// Finiteness of the rectangle characteristic for |(x,y)|^{-gamma}, |(x,y)|^{delta}.
Verdict power_characteristic_finite(const ProductIndices& idx, const Real& gamma,
                                    const Real& delta, double tol = kBoundaryTol);

// Index conditions (p <= q, weight equality, gamma+delta >= 0, sign-split
// inequalities) together with the standing conditions that make them
// equivalent to finiteness of the characteristic. `literal` drops the
// standing conditions.
Verdict stein_weiss_index_conditions(const ProductIndices& idx, const Real& gamma,
                                     const Real& delta, bool literal = false,
                                     double tol = kBoundaryTol);

// Both routes; throws RouteContradiction if they disagree off the boundary.
Verdict product_stein_weiss_valid(const ProductIndices& idx, const Real& gamma,
                                  const Real& delta, double tol = kBoundaryTol);

Verdict stein_weiss_1param_valid(int m, const Real& p, const Real& q, const Real& alpha,
                                 const Real& gamma, const Real& delta,
                                 double tol = kBoundaryTol);

// Consequences of finiteness for power weights: alpha <= m, beta <= n and the
// min-bounds on alpha/m, beta/n.
Verdict power_corollary_bounds(const ProductIndices& idx, const Real& gamma, const Real& delta,
                               double tol = kBoundaryTol);

Verdict half_balanced_sufficiency(const ProductIndices& idx, const WeightSpec& v,
                                  const WeightSpec& w);

double optimal_exponent(double p, double q, int parameters);
inline double optimal_exponent(const ProductIndices& idx, int parameters) {
    return optimal_exponent(idx.p.value(), idx.q.value(), parameters);
}

}  // namespace wnorm
