#pragma once

#include "wnorm/characteristics.hpp"
#include "wnorm/indices.hpp"
#include "wnorm/verdict.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wnorm {

inline constexpr std::uint64_t kDefaultSeed = 0xA1B2;

// sigma = point mass at the origin, omega = unit atoms at (2^k, 2^{-rho k}), k = 1..K.
struct SimpleReport {
    double alpha = 0, beta = 0, p = 0, q = 0, rho = 0;
    int K = 0;
    double rho_star = 0;               // (1 - alpha) / (1 - beta)
    double characteristic = 0;         // lattice sup with K atoms
    double characteristic_half = 0;    // same with K/2 atoms
    bool characteristic_bounded = false;
    std::optional<Rectangle> argmax;
    double weak_quotient = 0;          // f = 1 in L^p(sigma), dyadic product maximal function
    double quotient_floor = 0;         // K^{1/q} / 2
    std::vector<double> maximal_values;
};

SimpleReport example_simple(double rho, double alpha, double beta, double p, double q, int K);

struct SimpleGrowth {
    std::vector<int> Ks;
    std::vector<double> characteristic, quotient;
    double quotient_exponent = 0;   // slope of log quotient against log K
    double characteristic_spread = 0;  // max/min - 1
};

SimpleGrowth simple_growth(double rho, double alpha, double beta, double p, double q, const std::vector<int>& Ks);

// v(y) = |y|^{-m/q}, w(x) = (1+|x|)^{-m}: sigma = |y|^{m p'/q}, omega = (1+|x|)^{-mq}.
struct HalfReport {
    Real p, q, alpha;
    int m = 1, K = 0;
    std::vector<int> log2_radii;
    std::vector<double> local_values;  // centered cubes [-R, R]^m
    double value_at_one = 0;
    double max_local = 0;
    bool plain_bounded = false;        // max_local <= 4 value_at_one
    Real shell_exponent;               // p'(alpha + m/q - m/p)
    double exact_partial_sum = 0;      // sum_{k=0}^K 2^{k * shell_exponent}
    bool partial_sum_exact = false;
    double numeric_partial_sum = 0;    // shell sum of sigma over dilates of [-1,1]^m, normalized
    CharacteristicReport one_tailed;
    Verdict ap_window;                 // -m < m p'/q < m(p'-1)
};

HalfReport example_half(const Real& p, const Real& q, int m, int K);

// V = |u|^{v1} |t|^{v2}, W = |x|^{-w1} |y|^{-w2}
struct SandwichPair {
    Real v1, v2, w1, w2;
    Verdict first, second;  // one-parameter validity of (|u|^{v1}, |x|^{-w1}) and (|t|^{v2}, |y|^{-w2})
};

struct FeasibilityContradiction : std::logic_error {
    using std::logic_error::logic_error;
};

struct SandwichDecomposition {
    int case_id = 1;  // 1: gamma, delta >= 0; 2: gamma < 0 < delta; 3: delta < 0 < gamma
    std::vector<SandwichPair> pairs;
    std::optional<Real> lambda_used;
    Real interval_lo, interval_hi;
    std::optional<Real> rho1, eta1, rho2, eta2;
    double young_constant = 1;
    long samples_checked = 0;
    double max_sample_ratio = 0;  // (w/v) / (C_Y sum W_i/V_i)
    bool pointwise_ok = false;
    std::uint64_t seed = kDefaultSeed;
};

SandwichDecomposition sandwich_decompose(const ProductIndices& idx, const Real& gamma, const Real& delta,
                                         int samples = 10000, std::uint64_t seed = kDefaultSeed);

struct ExponentFit {
    std::string family;
    std::vector<double> parameters, characteristic, norm_lower;
    double slope = 0, intercept = 0, residual = 0, target = 0;
    int dropped = 0;
    std::vector<ExponentFit> factors;  // two-parameter fits
};

ExponentFit sharpness_fit(double p, double q, int m, int parameters, int family_size = 8);

struct OneTailedSample {
    double gamma = 0;
    double plain = 0, one_tailed = 0, ratio = 0;
    double refined_plain = 0, refined_one_tailed = 0, refined_ratio = 0;
    double rd_epsilon = 0, rd_ratio = 0;
};

struct OneTailedReport {
    double exponent = 0;  // 1 + max{p'/q, q/p'}
    double C = 0;         // max coarse ratio
    double max_refined_over_C = 0;
    double rd_constant = 0;  // max (1/epsilon) / A^{p'}
    bool holds = false;
    std::vector<OneTailedSample> samples;
};

OneTailedReport one_tailed_vs_plain_power(double p, double q, int m, int samples);

}  // namespace wnorm
