#pragma once

#include "wnorm/indices.hpp"
#include "wnorm/weights.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wnorm {

enum class CharKind { Plain, OneTailed, TwoTailed };

std::string to_string(CharKind k);
CharKind parse_char_kind(const std::string& s);

inline constexpr double kDivergenceSlope = 0.02;

struct LatticeConfig {
    int k_min = -12;
    int k_max = 12;
    int shifts = 8;  // random placements per scale
    std::uint64_t seed = 0xA1B2;
    bool centered = true;
    bool cornered = true;
};

struct LatticeCube {
    Cube cube;
    int k = 0;
};

// Cubes of side 2^k, k_min <= k <= k_max: origin-centered, origin-cornered and
// `shifts` random centers within four sides of the origin.
std::vector<LatticeCube> cube_lattice(int dim, const LatticeConfig& cfg);

// Uniform double in [0, 1) from a 64-bit generator, identical on every platform.
double portable_uniform(std::uint64_t word);

struct CharacteristicReport {
    CharKind kind = CharKind::Plain;
    double sup_value = 0;
    std::optional<Rectangle> argmax;  // two-parameter runs
    std::optional<Cube> argmax_cube;  // one-parameter runs
    double growth_trend = 0;          // d ln(value) per generation along the maximizing ray
    bool diverging = false;
    bool comparable_only = false;     // masses from comparable closed forms
    std::string tailed_side;          // "omega", "sigma", "both" or empty
    double shell_last_fraction = 0;   // largest share of the last shell layer in a sum
    bool shell_cutoff_warning = false;
    bool shell_nondecaying = false;
    long evaluated = 0;
    std::vector<std::string> notes;
};

// s^{alpha-m} t^{beta-n} omega(R)^{1/q} sigma(R)^{1/p'}
double local_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega, const Rectangle& R,
                            const ProductIndices& idx, const QuadratureConfig& quad = {});
// l(Q)^{alpha-d} omega(Q)^{1/q} sigma(Q)^{1/p'} on R^d
double local_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega, const Cube& Q, double alpha,
                            double p, double q, const QuadratureConfig& quad = {});

// Sum over k1, k2 = 0..K of 2^{k1 e1 + k2 e2} mu(2^{k1} I x 2^{k2} J).
struct ShellSum {
    double sum = 0;
    double last_layer = 0;  // terms with max(k1, k2) = K
    double prev_layer = 0;  // terms with max(k1, k2) = K - 1
    bool divergent = false;
};
ShellSum shell_sum(const MeasureSpec& mu, const Rectangle& R, double e1, double e2, int K,
                   const QuadratureConfig& quad = {});
ShellSum shell_sum(const MeasureSpec& mu, const Cube& Q, double e, int K, const QuadratureConfig& quad = {});

CharacteristicReport characteristic_sup(const MeasureSpec& sigma, const MeasureSpec& omega,
                                        const ProductIndices& idx, const LatticeConfig& first,
                                        const LatticeConfig& second, const QuadratureConfig& quad = {});
CharacteristicReport characteristic_sup(const MeasureSpec& sigma, const MeasureSpec& omega,
                                        const ProductIndices& idx, const LatticeConfig& lattice = {},
                                        const QuadratureConfig& quad = {});

CharacteristicReport tailed_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega,
                                           const ProductIndices& idx, CharKind kind,
                                           const LatticeConfig& first, const LatticeConfig& second, int K = 40,
                                           const QuadratureConfig& quad = {});
CharacteristicReport tailed_characteristic(const MeasureSpec& sigma, const MeasureSpec& omega,
                                           const ProductIndices& idx, CharKind kind,
                                           const LatticeConfig& lattice = {}, int K = 40,
                                           const QuadratureConfig& quad = {});

// One-parameter versions on R^dim; kind Plain ignores K.
CharacteristicReport characteristic_1param(const MeasureSpec& sigma, const MeasureSpec& omega, double alpha,
                                           double p, double q, int dim, CharKind kind,
                                           const LatticeConfig& lattice = {}, int K = 40,
                                           const QuadratureConfig& quad = {});

struct DiracNorm {
    double value = 0;
    bool divergent = false;
};

// (integral of |x|^{(alpha-m)q} |y|^{(beta-n)q} d omega)^{1/q}
DiracNorm dirac_norm(const MeasureSpec& omega, const ProductIndices& idx);

enum class Shrink { Both, First, Second };

struct ReverseDoubling {
    double epsilon = 0;
    double residual = 0;  // rms deviation of the per-halving estimates
    int used_probes = 0;
    int excluded_probes = 0;
};

// Fits ln(mu(2^{-j} R)/mu(R)) = -j D epsilon ln 2 with D the shrunk dimension.
ReverseDoubling reverse_doubling_estimate(const MeasureSpec& mu, const std::vector<Rectangle>& probes,
                                          int halvings, Shrink shrink = Shrink::Both,
                                          const QuadratureConfig& quad = {});
ReverseDoubling reverse_doubling_estimate(const MeasureSpec& mu, const std::vector<Cube>& probes, int halvings,
                                          const QuadratureConfig& quad = {});

// smallest per-probe decay rate accepted as reverse doubling
inline constexpr double kMinReverseDoubling = 0.05;

struct EquivalenceReport {
    bool refused = false;
    std::string diagnostic;
    ReverseDoubling sigma_rd, omega_rd;
    double plain = 0, one_tailed = 0, two_tailed = 0;
    double two_over_one = 0, one_over_plain = 0;
};

EquivalenceReport equivalence_check(const MeasureSpec& sigma, const MeasureSpec& omega, const ProductIndices& idx,
                                    const LatticeConfig& lattice = {}, int K = 40,
                                    const QuadratureConfig& quad = {});

// (int T(x)^r |x|^{e_out} dx)^{1/r} over the line, T(x) = int_a^b |x-u|^{alpha-1} |u|^{e_in} du
double power_testing_norm(double alpha, double e_in, double e_out, double a, double b, double r);

struct TestingReport {
    bool refused = false;
    std::string diagnostic;
    double characteristic = 0;
    double max_quotient = 0;
    std::optional<double> max_dual_quotient;
    std::optional<Rectangle> argmax;
    int skipped = 0;
    std::vector<std::string> notes;
};

// Testing quotients (int I(1_R sigma)^q d omega)^{1/q} / (A sigma(R)^{1/p}) and
// the dual with exponents p', q'; m = n = 1, product measures with atomic or
// power-density factors.
TestingReport testing_condition_check(const MeasureSpec& sigma, const MeasureSpec& omega,
                                      const ProductIndices& idx, const std::vector<Rectangle>& sample,
                                      const LatticeConfig& lattice = {});

}  // namespace wnorm
