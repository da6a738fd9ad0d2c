#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wnorm {

using PointFn = std::function<double(std::span<const double>)>;

struct SingularPoint {
    std::vector<double> at;
    // If the integrand is homogeneous of this degree about `at`, cells with `at`
    // as a corner are summed in closed form by self-similarity.
    std::optional<double> degree;
};

struct BoxQuadrature {
    int order = 4;              // Gauss-Legendre nodes per axis on each leaf cell
    double min_rel_size = 1e-7; // refinement stops below this fraction of the box's shortest side
};

struct BoxResult {
    double value = 0;
    bool divergent = false;
    long evaluations = 0;
};

// Integral over the box [lo, hi] with geometric refinement toward the singular
// point (if any). The box is first cut at the singular point; cells are split
// along their long axes only, so eccentric boxes become square before they
// become small.
BoxResult integrate_box(const PointFn& f, std::span<const double> lo, std::span<const double> hi,
                        const std::optional<SingularPoint>& singular = std::nullopt,
                        const BoxQuadrature& cfg = {});

// Integral of |x|^e over the ball of radius r in R^d (+inf if e <= -d).
double power_ball_integral(double e, int d, double r);

}  // namespace wnorm
