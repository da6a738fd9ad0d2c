#include "wnorm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wnorm {

namespace {

struct Rule {
    std::vector<double> x, w;  // on [-1, 1]
};

template <int N>
void fill_rule(Rule& r) {
    const auto& a = boost::math::quadrature::gauss<double, N>::abscissa();
    const auto& w = boost::math::quadrature::gauss<double, N>::weights();
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(w[i]);
        } else {
            r.x.push_back(-a[i]);
            r.w.push_back(w[i]);
            r.x.push_back(a[i]);
            r.w.push_back(w[i]);
        }
    }
}

Rule gauss_rule(int order) {
    Rule r;
    switch (order) {
        case 3: fill_rule<3>(r); break;
        case 4: fill_rule<4>(r); break;
        case 5: fill_rule<5>(r); break;
        case 7: fill_rule<7>(r); break;
        default: throw std::invalid_argument("supported Gauss orders: 3, 4, 5, 7");
    }
    return r;
}

class Integrator {
public:
    Integrator(const PointFn& f, const std::optional<SingularPoint>& sing, const BoxQuadrature& cfg,
               int d, double stop)
        : f_(f), sing_(sing), rule_(gauss_rule(cfg.order)), d_(d), stop_(stop), pt_(d) {}

    double cell(const std::vector<double>& lo, const std::vector<double>& hi) {
        double longest = 0, shortest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < d_; ++i) {
            longest = std::max(longest, hi[i] - lo[i]);
            shortest = std::min(shortest, hi[i] - lo[i]);
        }
        if (!sing_) return leaf(lo, hi);
        double dist2 = 0, diam2 = 0;
        bool corner = true;
        for (int i = 0; i < d_; ++i) {
            double c = sing_->at[i];
            double gap = c < lo[i] ? lo[i] - c : (c > hi[i] ? c - hi[i] : 0.0);
            if (c != lo[i] && c != hi[i]) corner = false;
            dist2 += gap * gap;
            diam2 += (hi[i] - lo[i]) * (hi[i] - lo[i]);
        }
        bool eccentric = shortest < 0.5 * longest;
        if (dist2 >= diam2) return eccentric ? split(lo, hi, longest) : leaf(lo, hi);
        if (corner && !eccentric && sing_->degree) return self_similar(lo, hi);
        if (longest <= stop_) return leaf(lo, hi);
        return split(lo, hi, longest);
    }

    bool divergent() const { return divergent_; }
    long evaluations() const { return evals_; }

private:
    // The corner child is the cell scaled by 1/2 about the singular point, so
    // I = S + 2^{-(e+d)} I.
    double self_similar(const std::vector<double>& lo, const std::vector<double>& hi) {
        double k = *sing_->degree + d_;
        if (k <= 0) {
            divergent_ = true;
            return std::numeric_limits<double>::infinity();
        }
        double rest = 0;
        for (int mask = 0; mask < (1 << d_); ++mask) {
            std::vector<double> clo = lo, chi = hi;
            bool is_corner = true;
            for (int a = 0; a < d_; ++a) {
                double mid = 0.5 * (lo[a] + hi[a]);
                if (mask & (1 << a)) clo[a] = mid;
                else chi[a] = mid;
                double c = sing_->at[a];
                if (c != clo[a] && c != chi[a]) is_corner = false;
            }
            if (!is_corner) rest += cell(clo, chi);
        }
        return rest / -std::expm1(-k * std::numbers::ln2);
    }

    double split(const std::vector<double>& lo, const std::vector<double>& hi, double longest) {
        std::vector<int> axes;
        for (int i = 0; i < d_; ++i)
            if (hi[i] - lo[i] >= 0.5 * longest) axes.push_back(i);
        int k = static_cast<int>(axes.size());
        double total = 0;
        for (int mask = 0; mask < (1 << k); ++mask) {
            std::vector<double> clo = lo, chi = hi;
            for (int b = 0; b < k; ++b) {
                int a = axes[b];
                double mid = 0.5 * (lo[a] + hi[a]);
                if (mask & (1 << b)) clo[a] = mid;
                else chi[a] = mid;
            }
            total += cell(clo, chi);
        }
        return total;
    }

    double leaf(const std::vector<double>& lo, const std::vector<double>& hi) {
        const int q = static_cast<int>(rule_.x.size());
        std::vector<int> idx(d_, 0);
        double jac = 1;
        for (int i = 0; i < d_; ++i) jac *= 0.5 * (hi[i] - lo[i]);
        double sum = 0;
        while (true) {
            double w = 1;
            for (int i = 0; i < d_; ++i) {
                pt_[i] = 0.5 * (lo[i] + hi[i]) + 0.5 * (hi[i] - lo[i]) * rule_.x[idx[i]];
                w *= rule_.w[idx[i]];
            }
            double v = f_(pt_);
            ++evals_;
            if (!std::isfinite(v)) {
                divergent_ = true;
                return std::numeric_limits<double>::infinity();
            }
            sum += w * v;
            int i = 0;
            while (i < d_ && ++idx[i] == q) idx[i++] = 0;
            if (i == d_) break;
        }
        return sum * jac;
    }

    const PointFn& f_;
    const std::optional<SingularPoint>& sing_;
    Rule rule_;
    int d_;
    double stop_;
    std::vector<double> pt_;
    bool divergent_ = false;
    long evals_ = 0;
};

}  // namespace

BoxResult integrate_box(const PointFn& f, std::span<const double> lo, std::span<const double> hi,
                        const std::optional<SingularPoint>& singular, const BoxQuadrature& cfg) {
    int d = static_cast<int>(lo.size());
    if (d == 0 || hi.size() != lo.size()) throw std::invalid_argument("box dimension mismatch");
    if (d > 6) throw std::invalid_argument("quadrature supports at most 6 dimensions");
    if (singular && static_cast<int>(singular->at.size()) != d)
        throw std::invalid_argument("singular point dimension mismatch");
    double shortest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
        if (!(hi[i] >= lo[i])) throw std::invalid_argument("box has hi < lo");
        shortest = std::min(shortest, hi[i] - lo[i]);
    }
    if (shortest == 0) return {};
    Integrator in(f, singular, cfg, d, shortest * cfg.min_rel_size);

    // cut at the singular point so every piece has it on its boundary
    std::vector<std::vector<double>> cuts(d);
    for (int i = 0; i < d; ++i) {
        cuts[i] = {lo[i]};
        if (singular && singular->at[i] > lo[i] && singular->at[i] < hi[i]) cuts[i].push_back(singular->at[i]);
        cuts[i].push_back(hi[i]);
    }
    std::vector<size_t> k(d, 0);
    double total = 0;
    while (true) {
        std::vector<double> l(d), h(d);
        for (int i = 0; i < d; ++i) {
            l[i] = cuts[i][k[i]];
            h[i] = cuts[i][k[i] + 1];
        }
        total += in.cell(l, h);
        int i = 0;
        while (i < d && ++k[i] + 1 == cuts[i].size()) k[i++] = 0;
        if (i == d) break;
    }
    BoxResult r{total, in.divergent(), in.evaluations()};
    if (r.divergent) r.value = std::numeric_limits<double>::infinity();
    return r;
}

double power_ball_integral(double e, int d, double r) {
    if (e <= -d) return std::numeric_limits<double>::infinity();
    double sphere = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
    return sphere * std::pow(r, e + d) / (e + d);
}

}  // namespace wnorm
