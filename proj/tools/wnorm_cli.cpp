#include "wnorm/characteristics.hpp"
#include "wnorm/experiments.hpp"
#include "wnorm/io.hpp"
#include "wnorm/laws.hpp"
#include "wnorm/operators.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

using namespace wnorm;

namespace {

enum Exit { kOk = 0, kError = 1, kFalse = 2 };

struct Globals {
    std::uint64_t seed = kDefaultSeed;
    std::string out;
    std::string format = "json";
};

struct Outcome {
    Json result;
    int code = kOk;
};

std::string dir_of(const std::string& path) {
    auto d = std::filesystem::path(path).parent_path();
    return d.empty() ? "." : d.string();
}

MeasurePtr load_measure(const std::string& path) { return measure_from_json(load_json_file(path), dir_of(path)); }

void flatten(const Json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << "," << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

void emit(const Globals& g, const Json& config, const Json& result) {
    Json report{{"version", kVersion}, {"config", config}, {"result", result}};
    std::ostringstream os;
    if (g.format == "csv") {
        os << "key,value\n";
        flatten(report, "", os);
    } else {
        os << report.dump(2) << "\n";
    }
    if (g.out.empty() || g.out == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(g.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + g.out + "'");
        f << os.str();
    }
}

void write_series(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& rows) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f.precision(17);
    f << header << "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
        f << "\n";
    }
}

int verdict_code(const Verdict& v) { return v.decision == Decision::False ? kFalse : kOk; }

Real real_arg(const std::string& s) { return Real::parse(s); }

struct LatticeArgs {
    int k_min = -12, k_max = 12, shifts = 8;
    LatticeConfig make(std::uint64_t seed) const {
        LatticeConfig c;
        c.k_min = k_min;
        c.k_max = k_max;
        c.shifts = shifts;
        c.seed = seed;
        return c;
    }
    Json json() const { return {{"k_min", k_min}, {"k_max", k_max}, {"shifts", shifts}}; }
};

void add_lattice(CLI::App* app, LatticeArgs& l) {
    app->add_option("--k-min", l.k_min, "smallest generation")->capture_default_str();
    app->add_option("--k-max", l.k_max, "largest generation")->capture_default_str();
    app->add_option("--shifts", l.shifts, "random placements per scale")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted norm toolkit for product fractional integrals"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    Globals g;
    std::string seed_text = "0xA1B2";
    app.add_option("--seed", seed_text, "random seed (decimal or 0x hex)")->capture_default_str();
    app.add_option("--out", g.out, "report path (default stdout)");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    std::function<Outcome(Json&)> action;

    // classify
    std::string indices;
    auto* classify_cmd = app.add_subcommand("classify", "regime of an index tuple");
    classify_cmd->add_option("--indices", indices, "m=..,n=..,p=..,q=..,alpha=..,beta=..")->required();
    classify_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg["indices"] = indices;
            auto idx = parse_indices(indices);
            Regime r = classify(idx);
            return Outcome{{{"regime", to_string(r)}, {"indices", to_json(idx)}}, kOk};
        };
    });

    // power-check
    std::string gamma_s, delta_s;
    auto* power_cmd = app.add_subcommand("power-check", "finiteness and boundedness for power weights");
    power_cmd->add_option("--indices", indices, "index tuple; may carry gamma=.. and delta=..")->required();
    power_cmd->add_option("--gamma", gamma_s, "weight exponent of the target side");
    power_cmd->add_option("--delta", delta_s, "weight exponent of the source side");
    power_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg["indices"] = indices;
            auto kv = parse_key_values(indices);
            auto idx = indices_from(kv);
            Real gamma = gamma_s.empty() ? (kv.count("gamma") ? kv.at("gamma") : Real(0)) : real_arg(gamma_s);
            Real delta = delta_s.empty() ? (kv.count("delta") ? kv.at("delta") : Real(0)) : real_arg(delta_s);
            cfg["gamma"] = to_json(gamma);
            cfg["delta"] = to_json(delta);
            auto fin = power_characteristic_finite(idx, gamma, delta);
            Json res{{"finite", fin.holds()}, {"characteristic", to_json(fin)}};
            if (compare(idx.p, idx.q) <= 0) {
                auto sw = product_stein_weiss_valid(idx, gamma, delta);
                res["bounded"] = sw.holds();
                res["stein_weiss"] = to_json(sw);
            } else {
                res["bounded"] = nullptr;
                res["note"] = "p > q: no norm claim";
            }
            res["corollary_bounds"] = to_json(power_corollary_bounds(idx, gamma, delta));
            return Outcome{res, fin.holds() ? kOk : kFalse};
        };
    });

    // sw1
    int sw_m = 1;
    std::string sw_p, sw_q, sw_alpha;
    auto* sw1_cmd = app.add_subcommand("sw1", "one-parameter power weight inequality");
    sw1_cmd->add_option("--m", sw_m, "dimension")->capture_default_str();
    sw1_cmd->add_option("--p", sw_p)->required();
    sw1_cmd->add_option("--q", sw_q)->required();
    sw1_cmd->add_option("--alpha", sw_alpha)->required();
    sw1_cmd->add_option("--gamma", gamma_s)->required();
    sw1_cmd->add_option("--delta", delta_s)->required();
    sw1_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"m", sw_m}, {"p", sw_p}, {"q", sw_q}, {"alpha", sw_alpha}, {"gamma", gamma_s}, {"delta", delta_s}});
            auto v = stein_weiss_1param_valid(sw_m, real_arg(sw_p), real_arg(sw_q), real_arg(sw_alpha), real_arg(gamma_s),
                                              real_arg(delta_s));
            return Outcome{to_json(v), verdict_code(v)};
        };
    });

    // characteristic
    std::string sigma_path, omega_path, kind_s = "plain", csv_path;
    int params = 2, K = 40;
    LatticeArgs lat;
    auto* char_cmd = app.add_subcommand("characteristic", "lattice supremum of a rectangle characteristic");
    char_cmd->add_option("--sigma", sigma_path, "sigma measure JSON")->required()->check(CLI::ExistingFile);
    char_cmd->add_option("--omega", omega_path, "omega measure JSON")->required()->check(CLI::ExistingFile);
    char_cmd->add_option("--indices", indices)->required();
    char_cmd->add_option("--kind", kind_s)->check(CLI::IsMember({"plain", "one-tailed", "two-tailed"}))->capture_default_str();
    char_cmd->add_option("--params", params, "1 or 2 parameters")->check(CLI::IsMember({1, 2}))->capture_default_str();
    char_cmd->add_option("--K", K, "shell cutoff")->capture_default_str();
    char_cmd->add_option("--csv", csv_path, "per-cube local values of the plain characteristic");
    add_lattice(char_cmd, lat);
    char_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"sigma", sigma_path}, {"omega", omega_path}, {"indices", indices}, {"kind", kind_s},
                        {"params", params}, {"K", K}, {"lattice", lat.json()}});
            auto idx = parse_indices(indices);
            auto sigma = load_measure(sigma_path), omega = load_measure(omega_path);
            auto L = lat.make(g.seed);
            CharKind kind = parse_char_kind(kind_s);
            CharacteristicReport rep;
            if (params == 1) {
                rep = characteristic_1param(*sigma, *omega, idx.alpha.value(), idx.p.value(), idx.q.value(), idx.m, kind, L,
                                            K);
            } else if (kind == CharKind::Plain) {
                rep = characteristic_sup(*sigma, *omega, idx, L);
            } else {
                rep = tailed_characteristic(*sigma, *omega, idx, kind, L, K);
            }
            if (!csv_path.empty()) {
                std::vector<std::vector<double>> rows;
                if (params == 1) {
                    for (const auto& lc : cube_lattice(idx.m, L)) {
                        std::vector<double> r{double(lc.k), lc.cube.s};
                        r.insert(r.end(), lc.cube.c.begin(), lc.cube.c.end());
                        r.push_back(local_characteristic(*sigma, *omega, lc.cube, idx.alpha.value(), idx.p.value(),
                                                         idx.q.value()));
                        rows.push_back(r);
                    }
                    write_series(csv_path, "k,side,center...,value", rows);
                } else {
                    auto L2 = L;
                    L2.seed ^= 0x9E3779B97F4A7C15ULL;
                    auto c1 = cube_lattice(idx.m, L), c2 = cube_lattice(idx.n, L2);
                    for (const auto& a : c1)
                        for (const auto& b : c2) {
                            Rectangle R{a.cube.c, b.cube.c, a.cube.s, b.cube.s};
                            rows.push_back({double(a.k), double(b.k), a.cube.s, b.cube.s,
                                            local_characteristic(*sigma, *omega, R, idx)});
                        }
                    write_series(csv_path, "k1,k2,side1,side2,value", rows);
                }
            }
            return Outcome{to_json(rep), kOk};
        };
    });

    // apply-op
    std::string grid_in, grid_out, order_s = "first";
    std::string op_alpha, op_beta;
    auto* op_cmd = app.add_subcommand("apply-op", "product fractional integral of a grid function");
    op_cmd->add_option("--input", grid_in, "grid CSV")->required()->check(CLI::ExistingFile);
    op_cmd->add_option("--output", grid_out, "transformed grid CSV")->required();
    op_cmd->add_option("--alpha", op_alpha)->required();
    op_cmd->add_option("--beta", op_beta)->required();
    op_cmd->add_option("--order", order_s, "axis processed first")->check(CLI::IsMember({"first", "second"}))->capture_default_str();
    op_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"input", grid_in}, {"output", grid_out}, {"alpha", op_alpha}, {"beta", op_beta}, {"order", order_s}});
            auto f = load_grid_csv(grid_in);
            auto out = product_fractional_integral(f, real_arg(op_alpha).value(), real_arg(op_beta).value(),
                                                   order_s == "first" ? AxisOrder::FirstAxisFirst : AxisOrder::SecondAxisFirst);
            std::ofstream os(grid_out);
            if (!os) throw std::runtime_error("cannot write '" + grid_out + "'");
            write_csv(os, out);
            double mx = 0;
            for (double v : out.values) mx = std::max(mx, v);
            return Outcome{{{"n1", out.n1}, {"n2", out.n2}, {"integral", num(out.integral())}, {"max", num(mx)}}, kOk};
        };
    });

    // maximal
    std::string mu_path, points_path, q_s = "2";
    std::string mx_alpha, mx_beta = "1";
    int mx_params = 1;
    double f_norm = 1;
    int k1_min = -20, k1_max = 20, k2_min = -20, k2_max = 20;
    auto* max_cmd = app.add_subcommand("maximal", "dyadic fractional maximal function of an atomic measure");
    max_cmd->add_option("--mu", mu_path, "atomic measure JSON")->required()->check(CLI::ExistingFile);
    max_cmd->add_option("--points", points_path, "atomic omega JSON: evaluation points and their masses (default: mu)")
        ->check(CLI::ExistingFile);
    max_cmd->add_option("--alpha", mx_alpha)->required();
    max_cmd->add_option("--beta", mx_beta, "second order (two parameters)")->capture_default_str();
    max_cmd->add_option("--params", mx_params)->check(CLI::IsMember({1, 2}))->capture_default_str();
    max_cmd->add_option("--q", q_s)->capture_default_str();
    max_cmd->add_option("--f-norm", f_norm, "L^p(sigma) norm of the input")->capture_default_str();
    max_cmd->add_option("--k-min", k1_min)->capture_default_str();
    max_cmd->add_option("--k-max", k1_max)->capture_default_str();
    max_cmd->add_option("--k2-min", k2_min)->capture_default_str();
    max_cmd->add_option("--k2-max", k2_max)->capture_default_str();
    max_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"mu", mu_path}, {"points", points_path}, {"alpha", mx_alpha}, {"beta", mx_beta},
                        {"params", mx_params}, {"q", q_s}, {"f_norm", f_norm},
                        {"generations", {k1_min, k1_max, k2_min, k2_max}}});
            auto mu = load_measure(mu_path);
            auto pts = points_path.empty() ? mu : load_measure(points_path);
            const auto* a = std::get_if<Atomic>(&mu->kind);
            const auto* w = std::get_if<Atomic>(&pts->kind);
            if (!a || !w) throw std::invalid_argument("maximal needs atomic measures");
            std::vector<std::vector<double>> points;
            std::vector<double> masses;
            for (const auto& at : w->atoms) {
                points.push_back(at.point);
                masses.push_back(at.mass);
            }
            DyadicConfig c1{k1_min, k1_max}, c2{k2_min, k2_max};
            std::vector<MaximalValue> mv;
            double alpha = real_arg(mx_alpha).value();
            if (mx_params == 1) {
                std::vector<double> xs;
                for (const auto& p : points) {
                    if (p.size() != 1) throw std::invalid_argument("one-parameter maximal function is on the line");
                    xs.push_back(p[0]);
                }
                mv = dyadic_fractional_maximal_1d(*a, alpha, c1, xs);
            } else {
                mv = product_dyadic_maximal(*a, alpha, real_arg(mx_beta).value(), 1, 1, c1, c2, points);
            }
            std::vector<double> vals;
            Json per = Json::array();
            for (size_t i = 0; i < mv.size(); ++i) {
                vals.push_back(mv[i].value);
                Json e = to_json(mv[i]);
                e["point"] = points[i];
                per.push_back(e);
            }
            double quotient = weak_type_quotient(vals, masses, real_arg(q_s).value(), f_norm);
            return Outcome{{{"values", per}, {"weak_quotient", num(quotient)}}, kOk};
        };
    });

    // counterexample
    auto* cx_cmd = app.add_subcommand("counterexample", "reproduce a counterexample");
    cx_cmd->require_subcommand(1);
    double rho = 1, cx_alpha = 0.5, cx_beta = 0.5, cx_p = 2, cx_q = 2;
    std::vector<int> Ks;
    int cx_K = 64;
    std::string series_path;
    auto* simple_cmd = cx_cmd->add_subcommand("simple", "lacunary atoms against a Dirac mass");
    simple_cmd->add_option("--rho", rho, "density ratio")->capture_default_str();
    simple_cmd->add_option("--K", cx_K, "number of atoms")->capture_default_str();
    simple_cmd->add_option("--Ks", Ks, "several K values for a growth fit");
    simple_cmd->add_option("--alpha", cx_alpha)->capture_default_str();
    simple_cmd->add_option("--beta", cx_beta)->capture_default_str();
    simple_cmd->add_option("--p", cx_p)->capture_default_str();
    simple_cmd->add_option("--q", cx_q)->capture_default_str();
    simple_cmd->add_option("--csv", series_path, "series output");
    simple_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"example", "simple"}, {"rho", rho}, {"alpha", cx_alpha}, {"beta", cx_beta}, {"p", cx_p}, {"q", cx_q}});
            if (!Ks.empty()) {
                cfg["Ks"] = Ks;
                auto gr = simple_growth(rho, cx_alpha, cx_beta, cx_p, cx_q, Ks);
                std::vector<std::vector<double>> rows;
                for (size_t i = 0; i < gr.Ks.size(); ++i) rows.push_back({double(gr.Ks[i]), gr.characteristic[i], gr.quotient[i]});
                write_series(series_path, "K,characteristic,weak_quotient", rows);
                return Outcome{to_json(gr), kOk};
            }
            cfg["K"] = cx_K;
            auto rep = example_simple(rho, cx_alpha, cx_beta, cx_p, cx_q, cx_K);
            std::vector<std::vector<double>> rows;
            for (size_t i = 0; i < rep.maximal_values.size(); ++i) rows.push_back({double(i + 1), rep.maximal_values[i]});
            write_series(series_path, "atom,maximal_value", rows);
            return Outcome{to_json(rep), kOk};
        };
    });
    std::string half_p = "2", half_q = "4";
    int half_m = 1;
    auto* half_cmd = cx_cmd->add_subcommand("half", "one-tailed characteristic diverging while the plain one stays bounded");
    half_cmd->add_option("--p", half_p)->capture_default_str();
    half_cmd->add_option("--q", half_q)->capture_default_str();
    half_cmd->add_option("--m", half_m)->capture_default_str();
    half_cmd->add_option("--K", cx_K, "shell cutoff")->capture_default_str();
    half_cmd->add_option("--csv", series_path, "series output");
    half_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"example", "half"}, {"p", half_p}, {"q", half_q}, {"m", half_m}, {"K", cx_K}});
            auto rep = example_half(real_arg(half_p), real_arg(half_q), half_m, cx_K);
            std::vector<std::vector<double>> rows;
            for (size_t i = 0; i < rep.local_values.size(); ++i)
                rows.push_back({double(rep.log2_radii[i]), rep.local_values[i]});
            write_series(series_path, "log2_radius,local_value", rows);
            return Outcome{to_json(rep), kOk};
        };
    });

    // sandwich
    int samples = 10000;
    auto* sand_cmd = app.add_subcommand("sandwich", "power-weight sandwich decomposition");
    sand_cmd->add_option("--indices", indices, "index tuple with gamma=.. and delta=..")->required();
    sand_cmd->add_option("--gamma", gamma_s);
    sand_cmd->add_option("--delta", delta_s);
    sand_cmd->add_option("--samples", samples, "pointwise check samples")->capture_default_str();
    sand_cmd->add_option("--csv", series_path, "factor exponents");
    sand_cmd->callback([&] {
        action = [&](Json& cfg) {
            auto kv = parse_key_values(indices);
            auto idx = indices_from(kv);
            Real gamma = gamma_s.empty() ? (kv.count("gamma") ? kv.at("gamma") : Real(0)) : real_arg(gamma_s);
            Real delta = delta_s.empty() ? (kv.count("delta") ? kv.at("delta") : Real(0)) : real_arg(delta_s);
            cfg.update({{"indices", indices}, {"gamma", to_json(gamma)}, {"delta", to_json(delta)}, {"samples", samples}});
            if (compare(idx.p, idx.q) > 0) {
                Verdict v;
                v.add(check("p <= q", idx.p, Relation::LessEq, idx.q));
                v.settle();
                return Outcome{{{"valid", false}, {"validity", to_json(v)}}, kFalse};
            }
            auto valid = product_stein_weiss_valid(idx, gamma, delta);
            if (!valid.holds()) return Outcome{{{"valid", false}, {"validity", to_json(valid)}}, kFalse};
            auto d = sandwich_decompose(idx, gamma, delta, samples, g.seed);
            std::vector<std::vector<double>> rows;
            for (const auto& p : d.pairs) rows.push_back({p.v1.value(), p.v2.value(), -p.w1.value(), -p.w2.value()});
            write_series(series_path, "u_exponent,t_exponent,x_exponent,y_exponent", rows);
            Json res = to_json(d);
            res["valid"] = true;
            return Outcome{res, d.pointwise_ok ? kOk : kFalse};
        };
    });

    // sharpness
    std::string sh_p = "2", sh_q = "4";
    int sh_m = 1, sh_params = 1, family = 8, ot_samples = 0;
    auto* sharp_cmd = app.add_subcommand("sharpness", "exponent fits for power-weight families");
    sharp_cmd->add_option("--p", sh_p)->capture_default_str();
    sharp_cmd->add_option("--q", sh_q)->capture_default_str();
    sharp_cmd->add_option("--m", sh_m)->capture_default_str();
    sharp_cmd->add_option("--params", sh_params)->check(CLI::IsMember({1, 2}))->capture_default_str();
    sharp_cmd->add_option("--family-size", family)->capture_default_str();
    sharp_cmd->add_option("--one-tailed-samples", ot_samples, "also compare one-tailed and plain characteristics");
    sharp_cmd->add_option("--csv", series_path, "fit series");
    sharp_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"p", sh_p}, {"q", sh_q}, {"m", sh_m}, {"params", sh_params}, {"family_size", family},
                        {"one_tailed_samples", ot_samples}});
            double p = real_arg(sh_p).value(), q = real_arg(sh_q).value();
            auto fit = sharpness_fit(p, q, sh_m, sh_params, family);
            std::vector<std::vector<double>> rows;
            const auto& base = fit.factors.empty() ? fit : fit.factors.front();
            for (size_t i = 0; i < base.parameters.size(); ++i)
                rows.push_back({base.parameters[i], base.characteristic[i], base.norm_lower[i]});
            write_series(series_path, "parameter,characteristic,norm_lower_bound", rows);
            Json res{{"fit", to_json(fit)}};
            int code = kOk;
            if (ot_samples > 0) {
                auto ot = one_tailed_vs_plain_power(p, q, sh_m, ot_samples);
                res["one_tailed"] = to_json(ot);
                if (!ot.holds) code = kFalse;
            }
            return Outcome{res, code};
        };
    });

    // testing-check
    int t_kmin = -3, t_kmax = 3;
    auto* test_cmd = app.add_subcommand("testing-check", "testing conditions for product power measures");
    test_cmd->add_option("--sigma", sigma_path)->required()->check(CLI::ExistingFile);
    test_cmd->add_option("--omega", omega_path)->required()->check(CLI::ExistingFile);
    test_cmd->add_option("--indices", indices)->required();
    test_cmd->add_option("--sample-k-min", t_kmin, "smallest sampled generation")->capture_default_str();
    test_cmd->add_option("--sample-k-max", t_kmax, "largest sampled generation")->capture_default_str();
    add_lattice(test_cmd, lat);
    test_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"sigma", sigma_path}, {"omega", omega_path}, {"indices", indices}, {"lattice", lat.json()},
                        {"sample_generations", {t_kmin, t_kmax}}});
            auto idx = parse_indices(indices);
            auto sigma = load_measure(sigma_path), omega = load_measure(omega_path);
            std::vector<Rectangle> sample;
            for (int k1 = t_kmin; k1 <= t_kmax; ++k1)
                for (int k2 = t_kmin; k2 <= t_kmax; ++k2) {
                    double s = std::ldexp(1.0, k1), t = std::ldexp(1.0, k2);
                    sample.push_back({{0.0}, {0.0}, s, t});
                    sample.push_back({{s / 2}, {t / 2}, s, t});
                    sample.push_back({{1.5 * s}, {-0.5 * t}, s, t});
                }
            auto rep = testing_condition_check(*sigma, *omega, idx, sample, lat.make(g.seed));
            return Outcome{to_json(rep), rep.refused ? kFalse : kOk};
        };
    });

    // reverse-doubling
    int rd_m = 1, rd_n = 0, halvings = 4;
    std::vector<int> probe_k{-2, 0, 2};
    std::string shrink_s = "both";
    auto* rd_cmd = app.add_subcommand("reverse-doubling", "fit a reverse doubling exponent");
    rd_cmd->add_option("--mu", mu_path)->required()->check(CLI::ExistingFile);
    rd_cmd->add_option("--m", rd_m, "first dimension")->capture_default_str();
    rd_cmd->add_option("--n", rd_n, "second dimension (0 for cubes)")->capture_default_str();
    rd_cmd->add_option("--halvings", halvings)->capture_default_str();
    rd_cmd->add_option("--probe-k", probe_k, "generations of the centered probes")->capture_default_str();
    rd_cmd->add_option("--shrink", shrink_s)->check(CLI::IsMember({"both", "first", "second"}))->capture_default_str();
    rd_cmd->callback([&] {
        action = [&](Json& cfg) {
            cfg.update({{"mu", mu_path}, {"m", rd_m}, {"n", rd_n}, {"halvings", halvings}, {"probe_k", probe_k},
                        {"shrink", shrink_s}});
            auto mu = load_measure(mu_path);
            ReverseDoubling r;
            if (rd_n == 0) {
                std::vector<Cube> probes;
                for (int k : probe_k) probes.push_back({std::vector<double>(rd_m, 0.0), std::ldexp(1.0, k)});
                r = reverse_doubling_estimate(*mu, probes, halvings);
            } else {
                std::vector<Rectangle> probes;
                for (int k : probe_k)
                    probes.push_back({std::vector<double>(rd_m, 0.0), std::vector<double>(rd_n, 0.0), std::ldexp(1.0, k),
                                      std::ldexp(1.0, k)});
                Shrink sh = shrink_s == "first" ? Shrink::First : shrink_s == "second" ? Shrink::Second : Shrink::Both;
                r = reverse_doubling_estimate(*mu, probes, halvings, sh);
            }
            return Outcome{to_json(r), kOk};
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kError;
    }

    try {
        g.seed = std::stoull(seed_text, nullptr, 0);
        Json cfg{{"command", app.get_subcommands().front()->get_name()}, {"seed", g.seed}, {"format", g.format}};
        Outcome o = action(cfg);
        emit(g, cfg, o.result);
        return o.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
}
