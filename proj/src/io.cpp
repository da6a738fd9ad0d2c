#include "wnorm/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wnorm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const Json& field(const Json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument("missing field '" + key + "'");
    return j.at(key);
}

std::vector<double> point_of(const Json& j) {
    if (j.is_number()) return {j.get<double>()};
    if (!j.is_array()) throw std::invalid_argument("atom position must be a number or an array");
    std::vector<double> v;
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        size_t line = 1, col = 1;
        size_t stop = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        auto pos = what.find("syntax error");
        if (pos != std::string::npos) what = what.substr(pos);
        throw std::runtime_error(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
}

Json load_json_file(const std::string& path) { return parse_json_text(read_file(path), path); }

GridFunction load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return read_csv(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ":" + e.what());
    }
}

double json_real(const Json& j, const std::string& key) {
    const Json& v = field(j, key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return Real::parse(v.get<std::string>()).value();
    throw std::invalid_argument("field '" + key + "' must be a number or a rational string");
}

WeightPtr weight_from_json(const Json& j, const std::string& base_dir) {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "radial_power") return radial_power(json_real(j, "exponent"));
    if (kind == "product_power") return product_power(json_real(j, "e1"), json_real(j, "e2"));
    if (kind == "shifted_power")
        return shifted_power(json_real(j, "exponent"), j.contains("factor") ? j.at("factor").get<int>() : 1);
    if (kind == "constant") return constant_weight(j.contains("c") ? json_real(j, "c") : 1.0);
    if (kind == "product")
        return product_weight(weight_from_json(field(j, "left"), base_dir), weight_from_json(field(j, "right"), base_dir));
    if (kind == "tabulated") {
        if (j.contains("file")) {
            std::filesystem::path p(j.at("file").get<std::string>());
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            return tabulated(load_grid_csv(p.string()));
        }
        const Json& g = field(j, "grid");
        GridFunction gf;
        gf.a1 = json_real(g, "a1");
        gf.b1 = json_real(g, "b1");
        gf.a2 = json_real(g, "a2");
        gf.b2 = json_real(g, "b2");
        gf.n1 = field(g, "n1").get<int>();
        gf.n2 = field(g, "n2").get<int>();
        gf.values = field(g, "values").get<std::vector<double>>();
        gf.validate();
        return tabulated(std::move(gf));
    }
    throw std::invalid_argument("unknown weight kind '" + kind + "'");
}

MeasurePtr measure_from_json(const Json& j, const std::string& base_dir) {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "atomic") {
        std::vector<Atom> atoms;
        for (const auto& a : field(j, "atoms")) {
            if (!a.is_array() || a.size() != 2) throw std::invalid_argument("atom must be [position, mass]");
            double mass = a[1].get<double>();
            if (!(mass >= 0)) throw std::invalid_argument("atom masses must be nonnegative");
            atoms.push_back({point_of(a[0]), mass});
        }
        return atomic(std::move(atoms));
    }
    if (kind == "dirac_origin") return dirac_origin();
    if (kind == "lebesgue") return lebesgue();
    if (kind == "density")
        return density(weight_from_json(field(j, "weight"), base_dir), j.contains("power") ? json_real(j, "power") : 1.0);
    if (kind == "product_measure")
        return product_measure(measure_from_json(field(j, "left"), base_dir),
                               measure_from_json(field(j, "right"), base_dir));
    return density(weight_from_json(j, base_dir));
}

Json to_json(const WeightSpec& w) {
    return std::visit(overloaded{
                          [](const RadialPower& k) { return Json{{"kind", "radial_power"}, {"exponent", k.exponent}}; },
                          [](const ProductPower& k) { return Json{{"kind", "product_power"}, {"e1", k.e1}, {"e2", k.e2}}; },
                          [](const ShiftedPower& k) {
                              return Json{{"kind", "shifted_power"}, {"exponent", k.exponent}, {"factor", k.factor}};
                          },
                          [](const Constant& k) { return Json{{"kind", "constant"}, {"c", k.c}}; },
                          [](const ProductWeight& k) {
                              return Json{{"kind", "product"}, {"left", to_json(*k.left)}, {"right", to_json(*k.right)}};
                          },
                          [](const Tabulated& k) {
                              const auto& g = k.grid;
                              return Json{{"kind", "tabulated"},
                                          {"grid",
                                           {{"a1", g.a1}, {"b1", g.b1}, {"a2", g.a2}, {"b2", g.b2}, {"n1", g.n1},
                                            {"n2", g.n2}, {"values", g.values}}}};
                          },
                      },
                      w.kind);
}

Json to_json(const MeasureSpec& mu) {
    return std::visit(overloaded{
                          [](const Atomic& a) {
                              Json atoms = Json::array();
                              for (const auto& at : a.atoms) atoms.push_back(Json::array({at.point, at.mass}));
                              return Json{{"kind", "atomic"}, {"atoms", atoms}};
                          },
                          [](const Density& d) {
                              return Json{{"kind", "density"}, {"weight", to_json(*d.weight)}, {"power", d.power}};
                          },
                          [](const ProductMeasure& pm) {
                              return Json{{"kind", "product_measure"}, {"left", to_json(*pm.mu1)}, {"right", to_json(*pm.mu2)}};
                          },
                          [](const DiracOrigin&) { return Json{{"kind", "dirac_origin"}}; },
                      },
                      mu.kind);
}

Json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Json to_json(const Real& r) {
    if (r.is_exact()) return r.str();
    return num(r.value());
}

Json to_json(const ProductIndices& idx) {
    return {{"m", idx.m}, {"n", idx.n}, {"p", to_json(idx.p)}, {"q", to_json(idx.q)},
            {"alpha", to_json(idx.alpha)}, {"beta", to_json(idx.beta)}};
}

Json to_json(const Condition& c) {
    return {{"name", c.name}, {"lhs", num(c.lhs)}, {"relation", to_string(c.rel)}, {"rhs", num(c.rhs)},
            {"satisfied", c.satisfied}, {"exact", c.exact}, {"near_boundary", c.near_boundary}};
}

Json to_json(const Verdict& v) {
    Json w = Json::array();
    for (const auto& c : v.witnesses) w.push_back(to_json(c));
    return {{"decision", to_string(v.decision)}, {"witnesses", w}, {"strictness_notes", v.strictness_notes},
            {"warnings", v.warnings}};
}

Json to_json(const Cube& c) { return {{"center", c.c}, {"side", num(c.s)}}; }

Json to_json(const Rectangle& r) {
    return {{"center1", r.c1}, {"center2", r.c2}, {"side1", num(r.s)}, {"side2", num(r.t)}};
}

Json to_json(const CharacteristicReport& r) {
    Json j{{"kind", to_string(r.kind)},
           {"sup_value", num(r.sup_value)},
           {"growth_trend", num(r.growth_trend)},
           {"diverging", r.diverging},
           {"comparable_only", r.comparable_only},
           {"shell_last_fraction", num(r.shell_last_fraction)},
           {"shell_cutoff_warning", r.shell_cutoff_warning},
           {"shell_nondecaying", r.shell_nondecaying},
           {"evaluated", r.evaluated},
           {"notes", r.notes}};
    if (!r.tailed_side.empty()) j["tailed_side"] = r.tailed_side;
    if (r.argmax) j["argmax"] = to_json(*r.argmax);
    if (r.argmax_cube) j["argmax"] = to_json(*r.argmax_cube);
    return j;
}

Json to_json(const ShellSum& s) {
    return {{"sum", num(s.sum)}, {"last_layer", num(s.last_layer)}, {"prev_layer", num(s.prev_layer)},
            {"divergent", s.divergent}};
}

Json to_json(const DiracNorm& d) { return {{"value", num(d.value)}, {"divergent", d.divergent}}; }

Json to_json(const ReverseDoubling& r) {
    return {{"epsilon", num(r.epsilon)}, {"residual", num(r.residual)}, {"used_probes", r.used_probes},
            {"excluded_probes", r.excluded_probes}};
}

Json to_json(const EquivalenceReport& r) {
    return {{"refused", r.refused},       {"diagnostic", r.diagnostic},
            {"sigma_reverse_doubling", to_json(r.sigma_rd)}, {"omega_reverse_doubling", to_json(r.omega_rd)},
            {"plain", num(r.plain)},      {"one_tailed", num(r.one_tailed)},
            {"two_tailed", num(r.two_tailed)}, {"two_over_one", num(r.two_over_one)},
            {"one_over_plain", num(r.one_over_plain)}};
}

Json to_json(const TestingReport& r) {
    Json j{{"refused", r.refused},
           {"diagnostic", r.diagnostic},
           {"characteristic", num(r.characteristic)},
           {"max_quotient", num(r.max_quotient)},
           {"skipped", r.skipped},
           {"notes", r.notes}};
    j["max_dual_quotient"] = r.max_dual_quotient ? num(*r.max_dual_quotient) : Json(nullptr);
    if (r.argmax) j["argmax"] = to_json(*r.argmax);
    return j;
}

Json to_json(const MaximalValue& m) {
    return {{"value", num(m.value)}, {"k1", m.k1}, {"k2", m.k2}, {"touches_range_edge", m.touches_range_edge}};
}

Json to_json(const NormBound& b) { return {{"value", num(b.value)}, {"best", b.best}, {"skipped", b.skipped}}; }

Json to_json(const SimpleReport& r) {
    Json mv = Json::array();
    for (double v : r.maximal_values) mv.push_back(num(v));
    Json j{{"alpha", r.alpha},
           {"beta", r.beta},
           {"p", r.p},
           {"q", r.q},
           {"rho", r.rho},
           {"rho_star", r.rho_star},
           {"K", r.K},
           {"characteristic", num(r.characteristic)},
           {"characteristic_half_K", num(r.characteristic_half)},
           {"characteristic_bounded", r.characteristic_bounded},
           {"weak_quotient", num(r.weak_quotient)},
           {"quotient_floor", num(r.quotient_floor)},
           {"maximal_values", mv}};
    if (r.argmax) j["argmax"] = to_json(*r.argmax);
    return j;
}

Json to_json(const SimpleGrowth& g) {
    Json c = Json::array(), q = Json::array();
    for (double v : g.characteristic) c.push_back(num(v));
    for (double v : g.quotient) q.push_back(num(v));
    return {{"K", g.Ks}, {"characteristic", c}, {"quotient", q}, {"quotient_exponent", num(g.quotient_exponent)},
            {"characteristic_spread", num(g.characteristic_spread)}};
}

Json to_json(const HalfReport& r) {
    Json lv = Json::array();
    for (double v : r.local_values) lv.push_back(num(v));
    return {{"p", to_json(r.p)},
            {"q", to_json(r.q)},
            {"alpha", to_json(r.alpha)},
            {"m", r.m},
            {"K", r.K},
            {"log2_radii", r.log2_radii},
            {"local_values", lv},
            {"value_at_one", num(r.value_at_one)},
            {"max_local", num(r.max_local)},
            {"plain_bounded", r.plain_bounded},
            {"shell_exponent", to_json(r.shell_exponent)},
            {"partial_sum", num(r.exact_partial_sum)},
            {"partial_sum_exact", r.partial_sum_exact},
            {"numeric_partial_sum", num(r.numeric_partial_sum)},
            {"one_tailed", to_json(r.one_tailed)},
            {"ap_window", to_json(r.ap_window)}};
}

Json to_json(const SandwichDecomposition& d) {
    Json pairs = Json::array();
    for (const auto& p : d.pairs)
        pairs.push_back({{"V", {{"u_exponent", to_json(p.v1)}, {"t_exponent", to_json(p.v2)}}},
                         {"W", {{"x_exponent", to_json(-p.w1)}, {"y_exponent", to_json(-p.w2)}}},
                         {"first_factor", to_json(p.first)},
                         {"second_factor", to_json(p.second)}});
    Json j{{"case", d.case_id},
           {"pairs", pairs},
           {"young_constant", num(d.young_constant)},
           {"samples_checked", d.samples_checked},
           {"max_sample_ratio", num(d.max_sample_ratio)},
           {"pointwise_ok", d.pointwise_ok},
           {"seed", d.seed}};
    if (d.lambda_used) {
        j["lambda_used"] = to_json(*d.lambda_used);
        j["feasibility_interval"] = {to_json(d.interval_lo), to_json(d.interval_hi)};
    }
    if (d.rho1) j["rho1"] = to_json(*d.rho1);
    if (d.eta1) j["eta1"] = to_json(*d.eta1);
    if (d.rho2) j["rho2"] = to_json(*d.rho2);
    if (d.eta2) j["eta2"] = to_json(*d.eta2);
    return j;
}

Json to_json(const ExponentFit& f) {
    Json a = Json::array(), n = Json::array();
    for (double v : f.characteristic) a.push_back(num(v));
    for (double v : f.norm_lower) n.push_back(num(v));
    Json j{{"family", f.family},
           {"parameters", f.parameters},
           {"characteristic", a},
           {"norm_lower_bound", n},
           {"slope", num(f.slope)},
           {"intercept", num(f.intercept)},
           {"residual", num(f.residual)},
           {"target", num(f.target)},
           {"dropped", f.dropped}};
    if (!f.factors.empty()) {
        Json fs = Json::array();
        for (const auto& x : f.factors) fs.push_back(to_json(x));
        j["factors"] = fs;
    }
    return j;
}

Json to_json(const OneTailedReport& r) {
    Json s = Json::array();
    for (const auto& x : r.samples)
        s.push_back({{"gamma", x.gamma},
                     {"plain", num(x.plain)},
                     {"one_tailed", num(x.one_tailed)},
                     {"ratio", num(x.ratio)},
                     {"refined_plain", num(x.refined_plain)},
                     {"refined_one_tailed", num(x.refined_one_tailed)},
                     {"refined_ratio", num(x.refined_ratio)},
                     {"reverse_doubling_epsilon", num(x.rd_epsilon)},
                     {"reverse_doubling_ratio", num(x.rd_ratio)}});
    return {{"exponent", num(r.exponent)}, {"C", num(r.C)}, {"max_refined_over_C", num(r.max_refined_over_C)},
            {"reverse_doubling_constant", num(r.rd_constant)}, {"holds", r.holds}, {"samples", s}};
}

}  // namespace wnorm
