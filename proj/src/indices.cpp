#include "wnorm/indices.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wnorm {

namespace {

std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

// Decimal literal such as "-0.125" or "3" as an exact rational; nullopt if the
// text is not a plain decimal.
std::optional<Rational> decimal_rational(const std::string& s) {
    if (s.empty()) return std::nullopt;
    size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    boost::multiprecision::cpp_int num = 0, den = 1;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.' && !dot) {
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = true;
            num = num * 10 + (c - '0');
            if (dot) den *= 10;
        } else {
            return std::nullopt;
        }
    }
    if (!digits) return std::nullopt;
    Rational r(num, den);
    return neg ? Rational(-r) : r;
}

}  // namespace

Real::Real(const Rational& r) : v_(static_cast<double>(r)), r_(r) {}

Real Real::parse(std::string_view text) {
    std::string s = trim(text);
    if (s.empty()) throw std::invalid_argument("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        auto a = decimal_rational(trim(s.substr(0, slash)));
        auto b = decimal_rational(trim(s.substr(slash + 1)));
        if (!a || !b) throw std::invalid_argument("bad rational literal '" + s + "'");
        if (*b == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return Real(Rational(*a / *b));
    }
    if (auto r = decimal_rational(s)) return Real(*r);
    size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
    return Real(v);
}

std::string Real::str() const {
    if (r_) {
        std::ostringstream os;
        os << *r_;
        return os.str();
    }
    std::ostringstream os;
    os.precision(17);
    os << v_;
    return os.str();
}

Real operator+(const Real& a, const Real& b) {
    if (a.r_ && b.r_) return Real(Rational(*a.r_ + *b.r_));
    return Real(a.v_ + b.v_);
}
Real operator-(const Real& a, const Real& b) {
    if (a.r_ && b.r_) return Real(Rational(*a.r_ - *b.r_));
    return Real(a.v_ - b.v_);
}
Real operator*(const Real& a, const Real& b) {
    if (a.r_ && b.r_) return Real(Rational(*a.r_ * *b.r_));
    return Real(a.v_ * b.v_);
}
Real operator/(const Real& a, const Real& b) {
    if (a.r_ && b.r_) {
        if (*b.r_ == 0) throw std::domain_error("division by zero");
        return Real(Rational(*a.r_ / *b.r_));
    }
    return Real(a.v_ / b.v_);
}
Real Real::operator-() const {
    if (r_) return Real(Rational(-*r_));
    return Real(-v_);
}

int compare(const Real& a, const Real& b, double tol) {
    if (a.is_exact() && b.is_exact()) {
        if (*a.exact() < *b.exact()) return -1;
        if (*a.exact() > *b.exact()) return 1;
        return 0;
    }
    double d = a.value() - b.value();
    if (std::abs(d) <= tol) return 0;
    return d < 0 ? -1 : 1;
}

bool is_zero(const Real& a, double tol) { return compare(a, Real(0), tol) == 0; }

bool near_tie(const Real& a, const Real& b, double tol) {
    if (a.is_exact() && b.is_exact()) return false;
    return std::abs(a.value() - b.value()) <= 100 * tol;
}

Real min(const Real& a, const Real& b) { return compare(a, b, 0.0) <= 0 ? a : b; }
Real max(const Real& a, const Real& b) { return compare(a, b, 0.0) >= 0 ? a : b; }

double conjugate(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::domain_error("conjugate exponent needs 1 < p < inf");
    return p / (p - 1.0);
}

Real conjugate(const Real& p) {
    if (!(p.value() > 1.0) || !std::isfinite(p.value()))
        throw std::domain_error("conjugate exponent needs 1 < p < inf");
    if (p.is_exact() && *p.exact() <= 1) throw std::domain_error("conjugate exponent needs 1 < p < inf");
    if (p.is_exact()) return p / (p - Real(1));
    return Real(conjugate(p.value()));
}

double gamma_gap(double p, double q) {
    if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q))
        throw std::domain_error("gap needs 1 < p, q < inf");
    return 1.0 / p - 1.0 / q;
}

Real gamma_gap(const Real& p, const Real& q) {
    gamma_gap(p.value(), q.value());
    return Real(1) / p - Real(1) / q;
}

SignedPart positive_part(const Real& t, double tol) {
    int c = compare(t, Real(0), tol);
    if (c > 0) return {t, false};
    return {Real(0), c == 0};
}

SignedPart negative_part(const Real& t, double tol) {
    int c = compare(t, Real(0), tol);
    if (c < 0) return {-t, false};
    return {Real(0), c == 0};
}

DeltaBracket delta_bracket(const Real& gamma, const Real& delta, int dim, const Real& p,
                           const Real& q, double tol) {
    Real d(dim);
    auto a = positive_part(gamma - d / q, tol);
    auto b = positive_part(delta - d / conjugate(p), tol);
    return {a.value + b.value, a.at_boundary || b.at_boundary};
}

void ProductIndices::validate() const {
    if (m < 1 || n < 1) throw std::domain_error("dimensions m, n must be >= 1");
    for (const Real* r : {&p, &q}) {
        double v = r->value();
        if (!(v > 1.0) || !std::isfinite(v) || (r->is_exact() && *r->exact() <= 1))
            throw std::domain_error("exponents must satisfy 1 < p, q < inf");
    }
    if (!std::isfinite(alpha.value()) || !std::isfinite(beta.value()))
        throw std::domain_error("orders must be finite");
}

ProductIndices ProductIndices::dual() const {
    ProductIndices d = *this;
    d.p = q_prime();
    d.q = p_prime();
    return d;
}

std::string ProductIndices::str() const {
    std::ostringstream os;
    os << "m=" << m << ",n=" << n << ",p=" << p.str() << ",q=" << q.str()
       << ",alpha=" << alpha.str() << ",beta=" << beta.str();
    return os.str();
}

KeyValues parse_key_values(std::string_view text) {
    KeyValues kv;
    std::string s(text);
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + item + "'");
        std::string key = trim(item.substr(0, eq));
        kv[key] = Real::parse(item.substr(eq + 1));
    }
    return kv;
}

ProductIndices indices_from(const KeyValues& kv) {
    auto need = [&](const char* k) -> const Real& {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument(std::string("missing index '") + k + "'");
        return it->second;
    };
    auto as_int = [&](const char* k) {
        const Real& r = need(k);
        double v = r.value();
        if (v != std::floor(v)) throw std::invalid_argument(std::string(k) + " must be an integer");
        return static_cast<int>(v);
    };
    ProductIndices idx;
    idx.m = as_int("m");
    idx.n = kv.count("n") ? as_int("n") : 1;
    idx.p = need("p");
    idx.q = need("q");
    idx.alpha = need("alpha");
    idx.beta = kv.count("beta") ? kv.at("beta") : Real(0);
    idx.validate();
    return idx;
}

ProductIndices parse_indices(std::string_view text) { return indices_from(parse_key_values(text)); }

}  // namespace wnorm
