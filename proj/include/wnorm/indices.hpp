#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace wnorm {

using Rational = boost::multiprecision::cpp_rational;

// Default tolerance for equalities between inexact reals.
inline constexpr double kBoundaryTol = 1e-10;

// A real number that remembers its exact rational value when it has one.
// Arithmetic between two exact operands stays exact.
class Real {
public:
    Real() = default;
    Real(double v) : v_(v) {}
    Real(int v) : v_(v), r_(Rational(v)) {}
    explicit Real(const Rational& r);

    static Real parse(std::string_view text);

    double value() const { return v_; }
    bool is_exact() const { return r_.has_value(); }
    const std::optional<Rational>& exact() const { return r_; }

    std::string str() const;

    friend Real operator+(const Real& a, const Real& b);
    friend Real operator-(const Real& a, const Real& b);
    friend Real operator*(const Real& a, const Real& b);
    friend Real operator/(const Real& a, const Real& b);
    Real operator-() const;

private:
    double v_ = 0.0;
    std::optional<Rational> r_;
};

// Three-way comparison: exact when both sides are exact, otherwise values
// within tol compare equal.
int compare(const Real& a, const Real& b, double tol = kBoundaryTol);
bool is_zero(const Real& a, double tol = kBoundaryTol);
// True when the comparison was decided by tolerance rather than exactly.
bool near_tie(const Real& a, const Real& b, double tol = kBoundaryTol);

Real min(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);

double conjugate(double p);
Real conjugate(const Real& p);

double gamma_gap(double p, double q);
Real gamma_gap(const Real& p, const Real& q);

struct SignedPart {
    Real value;
    bool at_boundary = false;
};

SignedPart positive_part(const Real& t, double tol = kBoundaryTol);
SignedPart negative_part(const Real& t, double tol = kBoundaryTol);

struct DeltaBracket {
    Real value;
    bool any_boundary = false;
};

// (gamma - dim/q)_+ + (delta - dim/p')_+
DeltaBracket delta_bracket(const Real& gamma, const Real& delta, int dim,
                           const Real& p, const Real& q, double tol = kBoundaryTol);

struct ProductIndices {
    int m = 1;
    int n = 1;
    Real p = Real(2);
    Real q = Real(2);
    Real alpha = Real(0);
    Real beta = Real(0);

    void validate() const;
    Real p_prime() const { return conjugate(p); }
    Real q_prime() const { return conjugate(q); }
    Real gap() const { return gamma_gap(p, q); }
    ProductIndices dual() const;
    std::string str() const;
};

using KeyValues = std::map<std::string, Real>;

// "m=1,n=1,p=2,q=4,alpha=1/4,beta=1/4" -> key/value map.
KeyValues parse_key_values(std::string_view text);
ProductIndices indices_from(const KeyValues& kv);
ProductIndices parse_indices(std::string_view text);

}  // namespace wnorm
