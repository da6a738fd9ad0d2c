#include "wnorm/verdict.hpp"

#include <algorithm>

namespace wnorm {

std::string to_string(Relation r) {
    switch (r) {
        case Relation::Less: return "<";
        case Relation::LessEq: return "<=";
        case Relation::Equal: return "=";
        case Relation::GreaterEq: return ">=";
        case Relation::Greater: return ">";
    }
    return "?";
}

std::string to_string(Decision d) {
    switch (d) {
        case Decision::False: return "false";
        case Decision::True: return "true";
        case Decision::Unknown: return "unknown";
    }
    return "?";
}

Condition check(const std::string& name, const Real& lhs, Relation rel, const Real& rhs, double tol) {
    Condition c;
    c.name = name;
    c.lhs = lhs.value();
    c.rhs = rhs.value();
    c.rel = rel;
    c.exact = lhs.is_exact() && rhs.is_exact();
    c.near_boundary = near_tie(lhs, rhs, tol);
    int k = compare(lhs, rhs, tol);
    switch (rel) {
        case Relation::Less: c.satisfied = k < 0; break;
        case Relation::LessEq: c.satisfied = k <= 0; break;
        case Relation::Equal: c.satisfied = k == 0; break;
        case Relation::GreaterEq: c.satisfied = k >= 0; break;
        case Relation::Greater: c.satisfied = k > 0; break;
    }
    return c;
}

bool Verdict::near_boundary() const {
    return std::any_of(witnesses.begin(), witnesses.end(), [](const Condition& c) { return c.near_boundary; });
}

void Verdict::settle() {
    bool all = std::all_of(witnesses.begin(), witnesses.end(), [](const Condition& c) { return c.satisfied; });
    decision = all ? Decision::True : Decision::False;
    if (near_boundary()) warnings.push_back("near-boundary: a condition was decided within tolerance");
}

const Condition* Verdict::first_failure() const {
    for (const auto& c : witnesses)
        if (!c.satisfied) return &c;
    return nullptr;
}

}  // namespace wnorm
