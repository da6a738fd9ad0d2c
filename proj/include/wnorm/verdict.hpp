#pragma once

#include "wnorm/indices.hpp"

#include <string>
#include <vector>

namespace wnorm {

enum class Relation { Less, LessEq, Equal, GreaterEq, Greater };

std::string to_string(Relation r);

enum class Decision { False, True, Unknown };

std::string to_string(Decision d);

struct Condition {
    std::string name;
    double lhs = 0;
    Relation rel = Relation::LessEq;
    double rhs = 0;
    bool satisfied = false;
    bool exact = false;          // decided with rational arithmetic
    bool near_boundary = false;  // decided inside the float tolerance band
};

Condition check(const std::string& name, const Real& lhs, Relation rel, const Real& rhs,
                double tol = kBoundaryTol);

struct Verdict {
    Decision decision = Decision::False;
    std::vector<Condition> witnesses;
    std::vector<std::string> strictness_notes;
    std::vector<std::string> warnings;

    bool holds() const { return decision == Decision::True; }
    bool near_boundary() const;
    // decision := every witness satisfied
    void settle();
    const Condition* first_failure() const;
    void add(Condition c) { witnesses.push_back(std::move(c)); }
};

}  // namespace wnorm
