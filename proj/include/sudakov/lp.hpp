#pragma once

#include <vector>

#include "sudakov/common.hpp"

namespace sudakov {

/// maximize c.x  subject to  A_le x <= b_le,  A_eq x = b_eq,  x >= 0.
struct LinearProgram {
    std::size_t vars = 0;
    Vector c;
    std::vector<Vector> A_le;
    Vector b_le;
    std::vector<Vector> A_eq;
    Vector b_eq;

    void add_le(Vector row, double rhs) {
        A_le.push_back(std::move(row));
        b_le.push_back(rhs);
    }
    void add_eq(Vector row, double rhs) {
        A_eq.push_back(std::move(row));
        b_eq.push_back(rhs);
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vector x;
    double objective = 0.0;
};

/// Dense two-phase simplex with Bland's rule. Meant for the small max-min
/// programs of the witness solver (tens of variables).
LpResult solve_lp(const LinearProgram& lp);

}  // namespace sudakov
