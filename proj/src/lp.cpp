#include "sudakov/lp.hpp"

#include <cmath>
#include <limits>

namespace sudakov {

namespace {

using Real = long double;
constexpr Real kEps = 1e-13L;

struct Tableau {
    std::size_t rows = 0;
    std::size_t cols = 0;  // without rhs
    std::vector<std::vector<Real>> t;  // rows x (cols + 1)
    std::vector<std::size_t> basis;

    void pivot(std::size_t r, std::size_t c) {
        const Real pv = t[r][c];
        for (auto& v : t[r]) v /= pv;
        t[r][c] = 1.0L;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            const Real f = t[i][c];
            if (f == 0.0L) continue;
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
            t[i][c] = 0.0L;
        }
        basis[r] = c;
    }

    /// Maximizes obj.x over the current tableau restricted to columns with
    /// allowed[j]. Returns false when unbounded.
    bool optimize(const std::vector<Real>& obj, const std::vector<bool>& allowed) {
        for (;;) {
            // reduced cost d_j = obj_j - sum_i obj_{basis_i} t_ij
            std::size_t enter = cols;
            for (std::size_t j = 0; j < cols && enter == cols; ++j) {
                if (!allowed[j]) continue;
                Real d = obj[j];
                for (std::size_t i = 0; i < rows; ++i) d -= obj[basis[i]] * t[i][j];
                if (d > kEps) enter = j;
            }
            if (enter == cols) return true;
            std::size_t leave = rows;
            Real best = std::numeric_limits<Real>::infinity();
            for (std::size_t i = 0; i < rows; ++i) {
                if (t[i][enter] <= kEps) continue;
                const Real ratio = t[i][cols] / t[i][enter];
                if (ratio < best - kEps || (std::abs(ratio - best) <= kEps && leave < rows && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == rows) return false;
            pivot(leave, enter);
        }
    }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const std::size_t n = lp.vars;
    const std::size_t m_le = lp.A_le.size();
    const std::size_t m = m_le + lp.A_eq.size();
    if (lp.c.size() != n) throw DomainError("objective has wrong length");
    // Columns: originals, one slack per <= row, one artificial per row that needs it.
    std::vector<bool> needs_art(m, false);
    std::vector<Real> sign(m, 1.0L);
    for (std::size_t i = 0; i < m_le; ++i)
        if (lp.b_le[i] < 0.0) {
            sign[i] = -1.0L;
            needs_art[i] = true;
        }
    for (std::size_t i = m_le; i < m; ++i) {
        needs_art[i] = true;
        if (lp.b_eq[i - m_le] < 0.0) sign[i] = -1.0L;
    }
    std::size_t arts = 0;
    for (bool b : needs_art) arts += b;
    Tableau tab;
    tab.rows = m;
    tab.cols = n + m_le + arts;
    tab.t.assign(m, std::vector<Real>(tab.cols + 1, 0.0L));
    tab.basis.assign(m, 0);
    std::size_t art = n + m_le;
    for (std::size_t i = 0; i < m; ++i) {
        const Vector& row = i < m_le ? lp.A_le[i] : lp.A_eq[i - m_le];
        if (row.size() != n) throw DomainError("constraint row has wrong length");
        for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = sign[i] * row[j];
        tab.t[i][tab.cols] = sign[i] * (i < m_le ? lp.b_le[i] : lp.b_eq[i - m_le]);
        if (i < m_le) tab.t[i][n + i] = sign[i];
        if (needs_art[i]) {
            tab.t[i][art] = 1.0L;
            tab.basis[i] = art++;
        } else {
            tab.basis[i] = n + i;
        }
    }
    std::vector<bool> allowed(tab.cols, true);
    if (arts > 0) {
        std::vector<Real> phase1(tab.cols, 0.0L);
        for (std::size_t j = n + m_le; j < tab.cols; ++j) phase1[j] = -1.0L;
        tab.optimize(phase1, allowed);
        Real infeas = 0.0L;
        for (std::size_t i = 0; i < m; ++i)
            if (tab.basis[i] >= n + m_le) infeas += tab.t[i][tab.cols];
        if (infeas > 1e-9L) return {LpStatus::infeasible, {}, 0.0};
        // Drive artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis[i] < n + m_le) continue;
            for (std::size_t j = 0; j < n + m_le; ++j)
                if (std::abs(tab.t[i][j]) > 1e-11L) {
                    tab.pivot(i, j);
                    break;
                }
        }
        for (std::size_t j = n + m_le; j < tab.cols; ++j) allowed[j] = false;
    }
    std::vector<Real> obj(tab.cols, 0.0L);
    for (std::size_t j = 0; j < n; ++j) obj[j] = lp.c[j];
    if (!tab.optimize(obj, allowed)) return {LpStatus::unbounded, {}, 0.0};
    LpResult res;
    res.status = LpStatus::optimal;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis[i] < n) res.x[tab.basis[i]] = static_cast<double>(std::max(0.0L, tab.t[i][tab.cols]));
    Real objective = 0.0L;
    for (std::size_t j = 0; j < n; ++j) objective += static_cast<Real>(lp.c[j]) * res.x[j];
    res.objective = static_cast<double>(objective);
    return res;
}

}  // namespace sudakov
