// Independent LP reference: a plain dense two-phase tableau simplex.
// Shares no solver code with the library; used only to cross-check it.
#pragma once

#include "uavtb/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lp_oracle {

struct Result {
    bool feasible = false;
    bool bounded = true;
    double objective = 0.0;
    std::vector<double> x;
};

namespace detail {

struct Tableau {
    int m = 0, n = 0; // rows, columns (excluding rhs)
    std::vector<double> t; // (m) x (n + 1), rhs last
    std::vector<int> basis;
    std::vector<bool> artificial;

    double& at(int i, int j) { return t[static_cast<std::size_t>(i) * (n + 1) + j]; }
    double at(int i, int j) const { return t[static_cast<std::size_t>(i) * (n + 1) + j]; }
    double& rhs(int i) { return at(i, n); }
    double rhs(int i) const { return at(i, n); }

    void pivot(int pr, int pc) {
        const double p = at(pr, pc);
        for (int j = 0; j <= n; ++j) at(pr, j) /= p;
        for (int i = 0; i < m; ++i) {
            if (i == pr) continue;
            const double f = at(i, pc);
            if (f == 0.0) continue;
            for (int j = 0; j <= n; ++j) at(i, j) -= f * at(pr, j);
        }
        basis[pr] = pc;
    }
};

// Maximize cost over the tableau; artificial columns may not enter when
// allow_artificial is false. Returns false on unboundedness.
inline bool run(Tableau& tb, const std::vector<double>& cost, bool allow_artificial,
                double& objective) {
    const double tol = 1e-9;
    for (int iter = 0; iter < 100000; ++iter) {
        // reduced costs d_j = c_j - c_B^T row_j
        int enter = -1;
        double best = tol;
        for (int j = 0; j < tb.n; ++j) {
            if (!allow_artificial && tb.artificial[j]) continue;
            double d = cost[j];
            for (int i = 0; i < tb.m; ++i) {
                const double cb = cost[tb.basis[i]];
                if (cb != 0.0) d -= cb * tb.at(i, j);
            }
            if (d > best) { best = d; enter = j; }
        }
        if (enter < 0) break;
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < tb.m; ++i) {
            const double a = tb.at(i, enter);
            if (a <= tol) continue;
            const double ratio = tb.rhs(i) / a;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 && leave >= 0 && tb.basis[i] < tb.basis[leave])) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave < 0) return false;
        tb.pivot(leave, enter);
    }
    objective = 0.0;
    for (int i = 0; i < tb.m; ++i) objective += cost[tb.basis[i]] * tb.rhs(i);
    return true;
}

} // namespace detail

// Solves the same maximization problem as uavtb::solve_lp: bounded
// variables become shifted nonnegative variables plus explicit upper-bound
// rows, then a dense two-phase simplex runs on the standard form.
inline Result solve(const uavtb::LinearProgram& lp) {
    const int n = lp.num_vars;
    struct Row { std::vector<std::pair<int, double>> terms; int sense; double rhs; };
    std::vector<Row> rows;
    for (const auto& r : lp.rows) {
        Row row;
        row.rhs = r.rhs;
        row.sense = r.sense == uavtb::LinearProgram::Sense::LessEqual      ? -1
                    : r.sense == uavtb::LinearProgram::Sense::GreaterEqual ? 1
                                                                           : 0;
        for (const auto& [j, v] : r.terms) {
            row.terms.push_back({j, v});
            row.rhs -= v * lp.lower[j]; // shift x' = x - lb
        }
        rows.push_back(std::move(row));
    }
    for (int j = 0; j < n; ++j)
        if (std::isfinite(lp.upper[j])) rows.push_back({{{j, 1.0}}, -1, lp.upper[j] - lp.lower[j]});

    const int m = static_cast<int>(rows.size());
    // count extra columns
    int n_slack = 0;
    for (const auto& r : rows)
        if (r.sense != 0) ++n_slack;
    detail::Tableau tb;
    tb.m = m;
    tb.n = n + n_slack + m; // structural + slack/surplus + one artificial slot per row
    tb.t.assign(static_cast<std::size_t>(m) * (tb.n + 1), 0.0);
    tb.basis.assign(m, -1);
    tb.artificial.assign(tb.n, false);

    int next_slack = n;
    const int art_base = n + n_slack;
    std::vector<int> art_of_row(m, -1);
    for (int i = 0; i < m; ++i) {
        double sign = rows[i].rhs < 0.0 ? -1.0 : 1.0;
        for (const auto& [j, v] : rows[i].terms) tb.at(i, j) += sign * v;
        tb.rhs(i) = sign * rows[i].rhs;
        int sense = rows[i].sense * (sign < 0 ? -1 : 1);
        if (rows[i].sense != 0) {
            tb.at(i, next_slack) = sense == -1 ? 1.0 : -1.0;
            if (sense == -1 && tb.rhs(i) >= 0.0) tb.basis[i] = next_slack;
            ++next_slack;
        }
        if (tb.basis[i] < 0) {
            const int a = art_base + i;
            tb.at(i, a) = 1.0;
            tb.artificial[a] = true;
            tb.basis[i] = a;
            art_of_row[i] = a;
        }
    }

    Result res;
    bool any_artificial = false;
    for (int i = 0; i < m; ++i) any_artificial = any_artificial || art_of_row[i] >= 0;
    if (any_artificial) {
        std::vector<double> phase1(tb.n, 0.0);
        for (int i = 0; i < m; ++i)
            if (art_of_row[i] >= 0) phase1[art_of_row[i]] = -1.0;
        double obj1 = 0.0;
        detail::run(tb, phase1, true, obj1);
        if (obj1 < -1e-7) return res; // infeasible
        // drive any zero-level artificial out of the basis so it cannot
        // creep back up during phase 2
        for (int i = 0; i < m; ++i) {
            if (!tb.artificial[tb.basis[i]]) continue;
            for (int j = 0; j < art_base; ++j)
                if (std::abs(tb.at(i, j)) > 1e-9) {
                    tb.pivot(i, j);
                    break;
                }
        }
    }
    std::vector<double> cost(tb.n, 0.0);
    for (int j = 0; j < n; ++j) cost[j] = lp.objective[j];
    double obj = 0.0;
    if (!detail::run(tb, cost, false, obj)) {
        res.feasible = true;
        res.bounded = false;
        return res;
    }
    res.feasible = true;
    res.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.rhs(i);
    double shift = 0.0;
    for (int j = 0; j < n; ++j) {
        res.x[j] += lp.lower[j];
        shift += lp.objective[j] * lp.lower[j];
    }
    res.objective = obj + shift;
    return res;
}

} // namespace lp_oracle
