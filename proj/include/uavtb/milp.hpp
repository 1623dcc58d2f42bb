#pragma once

#include "uavtb/rate.hpp"
#include "uavtb/scenario.hpp"
#include "uavtb/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <vector>

namespace uavtb {

/// Linearized association problem: maximize the sum of per-UAV rates R_l,
/// with R_l capped by the associated access sum and by the assigned
/// backhaul rate. Binaries are the user/RB and TB assignments; the R_l
/// stay continuous with a finite upper bound.
struct MilpInstance {
    LinearProgram lp;
    std::vector<std::uint8_t> is_integer;
    int num_uavs = 0, num_users = 0, num_rbs = 0, num_tbs = 0;
    bool theta_fixed = false;
    std::vector<int> fixed_theta; // TB per UAV when theta_fixed
    RateTable rates;
    /// The LP works in rate units of one RB bandwidth so its coefficients
    /// stay O(1-100); multiply LP objectives by this to get bits/s.
    double bandwidth_norm = 1.0;

    int eps_index(int l, int u, int n) const {
        return (l * num_users + u) * num_rbs + n;
    }
    int theta_index(int m, int l) const {
        return num_uavs * num_users * num_rbs + m * num_uavs + l;
    }
    int r_index(int l) const {
        const int theta_count = theta_fixed ? 0 : num_tbs * num_uavs;
        return num_uavs * num_users * num_rbs + theta_count + l;
    }
};

/// Optimal TB per UAV: the backhaul assignment enters the objective only
/// through the per-UAV backhaul cap, so the best rate wins (ties go to the
/// lowest TB index).
inline std::vector<int> best_backhaul(const RateTable& rates) {
    std::vector<int> theta(rates.num_uavs, 0);
    for (int l = 0; l < rates.num_uavs; ++l) {
        double best = rates.backhaul(0, l);
        for (int m = 1; m < rates.num_tbs; ++m)
            if (rates.backhaul(m, l) > best) {
                best = rates.backhaul(m, l);
                theta[l] = m;
            }
    }
    return theta;
}

namespace detail {

inline MilpInstance build_p1_common(const Scenario& s, const RateTable& rates,
                                    const std::vector<int>* fixed_theta) {
    if (rates.num_uavs != s.num_uavs() || rates.num_users != s.num_users() ||
        rates.num_rbs != s.num_rbs() || rates.num_tbs != s.num_tbs())
        throw std::invalid_argument("rate table dimensions do not match scenario");

    MilpInstance inst;
    inst.num_uavs = s.num_uavs();
    inst.num_users = s.num_users();
    inst.num_rbs = s.num_rbs();
    inst.num_tbs = s.num_tbs();
    inst.theta_fixed = fixed_theta != nullptr;
    if (fixed_theta) inst.fixed_theta = *fixed_theta;
    inst.rates = rates;
    inst.bandwidth_norm = s.radio.rb_bandwidth_hz;

    const int L = inst.num_uavs, U = inst.num_users, N = inst.num_rbs, M = inst.num_tbs;
    auto& lp = inst.lp;

    for (int l = 0; l < L; ++l)
        for (int u = 0; u < U; ++u)
            for (int n = 0; n < N; ++n) {
                lp.add_variable(0.0, 0.0, 1.0);
                inst.is_integer.push_back(1);
            }
    if (!inst.theta_fixed)
        for (int m = 0; m < M; ++m)
            for (int l = 0; l < L; ++l) {
                lp.add_variable(0.0, 0.0, 1.0);
                inst.is_integer.push_back(1);
            }
    const double scale = 1.0 / inst.bandwidth_norm;
    for (int l = 0; l < L; ++l) {
        double cap;
        if (inst.theta_fixed) {
            cap = rates.backhaul(inst.fixed_theta[l], l);
        } else {
            cap = 0.0;
            for (int m = 0; m < M; ++m) cap = std::max(cap, rates.backhaul(m, l));
        }
        lp.add_variable(1.0, 0.0, cap * scale);
        inst.is_integer.push_back(0);
    }

    // access cap rows: R_l - sum eps * rate <= 0
    for (int l = 0; l < L; ++l) {
        LinearProgram::Row row;
        row.terms.push_back({inst.r_index(l), 1.0});
        for (int u = 0; u < U; ++u)
            for (int n = 0; n < N; ++n) {
                const double r = rates.access(l, u, n);
                if (r > 0.0) row.terms.push_back({inst.eps_index(l, u, n), -r * scale});
            }
        row.sense = LinearProgram::Sense::LessEqual;
        row.rhs = 0.0;
        lp.add_row(std::move(row));
    }
    // backhaul cap rows (free theta only; with theta fixed the cap is the
    // R_l upper bound)
    if (!inst.theta_fixed)
        for (int l = 0; l < L; ++l) {
            LinearProgram::Row row;
            row.terms.push_back({inst.r_index(l), 1.0});
            for (int m = 0; m < M; ++m)
                row.terms.push_back({inst.theta_index(m, l), -rates.backhaul(m, l) * scale});
            row.sense = LinearProgram::Sense::LessEqual;
            row.rhs = 0.0;
            lp.add_row(std::move(row));
        }
    // one (UAV, RB) per user
    for (int u = 0; u < U; ++u) {
        LinearProgram::Row row;
        for (int l = 0; l < L; ++l)
            for (int n = 0; n < N; ++n) row.terms.push_back({inst.eps_index(l, u, n), 1.0});
        row.sense = LinearProgram::Sense::LessEqual;
        row.rhs = 1.0;
        lp.add_row(std::move(row));
    }
    // one link per RB network-wide
    for (int n = 0; n < N; ++n) {
        LinearProgram::Row row;
        for (int l = 0; l < L; ++l)
            for (int u = 0; u < U; ++u) row.terms.push_back({inst.eps_index(l, u, n), 1.0});
        row.sense = LinearProgram::Sense::LessEqual;
        row.rhs = 1.0;
        lp.add_row(std::move(row));
    }
    // exactly one TB per UAV
    if (!inst.theta_fixed)
        for (int l = 0; l < L; ++l) {
            LinearProgram::Row row;
            for (int m = 0; m < M; ++m) row.terms.push_back({inst.theta_index(m, l), 1.0});
            row.sense = LinearProgram::Sense::Equal;
            row.rhs = 1.0;
            lp.add_row(std::move(row));
        }
    return inst;
}

} // namespace detail

inline MilpInstance build_p1_milp(const Scenario& s, const RateTable& rates) {
    return detail::build_p1_common(s, rates, nullptr);
}

/// Variant with the TB assignment decided up front (see best_backhaul);
/// drops the theta binaries and folds the backhaul cap into the R_l bound.
inline MilpInstance build_p1_milp(const Scenario& s, const RateTable& rates,
                                  const std::vector<int>& theta_by_uav) {
    return detail::build_p1_common(s, rates, &theta_by_uav);
}

struct MilpOptions {
    double gap_tol = 1e-6;   // absolute, on objective / bandwidth_norm
    double gap_rel = 0.0;    // relative, on the incumbent objective
    int node_budget = 100000;
    const Association* initial_incumbent = nullptr;
    SimplexOptions simplex;
};

struct MilpResult {
    Association assoc;
    std::vector<double> uav_rate_bps;
    double objective_bps = 0.0;
    bool optimal = false;
    int nodes_explored = 0;
};

namespace detail {

inline Association assoc_from_bits(const MilpInstance& inst,
                                   const std::vector<std::uint8_t>& eps_bits,
                                   const std::vector<int>& theta) {
    Association a(inst.num_uavs, inst.num_users, inst.num_rbs, inst.num_tbs);
    a.user_assign = eps_bits;
    for (int l = 0; l < inst.num_uavs; ++l) a.set_backhauled(theta[l], l, true);
    return a;
}

/// Exact objective of an integral assignment: per UAV, min(access sum,
/// backhaul of the assigned TB).
inline double integral_objective(const MilpInstance& inst, const Association& a,
                                 std::vector<double>* per_uav = nullptr) {
    double total = 0.0;
    if (per_uav) per_uav->assign(inst.num_uavs, 0.0);
    for (int l = 0; l < inst.num_uavs; ++l) {
        double acc = 0.0;
        for (int u = 0; u < inst.num_users; ++u)
            for (int n = 0; n < inst.num_rbs; ++n)
                if (a.serves(l, u, n)) acc += inst.rates.access(l, u, n);
        const double r = std::min(acc, inst.rates.backhaul(a.tb_of(l), l));
        if (per_uav) (*per_uav)[l] = r;
        total += r;
    }
    return total;
}

/// Greedy feasible assignment by descending rate; a cheap starting
/// incumbent for the branch and bound. Skips UAVs whose access sum has
/// already reached the backhaul cap: extra rate there is clipped by the
/// min() anyway, while the user and the RB may still help another UAV.
inline Association greedy_association(const MilpInstance& inst) {
    struct Triple { double rate; int l, u, n; };
    std::vector<Triple> triples;
    triples.reserve(static_cast<std::size_t>(inst.num_uavs) * inst.num_users * inst.num_rbs);
    for (int l = 0; l < inst.num_uavs; ++l)
        for (int u = 0; u < inst.num_users; ++u)
            for (int n = 0; n < inst.num_rbs; ++n) {
                const double r = inst.rates.access(l, u, n);
                if (r > 0.0) triples.push_back({r, l, u, n});
            }
    std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
        if (a.rate != b.rate) return a.rate > b.rate;
        if (a.l != b.l) return a.l < b.l;
        if (a.u != b.u) return a.u < b.u;
        return a.n < b.n;
    });
    std::vector<std::uint8_t> user_used(inst.num_users, 0), rb_used(inst.num_rbs, 0);
    const std::vector<int> theta =
        inst.theta_fixed ? inst.fixed_theta : best_backhaul(inst.rates);
    Association a(inst.num_uavs, inst.num_users, inst.num_rbs, inst.num_tbs);
    for (int l = 0; l < inst.num_uavs; ++l) a.set_backhauled(theta[l], l, true);
    std::vector<double> acc(inst.num_uavs, 0.0);
    for (const auto& t : triples) {
        if (user_used[t.u] || rb_used[t.n]) continue;
        if (acc[t.l] >= inst.rates.backhaul(theta[t.l], t.l)) continue;
        user_used[t.u] = 1;
        rb_used[t.n] = 1;
        acc[t.l] += t.rate;
        a.set_serves(t.l, t.u, t.n, true);
    }
    return a;
}

} // namespace detail

/// Best-first branch and bound over the fractional binaries. Deterministic:
/// most-fractional branching (lowest index on ties), down branch first,
/// queue ties broken by node creation order.
inline MilpResult solve_milp(const MilpInstance& inst, const MilpOptions& opt = {}) {
    MilpResult res;
    const int n_int = static_cast<int>(inst.is_integer.size());

    // starting incumbent: caller-provided association (if compatible) or greedy
    Association incumbent = detail::greedy_association(inst);
    if (opt.initial_incumbent != nullptr) {
        const Association& cand = *opt.initial_incumbent;
        if (cand.num_uavs == inst.num_uavs && cand.num_users == inst.num_users &&
            cand.num_rbs == inst.num_rbs && cand.num_tbs == inst.num_tbs) {
            if (detail::integral_objective(inst, cand) >
                detail::integral_objective(inst, incumbent))
                incumbent = cand;
        }
    }
    double incumbent_obj = detail::integral_objective(inst, incumbent);

    struct Node {
        double bound;
        int id;
        std::vector<std::pair<int, int>> fixes; // (var, 0/1)
    };
    auto cmp = [](const Node& a, const Node& b) {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.id > b.id;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
    int next_id = 0;
    open.push({std::numeric_limits<double>::infinity(), next_id++, {}});

    LinearProgram lp = inst.lp; // bounds are mutated per node
    const double gap_abs = opt.gap_tol * inst.bandwidth_norm;
    bool budget_hit = false;

    const auto gap = [&] {
        return std::max(gap_abs, opt.gap_rel * std::abs(incumbent_obj));
    };
    while (!open.empty()) {
        if (open.top().bound <= incumbent_obj + gap()) break; // bound gap closed
        Node node = open.top();
        open.pop();
        if (res.nodes_explored >= opt.node_budget) {
            budget_hit = true;
            break;
        }
        ++res.nodes_explored;

        for (const auto& [var, val] : node.fixes) {
            lp.lower[var] = val;
            lp.upper[var] = val;
        }
        LpSolution sol = solve_lp(lp, opt.simplex);
        for (const auto& [var, val] : node.fixes) {
            lp.lower[var] = inst.lp.lower[var];
            lp.upper[var] = inst.lp.upper[var];
        }
        if (sol.status == LpStatus::Infeasible) continue;
        if (sol.status != LpStatus::Optimal)
            throw std::runtime_error("LP relaxation did not solve to optimality");
        const double lp_bound = sol.objective * inst.bandwidth_norm; // back to bits/s
        if (lp_bound <= incumbent_obj + gap()) continue;

        int branch_var = -1;
        double best_frac = 1e-6;
        for (int j = 0; j < n_int; ++j) {
            if (!inst.is_integer[j]) continue;
            const double f = std::min(sol.x[j] - std::floor(sol.x[j]),
                                      std::ceil(sol.x[j]) - sol.x[j]);
            if (f > best_frac) {
                best_frac = f;
                branch_var = j;
            }
        }
        if (branch_var < 0) {
            // integral: round and recompute the exact objective
            std::vector<std::uint8_t> eps_bits(
                static_cast<std::size_t>(inst.num_uavs) * inst.num_users * inst.num_rbs, 0);
            for (int i = 0; i < static_cast<int>(eps_bits.size()); ++i)
                eps_bits[i] = sol.x[i] > 0.5 ? 1 : 0;
            std::vector<int> theta(inst.num_uavs, 0);
            if (inst.theta_fixed) {
                theta = inst.fixed_theta;
            } else {
                for (int l = 0; l < inst.num_uavs; ++l)
                    for (int m = 0; m < inst.num_tbs; ++m)
                        if (sol.x[inst.theta_index(m, l)] > 0.5) theta[l] = m;
            }
            Association cand = detail::assoc_from_bits(inst, eps_bits, theta);
            validate_association(cand); // the LP must deliver a feasible point
            const double obj = detail::integral_objective(inst, cand);
            if (obj > incumbent_obj) {
                incumbent_obj = obj;
                incumbent = std::move(cand);
            }
            continue;
        }
        Node down{lp_bound, next_id++, node.fixes};
        down.fixes.push_back({branch_var, 0});
        Node up{lp_bound, next_id++, node.fixes};
        up.fixes.push_back({branch_var, 1});
        open.push(std::move(down));
        open.push(std::move(up));
    }

    res.assoc = incumbent;
    res.objective_bps = detail::integral_objective(inst, incumbent, &res.uav_rate_bps);
    res.optimal = !budget_hit;
    return res;
}

/// Hot-path helper: optimal backhaul choice, then the user/RB assignment
/// MILP with the TB assignment fixed.
inline MilpResult solve_association(const Scenario& s, const RateTable& rates,
                                    const MilpOptions& opt = {}) {
    const std::vector<int> theta = best_backhaul(rates);
    const MilpInstance inst = build_p1_milp(s, rates, theta);
    return solve_milp(inst, opt);
}

/// Plain-text dump for external cross-checking: objective row, constraint
/// rows, integrality flags, bounds.
inline void dump_milp(const MilpInstance& inst, std::ostream& out) {
    out << "maximize";
    for (int j = 0; j < inst.lp.num_vars; ++j)
        if (inst.lp.objective[j] != 0.0) out << " " << inst.lp.objective[j] << "*x" << j;
    out << "\n";
    for (const auto& row : inst.lp.rows) {
        out << "row:";
        for (const auto& [j, v] : row.terms) out << " " << v << "*x" << j;
        switch (row.sense) {
            case LinearProgram::Sense::LessEqual: out << " <= "; break;
            case LinearProgram::Sense::GreaterEqual: out << " >= "; break;
            case LinearProgram::Sense::Equal: out << " == "; break;
        }
        out << row.rhs << "\n";
    }
    out << "integer:";
    for (int j = 0; j < inst.lp.num_vars; ++j)
        if (inst.is_integer[j]) out << " x" << j;
    out << "\n";
    for (int j = 0; j < inst.lp.num_vars; ++j)
        out << "bound: " << inst.lp.lower[j] << " <= x" << j << " <= " << inst.lp.upper[j]
            << "\n";
}

} // namespace uavtb
