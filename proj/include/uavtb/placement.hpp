#pragma once

#include "uavtb/milp.hpp"
#include "uavtb/power.hpp"
#include "uavtb/rate.hpp"
#include "uavtb/rng.hpp"
#include "uavtb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace uavtb {

struct PlacementOptions {
    int num_candidates = 8;        // Q, incumbent position included
    double initial_radius_m = 250.0;
    double min_radius_m = 1.0;
    int max_iterations = 30;
    double improvement_tol = 1e-3; // relative, per while-loop iteration
    bool joint_exhaustive = false; // evaluate all Q^L combinations (tiny L only)
    bool refine_power_per_candidate = false;
    bool refine_final_power = false;
    /// Candidate scoring accepts near-optimal associations. When the
    /// backhaul caps bind, proving exact optimality is exponentially
    /// expensive while the search only needs consistent comparisons, so
    /// the inner solver stops within a small relative gap or after a few
    /// branch-and-bound nodes, whichever comes first.
    MilpOptions milp{.gap_rel = 0.03, .node_budget = 8};
    SubgradientOptions subgradient;
};

struct PlacementTracePoint {
    int iteration = 0;
    double radius_m = 0.0;
    double objective_bps = 0.0;
    std::vector<Point3> positions;
};

struct PlacementState {
    std::vector<Point3> positions;
    double radius_m = 0.0;
    int iterations = 0;
    double best_objective_bps = 0.0;
    bool converged = false;
    std::vector<PlacementTracePoint> trace;
};

struct PlacementResult {
    PlacementState state;
    Association assoc;
    PowerAllocation power;
    EndToEndValue value;
};

/// Candidate positions for one UAV: the incumbent first, then Q-1 points
/// at uniform random angles on the circle of the current radius, clamped
/// to the area rectangle. Altitude never changes.
inline std::vector<Point3> generate_candidates(const Point3& current, double radius_m, int q,
                                               double area_x, double area_y, RngStream& rng) {
    if (radius_m <= 0.0) throw std::invalid_argument("candidate radius must be positive");
    std::vector<Point3> out;
    out.reserve(q);
    out.push_back(current);
    for (int k = 1; k < q; ++k) {
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        Point3 p{current.x + radius_m * std::cos(angle), current.y + radius_m * std::sin(angle),
                 current.z};
        p.x = std::clamp(p.x, 0.0, area_x);
        p.y = std::clamp(p.y, 0.0, area_y);
        out.push_back(p);
    }
    return out;
}

namespace detail {

struct Evaluation {
    double objective_bps = 0.0;
    Association assoc;
};

/// Objective of one UAV position combination: rebuild channels, take the
/// best backhaul per UAV, solve the association MILP at uniform power
/// (optionally refining the powers), and report the end-to-end total.
/// Pure in (positions, scenario, fixed_assoc).
inline Evaluation evaluate_positions(const Scenario& base, const std::vector<Point3>& positions,
                                     const PlacementOptions& opt,
                                     const Association* fixed_assoc,
                                     const Association* warm_start) {
    Scenario s = base;
    s.uavs = positions;
    const AccessChannel access = build_access_channel(s);
    const BackhaulChannel back = build_backhaul_channel(s);
    Evaluation ev;
    if (fixed_assoc != nullptr) {
        const PowerAllocation pw = uniform_power(s, fixed_assoc);
        const RateTable rates = compute_rates(s, access, back, pw);
        ev.assoc = *fixed_assoc;
        ev.objective_bps = end_to_end(ev.assoc, rates).total_bps;
        return ev;
    }
    const PowerAllocation pw = uniform_power(s);
    const RateTable rates = compute_rates(s, access, back, pw);
    MilpOptions milp_opt = opt.milp;
    milp_opt.initial_incumbent = warm_start;
    MilpResult milp = solve_association(s, rates, milp_opt);
    ev.assoc = std::move(milp.assoc);
    ev.objective_bps = milp.objective_bps;
    if (opt.refine_power_per_candidate) {
        const PowerAllocation refined =
            subgradient_solve(s, ev.assoc, access, rates, opt.subgradient);
        double total = 0.0;
        for (double r : refined.uav_rate_bps) total += r;
        ev.objective_bps = total;
    }
    return ev;
}

} // namespace detail

/// Convenience wrapper matching the candidate-evaluation contract.
inline double evaluate_candidate_combination(const Scenario& s,
                                             const std::vector<Point3>& positions,
                                             const PlacementOptions& opt = {}) {
    return detail::evaluate_positions(s, positions, opt, nullptr, nullptr).objective_bps;
}

/// Shrink-and-realign search over UAV positions. Each while-loop
/// iteration sweeps the UAVs one at a time (or all combinations jointly
/// in exhaustive mode), adopts strict improvements, then halves the
/// radius. Converged once the radius has shrunk below the minimum and the
/// last iteration brought no meaningful improvement.
inline PlacementResult optimize_placement(const Scenario& scenario, const PlacementOptions& opt,
                                          std::uint64_t seed,
                                          const Association* fixed_assoc = nullptr) {
    if (opt.num_candidates < 1) throw std::invalid_argument("need at least one candidate");
    if (opt.initial_radius_m <= opt.min_radius_m || opt.min_radius_m <= 0.0)
        throw std::invalid_argument("require initial_radius > min_radius > 0");

    RngStream rng(seed, "placement-candidates");
    PlacementResult res;
    PlacementState& st = res.state;
    st.positions = scenario.uavs;
    st.radius_m = opt.initial_radius_m;

    auto best_eval = detail::evaluate_positions(scenario, st.positions, opt, fixed_assoc, nullptr);
    st.best_objective_bps = best_eval.objective_bps;
    st.trace.push_back({0, st.radius_m, st.best_objective_bps, st.positions});

    const int L = scenario.num_uavs();
    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        const double prev_best = st.best_objective_bps;

        std::vector<std::vector<Point3>> cand(L);
        for (int l = 0; l < L; ++l)
            cand[l] = generate_candidates(st.positions[l], st.radius_m, opt.num_candidates,
                                          scenario.area_x_m, scenario.area_y_m, rng);

        if (opt.joint_exhaustive) {
            double combos = 1.0;
            for (int l = 0; l < L; ++l) combos *= opt.num_candidates;
            if (combos > 1e5)
                throw std::invalid_argument("joint exhaustive mode too large for this L and Q");
            std::vector<int> pick(L, 0);
            const auto total = static_cast<long long>(combos);
            for (long long c = 0; c < total; ++c) {
                long long rem = c;
                std::vector<Point3> pos(L);
                for (int l = 0; l < L; ++l) {
                    pos[l] = cand[l][rem % opt.num_candidates];
                    rem /= opt.num_candidates;
                }
                auto ev = detail::evaluate_positions(scenario, pos, opt, fixed_assoc,
                                                     &best_eval.assoc);
                if (ev.objective_bps > st.best_objective_bps) {
                    st.best_objective_bps = ev.objective_bps;
                    st.positions = pos;
                    best_eval = std::move(ev);
                }
            }
        } else {
            // coordinate-descent sweep: improve one UAV holding the others
            for (int l = 0; l < L; ++l) {
                std::vector<Point3> pos = st.positions;
                for (int q = 1; q < opt.num_candidates; ++q) { // q=0 is the incumbent
                    pos[l] = cand[l][q];
                    auto ev = detail::evaluate_positions(scenario, pos, opt, fixed_assoc,
                                                         &best_eval.assoc);
                    if (ev.objective_bps > st.best_objective_bps) {
                        st.best_objective_bps = ev.objective_bps;
                        st.positions[l] = cand[l][q];
                        best_eval = std::move(ev);
                    }
                }
            }
        }

        st.iterations = iter;
        st.trace.push_back({iter, st.radius_m, st.best_objective_bps, st.positions});
        const double improvement =
            (st.best_objective_bps - prev_best) / std::max(prev_best, 1e-30);
        st.radius_m *= 0.5;
        if (improvement < opt.improvement_tol && st.radius_m < opt.min_radius_m) {
            st.converged = true;
            break;
        }
    }

    res.assoc = best_eval.assoc;
    Scenario final_s = scenario;
    final_s.uavs = st.positions;
    const AccessChannel access = build_access_channel(final_s);
    const BackhaulChannel back = build_backhaul_channel(final_s);
    if (opt.refine_final_power) {
        const RateTable uniform_rates =
            compute_rates(final_s, access, back, uniform_power(final_s));
        res.power = subgradient_solve(final_s, res.assoc, access, uniform_rates,
                                      opt.subgradient);
    } else {
        res.power = uniform_power(final_s, &res.assoc);
    }
    const RateTable rates = compute_rates(final_s, access, back, res.power);
    res.value = end_to_end(res.assoc, rates);
    for (int l = 0; l < L; ++l) res.power.uav_rate_bps[l] = res.value.per_uav_bps[l];
    st.best_objective_bps = std::max(st.best_objective_bps, res.value.total_bps);
    return res;
}

} // namespace uavtb
