#pragma once

#include "uavtb/milp.hpp"
#include "uavtb/placement.hpp"
#include "uavtb/power.hpp"
#include "uavtb/rate.hpp"
#include "uavtb/rng.hpp"
#include "uavtb/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavtb {

/// Result of one oracle-versus-implementation check.
struct OracleReport {
    std::string check;
    std::string instance;
    double oracle_value = 0.0;
    double candidate_value = 0.0;
    double abs_gap = 0.0;
    double rel_gap = 0.0;
    bool pass = false;
};

inline OracleReport make_report(std::string check, std::string instance, double oracle,
                                double candidate, double tol_rel) {
    OracleReport r;
    r.check = std::move(check);
    r.instance = std::move(instance);
    r.oracle_value = oracle;
    r.candidate_value = candidate;
    r.abs_gap = std::abs(oracle - candidate);
    r.rel_gap = r.abs_gap / std::max(std::abs(oracle), 1e-30);
    r.pass = r.rel_gap <= tol_rel;
    return r;
}

/// Independent rate evaluation in extended precision via log1p.
inline double oracle_rate_bps(double power_w, double gain, double bandwidth_hz,
                              double noise_psd) {
    const long double snr = static_cast<long double>(power_w) * gain /
                            (static_cast<long double>(bandwidth_hz) * noise_psd);
    return static_cast<double>(bandwidth_hz * std::log1p(snr) / std::log(2.0L));
}

struct EnumerationResult {
    double objective_bps = 0.0;
    Association assoc;
};

namespace detail {

inline void enumerate_users(const RateTable& rates, int u, std::uint64_t rb_mask,
                            std::vector<std::pair<int, int>>& choice, // (l, n) or (-1, -1)
                            EnumerationResult& best) {
    const int L = rates.num_uavs, U = rates.num_users, N = rates.num_rbs, M = rates.num_tbs;
    if (u == U) {
        double total = 0.0;
        std::vector<double> acc(L, 0.0);
        for (int uu = 0; uu < U; ++uu)
            if (choice[uu].first >= 0)
                acc[choice[uu].first] += rates.access(choice[uu].first, uu, choice[uu].second);
        std::vector<int> theta(L, 0);
        for (int l = 0; l < L; ++l) {
            double bl = std::min(acc[l], rates.backhaul(0, l));
            for (int m = 1; m < M; ++m) {
                const double v = std::min(acc[l], rates.backhaul(m, l));
                if (v > bl) { bl = v; theta[l] = m; }
            }
            total += bl;
        }
        if (total > best.objective_bps || best.assoc.num_uavs == 0) {
            Association a(L, U, N, M);
            for (int uu = 0; uu < U; ++uu)
                if (choice[uu].first >= 0)
                    a.set_serves(choice[uu].first, uu, choice[uu].second, true);
            for (int l = 0; l < L; ++l) a.set_backhauled(theta[l], l, true);
            best.objective_bps = total;
            best.assoc = std::move(a);
        }
        return;
    }
    choice[u] = {-1, -1};
    enumerate_users(rates, u + 1, rb_mask, choice, best);
    for (int l = 0; l < L; ++l)
        for (int n = 0; n < N; ++n) {
            if (rb_mask & (1ULL << n)) continue;
            choice[u] = {l, n};
            enumerate_users(rates, u + 1, rb_mask | (1ULL << n), choice, best);
        }
    choice[u] = {-1, -1};
}

} // namespace detail

/// Exhaustive search over all feasible associations, including the TB
/// choice per UAV. Only for tiny instances.
inline EnumerationResult enumerate_associations(const RateTable& rates) {
    const int L = rates.num_uavs, U = rates.num_users, N = rates.num_rbs;
    if (N > 62) throw std::invalid_argument("enumeration limited to <= 62 RBs");
    const double combos = std::pow(static_cast<double>(L) * N + 1.0, U);
    if (combos > 1e6) throw std::invalid_argument("instance too large to enumerate");
    EnumerationResult best;
    best.objective_bps = -1.0;
    std::vector<std::pair<int, int>> choice(U, {-1, -1});
    detail::enumerate_users(rates, 0, 0, choice, best);
    return best;
}

struct GridPlacementResult {
    double objective_bps = 0.0;
    std::vector<Point3> positions;
};

/// Exhaustive lattice search over UAV positions, association solved by
/// enumeration at uniform power. L = 1 (or 2 with a coarse lattice).
inline GridPlacementResult grid_placement(const Scenario& scenario, double lattice_step) {
    const int L = scenario.num_uavs();
    if (lattice_step <= 0.0) throw std::invalid_argument("lattice step must be positive");
    const int nx = static_cast<int>(std::floor(scenario.area_x_m / lattice_step)) + 1;
    const int ny = static_cast<int>(std::floor(scenario.area_y_m / lattice_step)) + 1;
    const double points = static_cast<double>(nx) * ny;
    if (std::pow(points, L) > 2e4)
        throw std::invalid_argument("lattice too fine for exhaustive placement search");

    std::vector<Point3> lattice;
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy)
            lattice.push_back({ix * lattice_step, iy * lattice_step, scenario.uavs[0].z});

    GridPlacementResult best;
    best.objective_bps = -1.0;
    std::vector<std::size_t> pick(L, 0);
    const std::size_t total = static_cast<std::size_t>(std::pow(points, L));
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rem = c;
        Scenario s = scenario;
        for (int l = 0; l < L; ++l) {
            s.uavs[l] = lattice[rem % lattice.size()];
            rem /= lattice.size();
        }
        const AccessChannel access = build_access_channel(s);
        const BackhaulChannel back = build_backhaul_channel(s);
        const RateTable rates = compute_rates(s, access, back, uniform_power(s));
        const auto e = enumerate_associations(rates);
        if (e.objective_bps > best.objective_bps) {
            best.objective_bps = e.objective_bps;
            best.positions = s.uavs;
        }
    }
    (void)pick;
    return best;
}

/// Small randomized scenario for the cross-check suites.
inline Scenario random_tiny_scenario(RngStream& rng, std::uint64_t scenario_seed) {
    ScenarioConfig cfg;
    cfg.num_uavs = 1 + static_cast<int>(rng.below(2));
    cfg.num_users = 1 + static_cast<int>(rng.below(3));
    cfg.num_rbs = 1 + static_cast<int>(rng.below(3));
    cfg.num_tbs = 1 + static_cast<int>(rng.below(2));
    cfg.area_x_m = 500.0;
    cfg.area_y_m = 500.0;
    cfg.tb_positions.clear();
    for (int m = 0; m < cfg.num_tbs; ++m)
        cfg.tb_positions.push_back({rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0), 200.0});
    cfg.peak_power_dbm = rng.uniform(20.0, 40.0);
    return generate_scenario(cfg, scenario_seed);
}

/// MILP versus exhaustive enumeration on random tiny instances.
inline std::vector<OracleReport> verify_association_suite(int count, std::uint64_t seed) {
    std::vector<OracleReport> out;
    RngStream rng(seed, "verify-association");
    for (int i = 0; i < count; ++i) {
        const Scenario s = random_tiny_scenario(rng, derive_seed(seed, "assoc-instance", i));
        const AccessChannel access = build_access_channel(s);
        const BackhaulChannel back = build_backhaul_channel(s);
        const RateTable rates = compute_rates(s, access, back, uniform_power(s));
        const auto oracle = enumerate_associations(rates);
        const MilpInstance inst = build_p1_milp(s, rates);
        const MilpResult milp = solve_milp(inst);
        std::ostringstream desc;
        desc << "L=" << s.num_uavs() << " U=" << s.num_users() << " N=" << s.num_rbs()
             << " M=" << s.num_tbs() << " seed_index=" << i;
        auto rep = make_report("association-enumeration", desc.str(), oracle.objective_bps,
                               milp.objective_bps, 1e-9);
        rep.pass = rep.pass && milp.optimal;
        out.push_back(rep);
    }
    return out;
}

/// Dual subgradient versus bisection water-filling on random single-UAV
/// instances; also checks the common-water-level KKT residual.
inline std::vector<OracleReport> verify_power_suite(int count, std::uint64_t seed) {
    std::vector<OracleReport> out;
    RngStream rng(seed, "verify-power");
    const double bandwidth = 180e3;
    const double noise_psd = dbm_to_watts(-110.0) / bandwidth;
    for (int i = 0; i < count; ++i) {
        const int k_links = 1 + static_cast<int>(rng.below(10));
        std::vector<double> gains(k_links);
        for (double& h : gains) h = std::pow(10.0, rng.uniform(-11.0, -8.0));
        const double budget = dbm_to_watts(rng.uniform(20.0, 40.0));

        const auto dual = subgradient_waterfill(gains, budget, bandwidth, noise_psd);
        const auto oracle_p = waterfill_bisect(gains, budget, bandwidth, noise_psd);

        double obj_dual = 0.0, obj_oracle = 0.0;
        for (int k = 0; k < k_links; ++k) {
            obj_dual += oracle_rate_bps(dual.p[k], gains[k], bandwidth, noise_psd);
            obj_oracle += oracle_rate_bps(oracle_p[k], gains[k], bandwidth, noise_psd);
        }
        // KKT: marginal utility equal across active links
        double marg_min = std::numeric_limits<double>::infinity(), marg_max = 0.0;
        for (int k = 0; k < k_links; ++k) {
            if (dual.p[k] <= budget * 1e-9) continue;
            const double marg = bandwidth * gains[k] /
                                (std::log(2.0) * (bandwidth * noise_psd + dual.p[k] * gains[k]));
            marg_min = std::min(marg_min, marg);
            marg_max = std::max(marg_max, marg);
        }
        const double kkt_residual = (marg_max - marg_min) / marg_max;
        std::ostringstream desc;
        desc << "links=" << k_links << " budget_w=" << budget << " seed_index=" << i;
        auto rep = make_report("power-waterfill", desc.str(), obj_oracle, obj_dual, 1e-6);
        rep.pass = rep.pass && kkt_residual < 1e-6;
        out.push_back(rep);
    }
    return out;
}

/// Shrink-and-realign versus a 10 m lattice on single-UAV single-user
/// toy worlds.
inline std::vector<OracleReport> verify_placement_suite(int count, std::uint64_t seed,
                                                        double lattice_step = 10.0) {
    std::vector<OracleReport> out;
    for (int i = 0; i < count; ++i) {
        ScenarioConfig cfg;
        cfg.num_uavs = 1;
        cfg.num_users = 1;
        cfg.num_tbs = 1;
        cfg.num_rbs = 2;
        cfg.area_x_m = 300.0;
        cfg.area_y_m = 300.0;
        cfg.tb_positions = {{0.0, 150.0, 200.0}};
        const Scenario s = generate_scenario(cfg, derive_seed(seed, "placement-instance", i));

        const auto grid = grid_placement(s, lattice_step);
        PlacementOptions opt;
        // half the area side: total travel sums to 2*r0, so every point of
        // the toy area is reachable from the centered start
        opt.initial_radius_m = 150.0;
        const auto sr = optimize_placement(s, opt, s.seed);
        std::ostringstream desc;
        desc << "toy world seed_index=" << i;
        OracleReport rep;
        rep.check = "placement-grid";
        rep.instance = desc.str();
        rep.oracle_value = grid.objective_bps;
        rep.candidate_value = sr.state.best_objective_bps;
        rep.abs_gap = grid.objective_bps - sr.state.best_objective_bps;
        rep.rel_gap = rep.abs_gap / std::max(grid.objective_bps, 1e-30);
        rep.pass = sr.state.best_objective_bps >= 0.99 * grid.objective_bps;
        out.push_back(rep);
    }
    return out;
}

} // namespace uavtb
