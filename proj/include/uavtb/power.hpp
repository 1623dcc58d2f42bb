#pragma once

#include "uavtb/channel.hpp"
#include "uavtb/rate.hpp"
#include "uavtb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace uavtb {

/// Closed-form stationary power for one link given the multipliers:
/// water level mu*B/(ln2*lambda) minus the noise-over-gain floor, clamped
/// at zero.
inline double power_from_duals(double lambda, double mu, double gain, double bandwidth_hz,
                               double noise_psd) {
    if (lambda <= 0.0) throw std::domain_error("degenerate dual: lambda must be positive");
    const double level = mu * bandwidth_hz / (std::log(2.0) * lambda);
    return std::max(level - bandwidth_hz * noise_psd / gain, 0.0);
}

/// Independent oracle: bisection on the common water level w so that
/// sum [w - B*N0/h]+ meets the budget. Shares no code with the dual solve.
inline std::vector<double> waterfill_bisect(const std::vector<double>& gains, double budget_w,
                                            double bandwidth_hz, double noise_psd,
                                            double rel_tol = 1e-12) {
    if (gains.empty()) throw std::invalid_argument("waterfill needs at least one link");
    double floor_min = std::numeric_limits<double>::infinity();
    for (double h : gains) {
        if (h > 0.0) floor_min = std::min(floor_min, bandwidth_hz * noise_psd / h);
    }
    if (!std::isfinite(floor_min)) throw std::invalid_argument("all gains are zero");

    const auto filled = [&](double w) {
        double sum = 0.0;
        for (double h : gains)
            if (h > 0.0) sum += std::max(w - bandwidth_hz * noise_psd / h, 0.0);
        return sum;
    };
    double lo = floor_min;
    double hi = floor_min + budget_w;
    // f(lo) = 0, f(hi) >= budget since the strongest link alone absorbs it
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (filled(mid) < budget_w) lo = mid; else hi = mid;
        if ((hi - lo) <= rel_tol * hi) break;
    }
    const double w = 0.5 * (lo + hi);
    std::vector<double> p(gains.size(), 0.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k) {
        if (gains[k] > 0.0) p[k] = std::max(w - bandwidth_hz * noise_psd / gains[k], 0.0);
        sum += p[k];
    }
    if (sum > 0.0)
        for (double& v : p) v *= budget_w / sum;
    return p;
}

struct SubgradientOptions {
    double step0 = 0.1;      // delta_0 of the delta_0/sqrt(i) schedule
    double tol = 1e-6;       // on normalized multiplier movement
    int max_iterations = 5000;
};

struct DualState {
    std::vector<double> lambda;
    std::vector<double> mu;
    std::vector<int> iterations;
    std::vector<std::uint8_t> converged;
    bool all_converged = true;
};

struct UavDualResult {
    std::vector<double> p;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Dual subgradient for one UAV. The budget multiplier follows
/// lambda <- [lambda - delta_i * (budget - sum P)]+ with the diminishing
/// step delta_i = step0/sqrt(i); the step is applied in units of
/// lambda-per-watt so the schedule is scale-free. The rate-cap multiplier
/// is pinned at 1 by stationarity in R_l. The returned primal is the
/// stationary solution at the best multiplier seen, rescaled to meet the
/// budget exactly.
inline UavDualResult subgradient_waterfill(const std::vector<double>& gains, double budget_w,
                                           double bandwidth_hz, double noise_psd,
                                           const SubgradientOptions& opt = {}) {
    UavDualResult res;
    const std::size_t k_links = gains.size();
    if (k_links == 0) throw std::invalid_argument("no active links");
    const double mu = 1.0;
    // start from the noise-free water level budget/K
    const double lambda0 =
        mu * bandwidth_hz * static_cast<double>(k_links) / (std::log(2.0) * budget_w);
    const double unit = lambda0 / budget_w; // lambda change per watt of violation
    double lambda = lambda0;
    const double lambda_min = lambda0 * 1e-9;

    std::vector<double> p(k_links, 0.0);
    const auto total_power = [&](double lam) {
        double sum = 0.0;
        for (std::size_t k = 0; k < k_links; ++k) {
            p[k] = gains[k] > 0.0
                       ? power_from_duals(lam, mu, gains[k], bandwidth_hz, noise_psd)
                       : 0.0;
            sum += p[k];
        }
        return sum;
    };

    double best_lambda = lambda;
    double best_violation = std::numeric_limits<double>::infinity();
    res.converged = false;
    int i = 1;
    for (; i <= opt.max_iterations; ++i) {
        const double g = budget_w - total_power(lambda);
        if (std::abs(g) < best_violation) {
            best_violation = std::abs(g);
            best_lambda = lambda;
        }
        const double step = opt.step0 / std::sqrt(static_cast<double>(i));
        const double next = std::max(lambda - step * unit * g, lambda_min);
        if (std::abs(next - lambda) / lambda0 < opt.tol) {
            lambda = next;
            res.converged = true;
            break;
        }
        lambda = next;
    }
    res.iterations = std::min(i, opt.max_iterations);

    // meet the budget exactly by shifting the water level: spread the
    // residual evenly over the active links (an equal additive shift keeps
    // the level common across them)
    double residual = budget_w - total_power(best_lambda);
    for (int pass = 0; pass < 16 && residual != 0.0; ++pass) {
        int active = 0;
        for (double v : p)
            if (v > 0.0) ++active;
        if (active == 0) break;
        const double shift = residual / active;
        residual = 0.0;
        for (double& v : p) {
            if (v <= 0.0) continue;
            v += shift;
            if (v < 0.0) {
                residual += v;
                v = 0.0;
            }
        }
    }
    res.p = p;
    res.lambda = best_lambda;
    return res;
}

/// Optimal powers for a fixed association via per-UAV Lagrangian duals.
/// UAVs without associated users are skipped (all-zero power).
inline PowerAllocation subgradient_solve(const Scenario& s, const Association& assoc,
                                         const AccessChannel& access, const RateTable& rates,
                                         const SubgradientOptions& opt = {},
                                         DualState* dual_out = nullptr) {
    validate_association(assoc);
    const int L = s.num_uavs(), U = s.num_users(), N = s.num_rbs();
    PowerAllocation out(L, U, N);
    if (dual_out) {
        dual_out->lambda.assign(L, 0.0);
        dual_out->mu.assign(L, 1.0);
        dual_out->iterations.assign(L, 0);
        dual_out->converged.assign(L, 1);
        dual_out->all_converged = true;
    }
    for (int l = 0; l < L; ++l) {
        std::vector<double> gains;
        std::vector<std::pair<int, int>> links;
        for (int u = 0; u < U; ++u)
            for (int n = 0; n < N; ++n)
                if (assoc.serves(l, u, n)) {
                    gains.push_back(access.gain(l, u));
                    links.push_back({u, n});
                }
        if (gains.empty()) continue;
        const auto r = subgradient_waterfill(gains, s.peak_power_w[l], s.radio.rb_bandwidth_hz,
                                             s.radio.noise_psd_w_per_hz, opt);
        for (std::size_t k = 0; k < links.size(); ++k)
            out.at(l, links[k].first, links[k].second) = r.p[k];
        double access_sum = 0.0;
        for (std::size_t k = 0; k < links.size(); ++k)
            access_sum += access_rate(r.p[k], gains[k], s.radio.rb_bandwidth_hz,
                                      s.radio.noise_psd_w_per_hz);
        double back = 0.0;
        for (int m = 0; m < s.num_tbs(); ++m)
            if (assoc.backhauled(m, l)) back += rates.backhaul(m, l);
        out.uav_rate_bps[l] = std::min(access_sum, back);
        if (dual_out) {
            dual_out->lambda[l] = r.lambda;
            dual_out->iterations[l] = r.iterations;
            dual_out->converged[l] = r.converged ? 1 : 0;
            if (!r.converged) dual_out->all_converged = false;
        }
    }
    return out;
}

} // namespace uavtb
