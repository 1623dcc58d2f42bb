#pragma once

#include "uavtb/channel.hpp"
#include "uavtb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavtb {

struct ConstraintViolation : std::runtime_error {
    ConstraintViolation(std::string which, int index)
        : std::runtime_error("association violates " + which + " constraint at index " +
                             std::to_string(index)),
          constraint(std::move(which)), index(index) {}
    std::string constraint;
    int index;
};

/// Binary association: user-to-UAV-per-RB and UAV-to-TB.
struct Association {
    int num_uavs = 0, num_users = 0, num_rbs = 0, num_tbs = 0;
    std::vector<std::uint8_t> user_assign; // (l, u, n): user u served by UAV l on RB n
    std::vector<std::uint8_t> tb_assign;   // (m, l): UAV l backhauled by TB m

    Association() = default;
    Association(int L, int U, int N, int M)
        : num_uavs(L), num_users(U), num_rbs(N), num_tbs(M),
          user_assign(static_cast<std::size_t>(L) * U * N, 0),
          tb_assign(static_cast<std::size_t>(M) * L, 0) {}

    std::size_t eidx(int l, int u, int n) const {
        return (static_cast<std::size_t>(l) * num_users + u) * num_rbs + n;
    }
    std::size_t tidx(int m, int l) const { return static_cast<std::size_t>(m) * num_uavs + l; }

    bool serves(int l, int u, int n) const { return user_assign[eidx(l, u, n)] != 0; }
    void set_serves(int l, int u, int n, bool v) { user_assign[eidx(l, u, n)] = v ? 1 : 0; }
    bool backhauled(int m, int l) const { return tb_assign[tidx(m, l)] != 0; }
    void set_backhauled(int m, int l, bool v) { tb_assign[tidx(m, l)] = v ? 1 : 0; }

    /// TB serving UAV l, or -1 if none.
    int tb_of(int l) const {
        for (int m = 0; m < num_tbs; ++m)
            if (backhauled(m, l)) return m;
        return -1;
    }
};

/// Independent feasibility check; throws naming the violated constraint.
/// Each user holds at most one (UAV, RB), each RB serves at most one link
/// network-wide, each UAV has exactly one TB.
inline void validate_association(const Association& a) {
    for (int u = 0; u < a.num_users; ++u) {
        int count = 0;
        for (int l = 0; l < a.num_uavs; ++l)
            for (int n = 0; n < a.num_rbs; ++n) count += a.serves(l, u, n);
        if (count > 1) throw ConstraintViolation("user-single-assignment", u);
    }
    for (int n = 0; n < a.num_rbs; ++n) {
        int count = 0;
        for (int l = 0; l < a.num_uavs; ++l)
            for (int u = 0; u < a.num_users; ++u) count += a.serves(l, u, n);
        if (count > 1) throw ConstraintViolation("rb-single-use", n);
    }
    for (int l = 0; l < a.num_uavs; ++l) {
        int count = 0;
        for (int m = 0; m < a.num_tbs; ++m) count += a.backhauled(m, l);
        if (count != 1) throw ConstraintViolation("uav-single-tb", l);
    }
}

/// Transmit powers per (l, u, n) plus the per-UAV end-to-end rate achieved
/// with them.
struct PowerAllocation {
    int num_uavs = 0, num_users = 0, num_rbs = 0;
    std::vector<double> p_w;          // watts, indexed like Association::user_assign
    std::vector<double> uav_rate_bps; // achieved per-UAV rate

    PowerAllocation() = default;
    PowerAllocation(int L, int U, int N)
        : num_uavs(L), num_users(U), num_rbs(N),
          p_w(static_cast<std::size_t>(L) * U * N, 0.0), uav_rate_bps(L, 0.0) {}

    std::size_t idx(int l, int u, int n) const {
        return (static_cast<std::size_t>(l) * num_users + u) * num_rbs + n;
    }
    double at(int l, int u, int n) const { return p_w[idx(l, u, n)]; }
    double& at(int l, int u, int n) { return p_w[idx(l, u, n)]; }
};

/// Shannon rate of one access RB.
inline double access_rate(double power_w, double gain, double bandwidth_hz,
                          double noise_psd_w_per_hz) {
    if (power_w < 0.0) throw std::domain_error("power must be nonnegative");
    if (power_w == 0.0) return 0.0;
    const double snr = power_w * gain / (bandwidth_hz * noise_psd_w_per_hz);
    return bandwidth_hz * std::log2(1.0 + snr);
}

/// Wideband backhaul rate of one TB-UAV link with the fixed uniform budget.
inline double backhaul_rate(double link_gain, const RadioParams& radio) {
    const double snr = radio.backhaul_power_w * link_gain /
                       (radio.backhaul_bandwidth_hz * radio.noise_psd_w_per_hz);
    return radio.backhaul_bandwidth_hz * std::log2(1.0 + snr);
}

/// Access rates per (l, u, n) for given powers, plus backhaul rates per (m, l).
struct RateTable {
    int num_uavs = 0, num_users = 0, num_rbs = 0, num_tbs = 0;
    std::vector<double> access_bps;   // (l, u, n)
    std::vector<double> backhaul_bps; // (m, l)

    double access(int l, int u, int n) const {
        return access_bps[(static_cast<std::size_t>(l) * num_users + u) * num_rbs + n];
    }
    double backhaul(int m, int l) const {
        return backhaul_bps[static_cast<std::size_t>(m) * num_uavs + l];
    }
    double best_backhaul_of(int l) const {
        double best = 0.0;
        for (int m = 0; m < num_tbs; ++m) best = std::max(best, backhaul(m, l));
        return best;
    }
};

inline RateTable compute_rates(const Scenario& s, const AccessChannel& access,
                               const BackhaulChannel& back, const PowerAllocation& power) {
    RateTable t;
    t.num_uavs = s.num_uavs();
    t.num_users = s.num_users();
    t.num_rbs = s.num_rbs();
    t.num_tbs = s.num_tbs();
    t.access_bps.resize(static_cast<std::size_t>(t.num_uavs) * t.num_users * t.num_rbs);
    for (int l = 0; l < t.num_uavs; ++l)
        for (int u = 0; u < t.num_users; ++u)
            for (int n = 0; n < t.num_rbs; ++n)
                t.access_bps[(static_cast<std::size_t>(l) * t.num_users + u) * t.num_rbs + n] =
                    access_rate(power.at(l, u, n), access.gain(l, u), s.radio.rb_bandwidth_hz,
                                s.radio.noise_psd_w_per_hz);
    t.backhaul_bps.resize(static_cast<std::size_t>(t.num_tbs) * t.num_uavs);
    for (int m = 0; m < t.num_tbs; ++m)
        for (int l = 0; l < t.num_uavs; ++l)
            t.backhaul_bps[static_cast<std::size_t>(m) * t.num_uavs + l] =
                backhaul_rate(back.link_gain(m, l), s.radio);
    return t;
}

/// Uniform allocation: peak power split evenly over all N RBs, applied on
/// associated links only (or on every link when assoc is null, for rate
/// tables that feed the association solver).
inline PowerAllocation uniform_power(const Scenario& s, const Association* assoc = nullptr) {
    PowerAllocation p(s.num_uavs(), s.num_users(), s.num_rbs());
    for (int l = 0; l < s.num_uavs(); ++l) {
        const double per_rb = s.peak_power_w[l] / s.num_rbs();
        for (int u = 0; u < s.num_users(); ++u)
            for (int n = 0; n < s.num_rbs(); ++n)
                if (assoc == nullptr || assoc->serves(l, u, n)) p.at(l, u, n) = per_rb;
    }
    return p;
}

struct EndToEndValue {
    std::vector<double> per_uav_bps;
    double total_bps = 0.0;
};

/// End-to-end throughput: per UAV, the access sum capped by the assigned
/// backhaul rate; summed over UAVs. Validates the association first.
inline EndToEndValue end_to_end(const Association& assoc, const RateTable& rates) {
    validate_association(assoc);
    EndToEndValue v;
    v.per_uav_bps.assign(assoc.num_uavs, 0.0);
    for (int l = 0; l < assoc.num_uavs; ++l) {
        double access_sum = 0.0;
        for (int u = 0; u < assoc.num_users; ++u)
            for (int n = 0; n < assoc.num_rbs; ++n)
                if (assoc.serves(l, u, n)) access_sum += rates.access(l, u, n);
        double back = 0.0;
        for (int m = 0; m < assoc.num_tbs; ++m)
            if (assoc.backhauled(m, l)) back += rates.backhaul(m, l);
        v.per_uav_bps[l] = std::min(access_sum, back);
        v.total_bps += v.per_uav_bps[l];
    }
    return v;
}

/// Check the per-UAV power budget for a given association.
inline void validate_power_budget(const Scenario& s, const Association& assoc,
                                  const PowerAllocation& power, double rel_tol = 1e-9) {
    for (int l = 0; l < s.num_uavs(); ++l) {
        double sum = 0.0;
        for (int u = 0; u < s.num_users(); ++u)
            for (int n = 0; n < s.num_rbs(); ++n)
                if (assoc.serves(l, u, n)) sum += power.at(l, u, n);
        if (sum > s.peak_power_w[l] * (1.0 + rel_tol))
            throw ConstraintViolation("peak-power", l);
    }
}

} // namespace uavtb
