#pragma once

#include "uavtb/geometry.hpp"
#include "uavtb/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace uavtb {

/// LoS probability as a logistic function of the elevation angle in degrees.
inline double los_probability_from_angle(double theta_deg, double c1, double c2) {
    return 1.0 / (1.0 + c1 * std::exp(-c2 * (theta_deg - c1)));
}

inline double los_probability(const Point3& uav, const Point3& user, double c1, double c2) {
    if (uav.z <= 0.0) throw std::domain_error("UAV altitude must be positive");
    return los_probability_from_angle(elevation_angle_deg(uav, user), c1, c2);
}

/// Squared free-space loss term (4 pi d f / C)^2.
inline double fspl_squared(double dist_m, double freq_hz, double light_speed) {
    const double t = 4.0 * M_PI * dist_m * freq_hz / light_speed;
    return t * t;
}

/// Average access-link path loss: LoS/NLoS free-space losses with their
/// excess-loss factors, mixed by the LoS probability. Linear, >= 1 scale.
inline double access_path_loss(const Point3& uav, const Point3& user, const RadioParams& radio) {
    const double d = distance(uav, user);
    if (d <= 0.0) throw std::domain_error("access path loss undefined at zero distance");
    const double fspl = fspl_squared(d, radio.carrier_freq_hz, radio.light_speed_mps);
    const double pl_los = db_to_linear(radio.excess_loss_los_db) * fspl;
    const double pl_nlos = db_to_linear(radio.excess_loss_nlos_db) * fspl;
    const double p = los_probability(uav, user, radio.los_c1, radio.los_c2);
    return p * pl_los + (1.0 - p) * pl_nlos;
}

/// Access channel power gain: reciprocal of the averaged path loss.
inline double access_gain(const Point3& uav, const Point3& user, const RadioParams& radio) {
    return 1.0 / access_path_loss(uav, user, radio);
}

/// Backhaul channel power gain: squared free-space loss inverse times the
/// Rician small-scale power gain phi.
inline double backhaul_gain(const Point3& tb, const Point3& uav, double phi,
                            const RadioParams& radio) {
    const double d = distance(tb, uav);
    if (d <= 0.0) throw std::domain_error("backhaul gain undefined at zero distance");
    if (phi <= 0.0) throw std::domain_error("fading gain must be positive");
    return phi / fspl_squared(d, radio.carrier_freq_hz, radio.light_speed_mps);
}

/// Per-(uav, user) access gains. The gain is frequency-flat across RBs, so
/// one value per link is stored; the RB-indexed accessor is kept for
/// interface uniformity.
struct AccessChannel {
    int num_uavs = 0, num_users = 0, num_rbs = 0;
    std::vector<double> gains; // indexed l * num_users + u

    double gain(int l, int u) const { return gains[static_cast<std::size_t>(l) * num_users + u]; }
    double gain(int l, int u, int /*n*/) const { return gain(l, u); }
};

/// Per-(tb, uav) backhaul gains with per-RB fading, plus the scalar link
/// gain used by the wideband backhaul rate (fading averaged over RBs).
struct BackhaulChannel {
    int num_tbs = 0, num_uavs = 0, num_rbs = 0;
    std::vector<double> rb_gains;   // indexed (m * num_uavs + l) * num_rbs + n
    std::vector<double> link_gains; // indexed m * num_uavs + l

    double gain(int m, int l, int n) const {
        return rb_gains[(static_cast<std::size_t>(m) * num_uavs + l) * num_rbs + n];
    }
    double link_gain(int m, int l) const {
        return link_gains[static_cast<std::size_t>(m) * num_uavs + l];
    }
};

inline AccessChannel build_access_channel(const Scenario& s) {
    AccessChannel ch;
    ch.num_uavs = s.num_uavs();
    ch.num_users = s.num_users();
    ch.num_rbs = s.num_rbs();
    ch.gains.resize(static_cast<std::size_t>(ch.num_uavs) * ch.num_users);
    for (int l = 0; l < ch.num_uavs; ++l)
        for (int u = 0; u < ch.num_users; ++u)
            ch.gains[static_cast<std::size_t>(l) * ch.num_users + u] =
                access_gain(s.uavs[l], s.users[u], s.radio);
    return ch;
}

inline BackhaulChannel build_backhaul_channel(const Scenario& s) {
    BackhaulChannel ch;
    ch.num_tbs = s.num_tbs();
    ch.num_uavs = s.num_uavs();
    ch.num_rbs = s.num_rbs();
    ch.rb_gains.resize(static_cast<std::size_t>(ch.num_tbs) * ch.num_uavs * ch.num_rbs);
    ch.link_gains.resize(static_cast<std::size_t>(ch.num_tbs) * ch.num_uavs);
    for (int m = 0; m < ch.num_tbs; ++m) {
        for (int l = 0; l < ch.num_uavs; ++l) {
            double phi_sum = 0.0;
            for (int n = 0; n < ch.num_rbs; ++n) {
                const double phi = s.fading.at(m, l, n);
                ch.rb_gains[(static_cast<std::size_t>(m) * ch.num_uavs + l) * ch.num_rbs + n] =
                    backhaul_gain(s.tbs[m], s.uavs[l], phi, s.radio);
                phi_sum += phi;
            }
            ch.link_gains[static_cast<std::size_t>(m) * ch.num_uavs + l] =
                backhaul_gain(s.tbs[m], s.uavs[l], phi_sum / ch.num_rbs, s.radio);
        }
    }
    return ch;
}

} // namespace uavtb
