#pragma once

#include "uavtb/config.hpp"
#include "uavtb/geometry.hpp"
#include "uavtb/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace uavtb {

/// Radio constants in SI units. Noise is stored as a PSD (W/Hz).
struct RadioParams {
    double carrier_freq_hz = 2.4e9;
    double light_speed_mps = 3.0e8;
    double rb_bandwidth_hz = 180e3;       // B, per resource block
    double backhaul_bandwidth_hz = 1e6;   // B0, per TB-UAV link
    double backhaul_power_w = 10.0;       // P0
    double noise_psd_w_per_hz = 0.0;      // N0
    int num_rbs = 30;                     // N
    double excess_loss_los_db = 1.0;
    double excess_loss_nlos_db = 12.0;
    double los_c1 = 9.6;
    double los_c2 = 0.29;
    double rician_k = 20.0;               // linear ratio

    void validate() const {
        if (carrier_freq_hz <= 0 || light_speed_mps <= 0 || rb_bandwidth_hz <= 0 ||
            backhaul_bandwidth_hz <= 0 || backhaul_power_w <= 0 || noise_psd_w_per_hz <= 0)
            throw std::invalid_argument("radio parameters must be positive");
        if (num_rbs < 1) throw std::invalid_argument("num_rbs must be >= 1");
        if (excess_loss_nlos_db < excess_loss_los_db)
            throw std::invalid_argument("NLoS excess loss must be >= LoS excess loss");
        if (rician_k < 0) throw std::invalid_argument("rician_k must be >= 0");
    }
};

/// One small-scale power gain per (tb, uav, rb) triple, drawn once at
/// scenario construction.
struct BackhaulFading {
    int num_tbs = 0, num_uavs = 0, num_rbs = 0;
    std::vector<double> phi; // unit-mean Rician power gains

    double at(int m, int l, int n) const {
        return phi[(static_cast<std::size_t>(m) * num_uavs + l) * num_rbs + n];
    }
    double& at(int m, int l, int n) {
        return phi[(static_cast<std::size_t>(m) * num_uavs + l) * num_rbs + n];
    }
};

/// Immutable snapshot of the world: node positions, radio constants and
/// the fading realization. Safe to share across threads once built.
struct Scenario {
    std::vector<Point3> tbs;
    std::vector<Point3> uavs;
    std::vector<Point3> users;
    RadioParams radio;
    std::vector<double> peak_power_w; // per UAV
    BackhaulFading fading;
    double area_x_m = 0.0;
    double area_y_m = 0.0;
    std::uint64_t seed = 0;

    int num_tbs() const { return static_cast<int>(tbs.size()); }
    int num_uavs() const { return static_cast<int>(uavs.size()); }
    int num_users() const { return static_cast<int>(users.size()); }
    int num_rbs() const { return radio.num_rbs; }

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.tbs == b.tbs && a.uavs == b.uavs && a.users == b.users &&
               a.peak_power_w == b.peak_power_w && a.fading.phi == b.fading.phi &&
               a.seed == b.seed;
    }
};

/// Unit-mean Rician power sample: |g|^2 with a deterministic LoS component
/// sqrt(k/(k+1)) and complex scattered component of variance 1/(k+1).
inline double sample_rician_power(double k, RngStream& rng) {
    if (k < 0.0) throw std::domain_error("rician factor must be nonnegative");
    const double los = std::sqrt(k / (k + 1.0));
    const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
    const double re = los + rng.normal(0.0, sigma);
    const double im = rng.normal(0.0, sigma);
    return re * re + im * im;
}

inline RadioParams make_radio_params(const ScenarioConfig& cfg) {
    RadioParams r;
    r.carrier_freq_hz = cfg.carrier_freq_hz;
    r.light_speed_mps = cfg.light_speed_mps;
    r.rb_bandwidth_hz = cfg.rb_bandwidth_hz;
    r.backhaul_bandwidth_hz = cfg.backhaul_bandwidth_hz;
    r.backhaul_power_w = cfg.backhaul_power_w;
    // per-RB noise power spread over one RB of bandwidth
    r.noise_psd_w_per_hz = dbm_to_watts(cfg.noise_dbm_per_rb) / cfg.rb_bandwidth_hz;
    r.num_rbs = cfg.num_rbs;
    r.excess_loss_los_db = cfg.excess_loss_los_db;
    r.excess_loss_nlos_db = cfg.excess_loss_nlos_db;
    r.los_c1 = cfg.los_c1;
    r.los_c2 = cfg.los_c2;
    r.rician_k = cfg.rician_k_linear();
    r.validate();
    return r;
}

/// Default initial UAV layout: a near-square grid over the area.
inline std::vector<Point3> default_uav_grid(const ScenarioConfig& cfg) {
    std::vector<Point3> out;
    const int l_count = cfg.num_uavs;
    int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(l_count))));
    int rows = (l_count + cols - 1) / cols;
    for (int i = 0; i < l_count; ++i) {
        const int cx = i % cols;
        const int cy = i / cols;
        out.push_back({cfg.area_x_m * (cx + 0.5) / cols,
                       cfg.area_y_m * (cy + 0.5) / rows,
                       cfg.uav_altitude_m});
    }
    (void)rows;
    return out;
}

/// Build a scenario from a config and master seed. Pure: the same
/// (config, seed) pair always yields an identical scenario. User
/// placement and fading use independent substreams of the seed.
inline Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Scenario s;
    s.seed = seed;
    s.area_x_m = cfg.area_x_m;
    s.area_y_m = cfg.area_y_m;
    s.radio = make_radio_params(cfg);
    s.tbs = cfg.tb_positions;

    if (cfg.uav_initial_positions.empty()) {
        s.uavs = default_uav_grid(cfg);
    } else {
        s.uavs = cfg.uav_initial_positions;
        for (auto& p : s.uavs) p.z = cfg.uav_altitude_m;
    }

    RngStream users_rng(seed, "user-placement");
    s.users.reserve(cfg.num_users);
    for (int u = 0; u < cfg.num_users; ++u) {
        const double x = users_rng.uniform(0.0, cfg.area_x_m);
        const double y = users_rng.uniform(0.0, cfg.area_y_m);
        s.users.push_back({x, y, 0.0});
    }

    s.peak_power_w.assign(cfg.num_uavs, dbm_to_watts(cfg.peak_power_dbm));

    RngStream fading_rng(seed, "backhaul-fading");
    s.fading.num_tbs = cfg.num_tbs;
    s.fading.num_uavs = cfg.num_uavs;
    s.fading.num_rbs = cfg.num_rbs;
    s.fading.phi.resize(static_cast<std::size_t>(cfg.num_tbs) * cfg.num_uavs * cfg.num_rbs);
    for (int m = 0; m < cfg.num_tbs; ++m)
        for (int l = 0; l < cfg.num_uavs; ++l)
            for (int n = 0; n < cfg.num_rbs; ++n)
                s.fading.at(m, l, n) = sample_rician_power(s.radio.rician_k, fading_rng);

    return s;
}

inline Scenario generate_scenario(const ScenarioConfig& cfg) {
    return generate_scenario(cfg, cfg.seed);
}

} // namespace uavtb
