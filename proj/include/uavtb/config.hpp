#pragma once

#include "uavtb/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavtb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Everything needed to build a scenario. Defaults follow the reference
/// setup: 20 users in a 1000 m x 1000 m area, 4 UAVs at 100 m, two
/// balloons at opposite edges, 30 resource blocks of 180 kHz at 2.4 GHz.
struct ScenarioConfig {
    int num_users = 20;
    int num_uavs = 4;
    int num_tbs = 2;
    int num_rbs = 30;

    double area_x_m = 1000.0;
    double area_y_m = 1000.0;

    std::vector<Point3> tb_positions = {{0.0, 500.0, 200.0}, {1000.0, 500.0, 200.0}};
    double uav_altitude_m = 100.0;
    /// Optional explicit initial UAV x/y positions; when empty, UAVs start
    /// on a uniform grid over the area.
    std::vector<Point3> uav_initial_positions;

    double carrier_freq_hz = 2.4e9;
    double light_speed_mps = 3.0e8;
    double rb_bandwidth_hz = 180e3;
    double backhaul_bandwidth_hz = 1e6;
    double backhaul_power_w = 10.0;
    /// Noise power per resource block; converted to a PSD internally so
    /// that bandwidth * PSD reproduces this number for one RB.
    double noise_dbm_per_rb = -110.0;
    double peak_power_dbm = 30.0;
    double excess_loss_los_db = 1.0;
    double excess_loss_nlos_db = 12.0;
    double los_c1 = 9.6;
    double los_c2 = 0.29;
    double rician_k = 20.0;
    bool rician_k_in_db = false;

    std::uint64_t seed = 1;

    double rician_k_linear() const {
        return rician_k_in_db ? db_to_linear(rician_k) : rician_k;
    }

    void validate() const {
        if (num_users < 1 || num_uavs < 1 || num_tbs < 1 || num_rbs < 1)
            throw ConfigError("node and RB counts must be positive");
        if (area_x_m <= 0.0 || area_y_m <= 0.0)
            throw ConfigError("area dimensions must be positive");
        if (static_cast<int>(tb_positions.size()) != num_tbs)
            throw ConfigError("tb_positions length must equal num_tbs");
        for (const auto& p : tb_positions)
            if (p.z <= 0.0) throw ConfigError("TB altitude must be positive");
        if (uav_altitude_m <= 0.0) throw ConfigError("UAV altitude must be positive");
        if (!uav_initial_positions.empty() &&
            static_cast<int>(uav_initial_positions.size()) != num_uavs)
            throw ConfigError("uav_initial_positions length must equal num_uavs");
        if (carrier_freq_hz <= 0.0 || light_speed_mps <= 0.0 || rb_bandwidth_hz <= 0.0 ||
            backhaul_bandwidth_hz <= 0.0 || backhaul_power_w <= 0.0)
            throw ConfigError("radio parameters must be positive");
        if (excess_loss_nlos_db < excess_loss_los_db)
            throw ConfigError("excess_loss_nlos_db must be >= excess_loss_los_db");
        if (los_c1 <= 0.0 || los_c2 <= 0.0) throw ConfigError("los constants must be positive");
        if (rician_k_linear() < 0.0) throw ConfigError("rician_k must be nonnegative");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline Point3 parse_point(const std::string& text) {
    std::istringstream in(text);
    Point3 p;
    char c1 = 0, c2 = 0;
    if (!(in >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',')
        throw ConfigError("expected point as x,y,z: '" + text + "'");
    return p;
}

inline std::vector<Point3> parse_point_list(const std::string& text) {
    std::vector<Point3> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ';')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_point(item));
    }
    return out;
}

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("expected boolean, got '" + v + "'");
}

} // namespace detail

/// Parse a scenario config from `key = value` lines. '#' starts a comment.
/// Unknown keys are rejected so typos never pass silently.
inline ScenarioConfig parse_scenario_config(std::istream& in) {
    ScenarioConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        try {
            if (key == "num_users") cfg.num_users = std::stoi(val);
            else if (key == "num_uavs") cfg.num_uavs = std::stoi(val);
            else if (key == "num_tbs") cfg.num_tbs = std::stoi(val);
            else if (key == "num_rbs") cfg.num_rbs = std::stoi(val);
            else if (key == "area_x_m") cfg.area_x_m = std::stod(val);
            else if (key == "area_y_m") cfg.area_y_m = std::stod(val);
            else if (key == "tb_positions") cfg.tb_positions = detail::parse_point_list(val);
            else if (key == "uav_altitude_m") cfg.uav_altitude_m = std::stod(val);
            else if (key == "uav_initial_positions")
                cfg.uav_initial_positions = detail::parse_point_list(val);
            else if (key == "carrier_freq_hz") cfg.carrier_freq_hz = std::stod(val);
            else if (key == "light_speed_mps") cfg.light_speed_mps = std::stod(val);
            else if (key == "rb_bandwidth_hz") cfg.rb_bandwidth_hz = std::stod(val);
            else if (key == "backhaul_bandwidth_hz") cfg.backhaul_bandwidth_hz = std::stod(val);
            else if (key == "backhaul_power_w") cfg.backhaul_power_w = std::stod(val);
            else if (key == "noise_dbm_per_rb") cfg.noise_dbm_per_rb = std::stod(val);
            else if (key == "peak_power_dbm") cfg.peak_power_dbm = std::stod(val);
            else if (key == "excess_loss_los_db") cfg.excess_loss_los_db = std::stod(val);
            else if (key == "excess_loss_nlos_db") cfg.excess_loss_nlos_db = std::stod(val);
            else if (key == "los_c1") cfg.los_c1 = std::stod(val);
            else if (key == "los_c2") cfg.los_c2 = std::stod(val);
            else if (key == "rician_k") cfg.rician_k = std::stod(val);
            else if (key == "rician_k_in_db") cfg.rician_k_in_db = detail::parse_bool(val);
            else if (key == "seed") cfg.seed = std::stoull(val);
            else throw ConfigError("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ConfigError("line " + std::to_string(line_no) + ": bad value for " + key);
        } catch (const std::out_of_range&) {
            throw ConfigError("line " + std::to_string(line_no) + ": value out of range for " + key);
        }
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_scenario_config(in);
}

} // namespace uavtb
