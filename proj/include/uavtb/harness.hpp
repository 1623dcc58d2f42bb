#pragma once

#include "uavtb/config.hpp"
#include "uavtb/oracles.hpp"
#include "uavtb/placement.hpp"
#include "uavtb/rng.hpp"
#include "uavtb/scenario.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace uavtb {

enum class Strategy {
    Proposed,              // placement + MILP association + dual power
    AssocUniformPower,     // placement + MILP association, uniform power
    RandomAssocUniformPower // placement only, random association, uniform power
};

inline std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Proposed: return "proposed";
        case Strategy::AssocUniformPower: return "assoc_uniform_power";
        case Strategy::RandomAssocUniformPower: return "random_assoc_uniform_power";
    }
    throw std::logic_error("unknown strategy");
}

inline Strategy parse_strategy(const std::string& name) {
    if (name == "proposed") return Strategy::Proposed;
    if (name == "assoc_uniform_power") return Strategy::AssocUniformPower;
    if (name == "random_assoc_uniform_power") return Strategy::RandomAssocUniformPower;
    throw ConfigError("unknown strategy '" + name + "'");
}

/// Feasibility-respecting uniform-random association: users draw a
/// (UAV, RB) pair sequentially with rejection on occupied RBs; each UAV
/// draws a TB uniformly.
inline Association random_association(const Scenario& s, RngStream& rng) {
    const int L = s.num_uavs(), U = s.num_users(), N = s.num_rbs(), M = s.num_tbs();
    Association a(L, U, N, M);
    std::vector<std::uint8_t> rb_used(N, 0);
    for (int u = 0; u < U; ++u) {
        for (int attempt = 0; attempt < 64 * N; ++attempt) {
            const int l = static_cast<int>(rng.below(L));
            const int n = static_cast<int>(rng.below(N));
            if (rb_used[n]) continue;
            rb_used[n] = 1;
            a.set_serves(l, u, n, true);
            break;
        }
    }
    for (int l = 0; l < L; ++l) a.set_backhauled(static_cast<int>(rng.below(M)), l, true);
    validate_association(a);
    return a;
}

struct StrategyResult {
    EndToEndValue value;
    Association assoc;
    PowerAllocation power;
    PlacementState placement;
};

/// Run one strategy end to end on a scenario. The same seed drives the
/// placement candidate stream (and the random association draw), so the
/// proposed strategy and the uniform-power benchmark share placements.
inline StrategyResult run_strategy(const Scenario& scenario, Strategy strategy,
                                   const PlacementOptions& base_opt = {}) {
    PlacementOptions opt = base_opt;
    try {
        PlacementResult pr;
        switch (strategy) {
            case Strategy::Proposed: {
                opt.refine_final_power = true;
                pr = optimize_placement(scenario, opt, scenario.seed);
                break;
            }
            case Strategy::AssocUniformPower: {
                opt.refine_final_power = false;
                pr = optimize_placement(scenario, opt, scenario.seed);
                break;
            }
            case Strategy::RandomAssocUniformPower: {
                opt.refine_final_power = false;
                RngStream rng(scenario.seed, "random-association");
                const Association a = random_association(scenario, rng);
                pr = optimize_placement(scenario, opt, scenario.seed, &a);
                break;
            }
        }
        return {pr.value, pr.assoc, pr.power, pr.state};
    } catch (const std::exception& e) {
        throw std::runtime_error("strategy " + to_string(strategy) + " failed: " + e.what());
    }
}

struct ExperimentSpec {
    ScenarioConfig config;
    std::string sweep_var = "peak_power_dbm"; // or "backhaul_bandwidth_hz"
    std::vector<double> sweep_values;
    Strategy strategy = Strategy::Proposed;
    int trials = 50;
    std::uint64_t master_seed = 1;
    PlacementOptions placement; // not serialized; defaults everywhere

    void validate() const {
        config.validate();
        if (sweep_var != "peak_power_dbm" && sweep_var != "backhaul_bandwidth_hz")
            throw ConfigError("sweep_var must be peak_power_dbm or backhaul_bandwidth_hz");
        if (sweep_values.empty()) throw ConfigError("sweep_values must be nonempty");
        for (std::size_t i = 1; i < sweep_values.size(); ++i)
            if (sweep_values[i] <= sweep_values[i - 1])
                throw ConfigError("sweep_values must be strictly increasing");
        if (trials < 1) throw ConfigError("trials must be >= 1");
    }
};

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

inline std::string canonical_spec_string(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << std::setprecision(17);
    const ScenarioConfig& c = spec.config;
    out << "users=" << c.num_users << ";uavs=" << c.num_uavs << ";tbs=" << c.num_tbs
        << ";rbs=" << c.num_rbs << ";area=" << c.area_x_m << "," << c.area_y_m << ";tb_pos=";
    for (const auto& p : c.tb_positions) out << p.x << "," << p.y << "," << p.z << "|";
    out << ";alt=" << c.uav_altitude_m << ";uav0=";
    for (const auto& p : c.uav_initial_positions) out << p.x << "," << p.y << "," << p.z << "|";
    out << ";fc=" << c.carrier_freq_hz << ";cl=" << c.light_speed_mps
        << ";b=" << c.rb_bandwidth_hz << ";b0=" << c.backhaul_bandwidth_hz
        << ";p0=" << c.backhaul_power_w << ";noise=" << c.noise_dbm_per_rb
        << ";peak=" << c.peak_power_dbm << ";xi=" << c.excess_loss_los_db << ","
        << c.excess_loss_nlos_db << ";c1=" << c.los_c1 << ";c2=" << c.los_c2
        << ";k=" << c.rician_k << "," << (c.rician_k_in_db ? 1 : 0) << ";cfgseed=" << c.seed
        << ";sweep=" << spec.sweep_var << ";values=";
    for (double v : spec.sweep_values) out << v << "|";
    out << ";strategy=" << to_string(spec.strategy) << ";trials=" << spec.trials
        << ";seed=" << spec.master_seed;
    return out.str();
}

} // namespace detail

inline std::string spec_hash(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0')
        << fnv1a64(detail::canonical_spec_string(spec));
    return out.str();
}

struct RunRow {
    std::string sweep_var;
    double sweep_value = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::Proposed;
    double objective_bps = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
};

struct SweepAggregate {
    double sweep_value = 0.0;
    double mean_bps = 0.0;
    double stderr_bps = 0.0;
};

struct RunRecord {
    std::string hash;
    std::vector<RunRow> rows;
    std::vector<SweepAggregate> aggregates;
    double total_wall_ms = 0.0;
};

/// Run the full sweep: one row per (sweep value, trial). Each trial uses
/// a seed derived from the master seed and the trial index only, so the
/// same user drop and fading realization underlies every sweep value.
/// Trials run in parallel; rows are reduced in index order, so the output
/// is independent of the worker count.
inline RunRecord sweep(const ExperimentSpec& spec, int workers = 1) {
    spec.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const int n_values = static_cast<int>(spec.sweep_values.size());
    const int n_tasks = n_values * spec.trials;

    RunRecord rec;
    rec.hash = spec_hash(spec);
    rec.rows.resize(n_tasks);

    auto run_task = [&](int task) {
        const int vi = task / spec.trials;
        const int trial = task % spec.trials;
        ScenarioConfig cfg = spec.config;
        if (spec.sweep_var == "peak_power_dbm") cfg.peak_power_dbm = spec.sweep_values[vi];
        else cfg.backhaul_bandwidth_hz = spec.sweep_values[vi];
        const std::uint64_t trial_seed = derive_seed(spec.master_seed, "trial", trial);
        const Scenario scenario = generate_scenario(cfg, trial_seed);
        const auto t0 = std::chrono::steady_clock::now();
        const StrategyResult r = run_strategy(scenario, spec.strategy, spec.placement);
        const auto t1 = std::chrono::steady_clock::now();
        RunRow row;
        row.sweep_var = spec.sweep_var;
        row.sweep_value = spec.sweep_values[vi];
        row.trial = trial;
        row.seed = trial_seed;
        row.strategy = spec.strategy;
        row.objective_bps = r.value.total_bps;
        row.iterations = r.placement.iterations;
        row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        rec.rows[task] = std::move(row);
    };

    if (workers <= 1) {
        for (int task = 0; task < n_tasks; ++task) run_task(task);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int task = next.fetch_add(1); task < n_tasks; task = next.fetch_add(1))
                    run_task(task);
            });
        for (auto& t : pool) t.join();
    }

    for (int vi = 0; vi < n_values; ++vi) {
        double sum = 0.0, sum_sq = 0.0;
        for (int t = 0; t < spec.trials; ++t) {
            const double v = rec.rows[vi * spec.trials + t].objective_bps;
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / spec.trials;
        const double var =
            spec.trials > 1 ? std::max(sum_sq / spec.trials - mean * mean, 0.0) *
                                  spec.trials / (spec.trials - 1.0)
                            : 0.0;
        rec.aggregates.push_back(
            {spec.sweep_values[vi], mean, std::sqrt(var / spec.trials)});
    }
    rec.total_wall_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t_start)
                            .count();
    return rec;
}

inline std::string csv_header() {
    return "sweep_var,sweep_value,trial,seed,strategy,objective_bps,iterations,wall_ms";
}

inline std::string csv_row(const RunRow& r, bool include_wall = true) {
    std::ostringstream out;
    out << r.sweep_var << ',' << detail::format_double(r.sweep_value) << ',' << r.trial << ','
        << r.seed << ',' << to_string(r.strategy) << ','
        << detail::format_double(r.objective_bps) << ',' << r.iterations << ',';
    if (include_wall) out << detail::format_double(r.wall_ms);
    return out.str();
}

/// Atomic CSV write: the file appears complete or not at all.
inline void write_csv(const RunRecord& rec, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp);
        out << csv_header() << "\n";
        for (const auto& row : rec.rows) out << csv_row(row) << "\n";
        if (!out.good()) {
            out.close();
            std::remove(tmp.c_str());
            throw std::runtime_error("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move output into place: " + path);
    }
}

inline void to_json(nlohmann::json& j, const Point3& p) {
    j = nlohmann::json{{"x", p.x}, {"y", p.y}, {"z", p.z}};
}
inline void from_json(const nlohmann::json& j, Point3& p) {
    j.at("x").get_to(p.x);
    j.at("y").get_to(p.y);
    j.at("z").get_to(p.z);
}

inline void to_json(nlohmann::json& j, const ScenarioConfig& c) {
    j = nlohmann::json{{"num_users", c.num_users},
                       {"num_uavs", c.num_uavs},
                       {"num_tbs", c.num_tbs},
                       {"num_rbs", c.num_rbs},
                       {"area_x_m", c.area_x_m},
                       {"area_y_m", c.area_y_m},
                       {"tb_positions", c.tb_positions},
                       {"uav_altitude_m", c.uav_altitude_m},
                       {"uav_initial_positions", c.uav_initial_positions},
                       {"carrier_freq_hz", c.carrier_freq_hz},
                       {"light_speed_mps", c.light_speed_mps},
                       {"rb_bandwidth_hz", c.rb_bandwidth_hz},
                       {"backhaul_bandwidth_hz", c.backhaul_bandwidth_hz},
                       {"backhaul_power_w", c.backhaul_power_w},
                       {"noise_dbm_per_rb", c.noise_dbm_per_rb},
                       {"peak_power_dbm", c.peak_power_dbm},
                       {"excess_loss_los_db", c.excess_loss_los_db},
                       {"excess_loss_nlos_db", c.excess_loss_nlos_db},
                       {"los_c1", c.los_c1},
                       {"los_c2", c.los_c2},
                       {"rician_k", c.rician_k},
                       {"rician_k_in_db", c.rician_k_in_db},
                       {"seed", c.seed}};
}
inline void from_json(const nlohmann::json& j, ScenarioConfig& c) {
    j.at("num_users").get_to(c.num_users);
    j.at("num_uavs").get_to(c.num_uavs);
    j.at("num_tbs").get_to(c.num_tbs);
    j.at("num_rbs").get_to(c.num_rbs);
    j.at("area_x_m").get_to(c.area_x_m);
    j.at("area_y_m").get_to(c.area_y_m);
    j.at("tb_positions").get_to(c.tb_positions);
    j.at("uav_altitude_m").get_to(c.uav_altitude_m);
    j.at("uav_initial_positions").get_to(c.uav_initial_positions);
    j.at("carrier_freq_hz").get_to(c.carrier_freq_hz);
    j.at("light_speed_mps").get_to(c.light_speed_mps);
    j.at("rb_bandwidth_hz").get_to(c.rb_bandwidth_hz);
    j.at("backhaul_bandwidth_hz").get_to(c.backhaul_bandwidth_hz);
    j.at("backhaul_power_w").get_to(c.backhaul_power_w);
    j.at("noise_dbm_per_rb").get_to(c.noise_dbm_per_rb);
    j.at("peak_power_dbm").get_to(c.peak_power_dbm);
    j.at("excess_loss_los_db").get_to(c.excess_loss_los_db);
    j.at("excess_loss_nlos_db").get_to(c.excess_loss_nlos_db);
    j.at("los_c1").get_to(c.los_c1);
    j.at("los_c2").get_to(c.los_c2);
    j.at("rician_k").get_to(c.rician_k);
    j.at("rician_k_in_db").get_to(c.rician_k_in_db);
    j.at("seed").get_to(c.seed);
}

inline void to_json(nlohmann::json& j, const ExperimentSpec& spec) {
    j = nlohmann::json{{"config", spec.config},
                       {"sweep_var", spec.sweep_var},
                       {"sweep_values", spec.sweep_values},
                       {"strategy", to_string(spec.strategy)},
                       {"trials", spec.trials},
                       {"master_seed", spec.master_seed}};
}
inline void from_json(const nlohmann::json& j, ExperimentSpec& spec) {
    j.at("config").get_to(spec.config);
    j.at("sweep_var").get_to(spec.sweep_var);
    j.at("sweep_values").get_to(spec.sweep_values);
    spec.strategy = parse_strategy(j.at("strategy").get<std::string>());
    j.at("trials").get_to(spec.trials);
    j.at("master_seed").get_to(spec.master_seed);
}

/// JSON summary with the full spec and hash, sufficient to reproduce the
/// CSV exactly.
inline void write_summary_json(const ExperimentSpec& spec, const RunRecord& rec,
                               const std::string& path) {
    nlohmann::json j;
    j["spec"] = spec;
    j["spec_hash"] = rec.hash;
    nlohmann::json agg = nlohmann::json::array();
    for (const auto& a : rec.aggregates)
        agg.push_back({{"sweep_value", a.sweep_value},
                       {"mean_bps", a.mean_bps},
                       {"stderr_bps", a.stderr_bps}});
    j["aggregates"] = agg;
    j["total_wall_ms"] = rec.total_wall_ms;
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp);
        out << j.dump(2) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("cannot move output into place: " + path);
    }
}

inline ExperimentSpec load_experiment_spec(const std::string& summary_path) {
    std::ifstream in(summary_path);
    if (!in) throw std::runtime_error("cannot open summary file: " + summary_path);
    nlohmann::json j;
    in >> j;
    return j.at("spec").get<ExperimentSpec>();
}

/// Iteration trace for convergence plots.
inline void write_trace_csv(const std::vector<PlacementTracePoint>& trace,
                            const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "iteration,radius_m,objective_bps";
    if (!trace.empty())
        for (std::size_t l = 0; l < trace.front().positions.size(); ++l)
            out << ",uav" << l << "_x,uav" << l << "_y";
    out << "\n";
    for (const auto& p : trace) {
        out << p.iteration << ',' << detail::format_double(p.radius_m) << ','
            << detail::format_double(p.objective_bps);
        for (const auto& pos : p.positions)
            out << ',' << detail::format_double(pos.x) << ',' << detail::format_double(pos.y);
        out << "\n";
    }
}

/// Positions-and-association snapshot for plotting.
inline void write_snapshot_json(const Scenario& scenario, const StrategyResult& result,
                                const std::string& path) {
    nlohmann::json j;
    j["tbs"] = scenario.tbs;
    j["users"] = scenario.users;
    j["uavs"] = result.placement.positions;
    nlohmann::json links = nlohmann::json::array();
    for (int l = 0; l < result.assoc.num_uavs; ++l)
        for (int u = 0; u < result.assoc.num_users; ++u)
            for (int n = 0; n < result.assoc.num_rbs; ++n)
                if (result.assoc.serves(l, u, n))
                    links.push_back({{"uav", l}, {"user", u}, {"rb", n}});
    j["access_links"] = links;
    nlohmann::json back = nlohmann::json::array();
    for (int l = 0; l < result.assoc.num_uavs; ++l)
        back.push_back({{"uav", l}, {"tb", result.assoc.tb_of(l)}});
    j["backhaul_links"] = back;
    j["per_uav_bps"] = result.value.per_uav_bps;
    j["total_bps"] = result.value.total_bps;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace uavtb
