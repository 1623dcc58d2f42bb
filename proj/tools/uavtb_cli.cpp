// Command-line front end: single runs, Monte Carlo sweeps, convergence
// traces, placement snapshots and the oracle verification suite.

#include "uavtb/uavtb.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace uavtb;

namespace {

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 1;
    bool seed_set = false;
    int trials = 50;
    std::string out_dir = ".";
    std::string strategy = "proposed";
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_trials = true) {
    cmd->add_option("--config", a.config_path, "scenario config file (key = value lines)");
    cmd->add_option("--seed", a.seed, "master seed")->each([&](const std::string&) {
        a.seed_set = true;
    });
    if (with_trials) cmd->add_option("--trials", a.trials, "Monte Carlo trials per sweep point");
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--strategy", a.strategy,
                    "proposed | assoc_uniform_power | random_assoc_uniform_power");
    cmd->add_option("--workers", a.workers, "worker threads (0 = hardware parallelism)");
}

ScenarioConfig load_config(const CommonArgs& a) {
    ScenarioConfig cfg = a.config_path.empty() ? ScenarioConfig{} : load_scenario_config(a.config_path);
    if (a.seed_set) cfg.seed = a.seed;
    return cfg;
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int run_sweep(const CommonArgs& args, const std::string& sweep_var,
              std::vector<double> values) {
    ExperimentSpec spec;
    spec.config = load_config(args);
    spec.sweep_var = sweep_var;
    spec.sweep_values = std::move(values);
    spec.strategy = parse_strategy(args.strategy);
    spec.trials = args.trials;
    spec.master_seed = spec.config.seed;

    const RunRecord rec = sweep(spec, resolve_workers(args.workers));
    fs::create_directories(args.out_dir);
    const std::string base = args.out_dir + "/sweep_" + sweep_var + "_" + args.strategy;
    write_csv(rec, base + ".csv");
    write_summary_json(spec, rec, base + ".json");
    std::cout << "spec_hash=" << rec.hash << "\n";
    for (const auto& a : rec.aggregates)
        std::cout << sweep_var << "=" << a.sweep_value << " mean_bps=" << a.mean_bps
                  << " stderr_bps=" << a.stderr_bps << "\n";
    std::cout << "wrote " << base << ".csv and .json\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV-with-tethered-balloon downlink throughput optimizer"};
    app.require_subcommand(1);

    CommonArgs run_args, sp_args, sb_args, conv_args, snap_args, verify_args;

    auto* cmd_run = app.add_subcommand("run", "optimize one scenario and print the result");
    add_common(cmd_run, run_args, false);

    auto* cmd_sp = app.add_subcommand("sweep-power", "sweep the UAV peak transmit power (dBm)");
    add_common(cmd_sp, sp_args);
    std::vector<double> power_values{20, 25, 30, 35, 40};
    cmd_sp->add_option("--values", power_values, "sweep values in dBm");

    auto* cmd_sb =
        app.add_subcommand("sweep-bandwidth", "sweep the backhaul bandwidth B0 (Hz)");
    add_common(cmd_sb, sb_args);
    std::vector<double> bw_values{1e5, 2.5e5, 5e5, 1e6, 2e6, 4e6};
    cmd_sb->add_option("--values", bw_values, "sweep values in Hz");

    auto* cmd_conv = app.add_subcommand("convergence", "emit the placement iteration trace");
    add_common(cmd_conv, conv_args, false);

    auto* cmd_snap =
        app.add_subcommand("snapshot", "dump final positions and associations as JSON");
    add_common(cmd_snap, snap_args, false);

    auto* cmd_verify = app.add_subcommand("verify", "run the oracle cross-check suite");
    add_common(cmd_verify, verify_args, false);
    int verify_count = 50;
    cmd_verify->add_option("--count", verify_count, "instances per suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            const ScenarioConfig cfg = load_config(run_args);
            const Scenario s = generate_scenario(cfg);
            const StrategyResult r = run_strategy(s, parse_strategy(run_args.strategy));
            std::cout << "total_bps=" << r.value.total_bps << "\n";
            for (std::size_t l = 0; l < r.value.per_uav_bps.size(); ++l)
                std::cout << "uav" << l << "_bps=" << r.value.per_uav_bps[l] << " pos=("
                          << r.placement.positions[l].x << "," << r.placement.positions[l].y
                          << "," << r.placement.positions[l].z << ")\n";
            std::cout << "placement_iterations=" << r.placement.iterations
                      << " converged=" << (r.placement.converged ? "yes" : "no") << "\n";
            return 0;
        }
        if (cmd_sp->parsed()) return run_sweep(sp_args, "peak_power_dbm", power_values);
        if (cmd_sb->parsed()) return run_sweep(sb_args, "backhaul_bandwidth_hz", bw_values);
        if (cmd_conv->parsed()) {
            const ScenarioConfig cfg = load_config(conv_args);
            const Scenario s = generate_scenario(cfg);
            const StrategyResult r = run_strategy(s, parse_strategy(conv_args.strategy));
            fs::create_directories(conv_args.out_dir);
            const std::string path = conv_args.out_dir + "/convergence.csv";
            write_trace_csv(r.placement.trace, path);
            std::cout << "iterations=" << r.placement.iterations
                      << " converged=" << (r.placement.converged ? "yes" : "no")
                      << " total_bps=" << r.value.total_bps << "\nwrote " << path << "\n";
            return 0;
        }
        if (cmd_snap->parsed()) {
            const ScenarioConfig cfg = load_config(snap_args);
            const Scenario s = generate_scenario(cfg);
            const StrategyResult r = run_strategy(s, parse_strategy(snap_args.strategy));
            fs::create_directories(snap_args.out_dir);
            const std::string path = snap_args.out_dir + "/snapshot.json";
            write_snapshot_json(s, r, path);
            std::cout << "total_bps=" << r.value.total_bps << "\nwrote " << path << "\n";
            return 0;
        }
        if (cmd_verify->parsed()) {
            const std::uint64_t seed = verify_args.seed_set ? verify_args.seed : 1;
            bool all_pass = true;
            auto print = [&](const std::vector<OracleReport>& reports) {
                for (const auto& r : reports) {
                    std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.check << " ["
                              << r.instance << "] oracle=" << r.oracle_value
                              << " candidate=" << r.candidate_value << " rel_gap=" << r.rel_gap
                              << "\n";
                    all_pass = all_pass && r.pass;
                }
            };
            print(verify_association_suite(verify_count, seed));
            print(verify_power_suite(verify_count, seed));
            print(verify_placement_suite(std::min(verify_count, 10), seed));
            std::cout << (all_pass ? "verification passed" : "verification FAILED") << "\n";
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
