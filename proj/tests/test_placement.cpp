#include "uavtb/oracles.hpp"
#include "uavtb/placement.hpp"
#include "uavtb/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace uavtb;

namespace {

Scenario toy_scenario(std::uint64_t seed, int users = 3, int uavs = 1) {
    ScenarioConfig cfg;
    cfg.num_uavs = uavs;
    cfg.num_users = users;
    cfg.num_rbs = 3;
    cfg.num_tbs = 1;
    cfg.area_x_m = 300;
    cfg.area_y_m = 300;
    cfg.tb_positions = {{0, 150, 200}};
    return generate_scenario(cfg, seed);
}

} // namespace

TEST_CASE("candidate generation") {
    RngStream rng(3, "cand-test");
    const Point3 current{150, 150, 100};
    const auto cand = generate_candidates(current, 50.0, 8, 300, 300, rng);
    REQUIRE(cand.size() == 8);
    CHECK(cand[0] == current);
    for (std::size_t k = 1; k < cand.size(); ++k) {
        CHECK(cand[k].z == 100.0);
        CHECK(cand[k].x >= 0.0);
        CHECK(cand[k].x <= 300.0);
        CHECK(cand[k].y >= 0.0);
        CHECK(cand[k].y <= 300.0);
        // interior point, small radius: no clamping, so exactly on the circle
        CHECK(horizontal_distance(cand[k], current) == Catch::Approx(50.0).epsilon(1e-9));
    }
}

TEST_CASE("candidates near the border are clamped into the area") {
    RngStream rng(4, "cand-clamp");
    const auto cand = generate_candidates({5, 5, 100}, 50.0, 16, 300, 300, rng);
    for (const auto& p : cand) {
        CHECK(p.x >= 0.0);
        CHECK(p.x <= 300.0);
        CHECK(p.y >= 0.0);
        CHECK(p.y <= 300.0);
    }
}

TEST_CASE("placement search is deterministic and monotone") {
    const Scenario s = toy_scenario(21);
    PlacementOptions opt;
    opt.initial_radius_m = 75.0;
    const PlacementResult a = optimize_placement(s, opt, 7);
    const PlacementResult b = optimize_placement(s, opt, 7);
    CHECK(a.state.best_objective_bps == b.state.best_objective_bps);
    CHECK(a.state.positions == b.state.positions);
    CHECK(a.state.iterations == b.state.iterations);

    REQUIRE(a.state.trace.size() >= 2);
    for (std::size_t i = 1; i < a.state.trace.size(); ++i) {
        CHECK(a.state.trace[i].objective_bps >= a.state.trace[i - 1].objective_bps);
        // radius halves every iteration
        CHECK(a.state.trace[i].radius_m ==
              Catch::Approx(opt.initial_radius_m / std::pow(2.0, i - 1)).epsilon(1e-12));
    }
    CHECK(a.state.best_objective_bps >= a.state.trace.front().objective_bps);
}

TEST_CASE("search converges once the radius shrinks below the minimum") {
    const Scenario s = toy_scenario(22);
    PlacementOptions opt;
    opt.initial_radius_m = 75.0;
    opt.min_radius_m = 1.0;
    const PlacementResult r = optimize_placement(s, opt, 5);
    CHECK(r.state.converged);
    // 75 / 2^7 < 1, so convergence needs at most a few extra no-improvement laps
    CHECK(r.state.iterations <= 12);
    CHECK(r.state.radius_m < opt.min_radius_m);
}

TEST_CASE("a single candidate keeps the initial positions") {
    const Scenario s = toy_scenario(23);
    PlacementOptions opt;
    opt.num_candidates = 1;
    opt.initial_radius_m = 75.0;
    const PlacementResult r = optimize_placement(s, opt, 9);
    CHECK(r.state.positions == s.uavs);
    CHECK(r.state.best_objective_bps ==
          Catch::Approx(evaluate_candidate_combination(s, s.uavs)).epsilon(1e-12));
}

TEST_CASE("different seeds explore different candidates") {
    const Scenario s = toy_scenario(24);
    PlacementOptions opt;
    opt.initial_radius_m = 75.0;
    const PlacementResult a = optimize_placement(s, opt, 1);
    const PlacementResult b = optimize_placement(s, opt, 2);
    CHECK_FALSE(a.state.positions == b.state.positions);
}

TEST_CASE("joint exhaustive mode works on two UAVs") {
    const Scenario s = toy_scenario(25, 4, 2);
    PlacementOptions opt;
    opt.initial_radius_m = 75.0;
    opt.num_candidates = 3;
    opt.joint_exhaustive = true;
    opt.max_iterations = 4;
    const PlacementResult r = optimize_placement(s, opt, 3);
    CHECK(r.state.best_objective_bps >= r.state.trace.front().objective_bps);
    CHECK_NOTHROW(validate_association(r.assoc));

    PlacementOptions too_big = opt;
    too_big.num_candidates = 400;
    CHECK_THROWS(optimize_placement(s, too_big, 3));
}

TEST_CASE("fixed-association mode improves placement for that association") {
    const Scenario s = toy_scenario(26);
    RngStream rng(s.seed, "random-association-test");
    Association a(s.num_uavs(), s.num_users(), s.num_rbs(), s.num_tbs());
    a.set_backhauled(0, 0, true);
    a.set_serves(0, 0, 0, true);
    a.set_serves(0, 1, 1, true);

    PlacementOptions opt;
    opt.initial_radius_m = 75.0;
    const PlacementResult r = optimize_placement(s, opt, 4, &a);
    CHECK(r.assoc.user_assign == a.user_assign);
    CHECK(r.assoc.tb_assign == a.tb_assign);
    CHECK(r.state.best_objective_bps >= r.state.trace.front().objective_bps);
}

TEST_CASE("final power refinement never hurts the objective") {
    const Scenario s = toy_scenario(27, 4, 1);
    PlacementOptions plain;
    plain.initial_radius_m = 75.0;
    PlacementOptions refined = plain;
    refined.refine_final_power = true;
    const PlacementResult a = optimize_placement(s, plain, 11);
    const PlacementResult b = optimize_placement(s, refined, 11);
    CHECK(b.value.total_bps >= a.value.total_bps * (1.0 - 1e-9));
    CHECK_NOTHROW(validate_power_budget(s, b.assoc, b.power));
}

TEST_CASE("shrink-and-realign lands near the exhaustive grid optimum") {
    ScenarioConfig cfg;
    cfg.num_uavs = 1;
    cfg.num_users = 1;
    cfg.num_tbs = 1;
    cfg.num_rbs = 2;
    cfg.area_x_m = 300;
    cfg.area_y_m = 300;
    cfg.tb_positions = {{0, 150, 200}};
    const Scenario s = generate_scenario(cfg, 33);

    const auto grid = grid_placement(s, 10.0);
    PlacementOptions opt;
    opt.initial_radius_m = 75.0;
    const PlacementResult sr = optimize_placement(s, opt, s.seed);
    CHECK(sr.state.best_objective_bps >= 0.99 * grid.objective_bps);
}

TEST_CASE("invalid options are rejected") {
    const Scenario s = toy_scenario(28);
    PlacementOptions opt;
    opt.num_candidates = 0;
    CHECK_THROWS(optimize_placement(s, opt, 1));
    opt = PlacementOptions{};
    opt.initial_radius_m = 0.5; // below min_radius
    CHECK_THROWS(optimize_placement(s, opt, 1));
}
