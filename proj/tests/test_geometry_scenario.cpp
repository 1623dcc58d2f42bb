#include "uavtb/config.hpp"
#include "uavtb/geometry.hpp"
#include "uavtb/rng.hpp"
#include "uavtb/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace uavtb;

TEST_CASE("distance basics") {
    CHECK(distance({0, 0, 0}, {0, 0, 100}) == Catch::Approx(100.0));
    CHECK(distance({0, 0, 0}, {3, 4, 0}) == Catch::Approx(5.0));
    CHECK(distance({0, 500, 200}, {500, 500, 100}) ==
          Catch::Approx(std::sqrt(500.0 * 500.0 + 100.0 * 100.0)).epsilon(1e-12));
    CHECK(distance({1, 2, 3}, {1, 2, 3}) == 0.0);
}

TEST_CASE("distance symmetry property") {
    RngStream rng(7, "distance-prop");
    for (int i = 0; i < 200; ++i) {
        Point3 a{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3), rng.uniform(0, 500)};
        Point3 b{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3), rng.uniform(0, 500)};
        CHECK(distance(a, b) == Catch::Approx(distance(b, a)).epsilon(0));
        CHECK(distance(a, b) >= 0.0);
    }
}

TEST_CASE("scenario generation is deterministic in (config, seed)") {
    ScenarioConfig cfg;
    cfg.num_users = 20;
    const Scenario a = generate_scenario(cfg, 42);
    const Scenario b = generate_scenario(cfg, 42);
    CHECK(a == b);
    const Scenario c = generate_scenario(cfg, 43);
    CHECK_FALSE(a == c);
}

TEST_CASE("generated users stay inside the area at ground level") {
    ScenarioConfig cfg;
    cfg.num_users = 50;
    cfg.area_x_m = 1000;
    cfg.area_y_m = 1000;
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
        const Scenario s = generate_scenario(cfg, seed);
        for (const auto& u : s.users) {
            CHECK(u.z == 0.0);
            CHECK(u.x >= 0.0);
            CHECK(u.x <= cfg.area_x_m);
            CHECK(u.y >= 0.0);
            CHECK(u.y <= cfg.area_y_m);
        }
    }
}

TEST_CASE("single-user unit area") {
    ScenarioConfig cfg;
    cfg.num_users = 1;
    cfg.num_uavs = 1;
    cfg.num_tbs = 1;
    cfg.tb_positions = {{0, 0.5, 200}};
    cfg.area_x_m = 1;
    cfg.area_y_m = 1;
    const Scenario s = generate_scenario(cfg, 5);
    REQUIRE(s.num_users() == 1);
    CHECK(s.users[0].x >= 0.0);
    CHECK(s.users[0].x <= 1.0);
    CHECK(s.users[0].y >= 0.0);
    CHECK(s.users[0].y <= 1.0);
}

TEST_CASE("reference setup defaults") {
    ScenarioConfig cfg; // defaults follow the reference setup
    const Scenario s = generate_scenario(cfg, 1);
    REQUIRE(s.num_tbs() == 2);
    CHECK(s.tbs[0] == Point3{0, 500, 200});
    CHECK(s.tbs[1] == Point3{1000, 500, 200});
    REQUIRE(s.num_uavs() == 4);
    for (const auto& l : s.uavs) CHECK(l.z == 100.0);
    CHECK(s.num_rbs() == 30);
    CHECK(s.peak_power_w[0] == Catch::Approx(1.0)); // 30 dBm
    // -110 dBm per 180 kHz RB as a PSD
    CHECK(s.radio.noise_psd_w_per_hz == Catch::Approx(1e-14 / 180e3).epsilon(1e-12));
    CHECK(static_cast<int>(s.fading.phi.size()) == 2 * 4 * 30);
}

TEST_CASE("invalid configs are rejected") {
    ScenarioConfig cfg;
    cfg.num_users = 0;
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
    cfg = ScenarioConfig{};
    cfg.area_x_m = -5;
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
    cfg = ScenarioConfig{};
    cfg.tb_positions = {{0, 0, 200}}; // num_tbs says 2
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
    cfg = ScenarioConfig{};
    cfg.excess_loss_los_db = 13; // above NLoS
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
}

TEST_CASE("config file parsing") {
    std::istringstream in(R"(# comment
num_users = 5
num_uavs = 2
num_tbs = 1
tb_positions = 10,20,150
area_x_m = 400   # trailing comment
area_y_m = 300
peak_power_dbm = 24
rician_k = 3
seed = 77
)");
    const ScenarioConfig cfg = parse_scenario_config(in);
    CHECK(cfg.num_users == 5);
    CHECK(cfg.num_uavs == 2);
    CHECK(cfg.tb_positions.size() == 1);
    CHECK(cfg.tb_positions[0] == Point3{10, 20, 150});
    CHECK(cfg.area_x_m == 400.0);
    CHECK(cfg.peak_power_dbm == 24.0);
    CHECK(cfg.seed == 77);

    std::istringstream bad1("nonsense_key = 3\n");
    CHECK_THROWS_AS(parse_scenario_config(bad1), ConfigError);
    std::istringstream bad2("num_users twelve\n");
    CHECK_THROWS_AS(parse_scenario_config(bad2), ConfigError);
    std::istringstream bad3("num_users = -2\n");
    CHECK_THROWS_AS(parse_scenario_config(bad3), ConfigError);
}

TEST_CASE("named substreams are independent of each other") {
    RngStream a1(123, "alpha");
    RngStream a2(123, "alpha");
    RngStream b(123, "beta");
    const auto v1 = a1.next_u64();
    CHECK(v1 == a2.next_u64());
    CHECK(v1 != b.next_u64());
    CHECK(derive_seed(1, "x", 0) != derive_seed(1, "x", 1));
    CHECK(derive_seed(1, "x") != derive_seed(2, "x"));
}

TEST_CASE("dbm conversions") {
    CHECK(dbm_to_watts(30.0) == Catch::Approx(1.0));
    CHECK(dbm_to_watts(0.0) == Catch::Approx(1e-3));
    CHECK(watts_to_dbm(dbm_to_watts(17.3)) == Catch::Approx(17.3).epsilon(1e-12));
}
