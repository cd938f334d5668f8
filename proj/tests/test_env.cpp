#include "bemorl/env.hpp"
#include "bemorl/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace bemorl;

namespace {

EnvConfig flat_config() {
    EnvConfig c;
    c.init_temp_spread = 0.0;
    return c;
}

ContextSpec flat_context(std::uint64_t seed = 0) {
    return ContextSpec{"flat", "flat", "Flat", seed ? sample_uwall(seed) : midpoint_uwall()};
}

// Reward forms as written in the reference implementation's vector-reward listing.
double listing_comfort(const std::vector<double>& error, std::size_t roomnum) {
    double norm1 = 0.0;
    for (double e : error) norm1 += std::abs(e);
    return (20.0 * static_cast<double>(roomnum) - norm1) / 20.0;
}

double listing_price(const std::vector<double>& action, double price, double price_factor, std::size_t roomnum) {
    double norm1 = 0.0;
    for (double a : action) norm1 += std::abs(a);
    return static_cast<double>(roomnum) - price_factor * price * norm1;
}

} // namespace

TEST_CASE("thermal reward hand cases") {
    const std::vector<double> t = {32.0, 12.0}, s = {22.0, 22.0};
    CHECK(reward_thermal(t, s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(reward_thermal(s, s) == 2.0);
}

TEST_CASE("cost reward hand cases") {
    const std::vector<double> zero = {0.0, 0.0}, p = {12.0, -8.0};
    CHECK(reward_cost(zero, 0.3, 0.05) == 2.0);
    CHECK(reward_cost(p, 1.0, 0.05) == doctest::Approx(1.0).epsilon(1e-15));
    double prev = reward_cost(zero, 0.3, 0.05);
    for (double q = 0.5; q < 20.0; q += 0.5) {
        const std::vector<double> now = {q, -q / 2.0};
        const double r = reward_cost(now, 0.3, 0.05);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("ramp reward hand cases") {
    const std::vector<double> a = {1.0, -2.0, 2.0}, b = {3.0, 3.0, -3.0}, c = {-1.0, 2.0, 2.0};
    CHECK(reward_ramp(a, c) == 3.0);
    CHECK(reward_ramp(b, a) == doctest::Approx(-1.0));
    CHECK(reward_ramp(a, b) == reward_ramp(b, a));
}

TEST_CASE("text and listing reward forms agree") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> temp(5.0, 40.0), set(18.0, 26.0), power(-50.0, 50.0), price(0.0, 0.6);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + trial % 8;
        std::vector<double> t(m), s(m), err(m), p(m);
        for (std::size_t i = 0; i < m; ++i) {
            t[i] = temp(rng);
            s[i] = set(rng);
            err[i] = t[i] - s[i];
            p[i] = power(rng);
        }
        const double c = price(rng);
        CHECK(std::abs(reward_thermal(t, s) - listing_comfort(err, m)) <= 1e-12);
        CHECK(std::abs(reward_cost(p, c, 0.05) - listing_price(p, c, 0.05, m)) <= 1e-12);
    }
}

TEST_CASE("scalarize") {
    const std::vector<double> r = {5.0, 7.0};
    CHECK(scalarize(std::vector<double>{1.0, 0.0}, r) == 5.0);
    CHECK(scalarize(std::vector<double>{0.5, 0.5}, std::vector<double>{4.0, 6.0}) == 5.0);
    CHECK_THROWS_AS(scalarize(std::vector<double>{0.7, 0.7}, r), Error);
    CHECK_THROWS_AS(scalarize(std::vector<double>{-0.5, 1.5}, r), Error);
    CHECK_THROWS_AS(scalarize(std::vector<double>{1.0}, r), Error);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-10.0, 10.0), w(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double w0 = w(rng);
        const std::vector<double> omega = {w0, 1.0 - w0}, r1 = {u(rng), u(rng)}, r2 = {u(rng), u(rng)};
        const std::vector<double> sum = {r1[0] + r2[0], r1[1] + r2[1]};
        CHECK(scalarize(omega, sum) == doctest::Approx(scalarize(omega, r1) + scalarize(omega, r2)));
    }
}

TEST_CASE("episode return") {
    std::vector<RewardVector> constant(24, RewardVector{1.0, 2.0});
    const auto g1 = episode_return(constant, 1.0);
    CHECK(g1 == std::vector<double>{24.0, 48.0});
    const std::vector<RewardVector> varied = {{3.0, -1.0}, {5.0, 5.0}, {7.0, 7.0}};
    CHECK(episode_return(varied, 0.0) == std::vector<double>{3.0, -1.0});
    const std::vector<RewardVector> two = {{1.0, 1.0}, {1.0, 1.0}};
    CHECK(episode_return(two, 0.5) == std::vector<double>{1.5, 1.5});
}

TEST_CASE("reset is deterministic and has the documented shape") {
    const auto assets = testing::shipped_assets();
    BuildingEnv env(EnvConfig{}, assets, "two_zone");
    CHECK(env.obs_dim() == 12);
    CHECK(env.action_dim() == 2);
    const ContextSpec c{"c", "two_zone", "Warm_Marine", sample_uwall(3)};
    const auto a = env.reset(c, 42).to_vector();
    const auto b = env.reset(c, 42).to_vector();
    CHECK(a.size() == 12);
    CHECK(a == b);
    CHECK_FALSE(env.reset(c, 43).to_vector() == a);
    CHECK(Observation::field_names(2).size() == 12);

    BuildingEnv office(EnvConfig{}, assets, "small_office");
    CHECK(office.obs_dim() == 24);
}

TEST_CASE("observations never expose the envelope") {
    const auto assets = testing::shipped_assets();
    BuildingEnv env(EnvConfig{}, assets, "two_zone");
    for (const auto& name : Observation::field_names(5)) {
        for (std::size_t k = 0; k < kNumWallKinds; ++k) {
            CHECK(name.find(wall_kind_name(static_cast<WallKind>(k))) == std::string::npos);
        }
        CHECK(name.find("u_wall") == std::string::npos);
    }
    std::mt19937_64 rng(5);
    const ContextSpec reference{"r", "two_zone", "Warm_Marine", midpoint_uwall()};
    const auto first = env.reset(reference, 9).to_vector();
    for (int i = 0; i < 100; ++i) {
        const ContextSpec c{"c", "two_zone", "Warm_Marine", sample_uwall(rng)};
        CHECK(env.reset(c, 9).to_vector() == first);
    }
}

TEST_CASE("equilibrium with zero action earns the full thermal reward") {
    for (std::size_t zones : {1u, 3u}) {
        BuildingEnv env(flat_config(), testing::flat_assets(zones), "flat");
        env.reset(flat_context(), 1);
        const std::vector<double> zero(zones, 0.0);
        for (int t = 0; t < 24; ++t) {
            const auto r = env.step(zero);
            CHECK(r.reward[0] == static_cast<double>(zones));
            CHECK(r.reward[1] == static_cast<double>(zones));
        }
    }
}

TEST_CASE("actions are clipped to the unit box before physics") {
    auto assets = testing::flat_assets();
    BuildingEnv a(flat_config(), assets, "flat"), b(flat_config(), assets, "flat");
    a.reset(flat_context(), 1);
    b.reset(flat_context(), 1);
    const auto ra = a.step(std::vector<double>{2.0});
    const auto rb = b.step(std::vector<double>{1.0});
    CHECK(ra.observation.to_vector() == rb.observation.to_vector());
    CHECK(ra.reward == rb.reward);
    CHECK(a.trajectory().back().actions[0] == 1.0);
    // Full heating power is 5 kW at a 0.2 price: cost = 1 - 0.05 * 0.2 * 5.
    CHECK(ra.reward[1] == doctest::Approx(1.0 - 0.05 * 0.2 * 5.0));
}

TEST_CASE("episode lifecycle") {
    BuildingEnv env(flat_config(), testing::flat_assets(), "flat");
    const std::vector<double> zero = {0.0};
    try {
        env.step(zero);
        FAIL("expected lifecycle error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Lifecycle);
    }
    env.reset(flat_context(), 0);
    for (int t = 0; t < 23; ++t) CHECK_FALSE(env.step(zero).done);
    CHECK(env.step(zero).done);
    try {
        env.step(zero);
        FAIL("expected lifecycle error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Lifecycle);
    }
    env.reset(flat_context(), 0);
    CHECK_NOTHROW(env.step(zero));
    CHECK_THROWS_AS(env.step(std::vector<double>{0.0, 0.0}), Error);
}

TEST_CASE("reset validates the context against the assets") {
    const auto assets = testing::shipped_assets();
    BuildingEnv env(EnvConfig{}, assets, "two_zone");
    CHECK_THROWS_AS(env.reset(ContextSpec{"x", "two_zone", "Arctic", midpoint_uwall()}, 0), Error);
    CHECK_THROWS_AS(env.reset(ContextSpec{"x", "small_office", "Hot_Humid", midpoint_uwall()}, 0), Error);
    EnvConfig late;
    late.start_hour = 8750;
    BuildingEnv late_env(late, assets, "two_zone");
    CHECK_THROWS_AS(late_env.reset(ContextSpec{"x", "two_zone", "Hot_Humid", midpoint_uwall()}, 0), Error);
    CHECK_THROWS_AS(BuildingEnv(EnvConfig{}, assets, "castle"), Error);
}

TEST_CASE("heating raises and cooling lowers zone temperature") {
    const auto assets = testing::shipped_assets();
    const ContextSpec c{"c", "two_zone", "Cool_Marine", midpoint_uwall()};
    BuildingEnv env(EnvConfig{}, assets, "two_zone");
    env.reset(c, 4);
    const auto heat = env.step(std::vector<double>{1.0, 1.0}).observation.zone_temps;
    env.reset(c, 4);
    const auto cool = env.step(std::vector<double>{-1.0, -1.0}).observation.zone_temps;
    for (std::size_t i = 0; i < 2; ++i) CHECK(heat[i] > cool[i]);
}

TEST_CASE("ramp and custom reward sets") {
    EnvConfig cfg = flat_config();
    cfg.rewards = {RewardKind::Thermal, RewardKind::Cost, RewardKind::Ramp};
    BuildingEnv env(cfg, testing::flat_assets(), "flat");
    CHECK(env.num_objectives() == 3);
    env.reset(flat_context(), 0);
    CHECK(env.step(std::vector<double>{0.4}).reward[2] == doctest::Approx(1.0 - 2.0));
    CHECK(env.step(std::vector<double>{0.4}).reward[2] == 1.0);
    CHECK(env.step(std::vector<double>{-0.4}).reward[2] == 1.0);
}

TEST_CASE("env config parsing") {
    const auto c = parse_env_config(R"({"horizon": 12, "setpoints": [21, 23], "rewards": ["thermal", "cost", "ramp"]})");
    CHECK(c.horizon == 12);
    CHECK(c.rewards.size() == 3);
    const auto back = parse_env_config(dump_env_config(c));
    CHECK(back.setpoints == c.setpoints);
    CHECK(back.rewards == c.rewards);
    CHECK_THROWS_AS(parse_env_config(R"({"substep_s": 700})"), Error);
    CHECK_THROWS_AS(parse_env_config(R"({"rewards": ["joy"]})"), Error);
    CHECK_THROWS_AS(parse_env_config(R"({"gamma": 1.5})"), Error);
}

TEST_CASE("trajectory CSV has one row per step") {
    BuildingEnv env(flat_config(), testing::flat_assets(2), "flat");
    env.reset(flat_context(), 0);
    for (int t = 0; t < 5; ++t) env.step(std::vector<double>{0.1, -0.1});
    std::ostringstream out;
    write_trajectory_csv(out, env);
    const auto text = out.str();
    CHECK(text.rfind("step,hour,temp_z0,temp_z1,action_z0,action_z1,reward_thermal,reward_cost\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}
