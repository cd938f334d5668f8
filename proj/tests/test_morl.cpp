#include "bemorl/error.hpp"
#include "bemorl/morl.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace bemorl;

namespace {

TrainerConfig small_config() {
    TrainerConfig c;
    c.cem.population = 8;
    c.cem.iterations = 4;
    c.select_k = 3;
    c.eval_seeds = {11};
    c.train_contexts = 1;
    c.normalizer_episodes = 2;
    return c;
}

TrainingSetup toy_setup(TrainMode mode = TrainMode::Static) {
    TrainingSetup s;
    s.base = ContextSpec{"train", "two_zone", "Warm_Marine", midpoint_uwall()};
    s.mode = mode;
    return s;
}

EnvFactory toy_factory() {
    auto assets = testing::shipped_assets();
    return [assets] { return BuildingEnv(EnvConfig{}, assets, "two_zone"); };
}

PolicyBuffer buffer_from(const std::vector<ReturnVector>& points) {
    PolicyBuffer b;
    for (const auto& p : points) b.append(Policy{}, p);
    return b;
}

double front_hv(const ParetoFront& f, const std::vector<double>& ref) { return hypervolume(f, ref); }

} // namespace

TEST_CASE("derive_seed is deterministic and separates streams") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a)
        for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(7, a, b));
    CHECK(seen.size() == 400);
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("normalizer maps observed ranges onto the unit box") {
    const ObsNormalizer n{{0.0, 10.0, 5.0}, {10.0, 20.0, 5.0}};
    const std::vector<double> obs = {0.0, 15.0, 7.0};
    CHECK(n.apply(obs) == std::vector<double>{-1.0, 0.0, 0.0});
}

TEST_CASE("affine controller shape and output bounds") {
    CHECK(policy_param_count(2) == 2 * 12 + 2);
    CHECK(policy_param_count(5) == 5 * 24 + 5);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 5.0);
    const ObsNormalizer n{std::vector<double>(12, -10.0), std::vector<double>(12, 10.0)};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> theta(policy_param_count(2)), obs(12);
        for (auto& v : theta) v = g(rng);
        for (auto& v : obs) v = 5.0 * g(rng);
        const auto a = AffineController(theta, n, 2).act(obs);
        REQUIRE(a.size() == 2);
        for (double x : a) {
            CHECK(x >= -1.0);
            CHECK(x <= 1.0);
        }
    }
    std::vector<double> bias_only(policy_param_count(2), 0.0);
    bias_only[24] = 0.25;
    bias_only[25] = -3.0;
    const auto a = AffineController(bias_only, n, 2).act(std::vector<double>(12, 1.0));
    CHECK(a == std::vector<double>{0.25, -1.0});
}

TEST_CASE("zero policy in a flat equilibrium earns the geometric thermal sum") {
    EnvConfig cfg;
    cfg.init_temp_spread = 0.0;
    BuildingEnv env(cfg, testing::flat_assets(2), "flat");
    const EvalProtocol protocol{{ContextSpec{"flat", "flat", "Flat", midpoint_uwall()}}, {1, 2}, 1, 0.95};
    const ObsNormalizer n{std::vector<double>(env.obs_dim(), 0.0), std::vector<double>(env.obs_dim(), 1.0)};
    const std::vector<double> zero(policy_param_count(2), 0.0);
    const auto g = evaluate_policy(zero, n, env, protocol);
    double oracle = 0.0;
    for (int t = 0; t < 24; ++t) oracle += std::pow(0.95, t) * 2.0;
    CHECK(g[0] == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(g[1] == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("evaluation is deterministic and repeated episodes do not change it") {
    const auto factory = toy_factory();
    auto env = factory();
    const auto setup = toy_setup(TrainMode::Dynamic);
    EvalProtocol protocol = canonical_protocol(small_config(), setup, 0.99, 5);
    const auto norm = fit_normalizer(env, protocol.contexts, 1, 2);
    const auto theta = sample_random_thetas(1, 2, 0.5, 9).front();
    const auto a = evaluate_policy(theta, norm, env, protocol);
    CHECK(a == evaluate_policy(theta, norm, env, protocol));
    protocol.episodes = 2;
    CHECK(a == evaluate_policy(theta, norm, env, protocol));
}

TEST_CASE("crowding distance hand case") {
    const std::vector<ReturnVector> pts = {{0, 4}, {1, 3}, {2, 2}, {3, 1}, {4, 0}};
    const auto cd = crowding_distance(pts);
    CHECK(std::isinf(cd[0]));
    CHECK(std::isinf(cd[4]));
    for (int i = 1; i < 4; ++i) CHECK(cd[i] == doctest::Approx(1.0));
    const std::vector<ReturnVector> uneven = {{0, 10}, {1, 9}, {5, 5}, {10, 0}};
    const auto cu = crowding_distance(uneven);
    CHECK(cu[1] == doctest::Approx(5.0 / 10 + 5.0 / 10));
    CHECK(cu[2] == doctest::Approx(9.0 / 10 + 9.0 / 10));
}

TEST_CASE("select_policies") {
    SUBCASE("dominated entries are never selected") {
        const auto b = buffer_from({{1.0, 1.0}, {2.0, 2.0}});
        const auto s = select_policies(b, 2);
        REQUIRE(s.size() == 1);
        CHECK(s[0].returns == ReturnVector{2.0, 2.0});
    }
    SUBCASE("k at least the front size returns the whole front") {
        const auto b = buffer_from({{0, 3}, {1, 2}, {2, 1}, {3, 0}, {0.5, 0.5}});
        CHECK(select_policies(b, 4).size() == 4);
        CHECK(select_policies(b, 10).size() == 4);
    }
    SUBCASE("five evenly spaced points keep both extremes and one interior") {
        const auto b = buffer_from({{0, 4}, {1, 3}, {2, 2}, {3, 1}, {4, 0}});
        const auto s = select_policies(b, 3);
        REQUIRE(s.size() == 3);
        std::set<std::int64_t> ids;
        for (const auto& e : s) ids.insert(e.policy.id);
        CHECK(ids.count(0) == 1);
        CHECK(ids.count(4) == 1);
        // Interior crowding distances tie; the lowest id wins.
        CHECK(ids.count(1) == 1);
    }
}

TEST_CASE("trainer config validation") {
    CHECK_NOTHROW(TrainerConfig{}.validate(2));
    auto bad = TrainerConfig{};
    bad.beta = 1.0;
    CHECK_THROWS_AS(bad.validate(2), Error);
    bad = TrainerConfig{};
    bad.cem.population = 3;
    CHECK_THROWS_AS(bad.validate(2), Error);
    bad = TrainerConfig{};
    bad.cem.elite_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(2), Error);
    bad = TrainerConfig{};
    bad.init_weights = {{0.6, 0.6}};
    CHECK_THROWS_AS(bad.validate(2), Error);
    CHECK_THROWS_AS(TrainerConfig{}.validate(3), Error);

    const auto c = parse_trainer_config(R"({"beta": 0.8, "cem": {"population": 12}, "gamma": 0.9})");
    CHECK(c.beta == 0.8);
    CHECK(c.cem.population == 12);
    CHECK(*c.gamma == 0.9);
    const auto back = parse_trainer_config(dump_trainer_config(c));
    CHECK(back.cem.population == 12);
    CHECK(back.init_weights == c.init_weights);
}

TEST_CASE("pareto initialization bookkeeping") {
    const auto config = small_config();
    const auto buffer = pareto_initialization(config, toy_factory(), toy_setup(), 77);
    CHECK(buffer.init_done);
    std::size_t finals = 0;
    for (const auto& e : buffer.entries) {
        CHECK(e.policy.origin == PolicyOrigin::Init);
        CHECK(e.policy.train_weights.size() == 2);
        if (e.policy.stage_final) ++finals;
    }
    CHECK(finals == config.init_weights.size());

    // The best policy per preference is at least as good as the preference's starting policy.
    for (const auto& omega : config.init_weights) {
        double first = std::numeric_limits<double>::quiet_NaN(), best = -1e300;
        for (const auto& e : buffer.entries) {
            if (e.policy.train_weights != omega) continue;
            const double s = scalarize(omega, e.returns);
            if (std::isnan(first)) first = s;
            if (e.policy.stage_final) best = s;
        }
        CHECK(best >= first);
    }
    // Stored returns came from the canonical protocol.
    auto env = toy_factory()();
    const auto& e = buffer.entries.back();
    CHECK(evaluate_policy(e.policy, buffer.normalizer, env, buffer.protocol) == e.returns);
}

TEST_CASE("extension respects its constraints and never shrinks the front") {
    auto config = small_config();
    const auto factory = toy_factory();
    const auto setup = toy_setup();
    auto buffer = pareto_initialization(config, factory, setup, 12);
    const auto init_front = buffer.front();
    const auto selected = select_policies(buffer, config.select_k);
    pareto_extension(buffer, selected, config, factory, setup, 12, 0);

    std::size_t extended = 0;
    for (const auto& e : buffer.entries) {
        if (e.policy.origin != PolicyOrigin::Extension) continue;
        ++extended;
        const auto& parent = buffer.entry(e.policy.parent_id).returns;
        for (std::size_t i = 0; i < 2; ++i) {
            if (static_cast<int>(i) == e.policy.target_objective) continue;
            CHECK(e.returns[i] >= config.beta * parent[i] - 1e-6 * std::abs(parent[i]));
        }
    }
    CHECK(extended > 0);
    const auto ref = reference_point(buffer.all_returns());
    CHECK(front_hv(buffer.front(), ref) >= front_hv(init_front, ref));
}

TEST_CASE("tiny beta turns extension into single-objective search") {
    auto loose = small_config();
    loose.beta = 1e-9;
    const auto factory = toy_factory();
    const auto setup = toy_setup();
    auto buffer = pareto_initialization(loose, factory, setup, 4);
    const auto selected = select_policies(buffer, 1);
    REQUIRE(selected.front().returns[0] > 0.0);
    REQUIRE(selected.front().returns[1] > 0.0);
    auto plain = buffer;
    pareto_extension(buffer, selected, loose, factory, setup, 4, 0);
    // With all parent returns positive the penalty is identically zero, so the
    // fitness equals G_l and the first iteration never doubles the multiplier.
    std::size_t added = buffer.entries.size() - plain.entries.size();
    const auto n_elite = static_cast<std::size_t>(std::ceil(loose.cem.elite_fraction * loose.cem.population));
    CHECK(added == 2 * n_elite * static_cast<std::size_t>(loose.cem.iterations));
}

TEST_CASE("train: final front is a fixed point and dominates initialization") {
    const auto config = small_config();
    const auto result = train(config, toy_factory(), toy_setup(), 99);
    const auto again = pareto_filter(result.front.points(), result.front.policy_ids());
    CHECK(again.points() == result.front.points());
    const auto ref = reference_point(result.buffer.all_returns());
    CHECK(front_hv(result.front, ref) >= front_hv(result.init_front, ref));
    CHECK(result.buffer.extension_rounds_done == 1);
}

TEST_CASE("train is reproducible, thread-count independent and resumable") {
    auto config = small_config();
    const auto factory = toy_factory();
    const auto setup = toy_setup(TrainMode::Dynamic);
    const auto a = train(config, factory, setup, 3);
    const auto b = train(config, factory, setup, 3);
    CHECK(a.front.points() == b.front.points());
    CHECK(a.front.policy_ids() == b.front.policy_ids());

    config.threads = 3;
    const auto threaded = train(config, factory, setup, 3);
    CHECK(threaded.front.points() == a.front.points());
    config.threads = 1;

    const auto init = pareto_initialization(config, factory, setup, 3);
    const auto restored = parse_checkpoint(checkpoint_json(init));
    const auto resumed = train(config, factory, setup, 3, restored);
    CHECK(resumed.front.points() == a.front.points());
    CHECK(resumed.buffer.entries.size() == a.buffer.entries.size());

    const auto finished = parse_checkpoint(checkpoint_json(a.buffer));
    const auto noop = train(config, factory, setup, 3, finished);
    CHECK(noop.buffer.entries.size() == a.buffer.entries.size());
}

TEST_CASE("checkpoint round trip and rejection") {
    const auto b = pareto_initialization(small_config(), toy_factory(), toy_setup(), 8);
    const auto back = parse_checkpoint(checkpoint_json(b));
    CHECK(back.normalizer == b.normalizer);
    CHECK(back.entries.size() == b.entries.size());
    CHECK(back.entries.front().policy.theta == b.entries.front().policy.theta);
    CHECK(back.entries.front().returns == b.entries.front().returns);
    CHECK(back.protocol.contexts == b.protocol.contexts);
    CHECK(back.next_id == b.next_id);
    CHECK_THROWS_AS(parse_checkpoint(R"({"format": "other"})"), Error);
    CHECK_THROWS_AS(parse_checkpoint("not json"), Error);
}

TEST_CASE("static and dynamic canonical protocols coincide under degenerate bounds") {
    auto setup = toy_setup(TrainMode::Dynamic);
    const auto mid = midpoint_uwall();
    for (std::size_t k = 0; k < kNumWallKinds; ++k) setup.bounds[k] = {mid.values[k], mid.values[k]};
    const auto dyn = canonical_protocol(small_config(), setup, 0.99, 1);
    const auto stat = canonical_protocol(small_config(), toy_setup(), 0.99, 1);
    REQUIRE(dyn.contexts.size() == stat.contexts.size());
    for (std::size_t i = 0; i < dyn.contexts.size(); ++i) CHECK(dyn.contexts[i].u_wall == stat.contexts[i].u_wall);
}
