#include "bemorl/error.hpp"
#include "bemorl/metrics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace bemorl;
using Points = std::vector<ReturnVector>;

TEST_CASE("dominance") {
    const std::vector<double> a = {2.0, 3.0}, b = {1.0, 3.0}, c = {2.0, 1.0}, d = {1.0, 2.0};
    CHECK(dominates(a, b));
    CHECK_FALSE(dominates(b, a));
    CHECK_FALSE(dominates(c, d));
    CHECK_FALSE(dominates(d, c));
    CHECK_FALSE(dominates(a, a));
    CHECK_THROWS_AS(dominates(a, std::vector<double>{1.0}), Error);
}

TEST_CASE("pareto_filter examples") {
    const Points pts = {{1.0, 2.0}, {2.0, 1.0}, {0.0, 0.0}};
    const auto f = pareto_filter(pts);
    CHECK(f.points() == Points{{1.0, 2.0}, {2.0, 1.0}});
    CHECK(f.policy_ids() == std::vector<std::int64_t>{0, 1});

    const Points one = {{3.0, -1.0}};
    CHECK(pareto_filter(one).points() == one);
    CHECK_THROWS_AS(pareto_filter(Points{}), Error);

    const Points dup = {{1.0, 1.0}, {1.0, 1.0}, {0.5, 2.0}};
    const std::vector<std::int64_t> ids = {7, 8, 9};
    const auto fd = pareto_filter(dup, ids);
    CHECK(fd.size() == 2);
    CHECK(fd.policy_ids() == std::vector<std::int64_t>{9, 7});
}

TEST_CASE("property: pareto_filter output is non-dominated, covering and idempotent") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + trial % 30, dim = 2 + trial % 3;
        Points pts(n, ReturnVector(dim));
        for (auto& p : pts)
            for (auto& x : p) x = std::round(u(rng) * 2.0) / 2.0; // coarse grid forces ties and duplicates
        const auto f = pareto_filter(pts);
        for (const auto& a : f.points())
            for (const auto& b : f.points()) CHECK_FALSE(dominates(a, b));
        for (const auto& p : pts) {
            bool covered = false;
            for (const auto& q : f.points()) covered = covered || q == p || dominates(q, p);
            CHECK(covered);
        }
        const auto again = pareto_filter(f.points(), f.policy_ids());
        CHECK(again.points() == f.points());
        CHECK(again.policy_ids() == f.policy_ids());
    }
}

TEST_CASE("hypervolume hand cases") {
    const std::vector<double> origin = {0.0, 0.0};
    CHECK(hypervolume(pareto_filter(Points{{3.0, 2.0}}), origin) == 6.0);
    CHECK(hypervolume(pareto_filter(Points{{2.0, 1.0}, {1.0, 2.0}}), origin) == 3.0);
    CHECK(hypervolume(pareto_filter(Points{{1.0, 1.0, 1.0}}), std::vector<double>{0.0, 0.0, 0.0}) == 1.0);
    CHECK(hypervolume(pareto_filter(Points{{2.0, 1.0, 1.0}, {1.0, 2.0, 1.0}, {1.0, 1.0, 2.0}}),
                      std::vector<double>{0.0, 0.0, 0.0}) == 4.0);
}

TEST_CASE("hypervolume rejects a reference point that is not dominated") {
    const auto f = pareto_filter(Points{{2.0, 1.0}, {1.0, 2.0}}, std::vector<std::int64_t>{4, 5});
    try {
        hypervolume(f, std::vector<double>{1.5, 0.0});
        FAIL("expected validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("policy 5") != std::string::npos);
        CHECK(std::string(e.what()).find("policy 4") == std::string::npos);
    }
}

TEST_CASE("property: exact hypervolume equals inclusion-exclusion in 2 to 4 objectives") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t dim = 2 + trial % 3, n = 1 + trial % 9;
        const auto pts = dim == 2 ? testing::random_front_2d(rng, n) : testing::random_front_sphere(rng, n, dim);
        const std::vector<double> ref(dim, dim == 2 ? 0.0 : 0.5);
        const auto f = pareto_filter(pts);
        const double exact = hypervolume(f, ref);
        const double oracle = testing::inclusion_exclusion_hv(f.points(), ref);
        CHECK(exact == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("exact hypervolume agrees with Monte Carlo box sampling") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const auto pts = testing::random_front_2d(rng, 20);
        const std::vector<double> ref = {-0.5, -0.5};
        const double exact = hypervolume(pareto_filter(pts), ref);
        const double mc = testing::monte_carlo_hv(pts, ref, 200'000, 1000 + trial);
        CHECK(std::abs(exact - mc) <= 0.01 * exact);
    }
    const auto pts3 = testing::random_front_sphere(rng, 15, 3);
    const std::vector<double> ref3 = {0.0, 0.0, 0.0};
    const double exact3 = hypervolume(pareto_filter(pts3), ref3);
    CHECK(std::abs(exact3 - testing::monte_carlo_hv(pts3, ref3, 200'000, 7)) <= 0.02 * exact3);
}

TEST_CASE("five-objective hypervolume uses a seeded estimate") {
    std::mt19937_64 rng(43);
    const auto pts = testing::random_front_sphere(rng, 6, 5);
    const std::vector<double> ref(5, 0.0);
    const auto f = pareto_filter(pts);
    HypervolumeOptions opt{200'000, 3};
    const double a = hypervolume(f, ref, opt);
    CHECK(a == hypervolume(f, ref, opt));
    CHECK(std::abs(a - testing::inclusion_exclusion_hv(f.points(), ref)) <= 0.02 * a);
}

TEST_CASE("property: hypervolume is monotone under adding points and scales with objectives") {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(0.0, 10.0), s(0.5, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t dim = 2 + trial % 2;
        Points pts(1 + trial % 10, ReturnVector(dim));
        for (auto& p : pts)
            for (auto& x : p) x = u(rng);
        const std::vector<double> ref(dim, 0.0);
        const double before = hypervolume(pareto_filter(pts), ref);
        Points more = pts;
        more.push_back(ReturnVector(dim));
        for (auto& x : more.back()) x = u(rng);
        CHECK(hypervolume(pareto_filter(more), ref) >= before - 1e-12);

        const double k = s(rng);
        Points scaled = pts;
        for (auto& p : scaled) p[0] *= k;
        CHECK(hypervolume(pareto_filter(scaled), ref) == doctest::Approx(k * before).epsilon(1e-10));
    }
}

TEST_CASE("expected utility hand cases") {
    CHECK(expected_utility(pareto_filter(Points{{4.0, 6.0}})) == doctest::Approx(5.0).epsilon(1e-14));
    const double eu = expected_utility(pareto_filter(Points{{1.0, 0.0}, {0.0, 1.0}}));
    // Grid oracle: mean of max(k, 100 - k) / 100 over k = 0..100.
    double oracle = 0.0;
    for (int k = 0; k <= 100; ++k) oracle += std::max(k, 100 - k) / 100.0;
    oracle /= 101.0;
    CHECK(eu == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(eu == doctest::Approx(0.752475).epsilon(1e-6));
    CHECK(std::abs(eu - 0.75) <= 1.0 / 100.0);
}

TEST_CASE("property: dominated points never change expected utility") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 10.0), shrink(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pts = testing::random_front_2d(rng, 1 + trial % 8);
        Points more = pts;
        const auto& base = pts[trial % pts.size()];
        more.push_back({base[0] - shrink(rng), base[1] - shrink(rng)});
        CHECK(expected_utility(pareto_filter(more)) == expected_utility(pareto_filter(pts)));
    }
}

TEST_CASE("three-objective expected utility samples the simplex") {
    const auto f = pareto_filter(Points{{3.0, 6.0, 9.0}});
    ExpectedUtilityOptions opt;
    opt.n_weights = 20000;
    opt.seed = 5;
    const double eu = expected_utility(f, opt);
    CHECK(eu == expected_utility(f, opt));
    CHECK(eu == doctest::Approx(6.0).epsilon(0.02));
    // max over the three unit vectors: E[max of flat Dirichlet] = 11/18.
    const auto corners = pareto_filter(Points{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}});
    CHECK(expected_utility(corners, opt) == doctest::Approx(11.0 / 18.0).epsilon(0.01));
}

TEST_CASE("sparsity hand cases") {
    CHECK(sparsity(pareto_filter(Points{{0.0, 1.0}, {1.0, 0.0}})) == 2.0);
    CHECK(sparsity(pareto_filter(Points{{0.0, 0.0}, {0.0, 0.0}})) == 0.0);
    CHECK(sparsity(pareto_filter(Points{{0.0, 2.0}, {1.0, 1.0}, {2.0, 0.0}})) == 2.0);
    CHECK(sparsity(pareto_filter(Points{{0.0, 4.0}, {1.0, 1.0}, {4.0, 0.0}})) == doctest::Approx((1 + 9 + 1 + 9) / 2.0));
}

TEST_CASE("reference point") {
    const Points pts = {{10.0, -4.0}, {2.0, 0.0}, {5.0, 3.0}};
    const auto ref = reference_point(pts);
    CHECK(ref[0] == doctest::Approx(2.0 - 0.02));
    CHECK(ref[1] == doctest::Approx(-4.0 - 0.04));
    const auto zero = reference_point(Points{{0.0, 1.0}});
    CHECK(zero[0] == doctest::Approx(-0.01));
    for (const auto& p : pts)
        for (std::size_t i = 0; i < 2; ++i) CHECK(p[i] > ref[i]);
    CHECK_NOTHROW(hypervolume(pareto_filter(pts), ref));
}

TEST_CASE("front CSV round trip is lossless") {
    std::mt19937_64 rng(61);
    const auto pts = testing::random_front_2d(rng, 12);
    std::vector<std::int64_t> ids;
    for (std::size_t i = 0; i < pts.size(); ++i) ids.push_back(static_cast<std::int64_t>(100 + i));
    const auto f = pareto_filter(pts, ids);
    std::ostringstream out;
    write_front_csv(out, f);
    std::istringstream in(out.str());
    const auto back = read_front_csv(in);
    CHECK(back.points() == f.points());
    CHECK(back.policy_ids() == f.policy_ids());

    std::istringstream bad("policy_id,g_1,g_2\n1,2,x\n");
    CHECK_THROWS_AS(read_front_csv(bad), Error);
}

TEST_CASE("metrics report") {
    const auto f = pareto_filter(Points{{2.0, 1.0}, {1.0, 2.0}});
    const std::vector<double> ref = {0.0, 0.0};
    const auto r = evaluate_front(f, ref);
    CHECK(r.hv == 3.0);
    CHECK(r.sp == 2.0);
    CHECK(r.front_size == 2);
    CHECK(r.eu_samples == 101);
    CHECK(metrics_report_json(r).find("\"hv\": 3.0") != std::string::npos);
}
