#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pvboost/ea.hpp"
#include "pvboost/rng.hpp"

using namespace pvboost;

namespace {

std::vector<ObjectivePair> random_pairs(Rng& rng, int n) {
    std::vector<ObjectivePair> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i)
        pts.push_back({static_cast<double>(rng.below(128)) / 128.0,
                       static_cast<double>(rng.below(128)) / 128.0});
    return pts;
}

}  // namespace

TEST_CASE("config validation") {
    EaConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    cfg.population = 5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.population = 2;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = EaConfig{};
    cfg.crossover_prob = 1.5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = EaConfig{};
    cfg.mutation_prob = -0.1;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = EaConfig{};
    cfg.generations = 0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = EaConfig{};
    cfg.bounds.q_max = cfg.bounds.q_min;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("fast non-dominated sorting ranks the documented population") {
    const std::vector<ObjectivePair> pop = {
        {0.2, 0.9}, {0.8, 0.3}, {0.5, 0.5}, {0.1, 0.1}};
    const auto ranks = fast_non_dominated_sort(pop);
    CHECK(ranks == std::vector<int>{0, 0, 0, 1});
}

TEST_CASE("fast non-dominated sorting matches brute-force peeling") {
    Rng rng(201);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 50 + static_cast<int>(rng.below(250));
        const auto pts = random_pairs(rng, n);
        CHECK(fast_non_dominated_sort(pts) == oracles::brute_ranks(pts));
    }
}

TEST_CASE("crowding keeps the extremes") {
    const std::vector<ObjectivePair> front = {
        {0.2, 0.9}, {0.8, 0.3}, {0.5, 0.5}};
    const auto d = crowding_distances(front);
    CHECK(std::isinf(d[0]));
    CHECK(std::isinf(d[1]));
    CHECK_FALSE(std::isinf(d[2]));
    CHECK(d[2] > 0.0);
}

TEST_CASE("igd examples and brute-force agreement") {
    const std::vector<ObjectivePair> exact = {{0.0, 0.0}};
    const std::vector<ObjectivePair> far = {{3.0, 4.0}};
    CHECK(igd(far, exact) == doctest::Approx(5.0));
    CHECK(igd(exact, exact) == 0.0);
    CHECK_THROWS_AS(igd({}, exact), EmptyFrontError);
    CHECK_THROWS_AS(igd(exact, {}), EmptyFrontError);

    Rng rng(203);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_pairs(rng, 3 + static_cast<int>(rng.below(40)));
        const auto e = random_pairs(rng, 3 + static_cast<int>(rng.below(60)));
        CHECK(oracles::near(igd(a, e), oracles::brute_igd(a, e), 1e-12));
    }
}

TEST_CASE("igd shrinks as the approximation grows toward the exact front") {
    Rng rng(207);
    auto exact = random_pairs(rng, 60);
    std::vector<ObjectivePair> approx(exact.begin(), exact.begin() + 5);
    double prev = igd(approx, exact);
    for (std::size_t k = 5; k < exact.size(); k += 5) {
        approx.assign(exact.begin(), exact.begin() + k);
        const double cur = igd(approx, exact);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
}

TEST_CASE("hypervolume examples and errors") {
    CHECK(hypervolume(std::vector<ObjectivePair>{{1.0, 1.0}}, {0.0, 0.0}) ==
          doctest::Approx(1.0));
    CHECK(hypervolume(std::vector<ObjectivePair>{{1.0, 0.5}, {0.5, 1.0}},
                      {0.0, 0.0}) == doctest::Approx(0.75));
    // Dominated members contribute nothing.
    CHECK(hypervolume(
              std::vector<ObjectivePair>{{1.0, 0.5}, {0.5, 1.0}, {0.4, 0.4}},
              {0.0, 0.0}) == doctest::Approx(0.75));
    CHECK(hypervolume({}, {0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(
        hypervolume(std::vector<ObjectivePair>{{-0.1, 0.5}}, {0.0, 0.0}),
        RefPointError);
}

TEST_CASE("hypervolume agrees with a Monte-Carlo estimate") {
    Rng rng(211);
    std::vector<ObjectivePair> front;
    for (int i = 0; i < 10; ++i)
        front.push_back({rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)});
    const double hv = hypervolume(front, {0.0, 0.0});

    const int n = 1000000;
    int inside = 0;
    for (int i = 0; i < n; ++i) {
        const ObjectivePair s{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)};
        for (const auto& p : front)
            if (p.f1 >= s.f1 && p.f2 >= s.f2) {
                ++inside;
                break;
            }
    }
    const double est = static_cast<double>(inside) / n;
    const double sigma = std::sqrt(est * (1.0 - est) / n);
    CHECK(std::abs(hv - est) < 3.0 * sigma + 1e-6);
}

TEST_CASE("nsga2 runs are deterministic for a fixed seed") {
    EaConfig cfg;
    cfg.population = 24;
    cfg.generations = 12;
    cfg.seed = 42;
    const EaRun r1 = nsga2(cfg);
    const EaRun r2 = nsga2(cfg);
    REQUIRE(r1.final_population.size() == r2.final_population.size());
    for (std::size_t i = 0; i < r1.final_population.size(); ++i) {
        CHECK(r1.final_population[i].q == r2.final_population[i].q);
        CHECK(r1.final_population[i].x_minus ==
              r2.final_population[i].x_minus);
        CHECK(r1.final_population[i].f1 == r2.final_population[i].f1);
    }
    REQUIRE(r1.indicators.size() == r2.indicators.size());
    for (std::size_t i = 0; i < r1.indicators.size(); ++i)
        CHECK(r1.indicators[i].hv == r2.indicators[i].hv);

    cfg.seed = 43;
    const EaRun r3 = nsga2(cfg);
    bool any_diff = false;
    for (std::size_t i = 0; i < r1.final_population.size(); ++i)
        if (r1.final_population[i].q != r3.final_population[i].q)
            any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("nsga2 bookkeeping invariants") {
    EaConfig cfg;
    cfg.population = 20;
    cfg.generations = 15;
    cfg.seed = 7;
    const EaRun run = nsga2(cfg);
    CHECK(run.evaluations ==
          static_cast<std::uint64_t>(cfg.population) * (cfg.generations + 1));
    CHECK(run.indicators.size() == static_cast<std::size_t>(cfg.generations));
    CHECK(run.final_population.size() ==
          static_cast<std::size_t>(cfg.population));
    // The discovered front only improves: hypervolume never decreases.
    for (std::size_t i = 1; i < run.indicators.size(); ++i)
        CHECK(run.indicators[i].hv >= run.indicators[i - 1].hv);
    // The front is non-dominated and sorted by f1.
    for (std::size_t i = 1; i < run.final_front.size(); ++i) {
        CHECK(run.final_front[i].f1 > run.final_front[i - 1].f1);
        CHECK(run.final_front[i].f2 < run.final_front[i - 1].f2);
    }
}

TEST_CASE("nsga2 approximates a coarse exact front") {
    LatticeSpec spec;
    spec.step_q = 5e-3;
    spec.step_x = 5e-3;
    ScanOptions opts;
    opts.borders = false;
    opts.edges = false;
    opts.keep_rows = false;
    const ScanOutcome scan = run_scan(spec, FixedParams{}, opts);
    std::vector<ObjectivePair> exact;
    for (const auto& fp : scan.front) exact.push_back({fp.f1, fp.f2});

    EaConfig cfg;
    cfg.population = 32;
    cfg.generations = 40;
    cfg.seed = 5;
    const EaRun run = nsga2(cfg, exact);
    REQUIRE_FALSE(run.final_front.empty());
    REQUIRE(run.indicators.back().igd.has_value());
    CHECK(*run.indicators.back().igd < 0.02);
}

TEST_CASE("nsga2 survives an entirely infeasible box") {
    EaConfig cfg;
    cfg.population = 8;
    cfg.generations = 4;
    cfg.bounds.q_min = 1.0;
    cfg.bounds.q_max = 1.05;
    cfg.bounds.x_min = 0.8;
    cfg.bounds.x_max = 0.81;
    const EaRun run = nsga2(cfg);
    CHECK(run.final_front.empty());
    for (const auto& row : run.indicators) {
        CHECK(row.hv == 0.0);
        CHECK_FALSE(row.igd.has_value());
    }
    for (const auto& ind : run.final_population) CHECK_FALSE(ind.feasible);
}
