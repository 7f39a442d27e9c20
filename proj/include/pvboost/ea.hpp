#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "pvboost/pareto.hpp"
#include "pvboost/scan.hpp"

namespace pvboost {

struct EaConfig {
    int population = 100;   ///< even, >= 4
    int generations = 200;
    double crossover_eta = 15.0;
    double crossover_prob = 0.9;
    double mutation_eta = 20.0;
    double mutation_prob = 0.5;  ///< per variable (1/2 for two variables)
    std::uint64_t seed = 1;
    LatticeSpec bounds;          ///< search box, clamped closed
    FixedParams fixed;
};

/// Validates an EaConfig; throws ConfigError.
void validate(const EaConfig& cfg);

struct Individual {
    double q = 0.0;
    double x_minus = 0.0;
    bool feasible = false;  ///< stable period-Tp orbit exists
    double f1 = 0.0;
    double f2 = 0.0;
};

struct IndicatorRow {
    int gen;
    std::optional<double> igd;  ///< absent when no exact front was given
    double hv;
    std::uint64_t evaluations;
};

struct EaRun {
    EaConfig config;
    std::vector<Individual> final_population;
    /// The run's discovered front: non-dominated archive over every
    /// feasible evaluation, sorted by f1 ascending. Indicators are
    /// measured against this archive, so hypervolume never decreases.
    std::vector<Individual> final_front;
    std::vector<IndicatorRow> indicators;
    std::uint64_t evaluations = 0;
    double runtime_ms = 0.0;
};

/// Standard NSGA-II over the stable-orbit biobjective problem: fast
/// non-dominated sorting with the library's domination predicate,
/// crowding-distance selection, simulated binary crossover and polynomial
/// mutation with box clamping. Infeasible individuals are ranked behind
/// all feasible ones. Deterministic for a fixed seed.
EaRun nsga2(const EaConfig& cfg,
            std::span<const ObjectivePair> exact_front = {});

/// 0-based front index per point from fast non-dominated sorting.
/// All points are treated as feasible.
std::vector<int> fast_non_dominated_sort(std::span<const ObjectivePair> pts);

/// Crowding distances within one front (not across fronts). Extreme
/// points of each objective get +infinity.
std::vector<double> crowding_distances(std::span<const ObjectivePair> front);

/// Inverted generational distance: mean distance from each exact-front
/// point to its nearest approximation point, in raw objective units.
/// Throws EmptyFrontError when either front is empty.
double igd(std::span<const ObjectivePair> approx,
           std::span<const ObjectivePair> exact);

/// 2-D hypervolume of the region dominated by `front` relative to `ref`.
/// Every input point must dominate ref (RefPointError otherwise);
/// dominated input points are allowed and contribute nothing.
double hypervolume(std::span<const ObjectivePair> front, ObjectivePair ref);

/// Writes ea_front.csv, indicators.csv and meta.json into dir.
void write_ea_outputs(const EaRun& run, const std::filesystem::path& dir);

}  // namespace pvboost
