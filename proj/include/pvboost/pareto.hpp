#pragma once

#include <cstdint>
#include <vector>

namespace pvboost {

struct ObjectivePair {
    double f1;
    double f2;
};

/// Maximization domination: u dominates v iff u is componentwise >= v
/// with at least one strict inequality. Equality is exact floating-point
/// equality; a pair never dominates itself.
bool dominates(ObjectivePair u, ObjectivePair v);

struct FrontPoint {
    double f1;
    double f2;
    std::uint64_t id;
};

/// Exact non-dominated subset, returned sorted by f1 ascending, then f2
/// descending, then id. Duplicated objective pairs do not dominate each
/// other and are all retained. O(n log n) sweep.
std::vector<FrontPoint> pareto_filter(std::vector<FrontPoint> points);

}  // namespace pvboost
