#pragma once

#include "pvboost/orbit.hpp"

namespace pvboost {

/// Objective-space image of a parameter point: stability margin f1 and
/// average input power f2.
struct ObjectivePoint {
    DimensionlessParams params;
    OrbitType type;
    double df;
    double f1;  ///< 1 - |Df|, always < 1; > 0 iff the orbit is stable
    double f2;  ///< average input power over one period
};

/// Closed-form average input power of a Type 1 orbit.
/// Throws TypeMismatchError on a Type 2 orbit.
double average_power_type1(const PeriodicOrbit& o);

/// Closed-form average input power of a Type 2 orbit.
/// Throws TypeMismatchError on a Type 1 orbit.
double average_power_type2(const PeriodicOrbit& o);

/// Dispatches on the orbit type.
double average_power(const PeriodicOrbit& o);

/// Solves the orbit and evaluates both objectives.
/// Propagates NoOrbitError / DegenerateError: such points are infeasible
/// for the optimization problem and carry no objective values.
ObjectivePoint evaluate(const DimensionlessParams& p);

/// Non-throwing evaluation for sweep/scan use. df/f1/f2 are meaningful
/// only when status == SolveStatus::ok.
struct EvalResult {
    SolveStatus status = SolveStatus::no_orbit;
    OrbitType type = OrbitType::type1;
    double df = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;

    bool feasible() const { return status == SolveStatus::ok; }
    bool stable() const;
};

EvalResult try_evaluate(const DimensionlessParams& p);

}  // namespace pvboost
