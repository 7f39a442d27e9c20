#pragma once

#include <array>
#include <vector>

#include "pvboost/pv_model.hpp"

namespace pvboost {

enum class OrbitType { type1, type2 };

/// One exponential piece of the closed-form orbit:
///   x(tau) = (x0 - level) * exp(-rate * (tau - tau0)) + level
/// on [tau0, tau1], with x(tau0) = x0 and x(tau1) = x1 stored exactly.
struct OrbitSegment {
    double tau0, tau1;
    double x0, x1;
    double rate;
    double level;
};

/// A solved period-Tp orbit. Type 1 starts above the break point and
/// carries three switching times; Type 2 stays below it and carries one.
struct PeriodicOrbit {
    DimensionlessParams params;
    OrbitType type;
    double x_f;    ///< fixed point of the stroboscopic return map
    double tau_a;  ///< Type 1: first break-point crossing (0 for Type 2)
    double tau_b;  ///< Type 1: threshold hit (0 for Type 2)
    double tau_c;  ///< Type 1: second break-point crossing (0 for Type 2)
    double tau_d;  ///< Type 2: threshold hit (0 for Type 1)
    double df;     ///< signed contraction rate of the return map

    std::array<OrbitSegment, 4> segments{};
    int n_segments = 0;

    bool stable() const;
};

/// Contraction rate of the Type 1 return map.
/// Throws DomainError when any ratio inside the power or the fraction is
/// non-positive: a Type 1 orbit cannot exist at these parameters.
double contraction_rate_type1(const DimensionlessParams& p);

/// Contraction rate of the Type 2 return map.
/// Throws DomainError when x_minus equals the State-2 equilibrium a2.
double contraction_rate_type2(const DimensionlessParams& p);

/// Fixed point of the requested type's return map.
/// Throws DegenerateError when ||Df| - 1| < 1e-12.
double fixed_point(const DimensionlessParams& p, OrbitType type);

enum class SolveStatus { ok, no_orbit, degenerate };

/// Non-throwing orbit solve for sweep/scan use. On SolveStatus::ok the
/// orbit is written to *out (which must be non-null).
SolveStatus try_solve_orbit(const DimensionlessParams& p, PeriodicOrbit* out);

/// Solves the period-Tp orbit, trying Type 1 first and Type 2 on failure.
/// Throws NoOrbitError when neither classification is consistent and
/// DegenerateError when the attempted type's |Df| is 1 within tolerance.
PeriodicOrbit solve_orbit(const DimensionlessParams& p);

/// Orbit position at tau in [0, Tp]. Exact at segment junctions: x(0) and
/// x(Tp) return x_f, switching times return the switching values.
double orbit_x_at(const PeriodicOrbit& o, double tau);

struct OrbitSample {
    double tau, x, y, p;
};

/// n >= 2 equally spaced samples of (tau, x, y, x*y) over one period.
std::vector<OrbitSample> sample_orbit(const PeriodicOrbit& o, int n);

}  // namespace pvboost
