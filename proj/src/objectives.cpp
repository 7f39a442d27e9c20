#include "pvboost/objectives.hpp"

#include <cmath>

namespace pvboost {

double average_power_type1(const PeriodicOrbit& o) {
    if (o.type != OrbitType::type1)
        throw TypeMismatchError("average_power_type1 needs a Type 1 orbit");
    const auto& p = o.params;
    const auto& a = p.aux;
    return p.q / p.t_p *
           ((1.0 - p.x_minus) / p.alpha + (o.x_f - 1.0) / p.beta +
            a.a2 * (o.tau_b - o.tau_a) + a.b2 * o.tau_a);
}

double average_power_type2(const PeriodicOrbit& o) {
    if (o.type != OrbitType::type2)
        throw TypeMismatchError("average_power_type2 needs a Type 2 orbit");
    const auto& p = o.params;
    return p.q / p.t_p *
           ((o.x_f - p.x_minus) / p.alpha + p.aux.a2 * o.tau_d);
}

double average_power(const PeriodicOrbit& o) {
    return o.type == OrbitType::type1 ? average_power_type1(o)
                                      : average_power_type2(o);
}

ObjectivePoint evaluate(const DimensionlessParams& p) {
    const PeriodicOrbit orbit = solve_orbit(p);
    return {p, orbit.type, orbit.df, 1.0 - std::abs(orbit.df),
            average_power(orbit)};
}

bool EvalResult::stable() const {
    return status == SolveStatus::ok && std::abs(df) < 1.0;
}

EvalResult try_evaluate(const DimensionlessParams& p) {
    PeriodicOrbit orbit{p, OrbitType::type1, 0, 0, 0, 0, 0, 0, {}, 0};
    EvalResult r;
    r.status = try_solve_orbit(p, &orbit);
    if (r.status != SolveStatus::ok) return r;
    r.type = orbit.type;
    r.df = orbit.df;
    r.f1 = 1.0 - std::abs(orbit.df);
    r.f2 = average_power(orbit);
    return r;
}

}  // namespace pvboost
