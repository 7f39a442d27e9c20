#include "pvboost/validate.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "pvboost/objectives.hpp"
#include "pvboost/rng.hpp"

namespace pvboost {

ValidationReport run_validation(int n, std::uint64_t seed,
                                const LatticeSpec& box,
                                const FixedParams& fixed,
                                const SimOptions& opts, double tolerance) {
    if (n < 1) throw ConfigError("validation needs at least one point");
    ValidationReport report;
    report.tolerance = tolerance;
    Rng rng(seed);

    auto record = [&](double q, double x, const char* quantity, double cf,
                      double oracle) {
        const double err = std::abs(cf - oracle);
        report.records.push_back({q, x, quantity, cf, oracle, err});
        report.max_abs_err = std::max(report.max_abs_err, err);
    };

    int found = 0;
    int attempts = 0;
    const int max_attempts = n * 10000;
    while (found < n && attempts < max_attempts) {
        ++attempts;
        const double q = rng.uniform(box.q_min, box.q_max);
        const double x = rng.uniform(box.x_min, box.x_max);
        PeriodicOrbit orbit{DimensionlessParams(fixed.t_p, fixed.alpha,
                                                fixed.beta, 0.5, 2.0),
                            OrbitType::type1, 0, 0, 0, 0, 0, 0, {}, 0};
        try {
            const DimensionlessParams p(fixed.t_p, fixed.alpha, fixed.beta, x,
                                        q);
            if (try_solve_orbit(p, &orbit) != SolveStatus::ok) continue;
            if (!orbit.stable()) continue;

            // Two return-map evaluations pin the affine map exactly, but
            // both probes must stay inside the accepted type's basin:
            // above the break point for Type 1, between the threshold and
            // the break point for Type 2.
            const double gap =
                orbit.type == OrbitType::type1
                    ? orbit.x_f - 1.0
                    : std::min(orbit.x_f - p.x_minus, 1.0 - orbit.x_f);
            const double delta = std::min(0.005, 0.5 * gap);
            if (delta < 1e-6) continue;  // too close to a basin boundary
            ++found;

            const MeasuredFixedPoint m = measure_fixed_point(
                p, orbit.x_f - delta, orbit.x_f + delta, opts);
            record(q, x, "x_f", orbit.x_f, m.x_f);
            record(q, x, "df", orbit.df, m.df);

            const double p_avg = average_power(orbit);
            const double p_oracle = measure_average_power(p, orbit.x_f, opts);
            record(q, x, "average_power", p_avg, p_oracle);
        } catch (const DomainError&) {
            continue;
        }
    }
    if (found < n)
        throw DomainError(
            "could not draw enough feasible stable points from the box");
    return report;
}

void write_validation_report(const ValidationReport& report,
                             const std::filesystem::path& file) {
    nlohmann::json j;
    j["tolerance"] = report.tolerance;
    j["max_abs_err"] = report.max_abs_err;
    j["passed"] = report.passed();
    auto& records = j["records"] = nlohmann::json::array();
    for (const auto& r : report.records) {
        records.push_back({{"point", {{"q", r.q}, {"x_minus", r.x_minus}}},
                           {"quantity", r.quantity},
                           {"closed_form", r.closed_form},
                           {"oracle", r.oracle},
                           {"abs_err", r.abs_err}});
    }
    std::ofstream f(file, std::ios::binary);
    f << j.dump(2) << '\n';
}

}  // namespace pvboost
