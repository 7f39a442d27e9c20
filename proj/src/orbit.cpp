#include "pvboost/orbit.hpp"

#include <cmath>
#include <string>

namespace pvboost {

namespace {

constexpr double kDegenerateTol = 1e-12;

// R^(beta/alpha) with a repeated-multiplication fast path for the common
// case of an integer exponent (e.g. beta = 4 alpha).
double ratio_pow(double r, double e) {
    if (e == std::floor(e) && e >= 1.0 && e <= 32.0) {
        double acc = 1.0;
        auto n = static_cast<int>(e);
        double base = r;
        while (n > 0) {
            if (n & 1) acc *= base;
            base *= base;
            n >>= 1;
        }
        return acc;
    }
    return std::pow(r, e);
}

// Non-throwing Df1. Returns false (with a reason) when a ratio inside the
// power or the fraction is non-positive, i.e. no Type 1 orbit exists.
bool try_df1(const DimensionlessParams& p, double* df, const char** why) {
    const auto& a = p.aux;
    const double num1 = p.x_minus - a.a1;  // < 0 since x_minus < 1 < a1
    const double num2 = 1.0 - a.a2;
    const double den1 = 1.0 - a.a1;  // < 0
    const double den2 = p.x_minus - a.a2;
    if (num2 <= 0.0) {
        *why = "State-2 equilibrium a2 is not below the break point";
        return false;
    }
    if (den2 <= 0.0) {
        *why = "State-2 equilibrium a2 is not below the threshold";
        return false;
    }
    const double one_minus_b2 = 1.0 - a.b2;
    if (one_minus_b2 <= 0.0) {
        *why = "State-2 equilibrium b2 is not below the break point";
        return false;
    }
    const double ratio = (num1 * num2) / (den1 * den2);
    *df = ratio_pow(ratio, p.beta / p.alpha) * (1.0 - a.b1) / one_minus_b2 *
          std::exp(-p.beta * p.t_p);
    return true;
}

bool degenerate(double df) {
    return std::abs(std::abs(df) - 1.0) < kDegenerateTol;
}

double fixed_point_type1(const DimensionlessParams& p, double df) {
    return (p.aux.b1 - df * p.aux.b2) / (1.0 - df);
}

double fixed_point_type2(const DimensionlessParams& p, double df) {
    return (p.aux.a1 - df * p.aux.a2) / (1.0 - df);
}

}  // namespace

bool PeriodicOrbit::stable() const { return std::abs(df) < 1.0; }

double contraction_rate_type1(const DimensionlessParams& p) {
    double df = 0.0;
    const char* why = nullptr;
    if (!try_df1(p, &df, &why)) throw DomainError(why);
    return df;
}

double contraction_rate_type2(const DimensionlessParams& p) {
    const auto& a = p.aux;
    if (p.x_minus == a.a2)
        throw DomainError("threshold coincides with the State-2 equilibrium");
    return (p.x_minus - a.a1) / (p.x_minus - a.a2) * std::exp(-p.alpha * p.t_p);
}

double fixed_point(const DimensionlessParams& p, OrbitType type) {
    const double df = type == OrbitType::type1 ? contraction_rate_type1(p)
                                               : contraction_rate_type2(p);
    if (degenerate(df))
        throw DegenerateError("|Df| = 1 within tolerance, no fixed point");
    return type == OrbitType::type1 ? fixed_point_type1(p, df)
                                    : fixed_point_type2(p, df);
}

SolveStatus try_solve_orbit(const DimensionlessParams& p, PeriodicOrbit* out) {
    const auto& a = p.aux;

    // Type 1 first: the border x_f = 1 belongs to Type 1 by convention.
    double df1 = 0.0;
    const char* why = nullptr;
    if (try_df1(p, &df1, &why)) {
        if (degenerate(df1)) return SolveStatus::degenerate;
        const double x_f = fixed_point_type1(p, df1);
        if (x_f >= 1.0) {
            const double tau_a =
                std::log((x_f - a.b2) / (1.0 - a.b2)) / p.beta;
            const double tau_b =
                (std::log((1.0 - a.a2) / (p.x_minus - a.a2)) +
                 p.alpha * tau_a) /
                p.alpha;
            const double tau_c =
                (std::log((p.x_minus - a.a1) / (1.0 - a.a1)) +
                 p.alpha * tau_b) /
                p.alpha;
            if (tau_c <= p.t_p) {
                out->params = p;
                out->type = OrbitType::type1;
                out->x_f = x_f;
                out->tau_a = tau_a;
                out->tau_b = tau_b;
                out->tau_c = tau_c;
                out->tau_d = 0.0;
                out->df = df1;
                out->segments[0] = {0.0, tau_a, x_f, 1.0, p.beta, a.b2};
                out->segments[1] = {tau_a, tau_b, 1.0, p.x_minus, p.alpha,
                                    a.a2};
                out->segments[2] = {tau_b, tau_c, p.x_minus, 1.0, p.alpha,
                                    a.a1};
                out->segments[3] = {tau_c, p.t_p, 1.0, x_f, p.beta, a.b1};
                out->n_segments = 4;
                return SolveStatus::ok;
            }
        }
    }

    // Type 2: the whole orbit stays below the break point.
    if (p.x_minus != a.a2 && p.x_minus > a.a2) {
        const double df2 = contraction_rate_type2(p);
        if (degenerate(df2)) return SolveStatus::degenerate;
        const double x_f = fixed_point_type2(p, df2);
        if (x_f < 1.0 && x_f > p.x_minus) {
            const double tau_d =
                std::log((x_f - a.a2) / (p.x_minus - a.a2)) / p.alpha;
            if (tau_d > 0.0 && tau_d < p.t_p) {
                out->params = p;
                out->type = OrbitType::type2;
                out->x_f = x_f;
                out->tau_a = 0.0;
                out->tau_b = 0.0;
                out->tau_c = 0.0;
                out->tau_d = tau_d;
                out->df = df2;
                out->segments[0] = {0.0, tau_d, x_f, p.x_minus, p.alpha,
                                    a.a2};
                out->segments[1] = {tau_d, p.t_p, p.x_minus, x_f, p.alpha,
                                    a.a1};
                out->n_segments = 2;
                return SolveStatus::ok;
            }
        }
    }

    return SolveStatus::no_orbit;
}

PeriodicOrbit solve_orbit(const DimensionlessParams& p) {
    PeriodicOrbit orbit{p, OrbitType::type1, 0, 0, 0, 0, 0, 0, {}, 0};
    switch (try_solve_orbit(p, &orbit)) {
        case SolveStatus::ok:
            return orbit;
        case SolveStatus::degenerate:
            throw DegenerateError("|Df| = 1 within tolerance at q=" +
                                  std::to_string(p.q) +
                                  ", X_minus=" + std::to_string(p.x_minus));
        case SolveStatus::no_orbit:
        default:
            break;
    }
    std::string msg = "no period-T_p orbit at q=" + std::to_string(p.q) +
                      ", X_minus=" + std::to_string(p.x_minus);
    if (p.q <= 1.0)
        msg += " (q <= 1: State 2 cannot decay below the break point)";
    throw NoOrbitError(msg);
}

double orbit_x_at(const PeriodicOrbit& o, double tau) {
    if (tau <= 0.0) return o.x_f;
    for (int i = 0; i < o.n_segments; ++i) {
        const auto& s = o.segments[i];
        if (tau > s.tau1) continue;
        if (tau == s.tau0) return s.x0;
        if (tau == s.tau1) return s.x1;
        return (s.x0 - s.level) * std::exp(-s.rate * (tau - s.tau0)) + s.level;
    }
    return o.segments[o.n_segments - 1].x1;  // tau >= T_p
}

std::vector<OrbitSample> sample_orbit(const PeriodicOrbit& o, int n) {
    if (n < 2) throw DomainError("sample count must be at least 2");
    std::vector<OrbitSample> samples;
    samples.reserve(static_cast<std::size_t>(n));
    const double t_p = o.params.t_p;
    for (int k = 0; k < n; ++k) {
        const double tau =
            k == n - 1 ? t_p : t_p * static_cast<double>(k) / (n - 1);
        const double x = orbit_x_at(o, tau);
        const double y = pv_curve(o.params, x);
        samples.push_back({tau, x, y, x * y});
    }
    return samples;
}

}  // namespace pvboost
