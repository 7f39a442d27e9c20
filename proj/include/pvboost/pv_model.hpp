#pragma once

#include <nlohmann/json_fwd.hpp>

#include "pvboost/errors.hpp"

namespace pvboost {

/// Equilibrium levels of the four linear pieces of the switched ODE.
/// State 1 relaxes toward a1 (below the break point) or b1 (above it);
/// State 2 relaxes toward a2 / b2.
struct AuxConstants {
    double a1 = 0.0;  ///< (alpha+1)/alpha, always > 1
    double a2 = 0.0;  ///< (alpha+1-q)/alpha
    double b1 = 0.0;  ///< (beta+1)/beta, always > 1
    double b2 = 0.0;  ///< (beta+1-q)/beta
};

/// The five dimensionless parameters that fully define the system,
/// with the equilibrium levels cached alongside.
///
/// Construction rejects t_p/alpha/beta <= 0, x_minus outside (0,1) and
/// q <= 0. Values of q in (0,1] are constructible but never admit a
/// period-Tp orbit; that is reported by the orbit solver, not here.
struct DimensionlessParams {
    double t_p;      ///< dimensionless clock period
    double alpha;    ///< PV-curve slope below the break point
    double beta;     ///< PV-curve slope above the break point
    double x_minus;  ///< dimensionless lower current threshold
    double q;        ///< dimensionless output voltage
    AuxConstants aux;

    DimensionlessParams(double t_p, double alpha, double beta, double x_minus,
                        double q);
};

/// Physical boost-converter circuit with piecewise-linear PV input.
/// All values in SI units.
struct PhysicalCircuit {
    double i_s = 0.0;      ///< photo-generated current (A)
    double v_t = 0.0;      ///< diode threshold voltage (V)
    double g_d = 0.0;      ///< diode on-conductance (S)
    double r_s = 0.0;      ///< series resistance (ohm)
    double r_p = 0.0;      ///< shunt resistance (ohm)
    double l = 0.0;        ///< inductance (H)
    double t = 0.0;        ///< clock period (s)
    double i_minus = 0.0;  ///< lower current threshold (A)
    double v_o = 0.0;      ///< output voltage (V)

    /// Open-circuit corner current I_p = I_s - V_T/R_p.
    double peak_current() const { return i_s - v_t / r_p; }
    /// Corner voltage V_p = (1 + R_s/R_p) V_T - R_s I_s.
    double peak_voltage() const { return (1.0 + r_s / r_p) * v_t - r_s * i_s; }
};

/// Piecewise-linear diode: g_d (v_d - V_T) when conducting, 0 when blocked.
/// Continuous at v_d = V_T.
double reduce_diode(double g_d, double v_t, double v_d);

/// Maps a physical circuit to the five dimensionless parameters.
/// Throws DomainError when the circuit invariants fail (R_p, L, T must be
/// positive; g_d, R_s non-negative; I_p and V_p must come out positive).
DimensionlessParams to_dimensionless(const PhysicalCircuit& c);

/// Dimensionless PV voltage y(x). Defined for x > 0 only; continuous at
/// the break point x = 1 where y(1) = 1 exactly.
double pv_curve(const DimensionlessParams& p, double x);

/// Parses a dimensionless parameter document with exactly the keys
/// T_p, alpha, beta, X_minus, q. Unknown keys are rejected.
DimensionlessParams params_from_json(const nlohmann::json& j);

/// Parses a physical circuit document with exactly the keys
/// I_s, V_T, g_d, R_s, R_p, L, T, I_minus, V_o. Unknown keys are rejected.
PhysicalCircuit circuit_from_json(const nlohmann::json& j);

/// Accepts either document form and returns dimensionless parameters,
/// converting a circuit through to_dimensionless.
DimensionlessParams params_or_circuit_from_json(const nlohmann::json& j);

}  // namespace pvboost
