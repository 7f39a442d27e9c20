#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "pvboost/pv_model.hpp"

namespace pvboost {

/// Integration backend. Exact stepping solves each linear piece in closed
/// form with analytic event times; the adaptive backend is a generic
/// embedded Runge-Kutta integrator with bisection event localization that
/// shares no orbit algebra with the rest of the library.
enum class IntegratorKind { exact_step, adaptive_rk };

struct SimOptions {
    IntegratorKind kind = IntegratorKind::exact_step;
    double tol = 1e-10;  ///< event localization tolerance in tau
};

enum class SimEventKind { clock, threshold };

struct SimEvent {
    double tau;
    SimEventKind kind;
};

struct SimSample {
    double tau;
    double x;
    int state;  ///< 1 or 2
};

/// Trajectory of the switched system. Samples are recorded at the start,
/// at every internal step boundary (including break-point crossings) and
/// at the end; state changes only at recorded events.
struct SimTrace {
    std::vector<SimSample> samples;
    std::vector<SimEvent> events;
};

/// Integrates dx/dtau = y(x) (State 1) / y(x) - q (State 2) with the
/// switching rule: State 1 -> State 2 at tau = n Tp, State 2 -> State 1
/// when x falls to x_minus. Throws EventStallError when State 2 persists
/// longer than one full period without a threshold crossing.
SimTrace integrate(const DimensionlessParams& p, double x0, int state0,
                   double tau_end, const SimOptions& opts = {});

/// One-period stroboscopic map x(0) -> x(Tp), starting in State 2 as the
/// clock has just fired.
double return_map(const DimensionlessParams& p, double x0,
                  const SimOptions& opts = {});

/// Fixed point and slope of the return map measured from two evaluations.
/// The map is affine within one type's basin, so two points determine it.
struct MeasuredFixedPoint {
    double x_f;
    double df;
};

MeasuredFixedPoint measure_fixed_point(const DimensionlessParams& p,
                                       double x_lo, double x_hi,
                                       const SimOptions& opts = {});

/// Average input power over one period starting at x_start (State 2),
/// obtained by numerical quadrature along the integrated trajectory.
double measure_average_power(const DimensionlessParams& p, double x_start,
                             const SimOptions& opts = {});

/// Trajectory values at the requested times (ascending, within
/// [0, tau_end] = [0, taus.back()]).
std::vector<double> trajectory(const DimensionlessParams& p, double x0,
                               int state0, std::span<const double> taus,
                               const SimOptions& opts = {});

/// Writes a trace as CSV with header tau,x,state.
void write_trace_csv(const SimTrace& trace,
                     const std::filesystem::path& file);

}  // namespace pvboost
