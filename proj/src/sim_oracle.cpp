#include "pvboost/sim_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "pvboost/csv.hpp"

namespace pvboost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double advance(double x, double rate, double level, double dt) {
    return (x - level) * std::exp(-rate * dt) + level;
}

// Time for (x - level) e^{-rate t} + level to reach target, +inf when the
// decay never gets there.
double time_to_reach(double x, double rate, double level, double target) {
    const double from = x - level;
    const double to = target - level;
    if (from == 0.0 || to == 0.0) return kInf;
    const double ratio = from / to;
    if (ratio <= 1.0) return kInf;
    return std::log(ratio) / rate;
}

// One linear hop of the exact-step backend:
// x(tau) = (x0 - level) e^{-rate (tau - tau0)} + level on [tau0, tau1].
struct Hop {
    double tau0, tau1;
    double x0, x1;
    double rate, level;
    int state;
};

// Runs the switched system with per-piece exact solutions and analytic
// event times. hop_cb sees every linear piece; event_cb sees clock and
// threshold events.
template <typename HopCb, typename EventCb>
void step_exact(const DimensionlessParams& p, double x0, int state0,
                double tau_end, HopCb&& hop_cb, EventCb&& event_cb) {
    const auto& a = p.aux;
    double tau = 0.0;
    double x = x0;
    int state = state0;
    double state2_entry = state == 2 ? 0.0 : 0.0;
    long next_clock = 1;

    while (tau < tau_end) {
        if (state == 1) {
            const bool below = x < 1.0;
            const double rate = below ? p.alpha : p.beta;
            const double level = below ? a.a1 : a.b1;
            const double t_clock = static_cast<double>(next_clock) * p.t_p;
            double t_next = std::min(t_clock, tau_end);
            double t_hit1 = kInf;
            if (below) {
                const double dt = time_to_reach(x, rate, level, 1.0);
                if (dt < kInf) t_hit1 = tau + dt;
            }
            if (t_hit1 < t_next) {
                hop_cb(Hop{tau, t_hit1, x, 1.0, rate, level, state});
                tau = t_hit1;
                x = 1.0;
                continue;
            }
            const double x_next = advance(x, rate, level, t_next - tau);
            hop_cb(Hop{tau, t_next, x, x_next, rate, level, state});
            tau = t_next;
            x = x_next;
            if (t_next == t_clock) {
                event_cb(SimEvent{tau, SimEventKind::clock});
                state = 2;
                state2_entry = tau;
                ++next_clock;
            }
        } else {
            if (x <= p.x_minus) {
                // Already at or below the threshold: switch immediately.
                event_cb(SimEvent{tau, SimEventKind::threshold});
                state = 1;
                x = std::min(x, p.x_minus);
                next_clock = static_cast<long>(std::floor(tau / p.t_p)) + 1;
                while (static_cast<double>(next_clock) * p.t_p <= tau)
                    ++next_clock;
                continue;
            }
            // At the break point the State-2 motion direction is the sign
            // of 1 - q: falling continues on the lower branch, rising
            // (q < 1) enters the upper one.
            const bool above = x > 1.0 || (x == 1.0 && p.q < 1.0);
            const double rate = above ? p.beta : p.alpha;
            const double level = above ? a.b2 : a.a2;
            const double deadline = state2_entry + p.t_p;

            double t_thr = kInf;
            {
                const double dt = time_to_reach(x, rate, level, p.x_minus);
                if (dt < kInf) t_thr = tau + dt;
            }
            // Break-point crossing from either side (State 2 can rise
            // toward an equilibrium above the break when q < 1).
            double t_hit1 = kInf;
            if (x != 1.0) {
                const double dt = time_to_reach(x, rate, level, 1.0);
                if (dt < kInf) t_hit1 = tau + dt;
            }
            // A threshold hit exactly at the deadline still counts; a
            // deadline reached first (including ties with tau_end) is a
            // stall.
            if (t_thr <= std::min({tau_end, t_hit1, deadline})) {
                hop_cb(Hop{tau, t_thr, x, p.x_minus, rate, level, state});
                tau = t_thr;
                x = p.x_minus;
                event_cb(SimEvent{tau, SimEventKind::threshold});
                state = 1;
                next_clock = static_cast<long>(std::floor(tau / p.t_p)) + 1;
                while (static_cast<double>(next_clock) * p.t_p <= tau)
                    ++next_clock;
            } else if (t_hit1 <= std::min(tau_end, deadline)) {
                hop_cb(Hop{tau, t_hit1, x, 1.0, rate, level, state});
                tau = t_hit1;
                x = 1.0;
            } else if (deadline <= tau_end) {
                throw EventStallError(
                    "State 2 found no threshold crossing within one period");
            } else {
                const double x_next = advance(x, rate, level, tau_end - tau);
                hop_cb(Hop{tau, tau_end, x, x_next, rate, level, state});
                tau = tau_end;
                x = x_next;
            }
        }
    }
}

// ---------------------------------------------------------------------
// Adaptive Runge-Kutta backend (Cash-Karp 4(5) on the augmented state
// (x, E) with E' = x y(x)). Shares no orbit algebra with the exact path.
// ---------------------------------------------------------------------

struct RkState {
    double x;
    double e;
};

double rhs_x(const DimensionlessParams& p, int state, double x) {
    const double y = x < 1.0 ? -p.alpha * (x - 1.0) + 1.0
                             : -p.beta * (x - 1.0) + 1.0;
    return state == 1 ? y : y - p.q;
}

double power_of(const DimensionlessParams& p, double x) {
    const double y = x < 1.0 ? -p.alpha * (x - 1.0) + 1.0
                             : -p.beta * (x - 1.0) + 1.0;
    return x * y;
}

// One Cash-Karp step; returns the 5th-order result and the error estimate.
RkState rk_step(const DimensionlessParams& p, int state, const RkState& s,
                double h, double* err) {
    auto f = [&](const RkState& v) -> RkState {
        return {rhs_x(p, state, v.x), power_of(p, v.x)};
    };
    auto madd = [](const RkState& v, std::initializer_list<double> cs,
                   std::initializer_list<const RkState*> ks, double h) {
        RkState r = v;
        auto c = cs.begin();
        for (const RkState* k : ks) {
            r.x += h * *c * k->x;
            r.e += h * *c * k->e;
            ++c;
        }
        return r;
    };
    const RkState k1 = f(s);
    const RkState k2 = f(madd(s, {1.0 / 5}, {&k1}, h));
    const RkState k3 = f(madd(s, {3.0 / 40, 9.0 / 40}, {&k1, &k2}, h));
    const RkState k4 =
        f(madd(s, {3.0 / 10, -9.0 / 10, 6.0 / 5}, {&k1, &k2, &k3}, h));
    const RkState k5 = f(madd(s, {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27},
                              {&k1, &k2, &k3, &k4}, h));
    const RkState k6 = f(madd(s,
                              {1631.0 / 55296, 175.0 / 512, 575.0 / 13824,
                               44275.0 / 110592, 253.0 / 4096},
                              {&k1, &k2, &k3, &k4, &k5}, h));
    const RkState y5 = madd(
        s, {37.0 / 378, 0.0, 250.0 / 621, 125.0 / 594, 0.0, 512.0 / 1771},
        {&k1, &k2, &k3, &k4, &k5, &k6}, h);
    const RkState y4 = madd(s,
                            {2825.0 / 27648, 0.0, 18575.0 / 48384,
                             13525.0 / 55296, 277.0 / 14336, 1.0 / 4},
                            {&k1, &k2, &k3, &k4, &k5, &k6}, h);
    *err = std::abs(y5.x - y4.x);
    return y5;
}

// Integrates from (tau0, s0) to tau1 within one smooth piece.
RkState rk_span(const DimensionlessParams& p, int state, double tau0,
                RkState s0, double tau1, double step_tol) {
    double tau = tau0;
    RkState s = s0;
    double h = std::min(1e-3, tau1 - tau0);
    while (tau < tau1) {
        h = std::min(h, tau1 - tau);
        if (h <= 0.0) break;
        double err = 0.0;
        const RkState next = rk_step(p, state, s, h, &err);
        if (err > step_tol && h > 1e-14) {
            h *= 0.5;
            continue;
        }
        tau += h;
        s = next;
        if (err < step_tol / 32.0) h *= 2.0;
    }
    return s;
}

template <typename HopCb, typename EventCb>
RkState step_rk(const DimensionlessParams& p, double x0, int state0,
                double tau_end, double ev_tol, HopCb&& hop_cb,
                EventCb&& event_cb) {
    const double step_tol = std::min(1e-12, ev_tol * 1e-2);
    double tau = 0.0;
    RkState s{x0, 0.0};
    int state = state0;
    double state2_entry = 0.0;
    long next_clock = 1;

    // Locates g(x) = 0 inside (tau_lo, tau_hi] by bisection, integrating
    // from the left endpoint each probe.
    auto localize = [&](double tau_lo, RkState s_lo, double tau_hi,
                        auto&& g) {
        double lo = tau_lo, hi = tau_hi;
        while (hi - lo > ev_tol) {
            const double mid = 0.5 * (lo + hi);
            const RkState sm = rk_span(p, state, tau_lo, s_lo, mid, step_tol);
            if (g(sm.x) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    while (tau < tau_end) {
        const double t_clock = static_cast<double>(next_clock) * p.t_p;
        const double deadline = state2_entry + p.t_p;
        double cap = tau_end;
        if (state == 1) cap = std::min(cap, t_clock);
        if (state == 2) cap = std::min(cap, deadline);

        double h = std::min(1e-2, cap - tau);
        double err = 0.0;
        RkState next = rk_step(p, state, s, h, &err);
        while (err > step_tol && h > 1e-14) {
            h *= 0.5;
            next = rk_step(p, state, s, h, &err);
        }
        double tau_next = tau + h;

        // Break-point crossing: stop exactly on it so the kink in y(x)
        // never sits inside an accepted step.
        if ((s.x - 1.0) * (next.x - 1.0) < 0.0) {
            const double sign = s.x > 1.0 ? 1.0 : -1.0;
            const double t_hit = localize(
                tau, s, tau_next, [&](double x) { return sign * (x - 1.0); });
            RkState sh = rk_span(p, state, tau, s, t_hit, step_tol);
            sh.x = 1.0;
            hop_cb(Hop{tau, t_hit, s.x, sh.x, 0.0, 0.0, state});
            tau = t_hit;
            s = sh;
            continue;
        }

        // Threshold crossing in State 2.
        if (state == 2 &&
            (next.x <= p.x_minus ||
             (s.x - p.x_minus) * (next.x - p.x_minus) < 0.0)) {
            const double t_hit =
                localize(tau, s, tau_next,
                         [&](double x) { return x - p.x_minus; });
            RkState sh = rk_span(p, state, tau, s, t_hit, step_tol);
            sh.x = p.x_minus;
            hop_cb(Hop{tau, t_hit, s.x, sh.x, 0.0, 0.0, state});
            tau = t_hit;
            s = sh;
            event_cb(SimEvent{tau, SimEventKind::threshold});
            state = 1;
            next_clock = static_cast<long>(std::floor(tau / p.t_p)) + 1;
            while (static_cast<double>(next_clock) * p.t_p <= tau)
                ++next_clock;
            continue;
        }

        hop_cb(Hop{tau, tau_next, s.x, next.x, 0.0, 0.0, state});
        tau = tau_next;
        s = next;

        if (state == 1 && tau >= t_clock) {
            tau = t_clock;
            event_cb(SimEvent{tau, SimEventKind::clock});
            state = 2;
            state2_entry = tau;
            ++next_clock;
        } else if (state == 2 && tau >= deadline) {
            throw EventStallError(
                "State 2 found no threshold crossing within one period");
        }
    }
    return s;
}

template <typename HopCb, typename EventCb>
void run_backend(const DimensionlessParams& p, double x0, int state0,
                 double tau_end, const SimOptions& opts, HopCb&& hop_cb,
                 EventCb&& event_cb) {
    if (!(x0 > 0.0)) throw DomainError("x0 must be positive");
    if (!(tau_end > 0.0)) throw DomainError("tau_end must be positive");
    if (!(opts.tol > 0.0)) throw DomainError("tolerance must be positive");
    if (state0 != 1 && state0 != 2)
        throw DomainError("state must be 1 or 2");
    if (opts.kind == IntegratorKind::exact_step)
        step_exact(p, x0, state0, tau_end, hop_cb, event_cb);
    else
        step_rk(p, x0, state0, tau_end, opts.tol, hop_cb, event_cb);
}

// Adaptive Simpson quadrature of f over [a, b].
template <typename F>
double simpson_rec(F&& f, double a, double fa, double b, double fb, double fm,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, fm, whole, tol, 40);
}

}  // namespace

SimTrace integrate(const DimensionlessParams& p, double x0, int state0,
                   double tau_end, const SimOptions& opts) {
    SimTrace trace;
    int state = state0;
    trace.samples.push_back({0.0, x0, state0});
    run_backend(
        p, x0, state0, tau_end, opts,
        [&](const Hop& h) {
            trace.samples.push_back({h.tau1, h.x1, h.state});
        },
        [&](const SimEvent& e) {
            state = state == 1 ? 2 : 1;
            trace.events.push_back(e);
            if (!trace.samples.empty())
                trace.samples.back().state = state;
        });
    return trace;
}

double return_map(const DimensionlessParams& p, double x0,
                  const SimOptions& opts) {
    double x_end = x0;
    run_backend(
        p, x0, 2, p.t_p, opts,
        [&](const Hop& h) { x_end = h.x1; }, [](const SimEvent&) {});
    return x_end;
}

MeasuredFixedPoint measure_fixed_point(const DimensionlessParams& p,
                                       double x_lo, double x_hi,
                                       const SimOptions& opts) {
    if (!(x_hi > x_lo)) throw DomainError("need x_hi > x_lo");
    const double m_lo = return_map(p, x_lo, opts);
    const double m_hi = return_map(p, x_hi, opts);
    const double df = (m_hi - m_lo) / (x_hi - x_lo);
    return {(m_lo - df * x_lo) / (1.0 - df), df};
}

double measure_average_power(const DimensionlessParams& p, double x_start,
                             const SimOptions& opts) {
    double energy = 0.0;
    if (opts.kind == IntegratorKind::exact_step) {
        run_backend(
            p, x_start, 2, p.t_p, opts,
            [&](const Hop& h) {
                auto integrand = [&](double tau) {
                    const double x =
                        advance(h.x0, h.rate, h.level, tau - h.tau0);
                    return power_of(p, x);
                };
                energy += adaptive_simpson(integrand, h.tau0, h.tau1, 1e-10);
            },
            [](const SimEvent&) {});
    } else {
        // The augmented RK state already carries the energy integral.
        const RkState end = step_rk(
            p, x_start, 2, p.t_p, opts.tol, [](const Hop&) {},
            [](const SimEvent&) {});
        energy = end.e;
    }
    return energy / p.t_p;
}

void write_trace_csv(const SimTrace& trace,
                     const std::filesystem::path& file) {
    std::ofstream f(file, std::ios::binary);
    f << "tau,x,state\n";
    std::string buf;
    for (const auto& s : trace.samples) {
        append_double(buf, s.tau);
        buf.push_back(',');
        append_double(buf, s.x);
        buf.push_back(',');
        buf.push_back(s.state == 1 ? '1' : '2');
        buf.push_back('\n');
    }
    f << buf;
}

std::vector<double> trajectory(const DimensionlessParams& p, double x0,
                               int state0, std::span<const double> taus,
                               const SimOptions& opts) {
    std::vector<double> out(taus.size(),
                            std::numeric_limits<double>::quiet_NaN());
    if (taus.empty()) return out;
    std::size_t next = 0;
    while (next < taus.size() && taus[next] <= 0.0) out[next++] = x0;
    const double tau_end = taus.back() > 0.0 ? taus.back() : p.t_p;

    if (opts.kind == IntegratorKind::exact_step) {
        run_backend(
            p, x0, state0, tau_end, opts,
            [&](const Hop& h) {
                while (next < taus.size() && taus[next] <= h.tau1) {
                    out[next] =
                        taus[next] == h.tau1
                            ? h.x1
                            : advance(h.x0, h.rate, h.level,
                                      taus[next] - h.tau0);
                    ++next;
                }
            },
            [](const SimEvent&) {});
    } else {
        // Piece endpoints from the adaptive backend; fill grid points by
        // short RK integrations inside each accepted piece.
        step_rk(
            p, x0, state0, tau_end, opts.tol,
            [&](const Hop& h) {
                while (next < taus.size() && taus[next] <= h.tau1) {
                    if (taus[next] == h.tau1) {
                        out[next] = h.x1;
                    } else {
                        const RkState s = rk_span(
                            p, h.state, h.tau0, RkState{h.x0, 0.0},
                            taus[next], std::min(1e-12, opts.tol * 1e-2));
                        out[next] = s.x;
                    }
                    ++next;
                }
            },
            [](const SimEvent&) {});
    }
    return out;
}

}  // namespace pvboost
