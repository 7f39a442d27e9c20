#include "pvboost/scan.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pvboost/csv.hpp"

namespace pvboost {

namespace {

constexpr int kChunkColumns = 64;      // fixed so results never depend on threads
constexpr double kBorderTol = 1e-9;    // |x_f - 1| resp. ||Df| - 1| at borders
constexpr int kBisectMaxIter = 80;

DimensionlessParams make_params(const FixedParams& fixed, double q,
                                double x_minus) {
    return DimensionlessParams(fixed.t_p, fixed.alpha, fixed.beta, x_minus, q);
}

PointStatus status_of(const EvalResult& ev) {
    switch (ev.status) {
        case SolveStatus::no_orbit:
            return PointStatus::no_orbit;
        case SolveStatus::degenerate:
            return PointStatus::degenerate;
        case SolveStatus::ok:
            break;
    }
    const bool stable = std::abs(ev.df) < 1.0;
    if (ev.type == OrbitType::type1)
        return stable ? PointStatus::type1_stable : PointStatus::type1_unstable;
    return stable ? PointStatus::type2_stable : PointStatus::type2_unstable;
}

void append_lattice_row(std::string& out, double q, double x,
                        const EvalResult& ev) {
    append_double(out, q);
    out.push_back(',');
    append_double(out, x);
    if (ev.feasible()) {
        out.push_back(',');
        out.push_back(ev.type == OrbitType::type1 ? '1' : '2');
        out.push_back(',');
        append_double(out, ev.df);
        out.push_back(',');
        append_double(out, ev.f1);
        out.push_back(',');
        append_double(out, ev.f2);
        out += ",1\n";
    } else {
        out += ",,,,,0\n";
    }
}

struct Classified {
    bool ok = false;
    OrbitType type = OrbitType::type1;
    double x_f = 0.0;
    double df = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

Classified classify(const FixedParams& fixed, double q, double x_minus) {
    Classified c;
    try {
        const DimensionlessParams p = make_params(fixed, q, x_minus);
        PeriodicOrbit orbit{p, OrbitType::type1, 0, 0, 0, 0, 0, 0, {}, 0};
        if (try_solve_orbit(p, &orbit) != SolveStatus::ok) return c;
        c.ok = true;
        c.type = orbit.type;
        c.x_f = orbit.x_f;
        c.df = orbit.df;
        c.f1 = 1.0 - std::abs(orbit.df);
        c.f2 = average_power(orbit);
    } catch (const DomainError&) {
    }
    return c;
}

ParamPoint midpoint(ParamPoint a, ParamPoint b) {
    return {0.5 * (a.q + b.q), 0.5 * (a.x_minus + b.x_minus)};
}

// Bisection between a Type 1 and a Type 2 point down to |x_f - 1| < tol.
ParamPoint refine_type_border(const FixedParams& fixed, ParamPoint p_t1,
                              ParamPoint p_t2) {
    ParamPoint mid = midpoint(p_t1, p_t2);
    for (int it = 0; it < kBisectMaxIter; ++it) {
        mid = midpoint(p_t1, p_t2);
        const Classified c = classify(fixed, mid.q, mid.x_minus);
        if (c.ok && std::abs(c.x_f - 1.0) < kBorderTol) return mid;
        const bool t1_side = c.ok && c.type == OrbitType::type1;
        if (t1_side)
            p_t1 = mid;
        else
            p_t2 = mid;
    }
    return mid;
}

// Bisection between a stable and an unstable point down to
// ||Df| - 1| < tol for the accepted orbit's contraction rate. |Df| is
// continuous across the type border (both formulas give 1/(q-1) there),
// so the accepted-type margin crosses zero exactly once on the segment.
ParamPoint refine_stability_border(const FixedParams& fixed,
                                   ParamPoint p_stable,
                                   ParamPoint p_unstable) {
    ParamPoint mid = midpoint(p_stable, p_unstable);
    for (int it = 0; it < kBisectMaxIter; ++it) {
        mid = midpoint(p_stable, p_unstable);
        const Classified c = classify(fixed, mid.q, mid.x_minus);
        if (c.ok && std::abs(std::abs(c.df) - 1.0) < kBorderTol) return mid;
        const bool stable_side = c.ok && std::abs(c.df) < 1.0;
        if (stable_side)
            p_stable = mid;
        else
            p_unstable = mid;
    }
    return mid;
}

// ---------------------------------------------------------------------
// Border polyline assembly: marching over lattice cells, pairing the
// refined edge crossings inside each cell and chaining them into paths.
// ---------------------------------------------------------------------

struct BorderBuild {
    std::vector<ParamPoint> nodes;
    std::vector<std::vector<int>> adj;

    int add_node(ParamPoint pt) {
        nodes.push_back(pt);
        adj.emplace_back();
        return static_cast<int>(nodes.size()) - 1;
    }
    void connect(int u, int v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
};

// corner_class: -1 when the field is undefined at the lattice point,
// otherwise 0/1. corner_level breaks saddle ties (the diagonal with the
// larger level is treated as connected). refine maps a sign-change
// lattice edge to the refined crossing point.
std::vector<std::vector<ParamPoint>> march_border(
    int n_q, int n_x, const std::function<int(int, int)>& corner_class,
    const std::function<double(int, int)>& corner_level,
    const std::function<ParamPoint(int, int, int, int)>& refine) {
    BorderBuild b;
    std::unordered_map<long long, int> h_nodes, v_nodes;
    auto key = [n_x](int i, int j) {
        return static_cast<long long>(i) * n_x + j;
    };

    for (int i = 0; i + 1 < n_q; ++i) {
        for (int j = 0; j < n_x; ++j) {
            const int c0 = corner_class(i, j), c1 = corner_class(i + 1, j);
            if (c0 >= 0 && c1 >= 0 && c0 != c1)
                h_nodes[key(i, j)] = b.add_node(refine(i, j, i + 1, j));
        }
    }
    for (int i = 0; i < n_q; ++i) {
        for (int j = 0; j + 1 < n_x; ++j) {
            const int c0 = corner_class(i, j), c1 = corner_class(i, j + 1);
            if (c0 >= 0 && c1 >= 0 && c0 != c1)
                v_nodes[key(i, j)] = b.add_node(refine(i, j, i, j + 1));
        }
    }

    auto lookup = [](const std::unordered_map<long long, int>& m,
                     long long k) {
        const auto it = m.find(k);
        return it == m.end() ? -1 : it->second;
    };

    for (int i = 0; i + 1 < n_q; ++i) {
        for (int j = 0; j + 1 < n_x; ++j) {
            const int bottom = lookup(h_nodes, key(i, j));
            const int top = lookup(h_nodes, key(i, j + 1));
            const int left = lookup(v_nodes, key(i, j));
            const int right = lookup(v_nodes, key(i + 1, j));
            int present[4];
            int n = 0;
            if (bottom >= 0) present[n++] = bottom;
            if (top >= 0) present[n++] = top;
            if (left >= 0) present[n++] = left;
            if (right >= 0) present[n++] = right;
            if (n == 2) {
                b.connect(present[0], present[1]);
            } else if (n == 4) {
                const double d_main =
                    corner_level(i, j) + corner_level(i + 1, j + 1);
                const double d_anti =
                    corner_level(i + 1, j) + corner_level(i, j + 1);
                if (d_main >= d_anti) {
                    b.connect(bottom, right);
                    b.connect(left, top);
                } else {
                    b.connect(bottom, left);
                    b.connect(top, right);
                }
            }
        }
    }

    // Chain crossings into polylines: open paths first, then cycles.
    const int n_nodes = static_cast<int>(b.nodes.size());
    std::vector<bool> used(n_nodes, false);
    std::vector<std::vector<ParamPoint>> polylines;
    auto walk = [&](int start) {
        std::vector<ParamPoint> line;
        int prev = -1, cur = start;
        while (cur >= 0 && !used[cur]) {
            used[cur] = true;
            line.push_back(b.nodes[cur]);
            int next = -1;
            for (int nb : b.adj[cur])
                if (nb != prev && !used[nb]) {
                    next = nb;
                    break;
                }
            prev = cur;
            cur = next;
        }
        if (line.size() >= 2) polylines.push_back(std::move(line));
    };
    for (int v = 0; v < n_nodes; ++v)
        if (!used[v] && b.adj[v].size() == 1) walk(v);
    for (int v = 0; v < n_nodes; ++v)
        if (!used[v] && !b.adj[v].empty()) walk(v);
    return polylines;
}

bool dominated_by_any(ObjectivePair u, std::span<const FrontPoint> pts) {
    for (const auto& p : pts)
        if (dominates({p.f1, p.f2}, u)) return true;
    return false;
}

}  // namespace

bool status_feasible(PointStatus s) {
    return s != PointStatus::no_orbit && s != PointStatus::degenerate;
}

bool status_stable(PointStatus s) {
    return s == PointStatus::type1_stable || s == PointStatus::type2_stable;
}

int axis_point_count(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi > lo))
        throw DomainError("axis range must be non-empty with positive step");
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    while (n >= 1 && !(lo + n * step < hi)) --n;
    return n;
}

double axis_point(double lo, double step, int i) {
    return lo + (i + 1) * step;
}

ScanOutcome run_scan(const LatticeSpec& spec, const FixedParams& fixed,
                     const ScanOptions& opts) {
    const auto t_start = std::chrono::steady_clock::now();

    ScanOutcome out;
    out.spec = spec;
    out.fixed = fixed;
    out.n_q = axis_point_count(spec.q_min, spec.q_max, spec.step_q);
    out.n_x = axis_point_count(spec.x_min, spec.x_max, spec.step_x);
    if (out.n_q <= 0 || out.n_x <= 0)
        throw DomainError("lattice has no interior points");
    const int n_q = out.n_q, n_x = out.n_x;
    out.n_points = static_cast<std::size_t>(n_q) * n_x;

    const bool need_status = opts.borders || opts.edges;
    if (need_status) out.status.assign(out.n_points, PointStatus::no_orbit);

    struct ChunkOut {
        std::string rows;
        std::vector<FrontPoint> cands;
        std::size_t feasible = 0;
        std::size_t stable = 0;
    };
    const int n_chunks = (n_q + kChunkColumns - 1) / kChunkColumns;
    std::vector<ChunkOut> chunks(n_chunks);

    int n_threads = opts.threads > 0
                        ? opts.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min(n_threads, n_chunks);

    std::atomic<int> next_chunk{0};
    PointStatus* status_data = need_status ? out.status.data() : nullptr;
    auto worker = [&]() {
        for (;;) {
            const int k = next_chunk.fetch_add(1);
            if (k >= n_chunks) return;
            ChunkOut& c = chunks[k];
            const int i0 = k * kChunkColumns;
            const int i1 = std::min(n_q, i0 + kChunkColumns);
            if (opts.keep_rows)
                c.rows.reserve(static_cast<std::size_t>(i1 - i0) * n_x * 48);
            for (int i = i0; i < i1; ++i) {
                const double q = axis_point(spec.q_min, spec.step_q, i);
                for (int j = 0; j < n_x; ++j) {
                    const double x = axis_point(spec.x_min, spec.step_x, j);
                    EvalResult ev;
                    try {
                        ev = try_evaluate(make_params(fixed, q, x));
                    } catch (const DomainError&) {
                        ev.status = SolveStatus::no_orbit;
                    }
                    const std::uint64_t id =
                        static_cast<std::uint64_t>(i) * n_x + j;
                    if (status_data) status_data[id] = status_of(ev);
                    if (ev.feasible()) {
                        ++c.feasible;
                        if (ev.stable()) {
                            ++c.stable;
                            c.cands.push_back({ev.f1, ev.f2, id});
                        }
                    }
                    if (opts.keep_rows) append_lattice_row(c.rows, q, x, ev);
                }
            }
            // Chunk-local prefilter: points dominated inside a chunk are
            // dominated globally, so this only shrinks the merge input.
            c.cands = pareto_filter(std::move(c.cands));
        }
    };
    {
        std::vector<std::thread> pool;
        for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }

    std::vector<FrontPoint> merged;
    for (auto& c : chunks) {
        out.n_feasible += c.feasible;
        out.n_stable += c.stable;
        merged.insert(merged.end(), c.cands.begin(), c.cands.end());
        if (opts.keep_rows) out.row_chunks.push_back(std::move(c.rows));
    }
    out.front = pareto_filter(std::move(merged));
    out.set.reserve(out.front.size());
    for (const auto& fp : out.front) {
        const int i = static_cast<int>(fp.id / n_x);
        const int j = static_cast<int>(fp.id % n_x);
        out.set.push_back({axis_point(spec.q_min, spec.step_q, i),
                           axis_point(spec.x_min, spec.step_x, j)});
    }

    if (opts.borders) {
        auto status_at = [&](int i, int j) {
            return out.status[static_cast<std::size_t>(i) * n_x + j];
        };
        auto to_param = [&](int i, int j) -> ParamPoint {
            return {axis_point(spec.q_min, spec.step_q, i),
                    axis_point(spec.x_min, spec.step_x, j)};
        };

        // Type border: Type 1 vs Type 2 over feasible points.
        auto type_class = [&](int i, int j) -> int {
            const PointStatus s = status_at(i, j);
            if (!status_feasible(s)) return -1;
            return s == PointStatus::type1_stable ||
                           s == PointStatus::type1_unstable
                       ? 1
                       : 0;
        };
        auto xf_level = [&](int i, int j) -> double {
            const ParamPoint pt = to_param(i, j);
            const Classified c = classify(fixed, pt.q, pt.x_minus);
            return c.ok ? c.x_f : 0.0;
        };
        auto type_refine = [&](int i0, int j0, int i1, int j1) -> ParamPoint {
            ParamPoint a = to_param(i0, j0), b = to_param(i1, j1);
            if (type_class(i0, j0) != 1) std::swap(a, b);
            return refine_type_border(fixed, a, b);
        };
        for (auto& line :
             march_border(n_q, n_x, type_class, xf_level, type_refine))
            out.borders.push_back({"Bp", std::move(line)});

        // Stability border over feasible points.
        auto stab_class = [&](int i, int j) -> int {
            const PointStatus s = status_at(i, j);
            if (!status_feasible(s)) return -1;
            return status_stable(s) ? 1 : 0;
        };
        auto df_level = [&](int i, int j) -> double {
            const ParamPoint pt = to_param(i, j);
            const Classified c = classify(fixed, pt.q, pt.x_minus);
            return c.ok ? std::abs(c.df) : 0.0;
        };
        auto stab_refine = [&](int i0, int j0, int i1, int j1) -> ParamPoint {
            ParamPoint a = to_param(i0, j0), b = to_param(i1, j1);
            if (stab_class(i0, j0) != 1) std::swap(a, b);
            return refine_stability_border(fixed, a, b);
        };
        for (auto& line :
             march_border(n_q, n_x, stab_class, df_level, stab_refine))
            out.borders.push_back({"Bs", std::move(line)});
    }

    if (opts.edges) {
        // Top edge at q = q_max, left edge sampled one step inside the
        // open interval, right edge at x = x_max.
        const double bl_x = axis_point(spec.x_min, spec.step_x, 0);
        auto build_edge = [&](const std::string& name, bool along_x,
                              double fixed_coord) {
            EdgeImage e{name, {}};
            const int count = along_x ? n_x : n_q;
            for (int k = 0; k < count; ++k) {
                const double q = along_x
                                     ? fixed_coord
                                     : axis_point(spec.q_min, spec.step_q, k);
                const double x = along_x
                                     ? axis_point(spec.x_min, spec.step_x, k)
                                     : fixed_coord;
                const Classified c = classify(fixed, q, x);
                if (c.ok && std::abs(c.df) < 1.0)
                    e.points.push_back({q, x, c.f1, c.f2});
            }
            return e;
        };
        out.edges.push_back(build_edge("Bt", true, spec.q_max));
        out.edges.push_back(build_edge("Bl", false, bl_x));
        out.edges.push_back(build_edge("Br", false, spec.x_max));

        // Quasi-Pareto arc: longest run of Bt image points dominated
        // neither by the lattice front nor by other Bt points.
        const EdgeImage& bt = out.edges[0];
        std::vector<bool> nd(bt.points.size(), false);
        for (std::size_t k = 0; k < bt.points.size(); ++k) {
            const ObjectivePair u{bt.points[k].f1, bt.points[k].f2};
            bool dom = dominated_by_any(u, out.front);
            for (std::size_t m = 0; !dom && m < bt.points.size(); ++m)
                if (m != k &&
                    dominates({bt.points[m].f1, bt.points[m].f2}, u))
                    dom = true;
            nd[k] = !dom;
        }
        int best_len = 0, best_first = -1;
        for (std::size_t k = 0; k < nd.size();) {
            if (!nd[k]) {
                ++k;
                continue;
            }
            std::size_t e = k;
            while (e < nd.size() && nd[e]) ++e;
            if (static_cast<int>(e - k) > best_len) {
                best_len = static_cast<int>(e - k);
                best_first = static_cast<int>(k);
            }
            k = e;
        }
        if (best_first >= 0)
            out.quasi_arc = {best_first, best_first + best_len - 1};

        // Anchor a: type flip along the top edge.
        for (int j = 0; j + 1 < n_x; ++j) {
            const Classified c0 = classify(
                fixed, spec.q_max, axis_point(spec.x_min, spec.step_x, j));
            const Classified c1 = classify(
                fixed, spec.q_max, axis_point(spec.x_min, spec.step_x, j + 1));
            if (!c0.ok || !c1.ok || c0.type == c1.type) continue;
            ParamPoint pa{spec.q_max, axis_point(spec.x_min, spec.step_x, j)};
            ParamPoint pb{spec.q_max,
                          axis_point(spec.x_min, spec.step_x, j + 1)};
            if (c0.type != OrbitType::type1) std::swap(pa, pb);
            const ParamPoint a_pt = refine_type_border(fixed, pa, pb);
            const Classified ca = classify(fixed, a_pt.q, a_pt.x_minus);
            out.anchors.push_back({"a", a_pt.q, a_pt.x_minus, ca.f1, ca.f2});
            break;
        }
        // Anchor b: the Pareto set's closure point on the top edge.
        if (!out.set.empty()) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < out.set.size(); ++k)
                if (out.set[k].q > out.set[best].q) best = k;
            const double bx = out.set[best].x_minus;
            const Classified cb = classify(fixed, spec.q_max, bx);
            if (cb.ok)
                out.anchors.push_back({"b", spec.q_max, bx, cb.f1, cb.f2});
        }
        // Anchor c: stability flip along the right edge.
        for (int i = 0; i + 1 < n_q; ++i) {
            const Classified c0 = classify(
                fixed, axis_point(spec.q_min, spec.step_q, i), spec.x_max);
            const Classified c1 = classify(
                fixed, axis_point(spec.q_min, spec.step_q, i + 1), spec.x_max);
            if (!c0.ok || !c1.ok) continue;
            const bool s0 = std::abs(c0.df) < 1.0, s1 = std::abs(c1.df) < 1.0;
            if (s0 == s1) continue;
            ParamPoint pa{axis_point(spec.q_min, spec.step_q, i), spec.x_max};
            ParamPoint pb{axis_point(spec.q_min, spec.step_q, i + 1),
                          spec.x_max};
            if (!s0) std::swap(pa, pb);
            const ParamPoint c_pt = refine_stability_border(fixed, pa, pb);
            const Classified cc = classify(fixed, c_pt.q, c_pt.x_minus);
            out.anchors.push_back({"c", c_pt.q, c_pt.x_minus, cc.f1, cc.f2});
            break;
        }
    }

    out.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
    return out;
}

void write_scan_outputs(const ScanOutcome& outcome,
                        const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    if (!outcome.row_chunks.empty()) {
        std::ofstream f(dir / "lattice.csv", std::ios::binary);
        f << "q,xminus,type,df,f1,f2,feasible\n";
        for (const auto& chunk : outcome.row_chunks) f << chunk;
    }
    {
        std::ofstream f(dir / "pareto_set.csv", std::ios::binary);
        f << "q,xminus\n";
        std::string buf;
        for (const auto& p : outcome.set) {
            append_double(buf, p.q);
            buf.push_back(',');
            append_double(buf, p.x_minus);
            buf.push_back('\n');
        }
        f << buf;
    }
    {
        std::ofstream f(dir / "pareto_front.csv", std::ios::binary);
        f << "f1,f2\n";
        std::string buf;
        for (const auto& p : outcome.front) {
            append_double(buf, p.f1);
            buf.push_back(',');
            append_double(buf, p.f2);
            buf.push_back('\n');
        }
        f << buf;
    }
    {
        std::ofstream f(dir / "borders.csv", std::ios::binary);
        f << "border,q,xminus\n";
        std::string buf;
        for (const auto& b : outcome.borders) {
            for (const auto& p : b.points) {
                buf += b.name;
                buf.push_back(',');
                append_double(buf, p.q);
                buf.push_back(',');
                append_double(buf, p.x_minus);
                buf.push_back('\n');
            }
        }
        f << buf;
    }
    {
        std::ofstream f(dir / "edges.csv", std::ios::binary);
        f << "edge,f1,f2\n";
        std::string buf;
        for (const auto& e : outcome.edges) {
            for (const auto& p : e.points) {
                buf += e.name;
                buf.push_back(',');
                append_double(buf, p.f1);
                buf.push_back(',');
                append_double(buf, p.f2);
                buf.push_back('\n');
            }
        }
        for (const auto& a : outcome.anchors) {
            buf += a.name;
            buf.push_back(',');
            append_double(buf, a.f1);
            buf.push_back(',');
            append_double(buf, a.f2);
            buf.push_back('\n');
        }
        f << buf;
    }
    {
        nlohmann::json meta;
        meta["lattice"] = {{"q_min", outcome.spec.q_min},
                           {"q_max", outcome.spec.q_max},
                           {"x_min", outcome.spec.x_min},
                           {"x_max", outcome.spec.x_max},
                           {"step_q", outcome.spec.step_q},
                           {"step_x", outcome.spec.step_x},
                           {"n_q", outcome.n_q},
                           {"n_x", outcome.n_x}};
        meta["fixed"] = {{"t_p", outcome.fixed.t_p},
                         {"alpha", outcome.fixed.alpha},
                         {"beta", outcome.fixed.beta}};
        meta["counts"] = {{"points", outcome.n_points},
                          {"feasible", outcome.n_feasible},
                          {"stable", outcome.n_stable},
                          {"pareto", outcome.front.size()}};
        meta["notes"] = {
            {"left_edge_sampled_at",
             axis_point(outcome.spec.x_min, outcome.spec.step_x, 0)},
            {"feasible_means", "a period-T_p orbit exists"},
            {"pareto_candidates", "feasible points with |Df| < 1"}};
        for (const auto& a : outcome.anchors)
            meta["anchors"][a.name] = {{"q", a.q},
                                       {"x_minus", a.x_minus},
                                       {"f1", a.f1},
                                       {"f2", a.f2}};
        if (outcome.quasi_arc)
            meta["quasi_arc"] = {{"first", outcome.quasi_arc->first},
                                 {"last", outcome.quasi_arc->second}};
        meta["runtime_ms"] = outcome.runtime_ms;
        std::ofstream f(dir / "meta.json", std::ios::binary);
        f << meta.dump(2) << '\n';
    }
}

ReplayOutcome replay_lattice_csv(const std::filesystem::path& file) {
    std::ifstream f(file, std::ios::binary);
    if (!f) throw ConfigError("cannot open sweep file: " + file.string());
    ReplayOutcome out;
    std::vector<FrontPoint> candidates;
    // Parameter point per candidate, addressable by row id.
    std::vector<std::pair<std::uint64_t, ParamPoint>> stable_rows;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line == "q,xminus,type,df,f1,f2,feasible") continue;
        }
        // Columns: q, xminus, type, df, f1, f2, feasible. Empty value
        // cells are allowed on infeasible rows.
        double values[5] = {0, 0, 0, 0, 0};  // q, xminus, df, f1, f2
        const int value_col[7] = {0, 1, -1, 2, 3, 4, -1};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        int col = 0;
        bool feasible = false;
        while (col < 7) {
            const char* comma = std::find(p, end, ',');
            if (col < 6 && comma == end)
                throw ConfigError("malformed sweep row: " + line);
            const std::string_view cell(p,
                                        static_cast<std::size_t>(comma - p));
            if (col == 6) {
                feasible = cell == "1";
            } else if (value_col[col] >= 0 && !cell.empty()) {
                double v = 0.0;
                const auto res =
                    std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (res.ec != std::errc{} ||
                    res.ptr != cell.data() + cell.size())
                    throw ConfigError("malformed sweep row: " + line);
                values[value_col[col]] = v;
            }
            ++col;
            p = comma + 1;
        }
        const std::uint64_t id = out.n_rows++;
        if (!feasible) continue;
        ++out.n_feasible;
        if (std::abs(values[2]) >= 1.0) continue;
        ++out.n_stable;
        candidates.push_back({values[3], values[4], id});
        stable_rows.emplace_back(id, ParamPoint{values[0], values[1]});
    }
    out.front = pareto_filter(std::move(candidates));
    out.set.reserve(out.front.size());
    for (const auto& fp : out.front) {
        const auto it = std::lower_bound(
            stable_rows.begin(), stable_rows.end(), fp.id,
            [](const auto& a, std::uint64_t id) { return a.first < id; });
        out.set.push_back(it->second);
    }
    return out;
}

std::vector<SweepRow> sweep_q(double x_minus, double q_lo, double q_hi,
                              double step, const FixedParams& fixed) {
    if (!(step > 0.0) || q_hi < q_lo)
        throw DomainError("sweep needs q_hi >= q_lo and a positive step");
    const int n =
        static_cast<int>(std::floor((q_hi - q_lo) / step + 1e-9));
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        const double q = q_lo + k * step;
        SweepRow row{q, {}};
        try {
            row.eval = try_evaluate(make_params(fixed, q, x_minus));
        } catch (const DomainError&) {
            row.eval.status = SolveStatus::no_orbit;
        }
        rows.push_back(row);
    }
    return rows;
}

bool sweep_has_tradeoff(const std::vector<SweepRow>& rows) {
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        const auto& a = rows[k].eval;
        const auto& b = rows[k + 1].eval;
        if (!a.stable() || !b.stable()) continue;
        if (b.f1 > a.f1 && b.f2 < a.f2) return true;
    }
    return false;
}

}  // namespace pvboost
