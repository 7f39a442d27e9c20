#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pvboost/objectives.hpp"
#include "pvboost/pareto.hpp"

namespace pvboost {

/// Open parameter box with a regular lattice strictly inside it:
/// q = q_min + i*step_q, x_minus = x_min + j*step_x, endpoints excluded.
struct LatticeSpec {
    double q_min = 1.0;
    double q_max = 4.0;
    double x_min = 0.0;
    double x_max = 0.9;
    double step_q = 1e-3;
    double step_x = 1e-3;
};

/// The three parameters held fixed during a scan.
struct FixedParams {
    double t_p = 1.0;
    double alpha = 0.875;
    double beta = 3.5;
};

/// Number of interior lattice points of one axis and the value of the
/// i-th point (i in [0, count)).
int axis_point_count(double lo, double hi, double step);
double axis_point(double lo, double step, int i);

struct ScanOptions {
    int threads = 0;          ///< 0 = hardware concurrency
    bool borders = true;      ///< extract the type and stability borders
    bool edges = true;        ///< edge images, quasi-front arc, anchors
    bool keep_rows = true;    ///< retain lattice.csv text in memory
};

struct ParamPoint {
    double q;
    double x_minus;
};

struct BorderPolyline {
    std::string name;  ///< "Bp" or "Bs"
    std::vector<ParamPoint> points;
};

struct EdgeImagePoint {
    double q, x_minus;  ///< parameter-space position on the edge
    double f1, f2;
};

struct EdgeImage {
    std::string name;  ///< "Bt", "Bl", "Br"
    std::vector<EdgeImagePoint> points;
};

struct Anchor {
    std::string name;  ///< "a", "b", "c"
    double q, x_minus;
    double f1, f2;
};

/// Compact per-point classification stored for border extraction.
enum class PointStatus : std::uint8_t {
    no_orbit = 0,
    degenerate = 1,
    type1_stable = 2,
    type1_unstable = 3,
    type2_stable = 4,
    type2_unstable = 5,
};

bool status_feasible(PointStatus s);
bool status_stable(PointStatus s);

struct ScanOutcome {
    LatticeSpec spec;
    FixedParams fixed;
    int n_q = 0;
    int n_x = 0;
    std::size_t n_points = 0;
    std::size_t n_feasible = 0;
    std::size_t n_stable = 0;

    /// Non-dominated subset of the feasible stable lattice points.
    /// front[i] is the objective image of set[i]; ids encode the lattice
    /// position as i_q * n_x + j_x.
    std::vector<FrontPoint> front;
    std::vector<ParamPoint> set;

    std::vector<BorderPolyline> borders;
    std::vector<EdgeImage> edges;
    std::vector<Anchor> anchors;
    /// Index range [first, last] into the Bt edge image forming the
    /// quasi-Pareto arc; empty when absent.
    std::optional<std::pair<int, int>> quasi_arc;

    double runtime_ms = 0.0;

    /// lattice.csv body split by evaluation chunk, in deterministic
    /// order (only when ScanOptions::keep_rows).
    std::vector<std::string> row_chunks;
    /// Per-point status in id order (only when borders/edges requested).
    std::vector<PointStatus> status;
};

/// Evaluates every lattice point in parallel and extracts the Pareto
/// set/front plus (optionally) borders, edge images and anchors.
/// Deterministic: identical inputs give identical outcomes regardless of
/// thread count.
ScanOutcome run_scan(const LatticeSpec& spec, const FixedParams& fixed,
                     const ScanOptions& opts = {});

/// Writes lattice.csv, pareto_set.csv, pareto_front.csv, borders.csv,
/// edges.csv and meta.json into dir (created if missing).
void write_scan_outputs(const ScanOutcome& outcome,
                        const std::filesystem::path& dir);

/// Pareto extraction replayed from a stored objective sweep in the
/// lattice.csv format (q,xminus,type,df,f1,f2,feasible). Row order is
/// preserved as the tie-breaking id, so a replay of a scan's own output
/// reproduces its front and set exactly.
struct ReplayOutcome {
    std::size_t n_rows = 0;
    std::size_t n_feasible = 0;
    std::size_t n_stable = 0;
    std::vector<FrontPoint> front;
    std::vector<ParamPoint> set;
};

ReplayOutcome replay_lattice_csv(const std::filesystem::path& file);

/// One row of a per-q objective sweep at fixed x_minus (closed q range,
/// both endpoints included when they land on the step grid).
struct SweepRow {
    double q;
    EvalResult eval;
};

std::vector<SweepRow> sweep_q(double x_minus, double q_lo, double q_hi,
                              double step, const FixedParams& fixed);

/// True when some adjacent feasible-stable pair has f1 strictly rising
/// while f2 strictly falls.
bool sweep_has_tradeoff(const std::vector<SweepRow>& rows);

}  // namespace pvboost
