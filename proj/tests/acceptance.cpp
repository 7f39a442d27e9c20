// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Returns the
// number of failed criteria. argv[1] is the CLI binary (used by the
// determinism criterion), argv[2] a scratch directory.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pvboost/ea.hpp"
#include "pvboost/objectives.hpp"
#include "pvboost/rng.hpp"
#include "pvboost/scan.hpp"
#include "pvboost/validate.hpp"

using namespace pvboost;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void criterion(const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %-24s %s\n", ok ? "PASS" : "FAIL", name,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

DimensionlessParams paper_params(double x_minus, double q) {
    return DimensionlessParams(1.0, 0.875, 3.5, x_minus, q);
}

bool near(double value, double target, double tol) {
    return std::abs(value - target) <= tol;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool same_files(const fs::path& a, const fs::path& b) {
    return fs::exists(a) && fs::exists(b) && read_file(a) == read_file(b);
}

bool same_meta_ignoring_runtime(const fs::path& a, const fs::path& b) {
    try {
        auto ja = nlohmann::json::parse(read_file(a));
        auto jb = nlohmann::json::parse(read_file(b));
        ja.erase("runtime_ms");
        jb.erase("runtime_ms");
        return ja == jb;
    } catch (const nlohmann::json::exception&) {
        return false;
    }
}

int run_cli(const std::string& cli, const std::string& args) {
    const int status =
        std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

// ------------------------------------------------------------------
// Criteria
// ------------------------------------------------------------------

void check_fig5_golden() {
    const auto t0 = std::chrono::steady_clock::now();
    const ObjectivePoint a = evaluate(paper_params(0.726, 1.66));
    const ObjectivePoint b = evaluate(paper_params(0.492, 3.2));
    const ObjectivePoint c = evaluate(paper_params(0.2, 3.2));
    const double elapsed = seconds_since(t0);

    const bool ok_a = a.type == OrbitType::type1 &&
                      near(std::abs(a.df), 0.658, 1e-3) &&
                      near(a.f2, 0.937, 1e-3);
    const bool ok_b = b.type == OrbitType::type1 &&
                      near(std::abs(b.df), 0.147, 1e-3) &&
                      near(b.f2, 0.842, 1e-3);
    // The Type 2 point: the consistent caption values are the stability
    // margin 0.528 (= 1 - |Df2| with |Df2| = 0.472) and power 0.761.
    const bool ok_c = c.type == OrbitType::type2 &&
                      near(c.f1, 0.528, 1e-3) &&
                      near(std::abs(c.df), 0.472, 1e-3) &&
                      near(c.f2, 0.761, 1e-3);

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "|Df|=%.3f/%.3f/%.3f F2=%.3f/%.3f/%.3f in %.0f ms",
                  std::abs(a.df), std::abs(b.df), std::abs(c.df), a.f2, b.f2,
                  c.f2, elapsed * 1e3);
    criterion("fig5-golden-values", ok_a && ok_b && ok_c && elapsed < 1.0,
              detail);
}

void check_oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    const ValidationReport report =
        run_validation(100, 1, LatticeSpec{}, FixedParams{}, SimOptions{},
                       1e-6);
    const double elapsed = seconds_since(t0);
    char detail[120];
    std::snprintf(detail, sizeof(detail),
                  "%zu comparisons, max |err| = %.2e, %.2f s",
                  report.records.size(), report.max_abs_err, elapsed);
    criterion("oracle-equivalence", report.passed() && elapsed < 10.0,
              detail);
}

ScanOutcome check_exact_scan() {
    ScanOptions opts;
    opts.keep_rows = false;
    const auto t0 = std::chrono::steady_clock::now();
    ScanOutcome out = run_scan(LatticeSpec{}, FixedParams{}, opts);
    const double elapsed = seconds_since(t0);

    bool all_type1 = !out.set.empty();
    for (const auto& p : out.set) {
        const EvalResult r = try_evaluate(paper_params(p.x_minus, p.q));
        if (!r.stable() || r.type != OrbitType::type1) {
            all_type1 = false;
            break;
        }
    }
    auto near_set = [&](double q, double x) {
        double best = 1e9;
        for (const auto& p : out.set)
            best = std::min(best, std::max(std::abs(p.q - q),
                                           std::abs(p.x_minus - x)));
        return best <= 1e-3 + 1e-9;
    };
    const bool ok = !out.front.empty() && all_type1 &&
                    near_set(1.66, 0.726) && near_set(3.2, 0.492) &&
                    elapsed < 60.0;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "%zu points, front %zu, all Type 1: %s, %.1f s",
                  out.n_points, out.front.size(), all_type1 ? "yes" : "no",
                  elapsed);
    criterion("exact-scan", ok, detail);
    return out;
}

void check_refinement(const ScanOutcome& coarse) {
    if (coarse.set.empty()) {
        criterion("refinement-consistency", false, "coarse set empty");
        return;
    }
    double q_lo = 4.0, q_hi = 1.0, x_lo = 0.9, x_hi = 0.0;
    for (const auto& p : coarse.set) {
        q_lo = std::min(q_lo, p.q);
        q_hi = std::max(q_hi, p.q);
        x_lo = std::min(x_lo, p.x_minus);
        x_hi = std::max(x_hi, p.x_minus);
    }
    LatticeSpec fine;
    fine.q_min = std::max(1.0, q_lo - 5e-3);
    fine.q_max = std::min(4.0, q_hi + 5e-3);
    fine.x_min = std::max(0.0, x_lo - 5e-3);
    fine.x_max = std::min(0.9, x_hi + 5e-3);
    fine.step_q = 1e-4;
    fine.step_x = 1e-4;
    ScanOptions opts;
    opts.borders = false;
    opts.edges = false;
    opts.keep_rows = false;
    const auto t0 = std::chrono::steady_clock::now();
    const ScanOutcome refined = run_scan(fine, FixedParams{}, opts);
    const double elapsed = seconds_since(t0);

    // Every coarse front point must lie within one coarse cell of the
    // fine front, measured in objective space (the fine front is already
    // sorted by f1). Candidates farther than one cell in f1 cannot
    // qualify, which bounds the search window.
    std::size_t misses = 0;
    double worst = 0.0;
    for (const auto& c : coarse.front) {
        auto lo = std::lower_bound(
            refined.front.begin(), refined.front.end(), c.f1 - 1.1e-3,
            [](const FrontPoint& a, double v) { return a.f1 < v; });
        double best = 1e9;
        for (auto it = lo;
             it != refined.front.end() && it->f1 <= c.f1 + 1.1e-3; ++it)
            best = std::min(best, std::max(std::abs(c.f1 - it->f1),
                                           std::abs(c.f2 - it->f2)));
        worst = std::max(worst, best);
        if (best > 1e-3 + 1e-9) ++misses;
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "fine front %zu pts, worst objective gap %.2e, misses %zu, "
                  "%.1f s",
                  refined.set.size(), worst, misses, elapsed);
    criterion("refinement-consistency", misses == 0, detail);
}

void check_fig6_tradeoffs() {
    const FixedParams fixed;
    const bool t09 =
        sweep_has_tradeoff(sweep_q(0.9, 1.0, 4.0, 1e-3, fixed));
    const bool t0438 =
        sweep_has_tradeoff(sweep_q(0.438, 1.0, 4.0, 1e-3, fixed));
    const bool t02 =
        sweep_has_tradeoff(sweep_q(0.2, 1.0, 4.0, 1e-3, fixed));
    char detail[120];
    std::snprintf(detail, sizeof(detail),
                  "tradeoff at 0.9: %s, 0.438: %s, 0.2: %s",
                  t09 ? "yes" : "no", t0438 ? "yes" : "no",
                  t02 ? "yes" : "no");
    criterion("fig6-tradeoffs", t09 && t0438 && !t02, detail);
}

void check_property_suites() {
    bool ok = true;
    std::string fail;

    // Strict partial order on 10^4 random triples (coarse coordinates so
    // exact ties occur).
    Rng rng(301);
    auto grid_pair = [&]() -> ObjectivePair {
        return {static_cast<double>(rng.below(64)) / 64.0,
                static_cast<double>(rng.below(64)) / 64.0};
    };
    for (int i = 0; i < 10000 && ok; ++i) {
        const auto u = grid_pair(), v = grid_pair(), w = grid_pair();
        if (dominates(u, u)) ok = false, fail = "irreflexivity";
        if (dominates(u, v) && dominates(v, u))
            ok = false, fail = "asymmetry";
        if (dominates(u, v) && dominates(v, w) && !dominates(u, w))
            ok = false, fail = "transitivity";
    }

    // pareto_filter against the quadratic oracle: 100 sets of 1000.
    for (int trial = 0; trial < 100 && ok; ++trial) {
        std::vector<FrontPoint> pts;
        pts.reserve(1000);
        for (int i = 0; i < 1000; ++i) {
            const auto p = grid_pair();
            pts.push_back({p.f1, p.f2, static_cast<std::uint64_t>(i)});
        }
        const auto fast = pareto_filter(pts);
        const auto slow = oracles::brute_filter(pts);
        if (fast.size() != slow.size()) {
            ok = false;
            fail = "filter size";
            break;
        }
        for (std::size_t k = 0; k < fast.size(); ++k)
            if (fast[k].id != slow[k].id) {
                ok = false;
                fail = "filter ids";
                break;
            }
    }

    // Non-dominated-set identity under 20 monotone transforms.
    {
        std::vector<FrontPoint> pts;
        for (int i = 0; i < 1000; ++i) {
            const auto p = grid_pair();
            pts.push_back({p.f1, p.f2, static_cast<std::uint64_t>(i)});
        }
        const auto base = pareto_filter(pts);
        for (int t = 0; t < 20 && ok; ++t) {
            const double a1 = rng.uniform(0.2, 3.0);
            const double b1 = rng.uniform(0.0, 2.0);
            const double a2 = rng.uniform(0.2, 3.0);
            const double b2 = rng.uniform(0.0, 2.0);
            auto mapped = pts;
            for (auto& p : mapped) {
                p.f1 = a1 * p.f1 + b1 * std::atan(p.f1);
                p.f2 = a2 * std::expm1(p.f2) + b2 * p.f2;
            }
            const auto kept = pareto_filter(mapped);
            if (kept.size() != base.size()) {
                ok = false;
                fail = "transform size";
                break;
            }
            for (std::size_t k = 0; k < kept.size(); ++k)
                if (kept[k].id != base[k].id) {
                    ok = false;
                    fail = "transform ids";
                    break;
                }
        }
    }

    // Objective bounds on every feasible lattice point.
    if (ok) {
        const LatticeSpec spec;
        const int n_q = axis_point_count(spec.q_min, spec.q_max, spec.step_q);
        const int n_x = axis_point_count(spec.x_min, spec.x_max, spec.step_x);
        std::atomic<bool> bounds_ok{true};
        auto worker = [&](int i_begin, int i_end) {
            for (int i = i_begin; i < i_end && bounds_ok.load(); ++i) {
                const double q = axis_point(spec.q_min, spec.step_q, i);
                for (int j = 0; j < n_x; ++j) {
                    const double x =
                        axis_point(spec.x_min, spec.step_x, j);
                    const EvalResult r =
                        try_evaluate(paper_params(x, q));
                    if (r.feasible() && (r.f1 >= 1.0 || r.f2 >= 1.0)) {
                        bounds_ok.store(false);
                        return;
                    }
                }
            }
        };
        std::thread half(worker, 0, n_q / 2);
        worker(n_q / 2, n_q);
        half.join();
        if (!bounds_ok.load()) ok = false, fail = "objective bounds";
    }

    criterion("property-suites", ok,
              ok ? "order laws, filter oracle, 20 transforms, bounds"
                 : "failed: " + fail);
}

void check_ea_quality(const ScanOutcome& scan) {
    std::vector<ObjectivePair> exact;
    exact.reserve(scan.front.size());
    for (const auto& fp : scan.front) exact.push_back({fp.f1, fp.f2});

    EaConfig cfg;  // pop 100, 200 generations, seed 1
    const auto t0 = std::chrono::steady_clock::now();
    const EaRun run = nsga2(cfg, exact);
    const double elapsed = seconds_since(t0);

    std::vector<ObjectivePair> front;
    front.reserve(run.final_front.size());
    for (const auto& ind : run.final_front)
        front.push_back({ind.f1, ind.f2});
    const double final_igd =
        front.empty() ? 1e9 : igd(front, exact);

    // Fast non-dominated sorting against brute-force ranking.
    Rng rng(401);
    bool sort_ok = true;
    for (int trial = 0; trial < 50 && sort_ok; ++trial) {
        const int n = 50 + static_cast<int>(rng.below(451));
        std::vector<ObjectivePair> pts;
        pts.reserve(n);
        for (int i = 0; i < n; ++i)
            pts.push_back({static_cast<double>(rng.below(128)) / 128.0,
                           static_cast<double>(rng.below(128)) / 128.0});
        if (fast_non_dominated_sort(pts) != oracles::brute_ranks(pts))
            sort_ok = false;
    }

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "IGD = %.2e (<= 2e-3), sorting oracle: %s, %.1f s",
                  final_igd, sort_ok ? "ok" : "mismatch", elapsed);
    criterion("ea-quality", final_igd <= 2e-3 && sort_ok, detail);
}

void check_determinism(const std::string& cli, const fs::path& work) {
    if (cli.empty()) {
        criterion("determinism", false, "no CLI binary supplied");
        return;
    }
    fs::create_directories(work);
    const fs::path a = work / "scan_a", b = work / "scan_b";
    const std::string flags = "scan --step 0.002 --out ";
    bool ok = run_cli(cli, flags + a.string() + " --threads 1") == 0 &&
              run_cli(cli, flags + b.string() + " --threads 4") == 0;
    for (const char* f : {"lattice.csv", "pareto_set.csv",
                          "pareto_front.csv", "borders.csv", "edges.csv"})
        ok = ok && same_files(a / f, b / f);
    ok = ok && same_meta_ignoring_runtime(a / "meta.json", b / "meta.json");

    const fs::path e1 = work / "ea_1", e2 = work / "ea_2";
    const std::string ea_flags = "ea --pop 40 --gens 30 --seed 9 --out ";
    ok = ok && run_cli(cli, ea_flags + e1.string()) == 0 &&
         run_cli(cli, ea_flags + e2.string()) == 0;
    for (const char* f : {"ea_front.csv", "indicators.csv"})
        ok = ok && same_files(e1 / f, e2 / f);
    ok = ok && same_meta_ignoring_runtime(e1 / "meta.json", e2 / "meta.json");

    criterion("determinism", ok,
              "scan across thread counts, ea across repeats");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const fs::path work =
        argc > 2 ? fs::path(argv[2]) : fs::path("acceptance_tmp");

    check_fig5_golden();
    check_oracle_equivalence();
    const ScanOutcome scan = check_exact_scan();
    check_refinement(scan);
    check_fig6_tradeoffs();
    check_property_suites();
    check_ea_quality(scan);
    check_determinism(cli, work);

    std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
