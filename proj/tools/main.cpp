#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pvboost/csv.hpp"
#include "pvboost/ea.hpp"
#include "pvboost/objectives.hpp"
#include "pvboost/scan.hpp"
#include "pvboost/validate.hpp"

namespace {

using namespace pvboost;

std::string default_out() {
    const char* env = std::getenv("PVBOOST_OUT");
    return env && *env ? env : ".";
}

std::vector<ObjectivePair> load_front_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open front file: " + path);
    std::vector<ObjectivePair> front;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("f1,", 0) == 0) continue;  // header
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("malformed front row: " + line);
        try {
            front.push_back({std::stod(line.substr(0, comma)),
                             std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw ConfigError("malformed front row: " + line);
        }
    }
    if (front.empty()) throw ConfigError("front file has no rows: " + path);
    return front;
}

void write_orbit_trace(const PeriodicOrbit& orbit, int samples,
                       const std::filesystem::path& file) {
    std::ofstream f(file, std::ios::binary);
    f << "tau,x,y,p\n";
    std::string buf;
    for (const auto& s : sample_orbit(orbit, samples)) {
        append_double(buf, s.tau);
        buf.push_back(',');
        append_double(buf, s.x);
        buf.push_back(',');
        append_double(buf, s.y);
        buf.push_back(',');
        append_double(buf, s.p);
        buf.push_back('\n');
    }
    f << buf;
}

void write_meta(const nlohmann::json& meta,
                const std::filesystem::path& dir) {
    std::ofstream f(dir / "meta.json", std::ios::binary);
    f << meta.dump(2) << '\n';
}

// Replayed fronts share the scan output formats.
void write_front_outputs(const ReplayOutcome& replay,
                         const std::string& source,
                         const std::filesystem::path& dir) {
    {
        std::ofstream f(dir / "pareto_set.csv", std::ios::binary);
        f << "q,xminus\n";
        std::string buf;
        for (const auto& p : replay.set) {
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
        for (const auto& p : replay.front) {
            append_double(buf, p.f1);
            buf.push_back(',');
            append_double(buf, p.f2);
            buf.push_back('\n');
        }
        f << buf;
    }
    write_meta({{"command", "scan --replay"},
                {"source", source},
                {"counts",
                 {{"rows", replay.n_rows},
                  {"feasible", replay.n_feasible},
                  {"stable", replay.n_stable},
                  {"pareto", replay.front.size()}}}},
               dir);
}

void write_orbit_summary(const PeriodicOrbit& orbit, double q, double x_minus,
                         const std::filesystem::path& file) {
    std::ofstream f(file, std::ios::binary);
    f << "q,xminus,type,xf,df,stable\n";
    std::string buf;
    append_double(buf, q);
    buf.push_back(',');
    append_double(buf, x_minus);
    buf += orbit.type == OrbitType::type1 ? ",1," : ",2,";
    append_double(buf, orbit.x_f);
    buf.push_back(',');
    append_double(buf, orbit.df);
    buf += orbit.stable() ? ",1\n" : ",0\n";
    f << buf;
}

int run(int argc, char** argv) {
    CLI::App app{
        "Exact biobjective analysis of a piecewise-linear boost converter "
        "with photovoltaic input"};
    app.require_subcommand(1);

    FixedParams fixed;

    // ---- orbit ----------------------------------------------------
    auto* orbit_cmd = app.add_subcommand(
        "orbit", "Solve one periodic orbit and write its trace");
    double orbit_q = 0.0, orbit_x = 0.0;
    std::string orbit_config;
    std::string orbit_out = default_out();
    int orbit_samples = 1001;
    auto* oq = orbit_cmd->add_option("--q", orbit_q, "output voltage q");
    auto* ox =
        orbit_cmd->add_option("--xminus", orbit_x, "lower threshold X_minus");
    auto* ocfg = orbit_cmd->add_option(
        "--config", orbit_config,
        "JSON file with a parameter set or a physical circuit");
    ocfg->excludes(oq)->excludes(ox);
    oq->needs(ox);
    orbit_cmd->add_option("--tp", fixed.t_p, "clock period T_p");
    orbit_cmd->add_option("--alpha", fixed.alpha, "PV slope below the break");
    orbit_cmd->add_option("--beta", fixed.beta, "PV slope above the break");
    orbit_cmd->add_option("--out", orbit_out, "output directory");
    orbit_cmd->add_option("--samples", orbit_samples, "trace sample count")
        ->check(CLI::Range(2, 100000000));
    orbit_cmd->callback([&]() {
        std::optional<DimensionlessParams> params;
        if (!orbit_config.empty()) {
            std::ifstream f(orbit_config);
            if (!f)
                throw ConfigError("cannot open config: " + orbit_config);
            nlohmann::json j;
            try {
                f >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("bad JSON: ") + e.what());
            }
            params = params_or_circuit_from_json(j);
        } else {
            if (!oq->count() || !ox->count())
                throw CLI::RequiredError("--q and --xminus (or --config)");
            params = DimensionlessParams(fixed.t_p, fixed.alpha, fixed.beta,
                                         orbit_x, orbit_q);
        }
        const PeriodicOrbit orbit = solve_orbit(*params);
        const double f2 = average_power(orbit);
        const double f1 = 1.0 - std::abs(orbit.df);
        std::printf("type      %s\n",
                    orbit.type == OrbitType::type1 ? "1" : "2");
        std::printf("x_f       %.9f\n", orbit.x_f);
        std::printf("Df        %.9f\n", orbit.df);
        std::printf("F1        %.9f\n", f1);
        std::printf("F2        %.9f\n", f2);
        std::printf("stable    %s\n", orbit.stable() ? "yes" : "no");
        if (orbit.type == OrbitType::type1)
            std::printf("tau_a     %.9f\ntau_b     %.9f\ntau_c     %.9f\n",
                        orbit.tau_a, orbit.tau_b, orbit.tau_c);
        else
            std::printf("tau_d     %.9f\n", orbit.tau_d);
        std::filesystem::path dir(orbit_out);
        std::filesystem::create_directories(dir);
        write_orbit_trace(orbit, orbit_samples, dir / "orbit_trace.csv");
        write_orbit_summary(orbit, params->q, params->x_minus,
                            dir / "orbit_summary.csv");
        write_meta({{"command", "orbit"},
                    {"params",
                     {{"T_p", params->t_p},
                      {"alpha", params->alpha},
                      {"beta", params->beta},
                      {"X_minus", params->x_minus},
                      {"q", params->q}}},
                    {"samples", orbit_samples}},
                   dir);
    });

    // ---- sweep ----------------------------------------------------
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Objective curves over q at fixed X_minus");
    double sweep_x = 0.0, sweep_qmin = 1.0, sweep_qmax = 4.0,
           sweep_step = 1e-3;
    std::string sweep_out = default_out();
    sweep_cmd->add_option("--xminus", sweep_x, "lower threshold X_minus")
        ->required();
    sweep_cmd->add_option("--qmin", sweep_qmin, "sweep start");
    sweep_cmd->add_option("--qmax", sweep_qmax, "sweep end (inclusive)");
    sweep_cmd->add_option("--step", sweep_step, "sweep step")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--tp", fixed.t_p, "clock period T_p");
    sweep_cmd->add_option("--alpha", fixed.alpha, "PV slope below the break");
    sweep_cmd->add_option("--beta", fixed.beta, "PV slope above the break");
    sweep_cmd->add_option("--out", sweep_out, "output directory");
    sweep_cmd->callback([&]() {
        const auto rows =
            sweep_q(sweep_x, sweep_qmin, sweep_qmax, sweep_step, fixed);
        std::filesystem::path dir(sweep_out);
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / "sweep.csv", std::ios::binary);
        f << "q,f1,f2,type,feasible\n";
        std::string buf;
        for (const auto& row : rows) {
            append_double(buf, row.q);
            if (row.eval.feasible()) {
                buf.push_back(',');
                append_double(buf, row.eval.f1);
                buf.push_back(',');
                append_double(buf, row.eval.f2);
                buf.push_back(',');
                buf.push_back(row.eval.type == OrbitType::type1 ? '1' : '2');
                buf += ",1\n";
            } else {
                buf += ",,,,0\n";
            }
        }
        f << buf;
        write_meta({{"command", "sweep"},
                    {"x_minus", sweep_x},
                    {"q_min", sweep_qmin},
                    {"q_max", sweep_qmax},
                    {"step", sweep_step},
                    {"fixed",
                     {{"t_p", fixed.t_p},
                      {"alpha", fixed.alpha},
                      {"beta", fixed.beta}}},
                    {"rows", rows.size()},
                    {"tradeoff", sweep_has_tradeoff(rows)}},
                   dir);
        std::printf("rows      %zu\n", rows.size());
        std::printf("tradeoff  %s\n",
                    sweep_has_tradeoff(rows) ? "yes" : "no");
    });

    // ---- scan -----------------------------------------------------
    auto* scan_cmd = app.add_subcommand(
        "scan", "Exact lattice scan with Pareto set/front extraction");
    LatticeSpec spec;
    double scan_step = 1e-3;
    std::string scan_out = default_out();
    int scan_threads = 0;
    scan_cmd->add_option("--tp", fixed.t_p, "clock period T_p");
    scan_cmd->add_option("--alpha", fixed.alpha, "PV slope below the break");
    scan_cmd->add_option("--beta", fixed.beta, "PV slope above the break");
    scan_cmd->add_option("--qmin", spec.q_min, "open interval start for q");
    scan_cmd->add_option("--qmax", spec.q_max, "open interval end for q");
    scan_cmd->add_option("--xmin", spec.x_min,
                         "open interval start for X_minus");
    scan_cmd->add_option("--xmax", spec.x_max,
                         "open interval end for X_minus");
    scan_cmd->add_option("--step", scan_step, "lattice pitch (both axes)")
        ->check(CLI::PositiveNumber);
    scan_cmd->add_option("--out", scan_out, "output directory");
    scan_cmd->add_option("--threads", scan_threads,
                         "worker threads (0 = auto)");
    std::string scan_replay;
    scan_cmd->add_option("--replay", scan_replay,
                         "re-extract the Pareto set/front from a stored "
                         "lattice.csv instead of evaluating");
    scan_cmd->callback([&]() {
        if (!scan_replay.empty()) {
            const ReplayOutcome replay = replay_lattice_csv(scan_replay);
            std::filesystem::path dir(scan_out);
            std::filesystem::create_directories(dir);
            write_front_outputs(replay, scan_replay, dir);
            std::printf("rows      %zu\n", replay.n_rows);
            std::printf("pareto    %zu\n", replay.front.size());
            return;
        }
        spec.step_q = scan_step;
        spec.step_x = scan_step;
        ScanOptions opts;
        opts.threads = scan_threads;
        const ScanOutcome outcome = run_scan(spec, fixed, opts);
        write_scan_outputs(outcome, scan_out);
        std::printf("points    %zu\n", outcome.n_points);
        std::printf("feasible  %zu\n", outcome.n_feasible);
        std::printf("stable    %zu\n", outcome.n_stable);
        std::printf("pareto    %zu\n", outcome.front.size());
        std::printf("runtime   %.0f ms\n", outcome.runtime_ms);
    });

    // ---- ea -------------------------------------------------------
    auto* ea_cmd = app.add_subcommand(
        "ea", "NSGA-II approximation of the Pareto front");
    EaConfig cfg;
    std::string ea_out = default_out();
    std::string exact_front_path;
    ea_cmd->add_option("--pop", cfg.population, "population size");
    ea_cmd->add_option("--gens", cfg.generations, "generations");
    ea_cmd->add_option("--seed", cfg.seed, "RNG seed");
    ea_cmd->add_option("--tp", cfg.fixed.t_p, "clock period T_p");
    ea_cmd->add_option("--alpha", cfg.fixed.alpha, "PV slope below the break");
    ea_cmd->add_option("--beta", cfg.fixed.beta, "PV slope above the break");
    ea_cmd->add_option("--out", ea_out, "output directory");
    ea_cmd->add_option("--exact-front", exact_front_path,
                       "pareto_front.csv from a scan, enables IGD");
    ea_cmd->callback([&]() {
        std::vector<ObjectivePair> exact;
        if (!exact_front_path.empty()) exact = load_front_csv(exact_front_path);
        const EaRun run = nsga2(cfg, exact);
        write_ea_outputs(run, ea_out);
        std::printf("evals     %llu\n",
                    static_cast<unsigned long long>(run.evaluations));
        std::printf("front     %zu\n", run.final_front.size());
        if (!run.indicators.empty() && run.indicators.back().igd)
            std::printf("igd       %.6g\n", *run.indicators.back().igd);
        std::printf("hv        %.6g\n", run.indicators.back().hv);
    });

    // ---- validate -------------------------------------------------
    auto* val_cmd = app.add_subcommand(
        "validate", "Cross-check closed forms against the integrator");
    int val_n = 100;
    std::uint64_t val_seed = 1;
    double val_tol = 1e-6;
    std::string val_out;
    std::string integrator = "exact";
    val_cmd->add_option("--n", val_n, "number of random feasible points")
        ->check(CLI::Range(1, 1000000));
    val_cmd->add_option("--seed", val_seed, "RNG seed");
    val_cmd->add_option("--tol", val_tol, "comparison tolerance")
        ->check(CLI::PositiveNumber);
    val_cmd->add_option("--integrator", integrator, "exact or rk")
        ->check(CLI::IsMember({"exact", "rk"}));
    val_cmd->add_option("--out", val_out,
                        "write a JSON report to this directory");
    bool validation_failed = false;
    val_cmd->callback([&]() {
        SimOptions opts;
        opts.kind = integrator == "rk" ? IntegratorKind::adaptive_rk
                                       : IntegratorKind::exact_step;
        const ValidationReport report = run_validation(
            val_n, val_seed, LatticeSpec{}, FixedParams{}, opts, val_tol);
        if (!val_out.empty()) {
            std::filesystem::path dir(val_out);
            std::filesystem::create_directories(dir);
            write_validation_report(report, dir / "validation.json");
            write_meta({{"command", "validate"},
                        {"n", val_n},
                        {"seed", val_seed},
                        {"tol", val_tol},
                        {"integrator", integrator},
                        {"max_abs_err", report.max_abs_err},
                        {"passed", report.passed()}},
                       dir);
        }
        std::printf("records   %zu\n", report.records.size());
        std::printf("max_err   %.3e\n", report.max_abs_err);
        std::printf("passed    %s\n", report.passed() ? "yes" : "no");
        validation_failed = !report.passed();
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }
    return validation_failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const pvboost::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
