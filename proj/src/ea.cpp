#include "pvboost/ea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "pvboost/csv.hpp"
#include "pvboost/rng.hpp"

namespace pvboost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ind {
    double v[2];  // q, x_minus
    bool feasible = false;
    double f1 = 0.0;
    double f2 = 0.0;
};

Ind evaluate_ind(const EaConfig& cfg, double q, double x_minus) {
    Ind ind{{q, x_minus}, false, 0.0, 0.0};
    try {
        const DimensionlessParams p(cfg.fixed.t_p, cfg.fixed.alpha,
                                    cfg.fixed.beta, x_minus, q);
        const EvalResult ev = try_evaluate(p);
        // Membership in the constrained problem needs a stable orbit.
        if (ev.stable()) {
            ind.feasible = true;
            ind.f1 = ev.f1;
            ind.f2 = ev.f2;
        }
    } catch (const DomainError&) {
    }
    return ind;
}

// Deb's fast non-dominated sort restricted to the given indices.
// Returns the highest rank assigned (-1 when idx is empty).
int sort_indices(const std::vector<Ind>& pop, const std::vector<int>& idx,
                 std::vector<int>& rank_out) {
    const int n = static_cast<int>(idx.size());
    std::vector<std::vector<int>> dominated(n);
    std::vector<int> count(n, 0);
    std::vector<int> current;
    for (int a = 0; a < n; ++a) {
        const ObjectivePair ua{pop[idx[a]].f1, pop[idx[a]].f2};
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            const ObjectivePair ub{pop[idx[b]].f1, pop[idx[b]].f2};
            if (dominates(ua, ub))
                dominated[a].push_back(b);
            else if (dominates(ub, ua))
                ++count[a];
        }
        if (count[a] == 0) current.push_back(a);
    }
    int rank = 0;
    int max_rank = -1;
    while (!current.empty()) {
        std::vector<int> next;
        for (int a : current) {
            rank_out[idx[a]] = rank;
            max_rank = rank;
            for (int b : dominated[a])
                if (--count[b] == 0) next.push_back(b);
        }
        current = std::move(next);
        ++rank;
    }
    return max_rank;
}

// Ranks of the whole population: feasible individuals by domination,
// infeasible ones together one rank behind the last feasible front.
std::vector<int> rank_population(const std::vector<Ind>& pop) {
    std::vector<int> ranks(pop.size(), 0);
    std::vector<int> feas, infeas;
    for (int i = 0; i < static_cast<int>(pop.size()); ++i)
        (pop[i].feasible ? feas : infeas).push_back(i);
    int worst = -1;
    if (!feas.empty()) worst = sort_indices(pop, feas, ranks);
    for (int i : infeas) ranks[i] = worst + 1;
    return ranks;
}

std::vector<double> crowding_of(const std::vector<Ind>& pop,
                                const std::vector<int>& front) {
    const int n = static_cast<int>(front.size());
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), kInf);
        return dist;
    }
    for (int obj = 0; obj < 2; ++obj) {
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        auto value = [&](int i) {
            return obj == 0 ? pop[front[i]].f1 : pop[front[i]].f2;
        };
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (value(a) != value(b)) return value(a) < value(b);
            return front[a] < front[b];
        });
        const double lo = value(order.front());
        const double hi = value(order.back());
        dist[order.front()] = kInf;
        dist[order.back()] = kInf;
        if (hi == lo) continue;
        for (int i = 1; i + 1 < n; ++i)
            dist[order[i]] += (value(order[i + 1]) - value(order[i - 1])) /
                              (hi - lo);
    }
    return dist;
}

struct RankedPop {
    std::vector<int> rank;
    std::vector<double> crowd;
};

RankedPop rank_and_crowd(const std::vector<Ind>& pop) {
    RankedPop rp;
    rp.rank = rank_population(pop);
    rp.crowd.assign(pop.size(), 0.0);
    const int max_rank =
        *std::max_element(rp.rank.begin(), rp.rank.end());
    for (int r = 0; r <= max_rank; ++r) {
        std::vector<int> front;
        for (int i = 0; i < static_cast<int>(pop.size()); ++i)
            if (rp.rank[i] == r) front.push_back(i);
        if (front.empty()) continue;
        if (!pop[front[0]].feasible) continue;  // infeasible tail: crowd 0
        const std::vector<double> d = crowding_of(pop, front);
        for (int i = 0; i < static_cast<int>(front.size()); ++i)
            rp.crowd[front[i]] = d[i];
    }
    return rp;
}

int tournament(const RankedPop& rp, int n, Rng& rng) {
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (rp.rank[i] != rp.rank[j]) return rp.rank[i] < rp.rank[j] ? i : j;
    if (rp.crowd[i] != rp.crowd[j]) return rp.crowd[i] > rp.crowd[j] ? i : j;
    return i;
}

// Bounded simulated binary crossover, canonical randomness consumption:
// one gate per pair, then per variable a 0.5 gate, a spread draw and a
// swap draw.
void sbx(const EaConfig& cfg, const double lo[2], const double hi[2],
         const Ind& p1, const Ind& p2, Rng& rng, double c1[2],
         double c2[2]) {
    c1[0] = p1.v[0];
    c1[1] = p1.v[1];
    c2[0] = p2.v[0];
    c2[1] = p2.v[1];
    if (rng.uniform() > cfg.crossover_prob) return;
    const double eta = cfg.crossover_eta;
    for (int k = 0; k < 2; ++k) {
        if (rng.uniform() > 0.5) continue;
        const double y1 = std::min(p1.v[k], p2.v[k]);
        const double y2 = std::max(p1.v[k], p2.v[k]);
        if (y2 - y1 < 1e-14) continue;
        const double rand = rng.uniform();
        auto spread = [&](double edge_gap) {
            const double beta = 1.0 + 2.0 * edge_gap / (y2 - y1);
            const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
            if (rand <= 1.0 / alpha)
                return std::pow(rand * alpha, 1.0 / (eta + 1.0));
            return std::pow(1.0 / (2.0 - rand * alpha), 1.0 / (eta + 1.0));
        };
        double child1 =
            0.5 * ((y1 + y2) - spread(y1 - lo[k]) * (y2 - y1));
        double child2 =
            0.5 * ((y1 + y2) + spread(hi[k] - y2) * (y2 - y1));
        child1 = std::clamp(child1, lo[k], hi[k]);
        child2 = std::clamp(child2, lo[k], hi[k]);
        if (rng.uniform() <= 0.5) std::swap(child1, child2);
        c1[k] = child1;
        c2[k] = child2;
    }
}

// Bounded polynomial mutation.
void mutate(const EaConfig& cfg, const double lo[2], const double hi[2],
            double v[2], Rng& rng) {
    const double eta = cfg.mutation_eta;
    for (int k = 0; k < 2; ++k) {
        if (rng.uniform() > cfg.mutation_prob) continue;
        const double span = hi[k] - lo[k];
        const double d1 = (v[k] - lo[k]) / span;
        const double d2 = (hi[k] - v[k]) / span;
        const double rnd = rng.uniform();
        const double mut_pow = 1.0 / (eta + 1.0);
        double deltaq;
        if (rnd <= 0.5) {
            const double xy = 1.0 - d1;
            const double val =
                2.0 * rnd + (1.0 - 2.0 * rnd) * std::pow(xy, eta + 1.0);
            deltaq = std::pow(val, mut_pow) - 1.0;
        } else {
            const double xy = 1.0 - d2;
            const double val = 2.0 * (1.0 - rnd) +
                               2.0 * (rnd - 0.5) * std::pow(xy, eta + 1.0);
            deltaq = 1.0 - std::pow(val, mut_pow);
        }
        v[k] = std::clamp(v[k] + deltaq * span, lo[k], hi[k]);
    }
}

Individual to_individual(const Ind& ind) {
    return {ind.v[0], ind.v[1], ind.feasible, ind.f1, ind.f2};
}

// Non-dominated archive of every feasible evaluation, kept sorted by f1
// ascending (hence f2 strictly descending). This is the run's discovered
// front: it only ever improves, so its hypervolume is non-decreasing.
struct ArchiveEntry {
    double f1, f2, q, x;
};

class Archive {
public:
    void insert(const Ind& ind) {
        const ArchiveEntry e{ind.f1, ind.f2, ind.v[0], ind.v[1]};
        auto it = std::lower_bound(
            entries_.begin(), entries_.end(), e.f1,
            [](const ArchiveEntry& a, double f1) { return a.f1 < f1; });
        // The entry at `it` has the largest f2 among f1 >= e.f1; if it
        // already covers e (or equals it), e adds nothing.
        if (it != entries_.end() && it->f2 >= e.f2) return;
        // Drop entries e dominates: same f1 ahead, lower-f2 tail behind.
        auto last = it;
        while (last != entries_.end() && last->f1 == e.f1) ++last;
        auto first = it;
        while (first != entries_.begin() && std::prev(first)->f2 <= e.f2)
            --first;
        it = entries_.erase(first, last);
        entries_.insert(it, e);
    }

    const std::vector<ArchiveEntry>& entries() const { return entries_; }

    std::vector<ObjectivePair> pairs() const {
        std::vector<ObjectivePair> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back({e.f1, e.f2});
        return out;
    }

private:
    std::vector<ArchiveEntry> entries_;
};

}  // namespace

void validate(const EaConfig& cfg) {
    if (cfg.population < 4 || cfg.population % 2 != 0)
        throw ConfigError("population must be even and at least 4");
    if (cfg.generations < 1)
        throw ConfigError("generations must be at least 1");
    if (!(cfg.crossover_prob >= 0.0 && cfg.crossover_prob <= 1.0))
        throw ConfigError("crossover probability must be in [0, 1]");
    if (!(cfg.mutation_prob >= 0.0 && cfg.mutation_prob <= 1.0))
        throw ConfigError("mutation probability must be in [0, 1]");
    if (!(cfg.crossover_eta > 0.0) || !(cfg.mutation_eta > 0.0))
        throw ConfigError("distribution indices must be positive");
    if (!(cfg.bounds.q_max > cfg.bounds.q_min) ||
        !(cfg.bounds.x_max > cfg.bounds.x_min))
        throw ConfigError("search box is empty");
}

std::vector<int> fast_non_dominated_sort(std::span<const ObjectivePair> pts) {
    std::vector<Ind> pop(pts.size());
    std::vector<int> idx(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pop[i] = {{0, 0}, true, pts[i].f1, pts[i].f2};
        idx[i] = static_cast<int>(i);
    }
    std::vector<int> ranks(pts.size(), 0);
    if (!pts.empty()) sort_indices(pop, idx, ranks);
    return ranks;
}

std::vector<double> crowding_distances(std::span<const ObjectivePair> front) {
    std::vector<Ind> pop(front.size());
    std::vector<int> idx(front.size());
    for (std::size_t i = 0; i < front.size(); ++i) {
        pop[i] = {{0, 0}, true, front[i].f1, front[i].f2};
        idx[i] = static_cast<int>(i);
    }
    return crowding_of(pop, idx);
}

double igd(std::span<const ObjectivePair> approx,
           std::span<const ObjectivePair> exact) {
    if (approx.empty() || exact.empty())
        throw EmptyFrontError("igd needs two non-empty fronts");
    // Exact nearest-neighbor search over the f1-sorted approximation:
    // expanding from the insertion point, the f1 gap alone bounds the
    // distance, so both sweeps stop early.
    std::vector<ObjectivePair> sorted(approx.begin(), approx.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const ObjectivePair& a, const ObjectivePair& b) {
                  return a.f1 < b.f1;
              });
    const auto n = static_cast<std::ptrdiff_t>(sorted.size());
    double total = 0.0;
    for (const auto& e : exact) {
        const auto pos =
            std::lower_bound(sorted.begin(), sorted.end(), e.f1,
                             [](const ObjectivePair& a, double f1) {
                                 return a.f1 < f1;
                             }) -
            sorted.begin();
        double best = kInf;
        for (std::ptrdiff_t i = pos; i < n; ++i) {
            const double d1 = sorted[i].f1 - e.f1;
            if (d1 * d1 >= best) break;
            const double d2 = sorted[i].f2 - e.f2;
            best = std::min(best, d1 * d1 + d2 * d2);
        }
        for (std::ptrdiff_t i = pos - 1; i >= 0; --i) {
            const double d1 = sorted[i].f1 - e.f1;
            if (d1 * d1 >= best) break;
            const double d2 = sorted[i].f2 - e.f2;
            best = std::min(best, d1 * d1 + d2 * d2);
        }
        total += std::sqrt(best);
    }
    return total / static_cast<double>(exact.size());
}

double hypervolume(std::span<const ObjectivePair> front, ObjectivePair ref) {
    if (front.empty()) return 0.0;
    std::vector<FrontPoint> pts;
    pts.reserve(front.size());
    for (std::size_t i = 0; i < front.size(); ++i) {
        if (!dominates(front[i], ref))
            throw RefPointError(
                "hypervolume point does not dominate the reference");
        pts.push_back({front[i].f1, front[i].f2, i});
    }
    const std::vector<FrontPoint> nd = pareto_filter(std::move(pts));
    // nd is sorted by f1 ascending with f2 descending; the point with the
    // i-th f1 is the tallest rectangle covering the strip up to its f1.
    double area = 0.0;
    double prev_f1 = ref.f1;
    for (const auto& p : nd) {
        area += (p.f1 - prev_f1) * (p.f2 - ref.f2);
        prev_f1 = p.f1;
    }
    return area;
}

EaRun nsga2(const EaConfig& cfg, std::span<const ObjectivePair> exact_front) {
    validate(cfg);
    const auto t_start = std::chrono::steady_clock::now();

    const double lo[2] = {cfg.bounds.q_min, cfg.bounds.x_min};
    const double hi[2] = {cfg.bounds.q_max, cfg.bounds.x_max};
    const int n = cfg.population;
    Rng rng(cfg.seed);

    Archive archive;
    std::vector<Ind> pop;
    pop.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double q = rng.uniform(lo[0], hi[0]);
        const double x = rng.uniform(lo[1], hi[1]);
        pop.push_back(evaluate_ind(cfg, q, x));
        if (pop.back().feasible) archive.insert(pop.back());
    }

    EaRun run;
    run.config = cfg;
    run.evaluations = static_cast<std::uint64_t>(n);

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        const RankedPop rp = rank_and_crowd(pop);

        std::vector<Ind> children;
        children.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n / 2; ++i) {
            const int a = tournament(rp, n, rng);
            const int b = tournament(rp, n, rng);
            double c1[2], c2[2];
            sbx(cfg, lo, hi, pop[a], pop[b], rng, c1, c2);
            mutate(cfg, lo, hi, c1, rng);
            mutate(cfg, lo, hi, c2, rng);
            children.push_back(evaluate_ind(cfg, c1[0], c1[1]));
            children.push_back(evaluate_ind(cfg, c2[0], c2[1]));
            for (auto it = children.end() - 2; it != children.end(); ++it)
                if (it->feasible) archive.insert(*it);
        }
        run.evaluations += static_cast<std::uint64_t>(n);

        std::vector<Ind> combined = pop;
        combined.insert(combined.end(), children.begin(), children.end());
        const std::vector<int> ranks = rank_population(combined);
        const int max_rank =
            *std::max_element(ranks.begin(), ranks.end());

        std::vector<Ind> next;
        next.reserve(static_cast<std::size_t>(n));
        for (int r = 0; r <= max_rank && static_cast<int>(next.size()) < n;
             ++r) {
            std::vector<int> front;
            for (int i = 0; i < static_cast<int>(combined.size()); ++i)
                if (ranks[i] == r) front.push_back(i);
            if (front.empty()) continue;
            const int room = n - static_cast<int>(next.size());
            if (static_cast<int>(front.size()) <= room) {
                for (int i : front) next.push_back(combined[i]);
            } else {
                const std::vector<double> d = crowding_of(combined, front);
                std::vector<int> order(front.size());
                for (std::size_t i = 0; i < front.size(); ++i)
                    order[i] = static_cast<int>(i);
                std::sort(order.begin(), order.end(), [&](int a, int b) {
                    if (d[a] != d[b]) return d[a] > d[b];
                    return front[a] < front[b];
                });
                for (int i = 0; i < room; ++i)
                    next.push_back(combined[front[order[i]]]);
            }
        }
        pop = std::move(next);

        // Indicators track the archive, the run's best front so far.
        const std::vector<ObjectivePair> front = archive.pairs();
        IndicatorRow row{gen, std::nullopt, 0.0, run.evaluations};
        if (!front.empty() && !exact_front.empty())
            row.igd = igd(front, exact_front);
        std::vector<ObjectivePair> positive;
        positive.reserve(front.size());
        for (const auto& p : front)
            if (dominates(p, {0.0, 0.0})) positive.push_back(p);
        row.hv = hypervolume(positive, {0.0, 0.0});
        run.indicators.push_back(row);
    }

    run.final_population.reserve(pop.size());
    for (const auto& ind : pop) run.final_population.push_back(to_individual(ind));

    run.final_front.reserve(archive.entries().size());
    for (const auto& e : archive.entries())
        run.final_front.push_back({e.q, e.x, true, e.f1, e.f2});

    run.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
    return run;
}

void write_ea_outputs(const EaRun& run, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "ea_front.csv", std::ios::binary);
        f << "f1,f2,q,xminus\n";
        std::string buf;
        for (const auto& ind : run.final_front) {
            append_double(buf, ind.f1);
            buf.push_back(',');
            append_double(buf, ind.f2);
            buf.push_back(',');
            append_double(buf, ind.q);
            buf.push_back(',');
            append_double(buf, ind.x_minus);
            buf.push_back('\n');
        }
        f << buf;
    }
    {
        std::ofstream f(dir / "indicators.csv", std::ios::binary);
        f << "gen,igd,hv,evals\n";
        std::string buf;
        for (const auto& row : run.indicators) {
            buf += std::to_string(row.gen);
            buf.push_back(',');
            if (row.igd) append_double(buf, *row.igd);
            buf.push_back(',');
            append_double(buf, row.hv);
            buf.push_back(',');
            buf += std::to_string(row.evaluations);
            buf.push_back('\n');
        }
        f << buf;
    }
    {
        nlohmann::json meta;
        meta["population"] = run.config.population;
        meta["generations"] = run.config.generations;
        meta["crossover"] = {{"eta", run.config.crossover_eta},
                             {"prob", run.config.crossover_prob}};
        meta["mutation"] = {{"eta", run.config.mutation_eta},
                            {"prob_per_variable", run.config.mutation_prob}};
        meta["seed"] = run.config.seed;
        meta["bounds"] = {{"q_min", run.config.bounds.q_min},
                          {"q_max", run.config.bounds.q_max},
                          {"x_min", run.config.bounds.x_min},
                          {"x_max", run.config.bounds.x_max}};
        meta["fixed"] = {{"t_p", run.config.fixed.t_p},
                         {"alpha", run.config.fixed.alpha},
                         {"beta", run.config.fixed.beta}};
        meta["evaluations"] = run.evaluations;
        meta["front_size"] = run.final_front.size();
        meta["feasible_means"] = "stable period-T_p orbit exists";
        meta["hypervolume_ref"] = {0.0, 0.0};
        meta["runtime_ms"] = run.runtime_ms;
        std::ofstream f(dir / "meta.json", std::ios::binary);
        f << meta.dump(2) << '\n';
    }
}

}  // namespace pvboost
