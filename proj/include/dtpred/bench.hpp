#pragma once

// Shared plumbing for the command-line tool and the acceptance run: repair
// dispatch with operation counts, prediction instances, a small worker pool
// and the benchmark CSV row.

#include <dtpred/predict_gen.hpp>
#include <dtpred/repair_sampling.hpp>
#include <dtpred/repair_separator.hpp>
#include <dtpred/verify.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <mutex>
#include <thread>

namespace dtpred {

enum class Algo { Baseline, Separator, Sampling };

inline Algo parse_algo(const std::string& s)
{
    if (s == "baseline")
        return Algo::Baseline;
    if (s == "separator")
        return Algo::Separator;
    if (s == "sampling")
        return Algo::Sampling;
    throw Error(ErrorKind::InvalidInput, "unknown algorithm '" + s + "'");
}

inline const char* to_string(Algo a)
{
    switch (a) {
    case Algo::Baseline: return "baseline";
    case Algo::Separator: return "separator";
    case Algo::Sampling: return "sampling";
    }
    return "?";
}

struct RepairRun {
    Triangulation dt;
    OpCounters ops;
    double millis = 0;
    SeparatorStats separator;
    SamplingStats sampling;
};

namespace detail {

template <typename Fn>
RepairRun timed_run(Fn&& fn)
{
    RepairRun r;
    const OpCounters before = counters();
    const auto t0 = std::chrono::steady_clock::now();
    fn(r);
    r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    r.ops = counters() - before;
    return r;
}

} // namespace detail

/// DT(P) from prediction g. The baseline ignores g and rebuilds from scratch.
inline RepairRun run_repair(Algo algo, const Triangulation& g, std::uint64_t seed)
{
    return detail::timed_run([&](RepairRun& r) {
        switch (algo) {
        case Algo::Baseline: r.dt = delaunay(g.point_set(), seed, false); break;
        case Algo::Separator: {
            SeparatorOptions opt;
            opt.seed = seed;
            r.dt = repair_separator(g, opt, &r.separator);
            break;
        }
        case Algo::Sampling: r.dt = repair(g, seed, {}, &r.sampling); break;
        }
    });
}

/// Sampling repair from an arbitrary connected edge list (self-crossing allowed).
inline RepairRun run_sampling_from_edges(const PointSetPtr& ps, const std::vector<EdgeKey>& edges,
                                         std::uint64_t seed)
{
    return detail::timed_run([&](RepairRun& r) {
        r.dt = repair_from_tree(spanning_tree_of_edges(ps, edges), seed, {}, &r.sampling);
    });
}

enum class Model { Flip, Sample, Perturb };

inline Model parse_model(const std::string& s)
{
    if (s == "flip")
        return Model::Flip;
    if (s == "sample")
        return Model::Sample;
    if (s == "perturb")
        return Model::Perturb;
    throw Error(ErrorKind::InvalidInput, "unknown model '" + s + "'");
}

inline const char* to_string(Model m)
{
    switch (m) {
    case Model::Flip: return "flip";
    case Model::Sample: return "sample";
    case Model::Perturb: return "perturb";
    }
    return "?";
}

struct ModelParams {
    std::size_t k = 0;                              // flip steps
    double rho = 0.5;                               // edge sample rate
    Completion completion = Completion::LongestFirst;
    double eps = 1e-3;                              // perturbation radius
};

struct Prediction {
    PointSetPtr ps;
    std::vector<EdgeKey> edges;      // sorted
    std::optional<Triangulation> g;  // when the edges form a triangulation of P
};

inline Prediction make_prediction(const PointSetPtr& ps, Model model, const ModelParams& mp, std::uint64_t seed)
{
    Prediction out;
    out.ps = ps;
    if (model == Model::Perturb) {
        auto cg = perturb_model(ps, mp.eps, seed);
        out.edges = std::move(cg.edges);
        out.g = CombinatorialGraph{ps, out.edges, {}, cg.self_crossing}.as_triangulation();
        return out;
    }
    const auto dt = delaunay(ps, seed, false);
    out.g = model == Model::Flip ? flip_model(dt, mp.k, seed).g
                                 : edge_sample_model(dt, mp.rho, mp.completion, seed).g;
    out.edges = out.g->edges();
    return out;
}

/// Instance i of the mixed fuzz corpus: n in [4, 2000], all three models and
/// all three distributions.
struct FuzzCase {
    Prediction pred;
    Model model;
    Distribution dist;
};

inline FuzzCase fuzz_case(std::size_t i, std::uint64_t seed)
{
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + i);
    const std::size_t n = 4 + rng() % 1997;
    const auto dist = static_cast<Distribution>(rng() % 3);
    const auto model = static_cast<Model>(i % 3);
    ModelParams mp;
    mp.k = rng() % (2 * n);
    mp.rho = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    mp.completion = rng() % 2 ? Completion::Random : Completion::LongestFirst;
    mp.eps = std::pow(10.0, -1.0 - static_cast<double>(rng() % 5));
    const auto ps = gen_points(n, dist, rng());
    return {make_prediction(ps, model, mp, rng()), model, dist};
}

inline std::size_t worker_count()
{
    if (const char* env = std::getenv("DTPRED_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on a bounded pool; the first exception is
/// rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t workers = worker_count())
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error)
                    error = std::current_exception();
                next = count;
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
}

struct BenchRow {
    std::size_t n = 0;
    std::string k_or_rho;
    std::string algo;
    std::uint64_t seed = 0;
    double millis = 0;
    OpCounters ops;
    ClosenessReport report; // of the prediction against DT(P)

    static std::string csv_header()
    {
        return "n,k_or_rho,algo,seed,millis,incircle_count,orient_count,walk_steps,D,D_local,D_cross,d_cross,"
               "D_vio,d_vio,flip_upper";
    }

    std::string csv_row() const
    {
        std::ostringstream o;
        o << n << ',' << k_or_rho << ',' << algo << ',' << seed << ',' << std::fixed << std::setprecision(3)
          << millis << ',' << ops.incircle << ',' << ops.orient << ',' << ops.walk_steps << ',' << report.D << ','
          << report.D_local << ',' << report.D_cross << ',' << report.d_cross << ',' << report.D_vio << ','
          << report.d_vio << ',' << report.flip_upper;
        return o.str();
    }
};

inline std::string format_param(double v) { return detail::format_double(v); }

// --- D-sensitivity sweep -----------------------------------------------------

struct DsensConfig {
    std::size_t n = 20000;
    std::vector<std::size_t> ks{0, 1, 10, 100, 1000, 10000};
    std::size_t seeds = 3;
    std::uint64_t base_seed = 1;
    std::vector<Algo> algos{Algo::Baseline, Algo::Separator, Algo::Sampling};
    Distribution dist = Distribution::UniformSquare;
};

struct DsensResult {
    std::vector<BenchRow> rows;              // (k, seed, algo) in config order
    std::vector<std::size_t> bad_regions;    // per row; separator only, else 0
    std::vector<std::size_t> mismatches;     // row indices whose output differs from DT(P)
};

inline DsensResult run_dsens(const DsensConfig& cfg, std::size_t workers = worker_count())
{
    const std::size_t tasks = cfg.ks.size() * cfg.seeds, per = cfg.algos.size();
    DsensResult res;
    res.rows.resize(tasks * per);
    res.bad_regions.assign(tasks * per, 0);
    std::vector<char> bad(tasks * per, 0);
    parallel_for(tasks, [&](std::size_t t) {
        const std::size_t k = cfg.ks[t / cfg.seeds];
        const std::uint64_t seed = cfg.base_seed + t % cfg.seeds;
        const auto ps = gen_points(cfg.n, cfg.dist, seed);
        const auto dt = delaunay(ps, seed, false);
        const auto g = flip_model(dt, k, seed).g;
        const auto report = report_against(g, dt, seed);
        for (std::size_t a = 0; a < per; ++a) {
            const auto run = run_repair(cfg.algos[a], g, seed);
            BenchRow& row = res.rows[t * per + a];
            row = {cfg.n, std::to_string(k), to_string(cfg.algos[a]), seed, run.millis, run.ops, report};
            res.bad_regions[t * per + a] = run.separator.bad_regions;
            bad[t * per + a] = dt_equal(run.dt, dt) ? 0 : 1;
        }
    }, workers);
    for (std::size_t i = 0; i < bad.size(); ++i)
        if (bad[i])
            res.mismatches.push_back(i);
    return res;
}

// --- probabilistic edge-sample model -------------------------------------------

struct ProbConfig {
    std::size_t n = 10000;
    std::vector<double> rhos{0.5, 0.25, 0.1};
    std::vector<Completion> completions{Completion::Random, Completion::LongestFirst};
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    double constant = 8.0; // d_cross <= constant * (1/rho) * ln n
};

struct ProbResult {
    std::vector<BenchRow> rows;                        // (rho, completion, trial)
    std::vector<std::pair<std::size_t, std::size_t>> within; // per (rho, completion): (hits, trials)
};

inline const char* completion_name(Completion c) { return c == Completion::Random ? "random" : "longest-first"; }

inline double prob_bound(const ProbConfig& cfg, double rho)
{
    return cfg.constant / rho * std::log(static_cast<double>(cfg.n));
}

inline ProbResult run_prob(const ProbConfig& cfg, std::size_t workers = worker_count())
{
    const std::size_t groups = cfg.rhos.size() * cfg.completions.size();
    ProbResult res;
    res.rows.resize(groups * cfg.trials);
    parallel_for(res.rows.size(), [&](std::size_t i) {
        const std::size_t grp = i / cfg.trials;
        const double rho = cfg.rhos[grp / cfg.completions.size()];
        const Completion c = cfg.completions[grp % cfg.completions.size()];
        const std::uint64_t seed = cfg.base_seed + i % cfg.trials;
        const auto ps = gen_points(cfg.n, Distribution::UniformSquare, seed);
        const auto dt = delaunay(ps, seed, false);
        const auto m = edge_sample_model(dt, rho, c, seed);
        const OpCounters before = counters();
        const auto t0 = std::chrono::steady_clock::now();
        const auto report = report_against(m.g, dt, seed);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        res.rows[i] = {cfg.n, format_param(rho), std::string("sample-") + completion_name(c), seed, ms,
                       counters() - before, report};
    }, workers);
    for (std::size_t grp = 0; grp < groups; ++grp) {
        const double bound = prob_bound(cfg, cfg.rhos[grp / cfg.completions.size()]);
        std::size_t hits = 0;
        for (std::size_t t = 0; t < cfg.trials; ++t)
            hits += static_cast<double>(res.rows[grp * cfg.trials + t].report.d_cross) <= bound ? 1 : 0;
        res.within.emplace_back(hits, cfg.trials);
    }
    return res;
}

// --- inequality chain over the fuzz corpus ---------------------------------------

struct ChainViolation {
    std::size_t trial = 0;
    std::size_t n = 0;
    std::string check;
    std::size_t lhs = 0, rhs = 0;
};

struct ChainResult {
    std::vector<BenchRow> rows;               // one per checked instance
    std::vector<ChainViolation> violations;
    std::size_t skipped = 0;                  // self-crossing perturbed predictions
};

inline std::vector<ChainViolation> chain_checks(std::size_t trial, const Triangulation& g, const Triangulation& dt,
                                                const ClosenessReport& r)
{
    std::vector<ChainViolation> out;
    auto need = [&](const char* what, std::size_t lhs, std::size_t rhs) {
        if (lhs > rhs)
            out.push_back({trial, r.n, what, lhs, rhs});
    };
    need("D_local<=D", r.D_local, r.D);
    need("D<=flip_upper", r.D, r.flip_upper);
    need("D<=D_cross", r.D, r.D_cross);
    need("circle0<=d_vio", circle0_max(g, dt), r.d_vio);
    if (!vio_relation_holds(r.d_cross, r.d_vio))
        out.push_back({trial, r.n, "d_cross<=32max(1,d_vio^2)", r.d_cross,
                       kVioCrossConstant * std::max<std::size_t>(1, r.d_vio * r.d_vio)});
    if ((r.D == 0) != (r.D_local == 0))
        out.push_back({trial, r.n, "D=0<=>D_local=0", r.D, r.D_local});
    return out;
}

inline ChainResult run_chain(std::size_t trials, std::uint64_t seed, std::size_t workers = worker_count())
{
    ChainResult res;
    std::vector<std::optional<BenchRow>> rows(trials);
    std::vector<std::vector<ChainViolation>> found(trials);
    parallel_for(trials, [&](std::size_t i) {
        const auto fc = fuzz_case(i, seed);
        if (!fc.pred.g)
            return;
        const auto dt = delaunay(fc.pred.ps, seed, false);
        const auto report = report_against(*fc.pred.g, dt, seed + i);
        rows[i] = BenchRow{report.n, "-", to_string(fc.model), seed + i, 0.0, {}, report};
        found[i] = chain_checks(i, *fc.pred.g, dt, report);
    }, workers);
    for (std::size_t i = 0; i < trials; ++i) {
        if (!rows[i]) {
            ++res.skipped;
            continue;
        }
        res.rows.push_back(*rows[i]);
        res.violations.insert(res.violations.end(), found[i].begin(), found[i].end());
    }
    return res;
}

} // namespace dtpred
