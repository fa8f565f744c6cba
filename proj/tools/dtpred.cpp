// dtpred: generate prediction instances, repair them to Delaunay, measure and
// verify, and run the benchmark sweeps.

#include <dtpred/bench.hpp>

#include "svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>

using namespace dtpred;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0, kVerifyFailed = 1, kInputError = 2;

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur.push_back(c);
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& s, Fn&& parse)
{
    std::vector<T> out;
    for (const auto& tok : split_list(s)) {
        try {
            out.push_back(parse(tok));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Parse, "bad list element '" + tok + "'");
        }
    }
    if (out.empty())
        throw Error(ErrorKind::Parse, "empty list");
    return out;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream f(path);
    if (!f)
        throw Error(ErrorKind::InvalidInput, "cannot write " + path);
    return f;
}

void write_edges_file(const std::string& path, const std::vector<EdgeKey>& es)
{
    auto f = open_out(path);
    write_edges(f, es);
}

/// Loads a prediction; `g` is set when the edges triangulate P.
Prediction load_prediction(const std::string& points, const std::string& edges)
{
    Prediction p;
    p.ps = load_points_file(points);
    p.edges = load_edges_file(edges, p.ps->size());
    std::sort(p.edges.begin(), p.edges.end());
    try {
        auto g = Pslg::build(p.ps, p.edges);
        if (g.is_triangulation())
            p.g = g.to_triangulation();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::DuplicateEdge || e.kind() == ErrorKind::InvalidInput)
            throw;
    }
    return p;
}

const Triangulation& require_triangulation(const Prediction& p)
{
    if (!p.g)
        throw Error(ErrorKind::NotTriangulation, "edges do not form a triangulation of the points");
    return *p.g;
}

json ops_json(const OpCounters& c)
{
    return {{"incircle", c.incircle}, {"orient", c.orient},  {"walk_steps", c.walk_steps},
            {"flips", c.flips},       {"locate", c.locate_queries}, {"exact_fallbacks", c.exact_fallbacks}};
}

// --- gen ------------------------------------------------------------------------

struct GenOpts {
    std::size_t n = 1000;
    std::string dist = "uniform-square";
    std::string model = "flip";
    std::uint64_t seed = 0;
    std::size_t k = 0;
    double rho = 0.5;
    std::string completion = "longest-first";
    double eps = 1e-3;
    double jitter = 0.25;
    std::string points, edges;
};

int cmd_gen(const GenOpts& o)
{
    const auto ps = gen_points(o.n, parse_distribution(o.dist), o.seed, o.jitter);
    {
        auto f = open_out(o.points);
        write_points(f, *ps);
    }
    if (o.edges.empty())
        return kOk;
    std::vector<EdgeKey> es;
    if (o.model == "dt") {
        es = delaunay(ps, o.seed, false).edges();
    } else {
        ModelParams mp;
        mp.k = o.k;
        mp.rho = o.rho;
        mp.completion = parse_completion(o.completion);
        mp.eps = o.eps;
        auto pred = make_prediction(ps, parse_model(o.model), mp, o.seed);
        es = std::move(pred.edges);
        if (!pred.g)
            std::cerr << "note: prediction is not a plane triangulation\n";
    }
    write_edges_file(o.edges, es);
    return kOk;
}

// --- repair ---------------------------------------------------------------------

struct RepairOpts {
    std::string algo = "separator";
    std::string points, edges, out;
    std::uint64_t seed = 0;
};

int cmd_repair(const RepairOpts& o)
{
    const Algo algo = parse_algo(o.algo);
    const auto pred = load_prediction(o.points, o.edges);
    RepairRun run;
    if (!pred.g && algo == Algo::Sampling)
        run = run_sampling_from_edges(pred.ps, pred.edges, o.seed);
    else if (!pred.g && algo == Algo::Baseline)
        run = run_repair(algo, Triangulation(pred.ps), o.seed);
    else
        run = run_repair(algo, require_triangulation(pred), o.seed);
    if (!o.out.empty())
        write_edges_file(o.out, run.dt.edges());
    json j{{"algo", o.algo}, {"n", pred.ps->size()}, {"millis", run.millis}, {"ops", ops_json(run.ops)}};
    if (algo == Algo::Separator)
        j["separator"] = {{"t", run.separator.t},
                          {"regions", run.separator.regions},
                          {"bad_regions", run.separator.bad_regions},
                          {"boundary_vertices", run.separator.boundary_vertices},
                          {"bad_vertices", run.separator.bad_vertices}};
    if (algo == Algo::Sampling)
        j["sampling"] = {{"levels", run.sampling.level_sizes},
                         {"walk_steps", run.sampling.walk_steps},
                         {"fallbacks", run.sampling.fallbacks}};
    std::cout << j.dump() << "\n";
    return kOk;
}

// --- metrics --------------------------------------------------------------------

struct MetricsOpts {
    std::string points, edges;
    std::uint64_t seed = 0;
    std::string basis = "g";
};

int cmd_metrics(const MetricsOpts& o)
{
    const auto pred = load_prediction(o.points, o.edges);
    const Triangulation& g = require_triangulation(pred);
    const auto dt = delaunay(pred.ps, o.seed, false);
    auto r = report_against(g, dt, o.seed);
    if (o.basis == "dt") {
        const auto v = metric_violations(g, dt, ViolationBasis::DT);
        r.D_vio = v.total;
        r.d_vio = v.max_per_triangle;
    } else if (o.basis != "g") {
        throw Error(ErrorKind::InvalidInput, "basis must be 'g' or 'dt'");
    }
    std::cout << ClosenessReport::csv_header() << "\n" << r.csv_row() << "\n";
    return kOk;
}

// --- verify ---------------------------------------------------------------------

struct VerifyOpts {
    std::string points, edges;
    bool certify = false;
};

int cmd_verify(const VerifyOpts& o)
{
    const auto ps = load_points_file(o.points);
    auto es = load_edges_file(o.edges, ps->size());
    std::sort(es.begin(), es.end());
    json j;
    bool ok = false;
    if (o.certify) {
        const auto g = Pslg::build(ps, es);
        const auto r = certify_subgraph(g);
        ok = r.certified;
        j["certified"] = r.certified;
        if (r.witness)
            j["witness"] = {{"triangle", r.witness->triangle}, {"point", r.witness->point}};
        if (r.offending_edge)
            j["offending_edge"] = {r.offending_edge->a, r.offending_edge->b};
    } else {
        const auto g = Pslg::build(ps, es);
        if (!g.is_triangulation())
            throw Error(ErrorKind::NotTriangulation, "edges do not form a triangulation (use --certify)");
        const auto tri = g.to_triangulation();
        ok = true;
        for (const auto& e : tri.edges()) {
            const HalfEdge h = tri.find_halfedge(e.a, e.b);
            if (tri.halfedge_locally_delaunay(h))
                continue;
            ok = false;
            const TriId t = Triangulation::tri_of(h);
            j["witness"] = {{"triangle", {tri.corner(t, 0), tri.corner(t, 1), tri.corner(t, 2)}},
                            {"point", tri.origin(Triangulation::prev(tri.twin(h)))},
                            {"edge", {e.a, e.b}}};
            break;
        }
        j["delaunay"] = ok;
    }
    std::cout << j.dump() << "\n";
    return ok ? kOk : kVerifyFailed;
}

// --- emst -----------------------------------------------------------------------

struct EmstOpts {
    std::string points, tree, out;
    std::uint64_t seed = 0;
};

int cmd_emst(const EmstOpts& o)
{
    const auto ps = load_points_file(o.points);
    SpanningTree mst;
    json j{{"n", ps->size()}};
    if (o.tree.empty()) {
        mst = planar_mst(delaunay(ps, o.seed, false));
    } else {
        SamplingStats st;
        const OpCounters before = counters();
        mst = emst_repair(SpanningTree::from_edges(ps, load_edges_file(o.tree, ps->size())), o.seed, &st);
        j["ops"] = ops_json(counters() - before);
        j["ring_sort_excess"] = st.ring_sort_excess;
    }
    if (!o.out.empty())
        write_edges_file(o.out, mst.edges);
    std::cout << j.dump() << "\n";
    return kOk;
}

// --- bench ----------------------------------------------------------------------

void write_rows(const std::string& path, const std::vector<BenchRow>& rows)
{
    std::ofstream file;
    if (!path.empty())
        file = open_out(path);
    std::ostream& out = path.empty() ? std::cout : file;
    out << BenchRow::csv_header() << "\n";
    for (const auto& r : rows)
        out << r.csv_row() << "\n";
}

void write_plot(const std::string& path, const svg::Axes& ax, const std::vector<svg::Series>& series)
{
    if (path.empty())
        return;
    auto f = open_out(path);
    svg::scatter(f, ax, series);
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v.empty() ? 0.0 : v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

struct DsensOpts {
    std::size_t n = 20000;
    std::string ks = "0,1,10,100,1000,10000";
    std::size_t seeds = 3;
    std::uint64_t seed = 1;
    std::string algos = "baseline,separator,sampling";
    std::string dist = "uniform-square";
    std::string out, plot;
};

int cmd_dsens(const DsensOpts& o)
{
    DsensConfig cfg;
    cfg.n = o.n;
    cfg.ks = parse_list<std::size_t>(o.ks, [](const std::string& s) { return std::stoull(s); });
    cfg.seeds = o.seeds;
    cfg.base_seed = o.seed;
    cfg.algos = parse_list<Algo>(o.algos, parse_algo);
    cfg.dist = parse_distribution(o.dist);
    const auto res = run_dsens(cfg);
    write_rows(o.out, res.rows);

    std::map<std::string, std::map<std::size_t, std::vector<double>>> inc;
    for (const auto& r : res.rows)
        inc[r.algo][std::stoull(r.k_or_rho)].push_back(static_cast<double>(r.ops.incircle));
    std::vector<svg::Series> series;
    for (const auto& [algo, byk] : inc) {
        svg::Series s{algo, {}};
        std::cerr << algo << ":";
        for (const auto& [k, v] : byk) {
            std::cerr << " k=" << k << " median_incircle=" << median(v);
            for (double x : v)
                s.pts.emplace_back(static_cast<double>(k), x);
        }
        std::cerr << "\n";
        series.push_back(std::move(s));
    }
    write_plot(o.plot, {"incircle tests vs flip steps, n = " + std::to_string(o.n), "k", "incircle tests", true, true},
               series);
    for (std::size_t i : res.mismatches)
        std::cerr << "mismatch: " << res.rows[i].algo << " k=" << res.rows[i].k_or_rho << " seed=" << res.rows[i].seed
                  << "\n";
    return res.mismatches.empty() ? kOk : kVerifyFailed;
}

struct ProbOpts {
    std::size_t n = 10000;
    std::string rhos = "0.5,0.25,0.1";
    std::string completions = "random,longest-first";
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double constant = 8.0;
    std::string out, plot;
};

int cmd_prob(const ProbOpts& o)
{
    ProbConfig cfg;
    cfg.n = o.n;
    cfg.rhos = parse_list<double>(o.rhos, [](const std::string& s) { return std::stod(s); });
    for (double r : cfg.rhos)
        if (!(r > 0 && r <= 1))
            throw Error(ErrorKind::InvalidInput, "rho must lie in (0, 1]");
    cfg.completions = parse_list<Completion>(o.completions, parse_completion);
    cfg.trials = o.trials;
    cfg.base_seed = o.seed;
    cfg.constant = o.constant;
    const auto res = run_prob(cfg);
    write_rows(o.out, res.rows);

    std::map<std::string, svg::Series> series;
    for (const auto& r : res.rows) {
        auto& s = series[r.algo];
        s.name = r.algo;
        s.pts.emplace_back(std::log(static_cast<double>(r.n)) / std::stod(r.k_or_rho), static_cast<double>(r.report.d_cross));
    }
    std::vector<svg::Series> list;
    for (auto& [_, s] : series)
        list.push_back(std::move(s));
    write_plot(o.plot, {"d_cross vs (1/rho) ln n, n = " + std::to_string(o.n), "(1/rho) ln n", "d_cross", false, false},
               list);
    for (std::size_t g = 0; g < res.within.size(); ++g) {
        const double rho = cfg.rhos[g / cfg.completions.size()];
        std::cerr << "rho=" << rho << " completion=" << completion_name(cfg.completions[g % cfg.completions.size()])
                  << " within " << cfg.constant << "(1/rho)ln n: " << res.within[g].first << "/" << res.within[g].second
                  << "\n";
    }
    return kOk;
}

struct ChainOpts {
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_chain(const ChainOpts& o)
{
    const auto res = run_chain(o.trials, o.seed);
    std::ofstream file;
    if (!o.out.empty())
        file = open_out(o.out);
    std::ostream& out = o.out.empty() ? std::cout : file;
    out << "trial,n,check,lhs,rhs\n";
    for (const auto& v : res.violations)
        out << v.trial << ',' << v.n << ',' << v.check << ',' << v.lhs << ',' << v.rhs << "\n";
    std::cerr << "checked " << res.rows.size() << " instances, skipped " << res.skipped << " self-crossing, "
              << res.violations.size() << " violations\n";
    return res.violations.empty() ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Delaunay repair from predicted triangulations"};
    app.require_subcommand(1);
    std::function<int()> action;

    GenOpts gen;
    auto* g = app.add_subcommand("gen", "generate points and a predicted triangulation");
    g->add_option("-n,--n", gen.n, "number of points");
    g->add_option("--dist", gen.dist, "uniform-square | gaussian-clusters | grid-jitter");
    g->add_option("--model", gen.model, "flip | sample | perturb | dt");
    g->add_option("--seed", gen.seed);
    g->add_option("-k,--k", gen.k, "flip steps");
    g->add_option("--rho", gen.rho, "edge sample rate");
    g->add_option("--completion", gen.completion, "random | longest-first");
    g->add_option("--eps", gen.eps, "perturbation radius");
    g->add_option("--jitter", gen.jitter, "grid jitter as a fraction of a cell");
    g->add_option("--points", gen.points, "output points file")->required();
    g->add_option("--edges", gen.edges, "output edges file");
    g->callback([&] { action = [&] { return cmd_gen(gen); }; });

    RepairOpts rep;
    auto* r = app.add_subcommand("repair", "compute DT(P) from a prediction");
    r->add_option("--algo", rep.algo, "separator | sampling | baseline");
    r->add_option("--points", rep.points)->required();
    r->add_option("--edges", rep.edges)->required();
    r->add_option("--out", rep.out, "output DT edges file");
    r->add_option("--seed", rep.seed);
    r->callback([&] { action = [&] { return cmd_repair(rep); }; });

    MetricsOpts met;
    auto* m = app.add_subcommand("metrics", "closeness of a triangulation to DT(P)");
    m->add_option("--points", met.points)->required();
    m->add_option("--edges", met.edges)->required();
    m->add_option("--seed", met.seed);
    m->add_option("--basis", met.basis, "triangles for D_vio/d_vio: g | dt");
    m->callback([&] { action = [&] { return cmd_metrics(met); }; });

    VerifyOpts ver;
    auto* v = app.add_subcommand("verify", "check Delaunayhood, or certify a plane graph as a DT subgraph");
    v->add_option("--points", ver.points)->required();
    v->add_option("--edges", ver.edges)->required();
    v->add_flag("--certify", ver.certify, "static certificate for an arbitrary plane graph");
    v->callback([&] { action = [&] { return cmd_verify(ver); }; });

    EmstOpts em;
    auto* e = app.add_subcommand("emst", "Euclidean minimum spanning tree");
    e->add_option("--points", em.points)->required();
    e->add_option("--tree", em.tree, "spanning tree to repair from (else computed from scratch)");
    e->add_option("--out", em.out);
    e->add_option("--seed", em.seed);
    e->callback([&] { action = [&] { return cmd_emst(em); }; });

    auto* b = app.add_subcommand("bench", "benchmark sweeps");
    b->require_subcommand(1);
    DsensOpts ds;
    auto* bd = b->add_subcommand("dsens", "operation counts against flip-model distance");
    bd->add_option("-n,--n", ds.n);
    bd->add_option("--ks", ds.ks, "comma-separated flip step counts");
    bd->add_option("--seeds", ds.seeds, "runs per k");
    bd->add_option("--seed", ds.seed, "first seed");
    bd->add_option("--algos", ds.algos);
    bd->add_option("--dist", ds.dist);
    bd->add_option("--out", ds.out, "CSV file (stdout if absent)");
    bd->add_option("--plot", ds.plot, "SVG file");
    bd->callback([&] { action = [&] { return cmd_dsens(ds); }; });

    ProbOpts pr;
    auto* bp = b->add_subcommand("prob", "d_cross under the edge-sample model");
    bp->add_option("-n,--n", pr.n);
    bp->add_option("--rhos", pr.rhos);
    bp->add_option("--completions", pr.completions);
    bp->add_option("--trials", pr.trials);
    bp->add_option("--seed", pr.seed);
    bp->add_option("--constant", pr.constant, "c in d_cross <= c (1/rho) ln n");
    bp->add_option("--out", pr.out);
    bp->add_option("--plot", pr.plot);
    bp->callback([&] { action = [&] { return cmd_prob(pr); }; });

    ChainOpts ch;
    auto* bc = b->add_subcommand("chain", "metric inequalities over the fuzz corpus");
    bc->add_option("--trials", ch.trials);
    bc->add_option("--seed", ch.seed);
    bc->add_option("--out", ch.out, "violations CSV (stdout if absent)");
    bc->callback([&] { action = [&] { return cmd_chain(ch); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? kOk : kInputError;
    }
    try {
        return action ? action() : kInputError;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kInputError;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return kVerifyFailed;
    }
}
