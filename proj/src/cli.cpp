#include "fjstooges/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fjstooges/dynamics.hpp"
#include "fjstooges/errors.hpp"
#include "fjstooges/fixtures.hpp"
#include "fjstooges/generators.hpp"
#include "fjstooges/io.hpp"
#include "fjstooges/metrics.hpp"
#include "fjstooges/selection.hpp"

namespace fj::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

fs::path output_dir() {
    const char* dir = std::getenv(kOutputDirEnv);
    return dir && *dir ? fs::path(dir) : fs::path(".");
}

std::uint64_t opinion_seed(std::uint64_t seed) { return seed ^ 0x5851F42D4C957F2DULL; }

double now_ms() {
    using namespace std::chrono;
    return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

Objective parse_objective(const std::string& s) { return s == "mse" ? Objective::Mse : Objective::Polarization; }
Direction parse_direction(const std::string& s) { return s == "max" ? Direction::Maximize : Direction::Minimize; }

std::vector<Objective> objectives_of(const std::string& s) {
    if (s == "all") return {Objective::Mse, Objective::Polarization};
    return {parse_objective(s)};
}

std::vector<Direction> directions_of(const std::string& s) {
    if (s == "all") return {Direction::Maximize, Direction::Minimize};
    return {parse_direction(s)};
}

// ---------------------------------------------------------------------------
// Instance sources

struct SourceOptions {
    std::string instance;
    std::string edges;
    std::string opinions;
    std::string scale = "unit";
    std::string tweets;
    std::string dataset;

    std::string model;
    std::size_t n = 0;
    double p = presets::kGnpP;
    std::size_t leaves = presets::kStarLeaves;
    std::size_t rows = presets::kGridRows;
    std::size_t cols = presets::kGridCols;
    std::string dist = "normal";
    double mean = 0.5;
    double variance = 0.5;
    double low = 0.0;
    double high = 1.0;
    double rate = 1.0;
    double alpha = presets::kDefaultResistance;
};

void add_generator_options(CLI::App* cmd, SourceOptions& s) {
    cmd->add_option("--model", s.model, "Synthetic graph model")
        ->check(CLI::IsMember({"gnp", "communities", "tree", "star", "grid"}));
    cmd->add_option("--n", s.n, "Node count for gnp and tree");
    cmd->add_option("--p", s.p, "Edge probability for gnp")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd->add_option("--leaves", s.leaves, "Leaves of the star")->capture_default_str();
    cmd->add_option("--rows", s.rows, "Grid rows")->capture_default_str();
    cmd->add_option("--cols", s.cols, "Grid columns")->capture_default_str();
    cmd->add_option("--dist", s.dist, "Innate opinion distribution")
        ->check(CLI::IsMember({"normal", "uniform", "exponential"}))
        ->capture_default_str();
    cmd->add_option("--mean", s.mean, "Mean of the clipped normal")->capture_default_str();
    cmd->add_option("--variance", s.variance, "Variance of the clipped normal")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--low", s.low, "Lower bound of the uniform")->capture_default_str();
    cmd->add_option("--high", s.high, "Upper bound of the uniform")->capture_default_str();
    cmd->add_option("--rate", s.rate, "Rate of the exponential")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--alpha", s.alpha, "Resistance of every node (unless drawn from tweet counts)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
}

void add_source_options(CLI::App* cmd, SourceOptions& s) {
    cmd->add_option("--instance", s.instance, "Instance file written by 'generate'");
    cmd->add_option("--edges", s.edges, "Edge list: 'n m' header, then 'u v' lines");
    cmd->add_option("--opinions", s.opinions, "Innate opinions, one per line (with --edges)");
    cmd->add_option("--scale", s.scale, "Scale of the opinion file")
        ->check(CLI::IsMember({"unit", "zero_ten"}))
        ->capture_default_str();
    cmd->add_option("--tweets", s.tweets, "Tweet counts, one per line; resistances are drawn from them");
    cmd->add_option("--dataset", s.dataset, "Dataset label for the CSV");
    add_generator_options(cmd, s);
}

struct Loaded {
    OpinionInstance instance;
    UndirectedGraph graph;
    std::string name;
};

UndirectedGraph generate_graph(const SourceOptions& s, std::uint64_t seed, std::string& label) {
    std::ostringstream name;
    if (s.model == "gnp") {
        if (s.n == 0) throw UsageError("--model gnp needs --n >= 1");
        name << "gnp-" << s.n << "-" << s.p;
        label = name.str();
        return gen_gnp(s.n, s.p, seed);
    }
    if (s.model == "tree") {
        if (s.n < 2) throw UsageError("--model tree needs --n >= 2");
        name << "tree-" << s.n;
        label = name.str();
        return gen_random_tree(s.n, seed);
    }
    if (s.model == "communities") {
        label = "communities";
        return gen_communities(seed);
    }
    if (s.model == "star") {
        name << "star-" << s.leaves;
        label = name.str();
        return gen_star(s.leaves);
    }
    if (s.rows == 0 || s.cols == 0) throw UsageError("--rows and --cols must be >= 1");
    name << "grid-" << s.rows << "x" << s.cols;
    label = name.str();
    return gen_grid(s.rows, s.cols);
}

OpinionDistribution distribution_of(const SourceOptions& s) {
    if (s.dist == "uniform") {
        if (!(s.low <= s.high)) throw UsageError("--low must not exceed --high");
        return Uniform{s.low, s.high};
    }
    if (s.dist == "exponential") return Exponential{s.rate};
    return ClippedNormal{s.mean, s.variance};
}

Loaded load_source(const SourceOptions& s, std::uint64_t seed) {
    const int given = int(!s.instance.empty()) + int(!s.edges.empty() || !s.opinions.empty()) + int(!s.model.empty());
    if (given != 1) throw UsageError("give exactly one of --instance, --edges/--opinions, --model");

    Loaded out;
    if (!s.instance.empty()) {
        out.instance = io::load_instance(s.instance);
        out.graph = support_graph(out.instance.influence);
        out.name = fs::path(s.instance).stem().string();
    } else if (!s.model.empty()) {
        std::string label;
        out.graph = generate_graph(s, seed, label);
        auto innate = sample_opinions(out.graph.node_count(), distribution_of(s), opinion_seed(seed));
        out.instance = OpinionInstance(influence_from_undirected(out.graph),
                                       std::vector<double>(out.graph.node_count(), s.alpha), std::move(innate));
        out.name = label;
    } else {
        if (s.edges.empty() || s.opinions.empty()) throw UsageError("--edges and --opinions go together");
        const auto scale = s.scale == "zero_ten" ? io::OpinionScale::ZeroTen : io::OpinionScale::Unit;
        std::optional<fs::path> tweets;
        if (!s.tweets.empty()) tweets = s.tweets;
        auto bundle = io::load_dataset(s.edges, s.opinions, scale, tweets);
        out.instance = io::instance_from_dataset(bundle, seed, s.alpha);
        out.graph = std::move(bundle.graph);
        out.name = fs::path(s.edges).stem().string();
    }
    if (!s.dataset.empty()) out.name = s.dataset;
    return out;
}

// ---------------------------------------------------------------------------
// Selection runs

struct SolverOptions {
    double epsilon = 1e-5;
    std::string phi = "1.1";
    double min_gain = 1e-9;
    std::size_t max_sweeps = 1'000'000;
    bool exact = false;
    std::uint64_t budget = BruteForceOptions{}.budget;
    std::vector<NodeId> candidates;
};

void add_solver_options(CLI::App* cmd, SolverOptions& o) {
    cmd->add_option("--epsilon", o.epsilon, "Convergence tolerance of the incremental equilibrium")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--phi", o.phi, "Lazy slack (>= 1, or 'inf' to disable pruning)")->capture_default_str();
    cmd->add_option("--min-gain", o.min_gain, "Smallest gain that counts as an improvement")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--max-sweeps", o.max_sweeps, "Sweep cap of the iterative equilibrium")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--exact", o.exact, "Evaluate every gain with an exact solve");
    cmd->add_option("--budget", o.budget, "Configuration budget of brute force")->capture_default_str();
}

double parse_phi(const std::string& text) {
    if (text == "inf" || text == "infinity") return kNoLazyPruning;
    double phi = 0.0;
    try {
        std::size_t used = 0;
        phi = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw UsageError("--phi: not a number: " + text);
    }
    if (!(phi >= 1.0)) throw UsageError("--phi must be >= 1");
    return phi;
}

GreedyOptions greedy_options(const SolverOptions& o) {
    GreedyOptions g;
    g.epsilon = o.epsilon;
    g.min_gain = o.min_gain;
    g.max_sweeps = o.max_sweeps;
    g.exact = o.exact;
    g.phi = parse_phi(o.phi);
    if (!o.candidates.empty()) g.candidates = o.candidates;
    return g;
}

enum class Algorithm { Greedy, Random, MaxDegree, Centrality, Brute };

const std::map<std::string, Algorithm>& algorithm_names() {
    static const std::map<std::string, Algorithm> names = {{"greedy", Algorithm::Greedy},
                                                           {"random", Algorithm::Random},
                                                           {"maxdegree", Algorithm::MaxDegree},
                                                           {"centrality", Algorithm::Centrality},
                                                           {"brute", Algorithm::Brute}};
    return names;
}

std::vector<std::string> algorithm_keys() {
    std::vector<std::string> out;
    for (const auto& [name, algo] : algorithm_names()) out.push_back(name);
    return out;
}

struct RunRequest {
    std::string algorithm;
    Objective objective = Objective::Mse;
    Direction direction = Direction::Maximize;
    std::size_t k = 10;
    std::uint64_t seed = 1;
    std::string run_id;
};

std::string default_run_id(const std::string& dataset, const RunRequest& r) {
    const auto stamp = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
    std::ostringstream id;
    id << dataset << '-' << r.algorithm << '-' << to_string(r.objective) << '-' << to_string(r.direction) << "-s"
       << r.seed << '-' << stamp;
    return id.str();
}

io::ExperimentRecord make_record(const Loaded& data, const RunRequest& r, std::size_t k_step,
                                 const MetricReport& m, double elapsed_ms, std::size_t evaluations,
                                 const StoogeAssignment& stooges) {
    io::ExperimentRecord rec;
    rec.run_id = r.run_id;
    rec.dataset = data.name;
    rec.algorithm = r.algorithm;
    rec.objective = to_string(r.objective);
    rec.direction = to_string(r.direction);
    rec.k_step = k_step;
    rec.seed = r.seed;
    rec.mse = m.mse;
    rec.polarization = m.polarization;
    rec.bias_sq = m.bias_sq;
    rec.theta_hat = m.theta_hat;
    rec.theta_hat_star = m.theta_hat_star;
    rec.elapsed_ms = elapsed_ms;
    rec.evaluations = evaluations;
    rec.stooges = io::encode_stooges(stooges);
    return rec;
}

struct RunOutput {
    std::vector<io::ExperimentRecord> records;
    StoogeAssignment final_assignment;
    OpinionVector final_opinions;
};

// One row per k_step. Greedy is nested, so its rows are prefixes of a single
// run; every other algorithm is rerun with budget k_step.
RunOutput run_algorithm(const Loaded& data, const RunRequest& r, const SolverOptions& solver) {
    const auto algo = algorithm_names().at(r.algorithm);
    const auto& inst = data.instance;
    auto gopts = greedy_options(solver);
    RunOutput out;

    if (algo == Algorithm::Greedy) {
        const double t0 = now_ms();
        const auto res = greedy_lazy(inst, r.k, r.objective, r.direction, gopts);
        const double elapsed = now_ms() - t0;
        const auto reports = evaluate_prefixes(inst, res.assignment);
        StoogeAssignment prefix;
        for (std::size_t j = 1; j <= res.assignment.size(); ++j) {
            prefix.push_back(res.assignment[j - 1]);
            out.records.push_back(make_record(data, r, j, reports[j], elapsed, res.evaluation_trace[j - 1], prefix));
        }
        out.final_assignment = res.assignment;
        out.final_opinions = equilibrium_solve(apply_stooges(inst, res.assignment)).x_star;
        return out;
    }

    for (std::size_t j = 1; j <= r.k; ++j) {
        const double t0 = now_ms();
        SelectionResult res;
        if (algo == Algorithm::Brute) {
            res = brute_force(inst, j, r.objective, r.direction, BruteForceOptions{solver.budget});
        } else {
            const auto strategy = algo == Algorithm::Random      ? BaselineStrategy::Random
                                  : algo == Algorithm::MaxDegree ? BaselineStrategy::MaxDegree
                                                                 : BaselineStrategy::Centrality;
            res = baseline_select(inst, data.graph, j, strategy, r.objective, r.direction, r.seed, gopts);
        }
        const double elapsed = now_ms() - t0;
        auto x = equilibrium_solve(apply_stooges(inst, res.assignment)).x_star;
        out.records.push_back(
            make_record(data, r, j, metric_report(inst.innate, x), elapsed, res.evaluations, res.assignment));
        out.final_assignment = res.assignment;
        out.final_opinions = std::move(x);
    }
    return out;
}

void print_records(std::ostream& out, const std::vector<io::ExperimentRecord>& records) {
    out << "k_step\tmse\tpolarization\tbias_sq\ttheta_hat_star\tevaluations\tstooges\n";
    for (const auto& r : records) {
        out << r.k_step << '\t' << io::format_real(r.mse) << '\t' << io::format_real(r.polarization) << '\t'
            << io::format_real(r.bias_sq) << '\t' << io::format_real(r.theta_hat_star) << '\t' << r.evaluations
            << '\t' << r.stooges << '\n';
    }
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateCmd {
    SourceOptions source;
    std::uint64_t seed = 1;
    std::string out;
};

int do_generate(const GenerateCmd& c, std::ostream& out) {
    if (c.source.model.empty()) throw UsageError("generate: --model is required");
    const auto data = load_source(c.source, c.seed);
    const fs::path prefix = c.out.empty() ? output_dir() / (data.name + "-s" + std::to_string(c.seed)) : fs::path(c.out);
    const auto with = [&](const char* ext) { return fs::path(prefix.string() + ext); };
    io::save_edge_list(with(".edges"), data.graph);
    io::save_vector(with(".opinions"), data.instance.innate);
    io::save_instance(with(".instance"), data.instance);
    out << "nodes " << data.graph.node_count() << "\nedges " << data.graph.edge_count() << "\ninstance "
        << with(".instance").string() << '\n';
    return kExitOk;
}

struct EquilibriumCmd {
    SourceOptions source;
    std::string method = "solve";
    std::uint64_t seed = 1;
    double epsilon = 1e-5;
    std::size_t max_sweeps = 1'000'000;
    std::size_t walks = 100'000;
    std::vector<NodeId> nodes;
    std::string save;
};

int do_equilibrium(const EquilibriumCmd& c, std::ostream& out) {
    const auto data = load_source(c.source, c.seed);
    const auto& inst = data.instance;
    out << std::setprecision(12);
    if (c.method == "montecarlo") {
        std::vector<NodeId> nodes = c.nodes;
        if (nodes.empty()) {
            nodes.resize(inst.size());
            for (std::size_t v = 0; v < inst.size(); ++v) nodes[v] = static_cast<NodeId>(v);
        }
        out << "node\tmean\tstandard_error\n";
        for (NodeId v : nodes) {
            if (v >= inst.size()) throw DataError("node " + std::to_string(v) + " out of range");
            const auto est = equilibrium_montecarlo(inst, v, c.walks, c.seed);
            out << v << '\t' << est.mean << '\t' << est.standard_error << '\n';
        }
        return kExitOk;
    }

    EquilibriumResult eq;
    if (c.method == "iterative") {
        std::vector<NodeId> all(inst.size());
        for (std::size_t v = 0; v < inst.size(); ++v) all[v] = static_cast<NodeId>(v);
        IterativeOptions opts;
        opts.tolerance = c.epsilon;
        opts.max_sweeps = c.max_sweeps;
        eq = equilibrium_iterative(inst, all, inst.innate, opts);
        if (!eq.converged) {
            throw NonConvergence("iterative equilibrium did not converge within " + std::to_string(c.max_sweeps) +
                                 " sweeps");
        }
    } else {
        eq = equilibrium_solve(inst);
    }
    const auto m = metric_report(inst.innate, eq.x_star);
    out << "nodes " << inst.size() << "\niterations " << eq.iterations << "\nresidual " << eq.residual
        << "\ntheta_hat " << m.theta_hat << "\ntheta_hat_star " << m.theta_hat_star << "\nmse " << m.mse
        << "\npolarization " << m.polarization << "\nbias_sq " << m.bias_sq << '\n';
    if (!c.save.empty()) io::save_vector(c.save, eq.x_star);
    return kExitOk;
}

struct SelectCmd {
    SourceOptions source;
    SolverOptions solver;
    std::string algorithm = "greedy";
    std::string objective = "mse";
    std::string direction = "max";
    std::size_t k = 10;
    std::uint64_t seed = 1;
    std::string csv;
    std::string run_id;
    std::string save_opinions;
    bool distance_groups = false;
};

fs::path csv_path(const std::string& given) { return given.empty() ? output_dir() / "results.csv" : fs::path(given); }

int do_select(const SelectCmd& c, std::ostream& out) {
    const auto data = load_source(c.source, c.seed);
    RunRequest r;
    r.algorithm = c.algorithm;
    r.objective = parse_objective(c.objective);
    r.direction = parse_direction(c.direction);
    r.k = c.k;
    r.seed = c.seed;
    r.run_id = c.run_id.empty() ? default_run_id(data.name, r) : c.run_id;

    const auto run = run_algorithm(data, r, c.solver);
    const auto initial = metric_report(data.instance.innate, equilibrium_solve(data.instance).x_star);
    out << "run_id " << r.run_id << "\ninitial mse " << io::format_real(initial.mse) << " polarization "
        << io::format_real(initial.polarization) << '\n';
    print_records(out, run.records);
    io::append_records(csv_path(c.csv), run.records);

    if (c.distance_groups && !run.final_assignment.empty()) {
        const auto nodes = stooge_nodes(run.final_assignment);
        const auto groups = distance_group_mse(data.graph, nodes, run.final_opinions, initial.theta_hat);
        out << "distance\tsize\tmse\n";
        for (const auto& [d, g] : groups) {
            out << (d == kUnreachable ? std::string("unreachable") : std::to_string(d)) << '\t' << g.size << '\t'
                << io::format_real(g.mse) << '\n';
        }
    }
    if (!c.save_opinions.empty()) io::save_vector(c.save_opinions, run.final_opinions);
    return kExitOk;
}

struct SweepCmd {
    SourceOptions source;
    SolverOptions solver;
    std::vector<std::string> algorithms = {"greedy", "random", "maxdegree", "centrality"};
    std::string objective = "all";
    std::string direction = "all";
    std::size_t k = 50;
    std::uint64_t seed = 1;
    std::size_t runs = 5;
    std::string csv;
    std::string run_id;
};

int do_sweep(const SweepCmd& c, std::ostream& out) {
    const auto path = csv_path(c.csv);
    for (std::size_t i = 0; i < c.runs; ++i) {
        const std::uint64_t seed = c.seed + i;
        const auto data = load_source(c.source, seed);
        for (Objective obj : objectives_of(c.objective)) {
            for (Direction dir : directions_of(c.direction)) {
                for (const auto& algo : c.algorithms) {
                    RunRequest r;
                    r.algorithm = algo;
                    r.objective = obj;
                    r.direction = dir;
                    r.k = c.k;
                    r.seed = seed;
                    r.run_id = c.run_id.empty() ? default_run_id(data.name, r)
                                                : c.run_id + "-" + algo + "-" + to_string(obj) + "-" +
                                                      to_string(dir) + "-s" + std::to_string(seed);
                    const double t0 = now_ms();
                    const auto run = run_algorithm(data, r, c.solver);
                    io::append_records(path, run.records);
                    out << "seed " << seed << ' ' << algo << ' ' << to_string(obj) << ' ' << to_string(dir)
                        << " rows " << run.records.size() << " ms " << io::format_real(now_ms() - t0) << '\n';
                }
            }
        }
    }
    return kExitOk;
}

struct CompareCmd {
    SourceOptions source;
    SolverOptions solver;
    std::string mode = "runs";
    std::string csv;
    std::string run_a;
    std::string run_b;
    std::optional<std::size_t> k_step;
    std::size_t k = 20;
    std::string objective = "mse";
    std::string direction = "all";
    std::uint64_t seed = 1;
    std::size_t runs = 1;
};

int compare_runs(const CompareCmd& c, std::ostream& out) {
    if (c.csv.empty() || c.run_a.empty() || c.run_b.empty()) {
        throw UsageError("compare --mode runs needs --csv, --run-a and --run-b");
    }
    std::map<std::size_t, StoogeAssignment> a;
    std::map<std::size_t, StoogeAssignment> b;
    for (const auto& rec : io::read_records(fs::path(c.csv))) {
        if (rec.run_id == c.run_a) a[rec.k_step] = io::decode_stooges(rec.stooges);
        if (rec.run_id == c.run_b) b[rec.k_step] = io::decode_stooges(rec.stooges);
    }
    if (a.empty()) throw DataError("run '" + c.run_a + "' not found in " + c.csv);
    if (b.empty()) throw DataError("run '" + c.run_b + "' not found in " + c.csv);
    out << "k_step\tjaccard\n";
    bool any = false;
    for (const auto& [k, sa] : a) {
        if (c.k_step && k != *c.k_step) continue;
        const auto it = b.find(k);
        if (it == b.end()) continue;
        any = true;
        out << k << '\t' << io::format_real(jaccard(stooge_nodes(sa), stooge_nodes(it->second))) << '\n';
    }
    if (!any) throw DataError("the two runs share no k_step");
    return kExitOk;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int compare_cross(const CompareCmd& c, std::ostream& out) {
    const auto gopts = greedy_options(c.solver);
    out << "seed\tdirection\tobjective\tdirect\ttransfer\tloss\tjaccard\n";
    for (std::size_t i = 0; i < c.runs; ++i) {
        const std::uint64_t seed = c.seed + i;
        const auto data = load_source(c.source, seed);
        const auto& inst = data.instance;
        const double center = theta_hat(inst.innate);
        for (Direction dir : directions_of(c.direction)) {
            const auto by_mse = greedy_lazy(inst, c.k, Objective::Mse, dir, gopts).assignment;
            const auto by_pol = greedy_lazy(inst, c.k, Objective::Polarization, dir, gopts).assignment;
            const auto x_mse = equilibrium_solve(apply_stooges(inst, by_mse)).x_star;
            const auto x_pol = equilibrium_solve(apply_stooges(inst, by_pol)).x_star;
            const double j = jaccard(stooge_nodes(by_mse), stooge_nodes(by_pol));
            const double mse_direct = mse(x_mse, center);
            const double mse_transfer = mse(x_pol, center);
            const double pol_direct = polarization(x_pol);
            const double pol_transfer = polarization(x_mse);
            out << seed << '\t' << to_string(dir) << "\tmse\t" << io::format_real(mse_direct) << '\t'
                << io::format_real(mse_transfer) << '\t'
                << io::format_real(transfer_loss(mse_direct, mse_transfer, dir)) << '\t' << io::format_real(j)
                << '\n';
            out << seed << '\t' << to_string(dir) << "\tpolarization\t" << io::format_real(pol_direct) << '\t'
                << io::format_real(pol_transfer) << '\t'
                << io::format_real(transfer_loss(pol_direct, pol_transfer, dir)) << '\t' << io::format_real(j)
                << '\n';
        }
    }
    return kExitOk;
}

int compare_directions(const CompareCmd& c, std::ostream& out) {
    const auto gopts = greedy_options(c.solver);
    const Objective obj = parse_objective(c.objective);
    std::vector<double> scores;
    out << "seed\tjaccard\n";
    for (std::size_t i = 0; i < c.runs; ++i) {
        const std::uint64_t seed = c.seed + i;
        const auto data = load_source(c.source, seed);
        const auto up = greedy_lazy(data.instance, c.k, obj, Direction::Maximize, gopts).assignment;
        const auto down = greedy_lazy(data.instance, c.k, obj, Direction::Minimize, gopts).assignment;
        scores.push_back(jaccard(stooge_nodes(up), stooge_nodes(down)));
        out << seed << '\t' << io::format_real(scores.back()) << '\n';
    }
    out << "mean " << io::format_real(mean_of(scores)) << " sd " << io::format_real(sd_of(scores)) << '\n';
    return kExitOk;
}

int do_compare(const CompareCmd& c, std::ostream& out) {
    if (c.mode == "runs") return compare_runs(c, out);
    if (c.mode == "cross") return compare_cross(c, out);
    return compare_directions(c, out);
}

struct FixturesCmd {
    std::size_t ell = 1000;
    double beta = 0.5;
    std::size_t clique = 20;
    std::size_t path = 30;
    double tolerance = 0.01;
};

int do_fixtures(const FixturesCmd& c, std::ostream& out) {
    bool all = true;
    const auto report = [&](bool ok, const std::string& what) {
        out << (ok ? "PASS " : "FAIL ") << what << '\n';
        all = all && ok;
    };
    std::ostringstream msg;
    msg << std::setprecision(6);

    {
        const auto fx = gen_fixture(NonSubmodularSpec{c.ell, c.beta});
        const auto& inst = fx.instance;
        const auto pol = [&](const StoogeAssignment& a) {
            return polarization(equilibrium_solve(apply_stooges(inst, a)).x_star);
        };
        const double f0 = pol({});
        const double f1 = pol({{fx.first, Beta::One}});
        const double f2 = pol({{fx.first, Beta::One}, {fx.second, Beta::Zero}});
        const double gain1 = f1 - f0;
        const double gain2 = f2 - f1;
        const double b2 = c.beta * c.beta;
        msg << "nonsubmod gain1 " << gain1 << " (expected " << b2 / 4 << ")";
        report(std::abs(gain1 - b2 / 4) <= c.tolerance, msg.str());
        msg.str("");
        msg << "nonsubmod gain2 " << gain2 << " (expected " << (1 - b2) / 4 << ")";
        report(std::abs(gain2 - (1 - b2) / 4) <= c.tolerance, msg.str());
        msg.str("");
        if (b2 < 0.5) {
            msg << "nonsubmod increasing returns: gain2 " << gain2 << " > gain1 " << gain1;
            report(gain2 > gain1, msg.str());
            msg.str("");
        }
    }
    {
        const auto fx = gen_fixture(LollipopSpec{c.clique, c.path, 0.5});
        GreedyOptions g;
        g.exact = true;
        g.candidates = std::vector<NodeId>{fx.first, fx.second};
        const auto res = greedy_lazy(fx.instance, 2, Objective::Mse, Direction::Maximize, g);
        const double gain1 = res.gain_trace.empty() ? 0.0 : res.gain_trace.front();
        msg << "lollipop first gain " << gain1 << " > 1e-6";
        report(gain1 > 1e-6, msg.str());
        msg.str("");

        const auto& inst = fx.instance;
        const double center = theta_hat(inst.innate);
        const auto value = [&](const StoogeAssignment& a) {
            return mse(equilibrium_solve(apply_stooges(inst, a)).x_star, center);
        };
        const double f1 = value({{fx.first, Beta::One}});
        const double best_second =
            std::max(value({{fx.first, Beta::One}, {fx.second, Beta::One}}), value({{fx.first, Beta::One},
                                                                                    {fx.second, Beta::Zero}}));
        msg << "lollipop second gain " << best_second - f1 << " <= 1e-9";
        report(best_second - f1 <= 1e-9, msg.str());
        msg.str("");
        report(res.stopped_early && res.assignment.size() == 1, "lollipop greedy stops after one stooge");
    }
    return all ? kExitOk : kExitData;
}

// ---------------------------------------------------------------------------
// Config files

bool truthy(const std::string& v) {
    std::string s = v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s == "1" || s == "true" || s == "yes" || s == "on";
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Appends "--key value" for every config entry the command line does not set.
void inject_config(CLI::App& app, std::vector<std::string>& args, const fs::path& path) {
    CLI::App* sub = nullptr;
    for (const auto& a : args) {
        if ((sub = app.get_subcommand_no_throw(a)) != nullptr) break;
    }
    if (sub == nullptr) throw UsageError("--config needs a subcommand");
    for (const auto& [key, value] : io::read_config(path)) {
        const std::string flag = "--" + key;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr) throw UsageError("config key '" + key + "' is not an option of '" + sub->get_name() + "'");
        if (given_on_command_line(args, flag)) continue;
        if (opt->get_expected_min() == 0) {
            if (truthy(value)) args.push_back(flag);
        } else {
            args.push_back(flag);
            args.push_back(value);
        }
    }
}

std::optional<std::string> find_config(std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stooge selection under generalized Friedkin-Johnsen opinion dynamics", "fj-stooges"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config;
    app.add_option("--config", config, "Flat 'key = value' file of subcommand flags; command-line flags win");

    GenerateCmd gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic instance (.edges, .opinions, .instance)");
    add_generator_options(generate, gen.source);
    generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    generate->add_option("--out", gen.out, "Output path prefix (default: $STOOGES_OUTPUT_DIR/<model>-s<seed>)");

    EquilibriumCmd eqc;
    auto* equilibrium = app.add_subcommand("equilibrium", "Compute equilibrium opinions and metrics");
    add_source_options(equilibrium, eqc.source);
    equilibrium->add_option("--method", eqc.method, "Equilibrium method")
        ->check(CLI::IsMember({"solve", "iterative", "montecarlo"}))
        ->capture_default_str();
    equilibrium->add_option("--seed", eqc.seed, "Random seed")->capture_default_str();
    equilibrium->add_option("--epsilon", eqc.epsilon, "Tolerance of the iterative method")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    equilibrium->add_option("--max-sweeps", eqc.max_sweeps, "Sweep cap of the iterative method")
        ->capture_default_str();
    equilibrium->add_option("--walks", eqc.walks, "Random walks per node for montecarlo")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    equilibrium->add_option("--node", eqc.nodes, "Nodes to estimate with montecarlo (default: all)")
        ->delimiter(',');
    equilibrium->add_option("--save", eqc.save, "Write x* to this file");

    SelectCmd sel;
    auto* select = app.add_subcommand("select", "Run one selection algorithm and append CSV rows");
    add_source_options(select, sel.source);
    add_solver_options(select, sel.solver);
    select->add_option("--algo", sel.algorithm, "Algorithm")
        ->check(CLI::IsMember(algorithm_keys()))
        ->capture_default_str();
    select->add_option("--objective", sel.objective, "Objective")
        ->check(CLI::IsMember({"mse", "polarization"}))
        ->capture_default_str();
    select->add_option("--direction", sel.direction, "Direction")
        ->check(CLI::IsMember({"max", "min"}))
        ->capture_default_str();
    select->add_option("--k", sel.k, "Number of stooges")->check(CLI::PositiveNumber)->capture_default_str();
    select->add_option("--seed", sel.seed, "Random seed")->capture_default_str();
    select->add_option("--candidates", sel.solver.candidates, "Restrict greedy to these nodes")->delimiter(',');
    select->add_option("--csv", sel.csv, "Results CSV (default: $STOOGES_OUTPUT_DIR/results.csv)");
    select->add_option("--run-id", sel.run_id, "Run identifier written to the CSV");
    select->add_option("--save-opinions", sel.save_opinions, "Write the final x* to this file");
    select->add_flag("--distance-groups", sel.distance_groups, "Print MSE grouped by hop distance to the stooges");

    SweepCmd sw;
    auto* sweep = app.add_subcommand("sweep", "Run algorithms x objectives x directions x seeds");
    add_source_options(sweep, sw.source);
    add_solver_options(sweep, sw.solver);
    sweep->add_option("--algos", sw.algorithms, "Algorithms")
        ->delimiter(',')
        ->check(CLI::IsMember(algorithm_keys()))
        ->capture_default_str();
    sweep->add_option("--objective", sw.objective, "Objective or 'all'")
        ->check(CLI::IsMember({"mse", "polarization", "all"}))
        ->capture_default_str();
    sweep->add_option("--direction", sw.direction, "Direction or 'all'")
        ->check(CLI::IsMember({"max", "min", "all"}))
        ->capture_default_str();
    sweep->add_option("--k", sw.k, "Largest number of stooges")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--seed", sw.seed, "First seed")->capture_default_str();
    sweep->add_option("--runs", sw.runs, "Number of seeds (seed, seed + 1, ...)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--csv", sw.csv, "Results CSV (default: $STOOGES_OUTPUT_DIR/results.csv)");
    sweep->add_option("--run-id", sw.run_id, "Run identifier prefix");

    CompareCmd cmp;
    auto* compare = app.add_subcommand("compare", "Jaccard similarity and cross-objective loss");
    add_source_options(compare, cmp.source);
    add_solver_options(compare, cmp.solver);
    compare->add_option("--mode", cmp.mode,
                        "runs: Jaccard of two CSV runs; cross: swap stooges between objectives; "
                        "directions: Jaccard of max vs min stooges")
        ->check(CLI::IsMember({"runs", "cross", "directions"}))
        ->capture_default_str();
    compare->add_option("--csv", cmp.csv, "Results CSV (runs mode)");
    compare->add_option("--run-a", cmp.run_a, "First run id (runs mode)");
    compare->add_option("--run-b", cmp.run_b, "Second run id (runs mode)");
    compare->add_option("--k-step", cmp.k_step, "Only this k_step (runs mode)");
    compare->add_option("--k", cmp.k, "Number of stooges")->check(CLI::PositiveNumber)->capture_default_str();
    compare->add_option("--objective", cmp.objective, "Objective (directions mode)")
        ->check(CLI::IsMember({"mse", "polarization"}))
        ->capture_default_str();
    compare->add_option("--direction", cmp.direction, "Direction or 'all' (cross mode)")
        ->check(CLI::IsMember({"max", "min", "all"}))
        ->capture_default_str();
    compare->add_option("--seed", cmp.seed, "First seed")->capture_default_str();
    compare->add_option("--runs", cmp.runs, "Number of seeds")->check(CLI::PositiveNumber)->capture_default_str();

    FixturesCmd fxc;
    auto* fixtures = app.add_subcommand("fixtures", "Check the counterexample instances");
    fixtures->add_option("--ell", fxc.ell, "Clique size of the nonsubmodular fixture")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    fixtures->add_option("--beta", fxc.beta, "Resistance offset of the nonsubmodular fixture")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    fixtures->add_option("--clique", fxc.clique, "Clique size of the lollipop")->capture_default_str();
    fixtures->add_option("--path", fxc.path, "Path length of the lollipop")->capture_default_str();
    fixtures->add_option("--tolerance", fxc.tolerance, "Allowed deviation from the closed-form gains")
        ->capture_default_str();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        if (const auto cfg = find_config(args)) inject_config(app, args, *cfg);
        std::vector<const char*> cargs{argv[0]};
        for (const auto& a : args) cargs.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(cargs.size()), cargs.data());
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kExitOk : kExitUsage;
        }

        if (*generate) return do_generate(gen, out);
        if (*equilibrium) return do_equilibrium(eqc, out);
        if (*select) return do_select(sel, out);
        if (*sweep) return do_sweep(sw, out);
        if (*compare) return do_compare(cmp, out);
        if (*fixtures) return do_fixtures(fxc, out);
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NonConvergence& e) {
        err << "non-convergence: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

} // namespace fj::cli
