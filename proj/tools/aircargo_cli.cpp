// Command-line front end: instance ingestion, QUBO export, solving,
// validation, benchmarking and penalty-weight calibration.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "aircargo/bench.hpp"
#include "aircargo/io.hpp"
#include "aircargo/qubo.hpp"
#include "aircargo/solvers.hpp"

namespace fs = std::filesystem;
using namespace aircargo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct CommonOptions {
    std::string instance_path;
    std::string set_name;
    std::string weights_path;
    bool calibrate = false;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    double base_step = 1.0;
    bool no_capacity = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_weights = true) {
    cmd->add_option("instance", opt.instance_path, "instance document (JSON)")
        ->required();
    cmd->add_option("--set", opt.set_name,
                    "constraint set override: pl, pl+cl or pl+cl+sl");
    cmd->add_option("--seed", opt.seed, "random seed");
    if (with_weights) {
        cmd->add_option("--weights", opt.weights_path,
                        "penalty-weight document produced by 'calibrate'");
        cmd->add_flag("--calibrate", opt.calibrate,
                      "calibrate weights by sampling instead of the defaults");
        cmd->add_option("--samples", opt.samples, "calibration sample count");
        cmd->add_option("--base-step", opt.base_step,
                        "slack granularity for capacity/shear/CoG groups");
        cmd->add_flag("--no-capacity", opt.no_capacity,
                      "drop the maximum-capacity penalty from the model");
    }
}

ProblemInstance load_instance(const CommonOptions& opt) {
    ProblemInstance inst = parse_instance_file(opt.instance_path);
    if (!opt.set_name.empty()) {
        inst.constraints = constraint_set_from_name(opt.set_name);
        inst.validate();
    }
    return inst;
}

PenaltyWeights resolve_weights(const ProblemInstance& inst, const CommonOptions& opt,
                               const AssembleOptions& asmopts) {
    if (!opt.weights_path.empty()) {
        std::ifstream in(opt.weights_path);
        if (!in)
            throw std::runtime_error("cannot open weights file '" + opt.weights_path + "'");
        return weights_from_json(json::parse(in), opt.weights_path);
    }
    if (opt.calibrate) return calibrate_weights(inst, opt.samples, opt.seed, asmopts);
    return default_weights(inst);
}

AssembleOptions assemble_options(const CommonOptions& opt) {
    AssembleOptions a;
    a.base_step = opt.base_step;
    a.include_capacity = !opt.no_capacity;
    return a;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

int cmd_solve(const CommonOptions& opt, const std::string& output,
              const SolverParams& solver_in) {
    const ProblemInstance inst = load_instance(opt);
    const AssembleOptions asmopts = assemble_options(opt);
    const PenaltyWeights weights = resolve_weights(inst, opt, asmopts);
    const QuadraticModel model = assemble(inst, weights, asmopts);

    SolverParams params = solver_in;
    params.seed = opt.seed;
    const RawSolution sol = tabu_solve(model, params);
    const LoadingPlan plan = decode(sol.bits, model.registry(), inst);
    const ValidationReport report = validate(plan, inst);
    const bool feasible = feasible_for(report, inst.constraints);

    json doc;
    doc["constraint_set"] = inst.constraints.name();
    doc["seed"] = opt.seed;
    doc["energy"] = sol.energy;
    doc["iterations"] = sol.iterations_used;
    doc["feasible"] = feasible;
    doc["weights"] = weights_to_json(weights);
    doc["plan"] = plan_to_json(plan, inst);
    doc["validation"] = report_to_json(report);
    const std::string text = doc.dump(2) + "\n";
    if (output.empty())
        std::cout << text;
    else
        write_file(output, text);
    std::cerr << "solve: energy " << format_double(sol.energy) << ", weight "
              << format_double(report.loaded_weight) << ", "
              << (feasible ? "feasible" : "infeasible") << ", "
              << format_double(sol.wall_time) << " s\n";
    return feasible ? kExitOk : kExitInfeasible;
}

int cmd_exact(const CommonOptions& opt, const std::string& output, bool force) {
    const ProblemInstance inst = load_instance(opt);
    const ExactResult res = exact_solve(inst, force);
    const ValidationReport report = validate(res.plan, inst);

    json doc;
    doc["constraint_set"] = inst.constraints.name();
    doc["weight"] = res.weight;
    doc["feasible"] = res.feasible_found;
    doc["nodes"] = res.nodes;
    doc["plan"] = plan_to_json(res.plan, inst);
    doc["validation"] = report_to_json(report);
    const std::string text = doc.dump(2) + "\n";
    if (output.empty())
        std::cout << text;
    else
        write_file(output, text);
    std::cerr << "exact: weight " << format_double(res.weight) << ", "
              << res.nodes << " nodes, " << format_double(res.wall_time) << " s\n";
    return res.feasible_found ? kExitOk : kExitInfeasible;
}

int cmd_export(const CommonOptions& opt, const std::string& output,
               const std::string& varmap_path) {
    const ProblemInstance inst = load_instance(opt);
    const AssembleOptions asmopts = assemble_options(opt);
    const PenaltyWeights weights = resolve_weights(inst, opt, asmopts);
    const QuadraticModel model = assemble(inst, weights, asmopts);

    std::ostringstream qubo;
    export_qubo(model, qubo);
    write_file(output, qubo.str());

    const std::string sidecar =
        varmap_path.empty() ? output + ".varmap" : varmap_path;
    std::ostringstream vm;
    export_varmap(model.registry(), inst, vm);
    write_file(sidecar, vm.str());

    std::cerr << "export: " << model.num_vars() << " variables, "
              << model.sorted_terms().size() << " terms -> " << output << "\n";
    return kExitOk;
}

int cmd_bench(const CommonOptions& opt, const std::string& out_dir, std::size_t runs,
              std::optional<double> exact_optimum, unsigned threads,
              const SolverParams& solver_in) {
    const ProblemInstance inst = load_instance(opt);
    const AssembleOptions asmopts = assemble_options(opt);
    const PenaltyWeights weights = resolve_weights(inst, opt, asmopts);

    BenchConfig config;
    config.runs = runs;
    config.base_seed = opt.seed;
    config.solver = solver_in;
    config.assembly = asmopts;
    config.exact_optimum = exact_optimum;
    config.threads = threads;
    const BenchResult result = run_benchmark(inst, weights, config);

    const std::string stem = fs::path(opt.instance_path).stem().string();
    const std::string base =
        stem + "_" + inst.constraints.name() + "_" + std::to_string(runs);
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    write_file(dir / (base + ".json"),
               emit_structured_report(result.summary, result.records, false));
    write_file(dir / (base + ".txt"), emit_tabular_report(result.summary));
    write_file(dir / (base + "_timing.json"),
               emit_timing_report(result.summary, result.records));

    std::cerr << "bench: " << runs << " runs, %PL "
              << format_double(result.summary.pct_pl_valid) << ", mean time "
              << format_double(result.summary.mean_time) << " s -> "
              << (dir / base).string() << ".{json,txt}\n";
    return kExitOk;
}

int cmd_calibrate(const CommonOptions& opt) {
    const ProblemInstance inst = load_instance(opt);
    if (opt.samples < 1) throw std::runtime_error("calibration needs --samples >= 1");
    const PenaltyWeights w =
        calibrate_weights(inst, opt.samples, opt.seed, assemble_options(opt));
    std::cout << weights_to_json(w).dump(2) + "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aircraft cargo loading optimization via QUBO models"};
    app.require_subcommand(1);

    CommonOptions solve_opt, exact_opt, export_opt, bench_opt, cal_opt;
    std::string solve_out, exact_out, export_out, export_varmap_path, bench_dir;
    bool exact_force = false;
    std::size_t bench_runs = 50;
    unsigned bench_threads = 0;
    double bench_optimum = -1.0;
    SolverParams solver;

    auto* solve = app.add_subcommand("solve", "tabu-search a loading plan");
    add_common(solve, solve_opt);
    solve->add_option("-o,--output", solve_out, "result document path (default: stdout)");
    solve->add_option("--restarts", solver.restarts, "tabu restarts");
    std::size_t max_iter = 0, tenure = 0;
    solve->add_option("--max-iterations", max_iter, "flips per restart (0 = auto)");
    auto* tenure_opt = solve->add_option("--tenure", tenure, "tabu tenure (default: auto)");
    double target_energy = 0.0;
    auto* target_opt =
        solve->add_option("--target-energy", target_energy, "stop once reached");

    auto* exact = app.add_subcommand("exact", "enumerate the optimal plan");
    add_common(exact, exact_opt, false);
    exact->add_option("-o,--output", exact_out, "result document path (default: stdout)");
    exact->add_flag("--force", exact_force, "override the n*N size guard");

    auto* exp = app.add_subcommand("export-qubo", "write the sparse QUBO file");
    add_common(exp, export_opt);
    exp->add_option("-o,--output", export_out, "QUBO file path")->required();
    exp->add_option("--varmap", export_varmap_path,
                    "variable-map sidecar path (default: <output>.varmap)");

    auto* bench = app.add_subcommand("bench", "repeated seeded runs with reports");
    add_common(bench, bench_opt);
    bench->add_option("--runs", bench_runs, "number of trials");
    bench->add_option("--out-dir", bench_dir, "report directory (default: .)");
    auto* optimum_opt = bench->add_option("--exact-optimum", bench_optimum,
                                          "reference optimum for %optimal");
    bench->add_option("--threads", bench_threads, "worker threads (0 = auto)");
    bench->add_option("--restarts", solver.restarts, "tabu restarts per trial");
    bench->add_option("--max-iterations", max_iter, "flips per restart (0 = auto)");

    auto* cal = app.add_subcommand("calibrate", "print sampled penalty weights");
    add_common(cal, cal_opt, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "aircargo: error: " << e.what() << "\n";
        return kExitError;
    }

    try {
        solver.max_iterations = max_iter;
        if (*tenure_opt) solver.tabu_tenure = tenure;
        if (*target_opt) solver.target_energy = target_energy;
        if (solve->parsed()) return cmd_solve(solve_opt, solve_out, solver);
        if (exact->parsed()) return cmd_exact(exact_opt, exact_out, exact_force);
        if (exp->parsed()) return cmd_export(export_opt, export_out, export_varmap_path);
        if (bench->parsed())
            return cmd_bench(bench_opt, bench_dir, bench_runs,
                             *optimum_opt ? std::optional<double>(bench_optimum)
                                          : std::nullopt,
                             bench_threads, solver);
        if (cal->parsed()) return cmd_calibrate(cal_opt);
    } catch (const std::exception& e) {
        std::cerr << "aircargo: error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
