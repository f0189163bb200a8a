#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aircargo/analysis.hpp"
#include "aircargo/io.hpp"
#include "aircargo/qubo.hpp"
#include "aircargo/solvers.hpp"

/// The benchmarking protocol: repeated seeded solver runs on one instance,
/// aggregated into success rates, weight statistics and plot-ready series.
namespace aircargo {

/// Outcome of a single solver run.
struct TrialRecord {
    std::uint64_t seed = 0;
    ConstraintSet constraint_set;
    double wall_time = 0.0;  ///< solver time only; model assembly excluded
    double energy = 0.0;
    ValidationReport report;
    bool feasible = false;         ///< valid for every active family
    int occupied_positions = 0;    ///< positions holding at least one container
};

struct CogHistogram {
    std::vector<double> edges;        ///< size bins+1
    std::vector<std::size_t> counts;  ///< size bins, sums to runs
    double marker_min = 0.0;
    double marker_target = 0.0;
    double marker_max = 0.0;
};

/// Shear curve sample of the best run, for plotting against the limit.
struct ShearCurvePoint {
    std::string kind;
    int u = 0;
    double x = 0.0;
    double value = 0.0;
    double limit = 0.0;
};

struct BestRun {
    std::size_t trial = 0;
    double loaded_weight = 0.0;
    std::vector<std::vector<int>> occupancy_matrix;  ///< n rows of N cells, 0/1
    std::vector<ShearCurvePoint> shear_curve;
    json plan;
};

struct BenchmarkSummary {
    std::size_t runs = 0;
    std::uint64_t base_seed = 0;
    ConstraintSet constraint_set;
    double pct_pl_valid = 0.0;
    double pct_cl_valid = 0.0;
    double pct_sl_valid = 0.0;
    double mean_time = 0.0;
    double max_weight = 0.0;   ///< over feasible runs
    double mean_weight = 0.0;  ///< over feasible runs
    std::optional<double> pct_optimal;
    CogHistogram cog_histogram;
    /// Runs with exactly 0, 1, 2 and >= 3 stations over the shear limit.
    std::array<std::size_t, 4> shear_error_histogram = {0, 0, 0, 0};
    std::optional<BestRun> best;
};

struct BenchConfig {
    std::size_t runs = 50;
    std::uint64_t base_seed = 0;
    SolverParams solver;             ///< per-trial seed overrides solver.seed
    AssembleOptions assembly;
    std::optional<double> exact_optimum;
    unsigned threads = 0;            ///< 0 picks the hardware concurrency
};

struct BenchResult {
    BenchmarkSummary summary;
    std::vector<TrialRecord> records;
};

namespace detail {

inline CogHistogram build_cog_histogram(const std::vector<TrialRecord>& records,
                                        const ProblemInstance& inst) {
    CogHistogram h;
    h.marker_min = inst.cog_min;
    h.marker_target = inst.cog_target;
    h.marker_max = inst.cog_max;
    double lo = inst.cog_min, hi = inst.cog_max;
    for (const auto& r : records) {
        lo = std::min(lo, r.report.cog);
        hi = std::max(hi, r.report.cog);
    }
    if (hi - lo < 1e-9) {
        lo -= 0.5;
        hi += 0.5;
    }
    constexpr std::size_t bins = 24;
    const double width = (hi - lo) / bins;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * b;
    h.counts.assign(bins, 0);
    for (const auto& r : records) {
        auto idx = static_cast<std::ptrdiff_t>((r.report.cog - lo) / width);
        idx = std::clamp<std::ptrdiff_t>(idx, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(idx)];
    }
    return h;
}

}  // namespace detail

/// Run `config.runs` seeded trials (trial i uses base_seed + i), validate
/// each decoded plan and aggregate. Trials are independent and execute on
/// a small thread pool; aggregation folds in trial order, so the result is
/// identical regardless of the thread count.
inline BenchResult run_benchmark(const ProblemInstance& inst, const PenaltyWeights& weights,
                                 const BenchConfig& config) {
    if (config.runs < 1) throw std::invalid_argument("benchmark needs runs >= 1");
    const QuadraticModel model = assemble(inst, weights, config.assembly);
    const auto& reg = model.registry();

    std::vector<TrialRecord> records(config.runs);
    std::vector<LoadingPlan> plans(config.runs);

    unsigned threads = config.threads > 0 ? config.threads
                                          : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(config.runs));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config.runs) return;
            SolverParams params = config.solver;
            params.seed = config.base_seed + i;
            params.on_improvement = nullptr;
            const RawSolution sol = tabu_solve(model, params);
            TrialRecord rec;
            rec.seed = params.seed;
            rec.constraint_set = inst.constraints;
            rec.wall_time = sol.wall_time;
            rec.energy = sol.energy;
            plans[i] = decode(sol.bits, reg, inst);
            rec.report = validate(plans[i], inst);
            const bool capacity_counts =
                config.assembly.include_capacity || !inst.constraints.pl;
            bool ok = true;
            if (inst.constraints.pl) {
                ok = rec.report.overlap_ok && rec.report.duplicates_ok;
                if (capacity_counts) ok = ok && rec.report.capacity_ok;
            }
            if (inst.constraints.cl) ok = ok && rec.report.cl_valid;
            if (inst.constraints.sl) ok = ok && rec.report.sl_valid;
            rec.feasible = ok;
            for (const auto& ids : plans[i].occupancy)
                if (!ids.empty()) ++rec.occupied_positions;
            records[i] = std::move(rec);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    BenchmarkSummary s;
    s.runs = config.runs;
    s.base_seed = config.base_seed;
    s.constraint_set = inst.constraints;
    std::size_t n_pl = 0, n_cl = 0, n_sl = 0, n_opt = 0, n_feasible = 0;
    double time_sum = 0.0, weight_sum = 0.0;
    std::optional<std::size_t> best_trial;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.report.pl_valid) ++n_pl;
        if (r.report.cl_valid) ++n_cl;
        if (r.report.sl_valid) ++n_sl;
        time_sum += r.wall_time;
        const int errs = std::min(r.report.shear_violations, 3);
        ++s.shear_error_histogram[static_cast<std::size_t>(errs)];
        if (r.feasible) {
            ++n_feasible;
            weight_sum += r.report.loaded_weight;
            s.max_weight = std::max(s.max_weight, r.report.loaded_weight);
            if (!best_trial ||
                r.report.loaded_weight > records[*best_trial].report.loaded_weight)
                best_trial = i;
            if (config.exact_optimum &&
                r.report.loaded_weight >= *config.exact_optimum - 1e-6)
                ++n_opt;
        }
    }
    const double runs_d = static_cast<double>(config.runs);
    s.pct_pl_valid = 100.0 * n_pl / runs_d;
    s.pct_cl_valid = 100.0 * n_cl / runs_d;
    s.pct_sl_valid = 100.0 * n_sl / runs_d;
    s.mean_time = time_sum / runs_d;
    s.mean_weight = n_feasible ? weight_sum / n_feasible : 0.0;
    if (config.exact_optimum) s.pct_optimal = 100.0 * n_opt / runs_d;
    s.cog_histogram = detail::build_cog_histogram(records, inst);

    if (best_trial) {
        BestRun best;
        best.trial = *best_trial;
        const auto& plan = plans[*best_trial];
        best.loaded_weight = records[*best_trial].report.loaded_weight;
        best.occupancy_matrix.assign(inst.containers.size(),
                                     std::vector<int>(inst.num_positions, 0));
        for (std::size_t ci = 0; ci < plan.placements.size(); ++ci)
            for (int j : plan.placements[ci]) best.occupancy_matrix[ci][j - 1] = 1;
        for (const auto& sv : shear_profile(plan, inst)) {
            ShearCurvePoint pt;
            pt.kind = to_string(sv.station.kind);
            pt.u = sv.station.u;
            pt.x = sv.station.x;
            pt.value = sv.value;
            pt.limit = sv.station.limit;
            best.shear_curve.push_back(pt);
        }
        best.plan = plan_to_json(plan, inst);
        s.best = std::move(best);
    }

    return {std::move(s), std::move(records)};
}

/// Structured (JSON) report. Timing fields are emitted only on request:
/// wall-clock values change run to run, and the default report is expected
/// to be byte-identical for a fixed seed.
inline std::string emit_structured_report(const BenchmarkSummary& s,
                                          const std::vector<TrialRecord>& records,
                                          bool include_timing = false) {
    json doc;
    doc["schema"] = "aircargo-bench/1";
    json js;
    js["runs"] = s.runs;
    js["base_seed"] = s.base_seed;
    js["constraint_set"] = s.constraint_set.name();
    js["pct_pl_valid"] = s.pct_pl_valid;
    js["pct_cl_valid"] = s.pct_cl_valid;
    js["pct_sl_valid"] = s.pct_sl_valid;
    js["max_weight"] = s.max_weight;
    js["mean_weight"] = s.mean_weight;
    if (s.pct_optimal) js["pct_optimal"] = *s.pct_optimal;
    if (include_timing) js["mean_time"] = s.mean_time;
    js["cog_histogram"] = {{"edges", s.cog_histogram.edges},
                           {"counts", s.cog_histogram.counts},
                           {"markers",
                            {{"min", s.cog_histogram.marker_min},
                             {"target", s.cog_histogram.marker_target},
                             {"max", s.cog_histogram.marker_max}}}};
    js["shear_error_histogram"] = {{"0", s.shear_error_histogram[0]},
                                   {"1", s.shear_error_histogram[1]},
                                   {"2", s.shear_error_histogram[2]},
                                   {"3_or_more", s.shear_error_histogram[3]}};
    if (s.best) {
        js["best_run"] = {{"trial", s.best->trial},
                          {"loaded_weight", s.best->loaded_weight},
                          {"occupancy_matrix", s.best->occupancy_matrix},
                          {"plan", s.best->plan}};
        json curve = json::array();
        for (const auto& pt : s.best->shear_curve)
            curve.push_back({{"kind", pt.kind},
                             {"u", pt.u},
                             {"x", pt.x},
                             {"value", pt.value},
                             {"limit", pt.limit}});
        js["best_run"]["shear_curve"] = curve;
    }
    doc["summary"] = js;

    json recs = json::array();
    for (const auto& r : records) {
        json jr;
        jr["seed"] = r.seed;
        jr["constraint_set"] = r.constraint_set.name();
        jr["energy"] = r.energy;
        jr["feasible"] = r.feasible;
        jr["occupied_positions"] = r.occupied_positions;
        if (include_timing) jr["wall_time"] = r.wall_time;
        jr["validation"] = report_to_json(r.report);
        recs.push_back(jr);
    }
    doc["records"] = recs;
    return doc.dump(2) + "\n";
}

/// Inverse of emit_structured_report; timing fields are restored when
/// present.
inline BenchResult parse_structured_report(const std::string& text) {
    const json doc = json::parse(text);
    if (!doc.contains("summary") || !doc.contains("records"))
        throw std::runtime_error("report: missing summary or records");
    const json& js = doc.at("summary");
    BenchResult out;
    BenchmarkSummary& s = out.summary;
    s.runs = js.at("runs").get<std::size_t>();
    s.base_seed = js.at("base_seed").get<std::uint64_t>();
    s.constraint_set = constraint_set_from_name(js.at("constraint_set").get<std::string>());
    s.pct_pl_valid = js.at("pct_pl_valid").get<double>();
    s.pct_cl_valid = js.at("pct_cl_valid").get<double>();
    s.pct_sl_valid = js.at("pct_sl_valid").get<double>();
    s.max_weight = js.at("max_weight").get<double>();
    s.mean_weight = js.at("mean_weight").get<double>();
    if (js.contains("pct_optimal")) s.pct_optimal = js.at("pct_optimal").get<double>();
    if (js.contains("mean_time")) s.mean_time = js.at("mean_time").get<double>();
    const json& h = js.at("cog_histogram");
    s.cog_histogram.edges = h.at("edges").get<std::vector<double>>();
    s.cog_histogram.counts = h.at("counts").get<std::vector<std::size_t>>();
    s.cog_histogram.marker_min = h.at("markers").at("min").get<double>();
    s.cog_histogram.marker_target = h.at("markers").at("target").get<double>();
    s.cog_histogram.marker_max = h.at("markers").at("max").get<double>();
    const json& sh = js.at("shear_error_histogram");
    s.shear_error_histogram = {sh.at("0").get<std::size_t>(), sh.at("1").get<std::size_t>(),
                               sh.at("2").get<std::size_t>(),
                               sh.at("3_or_more").get<std::size_t>()};
    if (js.contains("best_run")) {
        BestRun best;
        const json& jb = js.at("best_run");
        best.trial = jb.at("trial").get<std::size_t>();
        best.loaded_weight = jb.at("loaded_weight").get<double>();
        best.occupancy_matrix = jb.at("occupancy_matrix").get<std::vector<std::vector<int>>>();
        best.plan = jb.at("plan");
        for (const auto& jp : jb.at("shear_curve")) {
            ShearCurvePoint pt;
            pt.kind = jp.at("kind").get<std::string>();
            pt.u = jp.at("u").get<int>();
            pt.x = jp.at("x").get<double>();
            pt.value = jp.at("value").get<double>();
            pt.limit = jp.at("limit").get<double>();
            best.shear_curve.push_back(pt);
        }
        s.best = std::move(best);
    }
    for (const auto& jr : doc.at("records")) {
        TrialRecord r;
        r.seed = jr.at("seed").get<std::uint64_t>();
        r.constraint_set = constraint_set_from_name(jr.at("constraint_set").get<std::string>());
        r.energy = jr.at("energy").get<double>();
        r.feasible = jr.at("feasible").get<bool>();
        r.occupied_positions = jr.at("occupied_positions").get<int>();
        if (jr.contains("wall_time")) r.wall_time = jr.at("wall_time").get<double>();
        r.report = report_from_json(jr.at("validation"));
        out.records.push_back(std::move(r));
    }
    return out;
}

/// Plain-text report mirroring the benchmark tables: success rates, weight
/// statistics, shear-error partition and the CoG histogram with its bound
/// and target markers.
inline std::string emit_tabular_report(const BenchmarkSummary& s) {
    std::ostringstream out;
    out << "benchmark: constraint set " << s.constraint_set.name() << ", "
        << s.runs << " runs, base seed " << s.base_seed << "\n\n";
    out << "success rates\n";
    out << "  %PL " << format_double(s.pct_pl_valid) << "  %CL "
        << format_double(s.pct_cl_valid) << "  %SL " << format_double(s.pct_sl_valid)
        << "\n\n";
    out << "solution weight over feasible runs\n";
    out << "  max " << format_double(s.max_weight) << "  mean "
        << format_double(s.mean_weight);
    if (s.pct_optimal) out << "  %optimal " << format_double(*s.pct_optimal);
    out << "\n\n";
    out << "shear limit errors (runs by number of violating stations)\n";
    out << "  0: " << s.shear_error_histogram[0] << "  1: " << s.shear_error_histogram[1]
        << "  2: " << s.shear_error_histogram[2]
        << "  >=3: " << s.shear_error_histogram[3] << "\n\n";
    out << "center-of-gravity histogram (markers: min "
        << format_double(s.cog_histogram.marker_min) << ", target "
        << format_double(s.cog_histogram.marker_target) << ", max "
        << format_double(s.cog_histogram.marker_max) << ")\n";
    for (std::size_t b = 0; b < s.cog_histogram.counts.size(); ++b)
        out << "  [" << format_double(s.cog_histogram.edges[b]) << ", "
            << format_double(s.cog_histogram.edges[b + 1]) << ") "
            << s.cog_histogram.counts[b] << "\n";
    if (s.best) {
        out << "\nbest run: trial " << s.best->trial << ", loaded weight "
            << format_double(s.best->loaded_weight) << "\n";
    }
    return out.str();
}

/// Timing sidecar: the one output that is not byte-stable across
/// invocations.
inline std::string emit_timing_report(const BenchmarkSummary& s,
                                      const std::vector<TrialRecord>& records) {
    json doc;
    doc["schema"] = "aircargo-bench-timing/1";
    doc["mean_time"] = s.mean_time;
    json times = json::array();
    for (const auto& r : records) times.push_back(r.wall_time);
    doc["wall_times"] = times;
    return doc.dump(2) + "\n";
}

}  // namespace aircargo
