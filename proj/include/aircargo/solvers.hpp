#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "aircargo/analysis.hpp"
#include "aircargo/model.hpp"
#include "aircargo/qubo.hpp"

/// Two solvers: a single-flip tabu search over the full QUBO bit vector,
/// and an exact branch-and-bound enumeration of the physical placement
/// space (never the slack space, which is exponentially larger).
namespace aircargo {

struct SolverParams {
    /// Flips per restart; 0 picks 50 * num_vars.
    std::size_t max_iterations = 0;
    /// Iterations a flipped variable stays forbidden; unset picks
    /// max(10, num_vars / 4). Aspiration overrides the tenure whenever a
    /// move would improve on the best energy seen so far.
    std::optional<std::size_t> tabu_tenure;
    std::size_t restarts = 20;
    std::uint64_t seed = 0;
    /// Stop as soon as the best energy reaches this value.
    std::optional<double> target_energy;
    /// Invoked on every strict improvement of the best energy
    /// (total iteration index, new best). Leave empty for no reporting.
    std::function<void(std::size_t, double)> on_improvement;
    // The solver runs restarts + 1 passes: each restart starts from a fresh
    // uniform random vector, and a final pass re-seeds from the incumbent.
};

struct RawSolution {
    std::vector<std::uint8_t> bits;
    double energy = 0.0;
    std::size_t iterations_used = 0;
    double wall_time = 0.0;  ///< seconds
};

namespace detail {

/// Flat adjacency built from the model's sorted terms, so that repeated
/// builds accumulate floating-point sums in the same order.
struct Adjacency {
    std::vector<double> linear;
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> nbr;
    std::vector<double> weight;

    explicit Adjacency(const QuadraticModel& model) {
        const std::size_t n = model.num_vars();
        linear.assign(n, 0.0);
        const auto terms = model.sorted_terms();
        std::vector<std::size_t> degree(n, 0);
        for (const auto& t : terms) {
            if (t.i == t.j) continue;
            ++degree[t.i];
            ++degree[t.j];
        }
        offsets.assign(n + 1, 0);
        for (std::size_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + degree[v];
        nbr.resize(offsets[n]);
        weight.resize(offsets[n]);
        std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
        for (const auto& t : terms) {
            if (t.i == t.j) {
                linear[t.i] += t.value;
                continue;
            }
            nbr[fill[t.i]] = t.j;
            weight[fill[t.i]++] = t.value;
            nbr[fill[t.j]] = t.i;
            weight[fill[t.j]++] = t.value;
        }
    }
};

}  // namespace detail

/// Best-improvement tabu search with aspiration. Deterministic for a fixed
/// seed: restarts draw independent substreams and the result is the best
/// energy over all restarts, earliest restart winning ties.
inline RawSolution tabu_solve(const QuadraticModel& model, const SolverParams& params) {
    const std::size_t n = model.num_vars();
    if (n == 0) throw std::invalid_argument("cannot solve a model with no variables");

    const std::size_t max_iter =
        params.max_iterations > 0 ? params.max_iterations : 50 * n;
    const std::size_t tenure =
        params.tabu_tenure ? *params.tabu_tenure : std::max<std::size_t>(10, n / 4);
    if (params.restarts < 1) throw std::invalid_argument("restarts must be >= 1");

    // Stagnation handling: single flips cannot re-balance a binary slack
    // expansion or thread a place/hand-over cascade in one move, and the
    // cheap moves around a settled state are all uphill, so the walk
    // ratchets away from good states and cannot come back (every return
    // move is tabu). After stall_limit non-improving iterations the search
    // reverts to the incumbent, perturbs a few random bits and continues
    // with a clean tabu list.
    const std::size_t stall_limit = std::max<std::size_t>(60, tenure + n / 8);
    const std::size_t perturb_size =
        std::min<std::size_t>(std::max<std::size_t>(2, n / 64), 32);

    const detail::Adjacency adj(model);
    const auto t0 = std::chrono::steady_clock::now();

    RawSolution best;
    best.energy = std::numeric_limits<double>::infinity();
    std::size_t total_iters = 0;
    std::vector<double> phi(n);
    std::vector<std::size_t> tabu_until(n);
    bool stop = false;

    // restarts + 1 passes: every regular restart explores from a fresh
    // random vector; the last pass re-seeds from the incumbent and polishes
    for (std::size_t restart = 0; restart <= params.restarts && !stop; ++restart) {
        std::mt19937_64 rng(detail::sub_seed(params.seed, restart));
        const bool intensify = restart == params.restarts;
        std::vector<std::uint8_t> bits =
            intensify ? best.bits : detail::random_bits(rng, n);

        double energy = 0.0;
        auto rebuild_state = [&]() {
            energy = model.offset();
            for (std::size_t v = 0; v < n; ++v) {
                double f = adj.linear[v];
                for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k)
                    if (bits[adj.nbr[k]]) f += adj.weight[k];
                phi[v] = f;
                if (bits[v]) energy += 0.5 * (f + adj.linear[v]);
            }
        };
        rebuild_state();
        std::fill(tabu_until.begin(), tabu_until.end(), 0);

        auto consider_best = [&](double e, const std::vector<std::uint8_t>& b) {
            if (e < best.energy) {
                best.energy = e;
                best.bits = b;
                if (params.on_improvement) params.on_improvement(total_iters, e);
                if (params.target_energy && best.energy <= *params.target_energy)
                    stop = true;
            }
        };
        consider_best(energy, bits);

        auto apply_flip = [&](std::size_t v, double delta) {
            const double sign = bits[v] ? -1.0 : 1.0;
            bits[v] ^= 1;
            energy += delta;
            for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k)
                phi[adj.nbr[k]] += sign * adj.weight[k];
        };

        std::vector<std::uint8_t> restart_best_bits = bits;
        double restart_best = energy;
        double ref = energy;  // stall anchor, re-based after each perturbation
        std::size_t stall = 0;

        for (std::size_t iter = 1; iter <= max_iter && !stop; ++iter) {
            ++total_iters;
            std::size_t chosen = n;
            double chosen_delta = std::numeric_limits<double>::infinity();
            for (std::size_t v = 0; v < n; ++v) {
                const double delta = (bits[v] ? -1.0 : 1.0) * phi[v];
                const bool admissible =
                    iter > tabu_until[v] || energy + delta < best.energy;
                if (admissible && delta < chosen_delta) {
                    chosen_delta = delta;
                    chosen = v;
                }
            }
            if (chosen == n) {
                // everything tabu and nothing aspires: release the oldest
                std::size_t oldest = 0;
                for (std::size_t v = 1; v < n; ++v)
                    if (tabu_until[v] < tabu_until[oldest]) oldest = v;
                chosen = oldest;
                chosen_delta = (bits[chosen] ? -1.0 : 1.0) * phi[chosen];
            }

            apply_flip(chosen, chosen_delta);
            tabu_until[chosen] = iter + tenure;
            consider_best(energy, bits);

            if (energy < restart_best) {
                restart_best = energy;
                restart_best_bits = bits;
            }
            if (energy < ref) {
                ref = energy;
                stall = 0;
            } else if (++stall >= stall_limit) {
                bits = restart_best_bits;
                rebuild_state();
                for (std::size_t k = 0; k < perturb_size; ++k) {
                    const std::size_t v = detail::rand_index(rng, n);
                    apply_flip(v, (bits[v] ? -1.0 : 1.0) * phi[v]);
                }
                std::fill(tabu_until.begin(), tabu_until.end(), 0);
                ref = energy;
                stall = 0;
            }
        }
    }

    // steepest-descent polish: the walk can leave the recorded best with
    // profitable flips still open (it moved on before taking them), so
    // finish the descent and return a genuine local minimum
    if (!best.bits.empty()) {
        for (std::size_t v = 0; v < n; ++v) {
            double f = adj.linear[v];
            for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k)
                if (best.bits[adj.nbr[k]]) f += adj.weight[k];
            phi[v] = f;
        }
        for (std::size_t step = 0; step < 50 * n; ++step) {
            std::size_t pick = n;
            double pick_delta = 0.0;
            for (std::size_t v = 0; v < n; ++v) {
                const double delta = (best.bits[v] ? -1.0 : 1.0) * phi[v];
                if (delta < pick_delta) {
                    pick_delta = delta;
                    pick = v;
                }
            }
            if (pick == n) break;
            const double sign = best.bits[pick] ? -1.0 : 1.0;
            best.bits[pick] ^= 1;
            for (std::size_t k = adj.offsets[pick]; k < adj.offsets[pick + 1]; ++k)
                phi[adj.nbr[k]] += sign * adj.weight[k];
        }
    }

    best.iterations_used = total_iters;
    // re-derive the reported energy from the model so the pair is exact
    // even after long incremental walks
    best.energy = model.energy(best.bits);
    best.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

struct ExactResult {
    LoadingPlan plan;
    double weight = 0.0;
    bool feasible_found = false;
    std::uint64_t nodes = 0;
    double wall_time = 0.0;
};

namespace detail {

struct ExactSearch {
    const ProblemInstance& inst;
    double tol;
    int N;
    std::vector<std::size_t> order;       // container indices, heaviest first
    std::vector<double> suffix_weight;    // loadable mass left from depth k
    std::vector<double> d_used;           // 1-based
    std::vector<double> cell_mass;        // 1-based
    std::vector<int> codes;               // original order: 0 or start position
    std::vector<int> best_codes;
    double weight = 0.0;
    double best_weight = -1.0;
    bool found = false;
    std::uint64_t nodes = 0;

    explicit ExactSearch(const ProblemInstance& instance, double tolerance)
        : inst(instance), tol(tolerance), N(instance.num_positions) {
        const std::size_t n = inst.containers.size();
        order.resize(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return inst.containers[a].mass > inst.containers[b].mass;
        });
        suffix_weight.assign(n + 1, 0.0);
        for (std::size_t k = n; k-- > 0;)
            suffix_weight[k] = suffix_weight[k + 1] + inst.containers[order[k]].mass;
        d_used.assign(N + 1, 0.0);
        cell_mass.assign(N + 1, 0.0);
        codes.assign(n, 0);
    }

    bool lex_less(const std::vector<int>& a, const std::vector<int>& b) const {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    }

    bool leaf_feasible() const {
        if (inst.constraints.cl) {
            const double cog = (moment + inst.empty_mass * inst.empty_cog) /
                               (weight + inst.empty_mass);
            if (!leq(inst.cog_min, cog, tol) || !leq(cog, inst.cog_max, tol))
                return false;
        }
        if (inst.constraints.sl) {
            std::vector<double> prefix(N + 1, 0.0);
            for (int j = 1; j <= N; ++j) prefix[j] = prefix[j - 1] + cell_mass[j];
            const int mid = N / 2 + 1;
            for (const auto& st : shear_stations(inst)) {
                double value = 0.0;
                switch (st.kind) {
                    case ShearStation::Kind::Left: value = prefix[st.u]; break;
                    case ShearStation::Kind::Right: value = prefix[N] - prefix[st.u]; break;
                    case ShearStation::Kind::CenterLeft:
                        value = prefix[mid - 1] + cell_mass[mid] / 2.0;
                        break;
                    case ShearStation::Kind::CenterRight:
                        value = cell_mass[mid] / 2.0 + (prefix[N] - prefix[mid]);
                        break;
                }
                if (!leq(value, st.limit, tol)) return false;
            }
        }
        return true;
    }

    void take_leaf() {
        if (!leaf_feasible()) return;
        if (!found || weight > best_weight + tol ||
            (near(weight, best_weight, tol) && lex_less(codes, best_codes))) {
            found = true;
            best_weight = weight;
            best_codes = codes;
        }
    }

    void place(std::size_t ci, int j, int span, double sign) {
        const auto& c = inst.containers[ci];
        for (int k = 0; k < span; ++k) {
            d_used[j + k] += sign * c.d();
            cell_mass[j + k] += sign * c.cell_mass();
            moment += sign * c.cell_mass() *
                      cog_coordinate(j + k, inst.length, N);
        }
        weight += sign * c.cell_mass() * span;
    }

    void dfs(std::size_t depth) {
        ++nodes;
        // upper bound on what this subtree can still reach
        double bound = weight + suffix_weight[depth];
        if (inst.constraints.pl) bound = std::min(bound, inst.max_payload);
        if (found && bound < best_weight - tol) return;

        if (depth == order.size()) {
            take_leaf();
            return;
        }
        const std::size_t ci = order[depth];
        const auto& c = inst.containers[ci];
        const int span = c.type == ContainerType::T3 ? 2 : 1;
        const bool over_capacity =
            inst.constraints.pl && !leq(weight + c.mass, inst.max_payload, tol);
        if (!over_capacity) {
            for (int j = 1; j + span - 1 <= N; ++j) {
                bool fits = true;
                for (int k = 0; k < span; ++k)
                    if (!leq(d_used[j + k] + c.d(), 1.0, tol)) fits = false;
                if (!fits) continue;
                place(ci, j, span, +1.0);
                codes[ci] = j;
                dfs(depth + 1);
                codes[ci] = 0;
                place(ci, j, span, -1.0);
            }
        }
        dfs(depth + 1);  // leave it on the ground
    }

    double moment = 0.0;
};

}  // namespace detail

/// Enumerate all physical placements and return a maximum-weight feasible
/// plan; ties break toward the lexicographically smallest placement
/// vector. Refuses blown-up search spaces (n*N > 28) unless forced.
inline ExactResult exact_solve(const ProblemInstance& inst, bool force = false,
                               double tol = kRelTol) {
    inst.validate();
    const std::size_t space = inst.containers.size() *
                              static_cast<std::size_t>(inst.num_positions);
    if (space > 28 && !force)
        throw std::invalid_argument(
            "exact search space too large (n*N = " + std::to_string(space) +
            " > 28); use force to override");

    const auto t0 = std::chrono::steady_clock::now();
    detail::ExactSearch search(inst, tol);
    search.dfs(0);

    ExactResult res;
    res.nodes = search.nodes;
    res.plan.occupancy.resize(inst.num_positions);
    res.plan.placements.resize(inst.containers.size());
    if (search.found) {
        res.feasible_found = true;
        res.weight = std::max(0.0, search.best_weight);
        for (std::size_t ci = 0; ci < inst.containers.size(); ++ci) {
            const int start = search.best_codes[ci];
            if (start == 0) continue;
            const int span = inst.containers[ci].type == ContainerType::T3 ? 2 : 1;
            for (int k = 0; k < span; ++k) {
                res.plan.placements[ci].push_back(start + k);
                res.plan.occupancy[start + k - 1].push_back(inst.containers[ci].id);
            }
        }
    }
    res.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace aircargo
