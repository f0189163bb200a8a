#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aircargo/model.hpp"

/// QUBO assembly: variable registry, slack-group expansion, penalty
/// emission, weight calibration and energy evaluation. The produced model
/// minimizes z^T Q z + offset over binary z, where z concatenates the
/// container-position assignment bits with all slack bits.
namespace aircargo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable sub-seed derivation; keeps restart/trial streams independent.
inline std::uint64_t sub_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 1));
}

/// Unbiased-enough index draw; avoids std::uniform_int_distribution whose
/// output is implementation-defined.
inline std::size_t rand_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1ULL);
    return bits;
}

}  // namespace detail

/// Capped binary expansion of a residual range. Returns coefficients c_k
/// such that the subset sums of {c_k} are exactly {0, g, 2g, ..., ubar}:
/// powers of two times g up to 2^(r-1), then a final cap so the total is
/// ubar exactly and no sum overshoots it.
inline std::vector<double> slack_expansion(double ubar, double granularity) {
    if (granularity <= 0.0)
        throw std::invalid_argument("slack granularity must be > 0");
    if (ubar < -kRelTol)
        throw std::invalid_argument("slack bound must be >= 0");
    const double steps = ubar / granularity;
    const auto m = static_cast<long long>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(m)) >
        1e-9 * std::max(1.0, std::abs(steps)))
        throw std::invalid_argument(
            "slack bound is not an integer multiple of the granularity");
    std::vector<double> coeffs;
    if (m <= 0) return coeffs;
    int r = 0;
    while ((1LL << (r + 1)) <= m) ++r;
    coeffs.reserve(static_cast<std::size_t>(r) + 1);
    for (int k = 0; k < r; ++k)
        coeffs.push_back(granularity * static_cast<double>(1LL << k));
    const long long cap = m - ((1LL << r) - 1);
    if (cap > 0) coeffs.push_back(granularity * static_cast<double>(cap));
    return coeffs;
}

/// Round a nonnegative bound up to the next multiple of step (exact
/// multiples are preserved). Used for slack bounds that are derived from
/// real-valued data; over-approximating only costs extra slack bits.
inline double quantize_up(double value, double step) {
    if (step <= 0.0) throw std::invalid_argument("step must be > 0");
    if (value <= 0.0) return 0.0;
    const double q = value / step;
    const double r = std::nearbyint(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return r * step;
    return std::ceil(q) * step;
}

/// Slack bits backing one inequality constraint instance.
struct SlackGroup {
    std::string tag;                        ///< owning constraint, e.g. "overlap:3"
    std::vector<double> coefficients;       ///< c_k, positive
    std::vector<std::uint32_t> var_indices; ///< contiguous flat indices

    double sum(std::span<const std::uint8_t> bits) const {
        double s = 0.0;
        for (std::size_t k = 0; k < coefficients.size(); ++k)
            if (bits[var_indices[k]]) s += coefficients[k];
        return s;
    }
    double max_sum() const {
        double s = 0.0;
        for (double c : coefficients) s += c;
        return s;
    }
};

/// Flat variable layout: first n*N position bits (container-major, then
/// position), then every slack group in allocation order.
class VariableRegistry {
public:
    VariableRegistry() = default;
    VariableRegistry(std::size_t num_containers, int num_positions)
        : n_(num_containers), positions_(num_positions) {
        if (num_containers == 0 || num_positions < 1)
            throw std::invalid_argument("registry needs containers and positions");
        total_ = n_ * static_cast<std::size_t>(positions_);
    }

    /// Flat index of p_{i,j}; container index 0-based, position 1-based.
    std::uint32_t position_var(std::size_t container, int position) const {
        if (container >= n_)
            throw std::out_of_range("container index out of range");
        if (position < 1 || position > positions_)
            throw std::out_of_range("position index out of range");
        return static_cast<std::uint32_t>(container * positions_ + (position - 1));
    }

    std::size_t num_containers() const { return n_; }
    int num_positions() const { return positions_; }
    std::size_t num_position_vars() const { return n_ * positions_; }
    std::size_t total_vars() const { return total_; }

    const std::vector<SlackGroup>& slack_groups() const { return groups_; }

    const SlackGroup* find_group(std::string_view tag) const {
        for (const auto& g : groups_)
            if (g.tag == tag) return &g;
        return nullptr;
    }

    const SlackGroup& group(std::string_view tag) const {
        if (const SlackGroup* g = find_group(tag)) return *g;
        throw std::invalid_argument("no slack group tagged '" + std::string(tag) + "'");
    }

    SlackGroup& add_group(std::string tag, std::vector<double> coefficients) {
        if (find_group(tag))
            throw std::invalid_argument("slack group '" + tag + "' already exists");
        SlackGroup g;
        g.tag = std::move(tag);
        g.coefficients = std::move(coefficients);
        g.var_indices.reserve(g.coefficients.size());
        for (std::size_t k = 0; k < g.coefficients.size(); ++k)
            g.var_indices.push_back(static_cast<std::uint32_t>(total_++));
        groups_.push_back(std::move(g));
        return groups_.back();
    }

private:
    std::size_t n_ = 0;
    int positions_ = 0;
    std::size_t total_ = 0;
    std::vector<SlackGroup> groups_;
};

/// Positive multipliers for each penalty family. The duplicate weight must
/// exceed twice the contiguity weight or a large container spread over
/// three cells could be rewarded; the two bound weights are kept equal.
struct PenaltyWeights {
    double p_overlap = 1.0;
    double p_dup = 1.0;
    double p_contig = 1.0;
    double p_capacity = 1.0;
    double p_cog_target = 1.0;
    double p_cog_lower = 1.0;
    double p_cog_upper = 1.0;
    double p_shear_left = 1.0;
    double p_shear_right = 1.0;

    void validate() const {
        const double all[] = {p_overlap, p_dup, p_contig, p_capacity, p_cog_target,
                              p_cog_lower, p_cog_upper, p_shear_left, p_shear_right};
        for (double w : all)
            if (!(w > 0.0) || !std::isfinite(w))
                throw std::invalid_argument("penalty weights must be positive and finite");
        if (!(p_dup > 2.0 * p_contig))
            throw std::invalid_argument("require p_dup > 2 * p_contig");
        if (!near(p_cog_lower, p_cog_upper))
            throw std::invalid_argument("require p_cog_lower == p_cog_upper");
    }
};

/// Apply the structural relations between families in place.
inline void enforce_weight_relations(PenaltyWeights& w) {
    w.p_dup = std::max(w.p_dup, 2.000001 * w.p_contig);
    w.p_cog_lower = 10.0 * w.p_cog_target;
    w.p_cog_upper = w.p_cog_lower;
}

/// Knobs that shape the model but are not part of the scenario itself.
struct AssembleOptions {
    /// Finest representable residual step for capacity, shear and CoG
    /// slack groups. Residuals below the step cannot reach penalty zero.
    double base_step = 1.0;
    /// Dropping the capacity penalty reproduces the saturation experiment
    /// where every position gets filled.
    bool include_capacity = true;
};

struct Term {
    std::uint32_t i;
    std::uint32_t j;
    double value;
};

/// Sparse symmetric quadratic form plus constant offset. Each unordered
/// index pair is stored once (i <= j); diagonal entries carry the linear
/// coefficients since z^2 = z for binary z.
class QuadraticModel {
public:
    explicit QuadraticModel(VariableRegistry registry)
        : registry_(std::move(registry)) {}

    void add_term(std::uint32_t a, std::uint32_t b, double value) {
        if (a >= registry_.total_vars() || b >= registry_.total_vars())
            throw std::out_of_range("term index outside the registry");
        if (a > b) std::swap(a, b);
        coeffs_[key(a, b)] += value;
    }

    void add_offset(double value) { offset_ += value; }

    double offset() const { return offset_; }
    std::size_t num_vars() const { return registry_.total_vars(); }
    const VariableRegistry& registry() const { return registry_; }
    std::size_t stored_terms() const { return coeffs_.size(); }

    double coefficient(std::uint32_t a, std::uint32_t b) const {
        if (a > b) std::swap(a, b);
        auto it = coeffs_.find(key(a, b));
        return it == coeffs_.end() ? 0.0 : it->second;
    }

    /// Nonzero terms in row-major (i, then j) order; the export order.
    std::vector<Term> sorted_terms() const {
        std::vector<Term> out;
        out.reserve(coeffs_.size());
        for (const auto& [k, v] : coeffs_) {
            if (v == 0.0) continue;
            out.push_back({static_cast<std::uint32_t>(k >> 32),
                           static_cast<std::uint32_t>(k & 0xffffffffULL), v});
        }
        std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        return out;
    }

    double energy(std::span<const std::uint8_t> bits) const {
        if (bits.size() != registry_.total_vars())
            throw std::invalid_argument("bit vector length does not match the model");
        double e = offset_;
        for (const auto& [k, v] : coeffs_) {
            const auto a = static_cast<std::uint32_t>(k >> 32);
            const auto b = static_cast<std::uint32_t>(k & 0xffffffffULL);
            if (bits[a] && bits[b]) e += v;
        }
        return e;
    }

private:
    static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    VariableRegistry registry_;
    std::unordered_map<std::uint64_t, double> coeffs_;
    double offset_ = 0.0;
};

namespace detail {

inline std::string dup_tag(int container_id) { return "dup:" + std::to_string(container_id); }
inline std::string overlap_tag(int position) { return "overlap:" + std::to_string(position); }

inline std::string shear_tag(const ShearStation& st) {
    switch (st.kind) {
        case ShearStation::Kind::Left: return "shear:left:" + std::to_string(st.u);
        case ShearStation::Kind::Right: return "shear:right:" + std::to_string(st.u);
        case ShearStation::Kind::CenterLeft: return "shear:center_left";
        case ShearStation::Kind::CenterRight: return "shear:center_right";
    }
    throw std::logic_error("unknown station kind");
}

/// Smallest position-occupancy fraction; sets the overlap slack step.
inline double min_d(const ProblemInstance& inst) {
    double d = 1.0;
    for (const auto& c : inst.containers) d = std::min(d, c.d());
    return d;
}

/// Sum of full container masses. A properly placed container contributes
/// its whole mass to the CoG numerator spread, so slack bounds built from
/// t_i * m_i alone would come up short for large containers.
inline double total_full_mass(const ProblemInstance& inst) {
    double s = 0.0;
    for (const auto& c : inst.containers) s += c.mass;
    return s;
}

inline double cog_lower_slack_bound(const ProblemInstance& inst) {
    double max_x = cog_coordinate(1, inst.length, inst.num_positions);
    for (int j = 2; j <= inst.num_positions; ++j)
        max_x = std::max(max_x, cog_coordinate(j, inst.length, inst.num_positions));
    const double b = total_full_mass(inst) * std::max(0.0, max_x - inst.cog_min) +
                     inst.empty_mass * (inst.empty_cog - inst.cog_min);
    return std::max(0.0, b);
}

inline double cog_upper_slack_bound(const ProblemInstance& inst) {
    double min_x = cog_coordinate(1, inst.length, inst.num_positions);
    for (int j = 2; j <= inst.num_positions; ++j)
        min_x = std::min(min_x, cog_coordinate(j, inst.length, inst.num_positions));
    const double b = total_full_mass(inst) * std::max(0.0, inst.cog_max - min_x) +
                     inst.empty_mass * (inst.cog_max - inst.empty_cog);
    return std::max(0.0, b);
}

}  // namespace detail

/// Allocate every variable the active constraint set needs. Group order is
/// fixed (capacity, duplicates, overlaps, CoG bounds, shear stations) so a
/// given instance always produces the same flat layout.
inline VariableRegistry build_registry(const ProblemInstance& inst,
                                       const AssembleOptions& opts = {}) {
    inst.validate();
    VariableRegistry reg(inst.num_containers(), inst.num_positions);
    const double step = opts.base_step;
    if (inst.constraints.pl) {
        if (opts.include_capacity)
            reg.add_group("capacity",
                          slack_expansion(quantize_up(inst.max_payload, step), step));
        for (const auto& c : inst.containers)
            reg.add_group(detail::dup_tag(c.id), slack_expansion(1.0, c.t()));
        const double d = detail::min_d(inst);
        for (int j = 1; j <= inst.num_positions; ++j)
            reg.add_group(detail::overlap_tag(j), slack_expansion(1.0, d));
    }
    if (inst.constraints.cl) {
        reg.add_group("cog:lower",
                      slack_expansion(quantize_up(detail::cog_lower_slack_bound(inst), step), step));
        reg.add_group("cog:upper",
                      slack_expansion(quantize_up(detail::cog_upper_slack_bound(inst), step), step));
    }
    if (inst.constraints.sl) {
        for (const auto& st : shear_stations(inst))
            reg.add_group(detail::shear_tag(st),
                          slack_expansion(quantize_up(st.limit, step), step));
    }
    return reg;
}

/// Weights usable without sampling calibration, kept as small as the
/// ordering argument allows: the cheapest representable violation of each
/// family must cost more than the whole objective range, so every decoded
/// violation loses to any violation-free state the search ever visits.
/// Oversizing the weights is actively harmful here: penalty walls grow
/// quadratically with the weight and a single-flip walk stops being able
/// to place, remove or relocate containers at all.
inline PenaltyWeights default_weights(const ProblemInstance& inst,
                                      const AssembleOptions& opts = {}) {
    inst.validate();
    const double gain = total_cell_mass(inst);
    double tm_max = 0.0, min_d = 1.0, min_t = 1.0;
    for (const auto& c : inst.containers) {
        tm_max = std::max(tm_max, c.cell_mass());
        min_d = std::min(min_d, c.d());
        min_t = std::min(min_t, c.t());
    }
    PenaltyWeights w;
    w.p_capacity = 2.0 / opts.base_step;
    w.p_shear_left = w.p_shear_right = 2.0 / opts.base_step;
    // membership weights also clear the cost of pulling one cell out of a
    // settled state (capacity plus every station the cell sits in), so a
    // stranded placement violation is always a profitable repair
    double reopen_wall = 0.0;
    if (inst.constraints.pl && opts.include_capacity)
        reopen_wall += w.p_capacity * tm_max * tm_max;
    if (inst.constraints.sl)
        reopen_wall += (inst.num_positions / 2.0 + 2.0) *
                       w.p_shear_left * tm_max * tm_max;
    const double membership = 4.0 * std::max(gain + tm_max, reopen_wall);
    w.p_dup = membership / (min_t * min_t);
    w.p_overlap = membership / (min_d * min_d);
    w.p_contig = w.p_dup / 4.0;
    // sized so the penalty at a typical residual is an order of magnitude
    // above the whole objective: the pull has to register during descent,
    // not only at the end
    const double r_typ =
        std::max({inst.empty_mass * std::abs(inst.empty_cog - inst.cog_target),
                  gain * inst.length / 8.0, 1.0});
    w.p_cog_target = 10.0 * gain / (r_typ * r_typ);
    enforce_weight_relations(w);
    w.validate();
    return w;
}

/// Emits the objective and penalty families into a QuadraticModel. Exposed
/// so single families can be built and inspected in isolation; assemble()
/// drives the whole thing.
class ModelAssembler {
public:
    ModelAssembler(const ProblemInstance& inst, const PenaltyWeights& weights,
                   AssembleOptions opts = {})
        : inst_(inst), weights_(weights), model_(build_registry(inst, opts)) {
        weights.validate();
    }

    const VariableRegistry& registry() const { return model_.registry(); }

    void add_objective() {
        const auto& reg = model_.registry();
        for (std::size_t ci = 0; ci < inst_.containers.size(); ++ci) {
            const double w = inst_.containers[ci].cell_mass();
            for (int j = 1; j <= inst_.num_positions; ++j) {
                const auto v = reg.position_var(ci, j);
                model_.add_term(v, v, -w);
            }
        }
    }

    void add_no_overlap(int position) {
        const auto& reg = model_.registry();
        std::vector<Entry> entries;
        for (std::size_t ci = 0; ci < inst_.containers.size(); ++ci)
            entries.push_back({reg.position_var(ci, position), inst_.containers[ci].d()});
        append_group(entries, reg.group(detail::overlap_tag(position)), +1.0);
        add_squared(entries, -1.0, weights_.p_overlap);
    }

    void add_no_duplicates(std::size_t ci) {
        const auto& reg = model_.registry();
        const auto& c = inst_.containers.at(ci);
        std::vector<Entry> entries;
        for (int j = 1; j <= inst_.num_positions; ++j)
            entries.push_back({reg.position_var(ci, j), c.t()});
        append_group(entries, reg.group(detail::dup_tag(c.id)), +1.0);
        add_squared(entries, -1.0, weights_.p_dup);
    }

    /// Adjacency reward for large containers; degree two already, so it is
    /// added directly rather than squared. Valid only while
    /// p_dup > 2 * p_contig, which the weight validation guarantees.
    void add_contiguity(std::size_t ci) {
        const auto& c = inst_.containers.at(ci);
        if (c.type != ContainerType::T3)
            throw std::invalid_argument("contiguity applies to T3 containers only");
        const auto& reg = model_.registry();
        const double p = weights_.p_contig;
        for (int j = 1; j <= inst_.num_positions; ++j) {
            const auto v = reg.position_var(ci, j);
            model_.add_term(v, v, p / 2.0);
            if (j < inst_.num_positions)
                model_.add_term(v, reg.position_var(ci, j + 1), -p);
        }
    }

    void add_capacity() {
        const auto& reg = model_.registry();
        std::vector<Entry> entries = all_position_masses();
        append_group(entries, reg.group("capacity"), +1.0);
        add_squared(entries, -inst_.max_payload, weights_.p_capacity);
    }

    void add_cog_target() { add_cog(inst_.cog_target, weights_.p_cog_target, nullptr, 0.0); }

    void add_cog_lower() {
        add_cog(inst_.cog_min, weights_.p_cog_lower,
                &model_.registry().group("cog:lower"), -1.0);
    }

    void add_cog_upper() {
        add_cog(inst_.cog_max, weights_.p_cog_upper,
                &model_.registry().group("cog:upper"), +1.0);
    }

    void add_shear() {
        const auto& reg = model_.registry();
        const int mid = inst_.num_positions / 2 + 1;
        for (const auto& st : shear_stations(inst_)) {
            std::vector<Entry> entries;
            double weight = 0.0;
            switch (st.kind) {
                case ShearStation::Kind::Left:
                    entries = side_masses(1, st.u, -1);
                    weight = weights_.p_shear_left;
                    break;
                case ShearStation::Kind::Right:
                    entries = side_masses(st.u + 1, inst_.num_positions, -1);
                    weight = weights_.p_shear_right;
                    break;
                case ShearStation::Kind::CenterLeft:
                    entries = side_masses(1, mid - 1, mid);
                    weight = weights_.p_shear_left;
                    break;
                case ShearStation::Kind::CenterRight:
                    entries = side_masses(mid + 1, inst_.num_positions, mid);
                    weight = weights_.p_shear_right;
                    break;
            }
            append_group(entries, reg.group(detail::shear_tag(st)), +1.0);
            add_squared(entries, -st.limit, weight);
        }
    }

    QuadraticModel take_model() { return std::move(model_); }

private:
    struct Entry {
        std::uint32_t var;
        double coeff;
    };

    std::vector<Entry> all_position_masses() const {
        const auto& reg = model_.registry();
        std::vector<Entry> entries;
        entries.reserve(reg.num_position_vars());
        for (std::size_t ci = 0; ci < inst_.containers.size(); ++ci)
            for (int j = 1; j <= inst_.num_positions; ++j)
                entries.push_back({reg.position_var(ci, j), inst_.containers[ci].cell_mass()});
        return entries;
    }

    /// Emits one CoG penalty; ref is the target/min/max coordinate and
    /// slack_sign is 0 (no slacks), -1 (lower bound) or +1 (upper bound).
    void add_cog(double ref, double weight, const SlackGroup* group, double slack_sign) {
        const auto& reg = model_.registry();
        std::vector<Entry> entries;
        for (std::size_t ci = 0; ci < inst_.containers.size(); ++ci) {
            const double w = inst_.containers[ci].cell_mass();
            for (int j = 1; j <= inst_.num_positions; ++j) {
                const double x = cog_coordinate(j, inst_.length, inst_.num_positions);
                entries.push_back({reg.position_var(ci, j), w * (x - ref)});
            }
        }
        if (group) append_group(entries, *group, slack_sign);
        const double constant = inst_.empty_mass * (inst_.empty_cog - ref);
        add_squared(entries, constant, weight);
    }

    /// Cell masses over positions [lo, hi]; half_position (or -1) adds the
    /// half-mass middle column used by the odd-N x=0 constraints.
    std::vector<Entry> side_masses(int lo, int hi, int half_position) const {
        const auto& reg = model_.registry();
        std::vector<Entry> entries;
        for (std::size_t ci = 0; ci < inst_.containers.size(); ++ci) {
            const double w = inst_.containers[ci].cell_mass();
            for (int j = lo; j <= hi; ++j)
                entries.push_back({reg.position_var(ci, j), w});
            if (half_position >= 1)
                entries.push_back({reg.position_var(ci, half_position), w / 2.0});
        }
        return entries;
    }

    static void append_group(std::vector<Entry>& entries, const SlackGroup& g,
                             double sign) {
        for (std::size_t k = 0; k < g.coefficients.size(); ++k)
            entries.push_back({g.var_indices[k], sign * g.coefficients[k]});
    }

    /// weight * (sum of coeff*z + constant)^2 expanded over binary z.
    void add_squared(const std::vector<Entry>& entries, double constant, double weight) {
        model_.add_offset(weight * constant * constant);
        for (std::size_t a = 0; a < entries.size(); ++a) {
            const double ca = entries[a].coeff;
            model_.add_term(entries[a].var, entries[a].var,
                            weight * (ca * ca + 2.0 * constant * ca));
            for (std::size_t b = a + 1; b < entries.size(); ++b)
                model_.add_term(entries[a].var, entries[b].var,
                                weight * 2.0 * ca * entries[b].coeff);
        }
    }

    const ProblemInstance& inst_;
    PenaltyWeights weights_;
    QuadraticModel model_;
};

/// Build the complete model for the instance's active constraint set.
inline QuadraticModel assemble(const ProblemInstance& inst, const PenaltyWeights& weights,
                               const AssembleOptions& opts = {}) {
    ModelAssembler a(inst, weights, opts);
    a.add_objective();
    if (inst.constraints.pl) {
        if (opts.include_capacity) a.add_capacity();
        for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
            a.add_no_duplicates(ci);
        for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
            if (inst.containers[ci].type == ContainerType::T3) a.add_contiguity(ci);
        for (int j = 1; j <= inst.num_positions; ++j) a.add_no_overlap(j);
    }
    if (inst.constraints.cl) {
        a.add_cog_target();
        a.add_cog_lower();
        a.add_cog_upper();
    }
    if (inst.constraints.sl) a.add_shear();
    return a.take_model();
}

/// Family-by-family evaluation straight from the defining expressions
/// (squares of residuals, not the expanded Q). energy() on the assembled
/// model must agree with total() to rounding.
struct FamilyValues {
    double objective = 0.0;
    double overlap = 0.0;
    double duplicates = 0.0;
    double contiguity = 0.0;
    double capacity = 0.0;
    double cog_target = 0.0;
    double cog_lower = 0.0;
    double cog_upper = 0.0;
    double shear_left = 0.0;
    double shear_right = 0.0;

    double penalty_total() const {
        return overlap + duplicates + contiguity + capacity + cog_target +
               cog_lower + cog_upper + shear_left + shear_right;
    }
    double total() const { return objective + penalty_total(); }
};

inline FamilyValues evaluate_families(const ProblemInstance& inst,
                                      const VariableRegistry& reg,
                                      const PenaltyWeights& w,
                                      std::span<const std::uint8_t> bits) {
    if (bits.size() != reg.total_vars())
        throw std::invalid_argument("bit vector length does not match the registry");
    FamilyValues out;
    const int N = inst.num_positions;

    for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
        for (int j = 1; j <= N; ++j)
            if (bits[reg.position_var(ci, j)])
                out.objective -= inst.containers[ci].cell_mass();

    if (inst.constraints.pl) {
        for (int j = 1; j <= N; ++j) {
            double r = -1.0;
            for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
                if (bits[reg.position_var(ci, j)]) r += inst.containers[ci].d();
            r += reg.group(detail::overlap_tag(j)).sum(bits);
            out.overlap += w.p_overlap * r * r;
        }
        for (std::size_t ci = 0; ci < inst.containers.size(); ++ci) {
            const auto& c = inst.containers[ci];
            double r = -1.0;
            for (int j = 1; j <= N; ++j)
                if (bits[reg.position_var(ci, j)]) r += c.t();
            r += reg.group(detail::dup_tag(c.id)).sum(bits);
            out.duplicates += w.p_dup * r * r;
            if (c.type == ContainerType::T3) {
                double half_sum = 0.0, adj = 0.0;
                for (int j = 1; j <= N; ++j) {
                    if (bits[reg.position_var(ci, j)]) half_sum += 0.5;
                    if (j < N && bits[reg.position_var(ci, j)] &&
                        bits[reg.position_var(ci, j + 1)])
                        adj += 1.0;
                }
                out.contiguity += w.p_contig * (half_sum - adj);
            }
        }
        if (const SlackGroup* g = reg.find_group("capacity")) {
            double r = -inst.max_payload + g->sum(bits);
            for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
                for (int j = 1; j <= N; ++j)
                    if (bits[reg.position_var(ci, j)])
                        r += inst.containers[ci].cell_mass();
            out.capacity += w.p_capacity * r * r;
        }
    }

    if (inst.constraints.cl) {
        auto residual = [&](double ref) {
            double r = inst.empty_mass * (inst.empty_cog - ref);
            for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
                for (int j = 1; j <= N; ++j)
                    if (bits[reg.position_var(ci, j)])
                        r += inst.containers[ci].cell_mass() *
                             (cog_coordinate(j, inst.length, N) - ref);
            return r;
        };
        const double rt = residual(inst.cog_target);
        out.cog_target = w.p_cog_target * rt * rt;
        const double rl = residual(inst.cog_min) - reg.group("cog:lower").sum(bits);
        out.cog_lower = w.p_cog_lower * rl * rl;
        const double ru = residual(inst.cog_max) + reg.group("cog:upper").sum(bits);
        out.cog_upper = w.p_cog_upper * ru * ru;
    }

    if (inst.constraints.sl) {
        const int mid = N / 2 + 1;
        auto range_mass = [&](int lo, int hi) {
            double s = 0.0;
            for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
                for (int j = lo; j <= hi; ++j)
                    if (bits[reg.position_var(ci, j)])
                        s += inst.containers[ci].cell_mass();
            return s;
        };
        auto half_mid = [&]() {
            double s = 0.0;
            for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
                if (bits[reg.position_var(ci, mid)])
                    s += inst.containers[ci].cell_mass() / 2.0;
            return s;
        };
        for (const auto& st : shear_stations(inst)) {
            double base = 0.0, weight = 0.0;
            bool left_side = false;
            switch (st.kind) {
                case ShearStation::Kind::Left:
                    base = range_mass(1, st.u);
                    left_side = true;
                    break;
                case ShearStation::Kind::Right:
                    base = range_mass(st.u + 1, N);
                    break;
                case ShearStation::Kind::CenterLeft:
                    base = range_mass(1, mid - 1) + half_mid();
                    left_side = true;
                    break;
                case ShearStation::Kind::CenterRight:
                    base = half_mid() + range_mass(mid + 1, N);
                    break;
            }
            weight = left_side ? w.p_shear_left : w.p_shear_right;
            const double r = base + reg.group(detail::shear_tag(st)).sum(bits) - st.limit;
            if (left_side)
                out.shear_left += weight * r * r;
            else
                out.shear_right += weight * r * r;
        }
    }
    return out;
}

/// Sampling calibration: weights are set so each family's mean penalty on
/// uniform random assignments matches the mean objective magnitude, then
/// the structural relations are applied. Deterministic for a fixed seed.
inline PenaltyWeights calibrate_weights(const ProblemInstance& inst, std::size_t samples,
                                        std::uint64_t seed,
                                        const AssembleOptions& opts = {}) {
    if (samples < 1) throw std::invalid_argument("calibration needs samples >= 1");
    inst.validate();
    const VariableRegistry reg = build_registry(inst, opts);
    PenaltyWeights unit;
    std::mt19937_64 rng(detail::splitmix64(seed));
    FamilyValues acc;
    double acc_obj = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto bits = detail::random_bits(rng, reg.total_vars());
        const FamilyValues v = evaluate_families(inst, reg, unit, bits);
        acc_obj += std::abs(v.objective);
        acc.overlap += v.overlap;
        acc.duplicates += v.duplicates;
        acc.contiguity += v.contiguity;
        acc.capacity += v.capacity;
        acc.cog_target += v.cog_target;
        acc.cog_lower += v.cog_lower;
        acc.cog_upper += v.cog_upper;
        acc.shear_left += v.shear_left;
        acc.shear_right += v.shear_right;
    }
    const double mean_obj = std::max(acc_obj / samples, 1.0);
    auto family_weight = [&](double family_acc) {
        const double mean = family_acc / samples;
        return mean > 1e-12 ? mean_obj / mean : mean_obj;
    };
    PenaltyWeights w;
    w.p_overlap = family_weight(acc.overlap);
    w.p_dup = family_weight(acc.duplicates);
    w.p_contig = family_weight(acc.contiguity);
    w.p_capacity = family_weight(acc.capacity);
    w.p_cog_target = family_weight(acc.cog_target);
    w.p_cog_lower = family_weight(acc.cog_lower);
    w.p_cog_upper = family_weight(acc.cog_upper);
    w.p_shear_left = family_weight(acc.shear_left);
    w.p_shear_right = family_weight(acc.shear_right);
    enforce_weight_relations(w);
    w.validate();
    return w;
}

}  // namespace aircargo
