#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aircargo/model.hpp"
#include "aircargo/qubo.hpp"

/// Decoding bit vectors into loading plans and checking plans against the
/// physical constraint families. Everything here is a pure function over
/// immutable inputs.
namespace aircargo {

/// A concrete assignment of containers to positions. Both views are kept
/// consistent: occupancy is per position (container ids), placements is
/// per container (1-based positions, sorted).
struct LoadingPlan {
    std::vector<std::vector<int>> occupancy;      ///< [position-1] -> ids
    std::vector<std::vector<int>> placements;     ///< [container index] -> positions

    bool empty() const {
        for (const auto& p : placements)
            if (!p.empty()) return false;
        return true;
    }
};

struct ValidationReport {
    bool overlap_ok = true;     ///< every position holds at most one unit of d
    bool duplicates_ok = true;  ///< placement counts and T3 adjacency
    bool capacity_ok = true;    ///< loaded weight within max payload
    bool pl_valid = true;       ///< conjunction of the three above
    bool cl_valid = true;       ///< CoG inside [cog_min, cog_max]
    bool sl_valid = true;       ///< every shear station within its limit
    int shear_violations = 0;
    double cog = 0.0;
    double loaded_weight = 0.0;
};

/// One evaluated shear constraint of a plan.
struct ShearValue {
    ShearStation station;
    double value = 0.0;
    bool violated = false;
};

/// Extract the plan encoded in the first n*N bits; slack bits are ignored.
/// Physically impossible patterns decode fine; validate() judges them.
inline LoadingPlan decode(std::span<const std::uint8_t> bits,
                          const VariableRegistry& reg,
                          const ProblemInstance& inst) {
    if (bits.size() != reg.total_vars())
        throw std::invalid_argument("bit vector length does not match the registry");
    LoadingPlan plan;
    plan.occupancy.resize(inst.num_positions);
    plan.placements.resize(inst.containers.size());
    for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
        for (int j = 1; j <= inst.num_positions; ++j)
            if (bits[reg.position_var(ci, j)]) {
                plan.placements[ci].push_back(j);
                plan.occupancy[j - 1].push_back(inst.containers[ci].id);
            }
    return plan;
}

/// Loaded weight: sum of t_i * m_i over every occupied cell, which equals
/// the plain mass total for properly placed containers.
inline double loaded_weight(const LoadingPlan& plan, const ProblemInstance& inst) {
    double w = 0.0;
    for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
        w += inst.containers[ci].cell_mass() * plan.placements[ci].size();
    return w;
}

/// Center of gravity of the loaded aircraft. The denominator includes the
/// empty mass, so it is always positive; an empty plan returns the empty
/// aircraft's CoG.
inline double center_of_gravity(const LoadingPlan& plan, const ProblemInstance& inst) {
    double moment = inst.empty_mass * inst.empty_cog;
    double mass = inst.empty_mass;
    for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
        for (int j : plan.placements[ci]) {
            const double m = inst.containers[ci].cell_mass();
            moment += m * cog_coordinate(j, inst.length, inst.num_positions);
            mass += m;
        }
    return moment / mass;
}

/// Evaluate every discretized shear constraint of the plan.
inline std::vector<ShearValue> shear_profile(const LoadingPlan& plan,
                                             const ProblemInstance& inst,
                                             double tol = kRelTol) {
    const int N = inst.num_positions;
    std::vector<double> cell_mass(N + 1, 0.0);  // 1-based
    for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
        for (int j : plan.placements[ci])
            cell_mass[j] += inst.containers[ci].cell_mass();
    std::vector<double> prefix(N + 1, 0.0);
    for (int j = 1; j <= N; ++j) prefix[j] = prefix[j - 1] + cell_mass[j];

    const int mid = N / 2 + 1;
    std::vector<ShearValue> out;
    for (const auto& st : shear_stations(inst)) {
        ShearValue v;
        v.station = st;
        switch (st.kind) {
            case ShearStation::Kind::Left:
                v.value = prefix[st.u];
                break;
            case ShearStation::Kind::Right:
                v.value = prefix[N] - prefix[st.u];
                break;
            case ShearStation::Kind::CenterLeft:
                v.value = prefix[mid - 1] + cell_mass[mid] / 2.0;
                break;
            case ShearStation::Kind::CenterRight:
                v.value = cell_mass[mid] / 2.0 + (prefix[N] - prefix[mid]);
                break;
        }
        v.violated = !leq(v.value, st.limit, tol);
        out.push_back(v);
    }
    return out;
}

/// Check a plan against all constraint families. CoG and shear results are
/// always computed, whether or not the families are active in the
/// instance; callers decide which verdicts count.
inline ValidationReport validate(const LoadingPlan& plan, const ProblemInstance& inst,
                                 double tol = kRelTol) {
    if (plan.occupancy.size() != static_cast<std::size_t>(inst.num_positions) ||
        plan.placements.size() != inst.containers.size())
        throw std::invalid_argument("plan shape does not match the instance");

    ValidationReport rep;

    for (int j = 1; j <= inst.num_positions; ++j) {
        double d = 0.0;
        for (int id : plan.occupancy[j - 1]) {
            bool found = false;
            for (const auto& c : inst.containers)
                if (c.id == id) {
                    d += c.d();
                    found = true;
                    break;
                }
            if (!found)
                throw std::invalid_argument("plan references unknown container id " +
                                            std::to_string(id));
        }
        if (!leq(d, 1.0, tol)) rep.overlap_ok = false;
    }

    for (std::size_t ci = 0; ci < inst.containers.size(); ++ci) {
        auto positions = plan.placements[ci];
        std::sort(positions.begin(), positions.end());
        if (inst.containers[ci].type == ContainerType::T3) {
            // a large container is either left at the terminal or spans two
            // adjacent cells; a single occupied cell is meaningless
            if (!positions.empty() &&
                (positions.size() != 2 || positions[1] != positions[0] + 1))
                rep.duplicates_ok = false;
        } else {
            if (positions.size() > 1) rep.duplicates_ok = false;
        }
    }

    rep.loaded_weight = loaded_weight(plan, inst);
    if (!leq(rep.loaded_weight, inst.max_payload, tol)) rep.capacity_ok = false;
    rep.pl_valid = rep.overlap_ok && rep.duplicates_ok && rep.capacity_ok;

    rep.cog = center_of_gravity(plan, inst);
    rep.cl_valid = leq(inst.cog_min, rep.cog, tol) && leq(rep.cog, inst.cog_max, tol);

    for (const auto& sv : shear_profile(plan, inst, tol))
        if (sv.violated) ++rep.shear_violations;
    rep.sl_valid = rep.shear_violations == 0;

    return rep;
}

/// Did the plan satisfy every family the instance actually activates?
inline bool feasible_for(const ValidationReport& rep, const ConstraintSet& set) {
    if (set.pl && !rep.pl_valid) return false;
    if (set.cl && !rep.cl_valid) return false;
    if (set.sl && !rep.sl_valid) return false;
    return true;
}

}  // namespace aircargo
