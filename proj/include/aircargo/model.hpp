#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

/// Domain model for aircraft cargo loading: container classes, scenario
/// parameters and the closed-form geometric quantities (cell coordinates,
/// shear-limit curve) everything else is built on.
namespace aircargo {

/// Default relative tolerance for floating-point comparisons. Masses are
/// reals and large-container bookkeeping introduces factors of 1/2, so all
/// feasibility checks are tolerance-aware.
inline constexpr double kRelTol = 1e-9;

/// a <= b up to relative tolerance.
inline bool leq(double a, double b, double tol = kRelTol) {
    return a <= b + tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// |a - b| within relative tolerance.
inline bool near(double a, double b, double tol = kRelTol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Container size classes.
///   T1 (medium): one full position.
///   T2 (small):  half a position; two of them may share a cell.
///   T3 (large):  two adjacent positions.
enum class ContainerType { T1, T2, T3 };

/// Per-type coefficients.
///   t scales the mass contribution of one occupied cell (1/2 for T3, whose
///     mass is split over two cells).
///   d is the fraction of a position one cell of the container consumes.
struct TypeCoefficients {
    double t;
    double d;
};

inline TypeCoefficients coefficients(ContainerType type) {
    switch (type) {
        case ContainerType::T1: return {1.0, 1.0};
        case ContainerType::T2: return {1.0, 0.5};
        case ContainerType::T3: return {0.5, 1.0};
    }
    throw std::invalid_argument("unknown container type");
}

inline int type_code(ContainerType type) {
    switch (type) {
        case ContainerType::T1: return 1;
        case ContainerType::T2: return 2;
        case ContainerType::T3: return 3;
    }
    throw std::invalid_argument("unknown container type");
}

inline ContainerType type_from_code(int code) {
    switch (code) {
        case 1: return ContainerType::T1;
        case 2: return ContainerType::T2;
        case 3: return ContainerType::T3;
    }
    throw std::invalid_argument("container type must be 1, 2 or 3, got " +
                                std::to_string(code));
}

struct ContainerSpec {
    int id = 0;               ///< positive identifier, unique per instance
    ContainerType type = ContainerType::T1;
    double mass = 0.0;        ///< kilograms, > 0

    double t() const { return coefficients(type).t; }
    double d() const { return coefficients(type).d; }
    /// Mass contribution of one occupied cell.
    double cell_mass() const { return t() * mass; }
};

/// Which constraint families are active. The experiments of interest are
/// PL, PL+CL and PL+CL+SL; CL or SL without PL has no physical meaning.
struct ConstraintSet {
    bool pl = true;
    bool cl = false;
    bool sl = false;

    bool operator==(const ConstraintSet&) const = default;

    std::string name() const {
        std::string s = pl ? "pl" : "";
        if (cl) s += s.empty() ? "cl" : "+cl";
        if (sl) s += s.empty() ? "sl" : "+sl";
        return s.empty() ? "none" : s;
    }
};

/// One shear-limit sample for tabulated (non-linear) limit shapes.
struct ShearLimitPoint {
    double x;
    double s_max;
};

/// A full loading scenario. Immutable after construction; share freely.
struct ProblemInstance {
    std::vector<ContainerSpec> containers;
    int num_positions = 0;    ///< N
    double length = 0.0;      ///< L, payload-area length in meters
    double max_payload = 0.0; ///< W_p, kilograms
    double empty_mass = 0.0;  ///< W_e, kilograms
    double empty_cog = 0.0;   ///< x_cg of the empty aircraft (fuselage coord)
    double shear_max_0 = 0.0; ///< S_0^max, limit at x = 0
    double cog_min = 0.0;
    double cog_max = 0.0;
    double cog_target = 0.0;
    ConstraintSet constraints;
    /// Optional tabulated override of the shear-limit curve, sorted by x.
    std::vector<ShearLimitPoint> shear_limit_table;

    std::size_t num_containers() const { return containers.size(); }

    /// Throws std::invalid_argument on any structural violation.
    void validate() const;
};

/// Center coordinate of cell j = 1..N: x_j = (L/N)(j - N/2) - L/(2N).
/// Cell centers are symmetric about the origin.
inline double cog_coordinate(int j, double length, int num_positions) {
    if (j < 1 || j > num_positions)
        throw std::out_of_range("position index " + std::to_string(j) +
                                " outside 1.." + std::to_string(num_positions));
    const double cell = length / num_positions;
    return cell * (j - num_positions / 2.0) - cell / 2.0;
}

/// Boundary coordinate of station u = 1..N: x_u = (L/N)(u - N/2).
inline double shear_coordinate(int u, double length, int num_positions) {
    if (u < 1 || u > num_positions)
        throw std::out_of_range("station index " + std::to_string(u) +
                                " outside 1.." + std::to_string(num_positions));
    return (length / num_positions) * (u - num_positions / 2.0);
}

/// Symmetric piecewise-linear shear limit: S0 at x = 0, zero at x = +-L/2.
inline double shear_limit(double x, double s0, double length) {
    if (std::abs(x) > length / 2.0 * (1.0 + kRelTol))
        throw std::out_of_range("shear coordinate outside payload area");
    return x < 0 ? s0 * (length + 2.0 * x) / length
                 : s0 * (length - 2.0 * x) / length;
}

/// Shear limit for an instance: tabulated override when present (linear
/// interpolation between samples), otherwise the symmetric linear curve.
inline double shear_limit_at(const ProblemInstance& inst, double x) {
    const auto& table = inst.shear_limit_table;
    if (table.empty()) return shear_limit(x, inst.shear_max_0, inst.length);
    if (x < table.front().x || x > table.back().x)
        throw std::out_of_range("shear coordinate outside tabulated range");
    auto hi = std::lower_bound(table.begin(), table.end(), x,
                               [](const ShearLimitPoint& p, double v) { return p.x < v; });
    if (hi == table.begin()) return hi->s_max;
    auto lo = std::prev(hi);
    if (hi == table.end()) return lo->s_max;
    const double span = hi->x - lo->x;
    if (span <= 0) return lo->s_max;
    const double w = (x - lo->x) / span;
    return lo->s_max + w * (hi->s_max - lo->s_max);
}

/// One discretized shear constraint. Even N yields left stations u=1..N/2
/// and right stations u=N/2..N-1 (station N/2 sits at x=0 and appears on
/// both sides). Odd N adds two x=0 constraints where the middle cell
/// contributes half its mass to each side.
struct ShearStation {
    enum class Kind { Left, Right, CenterLeft, CenterRight };
    Kind kind;
    int u;        ///< station index; for Center* the middle cell index
    double x;     ///< station coordinate
    double limit; ///< S^max at the station
};

inline const char* to_string(ShearStation::Kind k) {
    switch (k) {
        case ShearStation::Kind::Left: return "left";
        case ShearStation::Kind::Right: return "right";
        case ShearStation::Kind::CenterLeft: return "center_left";
        case ShearStation::Kind::CenterRight: return "center_right";
    }
    return "?";
}

/// Enumerate the shear stations of an instance, left to right.
inline std::vector<ShearStation> shear_stations(const ProblemInstance& inst) {
    const int n = inst.num_positions;
    const double L = inst.length;
    std::vector<ShearStation> out;
    if (n % 2 == 0) {
        for (int u = 1; u <= n / 2; ++u) {
            const double x = shear_coordinate(u, L, n);
            out.push_back({ShearStation::Kind::Left, u, x, shear_limit_at(inst, x)});
        }
        for (int u = n / 2; u <= n - 1; ++u) {
            const double x = shear_coordinate(u, L, n);
            out.push_back({ShearStation::Kind::Right, u, x, shear_limit_at(inst, x)});
        }
    } else {
        const int half = n / 2;
        const int mid = half + 1;
        for (int u = 1; u <= half; ++u) {
            const double x = shear_coordinate(u, L, n);
            out.push_back({ShearStation::Kind::Left, u, x, shear_limit_at(inst, x)});
        }
        out.push_back({ShearStation::Kind::CenterLeft, mid, 0.0, shear_limit_at(inst, 0.0)});
        out.push_back({ShearStation::Kind::CenterRight, mid, 0.0, shear_limit_at(inst, 0.0)});
        for (int u = half + 1; u <= n - 1; ++u) {
            const double x = shear_coordinate(u, L, n);
            out.push_back({ShearStation::Kind::Right, u, x, shear_limit_at(inst, x)});
        }
    }
    return out;
}

inline void ProblemInstance::validate() const {
    if (containers.empty())
        throw std::invalid_argument("instance needs at least one container");
    if (num_positions < 1)
        throw std::invalid_argument("num_positions must be >= 1");
    if (length <= 0) throw std::invalid_argument("length must be > 0");
    if (max_payload <= 0) throw std::invalid_argument("max_payload must be > 0");
    if (empty_mass <= 0) throw std::invalid_argument("empty_mass must be > 0");
    if (shear_max_0 <= 0) throw std::invalid_argument("shear_max_0 must be > 0");
    if (!(cog_min <= cog_target && cog_target <= cog_max))
        throw std::invalid_argument("require cog_min <= cog_target <= cog_max");
    if ((constraints.cl || constraints.sl) && !constraints.pl)
        throw std::invalid_argument("CL or SL require PL to be active");
    std::unordered_set<int> ids;
    for (const auto& c : containers) {
        if (c.id <= 0)
            throw std::invalid_argument("container ids must be positive");
        if (!ids.insert(c.id).second)
            throw std::invalid_argument("duplicate container id " + std::to_string(c.id));
        if (c.mass <= 0)
            throw std::invalid_argument("container " + std::to_string(c.id) +
                                        " mass must be > 0");
    }
    if (!shear_limit_table.empty()) {
        for (std::size_t k = 1; k < shear_limit_table.size(); ++k)
            if (shear_limit_table[k].x <= shear_limit_table[k - 1].x)
                throw std::invalid_argument("shear_limit_table must be strictly increasing in x");
        for (const auto& p : shear_limit_table)
            if (p.s_max < 0)
                throw std::invalid_argument("shear_limit_table values must be >= 0");
    }
}

/// Total loadable cell mass: sum of t_i * m_i over all containers. The
/// magnitude driving default penalty weights.
inline double total_cell_mass(const ProblemInstance& inst) {
    double s = 0.0;
    for (const auto& c : inst.containers) s += c.cell_mass();
    return s;
}

}  // namespace aircargo
