#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aircargo/analysis.hpp"
#include "aircargo/model.hpp"
#include "aircargo/qubo.hpp"

/// File formats: instance documents (JSON with an optional CSV container
/// table), penalty-weight documents, the sparse QUBO export and its
/// variable-map sidecar, and JSON views of plans and validation reports.
namespace aircargo {

using json = nlohmann::json;

/// Shortest round-trip decimal form; keeps emitted files byte-stable.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline const json& require_key(const json& j, const std::string& key,
                               const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw std::runtime_error(path + "." + key + ": missing required key");
    return j.at(key);
}

inline double require_number(const json& j, const std::string& key,
                             const std::string& path) {
    const json& v = require_key(j, key, path);
    if (!v.is_number())
        throw std::runtime_error(path + "." + key + ": expected a number");
    return v.get<double>();
}

inline bool require_bool(const json& j, const std::string& key,
                         const std::string& path) {
    const json& v = require_key(j, key, path);
    if (!v.is_boolean())
        throw std::runtime_error(path + "." + key + ": expected a boolean");
    return v.get<bool>();
}

}  // namespace detail

/// Parse a delimiter-separated container table with columns id, type,
/// mass. Blank lines, '#' comments and a textual header row are skipped.
inline std::vector<ContainerSpec> parse_containers_csv(const std::string& text) {
    std::vector<ContainerSpec> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        for (char& ch : line)
            if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) continue;
        if (first[0] == '#') continue;
        if (!std::isdigit(static_cast<unsigned char>(first[0])) && first[0] != '-') {
            if (lineno == 1) continue;  // header row
            throw std::runtime_error("containers line " + std::to_string(lineno) +
                                     ": expected numeric id");
        }
        ContainerSpec c;
        int type_code_value = 0;
        try {
            c.id = std::stoi(first);
            std::string type_str, mass_str;
            if (!(fields >> type_str >> mass_str))
                throw std::runtime_error("short row");
            type_code_value = std::stoi(type_str);
            c.mass = std::stod(mass_str);
        } catch (const std::exception&) {
            throw std::runtime_error("containers line " + std::to_string(lineno) +
                                     ": expected 'id type mass'");
        }
        c.type = type_from_code(type_code_value);
        out.push_back(c);
    }
    return out;
}

/// Parse an instance document. `source` names the input in error messages;
/// `base_dir` resolves a relative CSV container-table path.
inline ProblemInstance parse_instance(const json& doc, const std::string& source = "instance",
                                      const std::filesystem::path& base_dir = {}) {
    using detail::require_bool;
    using detail::require_key;
    using detail::require_number;

    ProblemInstance inst;
    const json& params = require_key(doc, "parameters", source);
    const std::string p = source + ".parameters";
    inst.num_positions = static_cast<int>(require_number(params, "N", p));
    inst.length = require_number(params, "L", p);
    inst.max_payload = require_number(params, "W_max", p);
    inst.empty_mass = require_number(params, "W_e", p);
    inst.shear_max_0 = require_number(params, "S_max_0", p);
    inst.cog_min = require_number(params, "x_cg_min", p);
    inst.cog_max = require_number(params, "x_cg_max", p);
    inst.cog_target = require_number(params, "x_cg_target", p);
    inst.empty_cog = params.contains("x_cg_e") ? require_number(params, "x_cg_e", p) : 0.0;

    const json& containers = require_key(doc, "containers", source);
    if (containers.is_string()) {
        const std::filesystem::path csv =
            base_dir / std::filesystem::path(containers.get<std::string>());
        std::ifstream in(csv);
        if (!in)
            throw std::runtime_error(source + ".containers: cannot open '" +
                                     csv.string() + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        inst.containers = parse_containers_csv(buf.str());
    } else if (containers.is_array()) {
        std::size_t idx = 0;
        for (const auto& c : containers) {
            const std::string cp = source + ".containers[" + std::to_string(idx++) + "]";
            ContainerSpec spec;
            spec.id = static_cast<int>(require_number(c, "id", cp));
            spec.type = type_from_code(static_cast<int>(require_number(c, "type", cp)));
            spec.mass = require_number(c, "mass", cp);
            inst.containers.push_back(spec);
        }
    } else {
        throw std::runtime_error(source + ".containers: expected an array or a CSV path");
    }

    const json& cs = require_key(doc, "constraints", source);
    const std::string cp = source + ".constraints";
    inst.constraints.pl = require_bool(cs, "pl", cp);
    inst.constraints.cl = require_bool(cs, "cl", cp);
    inst.constraints.sl = require_bool(cs, "sl", cp);

    if (doc.contains("shear_limit_table")) {
        const json& table = doc.at("shear_limit_table");
        if (!table.is_array())
            throw std::runtime_error(source + ".shear_limit_table: expected an array");
        std::size_t k = 0;
        for (const auto& row : table) {
            const std::string rp = source + ".shear_limit_table[" + std::to_string(k++) + "]";
            inst.shear_limit_table.push_back(
                {require_number(row, "x", rp), require_number(row, "s_max", rp)});
        }
    }

    try {
        inst.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source + ": " + e.what());
    }
    return inst;
}

inline ProblemInstance parse_instance_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open instance file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return parse_instance(doc, path.string(), path.parent_path());
}

inline json emit_instance(const ProblemInstance& inst) {
    json params;
    params["N"] = inst.num_positions;
    params["L"] = inst.length;
    params["W_max"] = inst.max_payload;
    params["W_e"] = inst.empty_mass;
    params["x_cg_e"] = inst.empty_cog;
    params["S_max_0"] = inst.shear_max_0;
    params["x_cg_min"] = inst.cog_min;
    params["x_cg_max"] = inst.cog_max;
    params["x_cg_target"] = inst.cog_target;
    json containers = json::array();
    for (const auto& c : inst.containers)
        containers.push_back({{"id", c.id}, {"type", type_code(c.type)}, {"mass", c.mass}});
    json doc;
    doc["parameters"] = params;
    doc["containers"] = containers;
    doc["constraints"] = {{"pl", inst.constraints.pl},
                          {"cl", inst.constraints.cl},
                          {"sl", inst.constraints.sl}};
    if (!inst.shear_limit_table.empty()) {
        json table = json::array();
        for (const auto& pt : inst.shear_limit_table)
            table.push_back({{"x", pt.x}, {"s_max", pt.s_max}});
        doc["shear_limit_table"] = table;
    }
    return doc;
}

inline json weights_to_json(const PenaltyWeights& w) {
    return json{{"p_overlap", w.p_overlap},
                {"p_dup", w.p_dup},
                {"p_contig", w.p_contig},
                {"p_capacity", w.p_capacity},
                {"p_cog_target", w.p_cog_target},
                {"p_cog_lower", w.p_cog_lower},
                {"p_cog_upper", w.p_cog_upper},
                {"p_shear_left", w.p_shear_left},
                {"p_shear_right", w.p_shear_right}};
}

inline PenaltyWeights weights_from_json(const json& doc, const std::string& source = "weights") {
    PenaltyWeights w;
    w.p_overlap = detail::require_number(doc, "p_overlap", source);
    w.p_dup = detail::require_number(doc, "p_dup", source);
    w.p_contig = detail::require_number(doc, "p_contig", source);
    w.p_capacity = detail::require_number(doc, "p_capacity", source);
    w.p_cog_target = detail::require_number(doc, "p_cog_target", source);
    w.p_cog_lower = detail::require_number(doc, "p_cog_lower", source);
    w.p_cog_upper = detail::require_number(doc, "p_cog_upper", source);
    w.p_shear_left = detail::require_number(doc, "p_shear_left", source);
    w.p_shear_right = detail::require_number(doc, "p_shear_right", source);
    try {
        w.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(source + ": " + e.what());
    }
    return w;
}

/// Sparse text export: `p qubo <num_vars> <num_terms> <offset>` then one
/// `i j value` line per stored term, 0-based, i <= j, row-major; diagonal
/// entries carry the linear coefficients.
inline void export_qubo(const QuadraticModel& model, std::ostream& out) {
    const auto terms = model.sorted_terms();
    out << "p qubo " << model.num_vars() << ' ' << terms.size() << ' '
        << format_double(model.offset()) << '\n';
    for (const auto& t : terms)
        out << t.i << ' ' << t.j << ' ' << format_double(t.value) << '\n';
}

/// Human- and machine-readable map from flat variable index to meaning.
inline void export_varmap(const VariableRegistry& reg, const ProblemInstance& inst,
                          std::ostream& out) {
    for (std::size_t ci = 0; ci < inst.containers.size(); ++ci)
        for (int j = 1; j <= inst.num_positions; ++j)
            out << reg.position_var(ci, j) << " pos " << inst.containers[ci].id
                << ' ' << j << '\n';
    for (const auto& g : reg.slack_groups())
        for (std::size_t k = 0; k < g.coefficients.size(); ++k)
            out << g.var_indices[k] << " slack " << g.tag << ' ' << k << ' '
                << format_double(g.coefficients[k]) << '\n';
}

inline json plan_to_json(const LoadingPlan& plan, const ProblemInstance& inst) {
    json placements = json::array();
    for (std::size_t ci = 0; ci < plan.placements.size(); ++ci) {
        json row;
        row["id"] = inst.containers[ci].id;
        row["positions"] = plan.placements[ci];
        placements.push_back(row);
    }
    json occupancy = json::array();
    for (const auto& ids : plan.occupancy) occupancy.push_back(ids);
    return json{{"placements", placements}, {"occupancy", occupancy}};
}

inline json report_to_json(const ValidationReport& rep) {
    return json{{"pl_valid", rep.pl_valid},
                {"cl_valid", rep.cl_valid},
                {"sl_valid", rep.sl_valid},
                {"overlap_ok", rep.overlap_ok},
                {"duplicates_ok", rep.duplicates_ok},
                {"capacity_ok", rep.capacity_ok},
                {"shear_violations", rep.shear_violations},
                {"cog", rep.cog},
                {"loaded_weight", rep.loaded_weight}};
}

inline ValidationReport report_from_json(const json& doc, const std::string& source = "report") {
    ValidationReport rep;
    rep.pl_valid = detail::require_bool(doc, "pl_valid", source);
    rep.cl_valid = detail::require_bool(doc, "cl_valid", source);
    rep.sl_valid = detail::require_bool(doc, "sl_valid", source);
    rep.overlap_ok = detail::require_bool(doc, "overlap_ok", source);
    rep.duplicates_ok = detail::require_bool(doc, "duplicates_ok", source);
    rep.capacity_ok = detail::require_bool(doc, "capacity_ok", source);
    rep.shear_violations = static_cast<int>(detail::require_number(doc, "shear_violations", source));
    rep.cog = detail::require_number(doc, "cog", source);
    rep.loaded_weight = detail::require_number(doc, "loaded_weight", source);
    return rep;
}

inline ConstraintSet constraint_set_from_name(const std::string& name) {
    if (name == "pl") return {true, false, false};
    if (name == "pl+cl") return {true, true, false};
    if (name == "pl+cl+sl") return {true, true, true};
    throw std::runtime_error("unknown constraint set '" + name +
                             "' (expected pl, pl+cl or pl+cl+sl)");
}

}  // namespace aircargo
