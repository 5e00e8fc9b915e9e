#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/homspace.hpp"
#include "finsler/search.hpp"

namespace finsler {

using json = nlohmann::ordered_json;

namespace io_detail {

inline void reject_unknown_keys(const json& j, std::vector<std::string> allowed,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw DomainError("unknown field \"" + it.key() + "\" in " + where);
    }
}

inline Vec parse_vec(const json& j, const std::string& where) {
    if (!j.is_array()) throw DomainError(where + ": expected an array");
    Vec v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw DomainError(where + ": expected numbers");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    return v;
}

inline Mat parse_mat(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw DomainError(where + ": expected a matrix");
    const int rows = static_cast<int>(j.size());
    Vec first = parse_vec(j[0], where);
    Mat m(rows, first.size());
    m.row(0) = first;
    for (int r = 1; r < rows; ++r) {
        Vec row = parse_vec(j[r], where);
        if (row.size() != first.size())
            throw DomainError(where + ": ragged matrix rows");
        m.row(r) = row;
    }
    return m;
}

}  // namespace io_detail

/// metric block: {type: riemannian|randers|custom-builtin, A, b, name, eps}
inline MinkowskiNorm parse_metric(const json& j, int dim) {
    io_detail::reject_unknown_keys(j, {"type", "A", "b", "name", "eps"}, "metric");
    if (!j.contains("type")) throw DomainError("metric: missing \"type\"");
    const std::string type = j.at("type").get<std::string>();
    Mat A = Mat::Identity(dim, dim);
    if (j.contains("A")) {
        A = io_detail::parse_mat(j.at("A"), "metric.A");
        if (A.rows() != dim)
            throw DomainError("metric.A: dimension does not match the space");
    }
    if (type == "riemannian") {
        if (j.contains("b") || j.contains("name") || j.contains("eps"))
            throw DomainError("metric: riemannian takes only \"A\"");
        return MinkowskiNorm::riemannian(A);
    }
    if (type == "randers") {
        if (!j.contains("b")) throw DomainError("metric: randers requires \"b\"");
        Vec b = io_detail::parse_vec(j.at("b"), "metric.b");
        if (b.size() != dim)
            throw DomainError("metric.b: dimension does not match the space");
        return MinkowskiNorm::randers(A, b);
    }
    if (type == "custom-builtin") {
        if (!j.contains("name"))
            throw DomainError("metric: custom-builtin requires \"name\"");
        const std::string name = j.at("name").get<std::string>();
        if (name == "perturbed-quartic") {
            const double eps = j.contains("eps") ? j.at("eps").get<double>() : 0.2;
            return perturbed_quartic_norm(dim, eps);
        }
        throw DomainError("metric: unknown custom-builtin norm \"" + name + "\"");
    }
    throw DomainError("metric: unknown type \"" + type + "\"");
}

/// A loaded space: chart-level capable for the built-in families, algebra-only
/// for family "custom" (raw structure constants).
struct LoadedSpace {
    std::string name;
    std::optional<HomogeneousSpaceSpec> space;  // chart-level operations
    // algebra-level data, always available
    LieAlgebraData algebra;
    ReductiveDecomposition split;
    MinkowskiNorm norm;

    const HomogeneousSpaceSpec& require_chart(const std::string& op) const {
        if (!space)
            throw DomainError(op +
                              ": chart-level operations require a built-in family "
                              "(custom algebras support only algebraic criteria)");
        return *space;
    }
};

inline int builtin_dimension(const std::string& family, int dim_hint) {
    if (family == "heisenberg" || family == "su2") return 3;
    if (family == "hyperbolic") return 2;
    if (family == "flat") return dim_hint > 0 ? dim_hint : 3;
    throw DomainError("unknown space family \"" + family + "\"");
}

inline HomogeneousSpaceSpec build_builtin(const std::string& family,
                                          MinkowskiNorm norm) {
    if (family == "heisenberg") return heisenberg_space(std::move(norm));
    if (family == "su2") return su2_space(std::move(norm));
    if (family == "hyperbolic") return half_plane_space(std::move(norm));
    if (family == "flat") return flat_space(std::move(norm));
    throw DomainError("unknown space family \"" + family + "\"");
}

/// Parse a space-spec document. Fields: family, dim (flat only), metric,
/// origin (optional; must match the canonical origin except for flat),
/// algebra {structure_constants, h_basis} (optional; family "custom" only
/// supports algebra-level operations).
inline LoadedSpace parse_space_spec(const json& j) {
    io_detail::reject_unknown_keys(j, {"family", "dim", "metric", "origin", "algebra"},
                                   "space spec");
    if (!j.contains("family")) throw DomainError("space spec: missing \"family\"");
    const std::string family = j.at("family").get<std::string>();

    LoadedSpace out;
    if (family == "custom") {
        if (!j.contains("algebra"))
            throw DomainError("space spec: family \"custom\" requires \"algebra\"");
        const json& aj = j.at("algebra");
        io_detail::reject_unknown_keys(aj, {"structure_constants", "h_basis"},
                                       "algebra");
        if (!aj.contains("structure_constants"))
            throw DomainError("algebra: missing \"structure_constants\"");
        const json& cj = aj.at("structure_constants");
        const int n = static_cast<int>(cj.size());
        Tensor3 c(n);
        for (int k = 0; k < n; ++k) {
            Mat slice = io_detail::parse_mat(cj[k], "structure_constants");
            if (slice.rows() != n || slice.cols() != n)
                throw DomainError("structure_constants: expected n x n x n");
            for (int i = 0; i < n; ++i)
                for (int jj = 0; jj < n; ++jj) c(k, i, jj) = slice(i, jj);
        }
        out.algebra = make_lie_algebra(std::move(c));
        Mat h(n, 0);
        if (aj.contains("h_basis")) {
            const json& hj = aj.at("h_basis");
            h = Mat(n, static_cast<int>(hj.size()));
            for (size_t col = 0; col < hj.size(); ++col) {
                Vec v = io_detail::parse_vec(hj[col], "h_basis");
                if (v.size() != n) throw DomainError("h_basis: wrong vector length");
                h.col(static_cast<int>(col)) = v;
            }
        }
        out.split = reductive_split(out.algebra, h);
        const int nm = out.split.dim_m();
        out.norm = j.contains("metric")
                       ? parse_metric(j.at("metric"), nm)
                       : MinkowskiNorm::riemannian(Mat::Identity(nm, nm));
        out.name = "custom";
        return out;
    }

    const int dim_hint = j.contains("dim") ? j.at("dim").get<int>() : 0;
    const int dim = builtin_dimension(family, dim_hint);
    if (j.contains("dim") && family != "flat" && dim_hint != dim)
        throw DomainError("space spec: dim conflicts with the \"" + family +
                          "\" family");
    MinkowskiNorm norm = j.contains("metric")
                             ? parse_metric(j.at("metric"), dim)
                             : MinkowskiNorm::riemannian(Mat::Identity(dim, dim));
    HomogeneousSpaceSpec spec = build_builtin(family, std::move(norm));
    if (j.contains("origin")) {
        Vec origin = io_detail::parse_vec(j.at("origin"), "origin");
        if (origin.size() != dim) throw DomainError("origin: wrong dimension");
        if (family == "flat") {
            spec.origin = origin;  // translation-invariant: any origin works
        } else if ((origin - spec.origin).norm() > 1e-12) {
            throw DomainError(
                "origin: the \"" + family +
                "\" family is built at its canonical origin; omit the field or "
                "pass the canonical value");
        }
    }
    if (j.contains("algebra"))
        throw DomainError(
            "space spec: \"algebra\" is only accepted with family \"custom\"; "
            "built-in families carry their own algebra");
    out.name = spec.name;
    out.algebra = spec.algebra;
    out.split = spec.split;
    out.norm = spec.norm;
    out.space = std::move(spec);
    return out;
}

/// Load from a builtin name ("flat2", "flat3", "heisenberg", "su2",
/// "hyperbolic", each with the default Euclidean metric) or a JSON file path.
inline LoadedSpace load_space(const std::string& name_or_path) {
    auto is_builtin = [](const std::string& s) {
        return s == "flat2" || s == "flat3" || s == "heisenberg" || s == "su2" ||
               s == "hyperbolic";
    };
    if (is_builtin(name_or_path)) {
        json j;
        if (name_or_path == "flat2")
            j = {{"family", "flat"}, {"dim", 2}};
        else if (name_or_path == "flat3")
            j = {{"family", "flat"}, {"dim", 3}};
        else
            j = {{"family", name_or_path}};
        return parse_space_spec(j);
    }
    std::ifstream in(name_or_path);
    if (!in)
        throw DomainError("cannot open space spec \"" + name_or_path +
                          "\" (not a builtin name or readable file)");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DomainError("space spec \"" + name_or_path + "\": " + e.what());
    }
    return parse_space_spec(j);
}

/// Runtime configuration: space + numeric overrides. Unknown keys rejected,
/// tolerances positive, seed recorded in every artifact.
struct RunConfig {
    std::string space;  // builtin name or spec path
    int samples = 2000;
    double step = 1e-3;
    double window = 1.0;
    double tol = 0.0;  // 0: keep per-check defaults; >0: certification override
    uint64_t seed = 0;
    std::string out;
    std::string format = "csv";  // csv | json

    SearchConfig search_config() const {
        SearchConfig cfg;
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.compare_window = window;
        if (tol > 0.0) {
            cfg.tol.t_residual = tol;
            cfg.tol.lemma2 = tol;
            cfg.tol.sup_distance = tol;
        }
        return cfg;
    }
};

inline RunConfig parse_run_config(const json& j) {
    io_detail::reject_unknown_keys(
        j, {"space", "samples", "step", "window", "tol", "seed", "out", "format"},
        "run config");
    RunConfig c;
    if (j.contains("space")) c.space = j.at("space").get<std::string>();
    if (j.contains("samples")) c.samples = j.at("samples").get<int>();
    if (j.contains("step")) c.step = j.at("step").get<double>();
    if (j.contains("window")) c.window = j.at("window").get<double>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
    if (c.samples <= 0) throw DomainError("run config: samples must be positive");
    if (c.step <= 0.0) throw DomainError("run config: step must be positive");
    if (c.window <= 0.0) throw DomainError("run config: window must be positive");
    if (c.tol < 0.0) throw DomainError("run config: tol must be positive");
    if (c.format != "csv" && c.format != "json")
        throw DomainError("run config: format must be csv or json");
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file \"" + path + "\"");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config file: ") + e.what());
    }
    return parse_run_config(j);
}

}  // namespace finsler
