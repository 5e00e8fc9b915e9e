#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "finsler/geodesy.hpp"
#include "finsler/search.hpp"

namespace finsler {

using json = nlohmann::ordered_json;

/// full-precision scientific notation, 17 significant digits
inline std::string fmt_sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

inline json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline json tensor3_to_json(const Tensor3& t) {
    json slices = json::array();
    for (int i = 0; i < t.extent(); ++i) {
        json rows = json::array();
        for (int j = 0; j < t.extent(); ++j) {
            json row = json::array();
            for (int k = 0; k < t.extent(); ++k) row.push_back(t(i, j, k));
            rows.push_back(row);
        }
        slices.push_back(rows);
    }
    return slices;
}

inline std::string provenance_name(GeodesicVectorCandidate::Provenance p) {
    switch (p) {
        case GeodesicVectorCandidate::Provenance::SphereZero: return "sphere-zero";
        case GeodesicVectorCandidate::Provenance::Algebraic: return "algebraic";
        case GeodesicVectorCandidate::Provenance::CommutatorComplement:
            return "commutator-complement";
    }
    return "unknown";
}

inline json candidate_to_json(const GeodesicVectorCandidate& c) {
    json j;
    j["X"] = vec_to_json(c.X);
    j["t_residual"] = c.t_residual;
    j["v_residual"] = c.v_residual;
    if (c.lemma2)
        j["lemma2_residual"] = *c.lemma2;
    else
        j["lemma2_residual"] = nullptr;
    j["sup_distance"] = c.comparison.sup_distance;
    j["velocity_mismatch"] = c.comparison.velocity_mismatch;
    j["reparam_constant"] = c.comparison.reparam_constant;
    j["comparison_window"] = c.comparison.window;
    j["comparison_truncated"] = c.comparison.truncated;
    j["provenance"] = provenance_name(c.provenance);
    j["certified"] = c.certified;
    j["uncorroborated"] = c.uncorroborated;
    j["both_signs"] = c.both_signs;
    return j;
}

inline json search_report_to_json(const SphereSearchReport& rep) {
    json j;
    j["report"] = "sphere-search";
    j["space"] = rep.space;
    j["dim"] = rep.dim;
    j["samples"] = rep.samples;
    j["seed"] = rep.seed;
    j["branch"] = rep.branch;
    j["guaranteed"] = rep.guaranteed;
    j["all_directions_geodesic"] = rep.all_directions_geodesic;
    j["guarantee_violated"] = rep.guarantee_violated;
    j["global_min_t"] = rep.global_min_t;
    j["global_min_X"] = vec_to_json(rep.global_min_X);
    json cands = json::array();
    for (const auto& c : rep.candidates) cands.push_back(candidate_to_json(c));
    j["candidates"] = cands;
    return j;
}

inline std::string search_report_to_csv(const SphereSearchReport& rep) {
    std::ostringstream os;
    os << "# finsler search space=" << rep.space << " seed=" << rep.seed
       << " samples=" << rep.samples << " branch=" << rep.branch << "\n";
    for (int i = 0; i < rep.dim; ++i) os << "X" << i + 1 << ",";
    os << "t_residual,v_residual,lemma2_residual,sup_distance,velocity_mismatch,"
          "reparam_constant,certified,both_signs,provenance\n";
    for (const auto& c : rep.candidates) {
        for (int i = 0; i < rep.dim; ++i) os << fmt_sci(c.X[i]) << ",";
        os << fmt_sci(c.t_residual) << "," << fmt_sci(c.v_residual) << ","
           << (c.lemma2 ? fmt_sci(*c.lemma2) : std::string("nan")) << ","
           << fmt_sci(c.comparison.sup_distance) << ","
           << fmt_sci(c.comparison.velocity_mismatch) << ","
           << fmt_sci(c.comparison.reparam_constant) << ","
           << (c.certified ? 1 : 0) << "," << (c.both_signs ? 1 : 0) << ","
           << provenance_name(c.provenance) << "\n";
    }
    return os.str();
}

inline std::string sphere_field_to_csv(const std::string& space,
                                       const std::vector<SphereFieldSample>& field,
                                       uint64_t seed) {
    std::ostringstream os;
    const int n = field.empty() ? 0 : static_cast<int>(field[0].X.size());
    os << "# finsler sphere-field space=" << space << " seed=" << seed
       << " samples=" << field.size() << "\n";
    for (int i = 0; i < n; ++i) os << "x" << i + 1 << ",";
    for (int i = 0; i < n; ++i) os << "v" << i + 1 << ",";
    os << "v_norm,t_norm\n";
    for (const auto& s : field) {
        for (int i = 0; i < n; ++i) os << fmt_sci(s.X[i]) << ",";
        for (int i = 0; i < n; ++i) os << fmt_sci(s.v[i]) << ",";
        os << fmt_sci(s.v_norm) << "," << fmt_sci(s.t_norm) << "\n";
    }
    return os.str();
}

inline std::string geodesic_to_csv(const std::string& space,
                                   const GeodesicSolution& sol, uint64_t seed) {
    std::ostringstream os;
    const int n = static_cast<int>(sol.x0.size());
    os << "# finsler geodesic space=" << space << " seed=" << seed
       << " step=" << fmt_sci(sol.step)
       << " chart_exit=" << (sol.chart_exit ? 1 : 0) << "\n";
    os << "t";
    for (int i = 0; i < n; ++i) os << ",x" << i + 1;
    for (int i = 0; i < n; ++i) os << ",y" << i + 1;
    os << "\n";
    for (size_t k = 0; k < sol.times.size(); ++k) {
        os << fmt_sci(sol.times[k]);
        for (int i = 0; i < n; ++i) os << "," << fmt_sci(sol.positions[k][i]);
        for (int i = 0; i < n; ++i) os << "," << fmt_sci(sol.velocities[k][i]);
        os << "\n";
    }
    return os.str();
}

inline json tensors_to_json(const std::string& space, const ConnectionData& c,
                            double F, uint64_t seed) {
    json j;
    j["report"] = "tensors";
    j["space"] = space;
    j["seed"] = seed;
    j["x"] = vec_to_json(c.x);
    j["y"] = vec_to_json(c.y);
    j["F"] = F;
    j["g"] = mat_to_json(c.g);
    j["cartan"] = tensor3_to_json(c.cartan);
    j["gamma"] = tensor3_to_json(c.gamma);
    j["nonlinear"] = mat_to_json(c.nonlinear);
    j["chern"] = tensor3_to_json(c.chern);
    return j;
}

inline std::string tensors_to_csv(const std::string& space, const ConnectionData& c,
                                  double F, uint64_t seed) {
    std::ostringstream os;
    const int n = static_cast<int>(c.x.size());
    os << "# finsler tensors space=" << space << " seed=" << seed << " x=";
    for (int i = 0; i < n; ++i) os << (i ? ";" : "") << fmt_sci(c.x[i]);
    os << " y=";
    for (int i = 0; i < n; ++i) os << (i ? ";" : "") << fmt_sci(c.y[i]);
    os << "\ntensor,i,j,k,value\n";
    os << "F,,,," << fmt_sci(F) << "\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            os << "g," << i + 1 << "," << j + 1 << ",," << fmt_sci(c.g(i, j)) << "\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                os << "cartan," << i + 1 << "," << j + 1 << "," << k + 1 << ","
                   << fmt_sci(c.cartan(i, j, k)) << "\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                os << "gamma," << i + 1 << "," << j + 1 << "," << k + 1 << ","
                   << fmt_sci(c.gamma(i, j, k)) << "\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            os << "nonlinear," << i + 1 << "," << j + 1 << ",,"
               << fmt_sci(c.nonlinear(i, j)) << "\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                os << "chern," << i + 1 << "," << j + 1 << "," << k + 1 << ","
                   << fmt_sci(c.chern(i, j, k)) << "\n";
    return os.str();
}

inline json geodesic_to_json(const std::string& space, const GeodesicSolution& sol,
                             uint64_t seed) {
    json j;
    j["report"] = "geodesic";
    j["space"] = space;
    j["seed"] = seed;
    j["x0"] = vec_to_json(sol.x0);
    j["y0"] = vec_to_json(sol.y0);
    j["step"] = sol.step;
    j["integrator_order"] = sol.integrator_order;
    j["initial_speed"] = sol.initial_speed;
    j["max_speed_drift"] = sol.max_speed_drift;
    j["chart_exit"] = sol.chart_exit;
    json t = json::array(), xs = json::array(), ys = json::array();
    for (size_t k = 0; k < sol.times.size(); ++k) {
        t.push_back(sol.times[k]);
        xs.push_back(vec_to_json(sol.positions[k]));
        ys.push_back(vec_to_json(sol.velocities[k]));
    }
    j["t"] = t;
    j["x"] = xs;
    j["y"] = ys;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open output file \"" + path + "\"");
    out << body;
}

}  // namespace finsler
