#ifndef BOOJUM_IO_HPP
#define BOOJUM_IO_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "boojum/analysis.hpp"
#include "boojum/energy.hpp"
#include "boojum/grid.hpp"
#include "boojum/tangent_ode.hpp"

// Artifact serialization.  A checkpoint is one JSON header line (grid and
// model configuration, run outcome, FNV-1a digest) followed by the field CSV
// body; the digest covers the canonical configuration plus the raw body
// bytes, so any edit to either is detected.  All writes go through a
// temporary file and rename; all numbers use round-trip decimal formatting,
// so rewriting the same state is byte-identical.

namespace boojum {

struct Checkpoint {
    GridConfig grid;
    ModelParams model;
    UnitField field;
    int iterations = 0;
    bool converged = false;
    double energy = 0;
};

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t h = 14695981039346656037ull) {
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error(path + ": cannot open for writing");
        os << content;
        if (!os) throw std::runtime_error(path + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

inline nlohmann::json grid_json(const GridConfig& g) {
    return {{"n_radial", g.n_radial},
            {"n_polar", g.n_polar},
            {"outer_radius", g.outer_radius},
            {"grading", g.grading}};
}

inline nlohmann::json model_json(const ModelParams& m) {
    return {{"nu", m.nu}, {"mu", m.mu}};
}

inline std::string canonical_config(const GridConfig& g, const ModelParams& m) {
    return nlohmann::json{{"grid", grid_json(g)}, {"model", model_json(m)}}.dump();
}

}  // namespace detail

inline constexpr const char* kFieldCsvHeader = "index,r,theta_hat,u1,u2,u3";

/// CSV body shared by field exports and checkpoints; one row per node in
/// flat index order
inline std::string render_field_csv(const MeridianGrid& g, const UnitField& u) {
    if (u.size() != g.count())
        throw std::invalid_argument("render_field_csv: field size does not match grid");
    std::string out(kFieldCsvHeader);
    out += '\n';
    char buf[160];
    for (int i = 0; i <= g.n_r(); ++i)
        for (int j = 0; j < g.n_t(); ++j) {
            const std::size_t k = g.index(i, j);
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", k,
                          g.radii[i], g.thetas[j], u[k][0], u[k][1], u[k][2]);
            out += buf;
        }
    return out;
}

inline void write_field_csv(const std::string& path, const MeridianGrid& g,
                            const UnitField& u) {
    detail::write_atomic(path, render_field_csv(g, u));
}

inline void write_checkpoint(const std::string& path, const MeridianGrid& g,
                             const ModelParams& model, const UnitField& u,
                             int iterations, bool converged, double energy) {
    const std::string body = render_field_csv(g, u);
    const std::uint64_t digest =
        detail::fnv1a64(body, detail::fnv1a64(detail::canonical_config(g.cfg, model)));
    char dig[24];
    std::snprintf(dig, sizeof dig, "%016llx", static_cast<unsigned long long>(digest));
    nlohmann::json header{{"grid", detail::grid_json(g.cfg)},
                          {"model", detail::model_json(model)},
                          {"digest", dig},
                          {"iterations", iterations},
                          {"converged", converged},
                          {"energy", energy}};
    detail::write_atomic(path, header.dump() + "\n" + body);
}

/// reads and verifies a checkpoint; throws std::runtime_error carrying
/// path:line diagnostics, or "grid/config mismatch" on digest failure
inline Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error(path + ": cannot open checkpoint");
    std::string header;
    if (!std::getline(is, header))
        throw std::runtime_error(path + ":1: missing checkpoint header");
    std::string body((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());

    Checkpoint ck;
    std::string digest;
    try {
        const auto j = nlohmann::json::parse(header);
        const auto& jg = j.at("grid");
        ck.grid.n_radial = jg.at("n_radial").get<int>();
        ck.grid.n_polar = jg.at("n_polar").get<int>();
        ck.grid.outer_radius = jg.at("outer_radius").get<double>();
        ck.grid.grading = jg.at("grading").get<double>();
        ck.model.nu = j.at("model").at("nu").get<double>();
        ck.model.mu = j.at("model").at("mu").get<double>();
        digest = j.at("digest").get<std::string>();
        ck.iterations = j.at("iterations").get<int>();
        ck.converged = j.at("converged").get<bool>();
        ck.energy = j.at("energy").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ":1: bad checkpoint header: " + e.what());
    }
    ck.grid.validate();
    ck.model.validate();

    const std::uint64_t expect =
        detail::fnv1a64(body, detail::fnv1a64(detail::canonical_config(ck.grid, ck.model)));
    char dig[24];
    std::snprintf(dig, sizeof dig, "%016llx", static_cast<unsigned long long>(expect));
    if (digest != dig)
        throw std::runtime_error(path + ": grid/config mismatch (digest " + digest +
                                 " vs " + dig + ")");

    // parse the body rows; the digest already guarantees integrity, this
    // recovers the values and double-checks the shape
    std::istringstream bs(body);
    std::string line;
    int lineno = 1;
    if (!std::getline(bs, line) || line != kFieldCsvHeader)
        throw std::runtime_error(path + ":2: bad field CSV header");
    const auto g = build_grid(ck.grid);
    ck.field.assign(g.count(), UVector{});
    std::size_t rows = 0;
    while (std::getline(bs, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t k;
        double r, th, u1, u2, u3;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%lf,%lf,%lf", &k, &r, &th, &u1,
                        &u2, &u3) != 6 ||
            k >= g.count())
            throw std::runtime_error(path + ":" + std::to_string(lineno + 1) +
                                     ": malformed field row");
        ck.field[k] = {u1, u2, u3};
        ++rows;
    }
    if (rows != g.count())
        throw std::runtime_error(path + ": expected " + std::to_string(g.count()) +
                                 " field rows, got " + std::to_string(rows));
    return ck;
}

inline void write_energy_json(const std::string& path, const EnergyBreakdown& e,
                              int iterations, bool converged) {
    nlohmann::json j{{"elastic", e.elastic},
                     {"axis_weight", e.axis_weight},
                     {"bulk", e.bulk},
                     {"surface", e.surface},
                     {"total", e.total},
                     {"iterations", iterations},
                     {"converged", converged}};
    detail::write_atomic(path, j.dump(2) + "\n");
}

inline nlohmann::json defect_report_json(const DefectReport& rep) {
    auto vec = [](const UVector& v) {
        return nlohmann::json{v[0], v[1], v[2]};
    };
    auto side = [](const AxisSideCensus& s) {
        nlohmann::json jumps = nlohmann::json::array();
        for (const auto& jp : s.jumps)
            jumps.push_back({{"r_location", jp.r_location},
                             {"u2_before", jp.u2_before},
                             {"u2_after", jp.u2_after}});
        return nlohmann::json{{"jumps", jumps},
                              {"jump_count", s.jumps.size()},
                              {"parity_odd", s.parity_odd},
                              {"unresolved_layer", s.unresolved_layer}};
    };
    auto pole = [&](const PoleSide& p) {
        return nlohmann::json{{"value", vec(p.value)},
                              {"b", p.b},
                              {"boojum_value", p.boojum_value},
                              {"nearest_director_deviation",
                               p.trace.empty() ? 0.0 : p.trace.back()[1]}};
    };
    return nlohmann::json{{"pole_value_north", vec(rep.pole_value_north)},
                          {"pole_value_south", vec(rep.pole_value_south)},
                          {"census",
                           {{"north", side(rep.census.north)},
                            {"south", side(rep.census.south)}}},
                          {"poles",
                           {{"north", pole(rep.poles.north)},
                            {"south", pole(rep.poles.south)}}},
                          {"far_field_deviation", rep.far_field_deviation},
                          {"b_field_min_off_axis", rep.b_field_min_off_axis}};
}

inline void write_defect_report_json(const std::string& path, const DefectReport& rep) {
    detail::write_atomic(path, defect_report_json(rep).dump(2) + "\n");
}

inline void write_densities_csv(const std::string& path,
                                const std::vector<std::pair<std::string, DensitySamples>>&
                                    labeled) {
    std::string out("label,kind,radius,value,truncated\n");
    for (const auto& [label, s] : labeled) {
        const char* kind =
            s.kind == DensityKind::half_ball_theta ? "half_ball_theta" : "planar_xi";
        for (std::size_t k = 0; k < s.radii.size(); ++k)
            out += label + "," + kind + "," + detail::g17(s.radii[k]) + "," +
                   detail::g17(s.values[k]) + "," + (s.truncated ? "1" : "0") + "\n";
    }
    detail::write_atomic(path, out);
}

inline void write_ode_report_json(const std::string& path,
                                  const ClassificationReport& rep) {
    nlohmann::json shots = nlohmann::json::array();
    double max_drift = 0;
    for (const auto& o : rep.shots) {
        max_drift = std::max(max_drift, o.c_e_drift);
        shots.push_back({{"a", o.spec.a},
                         {"b", o.spec.b},
                         {"mismatch", o.mismatch},
                         {"c_e_drift", o.c_e_drift},
                         {"complete", o.complete}});
    }
    nlohmann::json j{{"tol", rep.tol},
                     {"only_constants_pass", rep.only_constants_pass},
                     {"max_c_e_drift", max_drift},
                     {"shots", shots}};
    detail::write_atomic(path, j.dump(2) + "\n");
}

}  // namespace boojum

#endif
