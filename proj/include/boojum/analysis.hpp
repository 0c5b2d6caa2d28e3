#ifndef BOOJUM_ANALYSIS_HPP
#define BOOJUM_ANALYSIS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "boojum/anchoring.hpp"
#include "boojum/energy.hpp"
#include "boojum/grid.hpp"
#include "boojum/tensor.hpp"

// Post-processing of converged fields into the observable defect structure:
// axis sign-change census, pole values and director limits, near-axis Taylor
// slopes, scaled energy densities, and far-field decay.

namespace boojum {

struct AxisJump {
    double r_location;  // midpoint of the two certain nodes straddling the flip
    double u2_before;
    double u2_after;
};

struct AxisSideCensus {
    std::vector<AxisJump> jumps;
    bool parity_odd = false;
    bool unresolved_layer = false;  // a |u2| <= 0.5 plateau wider than 3 nodes
};

struct AxisCensus {
    AxisSideCensus north;
    AxisSideCensus south;
};

/// scans the two near-axis rows radially for sign changes of u2, counting a
/// jump only between consecutive nodes of the |u2| > 0.5 subsequence so that
/// transition-layer interiors are not miscounted
inline AxisCensus axis_census(const UnitField& u, const MeridianGrid& g) {
    if (u.size() != g.count())
        throw std::invalid_argument("axis_census: field size does not match the grid");
    AxisCensus out;
    for (const int j : {0, g.n_t() - 1}) {
        AxisSideCensus& side = j == 0 ? out.north : out.south;
        double prev_u2 = 0, prev_r = 0;
        bool have_prev = false;
        int plateau = 0;
        for (int i = 0; i <= g.n_r(); ++i) {
            const double u2 = u[g.index(i, j)][1];
            if (std::abs(u2) <= 0.5) {
                if (++plateau > 3) side.unresolved_layer = true;
                continue;
            }
            plateau = 0;
            if (have_prev && prev_u2 * u2 < 0)
                side.jumps.push_back({0.5 * (prev_r + g.radii[i]), prev_u2, u2});
            prev_u2 = u2;
            prev_r = g.radii[i];
            have_prev = true;
        }
        side.parity_odd = side.jumps.size() % 2 == 1;
    }
    return out;
}

struct PoleSide {
    UVector value{};         // field at the boundary node nearest the pole
    double b = 0;            // b-field there
    bool boojum_value = false;  // within 1e-2 of (0,-1,0)
    std::vector<std::array<double, 2>> trace;  // (rho, |d - e_rho|), rho decreasing
};

struct PoleReport {
    PoleSide north;
    PoleSide south;
};

/// pole values plus the director deviation |d - e_rho| along the colloid
/// boundary row, ordered from the equator toward each pole
inline PoleReport pole_analysis(const UnitField& u, const MeridianGrid& g,
                                double tol = 1e-6) {
    if (u.size() != g.count())
        throw std::invalid_argument("pole_analysis: field size does not match the grid");
    PoleReport out;
    const int np = g.n_t();
    for (const bool north : {true, false}) {
        PoleSide& side = north ? out.north : out.south;
        const int j_pole = north ? 0 : np - 1;
        side.value = u[g.index(0, j_pole)];
        side.b = biaxiality_b(side.value).b;
        side.boojum_value = norm(side.value - UVector{0, -1, 0}) < 1e-2;
        for (int step = np / 2 - 1; step >= 0; --step) {
            const int j = north ? step : np - 1 - step;
            const std::size_t k = g.index(0, j);
            const auto d = director(u[k], tol);
            const double dev =
                std::sqrt((d.d_rho - 1) * (d.d_rho - 1) + d.d_phi * d.d_phi +
                          d.d_z * d.d_z);
            side.trace.push_back({g.rho[k], dev});
        }
    }
    return out;
}

struct ExpansionFit {
    double r = 0;           // radius of the line the fit lives on
    double slope_u1 = 0;    // expected ~2
    double slope_u2 = 0;    // of u2 + 1, expected ~2
    double slope_u3 = 0;    // expected ~1
    bool c_positive = false;  // sign of the fitted u2 + 1 coefficient
    bool flat = false;        // values at rounding level, fit degenerate
};

struct ExpansionSideReport {
    bool skipped = false;  // regular segment shorter than 3 interior lines
    std::vector<ExpansionFit> fits;
};

struct ExpansionReport {
    ExpansionSideReport north;
    ExpansionSideReport south;
};

/// log-log slopes of u1, u2+1, u3 against rho over the 4 near-axis columns,
/// on every radial line strictly between the colloid and the first axis jump
inline ExpansionReport near_axis_expansion_check(const UnitField& u,
                                                 const MeridianGrid& g) {
    if (u.size() != g.count())
        throw std::invalid_argument(
            "near_axis_expansion_check: field size does not match the grid");
    const AxisCensus census = axis_census(u, g);
    const int np = g.n_t();
    ExpansionReport out;
    for (const bool north : {true, false}) {
        ExpansionSideReport& side = north ? out.north : out.south;
        const auto& jumps = north ? census.north.jumps : census.south.jumps;
        const double r_stop =
            jumps.empty() ? g.cfg.outer_radius : jumps.front().r_location;

        std::vector<int> lines;
        for (int i = 1; i < g.n_r(); ++i)
            if (g.radii[i] < r_stop) lines.push_back(i);
        if (lines.size() < 3) {
            side.skipped = true;
            continue;
        }
        for (const int i : lines) {
            ExpansionFit fit;
            fit.r = g.radii[i];
            std::vector<double> lr(4), v1(4), v2(4), v3(4);
            bool flat = false;
            for (int m = 0; m < 4; ++m) {
                const int j = north ? m : np - 1 - m;
                const std::size_t k = g.index(i, j);
                const auto& v = u[k];
                if (std::abs(v[0]) < 1e-13 || std::abs(v[1] + 1) < 1e-13 ||
                    std::abs(v[2]) < 1e-13)
                    flat = true;
                lr[m] = g.rho[k];
                v1[m] = v[0];
                v2[m] = v[1] + 1.0;
                v3[m] = v[2];
            }
            fit.flat = flat;
            if (!flat) {
                fit.slope_u1 = detail::loglog_slope(lr, v1);
                fit.slope_u2 = detail::loglog_slope(lr, v2);
                fit.slope_u3 = detail::loglog_slope(lr, v3);
                double mean_u2p1 = 0;
                for (int m = 0; m < 4; ++m)
                    mean_u2p1 += u[g.index(i, north ? m : np - 1 - m)][1] + 1.0;
                fit.c_positive = mean_u2p1 > 0;
            }
            side.fits.push_back(fit);
        }
    }
    return out;
}

enum class DensityKind { half_ball_theta, planar_xi };

struct DensitySamples {
    DensityKind kind{};
    std::vector<double> radii;
    std::vector<double> values;
    bool truncated = false;  // some radius reaches past the domain boundary
};

/// scaled energy densities around a point of the meridian half-plane.
/// A center on the axis gives Theta(r) = r^-1 int_{B_r cap Omega} dens rho
/// (the global 2pi factor is omitted, consistently with the energy); an
/// off-axis center gives the planar Xi(r) = int_{D_r} dens drho dz.
/// Theta is taken in physical coordinates; near the poles this matches the
/// flattened-boundary gauge to first order in r.  Cells count as inside when
/// their centers are.
inline DensitySamples density_probe(const UnitField& u, const MeridianGrid& g,
                                    const EnergyModel& model,
                                    std::array<double, 2> center,
                                    std::vector<double> radii) {
    if (u.size() != g.count())
        throw std::invalid_argument("density_probe: field size does not match the grid");
    DensitySamples out;
    out.kind = std::abs(center[0]) <= 1e-12 ? DensityKind::half_ball_theta
                                            : DensityKind::planar_xi;
    out.radii = std::move(radii);
    // A half-ball at a surface point legitimately overlaps the colloid, so
    // Theta is only limited by the outer boundary; Xi needs the full disc.
    const double c_r = std::hypot(center[0], center[1]);
    const double reach = out.kind == DensityKind::half_ball_theta
                             ? g.cfg.outer_radius - c_r
                             : std::min(c_r - 1.0, g.cfg.outer_radius - c_r);
    const auto dens = model.elastic_axis_density(u);
    for (const double rad : out.radii) {
        if (rad > std::max(reach, 0.0) + 1e-12) out.truncated = true;
        double acc = 0;
        for (std::size_t k = 0; k < g.count(); ++k) {
            const double dx = g.rho[k] - center[0], dy = g.z[k] - center[1];
            if (dx * dx + dy * dy > rad * rad) continue;
            acc += dens[k] * (out.kind == DensityKind::half_ball_theta
                                  ? g.cell_weights[k]
                                  : g.planar_weights[k]);
        }
        out.values.push_back(out.kind == DensityKind::half_ball_theta ? acc / rad : acc);
    }
    return out;
}

/// max |u - (0,1,0)| over the outer half of the domain, excluding the row
/// that is pinned to that value anyway
inline double far_field_check(const UnitField& u, const MeridianGrid& g) {
    if (u.size() != g.count())
        throw std::invalid_argument("far_field_check: field size does not match the grid");
    double dev = 0;
    for (int i = 0; i < g.n_r(); ++i) {
        if (g.radii[i] < g.cfg.outer_radius / 2) continue;
        for (int j = 0; j < g.n_t(); ++j)
            dev = std::max(dev, norm(u[g.index(i, j)] - UVector{0, 1, 0}));
    }
    return dev;
}

struct DefectReport {
    UVector pole_value_north{};
    UVector pole_value_south{};
    AxisCensus census;
    PoleReport poles;
    double far_field_deviation = 0;
    double b_field_min_off_axis = 0;
};

inline DefectReport defect_report(const UnitField& u, const MeridianGrid& g,
                                  double director_tol = 1e-6) {
    DefectReport rep;
    rep.census = axis_census(u, g);
    rep.poles = pole_analysis(u, g, director_tol);
    rep.pole_value_north = rep.poles.north.value;
    rep.pole_value_south = rep.poles.south.value;
    rep.far_field_deviation = far_field_check(u, g);
    double bmin = 1e300;
    for (int i = 0; i <= g.n_r(); ++i)
        for (int j = 1; j < g.n_t() - 1; ++j)
            bmin = std::min(bmin, biaxiality_b(u[g.index(i, j)]).b);
    rep.b_field_min_off_axis = bmin;
    return rep;
}

/// director components on a uniform (rho, z) raster over [0,R] x [-R,R],
/// nearest-node sampled; raster points outside the domain are skipped
inline void write_director_raster_csv(const std::string& path, const UnitField& u,
                                      const MeridianGrid& g, int n_rho, int n_z,
                                      double director_tol = 1e-6) {
    if (u.size() != g.count())
        throw std::invalid_argument(
            "write_director_raster_csv: field size does not match the grid");
    if (n_rho < 2 || n_z < 2)
        throw std::invalid_argument("write_director_raster_csv: raster must be >= 2x2");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "rho,z,d_rho,d_phi,d_z,degenerate\n";
    const double R = g.cfg.outer_radius;
    const double dtheta = M_PI / g.n_t();
    char line[256];
    for (int a = 0; a < n_rho; ++a)
        for (int b = 0; b < n_z; ++b) {
            const double rho = R * a / (n_rho - 1);
            const double z = -R + 2.0 * R * b / (n_z - 1);
            const double r = std::hypot(rho, z);
            if (r < 1.0 || r > R) continue;
            const auto it =
                std::lower_bound(g.radii.begin(), g.radii.end(), r);
            int i = static_cast<int>(it - g.radii.begin());
            if (i > 0 && (i == g.n_r() + 1 ||
                          r - g.radii[i - 1] < g.radii[i] - r))
                --i;
            const double theta = std::atan2(rho, z);
            const int j = std::clamp(static_cast<int>(theta / dtheta), 0, g.n_t() - 1);
            const auto d = director(u[g.index(i, j)], director_tol);
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", rho,
                          z, d.d_rho, d.d_phi, d.d_z, int(d.degenerate));
            out << line;
        }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

}  // namespace boojum

#endif
