#ifndef BOOJUM_GRID_HPP
#define BOOJUM_GRID_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

// Boundary-fitted grid for the meridian half-plane outside the unit disk.
// Curvilinear coordinates (r, theta_hat) with rho = r sin, z = r cos map the
// domain to the rectangle [1, R_out] x [0, pi]. Radial lines include both
// endpoints and stretch geometrically; polar rows are cell-centered, which
// keeps every node off the z-axis.

namespace boojum {

struct GridConfig {
    int n_radial = 64;
    int n_polar = 128;
    double outer_radius = 20.0;
    double grading = 1.05;

    void validate() const {
        if (n_radial < 2) throw std::invalid_argument("grid.n_radial: must be >= 2");
        if (n_polar < 4) throw std::invalid_argument("grid.n_polar: must be >= 4");
        if (!(outer_radius > 1.0))
            throw std::invalid_argument("grid.outer_radius: must be > 1");
        if (!(grading >= 1.0)) throw std::invalid_argument("grid.grading: must be >= 1");
    }
};

enum class NodeTag : std::uint8_t {
    interior,
    colloid_boundary,
    far_field,
    near_axis_north,
    near_axis_south,
};

inline const char* tag_name(NodeTag t) {
    switch (t) {
        case NodeTag::interior: return "interior";
        case NodeTag::colloid_boundary: return "colloid_boundary";
        case NodeTag::far_field: return "far_field";
        case NodeTag::near_axis_north: return "near_axis_north";
        case NodeTag::near_axis_south: return "near_axis_south";
    }
    return "?";
}

struct MeridianGrid {
    GridConfig cfg;
    std::vector<double> radii;   // size n_radial + 1, radii[0] = 1, back() = R_out
    std::vector<double> thetas;  // size n_polar, theta_j = (j + 1/2) pi / n_polar

    // per-node arrays, node id = i * n_polar + j (i radial, j polar)
    std::vector<double> r, theta, rho, z;
    std::vector<double> cell_weights;    // exact moments of rho drho dz per dual cell
    std::vector<double> planar_weights;  // exact moments of drho dz (no metric factor)
    std::vector<NodeTag> tags;

    std::vector<double> surface_weights;  // size n_polar, integrates (.) dz on r = 1

    int n_r() const { return static_cast<int>(radii.size()) - 1; }
    int n_t() const { return static_cast<int>(thetas.size()); }
    int index(int i, int j) const { return i * n_t() + j; }
    std::size_t count() const { return r.size(); }
};

inline MeridianGrid build_grid(const GridConfig& cfg) {
    cfg.validate();
    MeridianGrid g;
    g.cfg = cfg;

    const int nr = cfg.n_radial, np = cfg.n_polar;
    const double R = cfg.outer_radius, q = cfg.grading;

    g.radii.resize(nr + 1);
    const double h0 =
        q > 1.0 ? (R - 1.0) * (q - 1.0) / (std::pow(q, nr) - 1.0) : (R - 1.0) / nr;
    g.radii[0] = 1.0;
    double step = h0;
    for (int i = 1; i < nr; ++i) {
        g.radii[i] = g.radii[i - 1] + step;
        step *= q;
    }
    g.radii[nr] = R;  // exact endpoint

    const double dth = M_PI / np;
    g.thetas.resize(np);
    for (int j = 0; j < np; ++j) g.thetas[j] = (j + 0.5) * dth;

    // dual-cell radial moments: int r^2 dr over [a, b], half cells at the ends
    std::vector<double> rmom(nr + 1), rmom_planar(nr + 1);
    for (int i = 0; i <= nr; ++i) {
        const double a = i == 0 ? 1.0 : 0.5 * (g.radii[i - 1] + g.radii[i]);
        const double b = i == nr ? R : 0.5 * (g.radii[i] + g.radii[i + 1]);
        rmom[i] = (b * b * b - a * a * a) / 3.0;
        rmom_planar[i] = 0.5 * (b * b - a * a);
    }
    // polar cell moments: int sin dtheta over [j dth, (j+1) dth]
    std::vector<double> tmom(np);
    for (int j = 0; j < np; ++j) tmom[j] = std::cos(j * dth) - std::cos((j + 1) * dth);

    const std::size_t n = static_cast<std::size_t>(nr + 1) * np;
    g.r.resize(n);
    g.theta.resize(n);
    g.rho.resize(n);
    g.z.resize(n);
    g.cell_weights.resize(n);
    g.planar_weights.resize(n);
    g.tags.assign(n, NodeTag::interior);

    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j < np; ++j) {
            const int k = g.index(i, j);
            g.r[k] = g.radii[i];
            g.theta[k] = g.thetas[j];
            g.rho[k] = g.radii[i] * std::sin(g.thetas[j]);
            g.z[k] = g.radii[i] * std::cos(g.thetas[j]);
            g.cell_weights[k] = rmom[i] * tmom[j];
            g.planar_weights[k] = rmom_planar[i] * dth;
            if (i == 0)
                g.tags[k] = NodeTag::colloid_boundary;
            else if (i == nr)
                g.tags[k] = NodeTag::far_field;
            else if (j == 0)
                g.tags[k] = NodeTag::near_axis_north;
            else if (j == np - 1)
                g.tags[k] = NodeTag::near_axis_south;
        }
    }

    g.surface_weights = tmom;  // on r = 1: dz = sin dtheta
    return g;
}

inline void write_grid_csv(const MeridianGrid& g, std::ostream& os) {
    os << "index,r,theta_hat,rho,z,tag\n";
    char buf[160];
    for (std::size_t k = 0; k < g.count(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%s\n", k, g.r[k],
                      g.theta[k], g.rho[k], g.z[k], tag_name(g.tags[k]));
        os << buf;
    }
}

}  // namespace boojum

#endif
