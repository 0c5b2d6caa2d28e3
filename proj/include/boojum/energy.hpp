#ifndef BOOJUM_ENERGY_HPP
#define BOOJUM_ENERGY_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "boojum/anchoring.hpp"
#include "boojum/grid.hpp"
#include "boojum/parallel.hpp"
#include "boojum/tensor.hpp"

// Discrete reduced energy
//   E_nu(u) = int { |Du|^2 + rho^-2 (4 u1^2 + u3^2) + sqrt2 mu (1 - 3 P(u)) } rho drho dz
//           + nu int_colloid |u - u_s|^2 dz
// on the curvilinear lattice, with |Du|^2 = |d_r u|^2 + r^-2 |d_theta u|^2.
// The gradient is the exact variation of the discrete energy, tangentially
// projected and pinned at the far-field Dirichlet row.

namespace boojum {

struct ModelParams {
    double nu = 1.0;  // normalized anchoring strength
    double mu = 1.0;  // bulk coupling

    void validate() const {
        if (!(nu > 0.0)) throw std::invalid_argument("model.nu: must be > 0");
        if (!(mu >= 0.0)) throw std::invalid_argument("model.mu: must be >= 0");
    }
};

using UnitField = std::vector<UVector>;

struct EnergyBreakdown {
    double elastic = 0;      // int |Du|^2 rho
    double axis_weight = 0;  // int rho^-2 (4 u1^2 + u3^2) rho
    double bulk = 0;         // int sqrt2 mu (1 - 3 P(u)) rho
    double surface = 0;      // nu int |u - u_s|^2 dz
    double total = 0;
};

inline UnitField symmetrize_u1(UnitField u) {
    for (auto& v : u) v[0] = std::abs(v[0]);
    return u;
}

namespace detail {

struct Stencil {
    std::array<int, 4> at{};   // line indices
    std::array<double, 4> c{};
    int n = 0;
};

/// first-derivative weights of the quadratic through (x0,x1,x2), at x = t
inline std::array<double, 3> d1_weights(double x0, double x1, double x2, double t) {
    return {(2 * t - x1 - x2) / ((x0 - x1) * (x0 - x2)),
            (2 * t - x0 - x2) / ((x1 - x0) * (x1 - x2)),
            (2 * t - x0 - x1) / ((x2 - x0) * (x2 - x1))};
}

inline std::array<double, 3> d2_weights(double x0, double x1, double x2) {
    return {2.0 / ((x0 - x1) * (x0 - x2)), 2.0 / ((x1 - x0) * (x1 - x2)),
            2.0 / ((x2 - x0) * (x2 - x1))};
}

struct TransposeEntry {
    std::array<int, 8> at{};
    std::array<double, 8> c{};
    int n = 0;
};

}  // namespace detail

class EnergyModel {
public:
    EnergyModel(MeridianGrid grid, const AnchoringProfile& profile, ModelParams params,
                int threads = 1)
        : g_(std::move(grid)), p_(params), threads_(threads) {
        p_.validate();
        us_ = align_to_grid(profile, g_);
        build_stencils();
    }

    const MeridianGrid& grid() const { return g_; }
    const ModelParams& params() const { return p_; }
    const std::vector<UVector>& boundary_anchoring() const { return us_; }
    int threads() const { return threads_; }

    EnergyModel with_nu(double nu) const {
        EnergyModel m = *this;
        m.p_.nu = nu;
        m.p_.validate();
        return m;
    }

    EnergyBreakdown eval_energy(const UnitField& u) const {
        check_size(u);
        const std::size_t n = g_.count();
        const std::size_t nchunks = (n + kChunk - 1) / kChunk;
        std::vector<double> pe(nchunks, 0.0), pa(nchunks, 0.0), pb(nchunks, 0.0);
        const double mu = p_.mu;
        for_chunks(n, kChunk, threads_, [&](std::size_t c, std::size_t b, std::size_t e) {
            double se = 0, sa = 0, sb = 0;
            for (std::size_t k = b; k < e; ++k) {
                const auto [dr, dt] = first_derivatives(u, k);
                const double w = g_.cell_weights[k];
                const double r2 = g_.r[k] * g_.r[k];
                const double rho2 = g_.rho[k] * g_.rho[k];
                se += w * (dot(dr, dr) + dot(dt, dt) / r2);
                const auto& v = u[k];
                sa += w * (4.0 * v[0] * v[0] + v[2] * v[2]) / rho2;
                sb += w * sqrt2 * mu * (1.0 - 3.0 * eval_P(v));
            }
            pe[c] = se;
            pa[c] = sa;
            pb[c] = sb;
        });
        EnergyBreakdown out;
        out.elastic = pairwise_sum(std::move(pe));
        out.axis_weight = pairwise_sum(std::move(pa));
        out.bulk = pairwise_sum(std::move(pb));
        double ss = 0;
        for (int j = 0; j < g_.n_t(); ++j) {
            const UVector d = u[g_.index(0, j)] - us_[j];
            ss += g_.surface_weights[j] * dot(d, d);
        }
        out.surface = p_.nu * ss;
        out.total = out.elastic + out.axis_weight + out.bulk + out.surface;
        return out;
    }

    /// d(total)/d(u[k]), tangentially projected; identically zero on the
    /// far-field Dirichlet row
    UnitField eval_gradient(const UnitField& u) const {
        check_size(u);
        const std::size_t n = g_.count();
        UnitField tr(n), tt(n), g(n);
        for_chunks(n, kChunk, threads_, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                const auto [dr, dt] = first_derivatives(u, k);
                const double w2 = 2.0 * g_.cell_weights[k];
                tr[k] = w2 * dr;
                tt[k] = (w2 / (g_.r[k] * g_.r[k])) * dt;
            }
        });
        const int np = g_.n_t();
        const double mu = p_.mu;
        for_chunks(n, kChunk, threads_, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                const int i = static_cast<int>(k) / np, j = static_cast<int>(k) % np;
                if (i == g_.n_r()) {  // pinned far-field data
                    g[k] = {0, 0, 0};
                    continue;
                }
                UVector acc = {0, 0, 0};
                const auto& rt = rad_transpose_[i];
                for (int m = 0; m < rt.n; ++m)
                    acc = acc + rt.c[m] * tr[g_.index(rt.at[m], j)];
                const auto& pt = pol_transpose_[j];
                for (int m = 0; m < pt.n; ++m)
                    acc = acc + pt.c[m] * tt[g_.index(i, pt.at[m])];

                const auto& v = u[k];
                const double w = g_.cell_weights[k];
                const double rho2 = g_.rho[k] * g_.rho[k];
                acc[0] += w * 8.0 * v[0] / rho2;
                acc[2] += w * 2.0 * v[2] / rho2;
                acc = acc - (3.0 * sqrt2 * mu * w) * grad_P(v);
                if (i == 0) acc = acc + (2.0 * p_.nu * g_.surface_weights[j]) * (v - us_[j]);
                g[k] = acc - dot(acc, v) * v;
            }
        });
        return g;
    }

    /// pointwise strong-form defect of the stationarity system; zero on the
    /// colloid and far-field rows (their conditions live in robin_residual
    /// and the Dirichlet pinning)
    std::vector<double> el_residual(const UnitField& u) const {
        check_size(u);
        const std::size_t n = g_.count();
        std::vector<double> res(n, 0.0);
        const int np = g_.n_t();
        const double mu = p_.mu;
        for_chunks(n, kChunk, threads_, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                const int i = static_cast<int>(k) / np;
                if (i == 0 || i == g_.n_r()) continue;
                const int j = static_cast<int>(k) % np;
                const auto [dr, dt] = first_derivatives(u, k);
                UVector drr = {0, 0, 0}, dtt = {0, 0, 0};
                const auto& s2r = rad_d2_[i];
                for (int m = 0; m < s2r.n; ++m)
                    drr = drr + s2r.c[m] * u[g_.index(s2r.at[m], j)];
                const auto& s2t = pol_d2_[j];
                for (int m = 0; m < s2t.n; ++m)
                    dtt = dtt + s2t.c[m] * u[g_.index(i, s2t.at[m])];

                const double r = g_.r[k], r2 = r * r;
                const double cot = g_.z[k] / g_.rho[k];  // cos/sin
                const double rho2 = g_.rho[k] * g_.rho[k];
                const auto& v = u[k];
                // -(1/rho) D.(rho D u) = -(u_rr + 2/r u_r + r^-2 (u_tt + cot u_t))
                UVector lap = drr + (2.0 / r) * dr + (1.0 / r2) * (dtt + cot * dt);
                const double elast = dot(dr, dr) + dot(dt, dt) / r2;
                const double axis = (4.0 * v[0] * v[0] + v[2] * v[2]) / rho2;
                const double lam = elast + axis - 4.5 * sqrt2 * mu * eval_P(v);
                UVector lhs = {-lap[0] + 4.0 * v[0] / rho2, -lap[1],
                               -lap[2] + v[2] / rho2};
                lhs = lhs - (1.5 * sqrt2 * mu) * grad_P(v) - lam * v;
                res[k] = norm(lhs);
            }
        });
        return res;
    }

    /// |(-d_r u) - nu [u_s - (u_s . u) u]| per colloid-boundary node; the
    /// outward domain normal at r = 1 points into the colloid
    std::vector<double> robin_residual(const UnitField& u) const {
        check_size(u);
        std::vector<double> res(g_.n_t(), 0.0);
        for (int j = 0; j < g_.n_t(); ++j) {
            const std::size_t k = g_.index(0, j);
            UVector dr = {0, 0, 0};
            const auto& st = rad_d1_[0];
            for (int m = 0; m < st.n; ++m) dr = dr + st.c[m] * u[g_.index(st.at[m], j)];
            const auto& v = u[k];
            const UVector rhs = p_.nu * (us_[j] - dot(us_[j], v) * v);
            res[j] = norm((-1.0 * dr) - rhs);
        }
        return res;
    }

    /// |Du|^2 + rho^-2 (4 u1^2 + u3^2) per node, for the density probes
    std::vector<double> elastic_axis_density(const UnitField& u) const {
        check_size(u);
        const std::size_t n = g_.count();
        std::vector<double> d(n);
        for_chunks(n, kChunk, threads_, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                const auto [dr, dt] = first_derivatives(u, k);
                const auto& v = u[k];
                d[k] = dot(dr, dr) + dot(dt, dt) / (g_.r[k] * g_.r[k]) +
                       (4.0 * v[0] * v[0] + v[2] * v[2]) / (g_.rho[k] * g_.rho[k]);
            }
        });
        return d;
    }

    double grad_inf_norm(const UnitField& g) const {
        double m = 0;
        for (const auto& v : g)
            m = std::max({m, std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
        return m;
    }

private:
    static constexpr std::size_t kChunk = 2048;

    MeridianGrid g_;
    std::vector<UVector> us_;
    ModelParams p_;
    int threads_;

    std::vector<detail::Stencil> rad_d1_, pol_d1_, rad_d2_, pol_d2_;
    std::vector<detail::TransposeEntry> rad_transpose_, pol_transpose_;

    void check_size(const UnitField& u) const {
        if (u.size() != g_.count())
            throw std::invalid_argument("field size does not match the grid");
    }

    std::pair<UVector, UVector> first_derivatives(const UnitField& u, std::size_t k) const {
        const int np = g_.n_t();
        const int i = static_cast<int>(k) / np, j = static_cast<int>(k) % np;
        UVector dr = {0, 0, 0}, dt = {0, 0, 0};
        const auto& sr = rad_d1_[i];
        for (int m = 0; m < sr.n; ++m) dr = dr + sr.c[m] * u[g_.index(sr.at[m], j)];
        const auto& st = pol_d1_[j];
        for (int m = 0; m < st.n; ++m) dt = dt + st.c[m] * u[g_.index(i, st.at[m])];
        return {dr, dt};
    }

    void build_stencils() {
        const int nr = g_.n_r(), np = g_.n_t();
        const auto& x = g_.radii;
        rad_d1_.resize(nr + 1);
        rad_d2_.resize(nr + 1);
        for (int i = 0; i <= nr; ++i) {
            const int base = i == 0 ? 0 : (i == nr ? nr - 2 : i - 1);
            const auto w1 =
                detail::d1_weights(x[base], x[base + 1], x[base + 2], x[i]);
            const auto w2 = detail::d2_weights(x[base], x[base + 1], x[base + 2]);
            for (int m = 0; m < 3; ++m) {
                rad_d1_[i].at[m] = rad_d2_[i].at[m] = base + m;
                rad_d1_[i].c[m] = w1[m];
                rad_d2_[i].c[m] = w2[m];
            }
            rad_d1_[i].n = rad_d2_[i].n = 3;
        }

        const double h = M_PI / np;
        pol_d1_.resize(np);
        pol_d2_.resize(np);
        for (int j = 0; j < np; ++j) {
            const int base = j == 0 ? 0 : (j == np - 1 ? np - 3 : j - 1);
            const auto w1 = detail::d1_weights(0.0, h, 2 * h, (j - base) * h);
            for (int m = 0; m < 3; ++m) {
                pol_d1_[j].at[m] = base + m;
                pol_d1_[j].c[m] = w1[m];
            }
            pol_d1_[j].n = 3;

            auto& s2 = pol_d2_[j];
            if (j == 0) {  // one-sided, second order
                s2.n = 4;
                const double c[4] = {2, -5, 4, -1};
                for (int m = 0; m < 4; ++m) {
                    s2.at[m] = m;
                    s2.c[m] = c[m] / (h * h);
                }
            } else if (j == np - 1) {
                s2.n = 4;
                const double c[4] = {-1, 4, -5, 2};
                for (int m = 0; m < 4; ++m) {
                    s2.at[m] = np - 4 + m;
                    s2.c[m] = c[m] / (h * h);
                }
            } else {
                s2.n = 3;
                const auto w2 = detail::d2_weights(-h, 0.0, h);
                for (int m = 0; m < 3; ++m) {
                    s2.at[m] = j - 1 + m;
                    s2.c[m] = w2[m];
                }
            }
        }

        rad_transpose_.assign(nr + 1, {});
        for (int i = 0; i <= nr; ++i)
            for (int m = 0; m < rad_d1_[i].n; ++m) {
                auto& t = rad_transpose_[rad_d1_[i].at[m]];
                t.at[t.n] = i;
                t.c[t.n] = rad_d1_[i].c[m];
                ++t.n;
            }
        pol_transpose_.assign(np, {});
        for (int j = 0; j < np; ++j)
            for (int m = 0; m < pol_d1_[j].n; ++m) {
                auto& t = pol_transpose_[pol_d1_[j].at[m]];
                t.at[t.n] = j;
                t.c[t.n] = pol_d1_[j].c[m];
                ++t.n;
            }
    }
};

}  // namespace boojum

#endif
