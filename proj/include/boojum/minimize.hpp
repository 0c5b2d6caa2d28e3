#ifndef BOOJUM_MINIMIZE_HPP
#define BOOJUM_MINIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "boojum/energy.hpp"

// Tangent-projected gradient descent with renormalization.  Each accepted
// step is u <- normalize(u - tau g); tau comes from a secant (Barzilai-Borwein)
// estimate or a fixed base step, safeguarded by backtracking until the energy
// strictly decreases.  The far-field row stays pinned at (0,1,0) because its
// gradient entries are identically zero.

namespace boojum {

enum class StepRule { fixed, adaptive_secant };
enum class InitMode { meridian_rotation, perturbed, from_checkpoint };

struct SolveConfig {
    int max_iters = 2000;
    double grad_tol = 1e-6;  // infinity norm of the projected gradient
    StepRule step_rule = StepRule::adaptive_secant;
    int restarts = 0;
    double perturbation_scale = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> continuation_nus;

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("solver.max_iters: must be >= 1");
        if (!(grad_tol > 0.0)) throw std::invalid_argument("solver.grad_tol: must be > 0");
        if (restarts < 0) throw std::invalid_argument("solver.restarts: must be >= 0");
        if (!(perturbation_scale >= 0.0))
            throw std::invalid_argument("solver.perturbation_scale: must be >= 0");
    }
};

struct SolveResult {
    UnitField field;
    EnergyBreakdown breakdown;
    int iterations = 0;
    bool converged = false;
    std::vector<double> energy_history;  // E(u0), then one entry per accepted step
};

/// tangential Gaussian noise of the given scale, renormalized; the far-field
/// row is re-pinned afterwards
inline UnitField perturb_tangential(UnitField u, const MeridianGrid& g, double scale,
                                    std::uint64_t seed) {
    if (scale == 0.0) return u;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const UVector t = {nd(rng), nd(rng), nd(rng)};
        const UVector tan = t - dot(t, u[k]) * u[k];
        u[k] = normalized(u[k] + scale * tan);
    }
    for (int j = 0; j < g.n_t(); ++j) u[g.index(g.n_r(), j)] = {0.0, 1.0, 0.0};
    return u;
}

/// meridian_rotation: u(r) = (sin eta, cos eta, 0), eta = pi (R-r)/(R-1),
/// sweeping from (0,-1,0) at the colloid to the pinned (0,1,0) far field
/// through (1,0,0), so the first component starts out nonnegative
inline UnitField initial_field(const MeridianGrid& g, InitMode mode,
                               const SolveConfig& cfg) {
    if (mode == InitMode::from_checkpoint)
        throw std::invalid_argument(
            "initial_field: from_checkpoint is resolved by the io layer");
    if (mode != InitMode::meridian_rotation && mode != InitMode::perturbed)
        throw std::invalid_argument("initial_field: unknown mode");

    const double R = g.cfg.outer_radius;
    UnitField u(g.count());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double eta = M_PI * (R - g.r[k]) / (R - 1.0);
        u[k] = {std::sin(eta), std::cos(eta), 0.0};
    }
    for (int j = 0; j < g.n_t(); ++j) u[g.index(g.n_r(), j)] = {0.0, 1.0, 0.0};
    if (mode == InitMode::perturbed && cfg.perturbation_scale > 0.0)
        u = perturb_tangential(std::move(u), g, cfg.perturbation_scale, cfg.seed);
    return u;
}

namespace detail {

inline double field_dot(const UnitField& a, const UnitField& b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += dot(a[k], b[k]);
    return s;
}

inline SolveResult descend(const EnergyModel& model, UnitField u,
                           const SolveConfig& cfg) {
    constexpr double kBaseStep = 1e-3;
    constexpr int kMaxBacktracks = 30;

    SolveResult out;
    double energy = model.eval_energy(u).total;
    if (!std::isfinite(energy))
        throw std::invalid_argument("solve: non-finite energy at the initial field");
    UnitField grad = model.eval_gradient(u);
    out.energy_history.push_back(energy);

    UnitField u_prev, g_prev;
    bool have_prev = false;
    while (out.iterations < cfg.max_iters) {
        if (model.grad_inf_norm(grad) <= cfg.grad_tol) {
            out.converged = true;
            break;
        }
        double tau = kBaseStep;
        if (cfg.step_rule == StepRule::adaptive_secant && have_prev) {
            UnitField s(u.size()), y(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) {
                s[k] = u[k] - u_prev[k];
                y[k] = grad[k] - g_prev[k];
            }
            const double sy = field_dot(s, y);
            if (sy > 0.0) {
                const double bb = field_dot(s, s) / sy;
                if (std::isfinite(bb)) tau = std::clamp(bb, 1e-8, 1e4);
            }
        }

        bool accepted = false;
        UnitField u_trial(u.size());
        for (int bt = 0; bt <= kMaxBacktracks; ++bt, tau *= 0.5) {
            for (std::size_t k = 0; k < u.size(); ++k)
                u_trial[k] = normalized(u[k] - tau * grad[k]);
            const double e_trial = model.eval_energy(u_trial).total;
            if (std::isfinite(e_trial) && e_trial < energy) {
                u_prev = std::move(u);
                g_prev = std::move(grad);
                have_prev = true;
                u = std::move(u_trial);
                u_trial.resize(u.size());
                energy = e_trial;
                grad = model.eval_gradient(u);
                out.energy_history.push_back(energy);
                ++out.iterations;
                accepted = true;
                break;
            }
        }
        if (!accepted) {  // line search exhausted: report instead of looping
            out.converged = model.grad_inf_norm(grad) <= cfg.grad_tol;
            break;
        }
    }
    if (out.iterations >= cfg.max_iters)
        out.converged = model.grad_inf_norm(grad) <= cfg.grad_tol;

    out.field = std::move(u);
    out.breakdown = model.eval_energy(out.field);
    return out;
}

}  // namespace detail

/// minimize from u0; with cfg.restarts > 0, also descend from that many
/// seeded tangential perturbations of u0 and keep the lowest-energy result
inline SolveResult solve(const UnitField& u0, const MeridianGrid& grid,
                         const AnchoringProfile& profile, ModelParams params,
                         const SolveConfig& cfg, int threads = 1) {
    cfg.validate();
    params.validate();
    const EnergyModel model(grid, profile, params, threads);
    if (u0.size() != grid.count())
        throw std::invalid_argument("solve: u0 size does not match the grid");
    for (const auto& v : u0)
        if (!(std::abs(norm(v) - 1.0) < 1e-8))
            throw std::invalid_argument("solve: u0 is not unit-norm");

    SolveResult best = detail::descend(model, u0, cfg);
    for (int k = 1; k <= cfg.restarts; ++k) {
        const UnitField uk =
            perturb_tangential(u0, grid, cfg.perturbation_scale, cfg.seed + k);
        SolveResult r = detail::descend(model, uk, cfg);
        if (r.breakdown.total < best.breakdown.total) best = std::move(r);
    }
    return best;
}

/// ascending sweep over cfg.continuation_nus, warm-starting each solve from
/// the previous minimizer; the first starts from meridian_rotation
inline std::vector<SolveResult> continuation(const MeridianGrid& grid,
                                             const AnchoringProfile& profile,
                                             ModelParams params, const SolveConfig& cfg,
                                             int threads = 1) {
    cfg.validate();
    if (cfg.continuation_nus.empty())
        throw std::invalid_argument("solver.continuation_nus: must be nonempty");
    for (std::size_t i = 1; i < cfg.continuation_nus.size(); ++i)
        if (!(cfg.continuation_nus[i] > cfg.continuation_nus[i - 1]))
            throw std::invalid_argument("solver.continuation_nus: must be ascending");

    std::vector<SolveResult> out;
    UnitField start = initial_field(grid, InitMode::meridian_rotation, cfg);
    for (const double nu : cfg.continuation_nus) {
        params.nu = nu;
        try {
            out.push_back(solve(start, grid, profile, params, cfg, threads));
        } catch (const std::exception& e) {
            throw std::runtime_error("continuation at nu=" + std::to_string(nu) + ": " +
                                     e.what());
        }
        start = out.back().field;
    }
    return out;
}

}  // namespace boojum

#endif
