// Acceptance battery: one line per criterion, exit 0 only if every line passes.
//
// Criteria 3-8 and 10 probe the converged state of the pinned protocol (cold
// meridian start, 64x128, R=20, nu=1, mu=1).  That run lands on the branch
// with one axis crossing per side (near r = 2), but its pole nodes settle at
// the Robin balance (~(0, -0.94, 0.33)) instead of locking to the preferred
// (0, -1, 0): aligning a pole patch of radius r gains surface energy ~nu r^2
// while costing elastic energy ~r, so at nu = 1 no resolvable patch aligns
// fully.  Criteria 3, 5 and 8 test exactly that pole-locking signature and
// fail with the margins shown; at nu = 5 the same protocol locks the poles
// (deviation ~7e-3, pole density ratio ~4e-3) and all three clear.  The
// defaults stay at nu = 1 rather than tuning the protocol to the test; the
// notes report the defect-free competing branch, the lower minimum at nu = 1.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "boojum/analysis.hpp"
#include "boojum/minimize.hpp"
#include "boojum/tangent_ode.hpp"

using namespace boojum;

namespace {

constexpr int kThreads = 8;

double now_s() {
    using clk = std::chrono::steady_clock;
    static const clk::time_point t0 = clk::now();
    return std::chrono::duration<double>(clk::now() - t0).count();
}

bool g_all_pass = true;

void line(int n, bool pass, const char* fmt, ...) {
    g_all_pass = g_all_pass && pass;
    std::printf("criterion %d: %s — ", n, pass ? "PASS" : "FAIL");
    va_list ap;
    va_start(ap, fmt);
    std::vprintf(fmt, ap);
    va_end(ap);
    std::printf("\n");
    std::fflush(stdout);
}

UVector random_unit_u(std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    return normalized({nd(rng), nd(rng), nd(rng)});
}

// bilinear transfer of a coarse field onto a finer grid, far-field row pinned
UnitField prolong(const UnitField& uc, const MeridianGrid& gc, const MeridianGrid& gf) {
    UnitField uf(gf.count());
    for (int i = 0; i <= gf.n_r(); ++i)
        for (int j = 0; j < gf.n_t(); ++j) {
            const double r = gf.radii[i], th = gf.thetas[j];
            int ic = int(std::lower_bound(gc.radii.begin(), gc.radii.end(), r) -
                         gc.radii.begin()) -
                     1;
            ic = std::clamp(ic, 0, gc.n_r() - 1);
            const double tr = (r - gc.radii[ic]) / (gc.radii[ic + 1] - gc.radii[ic]);
            const double dthc = gc.thetas[1] - gc.thetas[0];
            int jc = int(std::floor((th - gc.thetas[0]) / dthc));
            jc = std::clamp(jc, 0, gc.n_t() - 2);
            const double tt = std::clamp((th - gc.thetas[jc]) / dthc, 0.0, 1.0);
            UVector v{};
            for (int c = 0; c < 3; ++c) {
                const double a =
                    (1 - tr) * uc[gc.index(ic, jc)][c] + tr * uc[gc.index(ic + 1, jc)][c];
                const double b = (1 - tr) * uc[gc.index(ic, jc + 1)][c] +
                                 tr * uc[gc.index(ic + 1, jc + 1)][c];
                v[c] = (1 - tt) * a + tt * b;
            }
            const double n = norm(v);
            uf[gf.index(i, j)] =
                n > 0 ? UVector{v[0] / n, v[1] / n, v[2] / n} : UVector{0, 1, 0};
        }
    for (int j = 0; j < gf.n_t(); ++j) uf[gf.index(gf.n_r(), j)] = {0, 1, 0};
    return uf;
}

void criterion_1() {
    const double t0 = now_s();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ang(0, 2 * M_PI);
    std::normal_distribution<double> nd;

    double worst_red = 0;
    for (int k = 0; k < 100000; ++k) {
        const UVector u = random_unit_u(rng);
        const double phi = ang(rng);
        worst_red = std::max(worst_red, std::abs(eval_S(augment(u, phi)) - eval_P(u)));
    }

    double worst_tr = 0, worst_spec = 0;
    for (int k = 0; k < 100000; ++k) {
        const UVector u = random_unit_u(rng);
        const auto e = eigenvalues(u);
        worst_tr = std::max(worst_tr, std::abs(e.lam1 + e.lam2 + e.lam3));
        const auto se = sym_eigen(reconstruct_Q(u, ang(rng)));
        std::array<double, 3> an{e.lam1, e.lam2, e.lam3};
        std::sort(an.begin(), an.end());
        for (int i = 0; i < 3; ++i)
            worst_spec = std::max(worst_spec, std::abs(se.vals[i] - an[i]));
    }

    double overshoot = 0;
    for (int k = 0; k < 1000000; ++k) {
        WVector w;
        double n2 = 0;
        for (double& c : w) {
            c = nd(rng);
            n2 += c * c;
        }
        const double n = std::sqrt(n2);
        for (double& c : w) c /= n;
        overshoot = std::max(overshoot, std::abs(eval_S(w)) - 1.0 / 3.0);
    }

    const double dt = now_s() - t0;
    line(1,
         worst_red < 1e-12 && worst_tr < 1e-10 && worst_spec < 1e-10 &&
             overshoot < 1e-12 && dt < 10.0,
         "reduction worst %.2e (<1e-12), trace worst %.2e, spectrum worst %.2e "
         "(<1e-10), |S|-1/3 overshoot %.2e, %.1fs (<10s)",
         worst_red, worst_tr, worst_spec, overshoot, dt);
}

void criterion_2() {
    const double t0 = now_s();
    const auto g = build_grid({12, 24, 4.0, 1.1});
    const auto prof = default_profile({M_PI / 2, M_PI / 4}, g);
    const EnergyModel model(g, prof, {0.8, 0.7}, kThreads);

    std::mt19937_64 rng(42);
    std::normal_distribution<double> nd;
    UnitField u(g.count());
    for (auto& v : u) v = random_unit_u(rng);
    for (int j = 0; j < g.n_t(); ++j) u[g.index(g.n_r(), j)] = {0, 1, 0};

    const auto grad = model.eval_gradient(u);
    const double h = 1e-6;
    double worst = 0;
    for (int trial = 0; trial < 120; ++trial) {
        UnitField dir(g.count(), {0, 0, 0});
        for (std::size_t k = 0; k < g.count(); ++k) {
            if (static_cast<int>(k) / g.n_t() == g.n_r()) continue;
            const UVector t{nd(rng), nd(rng), nd(rng)};
            dir[k] = t - dot(t, u[k]) * u[k];
        }
        double an = 0;
        for (std::size_t k = 0; k < g.count(); ++k) an += dot(grad[k], dir[k]);
        auto energy_at = [&](double s) {
            UnitField v = u;
            for (std::size_t k = 0; k < g.count(); ++k)
                v[k] = normalized(v[k] + s * dir[k]);
            return model.eval_energy(v).total;
        };
        const double fd = (energy_at(h) - energy_at(-h)) / (2 * h);
        worst = std::max(worst, std::abs(fd - an) / std::max(1e-8, std::abs(an)));
    }
    const double dt = now_s() - t0;
    line(2, worst < 1e-6 && dt < 30.0,
         "gradient vs central differences, 120 directions, worst relative error "
         "%.2e (<1e-6), %.1fs (<30s)",
         worst, dt);
}

void criterion_9() {
    const double t0 = now_s();
    const auto rep = shoot_classify(default_shot_grid(), 1e-5, 1e-2, 1e-10, kThreads);
    double zero = -1, min_nonzero = 1e300, max_drift = 0;
    bool all_complete = true;
    for (const auto& o : rep.shots) {
        all_complete = all_complete && o.complete;
        max_drift = std::max(max_drift, o.c_e_drift);
        if (o.spec.a == 0 && o.spec.b == 0)
            zero = o.mismatch;
        else
            min_nonzero = std::min(min_nonzero, o.mismatch);
    }
    const double dt = now_s() - t0;
    line(9,
         all_complete && zero >= 0 && zero < 1e-8 && min_nonzero > 1e-5 &&
             max_drift < 1e-8 && dt < 10.0,
         "zero-shot mismatch %.2e (<1e-8), min nonzero mismatch over 64 shots "
         "%.2e (>1e-5), max C_e drift %.2e (<1e-8), %.1fs (<10s)",
         zero, min_nonzero, max_drift, dt);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();

    const ModelParams mp{1.0, 1.0};
    SolveConfig scfg;
    scfg.max_iters = 300000;
    scfg.grad_tol = 1e-6;

    std::fprintf(stderr, "[%.0fs] solving pinned protocol (64x128, R=20)...\n", now_s());
    const auto g64 = build_grid({64, 128, 20.0, 1.05});
    const auto p64 = default_profile({M_PI / 2, M_PI / 4}, g64);
    const auto rA = solve(initial_field(g64, InitMode::meridian_rotation, scfg), g64,
                          p64, mp, scfg, kThreads);
    const auto& u = rA.field;
    const EnergyModel model64(g64, p64, mp, kThreads);
    std::printf("note: pinned protocol converged=%d E=%.9f iterations=%d\n",
                int(rA.converged), rA.breakdown.total, rA.iterations);

    // 3: boundary nodes nearest the poles vs (0,-1,0)
    const int np = g64.n_t();
    const double dev_n = norm(u[g64.index(0, 0)] - UVector{0, -1, 0});
    const double dev_s = norm(u[g64.index(0, np - 1)] - UVector{0, -1, 0});
    line(3, rA.converged && dev_n < 1e-2 && dev_s < 1e-2,
         "pole-node deviation from (0,-1,0): north %.6f, south %.6f (<0.01)", dev_n,
         dev_s);

    // 4: odd axis parity, preserved under one refinement
    const auto cen = axis_census(u, g64);
    std::fprintf(stderr, "[%.0fs] refining to 128x256...\n", now_s());
    const auto g128 = build_grid({128, 256, 20.0, std::sqrt(1.05)});
    const auto p128 = default_profile({M_PI / 2, M_PI / 4}, g128);
    const auto rF = solve(prolong(u, g64, g128), g128, p128, mp, scfg, kThreads);
    const auto cenF = axis_census(rF.field, g128);
    std::printf("note: refined solve converged=%d E=%.9f iterations=%d\n",
                int(rF.converged), rF.breakdown.total, rF.iterations);
    line(4,
         cen.north.parity_odd && cen.south.parity_odd && cenF.north.parity_odd &&
             cenF.south.parity_odd,
         "axis jumps 64x128 N=%zu S=%zu, 128x256 N=%zu S=%zu (all parities odd)",
         cen.north.jumps.size(), cen.south.jumps.size(), cenF.north.jumps.size(),
         cenF.south.jumps.size());

    // 5: director approaches e_rho along the colloid row near each pole
    const auto pr = pole_analysis(u, g64);
    auto c5_side = [](const PoleSide& s, double& nearest, bool& mono) {
        const auto& t = s.trace;
        const std::size_t n = t.size();
        nearest = t.back()[1];
        mono = n >= 4;
        for (std::size_t k = n - 4; mono && k + 1 < n; ++k) mono = t[k][1] > t[k + 1][1];
    };
    double near_n, near_s;
    bool mono_n, mono_s;
    c5_side(pr.north, near_n, mono_n);
    c5_side(pr.south, near_s, mono_s);
    line(5, near_n < 0.1 && near_s < 0.1 && mono_n && mono_s,
         "|director - e_rho| nearest pole: north %.6f, south %.6f (<0.1), "
         "monotone over last 4 nodes: north %s, south %s",
         near_n, near_s, mono_n ? "yes" : "no", mono_s ? "yes" : "no");

    // 6: first component stays nonnegative; symmetrizing it is energy-neutral
    double min_u1 = 1e300;
    for (const auto& v : u) min_u1 = std::min(min_u1, v[0]);
    const double de_sym =
        model64.eval_energy(symmetrize_u1(u)).total - rA.breakdown.total;
    line(6, min_u1 >= -1e-8 && std::abs(de_sym) < 1e-10,
         "min u1 = %.3e (>=-1e-8), |dE| under u1 symmetrization = %.3e (<1e-10)",
         min_u1, std::abs(de_sym));

    // 7: far-field deviation small and decreasing when the domain doubles
    const double far20 = far_field_check(u, g64);
    std::fprintf(stderr, "[%.0fs] solving doubled domain (R=40)...\n", now_s());
    const auto g40 = build_grid({79, 128, 40.0, 1.05});
    const auto p40 = default_profile({M_PI / 2, M_PI / 4}, g40);
    const auto r40 = solve(initial_field(g40, InitMode::meridian_rotation, scfg), g40,
                           p40, mp, scfg, kThreads);
    const double far40 = far_field_check(r40.field, g40);
    std::printf("note: R=40 solve converged=%d E=%.9f iterations=%d\n",
                int(r40.converged), r40.breakdown.total, r40.iterations);
    line(7, far20 < 0.1 && far40 < far20,
         "max |u-(0,1,0)| on the outer half-annulus: %.3e at R=20 (<0.1), %.3e at "
         "R=40 (decreasing)",
         far20, far40);

    // 8: half-ball energy density at the north pole decays toward the grid floor
    const std::vector<double> ladder{0.5, 0.35, 0.25, 0.15, 0.1, 0.07, 0.05};
    const auto th = density_probe(u, g64, model64, {0.0, 1.0}, ladder);
    const double ratio = th.values.back() / th.values.front();
    line(8, ratio < 0.1,
         "Theta(north, r): %.4f at r=0.5 -> %.4f at r=0.05, ratio %.4f (<0.1)",
         th.values.front(), th.values.back(), ratio);

    criterion_9();

    // 10: biaxiality floor respected; near-floor values confined to the axis rows
    const auto rep = defect_report(u, g64);
    double bmin = 1e300;
    for (std::size_t k = 0; k < g64.count(); ++k)
        bmin = std::min(bmin, biaxiality_b(u[k]).b);
    line(10, bmin >= -0.5 - 1e-10 && rep.b_field_min_off_axis > -0.5 + 1e-3,
         "min b = %.12f (>=-1/2-1e-10), min b off the two near-axis rows = %.6f "
         "(clear of -1/2 by >1e-3)",
         bmin, rep.b_field_min_off_axis);

    // competing branch: relaxing from the uniform far-field state
    std::fprintf(stderr, "[%.0fs] solving defect-free reference...\n", now_s());
    const auto rD =
        solve(UnitField(g64.count(), UVector{0, 1, 0}), g64, p64, mp, scfg, kThreads);
    const auto cenD = axis_census(rD.field, g64);
    std::printf("note: defect-free branch (uniform start) E=%.9f iterations=%d "
                "axis jumps N=%zu S=%zu pole u2=%.6f\n",
                rD.breakdown.total, rD.iterations, cenD.north.jumps.size(),
                cenD.south.jumps.size(), rD.field[g64.index(0, 0)][1]);
    std::printf("note: at nu=1 the pole nodes settle at the Robin balance instead "
                "of locking to (0,-1,0); criteria 3, 5 and 8 measure that locking "
                "and clear at stronger anchoring (nu=5: pole deviation ~7e-3, "
                "density ratio ~4e-3)\n");

    std::printf("%s (%.0fs total)\n", g_all_pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED",
                now_s());
    return g_all_pass ? 0 : 1;
}
