#ifndef BOOJUM_TANGENT_ODE_HPP
#define BOOJUM_TANGENT_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "boojum/parallel.hpp"
#include "boojum/tensor.hpp"

// Blow-up profile ODE on the polar interval (0, pi/2]:
//
//   -(sin t v')' + (1/sin t)(4 v1, 0, v3) = { |v'|^2 sin t + (4 v1^2 + v3^2)/sin t } v
//
// for a unit vector v(t).  Along exact solutions
//
//   C_e = |v'|^2 sin^2 t - (4 v1^2 + v3^2)
//
// is constant; it doubles as the integration-accuracy gauge.  A regular
// series start (v1 ~ a t^2, v3 ~ b t) encodes the axis condition, and a
// shooting sweep over (a, b) certifies numerically that only the constant
// solutions also meet the natural boundary condition at t = pi/2.

namespace boojum {

struct OdeState {
    double theta = 0;
    UVector v{};        // |v| = 1
    UVector v_prime{};  // dv/dt, tangential to v
};

inline double conserved_c_e(const OdeState& s) {
    const double sn = std::sin(s.theta);
    return dot(s.v_prime, s.v_prime) * sn * sn -
           (4 * s.v[0] * s.v[0] + s.v[2] * s.v[2]);
}

struct Trajectory {
    std::vector<OdeState> states;  // accepted steps, endpoints included
    bool complete = false;         // false: step underflow, last valid state kept
    double c_e_drift = 0;          // max |C_e - C_e(start)| over the states
};

namespace detail {

using OdeY = std::array<double, 6>;  // (v, v')

inline OdeY ode_rhs(double t, const OdeY& y) {
    const double sn = std::sin(t), cs = std::cos(t);
    const double axis1 = 4 * y[0], axis3 = y[2];
    const double lam = (y[3] * y[3] + y[4] * y[4] + y[5] * y[5]) * sn +
                       (4 * y[0] * y[0] + y[2] * y[2]) / sn;
    OdeY d;
    d[0] = y[3];
    d[1] = y[4];
    d[2] = y[5];
    d[3] = (-cs * y[3] + axis1 / sn - lam * y[0]) / sn;
    d[4] = (-cs * y[4] - lam * y[1]) / sn;
    d[5] = (-cs * y[5] + axis3 / sn - lam * y[2]) / sn;
    return d;
}

}  // namespace detail

/// adaptive Dormand-Prince 5(4) integration of the blow-up ODE from theta0 to
/// theta1 (either direction, both within (0, pi/2]).  v is renormalized and
/// v' re-projected tangentially after every accepted step.
inline Trajectory integrate(const UVector& v0, const UVector& v0_prime, double theta0,
                            double theta1, double tol) {
    constexpr double half_pi = 1.5707963267948966;
    if (!(theta0 > 0) || !(theta1 > 0) || theta0 > half_pi + 1e-12 ||
        theta1 > half_pi + 1e-12)
        throw std::invalid_argument("integrate: theta must lie in (0, pi/2]");
    if (theta0 == theta1)
        throw std::invalid_argument("integrate: empty integration interval");
    if (!(tol > 0)) throw std::invalid_argument("integrate: tol must be > 0");
    if (std::abs(norm(v0) - 1.0) > 1e-10)
        throw std::invalid_argument("integrate: |v0| must be 1");
    if (std::abs(dot(v0, v0_prime)) > 1e-8)
        throw std::invalid_argument("integrate: v0_prime must be tangential to v0");

    // Dormand-Prince tableau; the 5th-order weights are the last stage row
    static constexpr double c[7] = {0, 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1, 1};
    static constexpr double a[7][6] = {
        {},
        {1. / 5},
        {3. / 40, 9. / 40},
        {44. / 45, -56. / 15, 32. / 9},
        {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
        {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
        {35. / 384, 0, 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
    static constexpr double e[7] = {71. / 57600, 0, -71. / 16695,     71. / 1920,
                                    -17253. / 339200, 22. / 525, -1. / 40};

    Trajectory out;
    OdeState cur{theta0, v0, v0_prime};
    out.states.push_back(cur);
    const double c0 = conserved_c_e(cur);

    detail::OdeY y{v0[0], v0[1], v0[2], v0_prime[0], v0_prime[1], v0_prime[2]};
    const double span = theta1 - theta0;
    double t = theta0;
    double h = span / 100;
    const double h_floor = 1e-13;

    for (long step = 0; t != theta1; ++step) {
        if (step >= 1000000) return out;  // singular endpoint: creep guard
        if ((span > 0 && t + h > theta1) || (span < 0 && t + h < theta1))
            h = theta1 - t;
        std::array<detail::OdeY, 7> k;
        for (int s = 0; s < 7; ++s) {
            detail::OdeY ys = y;
            for (int q = 0; q < s; ++q)
                for (int i = 0; i < 6; ++i) ys[i] += h * a[s][q] * k[q][i];
            k[s] = detail::ode_rhs(t + c[s] * h, ys);
        }
        // the 5th-order weights are the a[6] row (stage 7 feeds the error only)
        detail::OdeY y5;
        double err = 0;
        for (int i = 0; i < 6; ++i) {
            double acc = 0, eacc = 0;
            for (int s = 0; s < 6; ++s) acc += a[6][s] * k[s][i];
            for (int s = 0; s < 7; ++s) eacc += e[s] * k[s][i];
            y5[i] = y[i] + h * acc;
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double r = h * eacc / sc;
            err += r * r;
        }
        err = std::sqrt(err / 6);
        if (err <= 1.0) {
            const double tn = t + h;
            t = (span > 0 ? tn >= theta1 : tn <= theta1) ? theta1 : tn;
            y = y5;
            UVector v{y[0], y[1], y[2]}, p{y[3], y[4], y[5]};
            v = normalized(v);
            p = p - dot(p, v) * v;
            y = {v[0], v[1], v[2], p[0], p[1], p[2]};
            cur = {t, v, p};
            out.states.push_back(cur);
            out.c_e_drift = std::max(out.c_e_drift, std::abs(conserved_c_e(cur) - c0));
            if (t == theta1) break;
        }
        const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (std::abs(h) < h_floor) return out;  // underflow: last valid state kept
    }
    out.complete = true;
    return out;
}

/// regular start at small theta0 consistent with v1, v3 -> 0 at the axis:
/// v1 = a t^2, v3 = b t, v2 = sign * sqrt(1 - v1^2 - v3^2)
inline OdeState series_start(double a, double b, double theta0, double v2_sign = -1.0) {
    if (!(theta0 > 0)) throw std::invalid_argument("series_start: theta0 must be > 0");
    const double v1 = a * theta0 * theta0, v3 = b * theta0;
    const double q = 1.0 - v1 * v1 - v3 * v3;
    if (!(q > 0))
        throw std::invalid_argument("series_start: perturbation too large at theta0");
    const double v2 = (v2_sign < 0 ? -1.0 : 1.0) * std::sqrt(q);
    const double p1 = 2 * a * theta0, p3 = b;
    const double p2 = -(v1 * p1 + v3 * p3) / v2;
    return {theta0, {v1, v2, v3}, {p1, p2, p3}};
}

struct ShotSpec {
    double a = 0;          // v1 series coefficient
    double b = 0;          // v3 series coefficient
    double v2_sign = -1;   // branch of the axis value
};

struct ShotOutcome {
    ShotSpec spec{};
    double mismatch = 0;   // |v1(pi/2)| + |v3(pi/2)| + ||v'(pi/2)|^2 - C_e|
    double c_e_drift = 0;
    bool complete = false;
    OdeState final_state{};
};

struct ClassificationReport {
    std::vector<ShotOutcome> shots;
    double tol = 0;
    bool only_constants_pass = false;  // zero shots < tol, all others >= tol
};

/// the zero shot plus 8 directions x 8 log-spaced magnitudes in [1e-3, 1]
inline std::vector<ShotSpec> default_shot_grid() {
    std::vector<ShotSpec> shots{{0.0, 0.0, -1.0}};
    for (int j = 0; j < 8; ++j) {
        const double m = std::pow(10.0, -3.0 + 3.0 * j / 7.0);
        for (int k = 0; k < 8; ++k) {
            const double psi = 2 * M_PI * k / 8;
            shots.push_back({m * std::cos(psi), m * std::sin(psi), -1.0});
        }
    }
    return shots;
}

inline ClassificationReport shoot_classify(const std::vector<ShotSpec>& shots,
                                           double tol, double theta0 = 1e-2,
                                           double integrator_tol = 1e-10,
                                           int threads = 0) {
    if (!(tol > 0)) throw std::invalid_argument("shoot_classify: tol must be > 0");
    constexpr double half_pi = 1.5707963267948966;
    ClassificationReport rep;
    rep.tol = tol;
    rep.shots.resize(shots.size());
    for_chunks(shots.size(), 1, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            const auto& sp = shots[s];
            const OdeState st = series_start(sp.a, sp.b, theta0, sp.v2_sign);
            const auto traj =
                integrate(st.v, st.v_prime, theta0, half_pi, integrator_tol);
            const OdeState& fin = traj.states.back();
            const double ce = conserved_c_e(traj.states.front());
            ShotOutcome& o = rep.shots[s];
            o.spec = sp;
            o.complete = traj.complete;
            o.c_e_drift = traj.c_e_drift;
            o.final_state = fin;
            o.mismatch = std::abs(fin.v[0]) + std::abs(fin.v[2]) +
                         std::abs(dot(fin.v_prime, fin.v_prime) - ce);
        }
    });
    rep.only_constants_pass = true;
    for (const auto& o : rep.shots) {
        const bool constant = o.spec.a == 0 && o.spec.b == 0;
        if (!o.complete || (constant ? o.mismatch >= tol : o.mismatch < tol))
            rep.only_constants_pass = false;
    }
    return rep;
}

}  // namespace boojum

#endif
