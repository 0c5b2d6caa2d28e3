#ifndef BOOJUM_TENSOR_HPP
#define BOOJUM_TENSOR_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>

// Algebraic layer for the reduced axisymmetric Q-tensor ansatz:
// augmentation u -> w, the cubic potentials S and P, eigenvalues,
// biaxiality, phase classification and director extraction.

namespace boojum {

// component order: u = (u1, u2, u3), w = (w1, ..., w5)
using UVector = std::array<double, 3>;
using WVector = std::array<double, 5>;

inline constexpr double sqrt2 = std::numbers::sqrt2;
inline constexpr double sqrt3 = std::numbers::sqrt3;
inline constexpr double sqrt6 = 2.449489742783178098197284074705892;

inline double dot(const UVector& a, const UVector& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const UVector& a) { return std::sqrt(dot(a, a)); }

inline UVector operator+(const UVector& a, const UVector& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline UVector operator-(const UVector& a, const UVector& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline UVector operator*(double s, const UVector& a) {
    return {s * a[0], s * a[1], s * a[2]};
}

inline UVector normalized(const UVector& a) {
    const double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

/// w = L[u] = (u1 cos2phi, u1 sin2phi, u2, u3 cosphi, u3 sinphi)
inline WVector augment(const UVector& u, double phi) {
    return {u[0] * std::cos(2 * phi), u[0] * std::sin(2 * phi), u[1],
            u[2] * std::cos(phi), u[2] * std::sin(phi)};
}

/// cubic invariant on the 5-vector frame; |S| <= 1/3 on the unit sphere
inline double eval_S(const WVector& w) {
    return -w[2] * (w[0] * w[0] + w[1] * w[1]) + sqrt3 * w[1] * w[3] * w[4]
           + 0.5 * w[2] * (w[3] * w[3] + w[4] * w[4]) + w[2] * w[2] * w[2] / 3.0
           + 0.5 * sqrt3 * w[0] * (w[3] * w[3] - w[4] * w[4]);
}

/// reduced cubic potential; satisfies eval_S(augment(u, phi)) == eval_P(u)
inline double eval_P(const UVector& v) {
    return -v[1] * v[0] * v[0] + 0.5 * sqrt3 * v[0] * v[2] * v[2]
           + v[1] * v[1] * v[1] / 3.0 + 0.5 * v[1] * v[2] * v[2];
}

inline UVector grad_P(const UVector& v) {
    return {-2.0 * v[0] * v[1] + 0.5 * sqrt3 * v[2] * v[2],
            -v[0] * v[0] + v[1] * v[1] + 0.5 * v[2] * v[2],
            sqrt3 * v[0] * v[2] + v[1] * v[2]};
}

struct EigenTriple {
    double lam1, lam2, lam3;  // traceless; lam3 >= lam2 by branch choice
};

inline EigenTriple eigenvalues(const UVector& u) {
    const double t = u[0] + u[1] / sqrt3;
    const double disc = std::hypot(u[0] - sqrt3 * u[1], 2.0 * u[2]);
    return {-0.5 * t, 0.25 * (t - disc), 0.25 * (t + disc)};
}

struct Biaxiality {
    double b;      // (sqrt3/2) u1 + (1/2) u2
    double gap31;  // lam3 - lam1 for unit u; NaN when |b| > 1
    double gap32;  // lam3 - lam2, valid for any u
};

/// b together with the two eigenvalue gaps it controls.
/// Throws if u is unit but |b| exceeds 1 beyond rounding (cannot happen
/// for a genuine unit vector; indicates corrupted state).
inline Biaxiality biaxiality_b(const UVector& u) {
    double b = 0.5 * (sqrt3 * u[0] + u[1]);
    const double gap32 = 0.5 * std::hypot(u[0] - sqrt3 * u[1], 2.0 * u[2]);
    double gap31;
    if (std::abs(b) <= 1.0) {
        gap31 = 0.5 * (sqrt3 * b + std::sqrt(1.0 - b * b));
    } else if (std::abs(b) <= 1.0 + 1e-9) {
        const double bc = b > 0 ? 1.0 : -1.0;
        gap31 = 0.5 * sqrt3 * bc;
    } else {
        if (std::abs(norm(u) - 1.0) <= 1e-8)
            throw std::logic_error("biaxiality_b: |b| > 1 for a unit state vector");
        gap31 = std::numeric_limits<double>::quiet_NaN();
    }
    return {b, gap31, gap32};
}

enum class Phase { uniaxial, biaxial, degenerate_uniaxial };

/// Uniaxial when two eigenvalues coincide within tol; degenerate_uniaxial
/// when the coinciding pair contains the maximum (disclination condition).
inline Phase classify_phase(const UVector& u, double tol) {
    const auto [l1, l2, l3] = eigenvalues(u);
    const double lmax = std::max(l1, l3);
    struct Pair { double gap; bool has_max; };
    const Pair pairs[3] = {{std::abs(l1 - l2), l1 >= lmax},
                           {std::abs(l1 - l3), true},
                           {l3 - l2, l3 >= lmax}};
    Phase ph = Phase::biaxial;
    for (const auto& p : pairs) {
        if (p.gap > tol) continue;
        if (p.has_max) return Phase::degenerate_uniaxial;
        ph = Phase::uniaxial;
    }
    return ph;
}

struct Mat3 {
    double m[3][3];
    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }
};

/// Q = (1/sqrt2) [w1 M5 + w2 M2 + w3 M4 + w4 M1 + w5 M3], w = L[u](phi).
/// The physical scale a/sqrt2 is dropped.
inline Mat3 reconstruct_Q(const UVector& u, double phi) {
    const WVector w = augment(u, phi);
    const double c2 = 1.0 / 2.0;          // (1/sqrt2)(1/sqrt2)
    const double c6 = 1.0 / (sqrt2 * sqrt6);
    Mat3 q;
    q(0, 0) = c2 * w[0] - c6 * w[2];
    q(1, 1) = -c2 * w[0] - c6 * w[2];
    q(2, 2) = 2.0 * c6 * w[2];
    q(0, 1) = q(1, 0) = c2 * w[1];
    q(0, 2) = q(2, 0) = c2 * w[3];
    q(1, 2) = q(2, 1) = c2 * w[4];
    return q;
}

struct SymEigen {
    std::array<double, 3> vals;                 // ascending
    std::array<std::array<double, 3>, 3> vecs;  // vecs[k] pairs with vals[k]
};

/// cyclic Jacobi for a symmetric 3x3; plenty for the director fallback
inline SymEigen sym_eigen(Mat3 a) {
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    SymEigen e;
    std::array<int, 3> ord = {0, 1, 2};
    std::array<double, 3> d = {a(0, 0), a(1, 1), a(2, 2)};
    if (d[ord[0]] > d[ord[1]]) std::swap(ord[0], ord[1]);
    if (d[ord[1]] > d[ord[2]]) std::swap(ord[1], ord[2]);
    if (d[ord[0]] > d[ord[1]]) std::swap(ord[0], ord[1]);
    for (int k = 0; k < 3; ++k) {
        e.vals[k] = d[ord[k]];
        for (int i = 0; i < 3; ++i) e.vecs[k][i] = v[i][ord[k]];
    }
    return e;
}

struct DirectorSample {
    double d_rho, d_phi, d_z;
    bool degenerate;  // largest eigenvalue has multiplicity >= 2 within tol
};

/// Director from the closed-form n-field; falls back to the top
/// eigenvector of reconstruct_Q(u, 0) when |n| <= tol. Sign fixed by
/// d_rho >= 0 (then d_z >= 0, then d_phi >= 0 on ties).
inline DirectorSample director(const UVector& u, double tol = 1e-6) {
    const auto bx = biaxiality_b(u);
    const bool degen = !(bx.gap31 > tol) || !(bx.gap32 > tol);
    double d_rho = 0, d_phi = 0, d_z = 0;
    const double disc = std::hypot(u[0] - sqrt3 * u[1], 2.0 * u[2]);
    double nn = 0;
    if (disc > 0) {
        const double n_rho = 0.5 * sqrt2 * (1.0 + (u[0] - sqrt3 * u[1]) / disc);
        const double n_z = sqrt2 * u[2] / disc;
        nn = std::hypot(n_rho, n_z);
        if (nn > tol) {
            d_rho = n_rho / nn;
            d_z = n_z / nn;
        }
    }
    if (!(nn > tol)) {  // eigen-decomposition fallback at phi = 0
        const auto e = sym_eigen(reconstruct_Q(u, 0.0));
        d_rho = e.vecs[2][0];
        d_phi = e.vecs[2][1];
        d_z = e.vecs[2][2];
    }
    const bool flip = d_rho < 0 || (d_rho == 0 && (d_z < 0 || (d_z == 0 && d_phi < 0)));
    if (flip) {
        d_rho = -d_rho;
        d_phi = -d_phi;
        d_z = -d_z;
    }
    return {d_rho, d_phi, d_z, degen};
}

}  // namespace boojum

#endif
