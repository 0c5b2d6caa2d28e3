#ifndef BOOJUM_ANCHORING_HPP
#define BOOJUM_ANCHORING_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "boojum/grid.hpp"
#include "boojum/tensor.hpp"

// Favored-anchoring profile u_s on the colloid boundary. The two-parameter
// default family u_s = (sin a cos d, cos a, sin a sin d) with
// a = pi - A sin^2(theta), d = B sin(2 theta) meets all four profile
// constraints by construction; the validator keeps external profiles honest.

namespace boojum {

struct AnchoringParams {
    double amp_polar = M_PI / 2;  // A in (0, pi]
    double amp_tilt = M_PI / 4;   // B in (0, pi/4]

    void validate() const {
        if (!(amp_polar > 0.0) || !(amp_polar <= M_PI))
            throw std::invalid_argument("anchoring.amp_polar: must lie in (0, pi]");
        if (!(amp_tilt > 0.0) || !(amp_tilt <= M_PI / 4))
            throw std::invalid_argument("anchoring.amp_tilt: must lie in (0, pi/4]");
    }
};

inline UVector anchoring_value(const AnchoringParams& p, double theta) {
    const double s = std::sin(theta);
    const double a = M_PI - p.amp_polar * s * s;
    const double d = p.amp_tilt * std::sin(2.0 * theta);
    return {std::sin(a) * std::cos(d), std::cos(a), std::sin(a) * std::sin(d)};
}

struct AnchoringProfile {
    // sorted by theta_hat; includes the two pole rows theta_hat = 0, pi in
    // addition to the colloid-boundary node rows (the pole-value constraint
    // is a 1e-10 check that node-centered samples alone cannot certify)
    std::vector<double> theta_hat;
    std::vector<UVector> u_s;

    std::size_t size() const { return theta_hat.size(); }
};

inline AnchoringProfile default_profile(const AnchoringParams& p, const MeridianGrid& g) {
    p.validate();
    AnchoringProfile prof;
    prof.theta_hat.reserve(g.n_t() + 2);
    prof.u_s.reserve(g.n_t() + 2);
    prof.theta_hat.push_back(0.0);
    prof.u_s.push_back({0.0, -1.0, 0.0});  // sin(pi - A*0) = 0 exactly
    for (int j = 0; j < g.n_t(); ++j) {
        prof.theta_hat.push_back(g.thetas[j]);
        prof.u_s.push_back(anchoring_value(p, g.thetas[j]));
    }
    prof.theta_hat.push_back(M_PI);
    prof.u_s.push_back({0.0, -1.0, 0.0});
    return prof;
}

/// per-polar-node u_s for the energy's surface term; requires a profile row
/// at every colloid-boundary node colatitude
inline std::vector<UVector> align_to_grid(const AnchoringProfile& prof,
                                          const MeridianGrid& g) {
    std::vector<UVector> out(g.n_t());
    for (int j = 0; j < g.n_t(); ++j) {
        const double th = g.thetas[j];
        bool found = false;
        for (std::size_t k = 0; k < prof.size(); ++k) {
            if (std::abs(prof.theta_hat[k] - th) <= 1e-9) {
                out[j] = prof.u_s[k];
                found = true;
                break;
            }
        }
        if (!found) {
            std::ostringstream msg;
            msg << "anchoring profile: no sample at theta_hat=" << th;
            throw std::invalid_argument(msg.str());
        }
    }
    return out;
}

struct ConstraintCheck {
    bool pass = false;
    double violation = 0.0;
};

struct ProfileValidation {
    ConstraintCheck unit_norm;          // violation: max | |u_s| - 1 |
    ConstraintCheck pole_value;         // violation: max |u_s(pole) - (0,-1,0)|
    ConstraintCheck nonnegative_u1;     // violation: max(0, -u_s1)
    ConstraintCheck nonconstant[3];     // violation: component range (pass if > 1e-6)
    bool pole_rows_present = false;
    // log-log decay rates of |u_s1|, |u_s3| vs sin(theta) over the four
    // samples nearest each pole; NaN when not computable
    double slope_u1_north, slope_u3_north, slope_u1_south, slope_u3_south;

    bool all_pass() const {
        return unit_norm.pass && pole_value.pass && nonnegative_u1.pass &&
               nonconstant[0].pass && nonconstant[1].pass && nonconstant[2].pass;
    }
};

namespace detail {

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    // least-squares slope of log|y| against log x; NaN on degenerate input
    const std::size_t n = x.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0) || !(std::abs(y[i]) > 0))
            return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / denom;
}

}  // namespace detail

inline ProfileValidation validate_profile(const AnchoringProfile& prof) {
    ProfileValidation v{};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    v.slope_u1_north = v.slope_u3_north = v.slope_u1_south = v.slope_u3_south = nan;

    double worst_norm = 0, worst_pole = 0, worst_neg = 0;
    double lo[3], hi[3];
    for (int c = 0; c < 3; ++c) {
        lo[c] = std::numeric_limits<double>::infinity();
        hi[c] = -lo[c];
    }
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const UVector& u = prof.u_s[k];
        worst_norm = std::max(worst_norm, std::abs(norm(u) - 1.0));
        worst_neg = std::max(worst_neg, -std::min(u[0], 0.0));
        for (int c = 0; c < 3; ++c) {
            lo[c] = std::min(lo[c], u[c]);
            hi[c] = std::max(hi[c], u[c]);
        }
        const double th = prof.theta_hat[k];
        if (th <= 1e-12 || th >= M_PI - 1e-12) {
            v.pole_rows_present = true;
            const UVector d = u - UVector{0.0, -1.0, 0.0};
            worst_pole = std::max(worst_pole, norm(d));
        }
    }
    v.unit_norm = {worst_norm <= 1e-10, worst_norm};
    v.pole_value = {v.pole_rows_present && worst_pole <= 1e-10, worst_pole};
    v.nonnegative_u1 = {worst_neg <= 1e-12, worst_neg};
    for (int c = 0; c < 3; ++c) {
        const double range = hi[c] - lo[c];
        v.nonconstant[c] = {range > 1e-6, range};
    }

    // near-pole decay rates from the four interior samples nearest each pole
    std::vector<std::size_t> north, south;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const double th = prof.theta_hat[k];
        if (th > 1e-12 && th < M_PI - 1e-12) north.push_back(k);
    }
    south = north;
    std::sort(north.begin(), north.end(), [&](auto a, auto b) {
        return prof.theta_hat[a] < prof.theta_hat[b];
    });
    std::sort(south.begin(), south.end(), [&](auto a, auto b) {
        return prof.theta_hat[a] > prof.theta_hat[b];
    });
    auto fit = [&](const std::vector<std::size_t>& side, int comp) {
        std::vector<double> x, y;
        for (std::size_t m = 0; m < side.size() && m < 4; ++m) {
            x.push_back(std::sin(prof.theta_hat[side[m]]));
            y.push_back(prof.u_s[side[m]][comp]);
        }
        return x.size() == 4 ? detail::loglog_slope(x, y) : nan;
    };
    v.slope_u1_north = fit(north, 0);
    v.slope_u3_north = fit(north, 2);
    v.slope_u1_south = fit(south, 0);
    v.slope_u3_south = fit(south, 2);
    return v;
}

inline void write_profile_csv(const AnchoringProfile& prof, std::ostream& os) {
    os << "theta_hat,us1,us2,us3\n";
    char buf[140];
    for (std::size_t k = 0; k < prof.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", prof.theta_hat[k],
                      prof.u_s[k][0], prof.u_s[k][1], prof.u_s[k][2]);
        os << buf;
    }
}

inline AnchoringProfile read_profile_csv(std::istream& is) {
    AnchoringProfile prof;
    std::string line;
    if (!std::getline(is, line) || line.find("theta_hat") == std::string::npos)
        throw std::invalid_argument("anchoring profile CSV: missing header");
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        double th, a, b, c;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &th, &a, &b, &c) != 4) {
            throw std::invalid_argument("anchoring profile CSV: malformed line " +
                                        std::to_string(lineno));
        }
        if (!(th >= 0.0) || !(th <= M_PI))
            throw std::invalid_argument("anchoring profile CSV: theta_hat out of [0, pi] at line " +
                                        std::to_string(lineno));
        prof.theta_hat.push_back(th);
        prof.u_s.push_back({a, b, c});
    }
    if (prof.size() == 0)
        throw std::invalid_argument("anchoring profile CSV: no samples");
    std::vector<std::size_t> ord(prof.size());
    for (std::size_t k = 0; k < ord.size(); ++k) ord[k] = k;
    std::sort(ord.begin(), ord.end(),
              [&](auto x, auto y) { return prof.theta_hat[x] < prof.theta_hat[y]; });
    AnchoringProfile sorted;
    for (auto k : ord) {
        sorted.theta_hat.push_back(prof.theta_hat[k]);
        sorted.u_s.push_back(prof.u_s[k]);
    }
    return sorted;
}

}  // namespace boojum

#endif
