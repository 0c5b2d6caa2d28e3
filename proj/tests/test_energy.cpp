#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "boojum/energy.hpp"

using namespace boojum;

namespace {

const GridConfig kCoarse{8, 16, 4.0, 1.1};

EnergyModel make_model(const GridConfig& gc, double nu, double mu, int threads = 1) {
    auto g = build_grid(gc);
    auto prof = default_profile({M_PI / 2, M_PI / 4}, g);
    return EnergyModel(std::move(g), prof, {nu, mu}, threads);
}

UnitField constant_field(const MeridianGrid& g, UVector v) {
    return UnitField(g.count(), v);
}

UnitField random_unit_field(const MeridianGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    UnitField u(g.count());
    for (auto& v : u) v = normalized({nd(rng), nd(rng), nd(rng)});
    return u;
}

}  // namespace

TEST_CASE("constant far-field state has only surface energy", "[energy]") {
    const auto model = make_model(kCoarse, 1.0, 3.0);
    const auto e = model.eval_energy(constant_field(model.grid(), {0, 1, 0}));
    CHECK(e.elastic < 1e-20);  // stencil weights sum to zero only up to rounding
    CHECK(e.axis_weight == 0.0);
    CHECK(std::abs(e.bulk) < 1e-12);  // 1 - 3 P(0,1,0) = 0 exactly
    CHECK(e.surface > 0.1);           // the profile disagrees with (0,1,0)
    CHECK(e.total == Catch::Approx(e.elastic + e.axis_weight + e.bulk + e.surface)
                         .epsilon(1e-12));
}

TEST_CASE("constant antipodal state pays the full bulk penalty", "[energy]") {
    const auto model = make_model(kCoarse, 1.0, 1.0);
    const auto e = model.eval_energy(constant_field(model.grid(), {0, -1, 0}));
    CHECK(e.elastic < 1e-20);
    CHECK(e.axis_weight == 0.0);
    // 1 - 3 P(0,-1,0) = 2 over the half-annulus area (2/3)(R^3 - 1)
    const double area = 2.0 / 3.0 * (std::pow(kCoarse.outer_radius, 3) - 1.0);
    CHECK(e.bulk == Catch::Approx(sqrt2 * 2.0 * area).epsilon(1e-12));
}

TEST_CASE("axis penalty of a radial constant state grows under polar refinement",
          "[energy]") {
    double prev = 0;
    for (int np : {16, 32, 64}) {
        const auto model = make_model({8, np, 4.0, 1.1}, 1.0, 0.0);
        const auto e = model.eval_energy(constant_field(model.grid(), {1, 0, 0}));
        CHECK(e.elastic < 1e-20);
        CHECK(e.bulk == 0.0);  // mu = 0
        CHECK(e.axis_weight > prev);
        prev = e.axis_weight;
    }
    CHECK(std::isfinite(prev));
}

TEST_CASE("bulk density is nonnegative on the unit sphere", "[energy]") {
    std::mt19937_64 rng(301);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 1000000; ++k) {
        const UVector u = normalized({nd(rng), nd(rng), nd(rng)});
        CHECK(sqrt2 * (1.0 - 3.0 * eval_P(u)) >= -1e-12);
    }
}

TEST_CASE("breakdown adds up", "[energy]") {
    const auto model = make_model(kCoarse, 0.7, 1.3);
    const auto u = random_unit_field(model.grid(), 99);
    const auto e = model.eval_energy(u);
    CHECK(e.total ==
          Catch::Approx(e.elastic + e.axis_weight + e.bulk + e.surface).epsilon(1e-12));
    CHECK(e.elastic >= 0.0);
    CHECK(e.axis_weight >= 0.0);
    CHECK(e.surface >= 0.0);
    CHECK(e.bulk >= -1e-12);
}

TEST_CASE("size mismatch is rejected", "[energy]") {
    const auto model = make_model(kCoarse, 1.0, 1.0);
    UnitField u(model.grid().count() - 1, UVector{0, 1, 0});
    CHECK_THROWS_AS(model.eval_energy(u), std::invalid_argument);
    CHECK_THROWS_AS(model.eval_gradient(u), std::invalid_argument);
}

TEST_CASE("model parameter validation", "[energy]") {
    CHECK_THROWS_AS((ModelParams{0.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{-1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{1.0, -0.1}.validate()), std::invalid_argument);
    CHECK_NOTHROW((ModelParams{1.0, 0.0}.validate()));
}

TEST_CASE("gradient of the far-field constant is pure surface", "[energy]") {
    const auto model = make_model(kCoarse, 1.0, 5.0);
    const auto& g = model.grid();
    const auto u = constant_field(g, {0, 1, 0});
    const auto grad = model.eval_gradient(u);
    // the bulk gradient is parallel to u here, so projection kills it;
    // elastic and axis terms vanish identically
    for (std::size_t k = 0; k < g.count(); ++k) {
        const int i = static_cast<int>(k) / g.n_t();
        const int j = static_cast<int>(k) % g.n_t();
        if (i == 0) {
            UVector s = (2.0 * model.params().nu * g.surface_weights[j]) *
                        (u[k] - model.boundary_anchoring()[j]);
            s = s - dot(s, u[k]) * u[k];
            CHECK(boojum::norm(grad[k] - s) < 1e-13);
        } else {
            CHECK(boojum::norm(grad[k]) < 1e-13);
        }
    }
}

TEST_CASE("gradient matches directional finite differences", "[energy]") {
    const auto model = make_model(kCoarse, 0.8, 0.7);
    const auto& g = model.grid();
    auto u = random_unit_field(g, 42);
    for (int j = 0; j < g.n_t(); ++j) u[g.index(g.n_r(), j)] = {0, 1, 0};

    const auto grad = model.eval_gradient(u);
    std::mt19937_64 rng(43);
    std::normal_distribution<double> nd;
    const double h = 1e-6;
    for (int trial = 0; trial < 120; ++trial) {
        UnitField dir(g.count(), {0, 0, 0});
        for (std::size_t k = 0; k < g.count(); ++k) {
            if (static_cast<int>(k) / g.n_t() == g.n_r()) continue;  // pinned row
            UVector t = {nd(rng), nd(rng), nd(rng)};
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
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1e-8, std::abs(an)));
    }
}

TEST_CASE("gradient is tangential and pinned", "[energy]") {
    const auto model = make_model(kCoarse, 1.0, 1.0);
    const auto& g = model.grid();
    const auto u = random_unit_field(g, 7);
    const auto grad = model.eval_gradient(u);
    for (std::size_t k = 0; k < g.count(); ++k) {
        CHECK(std::abs(dot(grad[k], u[k])) < 1e-12);
        if (static_cast<int>(k) / g.n_t() == g.n_r()) CHECK(boojum::norm(grad[k]) == 0.0);
    }
}

TEST_CASE("energy and gradient are thread-count invariant", "[energy]") {
    const auto m1 = make_model({16, 32, 6.0, 1.05}, 1.0, 1.0, 1);
    const auto m4 = make_model({16, 32, 6.0, 1.05}, 1.0, 1.0, 4);
    const auto u = random_unit_field(m1.grid(), 11);
    const auto e1 = m1.eval_energy(u), e4 = m4.eval_energy(u);
    CHECK(e1.total == e4.total);  // bit-identical by fixed chunking
    CHECK(e1.elastic == e4.elastic);
    CHECK(e1.bulk == e4.bulk);
    const auto g1 = m1.eval_gradient(u), g4 = m4.eval_gradient(u);
    for (std::size_t k = 0; k < u.size(); ++k)
        for (int c = 0; c < 3; ++c) CHECK(g1[k][c] == g4[k][c]);
}

TEST_CASE("stationarity defect vanishes at the far-field constant", "[energy]") {
    for (double mu : {0.0, 1.0, 4.2}) {
        const auto model = make_model(kCoarse, 1.0, mu);
        const auto res = model.el_residual(constant_field(model.grid(), {0, 1, 0}));
        for (double r : res) CHECK(std::abs(r) < 1e-12);
    }
}

TEST_CASE("stationarity defect is order one on a random field", "[energy]") {
    const auto model = make_model(kCoarse, 1.0, 1.0);
    const auto& g = model.grid();
    const auto res = model.el_residual(random_unit_field(g, 5));
    double worst = 0;
    int nonzero = 0;
    for (std::size_t k = 0; k < g.count(); ++k) {
        const int i = static_cast<int>(k) / g.n_t();
        if (i == 0 || i == g.n_r()) {
            CHECK(res[k] == 0.0);  // boundary rows excluded
        } else {
            ++nonzero;
            worst = std::max(worst, res[k]);
        }
    }
    CHECK(nonzero > 0);
    CHECK(worst > 1.0);
}

TEST_CASE("anchoring-aligned boundary layer zeroes the Robin defect", "[energy]") {
    const auto model = make_model(kCoarse, 1.3, 1.0);
    const auto& g = model.grid();
    auto u = constant_field(g, {0, 1, 0});
    for (int j = 0; j < g.n_t(); ++j)
        for (int i = 0; i < 3; ++i)  // flat over the one-sided stencil
            u[g.index(i, j)] = model.boundary_anchoring()[j];
    const auto res = model.robin_residual(u);
    for (double r : res) CHECK(r < 1e-12);
}

TEST_CASE("Robin defect sees a misaligned boundary", "[energy]") {
    const auto model = make_model(kCoarse, 1.3, 1.0);
    const auto res = model.robin_residual(constant_field(model.grid(), {0, 1, 0}));
    double worst = 0;
    for (double r : res) worst = std::max(worst, r);
    CHECK(worst > 0.5);  // nu |u_s - (u_s.u) u| with u fixed far from u_s
}

TEST_CASE("symmetrize leaves nonnegative first components alone", "[energy]") {
    const auto g = build_grid(kCoarse);
    auto u = random_unit_field(g, 21);
    for (auto& v : u) v[0] = std::abs(v[0]);
    CHECK(symmetrize_u1(u) == u);
}

TEST_CASE("symmetrize never increases bulk, surface or axis terms", "[energy]") {
    const auto model = make_model(kCoarse, 0.9, 1.7);
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const auto u = random_unit_field(model.grid(), seed);
        const auto e0 = model.eval_energy(u);
        const auto e1 = model.eval_energy(symmetrize_u1(u));
        CHECK(e1.bulk <= e0.bulk + 1e-12);
        CHECK(e1.surface <= e0.surface + 1e-12);
        CHECK(e1.axis_weight == Catch::Approx(e0.axis_weight).epsilon(1e-14));
    }
}

TEST_CASE("symmetrize strictly relaxes an interior sign defect", "[energy]") {
    // u1 < 0 with u3 != 0 on an interior patch, away from the one-sided
    // stencil bands, so every affected difference is a two-point contraction
    const auto model = make_model({12, 24, 4.0, 1.05}, 1.0, 1.0);
    const auto& g = model.grid();
    auto u = constant_field(g, normalized({0.3, -0.8, 0.5}));
    for (int i = 4; i <= 7; ++i)
        for (int j = 8; j <= 14; ++j) {
            auto& v = u[g.index(i, j)];
            v = normalized({-0.4, v[1], v[2]});
        }
    const auto e0 = model.eval_energy(u);
    const auto e1 = model.eval_energy(symmetrize_u1(u));
    CHECK(e1.total < e0.total - 1e-6);
    CHECK(e1.bulk < e0.bulk);
    CHECK(e1.elastic <= e0.elastic + 1e-12);
}

TEST_CASE("planar gradient identity against a 3D finite-difference oracle", "[energy]") {
    // w = L[u](phi) as a genuine field on R^3; its Cartesian Dirichlet density
    // must reproduce |Du|^2 + rho^-2 (4 u1^2 + u3^2) pointwise
    auto u_of = [](double rho, double z) -> UVector {
        const UVector raw = {0.4 * std::sin(rho) * (1 + 0.3 * z),
                             -std::cos(0.5 * rho * z),
                             0.6 * std::sin(0.7 * rho + 0.4 * z)};
        return normalized(raw);
    };
    auto w_of = [&](double x, double y, double zz) {
        const double rho = std::hypot(x, y), phi = std::atan2(y, x);
        return augment(u_of(rho, zz), phi);
    };

    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> rho_d(1.2, 2.5), z_d(-1.0, 1.0),
        phi_d(0.0, 2 * M_PI);
    const double h = 1e-4;
    for (int trial = 0; trial < 200; ++trial) {
        const double rho = rho_d(rng), z = z_d(rng), phi = phi_d(rng);
        const double x = rho * std::cos(phi), y = rho * std::sin(phi);

        double dens3d = 0;
        for (int axis = 0; axis < 3; ++axis) {
            double pp[3] = {x, y, z}, pm[3] = {x, y, z};
            pp[axis] += h;
            pm[axis] -= h;
            const auto wp = w_of(pp[0], pp[1], pp[2]);
            const auto wm = w_of(pm[0], pm[1], pm[2]);
            for (int c = 0; c < 5; ++c) {
                const double d = (wp[c] - wm[c]) / (2 * h);
                dens3d += d * d;
            }
        }

        UVector dr{}, dz{};
        const auto up = u_of(rho + h, z), um = u_of(rho - h, z);
        const auto vp = u_of(rho, z + h), vm = u_of(rho, z - h);
        double dens2d = 0;
        const auto u0 = u_of(rho, z);
        for (int c = 0; c < 3; ++c) {
            dr[c] = (up[c] - um[c]) / (2 * h);
            dz[c] = (vp[c] - vm[c]) / (2 * h);
            dens2d += dr[c] * dr[c] + dz[c] * dz[c];
        }
        dens2d += (4.0 * u0[0] * u0[0] + u0[2] * u0[2]) / (rho * rho);

        CHECK(std::abs(dens3d - dens2d) < 1e-6 * std::max(1.0, dens2d));
    }
}
