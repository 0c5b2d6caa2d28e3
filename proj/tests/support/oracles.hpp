#ifndef BOOJUM_TEST_ORACLES_HPP
#define BOOJUM_TEST_ORACLES_HPP

// Test-side oracles, independent of the library's own numerics.

#include <Eigen/Dense>
#include <array>
#include <random>

#include "boojum/tensor.hpp"

namespace testing_oracles {

/// dense symmetric eigensolver oracle (Eigen), sorted ascending
inline std::array<double, 3> spectrum_of(const boojum::Mat3& q) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = q(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    const auto& v = es.eigenvalues();
    return {v[0], v[1], v[2]};
}

inline std::array<double, 3> top_eigenvector(const boojum::Mat3& q) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = q(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    const auto v = es.eigenvectors().col(2);
    return {v[0], v[1], v[2]};
}

inline boojum::UVector random_unit_u(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    boojum::UVector u = {g(rng), g(rng), g(rng)};
    return boojum::normalized(u);
}

inline boojum::WVector random_unit_w(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    boojum::WVector w = {g(rng), g(rng), g(rng), g(rng), g(rng)};
    double n = 0;
    for (double c : w) n += c * c;
    n = std::sqrt(n);
    for (double& c : w) c /= n;
    return w;
}

}  // namespace testing_oracles

#endif
