#pragma once

// Shared helpers for the test suites: seeded random inputs and a few
// independent oracles that do not go through the library.

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "rollcones/lie_algebra.hpp"

namespace rollcones::test {

inline std::mt19937_64& rng()
{
    static std::mt19937_64 engine(20240611);
    return engine;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline AlgebraVector random_vector(Metric m, double scale = 1.0)
{
    return {m, scale * Eigen::Vector3d(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1))};
}

/// Matrix exponential by Pade scaling-and-squaring, independent of the closed forms.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& x) { return x.exp(); }

/// Random group element: product of a few exponentials of random algebra vectors.
inline GroupElement random_group(Metric m, double scale = 1.0)
{
    const int d = group_dimension(m);
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < 3; ++i) g = g * expm(to_matrix(random_vector(m, scale)));
    return GroupElement(m, g);
}

/// Coordinates of a matrix in the algebra, computed from the defining formulas
/// rather than from_matrix: sl2 coordinates (m00 - m11, m01 + m10, m01 - m10),
/// so3 coordinates (m21, m02, m10).
inline Eigen::Vector3d coordinates(Metric m, const Eigen::MatrixXd& x)
{
    if (m == Metric::Euclidean) return {x(2, 1), x(0, 2), x(1, 0)};
    return {x(0, 0) - x(1, 1), x(0, 1) + x(1, 0), x(0, 1) - x(1, 0)};
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace rollcones::test
