#pragma once

/**
 * @file lie_algebra.hpp
 * @brief so3 and sl2(R) as three-dimensional metric spaces.
 *
 * Elements of either algebra are stored as coordinates in a fixed orthonormal
 * basis; the matrix form is a view computed on demand.
 *
 *  - so3: basis e1, e2, e3 mapped through the hat map  w -> (x -> w cross x).
 *    The metric <a,b> = -tr(ab)/2 is the Euclidean dot product of coordinates.
 *  - sl2: a = 1/2 [[a1, a2 + a3], [a2 - a3, -a1]], i.e. a = a1 i + a2 j + a3 k with
 *    i = 1/2 diag(1,-1), j = 1/2 [[0,1],[1,0]], k = 1/2 [[0,1],[-1,0]].
 *    The metric <a,b> = 2 tr(ab) = a1 b1 + a2 b2 - a3 b3 has signature (+,+,-).
 */

#include <Eigen/Dense>

#include "rollcones/tolerances.hpp"

namespace rollcones {

enum class Metric { Euclidean, Minkowski };

enum class CausalType { Spacelike, Timelike, Lightlike };

const char* to_string(Metric m);
const char* to_string(CausalType c);

/// Dimension of the defining representation: 3 for SO3, 2 for SL2.
inline int group_dimension(Metric m) { return m == Metric::Euclidean ? 3 : 2; }

/// Gram matrix of the coordinate basis: diag(1,1,1) or diag(1,1,-1).
Eigen::Matrix3d gram(Metric m);

/// Up to 3x3 without heap allocation; holds both SO3 and SL2 matrices.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

struct AlgebraVector {
    Eigen::Vector3d coords = Eigen::Vector3d::Zero();
    Metric metric = Metric::Minkowski;

    AlgebraVector() = default;
    AlgebraVector(Metric m, const Eigen::Vector3d& c) : coords(c), metric(m) {}
    AlgebraVector(Metric m, double c1, double c2, double c3) : coords(c1, c2, c3), metric(m) {}

    static AlgebraVector zero(Metric m) { return {m, Eigen::Vector3d::Zero()}; }

    double operator[](int i) const { return coords[i]; }

    AlgebraVector operator+(const AlgebraVector& o) const;
    AlgebraVector operator-(const AlgebraVector& o) const;
    AlgebraVector operator-() const { return {metric, -coords}; }
    AlgebraVector operator*(double s) const { return {metric, coords * s}; }
    AlgebraVector operator/(double s) const { return {metric, coords / s}; }
};

inline AlgebraVector operator*(double s, const AlgebraVector& a) { return a * s; }

/// Basis of sl2 in the (+,+,-) convention.
namespace basis {
inline AlgebraVector i() { return {Metric::Minkowski, 1, 0, 0}; }
inline AlgebraVector j() { return {Metric::Minkowski, 0, 1, 0}; }
inline AlgebraVector k() { return {Metric::Minkowski, 0, 0, 1}; }
}  // namespace basis

/// so3 element acting as x -> w cross x.
inline AlgebraVector hat(const Eigen::Vector3d& w) { return {Metric::Euclidean, w}; }

double inner(const AlgebraVector& a, const AlgebraVector& b);
AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b);
/// sqrt(|<a,a>|); zero for lightlike vectors.
double norm(const AlgebraVector& a);
CausalType causal_type(const AlgebraVector& a, double null_tol = kDefaultTolerances.null);

SmallMatrix to_matrix(const AlgebraVector& a);
/// Inverse of to_matrix; the trace part of an sl2 input is discarded.
AlgebraVector from_matrix(Metric m, const SmallMatrix& x);

/// Matrix of b -> [a, b] acting on coordinates.
Eigen::Matrix3d ad_matrix(const AlgebraVector& a);

/// Element of SO3 (3x3) or SL2 (2x2).
class GroupElement {
public:
    GroupElement(Metric m, const SmallMatrix& entries);

    static GroupElement identity(Metric m);

    Metric metric() const { return metric_; }
    const SmallMatrix& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }

    double determinant() const { return m_.determinant(); }
    double trace() const { return m_.trace(); }
    GroupElement inverse() const;
    GroupElement operator*(const GroupElement& o) const;

    /// Distance from the group: |det - 1| and, for SO3, also ||g^T g - I||.
    double group_defect() const;

private:
    Metric metric_;
    SmallMatrix m_;
};

/// Conjugation g a g^-1. Throws ContractViolation if g is not unimodular within tol.
AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& a,
                      double tol = 1e3 * kDefaultTolerances.group);

/// Coordinate matrix of Ad_g. Columns are the images of the basis vectors.
Eigen::Matrix3d adjoint_matrix(const GroupElement& g);

/// exp(t a) in closed form: trigonometric, hyperbolic, or polynomial by causal type.
GroupElement exponential(const AlgebraVector& a, double t);

/// Timelike/spacelike/null axis of Ad_g: the traceless part of g (SL2) or the
/// rotation axis (SO3). Not normalised.
AlgebraVector adjoint_axis(const GroupElement& g);

}  // namespace rollcones
