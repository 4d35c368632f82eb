#pragma once

/**
 * @file pseudosphere.hpp
 * @brief Curves on the unit (pseudo)sphere of so3 or sl2.
 *
 * Three surfaces are handled uniformly:
 *  - S2:  <x,x> = +1 in so3 (Riemannian)
 *  - H2:  <x,x> = -1 in sl2, the hyperbolic plane (Riemannian)
 *  - H11: <x,x> = +1 in sl2, the one-sheeted hyperboloid (Lorentzian)
 *
 * A curve's normal direction is [x, x'] where ' is the arc-length derivative;
 * geodesic curvature is the coefficient of that normal in x''.
 */

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rollcones/lie_algebra.hpp"
#include "rollcones/tolerances.hpp"

namespace rollcones {

enum class SphereKind { S2, H2, H11 };

const char* to_string(SphereKind k);
Metric sphere_metric(SphereKind k);
/// <x,x> on the surface: +1 for S2 and H11, -1 for H2.
double sphere_sign(SphereKind k);
/// Surface a point of unit (pseudo)norm lies on. Throws ContractViolation for null points.
SphereKind sphere_kind_of(const AlgebraVector& p);

/**
 * Sampled curve on a pseudosphere over a uniform parameter grid.
 *
 * velocity and acceleration are derivatives with respect to the grid
 * parameter t, which need not be arc length. unit_tangent is zero and
 * cusp is set wherever |velocity| < cusp tolerance.
 */
struct SphereCurve {
    SphereKind kind = SphereKind::S2;
    std::vector<double> t;
    std::vector<AlgebraVector> point;
    std::vector<AlgebraVector> velocity;
    std::vector<AlgebraVector> acceleration;
    std::vector<AlgebraVector> unit_tangent;
    std::vector<AlgebraVector> normal;  ///< [x, x'] when supplied by the producer; empty: computed on use
    std::vector<double> speed;
    std::vector<double> arc_length;
    std::vector<bool> cusp;

    std::size_t size() const { return t.size(); }
    double step() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

/**
 * Assemble a curve from samples. Accelerations default to five-point
 * differences of the velocities. Throws ContractViolation when points leave
 * the surface or velocities are not tangent (beyond 1e-6 relative to the coordinate size).
 */
SphereCurve make_sphere_curve(SphereKind kind, std::vector<double> t, std::vector<AlgebraVector> points,
                              std::vector<AlgebraVector> velocities,
                              std::optional<std::vector<AlgebraVector>> accelerations = std::nullopt,
                              const Tolerances& tol = kDefaultTolerances);

/// Geodesic curvature at each node; empty at cusp nodes. Throws AllCusps if every node is a cusp.
std::vector<std::optional<double>> geodesic_curvature(const SphereCurve& curve);

/**
 * Parallel transport operators along the curve, extended to the whole
 * algebra by sending point(0) to point(t). Entry i maps coordinates at t[0]
 * to coordinates at t[i]. Regular through cusps.
 */
std::vector<Eigen::Matrix3d> transport_operators(const SphereCurve& curve);

/// Parallel transport of a tangent vector at point(0) to parameter t.
AlgebraVector parallel_transport(const SphereCurve& curve, const AlgebraVector& v0, double t,
                                 const Tolerances& tol = kDefaultTolerances);

/// Rotation of the tangent plane at base by angle (radians, or rapidity on H11).
struct TangentRotation {
    AlgebraVector base;
    double angle = 0.0;
};

AlgebraVector tangent_rotation_apply(const TangentRotation& r, const AlgebraVector& v,
                                     const Tolerances& tol = kDefaultTolerances);

/// The rotation above as a map on the whole algebra, fixing base.
Eigen::Matrix3d tangent_rotation_matrix(const TangentRotation& r);

/// theta(t_i) = integral of k |velocity| over [t_0, t_i] at every node.
/// Throws CuspInRange at the first cusp or causal-type change of the tangent.
std::vector<double> rotation_angles(const SphereCurve& curve);

/// theta(t) with linear interpolation between nodes.
double rotation_angle_along(const SphereCurve& curve, double t);

/**
 * Rebuild a curve from its geodesic curvature k(s), given the initial point
 * and unit tangent, by integrating the moving frame
 *   x' = e,  e' = k [x, e] - (<e,e> / <x,x>) x
 * with classical RK4 over [0, S]. The frame is re-orthonormalised in the
 * ambient metric every 100 steps.
 */
SphereCurve reconstruct_from_curvature(SphereKind kind, const std::function<double(double)>& k,
                                       const AlgebraVector& x0, const AlgebraVector& e0, double S,
                                       double h, const Tolerances& tol = kDefaultTolerances);

/// Poincare-disk image (x1, x2) / (1 + x3) of an upper-sheet point of H2.
Eigen::Vector2d poincare_disk(const AlgebraVector& p);

/// CSV with header "x,y", one projected point per row.
void write_poincare_csv(const std::filesystem::path& path, std::span<const AlgebraVector> points);

}  // namespace rollcones
