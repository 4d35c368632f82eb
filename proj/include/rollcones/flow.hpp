#pragma once

/**
 * @file flow.hpp
 * @brief Integration of g' = a(t) g, g(0) = I on SO3 or SL2.
 *
 * Classical RK4 on the matrix equation followed by a projection back onto
 * the group after every step (polar factor for SO3, det^-1/2 scaling for
 * SL2). The scheme is interchangeable: everything downstream only consumes
 * the sampled FlowTrajectory.
 */

#include <filesystem>
#include <functional>
#include <vector>

#include "rollcones/lie_algebra.hpp"
#include "rollcones/pseudosphere.hpp"
#include "rollcones/tolerances.hpp"

namespace rollcones {

/// Space angular velocity a(t), with an optional analytic derivative.
struct CoefficientCurve {
    Metric metric = Metric::Minkowski;
    std::function<AlgebraVector(double)> a;
    std::function<AlgebraVector(double)> a_dot;  ///< empty: differentiate numerically
};

/**
 * Samples of a flow on a uniform grid t_i = i T / n.
 *
 * body = Ad_{g^-1} space for both the raw (a, A) and normalised (n, N) pairs.
 * n_dot uses the analytic derivative when the coefficient curve supplies
 * one; N_dot and A_dot are always five-point differences of the stored
 * samples, so the no-slip relation is checked rather than assumed.
 */
struct FlowTrajectory {
    Metric metric = Metric::Minkowski;
    double step = 0.0;
    std::vector<double> t;
    std::vector<GroupElement> g;
    std::vector<AlgebraVector> a, A, a_dot, A_dot;
    std::vector<AlgebraVector> n, N, n_dot, N_dot;
    std::vector<double> speed;  ///< |a(t)|
    std::vector<double> phase;  ///< running trapezoid integral of |a|

    std::size_t size() const { return t.size(); }
    double duration() const { return t.empty() ? 0.0 : t.back(); }
};

/// Integrate over [0, T] with step at most h, sampling every step.
/// Throws NullAngularVelocity if |a| <= tol.null at a node, StepTooLarge if a
/// projection moves g by more than tol.step_limit.
FlowTrajectory integrate_flow(const CoefficientCurve& c, double T, double h,
                              const Tolerances& tol = kDefaultTolerances);

/// Same integrator, returning only g(T). No samples are stored.
GroupElement propagate(const CoefficientCurve& c, double T, double h,
                       const Tolerances& tol = kDefaultTolerances);

/// Body curve N(t); velocity and acceleration are pullbacks of space-frame
/// derivatives, Ad_{g^-1} n_dot and Ad_{g^-1} (n_ddot - [a, n_dot]).
SphereCurve body_curve(const FlowTrajectory& traj, const Tolerances& tol = kDefaultTolerances);

/// Space curve n(t) with velocity n_dot.
SphereCurve space_curve(const FlowTrajectory& traj, const Tolerances& tol = kDefaultTolerances);

/// Max over nodes of ||pullback N_dot - differenced N_dot||, the body-curve cross-check.
double body_velocity_crosscheck(const FlowTrajectory& traj);

/// CSV: t, g entries row-major, a, A, n, N coordinates, |a|, phase.
void write_trajectory_csv(const std::filesystem::path& path, const FlowTrajectory& traj);

}  // namespace rollcones
