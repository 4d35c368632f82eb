#pragma once

/**
 * @file rolling.hpp
 * @brief Numerical certificates for the rolling-cones description of a flow.
 *
 * Given a sampled flow g(t) with space/body curves n(t), N(t):
 *  - rolling:       Ad_g N = n and Ad_g N' = n' (contact and no slip)
 *  - curvature:     K = k - |a| / |n'|
 *  - decomposition: Ad_g = P_n o R[Phi] o P_N^-1, Phi = integral of |a|
 * None of these throw on large residuals; they report.
 */

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rollcones/flow.hpp"
#include "rollcones/tolerances.hpp"

namespace rollcones {

struct RollingReport {
    std::vector<double> t;
    std::vector<double> contact;         ///< ||Ad_g N - n||
    std::vector<double> no_slip;         ///< ||Ad_g N_dot - n_dot||
    std::vector<double> raw_contact;     ///< ||Ad_g A - a||
    std::vector<double> raw_no_slip;     ///< ||Ad_g A_dot - a_dot||
    std::vector<double> bracket;         ///< ||[a, n]||
    std::vector<double> identity;        ///< ||n_dot - [a, n] - Ad_g N_dot||
    double max_contact = 0.0;
    double max_no_slip = 0.0;
    double max_raw_contact = 0.0;
    double max_raw_no_slip = 0.0;
    double max_bracket = 0.0;
    double max_identity = 0.0;
    double step = 0.0;
    Tolerances tolerances;

    bool passes() const { return max_contact <= tolerances.roll && max_no_slip <= tolerances.roll; }
};

RollingReport verify_rolling(const FlowTrajectory& traj, const Tolerances& tol = kDefaultTolerances);

struct CurvatureSample {
    double t = 0.0;
    double body = 0.0;       ///< K measured on N
    double space = 0.0;      ///< k measured on n
    double predicted = 0.0;  ///< k - |a| / |n_dot|
    double residual = 0.0;   ///< body - predicted
};

/// One sample per node where both curvatures exist and |n_dot| > tol.cusp.
std::vector<CurvatureSample> verify_curvature_relation(const FlowTrajectory& traj,
                                                       const Tolerances& tol = kDefaultTolerances);

struct DecompositionCertificate {
    std::vector<double> t;
    std::vector<double> phase;                    ///< Phi(t) used in R[Phi]
    std::vector<Eigen::Matrix3d> transport_space; ///< extended transport along n
    std::vector<Eigen::Matrix3d> transport_body;  ///< extended transport along N
    std::vector<Eigen::Matrix3d> rotation;        ///< R[Phi] about n(0)
    std::vector<double> residual;                 ///< spectral norm of Ad_g - composite
    double max_residual = 0.0;
    double max_phase_mismatch = 0.0;              ///< |Phi - trajectory phase|
};

/**
 * Build both transports and the rotation independently, compose them, and
 * compare with Ad_g at every node. The transport equation stays regular at
 * cusps of N or n, so cusp nodes are certified like any other.
 */
DecompositionCertificate decompose_flow(const FlowTrajectory& traj, const Tolerances& tol = kDefaultTolerances);

/**
 * |Theta - (theta - Phi)| at each node, with theta, Theta the tangent
 * rotation angles of n and N. Needs both curves free of cusps
 * (throws CuspInRange otherwise).
 */
std::vector<double> angle_bookkeeping(const FlowTrajectory& traj, const Tolerances& tol = kDefaultTolerances);

/// Largest relative curvature residual over samples whose |n_dot| is at least
/// floor_fraction of the largest |n_dot| on the grid.
double max_relative_curvature_residual(const FlowTrajectory& traj, const std::vector<CurvatureSample>& samples,
                                       double floor_fraction);

/**
 * Report document:
 *   {params, grid: {T, h, nodes}, tolerances, version,
 *    max_residuals: {contact, no_slip, curvature, decomposition}, per_node?}
 */
nlohmann::json rolling_report_json(const nlohmann::json& params, const FlowTrajectory& traj,
                                   const RollingReport& rolling, double curvature_residual,
                                   const DecompositionCertificate& decomposition, bool per_node);

nlohmann::json tolerances_json(const Tolerances& tol);

}  // namespace rollcones
