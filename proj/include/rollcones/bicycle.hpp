#pragma once

/**
 * @file bicycle.hpp
 * @brief Bicycle model: a segment RF of length l whose rear end R only moves
 *        along the segment while the front end F follows a prescribed track.
 *
 * The frame angle obeys l theta' = x' sin(theta) - y' cos(theta) with the
 * rear point R = F + l (cos theta, sin theta). Writing theta = 2 arg(u + iv)
 * linearises it to an SL2 flow with a = (-x', -y', 0) / l.
 */

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rollcones/flow.hpp"
#include "rollcones/hill.hpp"
#include "rollcones/tolerances.hpp"

namespace rollcones {

/// Front track F(s). For closed tracks F is extended periodically with period `perimeter`.
struct FrontTrack {
    std::string description;
    std::function<Eigen::Vector2d(double)> position;
    std::function<Eigen::Vector2d(double)> velocity;
    std::function<Eigen::Vector2d(double)> acceleration;
    std::function<double(double)> curvature;  ///< signed, positive when turning left
    double perimeter = 0.0;
    bool closed = false;
    bool arc_length = true;
    double area = 0.0;  ///< signed enclosed area, positive counterclockwise
};

/// Counterclockwise circle of radius r about the origin, starting at (r, 0).
FrontTrack circle_track(double r);

/// Counterclockwise ellipse with semi-axes a (x) and b (y), reparametrised by arc length.
FrontTrack ellipse_track(double a, double b);

/// Straight line F(s) = (s, 0). Not closed.
FrontTrack line_track();

/// Closed periodic cubic spline through the vertices, reparametrised by arc
/// length. A repeated final vertex is dropped. Needs at least 3 distinct vertices.
FrontTrack polyline_track(std::span<const Eigen::Vector2d> vertices);

/// Polyline track from a CSV of x,y rows (an optional non-numeric header is skipped).
FrontTrack load_polyline_csv(const std::filesystem::path& path);

/// "circle:r", "ellipse:a,b", or a path to a polyline CSV.
/// Throws std::invalid_argument for malformed built-in specs.
FrontTrack parse_track(const std::string& spec);

struct BicycleConfig {
    double ell = 1.0;
    double theta0 = 0.0;
};

/// SL2 coefficient curve a = (-x', -y', 0) / l. Throws ContractViolation for l <= 0.
CoefficientCurve bicycle_system(const FrontTrack& track, double ell);

struct RearTrack {
    BicycleConfig config;
    std::vector<double> t;
    std::vector<double> theta;  ///< continuous lift
    std::vector<Eigen::Vector2d> front;
    std::vector<Eigen::Vector2d> rear;
    std::vector<double> slip;   ///< |rear velocity component across the frame| (differenced velocity)
    double max_slip = 0.0;

    double closure() const { return (rear.back() - rear.front()).norm(); }
    double turning() const { return theta.back() - theta.front(); }
};

/// RK4 on the frame-angle equation over [0, T] with step at most h.
RearTrack rear_track(const FrontTrack& track, const BicycleConfig& cfg, double T, double h);

/// 2 arg(u + iv). Throws ZeroSpinor for (0, 0).
double spinor_angle(double u, double v);

/// Frame angles obtained from the SL2 flow acting on the spinor
/// (cos theta0/2, sin theta0/2), on the same grid as rear_track.
std::vector<double> spinor_angles(const FrontTrack& track, const BicycleConfig& cfg, double T, double h,
                                  const Tolerances& tol = kDefaultTolerances);

struct BicycleMonodromy {
    double ell = 0.0;
    MonodromyReport report;
    std::vector<double> theta0;          ///< hyperbolic: 2 arg of each eigendirection
    std::vector<RearTrack> rear_tracks;  ///< hyperbolic: one lap from each theta0
};

/// Period map over one lap. Throws ContractViolation for open tracks.
BicycleMonodromy bicycle_monodromy(const FrontTrack& track, double ell, double h,
                                   const Tolerances& tol = kDefaultTolerances);

struct ReciprocalSample {
    double t = 0.0;
    double kappa = 0.0;      ///< front-track curvature
    double body = 0.0;       ///< K of the body curve on H11
    double predicted = 0.0;  ///< -1 / (l kappa)
    double residual = 0.0;   ///< body - predicted
};

struct ReciprocalReport {
    std::vector<ReciprocalSample> samples;
    double max_space_curvature = 0.0;  ///< sup |k| of n, zero on the equator
    double max_residual = 0.0;
    FlowTrajectory trajectory;
};

/// Compare the body-curve curvature with -1 / (l kappa) over one lap.
/// Throws FlatPoint where kappa <= tol.cusp.
ReciprocalReport reciprocal_curvature_check(const FrontTrack& track, double ell, double h,
                                            const Tolerances& tol = kDefaultTolerances);

struct PrytzRow {
    double ell = 0.0;
    double turning = 0.0;   ///< Delta theta over one lap from theta0 = first entry of theta0s
    double scaled = 0.0;    ///< turning * l^2
    double error = 0.0;     ///< |scaled - area|
    double rigidity = 0.0;  ///< max pairwise spread of Delta theta over theta0s
};

struct PrytzTable {
    double area = 0.0;
    std::vector<PrytzRow> rows;
    double error_slope = 0.0;     ///< log-log slope of error against l
    double rigidity_slope = 0.0;  ///< log-log slope of rigidity against l
};

PrytzTable prytz_asymptotics(const FrontTrack& track, std::span<const double> ells, double h,
                             std::span<const double> theta0s = {}, unsigned threads = 0);

struct LemmaRow {
    double ell = 0.0;
    double angle = 0.0;           ///< rotation angle of Ad_{g(L)}
    double angle_error = 0.0;     ///< |angle - area / l^2|
    double axis_deviation = 0.0;  ///< sqrt(x1^2 + x2^2) / |x3| of the fixed axis
    double axis_slope = 0.0;      ///< |x3| / sqrt(x1^2 + x2^2)
    AlgebraVector axis;           ///< unit timelike fixed axis
};

struct LemmaTable {
    double area = 0.0;
    std::vector<LemmaRow> rows;
    double angle_error_slope = 0.0;
    double axis_slope_order = 0.0;  ///< log-log slope of axis_deviation against l
};

/// Rotation angle and axis of Ad over one lap for each l. Throws NotElliptic
/// when some M_l has |tr| >= 2; the parabolic band is not applied here.
LemmaTable lemma_ad_verification(const FrontTrack& track, std::span<const double> ells, double h,
                                 const Tolerances& tol = kDefaultTolerances);

/// CSV "t,theta,fx,fy,rx,ry".
void write_rear_track_csv(const std::filesystem::path& path, const RearTrack& rear);

/// CSV "t,a1,a2,a3" of the body curve N(t).
void write_body_curve_csv(const std::filesystem::path& path, const FlowTrajectory& traj);

}  // namespace rollcones
