#pragma once

/**
 * @file hill.hpp
 * @brief Hill's equation x'' + q(t) x = 0 as an SL2 flow, with the Mathieu
 *        potential q = w^2 (1 + e cos t) as the worked case.
 *
 * The first-order form (x, x')' = [[0, 1], [-q, 0]] (x, x') has sl2
 * coordinates a = (0, 1 - q, 1 + q) and <a,a> = -4q, so a(t) is timelike
 * exactly when q > 0 and n(t) lives on H2.
 */

#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rollcones/flow.hpp"
#include "rollcones/lie_algebra.hpp"

namespace rollcones {

struct HillSystem {
    std::function<double(double)> q;
    std::function<double(double)> q_dot;  ///< optional
    double period = 2 * M_PI;

    CoefficientCurve coefficients() const;
};

/// q = w^2 (1 + e cos t), period 2 pi. Throws PotentialVanishes for |e| >= 1,
/// ContractViolation for w <= 0.
HillSystem mathieu_system(double omega, double eps);

/// Closed-form body-curve curvature -4 w (1 + e cos t)^{3/2} / (e |sin t|).
/// Throws CuspAt when sin t = 0 (to 1e-12) and ContractViolation for e = 0.
double body_curvature_analytic(double omega, double eps, double t);

/// Throws PotentialVanishes if q <= null tolerance anywhere on the grid of [0, T] with step h.
void check_potential(const HillSystem& sys, double T, double h, const Tolerances& tol = kDefaultTolerances);

/// Flow of the Hill system over [0, T], sampled on the integrator grid.
FlowTrajectory hill_trajectory(const HillSystem& sys, double T, double h, const Tolerances& tol = kDefaultTolerances);

enum class MonodromyClass { Elliptic, Parabolic, Hyperbolic };
const char* to_string(MonodromyClass c);

struct MonodromyReport {
    GroupElement M = GroupElement::identity(Metric::Minkowski);
    double trace = 2.0;
    MonodromyClass kind = MonodromyClass::Parabolic;
    std::optional<double> rotation_angle;      ///< elliptic: arccos(tr/2) in (0, pi)
    std::optional<double> expansion_factor;    ///< hyperbolic: largest |eigenvalue|
    std::vector<Eigen::Vector2d> eigendirections;  ///< hyperbolic: unit eigenvectors, expanding first

    /// All solutions bounded for all time iff elliptic.
    bool bounded() const { return kind == MonodromyClass::Elliptic; }
};

/// Classify an SL2 period map by |tr| against 2 +- band.
MonodromyReport classify_monodromy(const GroupElement& M, double band = kDefaultTolerances.classify);

/// {class, trace, matrix, bounded, rotation_angle, expansion_factor, eigendirections}.
nlohmann::json monodromy_json(const MonodromyReport& r);

/// Period map g(period) of the Hill system.
MonodromyReport monodromy(const HillSystem& sys, double h, const Tolerances& tol = kDefaultTolerances);

/// max over 1 <= |k| <= kmax of ||M^k|| (Frobenius) stays at or below bound.
bool powers_bounded(const GroupElement& M, int kmax = 50, double bound = 1e3);

/// Uniform range lo:hi:count (count = 1 gives just lo).
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;

    std::vector<double> values() const;
    /// Parse "lo:hi:n". Throws std::invalid_argument on malformed input.
    static Range parse(const std::string& text);
};

struct TongueCell {
    double omega = 0.0;
    double eps = 0.0;
    std::optional<MonodromyClass> kind;  ///< empty when the cell failed
    double trace = 0.0;
    std::string error;
};

struct TongueMap {
    Range omega;
    Range eps;
    double h = 0.0;
    std::vector<TongueCell> cells;  ///< row-major: eps index outer, omega index inner

    const TongueCell& at(int omega_index, int eps_index) const
    {
        return cells[static_cast<std::size_t>(eps_index) * omega.count + omega_index];
    }
};

/// Classify every (omega, eps) cell of the Mathieu family. Cells run on up to
/// `threads` workers (0: hardware concurrency); per-cell errors are stored.
TongueMap tongue_scan(const Range& omega, const Range& eps, double h, unsigned threads = 0,
                      const Tolerances& tol = kDefaultTolerances);

/// CSV with header "omega,eps,class,trace"; failed cells report class "error".
void write_tongue_csv(const std::filesystem::path& path, const TongueMap& map);

/// Hyperbolic interval of the Mathieu family at fixed eps inside [center - half, center + half].
struct TongueInterval {
    bool found = false;
    double lo = 0.0;
    double hi = 0.0;
    double peak_omega = 0.0;
    double peak_excess = 0.0;  ///< max of |tr M| - 2 in the window
};

/// Locate the maximum of |tr M| by a coarse scan plus golden-section search,
/// then bisect |tr M| = 2 on either side of it.
TongueInterval locate_tongue(double eps, double center, double half_width, double h,
                             const Tolerances& tol = kDefaultTolerances);

struct DiskCurves {
    std::vector<AlgebraVector> space;        ///< n(t) on H2
    std::vector<AlgebraVector> body;         ///< N(t) on H2
    std::vector<Eigen::Vector2d> space_disk; ///< Poincare-disk images
    std::vector<Eigen::Vector2d> body_disk;
    std::vector<double> body_speed;          ///< |N_dot|
    MonodromyReport monodromy;
    int cusp_count = 0;                      ///< strict local minima of |N_dot| below 100 tol.cusp on [0, T)
    bool closed = false;                     ///< N(T) = N(0) within 1e-6
    double max_body_radius = 0.0;            ///< sup of disk radius of N
};

DiskCurves poincare_disk_curves(double omega, double eps, double T, double h,
                                const Tolerances& tol = kDefaultTolerances);

}  // namespace rollcones
