#include "rollcones/pseudosphere.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "rollcones/errors.hpp"
#include "rollcones/numerics.hpp"

namespace rollcones {

namespace {

// Generator of parallel transport along x with velocity xd:
//   v -> -sigma (x <xd, v> - xd <x, v>)
// Tangent vectors obey v' = c x (parallel); x itself is carried to x(t).
Eigen::Matrix3d transport_generator(double sigma, const Eigen::Matrix3d& G, const Eigen::Vector3d& x,
                                    const Eigen::Vector3d& xd)
{
    return -sigma * (x * xd.transpose() - xd * x.transpose()) * G;
}

std::vector<Eigen::Vector3d> coords_of(std::span<const AlgebraVector> v)
{
    std::vector<Eigen::Vector3d> out;
    out.reserve(v.size());
    for (const auto& a : v) out.push_back(a.coords);
    return out;
}

}  // namespace

const char* to_string(SphereKind k)
{
    switch (k) {
    case SphereKind::S2: return "S2";
    case SphereKind::H2: return "H2";
    case SphereKind::H11: return "H11";
    }
    return "?";
}

Metric sphere_metric(SphereKind k) { return k == SphereKind::S2 ? Metric::Euclidean : Metric::Minkowski; }

double sphere_sign(SphereKind k) { return k == SphereKind::H2 ? -1.0 : 1.0; }

SphereKind sphere_kind_of(const AlgebraVector& p)
{
    if (p.metric == Metric::Euclidean) return SphereKind::S2;
    const double q = inner(p, p);
    if (std::abs(q) < 0.5) throw ContractViolation("sphere_kind_of: point is not on a unit pseudosphere");
    return q < 0 ? SphereKind::H2 : SphereKind::H11;
}

SphereCurve make_sphere_curve(SphereKind kind, std::vector<double> t, std::vector<AlgebraVector> points,
                              std::vector<AlgebraVector> velocities,
                              std::optional<std::vector<AlgebraVector>> accelerations, const Tolerances& tol)
{
    const std::size_t n = t.size();
    if (n < 2 || points.size() != n || velocities.size() != n) {
        throw ContractViolation("make_sphere_curve: need matching samples on at least two nodes");
    }
    const double sigma = sphere_sign(kind);
    const Metric metric = sphere_metric(kind);
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i].metric != metric || velocities[i].metric != metric) {
            throw ContractViolation("make_sphere_curve: sample metric does not match the surface");
        }
        // Relative to the coordinate size: far out on H2 or H11 the inner
        // products cancel terms of order |x|^2.
        const double px = points[i].coords.norm();
        if (std::abs(inner(points[i], points[i]) - sigma) > 1e-6 * std::max(1.0, px * px)) {
            throw ContractViolation("make_sphere_curve: point off the surface at t = " + std::to_string(t[i]));
        }
        const double pv = std::max(1.0, px) * velocities[i].coords.norm();
        if (std::abs(inner(points[i], velocities[i])) > 1e-6 * std::max(1.0, pv)) {
            throw ContractViolation("make_sphere_curve: velocity not tangent at t = " + std::to_string(t[i]));
        }
    }

    SphereCurve c;
    c.kind = kind;
    c.t = std::move(t);
    c.point = std::move(points);
    c.velocity = std::move(velocities);
    const double h = c.step();

    if (accelerations) {
        if (accelerations->size() != n) throw ContractViolation("make_sphere_curve: acceleration count");
        c.acceleration = std::move(*accelerations);
    } else {
        const auto vel = coords_of(c.velocity);
        const auto acc = numerics::differentiate(std::span<const Eigen::Vector3d>(vel), h);
        c.acceleration.reserve(n);
        for (const auto& a : acc) c.acceleration.emplace_back(metric, a);
    }

    c.speed.resize(n);
    c.cusp.resize(n);
    c.unit_tangent.resize(n, AlgebraVector::zero(metric));
    for (std::size_t i = 0; i < n; ++i) {
        c.speed[i] = norm(c.velocity[i]);
        c.cusp[i] = c.speed[i] < tol.cusp;
        if (!c.cusp[i]) c.unit_tangent[i] = c.velocity[i] / c.speed[i];
    }
    c.arc_length = numerics::cumulative_trapezoid(c.speed, c.t);
    return c;
}

namespace {

// Extended-precision <a,b>; points far out on H11 have large coordinates and O(1) norms.
long double precise_inner(const AlgebraVector& a, const AlgebraVector& b)
{
    const long double third = a.metric == Metric::Minkowski ? -1.0L : 1.0L;
    return static_cast<long double>(a[0]) * b[0] + static_cast<long double>(a[1]) * b[1] +
           third * static_cast<long double>(a[2]) * b[2];
}

}  // namespace

std::vector<std::optional<double>> geodesic_curvature(const SphereCurve& curve)
{
    std::vector<std::optional<double>> k(curve.size());
    bool any = false;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.cusp[i]) continue;
        const AlgebraVector m = curve.normal.empty() ? bracket(curve.point[i], curve.velocity[i]) : curve.normal[i];
        const long double mm = precise_inner(m, m);
        if (mm == 0.0L) continue;
        const long double vv = precise_inner(curve.velocity[i], curve.velocity[i]);
        k[i] = static_cast<double>(precise_inner(curve.acceleration[i], m) / (std::sqrt(std::abs(vv)) * mm));
        any = true;
    }
    if (!any) throw AllCusps();
    return k;
}

std::vector<Eigen::Matrix3d> transport_operators(const SphereCurve& curve)
{
    const double sigma = sphere_sign(curve.kind);
    const Eigen::Matrix3d G = gram(sphere_metric(curve.kind));
    std::vector<Eigen::Matrix3d> ops(curve.size());
    ops[0] = Eigen::Matrix3d::Identity();
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const double h = curve.t[i + 1] - curve.t[i];
        const auto& x0 = curve.point[i].coords;
        const auto& x1 = curve.point[i + 1].coords;
        const auto& v0 = curve.velocity[i].coords;
        const auto& v1 = curve.velocity[i + 1].coords;
        const Eigen::Vector3d xm = numerics::hermite(x0, v0, x1, v1, h, h / 2);
        const Eigen::Vector3d vm = numerics::hermite(v0, curve.acceleration[i].coords, v1,
                                                     curve.acceleration[i + 1].coords, h, h / 2);
        const Eigen::Matrix3d A0 = transport_generator(sigma, G, x0, v0);
        const Eigen::Matrix3d Am = transport_generator(sigma, G, xm, vm);
        const Eigen::Matrix3d A1 = transport_generator(sigma, G, x1, v1);
        const Eigen::Matrix3d& X = ops[i];
        const Eigen::Matrix3d k1 = A0 * X;
        const Eigen::Matrix3d k2 = Am * (X + 0.5 * h * k1);
        const Eigen::Matrix3d k3 = Am * (X + 0.5 * h * k2);
        const Eigen::Matrix3d k4 = A1 * (X + h * k3);
        ops[i + 1] = X + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return ops;
}

AlgebraVector parallel_transport(const SphereCurve& curve, const AlgebraVector& v0, double t,
                                 const Tolerances& tol)
{
    if (v0.metric != sphere_metric(curve.kind)) throw ContractViolation("parallel_transport: metric mismatch");
    if (std::abs(inner(v0, curve.point.front())) > tol.sphere * std::max(1.0, norm(v0))) {
        throw NotTangent("parallel_transport: initial vector is not tangent at the start point");
    }
    if (t < curve.t.front() || t > curve.t.back() + 1e-12) {
        throw ContractViolation("parallel_transport: t outside the curve's grid");
    }
    const double sigma = sphere_sign(curve.kind);
    const Eigen::Matrix3d G = gram(sphere_metric(curve.kind));
    const auto field = [&](std::size_t i, double tau) {
        const double h = curve.t[i + 1] - curve.t[i];
        const Eigen::Vector3d x = numerics::hermite(curve.point[i].coords, curve.velocity[i].coords,
                                                    curve.point[i + 1].coords, curve.velocity[i + 1].coords, h, tau);
        const Eigen::Vector3d xd = numerics::hermite(curve.velocity[i].coords, curve.acceleration[i].coords,
                                                     curve.velocity[i + 1].coords,
                                                     curve.acceleration[i + 1].coords, h, tau);
        return transport_generator(sigma, G, x, xd);
    };

    Eigen::Vector3d v = v0.coords;
    for (std::size_t i = 0; i + 1 < curve.size() && curve.t[i] < t; ++i) {
        const double h = std::min(curve.t[i + 1], t) - curve.t[i];
        const Eigen::Matrix3d A0 = field(i, 0.0);
        const Eigen::Matrix3d Am = field(i, h / 2);
        const Eigen::Matrix3d A1 = field(i, h);
        const Eigen::Vector3d k1 = A0 * v;
        const Eigen::Vector3d k2 = Am * (v + 0.5 * h * k1);
        const Eigen::Vector3d k3 = Am * (v + 0.5 * h * k2);
        const Eigen::Vector3d k4 = A1 * (v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return {v0.metric, v};
}

Eigen::Matrix3d tangent_rotation_matrix(const TangentRotation& r)
{
    const SphereKind kind = sphere_kind_of(r.base);
    const Eigen::Matrix3d J = ad_matrix(r.base);
    // On the tangent plane J^2 = -1 (S2, H2) or +1 (H11); J kills the base point.
    if (kind == SphereKind::H11) {
        return Eigen::Matrix3d::Identity() + std::sinh(r.angle) * J + (std::cosh(r.angle) - 1.0) * J * J;
    }
    return Eigen::Matrix3d::Identity() + std::sin(r.angle) * J + (1.0 - std::cos(r.angle)) * J * J;
}

AlgebraVector tangent_rotation_apply(const TangentRotation& r, const AlgebraVector& v, const Tolerances& tol)
{
    if (v.metric != r.base.metric) throw ContractViolation("tangent_rotation_apply: metric mismatch");
    if (std::abs(inner(v, r.base)) > tol.sphere * std::max(1.0, norm(v))) {
        throw NotTangent("tangent_rotation_apply: vector is not tangent at the base point");
    }
    const AlgebraVector jv = bracket(r.base, v);
    if (sphere_kind_of(r.base) == SphereKind::H11) {
        return std::cosh(r.angle) * v + std::sinh(r.angle) * jv;
    }
    return std::cos(r.angle) * v + std::sin(r.angle) * jv;
}

namespace {

std::vector<double> angles_upto(const SphereCurve& curve, std::size_t count)
{
    const auto k = geodesic_curvature(curve);
    std::vector<double> rate(count);
    double first_sign = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (!k[i]) throw CuspInRange(curve.t[i]);
        const double s = inner(curve.velocity[i], curve.velocity[i]);
        if (first_sign == 0.0) first_sign = s;
        if (s * first_sign <= 0.0) throw CuspInRange(curve.t[i]);
        rate[i] = *k[i] * curve.speed[i];
    }
    return numerics::cumulative_trapezoid(rate, std::span<const double>(curve.t.data(), count));
}

}  // namespace

std::vector<double> rotation_angles(const SphereCurve& curve) { return angles_upto(curve, curve.size()); }

double rotation_angle_along(const SphereCurve& curve, double t)
{
    if (t < curve.t.front() || t > curve.t.back() + 1e-12) {
        throw ContractViolation("rotation_angle_along: t outside the curve's grid");
    }
    std::size_t last = 0;
    while (last + 1 < curve.size() && curve.t[last] < t) ++last;
    const auto theta = angles_upto(curve, last + 1);
    if (last == 0) return 0.0;
    const double w = (t - curve.t[last - 1]) / (curve.t[last] - curve.t[last - 1]);
    return (1.0 - w) * theta[last - 1] + w * theta[last];
}

SphereCurve reconstruct_from_curvature(SphereKind kind, const std::function<double(double)>& k,
                                       const AlgebraVector& x0, const AlgebraVector& e0, double S, double h,
                                       const Tolerances& tol)
{
    const Metric metric = sphere_metric(kind);
    const double sigma = sphere_sign(kind);
    if (x0.metric != metric || e0.metric != metric) throw BadFrame("reconstruct: initial frame in the wrong algebra");
    if (std::abs(inner(x0, x0) - sigma) > tol.sphere) throw BadFrame("reconstruct: start point is not on the surface");
    const double eps = inner(e0, e0);
    if (std::abs(std::abs(eps) - 1.0) > tol.sphere) throw BadFrame("reconstruct: initial tangent is not unit length");
    if (std::abs(inner(x0, e0)) > tol.sphere) throw BadFrame("reconstruct: initial tangent is not tangent");
    const double eps_sign = eps > 0 ? 1.0 : -1.0;

    const int n = numerics::step_count(S, h);
    const double ds = S / n;

    struct Frame {
        AlgebraVector x, e;
    };
    const auto rhs = [&](double s, const Frame& f) {
        return Frame{f.e, k(s) * bracket(f.x, f.e) - (eps_sign / sigma) * f.x};
    };
    const auto axpy = [](const Frame& f, double a, const Frame& d) { return Frame{f.x + a * d.x, f.e + a * d.e}; };

    std::vector<double> grid(n + 1);
    std::vector<AlgebraVector> pts(n + 1), vel(n + 1);
    Frame f{x0, e0};
    for (int i = 0; i <= n; ++i) {
        grid[i] = i * ds;
        pts[i] = f.x;
        vel[i] = f.e;
        if (i == n) break;
        const double s = grid[i];
        const Frame k1 = rhs(s, f);
        const Frame k2 = rhs(s + ds / 2, axpy(f, ds / 2, k1));
        const Frame k3 = rhs(s + ds / 2, axpy(f, ds / 2, k2));
        const Frame k4 = rhs(s + ds, axpy(f, ds, k3));
        f.x = f.x + (ds / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
        f.e = f.e + (ds / 6.0) * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e);
        if ((i + 1) % 100 == 0) {
            f.x = f.x / std::sqrt(std::abs(inner(f.x, f.x)));
            f.e = f.e - (inner(f.e, f.x) / inner(f.x, f.x)) * f.x;
            f.e = f.e / std::sqrt(std::abs(inner(f.e, f.e)));
        }
    }
    return make_sphere_curve(kind, std::move(grid), std::move(pts), std::move(vel), std::nullopt, tol);
}

Eigen::Vector2d poincare_disk(const AlgebraVector& p)
{
    return Eigen::Vector2d(p.coords[0], p.coords[1]) / (1.0 + p.coords[2]);
}

void write_poincare_csv(const std::filesystem::path& path, std::span<const AlgebraVector> points)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "x,y\n" << std::setprecision(12);
    for (const auto& p : points) {
        const Eigen::Vector2d d = poincare_disk(p);
        out << d.x() << ',' << d.y() << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace rollcones
