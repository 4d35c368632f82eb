#include "rollcones/flow.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "rollcones/errors.hpp"
#include "rollcones/numerics.hpp"

namespace rollcones {

namespace {

template <int D>
using Mat = Eigen::Matrix<double, D, D>;

template <int D>
Mat<D> coefficient_matrix(const CoefficientCurve& c, double t)
{
    return to_matrix(c.a(t));
}

template <int D>
Mat<D> rk4_step(const CoefficientCurve& c, double t, double h, const Mat<D>& g)
{
    const Mat<D> a0 = coefficient_matrix<D>(c, t);
    const Mat<D> am = coefficient_matrix<D>(c, t + h / 2);
    const Mat<D> a1 = coefficient_matrix<D>(c, t + h);
    const Mat<D> k1 = a0 * g;
    const Mat<D> k2 = am * (g + 0.5 * h * k1);
    const Mat<D> k3 = am * (g + 0.5 * h * k2);
    const Mat<D> k4 = a1 * (g + h * k3);
    return g + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Nearest group element at first order; returns the size of the correction.
double reproject(Mat<3>& g)
{
    Eigen::JacobiSVD<Mat<3>> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat<3> p = svd.matrixU() * svd.matrixV().transpose();
    const double moved = (p - g).norm();
    g = p;
    return moved;
}

double reproject(Mat<2>& g)
{
    const double det = g.determinant();
    if (!(det > 0)) return std::numeric_limits<double>::infinity();
    const Mat<2> p = g / std::sqrt(det);
    const double moved = (p - g).norm();
    g = p;
    return moved;
}

void check_speed(const CoefficientCurve& c, double t, const Tolerances& tol)
{
    const AlgebraVector a = c.a(t);
    if (std::abs(inner(a, a)) <= tol.null) throw NullAngularVelocity(t);
}

template <int D>
std::vector<GroupElement> run(const CoefficientCurve& c, int n, double h, bool keep_all, const Tolerances& tol)
{
    Mat<D> g = Mat<D>::Identity();
    std::vector<GroupElement> out;
    if (keep_all) out.reserve(n + 1);
    if (keep_all) out.emplace_back(c.metric, g);
    check_speed(c, 0.0, tol);
    for (int i = 0; i < n; ++i) {
        const double t = i * h;
        g = rk4_step<D>(c, t, h, g);
        const double moved = reproject(g);
        if (moved > tol.step_limit) throw StepTooLarge(t + h, moved);
        check_speed(c, (i + 1) * h, tol);
        if (keep_all) out.emplace_back(c.metric, g);
    }
    if (!keep_all) out.emplace_back(c.metric, g);
    return out;
}

std::vector<GroupElement> run(const CoefficientCurve& c, int n, double h, bool keep_all, const Tolerances& tol)
{
    if (!c.a) throw ContractViolation("integrate_flow: coefficient curve has no a(t)");
    return c.metric == Metric::Euclidean ? run<3>(c, n, h, keep_all, tol) : run<2>(c, n, h, keep_all, tol);
}

std::vector<AlgebraVector> differentiate_samples(const std::vector<AlgebraVector>& f, double h)
{
    std::vector<Eigen::Vector3d> raw;
    raw.reserve(f.size());
    for (const auto& v : f) raw.push_back(v.coords);
    const auto d = numerics::differentiate(std::span<const Eigen::Vector3d>(raw), h);
    std::vector<AlgebraVector> out;
    out.reserve(d.size());
    for (const auto& v : d) out.emplace_back(f.front().metric, v);
    return out;
}

// Ad_{g^-1} x evaluated in extended precision and rounded once per coordinate.
AlgebraVector pull_back(const GroupElement& g, const AlgebraVector& x)
{
    using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
    const Wide G = g.matrix().cast<long double>();
    const Wide y = G.inverse() * to_matrix(x).cast<long double>() * G;
    if (g.metric() == Metric::Euclidean) {
        return {Metric::Euclidean, static_cast<double>(y(2, 1)), static_cast<double>(y(0, 2)),
                static_cast<double>(y(1, 0))};
    }
    return {Metric::Minkowski, static_cast<double>(y(0, 0) - y(1, 1)), static_cast<double>(y(0, 1) + y(1, 0)),
            static_cast<double>(y(0, 1) - y(1, 0))};
}

}  // namespace

FlowTrajectory integrate_flow(const CoefficientCurve& c, double T, double h, const Tolerances& tol)
{
    const int steps = numerics::step_count(T, h);
    const double dt = T / steps;

    FlowTrajectory traj;
    traj.metric = c.metric;
    traj.step = dt;
    traj.g = run(c, steps, dt, true, tol);

    const std::size_t n = traj.g.size();
    traj.t.resize(n);
    traj.a.reserve(n);
    traj.A.reserve(n);
    traj.n.reserve(n);
    traj.N.reserve(n);
    traj.speed.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        traj.t[i] = static_cast<double>(i) * dt;
        const AlgebraVector a = c.a(traj.t[i]);
        const AlgebraVector A = adjoint(traj.g[i].inverse(), a);
        traj.speed[i] = norm(a);
        traj.a.push_back(a);
        traj.A.push_back(A);
        traj.n.push_back(a / traj.speed[i]);
        traj.N.push_back(A / norm(A));
    }
    traj.phase = numerics::cumulative_trapezoid(traj.speed, traj.t);

    if (c.a_dot) {
        traj.a_dot.reserve(n);
        traj.n_dot.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const AlgebraVector ad = c.a_dot(traj.t[i]);
            const AlgebraVector& nn = traj.n[i];
            // d/dt (a/|a|) = (a' - <n,n> <n,a'> n) / |a|
            traj.a_dot.push_back(ad);
            traj.n_dot.push_back((ad - inner(nn, nn) * inner(nn, ad) * nn) / traj.speed[i]);
        }
    } else {
        traj.a_dot = differentiate_samples(traj.a, dt);
        traj.n_dot = differentiate_samples(traj.n, dt);
    }
    traj.A_dot = differentiate_samples(traj.A, dt);
    traj.N_dot = differentiate_samples(traj.N, dt);
    return traj;
}

GroupElement propagate(const CoefficientCurve& c, double T, double h, const Tolerances& tol)
{
    const int steps = numerics::step_count(T, h);
    return run(c, steps, T / steps, false, tol).back();
}

SphereCurve body_curve(const FlowTrajectory& traj, const Tolerances& tol)
{
    // Far out on H11 the samples of N are large while <N,N> = 1; differencing
    // or bracketing them there cancels badly, so derivatives and the normal
    // are pulled back: N' = Ad_{g^-1} n', N'' = Ad_{g^-1} (n'' - [a, n']),
    // [N, N'] = Ad_{g^-1} [n, n'].
    const auto n_ddot = differentiate_samples(traj.n_dot, traj.step);
    std::vector<AlgebraVector> vel, acc, normal;
    vel.reserve(traj.size());
    acc.reserve(traj.size());
    normal.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        vel.push_back(pull_back(traj.g[i], traj.n_dot[i]));
        acc.push_back(pull_back(traj.g[i], n_ddot[i] - bracket(traj.a[i], traj.n_dot[i])));
        normal.push_back(pull_back(traj.g[i], bracket(traj.n[i], traj.n_dot[i])));
    }
    SphereCurve c =
        make_sphere_curve(sphere_kind_of(traj.N.front()), traj.t, traj.N, std::move(vel), std::move(acc), tol);
    c.normal = std::move(normal);
    return c;
}

SphereCurve space_curve(const FlowTrajectory& traj, const Tolerances& tol)
{
    return make_sphere_curve(sphere_kind_of(traj.n.front()), traj.t, traj.n, traj.n_dot, std::nullopt, tol);
}

double body_velocity_crosscheck(const FlowTrajectory& traj)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const AlgebraVector pulled = adjoint(traj.g[i].inverse(), traj.n_dot[i]);
        worst = std::max(worst, (pulled.coords - traj.N_dot[i].coords).norm());
    }
    return worst;
}

void write_trajectory_csv(const std::filesystem::path& path, const FlowTrajectory& traj)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    const int d = group_dimension(traj.metric);
    out << "t";
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) out << ",g" << r << c;
    for (const char* name : {"a", "A", "n", "N"})
        for (int k = 1; k <= 3; ++k) out << ',' << name << k;
    out << ",speed,phase\n";
    out << std::setprecision(15);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << traj.t[i];
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) out << ',' << traj.g[i](r, c);
        for (const auto* series : {&traj.a, &traj.A, &traj.n, &traj.N})
            for (int k = 0; k < 3; ++k) out << ',' << (*series)[i][k];
        out << ',' << traj.speed[i] << ',' << traj.phase[i] << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace rollcones
