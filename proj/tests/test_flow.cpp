#include <gtest/gtest.h>

#include <array>
#include <filesystem>
#include <fstream>

#include <boost/numeric/odeint.hpp>

#include "rollcones/errors.hpp"
#include "rollcones/flow.hpp"
#include "rollcones/hill.hpp"
#include "support.hpp"

using namespace rollcones;

namespace {

CoefficientCurve constant(const AlgebraVector& a)
{
    CoefficientCurve c;
    c.metric = a.metric;
    c.a = [a](double) { return a; };
    c.a_dot = [m = a.metric](double) { return AlgebraVector::zero(m); };
    return c;
}

// Space angular velocity (cos t, sin t, 1/2) in so3.
CoefficientCurve precession()
{
    CoefficientCurve c;
    c.metric = Metric::Euclidean;
    c.a = [](double t) { return hat({std::cos(t), std::sin(t), 0.5}); };
    c.a_dot = [](double t) { return hat({-std::sin(t), std::cos(t), 0.0}); };
    return c;
}

// In the frame rotating about e3 the precession has constant velocity
// (1, 0, 1/2) - e3, so g(t) = exp(t e3) exp(t (1, 0, -1/2)).
Eigen::Matrix3d precession_exact(double t)
{
    return test::expm(t * Eigen::MatrixXd(to_matrix(hat({0, 0, 1})))) *
           test::expm(t * Eigen::MatrixXd(to_matrix(hat({1, 0, -0.5}))));
}

GroupElement mathieu_endpoint(double h)
{
    return propagate(mathieu_system(1.0, 0.5).coefficients(), 2 * M_PI, h);
}

}  // namespace

TEST(Flow, ConstantVelocityMatchesExponential)
{
    for (const AlgebraVector& a : {basis::k(), basis::i(), 0.3 * basis::j() + 1.2 * basis::k(), hat({0.2, -1.0, 0.4})}) {
        const GroupElement g = propagate(constant(a), 2 * M_PI, 1e-3);
        EXPECT_LT(test::max_abs_diff(g.matrix(), exponential(a, 2 * M_PI).matrix()), 1e-8);
    }
}

TEST(Flow, PrecessionClosedForm)
{
    const FlowTrajectory traj = integrate_flow(precession(), 2 * M_PI, 1e-3);
    double err = 0;
    for (std::size_t i = 0; i < traj.size(); i += 50)
        err = std::max(err, test::max_abs_diff(traj.g[i].matrix(), precession_exact(traj.t[i])));
    EXPECT_LT(err, 1e-9);
    for (const auto& g : traj.g) EXPECT_LT(g.group_defect(), 1e-9);
}

TEST(Flow, So3MatchesOdeintOracle)
{
    using State = std::array<double, 3>;
    const Eigen::Vector3d x0(0.3, -0.5, 0.8);
    State x{x0[0], x0[1], x0[2]};
    const auto rhs = [](const State& s, State& ds, double t) {
        const Eigen::Vector3d w(std::cos(t), std::sin(t), 0.5);
        const Eigen::Vector3d d = w.cross(Eigen::Vector3d(s[0], s[1], s[2]));
        ds = {d[0], d[1], d[2]};
    };
    namespace odeint = boost::numeric::odeint;
    odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, x,
                               0.0, 10.0, 1e-3);
    const GroupElement g = propagate(precession(), 10.0, 1e-3);
    EXPECT_LT((g.matrix() * x0 - Eigen::Vector3d(x[0], x[1], x[2])).norm(), 1e-8);
}

TEST(Flow, StaysUnimodular)
{
    const FlowTrajectory traj = integrate_flow(mathieu_system(1.3, 0.8).coefficients(), 20.0, 1e-3);
    for (const auto& g : traj.g) EXPECT_LT(std::abs(g.determinant() - 1.0), 1e-9);
}

TEST(Flow, FourthOrderConvergence)
{
    const double h = 2 * M_PI / 200;
    const GroupElement g1 = mathieu_endpoint(h), g2 = mathieu_endpoint(h / 2), g4 = mathieu_endpoint(h / 4);
    const double ratio = (g1.matrix() - g2.matrix()).norm() / (g2.matrix() - g4.matrix()).norm();
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(Flow, NullVelocityIsRejected)
{
    EXPECT_THROW(integrate_flow(constant(basis::i() + basis::k()), 1.0, 1e-3), NullAngularVelocity);
    EXPECT_THROW(integrate_flow(constant(AlgebraVector::zero(Metric::Euclidean)), 1.0, 1e-3), NullAngularVelocity);
}

TEST(Flow, OversizedStepIsRejected)
{
    EXPECT_THROW(integrate_flow(constant(200.0 * basis::k()), 1.0, 0.1), StepTooLarge);
}

TEST(Flow, TrajectoryFields)
{
    const double omega = 1.0, eps = 0.5;
    const FlowTrajectory traj = integrate_flow(mathieu_system(omega, eps).coefficients(), 2 * M_PI, 1e-3);
    ASSERT_EQ(traj.size(), 6285u);
    EXPECT_NEAR(traj.step, 2 * M_PI / 6284, 1e-15);
    EXPECT_DOUBLE_EQ(traj.phase.front(), 0.0);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double q = omega * omega * (1 + eps * std::cos(traj.t[i]));
        EXPECT_NEAR(traj.speed[i], 2 * std::sqrt(q), 1e-12);
        EXPECT_NEAR(inner(traj.n[i], traj.n[i]), -1.0, 1e-12);
        EXPECT_NEAR(inner(traj.N[i], traj.N[i]), -1.0, 1e-9);
        const AlgebraVector pulled = adjoint(traj.g[i].inverse(), traj.a[i]);
        EXPECT_LT((pulled.coords - traj.A[i].coords).norm(), 1e-12 * (1 + pulled.coords.norm()));
        if (i) EXPECT_GE(traj.phase[i], traj.phase[i - 1]);
    }
    EXPECT_LT(test::max_abs_diff(traj.g.back().matrix(), mathieu_endpoint(1e-3).matrix()), 1e-14);
}

TEST(Flow, ConstantCoefficientsFreezeTheBodyCurve)
{
    const FlowTrajectory traj = integrate_flow(mathieu_system(0.7, 0.0).coefficients(), 2 * M_PI, 1e-3);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        EXPECT_LT((traj.n[i].coords - traj.n[0].coords).norm(), 1e-12);
        EXPECT_LT((traj.N[i].coords - traj.n[0].coords).norm(), 1e-9);
    }
}

TEST(Flow, MathieuBodyCurveHasCuspAtPi)
{
    const double h = 2 * M_PI / 4000;
    const FlowTrajectory traj = integrate_flow(mathieu_system(1.0, 0.5).coefficients(), 2 * M_PI, h);
    const SphereCurve body = body_curve(traj);
    EXPECT_EQ(body.kind, SphereKind::H2);
    const std::size_t mid = 2000;
    ASSERT_NEAR(traj.t[mid], M_PI, 1e-12);
    EXPECT_TRUE(body.cusp[mid]);
    EXPECT_LT(body.speed[mid], 1e-6);
    const AlgebraVector before = body.velocity[mid - 20], after = body.velocity[mid + 20];
    // Direction reverses through the cusp.
    EXPECT_LT(inner(before, after) / (norm(before) * norm(after)), -0.99);
    EXPECT_FALSE(body.cusp[mid / 2]);
}

TEST(Flow, MathieuSpaceCurveIsGeodesic)
{
    const FlowTrajectory traj = integrate_flow(mathieu_system(1.0, 0.5).coefficients(), 2 * M_PI, 1e-3);
    const SphereCurve space = space_curve(traj);
    const auto k = geodesic_curvature(space);
    int checked = 0;
    for (const auto& v : k) {
        if (!v) continue;
        EXPECT_LT(std::abs(*v), 1e-6);
        ++checked;
    }
    EXPECT_GT(checked, 6000);
    EXPECT_LT(body_velocity_crosscheck(traj), 1e-6);
}

TEST(Flow, TrajectoryCsv)
{
    const FlowTrajectory traj = integrate_flow(mathieu_system(1.0, 0.5).coefficients(), 1.0, 0.1);
    const auto path = std::filesystem::temp_directory_path() / "rollcones_test_traj.csv";
    write_trajectory_csv(path, traj);
    std::ifstream in(path);
    std::string line;
    int rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("t,", 0), 0u);
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, static_cast<int>(traj.size()));
    std::filesystem::remove(path);
}
