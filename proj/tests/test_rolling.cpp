#include <gtest/gtest.h>

#include <algorithm>

#include "rollcones/errors.hpp"
#include "rollcones/hill.hpp"
#include "rollcones/rolling.hpp"
#include "support.hpp"

using namespace rollcones;

namespace {

CoefficientCurve precession()
{
    CoefficientCurve c;
    c.metric = Metric::Euclidean;
    c.a = [](double t) { return hat({std::cos(t), std::sin(t), 0.5}); };
    c.a_dot = [](double t) { return hat({-std::sin(t), std::cos(t), 0.0}); };
    return c;
}

FlowTrajectory mathieu(double h = 1e-3) { return hill_trajectory(mathieu_system(1.0, 0.5), 2 * M_PI, h); }

}  // namespace

TEST(Rolling, ConstantVelocityRollsTrivially)
{
    CoefficientCurve c;
    c.a = [](double) { return 0.4 * basis::i() + 1.1 * basis::k(); };
    c.a_dot = [](double) { return AlgebraVector::zero(Metric::Minkowski); };
    const FlowTrajectory traj = integrate_flow(c, 5.0, 1e-3);
    const RollingReport r = verify_rolling(traj);
    EXPECT_LT(r.max_contact, 1e-9);
    EXPECT_LT(r.max_no_slip, 1e-9);
    EXPECT_LT(r.max_bracket, 1e-12);
    EXPECT_TRUE(r.passes());
    const double speed = norm(c.a(0));
    for (std::size_t i = 0; i < traj.size(); ++i) EXPECT_NEAR(traj.phase[i], speed * traj.t[i], 1e-12);
}

TEST(Rolling, MathieuAndPrecessionRoll)
{
    for (const FlowTrajectory& traj : {mathieu(), integrate_flow(precession(), 2 * M_PI, 1e-3)}) {
        const RollingReport r = verify_rolling(traj);
        EXPECT_LT(r.max_contact, 1e-6);
        EXPECT_LT(r.max_no_slip, 1e-6);
        EXPECT_LT(r.max_raw_contact, 1e-6);
        EXPECT_LT(r.max_raw_no_slip, 1e-6);
        EXPECT_LT(r.max_identity, 1e-5);
        EXPECT_EQ(r.t.size(), traj.size());
        for (double v : r.contact) EXPECT_GE(v, 0.0);
        EXPECT_DOUBLE_EQ(r.tolerances.roll, kDefaultTolerances.roll);
    }
}

TEST(Rolling, MathieuCurvatureMatchesClosedForm)
{
    const double omega = 1.0, eps = 0.5;
    const FlowTrajectory traj = mathieu();
    const auto samples = verify_curvature_relation(traj);
    int checked = 0;
    for (const auto& s : samples) {
        EXPECT_LT(std::abs(s.space), 1e-6);
        if (std::abs(std::sin(s.t)) <= 0.1) continue;
        const double exact = body_curvature_analytic(omega, eps, s.t);
        EXPECT_LT(std::abs(std::abs(s.body) - std::abs(exact)) / std::abs(exact), 1e-4) << "t = " << s.t;
        EXPECT_LT(std::abs(s.residual) / std::abs(exact), 1e-4) << "t = " << s.t;
        ++checked;
    }
    EXPECT_GT(checked, 5000);
    EXPECT_LT(max_relative_curvature_residual(traj, samples, 0.05), 1e-4);
}

TEST(Rolling, FixedAxisHasNoCurvatureSamples)
{
    // a(t) = phi(t) k: n never moves, so every node is a cusp of n.
    CoefficientCurve c;
    c.a = [](double t) { return (1.0 + 0.5 * std::sin(t)) * basis::k(); };
    const FlowTrajectory traj = integrate_flow(c, 2 * M_PI, 1e-3);
    std::vector<CurvatureSample> samples;
    try {
        samples = verify_curvature_relation(traj);
    } catch (const AllCusps&) {
    }
    EXPECT_TRUE(samples.empty());
    EXPECT_LT(verify_rolling(traj).max_contact, 1e-9);
}

TEST(Rolling, DecompositionCertificate)
{
    for (const FlowTrajectory& traj : {mathieu(), integrate_flow(precession(), 2 * M_PI, 1e-3)}) {
        const DecompositionCertificate d = decompose_flow(traj);
        EXPECT_LT(d.max_residual, 1e-5);
        EXPECT_LT(d.max_phase_mismatch, 1e-6);
        ASSERT_EQ(d.residual.size(), traj.size());
        EXPECT_LT((d.transport_space.front() - Eigen::Matrix3d::Identity()).norm(), 1e-15);
        EXPECT_LT((d.rotation.front() - Eigen::Matrix3d::Identity()).norm(), 1e-15);
    }
}

TEST(Rolling, DecompositionConvergesUnderRefinement)
{
    const double coarse = decompose_flow(integrate_flow(precession(), 2 * M_PI, 0.04)).max_residual;
    const double fine = decompose_flow(integrate_flow(precession(), 2 * M_PI, 0.02)).max_residual;
    EXPECT_GT(coarse / fine, 3.5) << coarse << " -> " << fine;
}

TEST(Rolling, AngleBookkeeping)
{
    const auto err = angle_bookkeeping(integrate_flow(precession(), 2 * M_PI, 1e-3));
    EXPECT_LT(*std::max_element(err.begin(), err.end()), 1e-5);
    // The Mathieu body curve has cusps at 0 and pi.
    EXPECT_THROW(angle_bookkeeping(mathieu()), CuspInRange);
}

TEST(Rolling, BodyCurveFromItsCurvature)
{
    // Between the cusps at 0 and pi, rebuild N from K(s) and compare with the flow.
    const double omega = 1.0, eps = 0.5;
    const FlowTrajectory traj = mathieu(2 * M_PI / 8000);
    const std::size_t first = 400, last = 3600;
    std::vector<double> s{0.0}, k{body_curvature_analytic(omega, eps, traj.t[first])};
    const SphereCurve body = body_curve(traj);
    for (std::size_t i = first + 1; i <= last; ++i) {
        s.push_back(s.back() + 0.5 * (body.speed[i] + body.speed[i - 1]) * traj.step);
        k.push_back(body_curvature_analytic(omega, eps, traj.t[i]));
    }
    const auto K = [&](double x) {
        const auto it = std::upper_bound(s.begin(), s.end(), x);
        const std::size_t j = std::clamp<std::size_t>(it - s.begin(), 1, s.size() - 1);
        const double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
        return (1 - w) * k[j - 1] + w * k[j];
    };
    // The closed-form K is taken with the normal [N, N']; its orientation fixes the sign.
    const auto measured = geodesic_curvature(body);
    const double sign = (*measured[first] > 0) == (k[0] > 0) ? 1.0 : -1.0;
    const AlgebraVector e0 = body.unit_tangent[first];
    const SphereCurve rebuilt = reconstruct_from_curvature(
        SphereKind::H2, [&](double x) { return sign * K(x); }, traj.N[first], e0, s.back(), 1e-4);
    double worst = 0;
    for (std::size_t i = first; i <= last; i += 50) {
        const double x = s[i - first];
        const std::size_t j = std::min<std::size_t>(std::llround(x / 1e-4), rebuilt.size() - 1);
        worst = std::max(worst, (rebuilt.point[j].coords - traj.N[i].coords).norm());
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(Rolling, ReportDocument)
{
    const FlowTrajectory traj = mathieu(0.01);
    const RollingReport r = verify_rolling(traj);
    const auto samples = verify_curvature_relation(traj);
    const DecompositionCertificate d = decompose_flow(traj);
    const auto doc = rolling_report_json({{"omega", 1.0}}, traj, r,
                                         max_relative_curvature_residual(traj, samples, 0.05), d, false);
    for (const char* key : {"params", "grid", "tolerances", "version", "max_residuals"}) EXPECT_TRUE(doc.contains(key));
    for (const char* key : {"contact", "no_slip", "curvature", "decomposition"})
        EXPECT_TRUE(doc["max_residuals"].contains(key));
    EXPECT_FALSE(doc.contains("per_node"));
    EXPECT_EQ(doc["grid"]["nodes"], traj.size());
}
