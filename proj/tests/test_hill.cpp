#include <gtest/gtest.h>

#include <array>
#include <filesystem>
#include <fstream>

#include <boost/numeric/odeint.hpp>

#include "rollcones/errors.hpp"
#include "rollcones/hill.hpp"
#include "support.hpp"

using namespace rollcones;

namespace {

constexpr double kH = 2 * M_PI / 4000;

// Fundamental matrix of x'' + w^2 (1 + e cos t) x = 0 over one period, columns
// from (1, 0) and (0, 1), integrated by odeint.
Eigen::Matrix2d odeint_monodromy(double omega, double eps)
{
    using State = std::array<double, 2>;
    namespace odeint = boost::numeric::odeint;
    const auto rhs = [=](const State& s, State& ds, double t) {
        ds = {s[1], -omega * omega * (1 + eps * std::cos(t)) * s[0]};
    };
    Eigen::Matrix2d M;
    for (int col = 0; col < 2; ++col) {
        State s{col == 0 ? 1.0 : 0.0, col == 1 ? 1.0 : 0.0};
        odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, s,
                                   0.0, 2 * M_PI, 1e-3);
        M(0, col) = s[0];
        M(1, col) = s[1];
    }
    return M;
}

GroupElement sl2(double a, double b, double c, double d)
{
    SmallMatrix m(2, 2);
    m << a, b, c, d;
    return {Metric::Minkowski, m};
}

// omega at which the eps-Mathieu trace equals target, by bisection on [lo, hi].
double solve_trace(double eps, double target, double lo, double hi)
{
    auto f = [&](double w) { return monodromy(mathieu_system(w, eps), kH).trace - target; };
    double flo = f(lo);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Hill, MathieuCoefficients)
{
    const HillSystem sys = mathieu_system(1.2, 0.4);
    const CoefficientCurve c = sys.coefficients();
    for (double t : {0.0, 1.0, 2.5}) {
        const double q = 1.44 * (1 + 0.4 * std::cos(t));
        EXPECT_NEAR(sys.q(t), q, 1e-15);
        const AlgebraVector a = c.a(t);
        EXPECT_NEAR(a[0], 0.0, 1e-15);
        EXPECT_NEAR(a[1], 1 - q, 1e-15);
        EXPECT_NEAR(a[2], 1 + q, 1e-15);
        EXPECT_NEAR(inner(a, a), -4 * q, 1e-14);
        const Eigen::MatrixXd m = to_matrix(a);
        EXPECT_NEAR(m(0, 1), 1.0, 1e-15);
        EXPECT_NEAR(m(1, 0), -q, 1e-15);
    }
    EXPECT_DOUBLE_EQ(sys.period, 2 * M_PI);
    EXPECT_THROW(mathieu_system(1.0, 1.0), PotentialVanishes);
    EXPECT_THROW(mathieu_system(1.0, -1.2), PotentialVanishes);
    EXPECT_THROW(mathieu_system(0.0, 0.1), ContractViolation);
}

TEST(Hill, VanishingPotentialIsRejected)
{
    HillSystem sys;
    sys.q = [](double t) { return std::cos(t); };
    EXPECT_THROW(check_potential(sys, 2 * M_PI, 1e-2), PotentialVanishes);
    EXPECT_NO_THROW(check_potential(mathieu_system(1.0, 0.9), 2 * M_PI, 1e-2));
}

TEST(Hill, BodyCurvatureClosedForm)
{
    EXPECT_NEAR(body_curvature_analytic(1.0, 0.5, M_PI / 2), -8.0, 1e-14);
    EXPECT_NEAR(body_curvature_analytic(2.0, -0.5, M_PI / 2), -16.0, 1e-14);
    EXPECT_THROW(body_curvature_analytic(1.0, 0.5, M_PI), CuspAt);
    EXPECT_THROW(body_curvature_analytic(1.0, 0.5, 0.0), CuspAt);
    EXPECT_THROW(body_curvature_analytic(1.0, 0.0, 1.0), ContractViolation);
}

TEST(Hill, ConstantCoefficientTraceLaw)
{
    for (double omega : {0.1, 0.25, 0.4, 0.9}) {
        const MonodromyReport r = monodromy(mathieu_system(omega, 0.0), kH);
        EXPECT_NEAR(r.trace, 2 * std::cos(2 * M_PI * omega), 1e-8) << "omega = " << omega;
    }
    EXPECT_EQ(monodromy(mathieu_system(0.25, 0.0), kH).kind, MonodromyClass::Elliptic);
}

TEST(Hill, MonodromyMatchesOdeint)
{
    for (auto [omega, eps] : {std::pair{0.25, 0.0}, {0.5, 0.1}, {0.8, 0.1}, {1.0, 0.5}, {1.7, 0.9}}) {
        const MonodromyReport r = monodromy(mathieu_system(omega, eps), kH);
        const Eigen::Matrix2d oracle = odeint_monodromy(omega, eps);
        EXPECT_LT(test::max_abs_diff(r.M.matrix(), oracle) / (1 + oracle.norm()), 1e-8)
            << omega << ", " << eps;
        EXPECT_NEAR(r.trace, oracle.trace(), 1e-8 * (1 + oracle.norm()));
        EXPECT_NEAR(r.M.determinant(), 1.0, 1e-9);
    }
}

TEST(Hill, ClassificationExamples)
{
    EXPECT_EQ(monodromy(mathieu_system(0.5, 0.1), kH).kind, MonodromyClass::Hyperbolic);
    EXPECT_EQ(monodromy(mathieu_system(0.8, 0.1), kH).kind, MonodromyClass::Elliptic);
    EXPECT_GT(std::abs(odeint_monodromy(0.5, 0.1).trace()), 2.0);
    EXPECT_LT(std::abs(odeint_monodromy(0.8, 0.1).trace()), 2.0);
}

TEST(Hill, ClassifyHandMadeMatrices)
{
    const MonodromyReport hyp = classify_monodromy(sl2(2.0, 0.0, 0.0, 0.5));
    EXPECT_EQ(hyp.kind, MonodromyClass::Hyperbolic);
    ASSERT_TRUE(hyp.expansion_factor);
    EXPECT_NEAR(*hyp.expansion_factor, 2.0, 1e-14);
    ASSERT_EQ(hyp.eigendirections.size(), 2u);
    EXPECT_NEAR(std::abs(hyp.eigendirections[0].x()), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(hyp.eigendirections[1].y()), 1.0, 1e-14);
    EXPECT_FALSE(hyp.bounded());

    const double angle = 0.9;
    const MonodromyReport ell = classify_monodromy(sl2(std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle)));
    EXPECT_EQ(ell.kind, MonodromyClass::Elliptic);
    ASSERT_TRUE(ell.rotation_angle);
    EXPECT_NEAR(*ell.rotation_angle, angle, 1e-14);
    EXPECT_TRUE(ell.bounded());

    EXPECT_EQ(classify_monodromy(sl2(1, 1, 0, 1)).kind, MonodromyClass::Parabolic);
    EXPECT_EQ(classify_monodromy(sl2(-1, 0, 0, -1)).kind, MonodromyClass::Parabolic);

    // Eigendirections of a sheared hyperbolic matrix are eigenvectors, expanding first.
    const GroupElement M = sl2(3.0, 1.0, 2.0, 1.0);
    const MonodromyReport r = classify_monodromy(M);
    ASSERT_EQ(r.eigendirections.size(), 2u);
    const Eigen::Matrix2d m = M.matrix();
    const Eigen::Vector2d v0 = r.eigendirections[0], v1 = r.eigendirections[1];
    const double l0 = v0.dot(m * v0), l1 = v1.dot(m * v1);
    EXPECT_LT((m * v0 - l0 * v0).norm(), 1e-12);
    EXPECT_LT((m * v1 - l1 * v1).norm(), 1e-12);
    EXPECT_GT(std::abs(l0), std::abs(l1));

    const auto doc = monodromy_json(r);
    EXPECT_EQ(doc["class"], "hyperbolic");
    EXPECT_FALSE(doc["bounded"].get<bool>());
}

TEST(Hill, PowersBounded)
{
    EXPECT_TRUE(powers_bounded(sl2(std::cos(1.0), std::sin(1.0), -std::sin(1.0), std::cos(1.0))));
    EXPECT_FALSE(powers_bounded(sl2(1.2, 0.0, 0.0, 1 / 1.2)));
    EXPECT_FALSE(powers_bounded(sl2(1.0, 30.0, 0.0, 1.0)));
}

TEST(Hill, RangeSyntax)
{
    const Range r = Range::parse("0:1:11");
    EXPECT_EQ(r.count, 11);
    const auto v = r.values();
    ASSERT_EQ(v.size(), 11u);
    EXPECT_DOUBLE_EQ(v.front(), 0.0);
    EXPECT_DOUBLE_EQ(v.back(), 1.0);
    EXPECT_NEAR(v[3], 0.3, 1e-15);
    EXPECT_EQ(Range::parse("0.5:0.5:1").values(), std::vector<double>{0.5});
    for (const char* bad : {"1:2", "a:b:3", "0:1:0", "0:1:-2", "0:1:2.5", "", "0:1:3:4"})
        EXPECT_THROW(Range::parse(bad), std::invalid_argument) << bad;
}

TEST(Hill, TongueScanProperties)
{
    const Range omega{0.3, 1.2, 10}, eps{-0.4, 0.4, 9};
    const TongueMap map = tongue_scan(omega, eps, kH, 1);
    ASSERT_EQ(map.cells.size(), 90u);
    for (int i = 0; i < omega.count; ++i) {
        // eps = 0 is never hyperbolic.
        ASSERT_TRUE(map.at(i, 4).kind);
        EXPECT_NE(*map.at(i, 4).kind, MonodromyClass::Hyperbolic);
        for (int j = 0; j < eps.count; ++j) {
            const TongueCell& a = map.at(i, j);
            const TongueCell& b = map.at(i, eps.count - 1 - j);
            ASSERT_TRUE(a.kind && b.kind);
            EXPECT_EQ(*a.kind, *b.kind) << a.omega << ", " << a.eps;
            EXPECT_NEAR(a.trace, b.trace, 1e-8);
        }
    }
    // Same bytes whatever the worker count.
    const TongueMap again = tongue_scan(omega, eps, kH, 3);
    for (std::size_t c = 0; c < map.cells.size(); ++c) {
        EXPECT_EQ(map.cells[c].trace, again.cells[c].trace);
        EXPECT_EQ(map.cells[c].omega, again.cells[c].omega);
    }
    const TongueMap point = tongue_scan({0.5, 0.5, 1}, {0.55, 0.55, 1}, kH, 1);
    EXPECT_EQ(*point.cells[0].kind, MonodromyClass::Hyperbolic);
}

TEST(Hill, TongueScanRecordsCellErrors)
{
    const TongueMap map = tongue_scan({0.5, 1.0, 2}, {0.5, 1.0, 2}, kH, 1);
    EXPECT_TRUE(map.at(0, 0).kind);
    EXPECT_FALSE(map.at(0, 1).kind);
    EXPECT_FALSE(map.at(1, 1).error.empty());
    const auto path = std::filesystem::temp_directory_path() / "rollcones_test_tongues.csv";
    write_tongue_csv(path, map);
    std::ifstream in(path);
    std::string line, all;
    std::getline(in, line);
    EXPECT_EQ(line, "omega,eps,class,trace");
    while (std::getline(in, line)) all += line + "\n";
    EXPECT_NE(all.find("error"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(Hill, FirstThreeTongues)
{
    for (int n = 1; n <= 3; ++n) {
        const TongueInterval t = locate_tongue(0.05, n / 2.0, 0.02, kH);
        ASSERT_TRUE(t.found) << n;
        EXPECT_LT(t.lo, t.hi);
        EXPECT_LE(std::abs(t.lo - n / 2.0), 0.02);
        EXPECT_LE(std::abs(t.hi - n / 2.0), 0.02);
        EXPECT_GT(t.peak_excess, 0.0);
        // Just inside the interval the monodromy is hyperbolic (|tr| > 2).
        EXPECT_GT(std::abs(monodromy(mathieu_system(t.peak_omega, 0.05), kH).trace), 2.0);
    }
}

TEST(Hill, DiskPictures)
{
    const DiskCurves still = poincare_disk_curves(0.7, 0.0, 2 * M_PI, kH);
    for (const auto& p : still.body_disk) EXPECT_LT((p - still.body_disk.front()).norm(), 1e-9);

    const DiskCurves hyp = poincare_disk_curves(0.5, 0.3, 20 * 2 * M_PI, kH);
    EXPECT_EQ(hyp.monodromy.kind, MonodromyClass::Hyperbolic);
    EXPECT_GT(hyp.max_body_radius, 0.99);
    EXPECT_FALSE(hyp.closed);
    for (const auto& p : hyp.body_disk) EXPECT_LT(p.norm(), 1.0);
}

TEST(Hill, EllipticRotationByThirdClosesWithSixCusps)
{
    const int n = 3;
    const double eps = 0.3;
    const double omega = solve_trace(eps, 2 * std::cos(2 * M_PI / n), 0.25, 0.45);
    const DiskCurves d = poincare_disk_curves(omega, eps, n * 2 * M_PI, kH);
    ASSERT_EQ(d.monodromy.kind, MonodromyClass::Elliptic);
    EXPECT_NEAR(*d.monodromy.rotation_angle, 2 * M_PI / n, 1e-9);
    EXPECT_TRUE(d.closed);
    EXPECT_EQ(d.cusp_count, 2 * n);
}
