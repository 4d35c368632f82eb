#include "rollcones/lie_algebra.hpp"

#include <cmath>

#include "rollcones/errors.hpp"

namespace rollcones {

namespace {

void require_same(const AlgebraVector& a, const AlgebraVector& b, const char* op)
{
    if (a.metric != b.metric) {
        throw ContractViolation(std::string(op) + ": operands belong to different algebras");
    }
}

// cosh(sqrt(x)) and sinh(sqrt(x))/sqrt(x), continued analytically to x < 0.
double ch(double x)
{
    if (std::abs(x) < 1e-8) return 1.0 + x / 2.0 + x * x / 24.0;
    return x > 0 ? std::cosh(std::sqrt(x)) : std::cos(std::sqrt(-x));
}

double shc(double x)
{
    if (std::abs(x) < 1e-8) return 1.0 + x / 6.0 + x * x / 120.0;
    return x > 0 ? std::sinh(std::sqrt(x)) / std::sqrt(x) : std::sin(std::sqrt(-x)) / std::sqrt(-x);
}

}  // namespace

const char* to_string(Metric m) { return m == Metric::Euclidean ? "euclidean" : "minkowski"; }

const char* to_string(CausalType c)
{
    switch (c) {
    case CausalType::Spacelike: return "spacelike";
    case CausalType::Timelike: return "timelike";
    case CausalType::Lightlike: return "lightlike";
    }
    return "?";
}

Eigen::Matrix3d gram(Metric m)
{
    Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
    if (m == Metric::Minkowski) g(2, 2) = -1.0;
    return g;
}

AlgebraVector AlgebraVector::operator+(const AlgebraVector& o) const
{
    require_same(*this, o, "operator+");
    return {metric, coords + o.coords};
}

AlgebraVector AlgebraVector::operator-(const AlgebraVector& o) const
{
    require_same(*this, o, "operator-");
    return {metric, coords - o.coords};
}

double inner(const AlgebraVector& a, const AlgebraVector& b)
{
    require_same(a, b, "inner");
    const double last = a.coords[2] * b.coords[2];
    return a.coords[0] * b.coords[0] + a.coords[1] * b.coords[1] +
           (a.metric == Metric::Euclidean ? last : -last);
}

AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b)
{
    require_same(a, b, "bracket");
    Eigen::Vector3d c = a.coords.cross(b.coords);
    // [i,j] = k, [j,k] = -i, [k,i] = -j
    if (a.metric == Metric::Minkowski) {
        c[0] = -c[0];
        c[1] = -c[1];
    }
    return {a.metric, c};
}

double norm(const AlgebraVector& a) { return std::sqrt(std::abs(inner(a, a))); }

CausalType causal_type(const AlgebraVector& a, double null_tol)
{
    const double q = inner(a, a);
    if (q > null_tol) return CausalType::Spacelike;
    if (q < -null_tol) return CausalType::Timelike;
    return CausalType::Lightlike;
}

SmallMatrix to_matrix(const AlgebraVector& a)
{
    const auto& c = a.coords;
    if (a.metric == Metric::Euclidean) {
        SmallMatrix m(3, 3);
        m << 0, -c[2], c[1],
             c[2], 0, -c[0],
             -c[1], c[0], 0;
        return m;
    }
    SmallMatrix m(2, 2);
    m << c[0], c[1] + c[2],
         c[1] - c[2], -c[0];
    return 0.5 * m;
}

AlgebraVector from_matrix(Metric metric, const SmallMatrix& x)
{
    if (x.rows() != group_dimension(metric) || x.cols() != x.rows()) {
        throw ContractViolation("from_matrix: wrong matrix size for algebra");
    }
    if (metric == Metric::Euclidean) {
        return {metric, 0.5 * (x(2, 1) - x(1, 2)), 0.5 * (x(0, 2) - x(2, 0)), 0.5 * (x(1, 0) - x(0, 1))};
    }
    return {metric, x(0, 0) - x(1, 1), x(0, 1) + x(1, 0), x(0, 1) - x(1, 0)};
}

Eigen::Matrix3d ad_matrix(const AlgebraVector& a)
{
    Eigen::Matrix3d m;
    for (int col = 0; col < 3; ++col) {
        AlgebraVector e(a.metric, Eigen::Vector3d::Unit(col));
        m.col(col) = bracket(a, e).coords;
    }
    return m;
}

GroupElement::GroupElement(Metric m, const SmallMatrix& entries) : metric_(m), m_(entries)
{
    const int d = group_dimension(m);
    if (entries.rows() != d || entries.cols() != d) {
        throw ContractViolation("GroupElement: matrix size does not match the group");
    }
}

GroupElement GroupElement::identity(Metric m)
{
    const int d = group_dimension(m);
    return {m, SmallMatrix::Identity(d, d)};
}

GroupElement GroupElement::inverse() const
{
    if (metric_ == Metric::Euclidean) return {metric_, m_.transpose()};
    SmallMatrix inv(2, 2);
    const double det = m_.determinant();
    inv << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return {metric_, inv / det};
}

GroupElement GroupElement::operator*(const GroupElement& o) const
{
    if (metric_ != o.metric_) throw ContractViolation("GroupElement product: mixed groups");
    return {metric_, m_ * o.m_};
}

double GroupElement::group_defect() const
{
    double defect = std::abs(m_.determinant() - 1.0);
    if (metric_ == Metric::Euclidean) {
        defect = std::max(defect, (m_.transpose() * m_ - SmallMatrix::Identity(3, 3)).norm());
    }
    return defect;
}

AlgebraVector adjoint(const GroupElement& g, const AlgebraVector& a, double tol)
{
    if (g.metric() != a.metric) throw ContractViolation("adjoint: group and algebra differ");
    if (std::abs(g.determinant() - 1.0) > tol) {
        throw ContractViolation("adjoint: group element is not unimodular");
    }
    if (a.metric == Metric::Euclidean) return {a.metric, g.matrix() * a.coords};
    return from_matrix(a.metric, g.matrix() * to_matrix(a) * g.inverse().matrix());
}

Eigen::Matrix3d adjoint_matrix(const GroupElement& g)
{
    if (g.metric() == Metric::Euclidean) return g.matrix();
    Eigen::Matrix3d m;
    const SmallMatrix ginv = g.inverse().matrix();
    for (int col = 0; col < 3; ++col) {
        AlgebraVector e(Metric::Minkowski, Eigen::Vector3d::Unit(col));
        m.col(col) = from_matrix(Metric::Minkowski, g.matrix() * to_matrix(e) * ginv).coords;
    }
    return m;
}

GroupElement exponential(const AlgebraVector& a, double t)
{
    if (a.metric == Metric::Euclidean) {
        // Rodrigues: I + sin(th) K + (1 - cos(th)) K^2 with K the unit-axis hat matrix.
        const Eigen::Vector3d w = a.coords * t;
        const double th2 = w.squaredNorm();
        const SmallMatrix x = to_matrix(AlgebraVector(a.metric, w));
        // (1 - cos th)/th^2 = shc(-th^2/4)^2 / 2
        const double s = shc(-th2);
        const double c = 0.5 * shc(-th2 / 4.0) * shc(-th2 / 4.0);
        return {a.metric, SmallMatrix::Identity(3, 3) + s * x + c * x * x};
    }
    // (t a)^2 = (<a,a> t^2 / 4) I for traceless 2x2 a.
    const double q = inner(a, a) * t * t / 4.0;
    const SmallMatrix x = to_matrix(a) * t;
    return {a.metric, ch(q) * SmallMatrix::Identity(2, 2) + shc(q) * x};
}

AlgebraVector adjoint_axis(const GroupElement& g)
{
    const SmallMatrix& m = g.matrix();
    if (g.metric() == Metric::Euclidean) {
        // Antisymmetric part; fails only for half-turns, where we fall back to
        // the dominant column of g + I.
        AlgebraVector axis = from_matrix(Metric::Euclidean, m);
        if (axis.coords.norm() > 1e-12) return axis;
        SmallMatrix p = m + SmallMatrix::Identity(3, 3);
        int best = 0;
        for (int c = 1; c < 3; ++c) {
            if (p.col(c).norm() > p.col(best).norm()) best = c;
        }
        return {Metric::Euclidean, Eigen::Vector3d(p.col(best))};
    }
    // g - (tr g / 2) I is traceless and commutes with g.
    return from_matrix(Metric::Minkowski, m - 0.5 * m.trace() * SmallMatrix::Identity(2, 2));
}

}  // namespace rollcones
