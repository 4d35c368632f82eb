#include "rollcones/bicycle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>

#include "rollcones/errors.hpp"
#include "rollcones/numerics.hpp"
#include "rollcones/pseudosphere.hpp"

namespace rollcones {

namespace {

using Eigen::Vector2d;

constexpr std::array<double, 5> kGaussNodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                               -0.9061798459386640, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                                 0.2369268850561891, 0.2369268850561891};

template <typename F>
double gauss(F&& f, double a, double b)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += kGaussWeights[i] * f(mid + half * kGaussNodes[i]);
    return half * sum;
}

double wrap(double s, double period) { return s - period * std::floor(s / period); }

double cross(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

// Closed regular curve E(u), u in [0, U], with arc length tabulated at breakpoints.
struct ParamCurve {
    std::function<Vector2d(double)> e, e1, e2;
    std::vector<double> breaks;  // increasing, front = 0, back = U

    double speed(double u) const { return e1(u).norm(); }
};

class ArcLength {
public:
    explicit ArcLength(ParamCurve c) : c_(std::move(c))
    {
        cum_.assign(c_.breaks.size(), 0.0);
        for (std::size_t i = 1; i < c_.breaks.size(); ++i) {
            cum_[i] = cum_[i - 1] + gauss([this](double u) { return c_.speed(u); }, c_.breaks[i - 1], c_.breaks[i]);
        }
    }

    double total() const { return cum_.back(); }

    double param(double s) const
    {
        s = std::clamp(s, 0.0, total());
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
        const std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - cum_.begin() - 1, 0), cum_.size() - 2);
        const double u0 = c_.breaks[k];
        double u = u0 + (s - cum_[k]) / c_.speed(u0);
        for (int iter = 0; iter < 30; ++iter) {
            const double f = cum_[k] + gauss([this](double v) { return c_.speed(v); }, u0, u) - s;
            const double du = f / c_.speed(u);
            u -= du;
            if (std::abs(du) < 1e-15 * std::max(1.0, c_.breaks.back())) break;
        }
        return u;
    }

    Vector2d position(double s) const { return c_.e(param(s)); }

    Vector2d velocity(double s) const { return c_.e1(param(s)).normalized(); }

    Vector2d acceleration(double s) const
    {
        const double u = param(s);
        const Vector2d d1 = c_.e1(u);
        const Vector2d d2 = c_.e2(u);
        const double sp2 = d1.squaredNorm();
        const Vector2d t = d1 / std::sqrt(sp2);
        return (d2 - d2.dot(t) * t) / sp2;
    }

    double curvature(double s) const
    {
        const double u = param(s);
        const Vector2d d1 = c_.e1(u);
        return cross(d1, c_.e2(u)) / std::pow(d1.norm(), 3);
    }

    double area() const
    {
        double a = 0.0;
        for (std::size_t i = 1; i < c_.breaks.size(); ++i) {
            a += gauss([this](double u) { return cross(c_.e(u), c_.e1(u)); }, c_.breaks[i - 1], c_.breaks[i]);
        }
        return 0.5 * a;
    }

private:
    ParamCurve c_;
    std::vector<double> cum_;
};

FrontTrack from_param_curve(std::string description, ParamCurve curve)
{
    auto arc = std::make_shared<const ArcLength>(std::move(curve));
    FrontTrack t;
    t.description = std::move(description);
    t.perimeter = arc->total();
    t.closed = true;
    t.arc_length = true;
    t.area = arc->area();
    const double L = t.perimeter;
    t.position = [arc, L](double s) { return arc->position(wrap(s, L)); };
    t.velocity = [arc, L](double s) { return arc->velocity(wrap(s, L)); };
    t.acceleration = [arc, L](double s) { return arc->acceleration(wrap(s, L)); };
    t.curvature = [arc, L](double s) { return arc->curvature(wrap(s, L)); };
    return t;
}

void require_positive_ell(double ell)
{
    if (!(ell > 0.0)) throw ContractViolation("bicycle length must be positive");
}

// Continuous lift of an angle sequence starting at start.
std::vector<double> unwrap_from(const std::vector<double>& raw, double start)
{
    std::vector<double> out(raw.size());
    double prev = start;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        prev += std::remainder(raw[i] - prev, 2 * M_PI);
        out[i] = prev;
    }
    return out;
}

}  // namespace

FrontTrack circle_track(double r)
{
    if (!(r > 0.0)) throw ContractViolation("circle radius must be positive");
    FrontTrack t;
    t.description = "circle:" + std::to_string(r);
    t.position = [r](double s) { return Vector2d(r * std::cos(s / r), r * std::sin(s / r)); };
    t.velocity = [r](double s) { return Vector2d(-std::sin(s / r), std::cos(s / r)); };
    t.acceleration = [r](double s) { return Vector2d(-std::cos(s / r) / r, -std::sin(s / r) / r); };
    t.curvature = [r](double) { return 1.0 / r; };
    t.perimeter = 2 * M_PI * r;
    t.closed = true;
    t.area = M_PI * r * r;
    return t;
}

FrontTrack ellipse_track(double a, double b)
{
    if (!(a > 0.0 && b > 0.0)) throw ContractViolation("ellipse semi-axes must be positive");
    ParamCurve c;
    c.e = [a, b](double u) { return Vector2d(a * std::cos(u), b * std::sin(u)); };
    c.e1 = [a, b](double u) { return Vector2d(-a * std::sin(u), b * std::cos(u)); };
    c.e2 = [a, b](double u) { return Vector2d(-a * std::cos(u), -b * std::sin(u)); };
    constexpr int kSegments = 1024;
    for (int i = 0; i <= kSegments; ++i) c.breaks.push_back(2 * M_PI * i / kSegments);
    std::ostringstream name;
    name << "ellipse:" << a << ',' << b;
    return from_param_curve(name.str(), std::move(c));
}

FrontTrack line_track()
{
    FrontTrack t;
    t.description = "line";
    t.position = [](double s) { return Vector2d(s, 0.0); };
    t.velocity = [](double) { return Vector2d(1.0, 0.0); };
    t.acceleration = [](double) { return Vector2d(0.0, 0.0); };
    t.curvature = [](double) { return 0.0; };
    return t;
}

FrontTrack polyline_track(std::span<const Vector2d> vertices)
{
    std::vector<Vector2d> p(vertices.begin(), vertices.end());
    if (p.size() > 1 && (p.back() - p.front()).norm() < 1e-12) p.pop_back();
    const int n = static_cast<int>(p.size());
    if (n < 3) throw ContractViolation("polyline track needs at least 3 distinct vertices");

    std::vector<double> h(n);
    std::vector<double> knots(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        h[i] = (p[(i + 1) % n] - p[i]).norm();
        if (h[i] < 1e-12) throw ContractViolation("polyline track has repeated consecutive vertices");
        knots[i + 1] = knots[i] + h[i];
    }

    // Periodic cubic spline: second derivatives m solve a cyclic tridiagonal system.
    Eigen::SparseMatrix<double> A(n, n);
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::MatrixX2d rhs(n, 2);
    for (int i = 0; i < n; ++i) {
        const int prev = (i + n - 1) % n;
        const int next = (i + 1) % n;
        entries.emplace_back(i, prev, h[prev]);
        entries.emplace_back(i, i, 2.0 * (h[prev] + h[i]));
        entries.emplace_back(i, next, h[i]);
        const Vector2d r = 6.0 * ((p[next] - p[i]) / h[i] - (p[i] - p[prev]) / h[prev]);
        rhs.row(i) = r.transpose();
    }
    A.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success) throw ContractViolation("polyline spline system is singular");
    const Eigen::MatrixX2d m = lu.solve(rhs);

    struct Spline {
        std::vector<Vector2d> p, m;
        std::vector<double> h, knots;

        std::pair<int, double> locate(double u) const
        {
            const int n = static_cast<int>(p.size());
            u = std::clamp(u, 0.0, knots.back());
            int i = static_cast<int>(std::upper_bound(knots.begin(), knots.end(), u) - knots.begin()) - 1;
            i = std::clamp(i, 0, n - 1);
            return {i, u - knots[i]};
        }
        Vector2d eval(double u, int order) const
        {
            const auto [i, tau] = locate(u);
            const int j = (i + 1) % static_cast<int>(p.size());
            const Vector2d b = (p[j] - p[i]) / h[i] - h[i] * (2.0 * m[i] + m[j]) / 6.0;
            const Vector2d c3 = (m[j] - m[i]) / (6.0 * h[i]);
            switch (order) {
            case 0: return p[i] + tau * (b + tau * (0.5 * m[i] + tau * c3));
            case 1: return b + tau * (m[i] + 3.0 * tau * c3);
            default: return m[i] + 6.0 * tau * c3;
            }
        }
    };
    auto spline = std::make_shared<Spline>();
    spline->p = p;
    spline->h = h;
    spline->knots = knots;
    for (int i = 0; i < n; ++i) spline->m.emplace_back(m(i, 0), m(i, 1));

    ParamCurve c;
    c.e = [spline](double u) { return spline->eval(u, 0); };
    c.e1 = [spline](double u) { return spline->eval(u, 1); };
    c.e2 = [spline](double u) { return spline->eval(u, 2); };
    constexpr int kSubdivisions = 8;
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < kSubdivisions; ++k) c.breaks.push_back(knots[i] + h[i] * k / kSubdivisions);
    c.breaks.push_back(knots.back());
    return from_param_curve("polyline:" + std::to_string(n), std::move(c));
}

FrontTrack load_polyline_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open track file " + path.string());
    std::vector<Vector2d> pts;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x = 0, y = 0;
        if (!(row >> x >> y)) {
            if (lineno == 1) continue;
            throw Error(path.string() + ":" + std::to_string(lineno) + ": expected two numbers");
        }
        pts.emplace_back(x, y);
    }
    FrontTrack t = polyline_track(pts);
    t.description = path.string();
    return t;
}

FrontTrack parse_track(const std::string& spec)
{
    const auto numbers = [&](const std::string& body) {
        std::vector<double> v;
        std::istringstream in(body);
        std::string item;
        while (std::getline(in, item, ',')) {
            std::size_t used = 0;
            double x = 0;
            try {
                x = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != item.size()) throw std::invalid_argument("bad number '" + item + "' in track '" + spec + "'");
            v.push_back(x);
        }
        return v;
    };
    if (spec.rfind("circle:", 0) == 0) {
        const auto v = numbers(spec.substr(7));
        if (v.size() != 1 || !(v[0] > 0)) throw std::invalid_argument("track must look like circle:r with r > 0");
        return circle_track(v[0]);
    }
    if (spec.rfind("ellipse:", 0) == 0) {
        const auto v = numbers(spec.substr(8));
        if (v.size() != 2 || !(v[0] > 0 && v[1] > 0)) {
            throw std::invalid_argument("track must look like ellipse:a,b with a, b > 0");
        }
        return ellipse_track(v[0], v[1]);
    }
    if (!std::filesystem::exists(spec)) {
        throw std::invalid_argument("track '" + spec + "' is neither circle:r, ellipse:a,b nor an existing CSV file");
    }
    return load_polyline_csv(spec);
}

CoefficientCurve bicycle_system(const FrontTrack& track, double ell)
{
    require_positive_ell(ell);
    CoefficientCurve c;
    c.metric = Metric::Minkowski;
    c.a = [v = track.velocity, ell](double t) {
        const Vector2d d = v(t);
        return AlgebraVector(Metric::Minkowski, -d.x() / ell, -d.y() / ell, 0.0);
    };
    c.a_dot = [acc = track.acceleration, ell](double t) {
        const Vector2d d = acc(t);
        return AlgebraVector(Metric::Minkowski, -d.x() / ell, -d.y() / ell, 0.0);
    };
    return c;
}

RearTrack rear_track(const FrontTrack& track, const BicycleConfig& cfg, double T, double h)
{
    require_positive_ell(cfg.ell);
    const int n = numerics::step_count(T, h);
    const double dt = T / n;
    const double ell = cfg.ell;
    const auto rate = [&](double s, double theta) {
        const Vector2d v = track.velocity(s);
        return (v.x() * std::sin(theta) - v.y() * std::cos(theta)) / ell;
    };

    RearTrack out;
    out.config = cfg;
    out.t.resize(n + 1);
    out.theta.resize(n + 1);
    out.theta[0] = cfg.theta0;
    for (int i = 0; i < n; ++i) {
        const double s = i * dt;
        const double th = out.theta[i];
        const double k1 = rate(s, th);
        const double k2 = rate(s + dt / 2, th + dt / 2 * k1);
        const double k3 = rate(s + dt / 2, th + dt / 2 * k2);
        const double k4 = rate(s + dt, th + dt * k3);
        out.theta[i + 1] = th + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    std::vector<double> rx(n + 1), ry(n + 1);
    for (int i = 0; i <= n; ++i) {
        out.t[i] = i * dt;
        out.front.push_back(track.position(out.t[i]));
        out.rear.push_back(out.front.back() + ell * Vector2d(std::cos(out.theta[i]), std::sin(out.theta[i])));
        rx[i] = out.rear.back().x();
        ry[i] = out.rear.back().y();
    }
    const auto vx = numerics::differentiate(std::span<const double>(rx), dt);
    const auto vy = numerics::differentiate(std::span<const double>(ry), dt);
    out.slip.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        out.slip[i] = std::abs(-vx[i] * std::sin(out.theta[i]) + vy[i] * std::cos(out.theta[i]));
        out.max_slip = std::max(out.max_slip, out.slip[i]);
    }
    return out;
}

double spinor_angle(double u, double v)
{
    if (u == 0.0 && v == 0.0) throw ZeroSpinor();
    return 2.0 * std::atan2(v, u);
}

std::vector<double> spinor_angles(const FrontTrack& track, const BicycleConfig& cfg, double T, double h,
                                  const Tolerances& tol)
{
    const FlowTrajectory traj = integrate_flow(bicycle_system(track, cfg.ell), T, h, tol);
    const Vector2d s0(std::cos(cfg.theta0 / 2), std::sin(cfg.theta0 / 2));
    std::vector<double> raw;
    raw.reserve(traj.size());
    for (const auto& g : traj.g) {
        const Vector2d s = g.matrix() * s0;
        raw.push_back(spinor_angle(s.x(), s.y()));
    }
    return unwrap_from(raw, cfg.theta0);
}

BicycleMonodromy bicycle_monodromy(const FrontTrack& track, double ell, double h, const Tolerances& tol)
{
    if (!track.closed) throw ContractViolation("bicycle monodromy needs a closed front track");
    BicycleMonodromy out;
    out.ell = ell;
    out.report = classify_monodromy(propagate(bicycle_system(track, ell), track.perimeter, h, tol), tol.classify);
    if (out.report.kind == MonodromyClass::Hyperbolic) {
        for (const auto& v : out.report.eigendirections) {
            const double theta0 = spinor_angle(v.x(), v.y());
            out.theta0.push_back(theta0);
            out.rear_tracks.push_back(rear_track(track, {ell, theta0}, track.perimeter, h));
        }
    }
    return out;
}

ReciprocalReport reciprocal_curvature_check(const FrontTrack& track, double ell, double h, const Tolerances& tol)
{
    if (!track.closed) throw ContractViolation("reciprocal curvature check needs a closed front track");
    ReciprocalReport out;
    out.trajectory = integrate_flow(bicycle_system(track, ell), track.perimeter, h, tol);
    const auto& traj = out.trajectory;
    std::vector<double> kappa(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        kappa[i] = track.curvature(traj.t[i]);
        if (kappa[i] <= tol.cusp) throw FlatPoint(traj.t[i]);
    }
    const auto K = geodesic_curvature(body_curve(traj, tol));
    const auto k = geodesic_curvature(space_curve(traj, tol));
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (k[i]) out.max_space_curvature = std::max(out.max_space_curvature, std::abs(*k[i]));
        if (!K[i]) continue;
        ReciprocalSample s;
        s.t = traj.t[i];
        s.kappa = kappa[i];
        s.body = *K[i];
        s.predicted = -1.0 / (ell * kappa[i]);
        s.residual = s.body - s.predicted;
        out.max_residual = std::max(out.max_residual, std::abs(s.residual));
        out.samples.push_back(s);
    }
    return out;
}

PrytzTable prytz_asymptotics(const FrontTrack& track, std::span<const double> ells, double h,
                             std::span<const double> theta0s, unsigned threads)
{
    if (!track.closed) throw ContractViolation("Prytz asymptotics need a closed front track");
    std::vector<double> starts(theta0s.begin(), theta0s.end());
    if (starts.empty()) starts = {0.0, M_PI / 2, M_PI};

    const std::size_t m = starts.size();
    std::vector<double> turning(ells.size() * m);
    std::vector<std::string> errors(turning.size());
    numerics::parallel_for(turning.size(), threads, [&](std::size_t idx) {
        try {
            turning[idx] = rear_track(track, {ells[idx / m], starts[idx % m]}, track.perimeter, h).turning();
        } catch (const std::exception& e) {
            errors[idx] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw Error("prytz_asymptotics: " + e);

    PrytzTable table;
    table.area = track.area;
    std::vector<double> ell_v, err_v, rig_v;
    for (std::size_t i = 0; i < ells.size(); ++i) {
        PrytzRow row;
        row.ell = ells[i];
        row.turning = turning[i * m];
        row.scaled = row.turning * row.ell * row.ell;
        row.error = std::abs(row.scaled - track.area);
        const auto [lo, hi] = std::minmax_element(turning.begin() + i * m, turning.begin() + (i + 1) * m);
        row.rigidity = *hi - *lo;
        table.rows.push_back(row);
        ell_v.push_back(row.ell);
        err_v.push_back(row.error);
        rig_v.push_back(row.rigidity);
    }
    if (ells.size() >= 2) {
        table.error_slope = numerics::loglog_slope(ell_v, err_v);
        table.rigidity_slope = numerics::loglog_slope(ell_v, rig_v);
    }
    return table;
}

LemmaTable lemma_ad_verification(const FrontTrack& track, std::span<const double> ells, double h,
                                 const Tolerances& tol)
{
    if (!track.closed) throw ContractViolation("lemma verification needs a closed front track");
    LemmaTable table;
    table.area = track.area;
    std::vector<double> ell_v, err_v, dev_v;
    for (double ell : ells) {
        const GroupElement M = propagate(bicycle_system(track, ell), track.perimeter, h, tol);
        // Strict |tr| < 2: at large l the trace sits within tol.classify of 2
        // (about 1e-6 at l = 40) while its own error is near roundoff.
        const MonodromyReport rep = classify_monodromy(M, 0.0);
        if (rep.kind != MonodromyClass::Elliptic) {
            throw NotElliptic("monodromy is " + std::string(to_string(rep.kind)) + " for l = " + std::to_string(ell));
        }
        // +-M = cos(a/2) I + sin(a/2) J with J^2 = -I, so det of the traceless part is sin^2(a/2).
        const double half_tr = 0.5 * M.trace();
        const SmallMatrix X = M.matrix() - half_tr * SmallMatrix::Identity(2, 2);
        LemmaRow row;
        row.ell = ell;
        row.angle = 2.0 * std::atan2(std::sqrt(std::max(0.0, X.determinant())), std::abs(half_tr));
        row.angle_error = std::abs(row.angle - track.area / (ell * ell));
        AlgebraVector axis = adjoint_axis(M);
        axis = axis / norm(axis);
        if (axis[2] < 0) axis = -axis;
        row.axis = axis;
        const double planar = std::hypot(axis[0], axis[1]);
        row.axis_deviation = planar / std::abs(axis[2]);
        row.axis_slope = std::abs(axis[2]) / planar;
        table.rows.push_back(row);
        ell_v.push_back(ell);
        err_v.push_back(row.angle_error);
        dev_v.push_back(row.axis_deviation);
    }
    if (ells.size() >= 2) {
        table.angle_error_slope = numerics::loglog_slope(ell_v, err_v);
        table.axis_slope_order = numerics::loglog_slope(ell_v, dev_v);
    }
    return table;
}

void write_rear_track_csv(const std::filesystem::path& path, const RearTrack& rear)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "t,theta,fx,fy,rx,ry\n" << std::setprecision(15);
    for (std::size_t i = 0; i < rear.t.size(); ++i) {
        out << rear.t[i] << ',' << rear.theta[i] << ',' << rear.front[i].x() << ',' << rear.front[i].y() << ','
            << rear.rear[i].x() << ',' << rear.rear[i].y() << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

void write_body_curve_csv(const std::filesystem::path& path, const FlowTrajectory& traj)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "t,a1,a2,a3\n" << std::setprecision(15);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << traj.t[i] << ',' << traj.N[i][0] << ',' << traj.N[i][1] << ',' << traj.N[i][2] << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace rollcones
