#include "rollcones/hill.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rollcones/errors.hpp"
#include "rollcones/numerics.hpp"

namespace rollcones {

CoefficientCurve HillSystem::coefficients() const
{
    CoefficientCurve c;
    c.metric = Metric::Minkowski;
    c.a = [q = q](double t) {
        const double v = q(t);
        return AlgebraVector(Metric::Minkowski, 0.0, 1.0 - v, 1.0 + v);
    };
    if (q_dot) {
        c.a_dot = [qd = q_dot](double t) {
            const double v = qd(t);
            return AlgebraVector(Metric::Minkowski, 0.0, -v, v);
        };
    }
    return c;
}

HillSystem mathieu_system(double omega, double eps)
{
    if (!(std::abs(eps) < 1.0)) throw PotentialVanishes("mathieu_system: need |eps| < 1 for q > 0");
    if (!(omega > 0.0)) throw ContractViolation("mathieu_system: need omega > 0");
    HillSystem sys;
    const double w2 = omega * omega;
    sys.q = [w2, eps](double t) { return w2 * (1.0 + eps * std::cos(t)); };
    sys.q_dot = [w2, eps](double t) { return -w2 * eps * std::sin(t); };
    sys.period = 2 * M_PI;
    return sys;
}

double body_curvature_analytic(double omega, double eps, double t)
{
    if (eps == 0.0) throw ContractViolation("body_curvature_analytic: body curve is a point for eps = 0");
    const double s = std::sin(t);
    if (std::abs(s) < 1e-12) throw CuspAt(t);
    return -4.0 * omega * std::pow(1.0 + eps * std::cos(t), 1.5) / (std::abs(eps) * std::abs(s));
}

void check_potential(const HillSystem& sys, double T, double h, const Tolerances& tol)
{
    const int n = numerics::step_count(T, h);
    const double dt = T / n;
    // RK4 also samples half steps.
    for (int i = 0; i <= 2 * n; ++i) {
        const double t = 0.5 * i * dt;
        if (sys.q(t) <= tol.null) {
            throw PotentialVanishes("q(t) <= 0 at t = " + std::to_string(t) + "; a(t) leaves the timelike cone");
        }
    }
}

FlowTrajectory hill_trajectory(const HillSystem& sys, double T, double h, const Tolerances& tol)
{
    check_potential(sys, T, h, tol);
    return integrate_flow(sys.coefficients(), T, h, tol);
}

const char* to_string(MonodromyClass c)
{
    switch (c) {
    case MonodromyClass::Elliptic: return "elliptic";
    case MonodromyClass::Parabolic: return "parabolic";
    case MonodromyClass::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

MonodromyReport classify_monodromy(const GroupElement& M, double band)
{
    if (M.metric() != Metric::Minkowski) throw ContractViolation("classify_monodromy: expects an SL2 element");
    MonodromyReport r;
    r.M = M;
    r.trace = M.trace();
    const double excess = std::abs(r.trace) - 2.0;
    if (excess < -band) {
        r.kind = MonodromyClass::Elliptic;
        r.rotation_angle = std::acos(std::clamp(r.trace / 2.0, -1.0, 1.0));
    } else if (excess > band) {
        r.kind = MonodromyClass::Hyperbolic;
        const double disc = std::sqrt(r.trace * r.trace - 4.0);
        const double big = 0.5 * (r.trace + std::copysign(disc, r.trace));
        const double small = 1.0 / big;
        r.expansion_factor = std::abs(big);
        const auto& m = M.matrix();
        for (double lambda : {big, small}) {
            // (M - lambda I) v = 0; take the better-conditioned row.
            const Eigen::Vector2d r0(m(0, 0) - lambda, m(0, 1));
            const Eigen::Vector2d r1(m(1, 0), m(1, 1) - lambda);
            const Eigen::Vector2d row = r0.norm() >= r1.norm() ? r0 : r1;
            r.eigendirections.push_back(Eigen::Vector2d(-row.y(), row.x()).normalized());
        }
    } else {
        r.kind = MonodromyClass::Parabolic;
    }
    return r;
}

MonodromyReport monodromy(const HillSystem& sys, double h, const Tolerances& tol)
{
    check_potential(sys, sys.period, h, tol);
    return classify_monodromy(propagate(sys.coefficients(), sys.period, h, tol), tol.classify);
}

bool powers_bounded(const GroupElement& M, int kmax, double bound)
{
    const SmallMatrix inv = M.inverse().matrix();
    SmallMatrix fwd = M.matrix();
    SmallMatrix back = inv;
    for (int k = 1; k <= kmax; ++k) {
        if (fwd.norm() > bound || back.norm() > bound) return false;
        fwd = fwd * M.matrix();
        back = back * inv;
    }
    return true;
}

std::vector<double> Range::values() const
{
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return v;
}

Range Range::parse(const std::string& text)
{
    std::istringstream in(text);
    Range r;
    char c1 = 0, c2 = 0;
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.count) || c1 != ':' || c2 != ':' || r.count < 1 ||
        !in.eof()) {
        throw std::invalid_argument("range must look like lo:hi:n with n >= 1, got '" + text + "'");
    }
    return r;
}

TongueMap tongue_scan(const Range& omega, const Range& eps, double h, unsigned threads, const Tolerances& tol)
{
    TongueMap map;
    map.omega = omega;
    map.eps = eps;
    map.h = h;
    const auto ws = omega.values();
    const auto es = eps.values();
    map.cells.resize(ws.size() * es.size());
    for (std::size_t j = 0; j < es.size(); ++j)
        for (std::size_t i = 0; i < ws.size(); ++i) {
            auto& cell = map.cells[j * ws.size() + i];
            cell.omega = ws[i];
            cell.eps = es[j];
        }

    numerics::parallel_for(map.cells.size(), threads, [&](std::size_t idx) {
        auto& cell = map.cells[idx];
        try {
            const auto r = monodromy(mathieu_system(cell.omega, cell.eps), h, tol);
            cell.kind = r.kind;
            cell.trace = r.trace;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });
    return map;
}

void write_tongue_csv(const std::filesystem::path& path, const TongueMap& map)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "omega,eps,class,trace\n" << std::setprecision(12);
    for (const auto& c : map.cells) {
        out << c.omega << ',' << c.eps << ',' << (c.kind ? to_string(*c.kind) : "error") << ',' << c.trace << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

TongueInterval locate_tongue(double eps, double center, double half_width, double h, const Tolerances& tol)
{
    const auto excess = [&](double w) {
        return std::abs(propagate(mathieu_system(w, eps).coefficients(), 2 * M_PI, h, tol).trace()) - 2.0;
    };
    TongueInterval out;
    const double lo = center - half_width;
    const double hi = center + half_width;

    constexpr int kCoarse = 200;
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(kCoarse + 1);
    for (int i = 0; i <= kCoarse; ++i) {
        vals[i] = excess(lo + (hi - lo) * i / kCoarse);
        if (vals[i] > best_val) {
            best_val = vals[i];
            best = i;
        }
    }
    // Golden section around the coarse maximum.
    double a = lo + (hi - lo) * std::max(0, best - 1) / kCoarse;
    double b = lo + (hi - lo) * std::min(kCoarse, best + 1) / kCoarse;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = excess(c), fd = excess(d);
    while (b - a > 1e-9) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = excess(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = excess(d);
        }
    }
    out.peak_omega = fc > fd ? c : d;
    out.peak_excess = std::max({fc, fd, best_val});
    if (best_val > std::max(fc, fd)) out.peak_omega = lo + (hi - lo) * best / kCoarse;
    if (out.peak_excess <= 0.0) return out;

    const auto bisect = [&](double inside, double outside) {
        for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-11; ++it) {
            const double mid = 0.5 * (inside + outside);
            (excess(mid) > 0.0 ? inside : outside) = mid;
        }
        return 0.5 * (inside + outside);
    };
    if (excess(lo) > 0.0 || excess(hi) > 0.0) {
        // Tongue wider than the window: report the clipped interval.
        out.found = true;
        out.lo = excess(lo) > 0.0 ? lo : bisect(out.peak_omega, lo);
        out.hi = excess(hi) > 0.0 ? hi : bisect(out.peak_omega, hi);
        return out;
    }
    out.found = true;
    out.lo = bisect(out.peak_omega, lo);
    out.hi = bisect(out.peak_omega, hi);
    return out;
}

DiskCurves poincare_disk_curves(double omega, double eps, double T, double h, const Tolerances& tol)
{
    const HillSystem sys = mathieu_system(omega, eps);
    const FlowTrajectory traj = hill_trajectory(sys, T, h, tol);
    const SphereCurve body = body_curve(traj, tol);

    DiskCurves out;
    out.space = traj.n;
    out.body = traj.N;
    out.monodromy = monodromy(sys, h, tol);
    out.body_speed = body.speed;
    for (const auto& p : out.space) out.space_disk.push_back(poincare_disk(p));
    for (const auto& p : out.body) {
        out.body_disk.push_back(poincare_disk(p));
        out.max_body_radius = std::max(out.max_body_radius, out.body_disk.back().norm());
    }
    const double threshold = 100.0 * tol.cusp;
    const auto& s = out.body_speed;
    const std::size_t n = s.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (s[i] >= threshold) continue;
        const bool left = i == 0 || s[i] < s[i - 1];
        const bool right = s[i] < s[i + 1];
        if (left && right) ++out.cusp_count;
    }
    out.closed = (out.body.back().coords - out.body.front().coords).norm() < 1e-6;
    return out;
}

nlohmann::json monodromy_json(const MonodromyReport& r)
{
    nlohmann::json j;
    const auto& m = r.M.matrix();
    j["class"] = to_string(r.kind);
    j["trace"] = r.trace;
    j["matrix"] = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
    j["bounded"] = r.bounded();
    j["rotation_angle"] = r.rotation_angle ? nlohmann::json(*r.rotation_angle) : nlohmann::json(nullptr);
    j["expansion_factor"] = r.expansion_factor ? nlohmann::json(*r.expansion_factor) : nlohmann::json(nullptr);
    nlohmann::json dirs = nlohmann::json::array();
    for (const auto& v : r.eigendirections) dirs.push_back({v.x(), v.y()});
    j["eigendirections"] = std::move(dirs);
    return j;
}

}  // namespace rollcones
