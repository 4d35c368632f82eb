#include "rollcones/rolling.hpp"

#include <algorithm>
#include <cmath>

#include "rollcones/errors.hpp"
#include "rollcones/numerics.hpp"
#include "rollcones/pseudosphere.hpp"

namespace rollcones {

namespace {

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

double spectral_norm(const Eigen::Matrix3d& m)
{
    return Eigen::JacobiSVD<Eigen::Matrix3d>(m).singularValues()(0);
}

// Phi(t) by end-corrected trapezoid; d|a|/dt = <n,n> <n, a_dot>.
std::vector<double> corrected_phase(const FlowTrajectory& traj)
{
    std::vector<double> phi(traj.size(), 0.0);
    std::vector<double> rate(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& n = traj.n[i];
        rate[i] = inner(n, n) * inner(n, traj.a_dot[i]);
    }
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double h = traj.t[i] - traj.t[i - 1];
        phi[i] = phi[i - 1] + 0.5 * h * (traj.speed[i - 1] + traj.speed[i]) + h * h / 12.0 * (rate[i - 1] - rate[i]);
    }
    return phi;
}

}  // namespace

RollingReport verify_rolling(const FlowTrajectory& traj, const Tolerances& tol)
{
    RollingReport r;
    r.t = traj.t;
    r.step = traj.step;
    r.tolerances = tol;
    const std::size_t n = traj.size();
    for (auto* v : {&r.contact, &r.no_slip, &r.raw_contact, &r.raw_no_slip, &r.bracket, &r.identity}) v->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = traj.g[i];
        const AlgebraVector moved_N_dot = adjoint(g, traj.N_dot[i]);
        const AlgebraVector an = bracket(traj.a[i], traj.n[i]);
        r.contact[i] = (adjoint(g, traj.N[i]) - traj.n[i]).coords.norm();
        r.no_slip[i] = (moved_N_dot - traj.n_dot[i]).coords.norm();
        r.raw_contact[i] = (adjoint(g, traj.A[i]) - traj.a[i]).coords.norm();
        r.raw_no_slip[i] = (adjoint(g, traj.A_dot[i]) - traj.a_dot[i]).coords.norm();
        r.bracket[i] = an.coords.norm();
        r.identity[i] = (traj.n_dot[i] - an - moved_N_dot).coords.norm();
    }
    r.max_contact = max_of(r.contact);
    r.max_no_slip = max_of(r.no_slip);
    r.max_raw_contact = max_of(r.raw_contact);
    r.max_raw_no_slip = max_of(r.raw_no_slip);
    r.max_bracket = max_of(r.bracket);
    r.max_identity = max_of(r.identity);
    return r;
}

std::vector<CurvatureSample> verify_curvature_relation(const FlowTrajectory& traj, const Tolerances& tol)
{
    const SphereCurve body = body_curve(traj, tol);
    const SphereCurve space = space_curve(traj, tol);
    std::vector<std::optional<double>> K, k;
    try {
        K = geodesic_curvature(body);
        k = geodesic_curvature(space);
    } catch (const AllCusps&) {
        return {};
    }
    std::vector<CurvatureSample> out;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double ndot = norm(traj.n_dot[i]);
        if (ndot <= tol.cusp || !K[i] || !k[i]) continue;
        CurvatureSample s;
        s.t = traj.t[i];
        s.body = *K[i];
        s.space = *k[i];
        s.predicted = *k[i] - traj.speed[i] / ndot;
        s.residual = s.body - s.predicted;
        out.push_back(s);
    }
    return out;
}

DecompositionCertificate decompose_flow(const FlowTrajectory& traj, const Tolerances& tol)
{
    const SphereCurve body = body_curve(traj, tol);
    const SphereCurve space = space_curve(traj, tol);

    DecompositionCertificate cert;
    cert.t = traj.t;
    cert.phase = corrected_phase(traj);
    cert.transport_space = transport_operators(space);
    cert.transport_body = transport_operators(body);

    const std::size_t n = traj.size();
    cert.rotation.resize(n);
    cert.residual.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        cert.rotation[i] = tangent_rotation_matrix({traj.n.front(), cert.phase[i]});
        const Eigen::Matrix3d composite =
            cert.transport_space[i] * cert.rotation[i] * cert.transport_body[i].inverse();
        cert.residual[i] = spectral_norm(adjoint_matrix(traj.g[i]) - composite);
        cert.max_phase_mismatch = std::max(cert.max_phase_mismatch, std::abs(cert.phase[i] - traj.phase[i]));
    }
    cert.max_residual = max_of(cert.residual);
    return cert;
}

std::vector<double> angle_bookkeeping(const FlowTrajectory& traj, const Tolerances& tol)
{
    const auto theta = rotation_angles(space_curve(traj, tol));
    const auto Theta = rotation_angles(body_curve(traj, tol));
    const auto phi = corrected_phase(traj);
    std::vector<double> out(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) out[i] = std::abs(Theta[i] - (theta[i] - phi[i]));
    return out;
}

double max_relative_curvature_residual(const FlowTrajectory& traj, const std::vector<CurvatureSample>& samples,
                                       double floor_fraction)
{
    double peak = 0.0;
    for (const auto& v : traj.n_dot) peak = std::max(peak, norm(v));
    double worst = 0.0;
    for (const auto& s : samples) {
        const auto i = static_cast<std::size_t>(std::llround(s.t / traj.step));
        if (norm(traj.n_dot[i]) < floor_fraction * peak) continue;
        const double scale = std::max(1.0, std::abs(s.predicted));
        worst = std::max(worst, std::abs(s.residual) / scale);
    }
    return worst;
}

nlohmann::json tolerances_json(const Tolerances& tol)
{
    return {{"null", tol.null},       {"group", tol.group}, {"sphere", tol.sphere},
            {"roll", tol.roll},       {"cusp", tol.cusp},   {"classify", tol.classify},
            {"step_limit", tol.step_limit}};
}

nlohmann::json rolling_report_json(const nlohmann::json& params, const FlowTrajectory& traj,
                                   const RollingReport& rolling, double curvature_residual,
                                   const DecompositionCertificate& decomposition, bool per_node)
{
    nlohmann::json j;
    j["version"] = ROLLCONES_VERSION;
    j["params"] = params;
    j["grid"] = {{"T", traj.duration()}, {"h", traj.step}, {"nodes", traj.size()}};
    j["tolerances"] = tolerances_json(rolling.tolerances);
    j["max_residuals"] = {{"contact", rolling.max_contact},
                          {"no_slip", rolling.max_no_slip},
                          {"curvature", curvature_residual},
                          {"decomposition", decomposition.max_residual}};
    if (per_node) {
        nlohmann::json nodes = nlohmann::json::array();
        for (std::size_t i = 0; i < traj.size(); ++i) {
            nodes.push_back({{"t", traj.t[i]},
                             {"contact", rolling.contact[i]},
                             {"no_slip", rolling.no_slip[i]},
                             {"decomposition", decomposition.residual[i]}});
        }
        j["per_node"] = std::move(nodes);
    }
    return j;
}

}  // namespace rollcones
