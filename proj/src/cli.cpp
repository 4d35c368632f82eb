#include "rollcones/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rollcones/bicycle.hpp"
#include "rollcones/errors.hpp"
#include "rollcones/flow.hpp"
#include "rollcones/hill.hpp"
#include "rollcones/rolling.hpp"
#include "rollcones/svg.hpp"

namespace rollcones::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kCurvatureThreshold = 1e-4;
constexpr double kDecompositionThreshold = 1e-5;
constexpr double kClosureThreshold = 1e-5;
constexpr double kCurvatureFloor = 0.05;

struct Common {
    std::string out;
    std::vector<std::string> formats{"csv", "json", "svg"};
    bool assert_residuals = false;
    double h = 1e-3;
    unsigned threads = 0;
};

struct SystemOptions {
    std::string system = "mathieu";
    double omega = 1.0;
    double eps = 0.5;
    std::string track = "circle:1";
    double ell = 1.5;
    double T = 0.0;  // 0: one period / lap
};

struct Built {
    CoefficientCurve curve;
    double T = 0.0;
    json params;
};

Built build_system(const SystemOptions& o)
{
    Built b;
    b.params = {{"system", o.system}};
    if (o.system == "mathieu") {
        const HillSystem sys = mathieu_system(o.omega, o.eps);
        b.curve = sys.coefficients();
        b.T = sys.period;
        b.params["omega"] = o.omega;
        b.params["eps"] = o.eps;
    } else if (o.system == "precession") {
        b.curve.metric = Metric::Euclidean;
        b.curve.a = [](double t) { return AlgebraVector(Metric::Euclidean, std::cos(t), std::sin(t), 0.5); };
        b.curve.a_dot = [](double t) { return AlgebraVector(Metric::Euclidean, -std::sin(t), std::cos(t), 0.0); };
        b.T = 2 * M_PI;
    } else {
        const FrontTrack track = parse_track(o.track);
        b.curve = bicycle_system(track, o.ell);
        b.T = track.perimeter;
        b.params["track"] = o.track;
        b.params["ell"] = o.ell;
    }
    if (o.T > 0) b.T = o.T;
    b.params["T"] = b.T;
    return b;
}

class Session {
public:
    Session(std::string command, const Common& common, json params)
        : command_(std::move(command)), common_(common), params_(std::move(params))
    {
        dir_ = common.out;
        if (dir_.empty()) {
            const char* env = std::getenv(kOutEnv);
            dir_ = env && *env ? env : ".";
        }
        fs::create_directories(dir_);
        params_["h"] = common.h;
    }

    bool wants(const std::string& format) const
    {
        return std::find(common_.formats.begin(), common_.formats.end(), format) != common_.formats.end();
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

    json config() const
    {
        return {{"command", command_},
                {"version", ROLLCONES_VERSION},
                {"params", params_},
                {"tolerances", tolerances_json(kDefaultTolerances)}};
    }

    std::string metadata() const { return config().dump(); }

    // Prefix a written CSV with '#' comment lines carrying the run config.
    void stamp_csv(const fs::path& p) const
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream body;
        body << in.rdbuf();
        in.close();
        std::ofstream out(p, std::ios::binary);
        out << "# rollcones " << ROLLCONES_VERSION << '\n' << "# config " << metadata() << '\n' << body.str();
        if (!out) throw Error("write failed: " + p.string());
    }

    void write_json(const std::string& name, json report) const
    {
        report["config"] = config();
        std::ofstream out(path(name), std::ios::binary);
        if (!out) throw Error("cannot open " + path(name).string() + " for writing");
        out << report.dump(2) << '\n';
        if (!out) throw Error("write failed: " + path(name).string());
        written_.push_back(path(name).string());
    }

    template <typename Writer>
    void csv(const std::string& name, Writer&& writer) const
    {
        if (!wants("csv")) return;
        writer(path(name));
        stamp_csv(path(name));
        written_.push_back(path(name).string());
    }

    template <typename Writer>
    void svg(const std::string& name, Writer&& writer) const
    {
        if (!wants("svg")) return;
        writer(path(name), metadata());
        written_.push_back(path(name).string());
    }

    void json_report(const std::string& name, json report) const
    {
        if (wants("json")) write_json(name, std::move(report));
    }

    int finish(const std::vector<std::string>& failures) const
    {
        for (const auto& w : written_) std::cout << "wrote " << w << '\n';
        for (const auto& f : failures) std::cout << "FAIL " << f << '\n';
        return common_.assert_residuals && !failures.empty() ? 1 : 0;
    }

private:
    std::string command_;
    Common common_;
    json params_;
    fs::path dir_;
    mutable std::vector<std::string> written_;
};

std::vector<Eigen::Vector2d> project(const std::vector<AlgebraVector>& pts, bool disk)
{
    std::vector<Eigen::Vector2d> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(disk ? poincare_disk(p) : Eigen::Vector2d(p[0], p[1]));
    return out;
}

void check(std::vector<std::string>& failures, const std::string& name, double value, double threshold)
{
    if (!(value <= threshold)) {
        std::ostringstream s;
        s << name << " = " << value << " > " << threshold;
        failures.push_back(s.str());
    }
}

double closed_form_curvature_error(const FlowTrajectory& traj, double omega, double eps)
{
    const auto K = geodesic_curvature(body_curve(traj));
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (std::abs(std::sin(traj.t[i])) <= 0.1 || !K[i]) continue;
        const double exact = body_curvature_analytic(omega, eps, traj.t[i]);
        worst = std::max(worst, std::abs(*K[i] - exact) / std::abs(exact));
    }
    return worst;
}

int cmd_flow(const Common& common, const SystemOptions& so)
{
    const Built b = build_system(so);
    Session s("flow", common, b.params);
    const FlowTrajectory traj = integrate_flow(b.curve, b.T, common.h);
    s.csv("trajectory.csv", [&](const fs::path& p) { write_trajectory_csv(p, traj); });

    const auto& g = traj.g.back();
    json report;
    report["final_g"] = json::array();
    for (int r = 0; r < g.matrix().rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < g.matrix().cols(); ++c) row.push_back(g(r, c));
        report["final_g"].push_back(row);
    }
    report["group_defect"] = g.group_defect();
    report["phase"] = traj.phase.back();
    report["nodes"] = traj.size();
    report["surface"] = to_string(sphere_kind_of(traj.n.front()));
    s.json_report("flow.json", report);

    const bool disk = sphere_kind_of(traj.n.front()) == SphereKind::H2;
    const std::vector<svg::Polyline> curves = {{project(traj.n, disk), "space curve n", ""},
                                               {project(traj.N, disk), "body curve N", ""}};
    s.svg("flow.svg", [&](const fs::path& p, const std::string& meta) {
        if (disk) {
            svg::write_poincare_disk(p, curves, "space and body curves", meta);
        } else {
            svg::write_curves(p, curves, "space and body curves (a1, a2)", meta);
        }
    });
    return s.finish({});
}

int cmd_verify(const Common& common, const SystemOptions& so, bool per_node)
{
    const Built b = build_system(so);
    Session s("verify", common, b.params);
    const FlowTrajectory traj = integrate_flow(b.curve, b.T, common.h);
    const RollingReport rolling = verify_rolling(traj);
    const auto samples = verify_curvature_relation(traj);
    const double curvature = max_relative_curvature_residual(traj, samples, kCurvatureFloor);
    const DecompositionCertificate decomposition = decompose_flow(traj);

    json report = rolling_report_json(b.params, traj, rolling, curvature, decomposition, per_node);
    report["thresholds"] = {{"contact", kDefaultTolerances.roll},
                            {"no_slip", kDefaultTolerances.roll},
                            {"curvature", kCurvatureThreshold},
                            {"decomposition", kDecompositionThreshold}};
    std::vector<std::string> failures;
    check(failures, "contact", rolling.max_contact, kDefaultTolerances.roll);
    check(failures, "no_slip", rolling.max_no_slip, kDefaultTolerances.roll);
    check(failures, "curvature", curvature, kCurvatureThreshold);
    check(failures, "decomposition", decomposition.max_residual, kDecompositionThreshold);
    if (so.system == "mathieu") {
        const double closed = closed_form_curvature_error(traj, so.omega, so.eps);
        report["max_residuals"]["curvature_closed_form"] = closed;
        check(failures, "curvature_closed_form", closed, kCurvatureThreshold);
    }
    report["passed"] = failures.empty();
    s.json_report("verify.json", report);
    std::cout << "contact " << rolling.max_contact << "  no_slip " << rolling.max_no_slip << "  curvature "
              << curvature << "  decomposition " << decomposition.max_residual << '\n';
    return s.finish(failures);
}

int cmd_mathieu(const Common& common, double omega, double eps, double T)
{
    const double span = T > 0 ? T : 2 * M_PI;
    Session s("mathieu", common, {{"omega", omega}, {"eps", eps}, {"T", span}});
    const DiskCurves dc = poincare_disk_curves(omega, eps, span, common.h);
    const FlowTrajectory traj = hill_trajectory(mathieu_system(omega, eps), span, common.h);

    json report;
    report["monodromy"] = monodromy_json(dc.monodromy);
    report["cusp_count"] = dc.cusp_count;
    report["body_closed"] = dc.closed;
    report["max_body_disk_radius"] = dc.max_body_radius;
    std::vector<std::string> failures;
    if (eps != 0.0) {
        const double closed = closed_form_curvature_error(traj, omega, eps);
        report["curvature_closed_form"] = closed;
        check(failures, "curvature_closed_form", closed, kCurvatureThreshold);
    }
    s.json_report("mathieu.json", report);
    s.csv("space_disk.csv", [&](const fs::path& p) { write_poincare_csv(p, dc.space); });
    s.csv("body_disk.csv", [&](const fs::path& p) { write_poincare_csv(p, dc.body); });
    s.csv("trajectory.csv", [&](const fs::path& p) { write_trajectory_csv(p, traj); });
    const std::vector<svg::Polyline> curves = {{dc.space_disk, "space curve n", ""},
                                               {dc.body_disk, "body curve N", ""}};
    s.svg("mathieu_disk.svg", [&](const fs::path& p, const std::string& meta) {
        svg::write_poincare_disk(p, curves, "Mathieu rolling curves", meta);
    });
    std::cout << "monodromy " << to_string(dc.monodromy.kind) << "  trace " << dc.monodromy.trace << '\n';
    return s.finish(failures);
}

int cmd_tongues(const Common& common, const std::string& omega_spec, const std::string& eps_spec)
{
    const Range omega = Range::parse(omega_spec);
    const Range eps = Range::parse(eps_spec);
    Session s("tongues", common, {{"omega", omega_spec}, {"eps", eps_spec}});
    const TongueMap map = tongue_scan(omega, eps, common.h, common.threads);

    json counts = {{"elliptic", 0}, {"parabolic", 0}, {"hyperbolic", 0}, {"error", 0}};
    json errors = json::array();
    for (const auto& c : map.cells) {
        counts[c.kind ? to_string(*c.kind) : "error"] = counts[c.kind ? to_string(*c.kind) : "error"].get<int>() + 1;
        if (!c.kind) errors.push_back({{"omega", c.omega}, {"eps", c.eps}, {"error", c.error}});
    }
    s.csv("tongues.csv", [&](const fs::path& p) { write_tongue_csv(p, map); });
    s.svg("tongues.svg", [&](const fs::path& p, const std::string& meta) { svg::write_tongue_map(p, map, meta); });
    s.json_report("tongues.json", {{"counts", counts}, {"errors", errors}});
    std::vector<std::string> failures;
    if (!errors.empty()) failures.push_back(std::to_string(errors.size()) + " cells failed");
    std::cout << counts.dump() << '\n';
    return s.finish(failures);
}

int cmd_bicycle(const Common& common, const std::string& track_spec, double ell, double theta0)
{
    const FrontTrack track = parse_track(track_spec);
    Session s("bicycle", common, {{"track", track_spec}, {"ell", ell}, {"theta0", theta0}});
    const BicycleMonodromy mono = bicycle_monodromy(track, ell, common.h);
    const ReciprocalReport recip = reciprocal_curvature_check(track, ell, common.h);

    std::vector<RearTrack> rears = mono.rear_tracks;
    if (rears.empty()) rears.push_back(rear_track(track, {ell, theta0}, track.perimeter, common.h));

    json report;
    report["monodromy"] = monodromy_json(mono.report);
    report["perimeter"] = track.perimeter;
    report["area"] = track.area;
    double worst_relative = 0.0;
    for (const auto& r : recip.samples) worst_relative = std::max(worst_relative, std::abs(r.residual / r.predicted));
    report["reciprocal_curvature"] = {{"max_residual", recip.max_residual},
                                      {"max_relative_residual", worst_relative},
                                      {"max_space_curvature", recip.max_space_curvature}};
    std::vector<std::string> failures;
    check(failures, "reciprocal_curvature", worst_relative, kCurvatureThreshold);
    json tracks = json::array();
    for (std::size_t i = 0; i < rears.size(); ++i) {
        const auto& r = rears[i];
        double rmin = INFINITY, rmax = 0.0;
        for (const auto& p : r.rear) {
            rmin = std::min(rmin, p.norm());
            rmax = std::max(rmax, p.norm());
        }
        tracks.push_back({{"theta0", r.config.theta0},
                          {"closure", r.closure()},
                          {"turning", r.turning()},
                          {"max_slip", r.max_slip},
                          {"min_radius", rmin},
                          {"max_radius", rmax}});
        check(failures, "slip[" + std::to_string(i) + "]", r.max_slip, kDefaultTolerances.roll);
        if (!mono.rear_tracks.empty()) check(failures, "closure[" + std::to_string(i) + "]", r.closure(), kClosureThreshold);
        s.csv("rear_track_" + std::to_string(i) + ".csv", [&](const fs::path& p) { write_rear_track_csv(p, r); });
    }
    report["rear_tracks"] = tracks;
    report["closed_rear_tracks"] = !mono.rear_tracks.empty();
    s.json_report("bicycle.json", report);
    s.csv("body_curve.csv", [&](const fs::path& p) { write_body_curve_csv(p, recip.trajectory); });

    std::vector<svg::Polyline> curves = {{rears.front().front, "front track", ""}};
    for (std::size_t i = 0; i < rears.size(); ++i) curves.push_back({rears[i].rear, "rear track " + std::to_string(i), ""});
    s.svg("bicycle.svg", [&](const fs::path& p, const std::string& meta) {
        svg::write_curves(p, curves, "bicycle tracks", meta);
    });
    std::cout << "monodromy " << to_string(mono.report.kind) << "  trace " << mono.report.trace << '\n';
    return s.finish(failures);
}

int cmd_prytz(const Common& common, const std::string& track_spec, const std::vector<double>& ells)
{
    const FrontTrack track = parse_track(track_spec);
    Session s("prytz", common, {{"track", track_spec}, {"ells", ells}});
    const PrytzTable prytz = prytz_asymptotics(track, ells, common.h, {}, common.threads);

    json report;
    report["area"] = prytz.area;
    json rows = json::array();
    for (const auto& r : prytz.rows) {
        rows.push_back({{"ell", r.ell},
                        {"turning", r.turning},
                        {"turning_ell2", r.scaled},
                        {"error", r.error},
                        {"rigidity", r.rigidity}});
    }
    report["prytz"] = {{"rows", rows}, {"error_slope", prytz.error_slope}, {"rigidity_slope", prytz.rigidity_slope}};
    std::vector<std::string> failures;
    check(failures, "prytz error slope", prytz.error_slope, -1.0);
    try {
        const LemmaTable lemma = lemma_ad_verification(track, ells, common.h);
        json lrows = json::array();
        for (const auto& r : lemma.rows) {
            lrows.push_back({{"ell", r.ell},
                             {"angle", r.angle},
                             {"angle_error", r.angle_error},
                             {"axis_deviation", r.axis_deviation},
                             {"axis_slope", r.axis_slope},
                             {"axis", {r.axis[0], r.axis[1], r.axis[2]}}});
        }
        report["lemma"] = {{"rows", lrows},
                           {"angle_error_slope", lemma.angle_error_slope},
                           {"axis_deviation_slope", lemma.axis_slope_order}};
        check(failures, "angle error slope", lemma.angle_error_slope, -3.0);
        check(failures, "axis deviation slope", lemma.axis_slope_order, -0.9);
    } catch (const NotElliptic& e) {
        report["lemma"] = {{"error", e.what()}};
        failures.push_back(e.what());
    }
    s.json_report("prytz.json", report);
    s.csv("prytz.csv", [&](const fs::path& p) {
        std::ofstream out(p);
        out << "ell,turning,turning_ell2,error,rigidity\n" << std::setprecision(15);
        for (const auto& r : prytz.rows) {
            out << r.ell << ',' << r.turning << ',' << r.scaled << ',' << r.error << ',' << r.rigidity << '\n';
        }
        if (!out) throw Error("write failed: " + p.string());
    });
    std::cout << "error slope " << prytz.error_slope << '\n';
    return s.finish(failures);
}

void add_common(CLI::App* sub, Common& c, bool threads)
{
    sub->add_option("--out", c.out, std::string("output directory (default $") + kOutEnv + " or .)");
    sub->add_option("--format", c.formats, "subset of csv,json,svg")
        ->delimiter(',')
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    sub->add_option("--h", c.h, "integration step")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_flag("--assert", c.assert_residuals, "exit 1 if a residual exceeds its threshold");
    if (threads) sub->add_option("--threads", c.threads, "worker threads (0: all cores)");
}

void add_system(CLI::App* sub, SystemOptions& o)
{
    sub->add_option("--system", o.system, "mathieu, precession or bicycle")
        ->check(CLI::IsMember({"mathieu", "precession", "bicycle"}))
        ->capture_default_str();
    sub->add_option("--omega", o.omega, "Mathieu frequency")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--eps", o.eps, "Mathieu modulation depth, |eps| < 1")->capture_default_str();
    sub->add_option("--track", o.track, "front track: circle:r, ellipse:a,b or CSV path")->capture_default_str();
    sub->add_option("--ell", o.ell, "bicycle length")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--T", o.T, "time span (default: one period or lap)")->check(CLI::NonNegativeNumber);
}

int dispatch(CLI::App& app, int argc, const char* const* argv)
{
    app.require_subcommand(1);
    Common flow_c, verify_c, mathieu_c, tongues_c, bicycle_c, prytz_c;
    SystemOptions flow_s, verify_s;
    bool per_node = false;
    double m_omega = 1.0, m_eps = 0.5, m_T = 0.0;
    std::string t_omega = "0.05:2:200", t_eps = "0:0.95:100";
    std::string b_track = "circle:1";
    double b_ell = 1.5, b_theta0 = 0.0;
    std::string p_track = "circle:1";
    std::vector<double> p_ells = {5, 10, 20, 40};
    tongues_c.h = 2 * M_PI / 4000;

    auto* flow = app.add_subcommand("flow", "integrate a flow and write its trajectory");
    add_common(flow, flow_c, false);
    add_system(flow, flow_s);

    auto* verify = app.add_subcommand("verify", "rolling, curvature and decomposition residuals");
    add_common(verify, verify_c, false);
    add_system(verify, verify_s);
    verify->add_flag("--per-node", per_node, "include per-node residuals in the report");

    auto* mathieu = app.add_subcommand("mathieu", "Mathieu monodromy and Poincare-disk curves");
    add_common(mathieu, mathieu_c, false);
    mathieu->add_option("--omega", m_omega, "Mathieu frequency")->check(CLI::PositiveNumber)->capture_default_str();
    mathieu->add_option("--eps", m_eps, "modulation depth, |eps| < 1")->capture_default_str();
    mathieu->add_option("--T", m_T, "time span (default 2 pi)")->check(CLI::NonNegativeNumber);

    auto* tongues = app.add_subcommand("tongues", "stability chart over an (omega, eps) grid");
    add_common(tongues, tongues_c, true);
    tongues->add_option("--omega", t_omega, "range lo:hi:n")->capture_default_str();
    tongues->add_option("--eps", t_eps, "range lo:hi:n")->capture_default_str();

    auto* bicycle = app.add_subcommand("bicycle", "bicycle monodromy and rear tracks");
    add_common(bicycle, bicycle_c, false);
    bicycle->add_option("--track", b_track, "circle:r, ellipse:a,b or CSV path")->capture_default_str();
    bicycle->add_option("--ell", b_ell, "bicycle length")->check(CLI::PositiveNumber)->capture_default_str();
    bicycle->add_option("--theta0", b_theta0, "initial frame angle when no closed track is forced");

    auto* prytz = app.add_subcommand("prytz", "holonomy angle against enclosed area");
    add_common(prytz, prytz_c, true);
    prytz->add_option("--track", p_track, "closed front track: circle:r, ellipse:a,b or CSV path")->capture_default_str();
    prytz->add_option("--ells", p_ells, "comma-separated bicycle lengths")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);

    app.parse(argc, argv);

    if (*flow) return cmd_flow(flow_c, flow_s);
    if (*verify) return cmd_verify(verify_c, verify_s, per_node);
    if (*mathieu) return cmd_mathieu(mathieu_c, m_omega, m_eps, m_T);
    if (*tongues) return cmd_tongues(tongues_c, t_omega, t_eps);
    if (*bicycle) return cmd_bicycle(bicycle_c, b_track, b_ell, b_theta0);
    return cmd_prytz(prytz_c, p_track, p_ells);
}

}  // namespace

int run(int argc, char** argv)
{
    CLI::App app{"rolling cones experiments", "rollcones"};
    app.set_help_flag("--help", "print help and exit");  // leaves -h free; the step is --h
    app.set_version_flag("--version", ROLLCONES_VERSION);
    try {
        return dispatch(app, argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ContractViolation& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const PotentialVanishes& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(const std::vector<std::string>& args)
{
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("rollcones");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    argv.push_back(nullptr);
    return run(static_cast<int>(storage.size()), argv.data());
}

}  // namespace rollcones::cli
