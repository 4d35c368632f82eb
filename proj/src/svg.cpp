#include "rollcones/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rollcones/errors.hpp"

namespace rollcones::svg {

namespace {

std::string fmt(double v, int precision)
{
    if (std::abs(v) < 0.5 * std::pow(10.0, -precision)) v = 0.0;  // no "-0.000"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, y0, scale, ox, oy;

    Eigen::Vector2d map(const Eigen::Vector2d& p) const { return {ox + (p.x() - x0) * scale, oy - (p.y() - y0) * scale}; }
};

// Equal-aspect map of [lo, hi] into the canvas, centred.
Frame fit(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, const Style& s)
{
    const double w = s.width - 2 * s.margin;
    const double h = s.height - 2 * s.margin;
    const double dx = std::max(hi.x() - lo.x(), 1e-12);
    const double dy = std::max(hi.y() - lo.y(), 1e-12);
    const double scale = std::min(w / dx, h / dy);
    Frame f;
    f.x0 = lo.x();
    f.y0 = lo.y();
    f.scale = scale;
    f.ox = s.margin + 0.5 * (w - dx * scale);
    f.oy = s.height - s.margin - 0.5 * (h - dy * scale);
    return f;
}

void header(std::ostream& out, const Style& s, const std::string& title, const std::string& metadata)
{
    out << "<!-- rollcones " << ROLLCONES_VERSION << " svg-style " << kStyleVersion << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << s.width << "\" height=\"" << s.height
        << "\" viewBox=\"0 0 " << s.width << ' ' << s.height << "\">\n";
    if (!metadata.empty()) out << "<metadata>" << escape(metadata) << "</metadata>\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"" << s.background << "\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << fmt(s.width / 2.0, 1) << "\" y=\"" << fmt(s.margin * 0.6, 1)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
            << "</text>\n";
    }
}

void polylines(std::ostream& out, std::span<const Polyline> curves, const Frame& f, const Style& s)
{
    std::size_t colour = 0;
    double legend_y = s.margin;
    for (const auto& c : curves) {
        const std::string stroke =
            c.color.empty() ? s.palette[colour++ % std::max<std::size_t>(1, s.palette.size())] : c.color;
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(s.stroke_width, 2)
            << "\" points=\"";
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            const auto q = f.map(c.points[i]);
            out << (i ? " " : "") << fmt(q.x(), s.precision) << ',' << fmt(q.y(), s.precision);
        }
        out << "\"/>\n";
        if (!c.label.empty()) {
            out << "<text x=\"" << fmt(s.width - s.margin, 1) << "\" y=\"" << fmt(legend_y, 1)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << stroke << "\">"
                << escape(c.label) << "</text>\n";
            legend_y += 14;
        }
    }
}

void finish(std::ostringstream& body, const std::filesystem::path& path)
{
    body << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << body.str();
    if (!out) throw Error("write failed: " + path.string());
}

void require_points(std::span<const Polyline> curves)
{
    for (const auto& c : curves)
        if (!c.points.empty()) return;
    throw ContractViolation("svg: nothing to draw");
}

}  // namespace

void write_curves(const std::filesystem::path& path, std::span<const Polyline> curves, const std::string& title,
                  const std::string& metadata, const Style& style)
{
    require_points(curves);
    Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (const auto& c : curves)
        for (const auto& p : c.points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    const Frame f = fit(lo, hi, style);
    std::ostringstream body;
    header(body, style, title, metadata);
    polylines(body, curves, f, style);
    finish(body, path);
}

void write_poincare_disk(const std::filesystem::path& path, std::span<const Polyline> curves,
                         const std::string& title, const std::string& metadata, const Style& style)
{
    require_points(curves);
    const Frame f = fit({-1.0, -1.0}, {1.0, 1.0}, style);
    std::ostringstream body;
    header(body, style, title, metadata);
    const auto c = f.map({0.0, 0.0});
    body << "<circle cx=\"" << fmt(c.x(), style.precision) << "\" cy=\"" << fmt(c.y(), style.precision)
         << "\" r=\"" << fmt(f.scale, style.precision) << "\" fill=\"none\" stroke=\"" << style.axis_color
         << "\" stroke-width=\"1\"/>\n";
    polylines(body, curves, f, style);
    finish(body, path);
}

void write_tongue_map(const std::filesystem::path& path, const TongueMap& map, const std::string& metadata,
                      const Style& style)
{
    if (map.cells.empty()) throw ContractViolation("svg: empty tongue map");
    const int nw = map.omega.count;
    const int ne = map.eps.count;
    const double w = style.width - 2 * style.margin;
    const double h = style.height - 2 * style.margin;
    const double cw = w / nw;
    const double ch = h / ne;

    std::ostringstream body;
    header(body, style, "Mathieu stability chart", metadata);
    for (int j = 0; j < ne; ++j) {
        for (int i = 0; i < nw; ++i) {
            const auto& cell = map.at(i, j);
            std::string fill = style.error;
            if (cell.kind) {
                switch (*cell.kind) {
                case MonodromyClass::Elliptic: fill = style.elliptic; break;
                case MonodromyClass::Parabolic: fill = style.parabolic; break;
                case MonodromyClass::Hyperbolic: fill = style.hyperbolic; break;
                }
            }
            body << "<rect x=\"" << fmt(style.margin + i * cw, style.precision) << "\" y=\""
                 << fmt(style.height - style.margin - (j + 1) * ch, style.precision) << "\" width=\""
                 << fmt(cw, style.precision) << "\" height=\"" << fmt(ch, style.precision) << "\" fill=\"" << fill
                 << "\"/>\n";
        }
    }
    const auto label = [&](double x, double y, const std::string& anchor, const std::string& text) {
        body << "<text x=\"" << fmt(x, 1) << "\" y=\"" << fmt(y, 1) << "\" text-anchor=\"" << anchor
             << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(text) << "</text>\n";
    };
    const double base = style.height - style.margin;
    label(style.margin, base + 16, "start", fmt(map.omega.lo, 3));
    label(style.width - style.margin, base + 16, "end", fmt(map.omega.hi, 3));
    label(style.width / 2.0, base + 30, "middle", "omega");
    label(style.margin - 4, base, "end", fmt(map.eps.lo, 3));
    label(style.margin - 4, style.margin + 10, "end", fmt(map.eps.hi, 3));
    label(style.margin - 4, style.height / 2.0, "end", "eps");
    finish(body, path);
}

}  // namespace rollcones::svg
