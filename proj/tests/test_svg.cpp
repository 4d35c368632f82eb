#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rollcones/errors.hpp"
#include "rollcones/svg.hpp"

using namespace rollcones;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("rollcones_svg_" + name); }

std::vector<svg::Polyline> spiral()
{
    svg::Polyline p;
    p.label = "spiral";
    for (int i = 0; i < 200; ++i) {
        const double t = 0.05 * i;
        p.points.emplace_back(0.9 * t / 10 * std::cos(t), 0.9 * t / 10 * std::sin(t));
    }
    return {p};
}

}  // namespace

TEST(Svg, DefaultStyle)
{
    const svg::Style s;
    EXPECT_EQ(s.width, 640);
    EXPECT_EQ(s.height, 640);
    EXPECT_DOUBLE_EQ(s.margin, 40.0);
    EXPECT_EQ(s.precision, 3);
    EXPECT_NE(s.elliptic, s.hyperbolic);
    EXPECT_NE(s.parabolic, s.hyperbolic);
    EXPECT_NE(s.error, s.elliptic);
}

TEST(Svg, CurvesAreDeterministic)
{
    const auto curves = spiral();
    svg::write_curves(scratch("a.svg"), curves, "spiral", "meta");
    svg::write_curves(scratch("b.svg"), curves, "spiral", "meta");
    const std::string a = slurp(scratch("a.svg"));
    EXPECT_EQ(a, slurp(scratch("b.svg")));
    EXPECT_EQ(a.rfind("<!-- rollcones " ROLLCONES_VERSION " svg-style 1 -->\n", 0), 0u);
    EXPECT_NE(a.find("<metadata>meta</metadata>"), std::string::npos);
    EXPECT_NE(a.find("<polyline"), std::string::npos);
    EXPECT_NE(a.find("spiral</text>"), std::string::npos);
    EXPECT_EQ(a.find("-0.000"), std::string::npos);
    fs::remove(scratch("a.svg"));
    fs::remove(scratch("b.svg"));
}

TEST(Svg, PoincareDiskDrawsTheAbsolute)
{
    svg::write_poincare_disk(scratch("disk.svg"), spiral(), "disk");
    const std::string d = slurp(scratch("disk.svg"));
    // Unit circle centred on the canvas with radius (640 - 2 * 40) / 2.
    EXPECT_NE(d.find("<circle cx=\"320.000\" cy=\"320.000\" r=\"280.000\""), std::string::npos);
    fs::remove(scratch("disk.svg"));
}

TEST(Svg, TongueMapColours)
{
    TongueMap map;
    map.omega = {0.4, 0.6, 3};
    map.eps = {0.0, 0.1, 1};
    map.cells = {{0.4, 0.0, MonodromyClass::Elliptic, 0.5, ""},
                 {0.5, 0.0, MonodromyClass::Hyperbolic, 2.5, ""},
                 {0.6, 0.0, std::nullopt, 0.0, "boom"}};
    svg::write_tongue_map(scratch("tongues.svg"), map);
    const std::string t = slurp(scratch("tongues.svg"));
    const svg::Style s;
    EXPECT_NE(t.find("fill=\"" + s.elliptic + "\""), std::string::npos);
    EXPECT_NE(t.find("fill=\"" + s.hyperbolic + "\""), std::string::npos);
    EXPECT_NE(t.find("fill=\"" + s.error + "\""), std::string::npos);
    EXPECT_EQ(t.find("fill=\"" + s.parabolic + "\""), std::string::npos);
    fs::remove(scratch("tongues.svg"));
}

TEST(Svg, Errors)
{
    const std::vector<svg::Polyline> empty{svg::Polyline{}};
    EXPECT_THROW(svg::write_curves(scratch("e.svg"), empty, "x"), ContractViolation);
    EXPECT_THROW(svg::write_tongue_map(scratch("e.svg"), TongueMap{}), ContractViolation);
    const fs::path bad = "/nonexistent-dir/out.svg";
    try {
        svg::write_curves(bad, spiral(), "x");
        FAIL() << "expected an I/O error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
    }
}
