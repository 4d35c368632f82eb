#pragma once

// Minimal deterministic SVG output for curves, Poincare-disk pictures and
// tongue maps. The first line of every file is a version comment; the rest
// depends only on the data and the style.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rollcones/hill.hpp"

namespace rollcones::svg {

/// Bumped whenever the byte layout of the output changes.
inline constexpr int kStyleVersion = 1;

/**
 * Drawing style. A default-constructed style is the documented default:
 * 640x640 canvas, 40 px margin, white background, 1.5 px strokes, three
 * decimals, elliptic cells light blue, parabolic cells orange, hyperbolic
 * cells red, failed cells black.
 */
struct Style {
    int width = 640;
    int height = 640;
    double margin = 40.0;
    double stroke_width = 1.5;
    int precision = 3;
    std::string background = "#ffffff";
    std::string axis_color = "#444444";
    std::vector<std::string> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::string elliptic = "#9ecae1";
    std::string parabolic = "#fdae6b";
    std::string hyperbolic = "#de2d26";
    std::string error = "#000000";
};

struct Polyline {
    std::vector<Eigen::Vector2d> points;
    std::string label;
    std::string color;  ///< empty: next palette colour
};

/// Curves in the plane with equal axis scaling. Throws ContractViolation when
/// there are no points; I/O errors name the path.
void write_curves(const std::filesystem::path& path, std::span<const Polyline> curves, const std::string& title,
                  const std::string& metadata = {}, const Style& style = {});

/// Curves inside the unit disk, with the boundary circle drawn.
void write_poincare_disk(const std::filesystem::path& path, std::span<const Polyline> curves,
                         const std::string& title, const std::string& metadata = {}, const Style& style = {});

/// One rectangle per cell, omega across, eps upward, coloured by class.
void write_tongue_map(const std::filesystem::path& path, const TongueMap& map, const std::string& metadata = {},
                      const Style& style = {});

}  // namespace rollcones::svg
