#pragma once

// Grid utilities shared by the integrators and the curve geometry.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace rollcones::numerics {

/// Number of uniform steps covering [0, T] with step at most h.
int step_count(double T, double h);

/// First derivative of uniformly sampled data. Five-point centred stencil in
/// the interior, five-point one-sided stencils at the two ends on each side.
/// Falls back to second-order stencils for fewer than five samples.
std::vector<Eigen::Vector3d> differentiate(std::span<const Eigen::Vector3d> f, double h);
std::vector<double> differentiate(std::span<const double> f, double h);

/// Running composite trapezoid integral; result[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> f, std::span<const double> t);

/// Least-squares slope of log|y| against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Cubic Hermite interpolation on [0, h] at offset tau.
template <typename V>
V hermite(const V& p0, const V& m0, const V& p1, const V& m1, double h, double tau)
{
    const double s = tau / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * p1 +
           (s3 - s2) * h * m1;
}

/// Derivative of the Hermite cubic above with respect to tau.
template <typename V>
V hermite_derivative(const V& p0, const V& m0, const V& p1, const V& m1, double h, double tau)
{
    const double s = tau / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * p0 + (-6 * s2 + 6 * s) * p1) / h + (3 * s2 - 4 * s + 1) * m0 +
           (3 * s2 - 2 * s) * m1;
}

/// Run body(i) for i in [0, count) on up to `threads` workers (0: hardware
/// concurrency). Indices are handed out in order; body must not throw.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& body)
{
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        worker();
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
}

}  // namespace rollcones::numerics
