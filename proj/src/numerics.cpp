#include "rollcones/numerics.hpp"

#include <cmath>

#include "rollcones/errors.hpp"

namespace rollcones::numerics {

namespace {

template <typename T>
std::vector<T> differentiate_impl(std::span<const T> f, double h)
{
    const std::size_t n = f.size();
    std::vector<T> d(n);
    if (n < 2) throw ContractViolation("differentiate: need at least two samples");
    if (n < 5) {
        if (n == 2) {
            d[0] = d[1] = (f[1] - f[0]) / h;
            return d;
        }
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2 * h);
        return d;
    }
    const double c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    d[n - 2] = -c * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    d[n - 1] = -c * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
    return d;
}

}  // namespace

int step_count(double T, double h)
{
    if (!(h > 0) || !(T > 0)) throw ContractViolation("step_count: need T > 0 and h > 0");
    const double r = T / h;
    const double nearest = std::round(r);
    if (std::abs(r - nearest) < 1e-9 * std::max(1.0, r)) return std::max(1, static_cast<int>(nearest));
    return std::max(1, static_cast<int>(std::ceil(r)));
}

std::vector<Eigen::Vector3d> differentiate(std::span<const Eigen::Vector3d> f, double h)
{
    return differentiate_impl(f, h);
}

std::vector<double> differentiate(std::span<const double> f, double h)
{
    return differentiate_impl(f, h);
}

std::vector<double> cumulative_trapezoid(std::span<const double> f, std::span<const double> t)
{
    if (f.size() != t.size()) throw ContractViolation("cumulative_trapezoid: size mismatch");
    std::vector<double> out(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
    }
    return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw ContractViolation("loglog_slope: need two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace rollcones::numerics
