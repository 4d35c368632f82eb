#pragma once

namespace rollcones {

/// Every numeric threshold used by the library, in one place.
struct Tolerances {
    double null = 1e-10;      ///< |<a,a>| at or below this counts as lightlike
    double group = 1e-9;      ///< group-membership and isometry checks
    double sphere = 1e-8;     ///< |<g,g>| - 1 and tangency checks on the pseudosphere
    double roll = 1e-6;       ///< contact / no-slip residuals
    double cusp = 1e-6;       ///< |velocity| below this marks a cusp node
    double classify = 1e-6;   ///< band around |tr M| = 2 reported as parabolic
    double step_limit = 1e-3; ///< largest reprojection correction accepted per step
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace rollcones
