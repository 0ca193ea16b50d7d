#include "lvwigner/ode.hpp"

#include "lvwigner/error.hpp"

#include <algorithm>
#include <cmath>

namespace lvw::ode {

Vec2 monitored_step(const Rhs& f, Vec2 s, double h, double tol, int max_depth)
{
    const Vec2 full = rk4_step(f, s, h);
    const Vec2 half = rk4_step(f, rk4_step(f, s, 0.5 * h), 0.5 * h);
    const double err = std::max(std::abs(full.x - half.x), std::abs(full.k - half.k));
    if (std::isfinite(err) && err <= tol)
        return half;
    if (max_depth <= 0)
        throw ConvergenceError("rk4: local error estimate stays above tolerance after step splitting");
    const Vec2 mid = monitored_step(f, s, 0.5 * h, tol, max_depth - 1);
    return monitored_step(f, mid, 0.5 * h, tol, max_depth - 1);
}

} // namespace lvw::ode
