#pragma once

#include "lvwigner/phase_space.hpp"

#include <functional>

namespace lvw::ode {

// Autonomous planar right-hand side.
using Rhs = std::function<Vec2(Vec2)>;

inline Vec2 rk4_step(const Rhs& f, Vec2 s, double h)
{
    const Vec2 k1 = f(s);
    const Vec2 k2 = f({s.x + 0.5 * h * k1.x, s.k + 0.5 * h * k1.k});
    const Vec2 k3 = f({s.x + 0.5 * h * k2.x, s.k + 0.5 * h * k2.k});
    const Vec2 k4 = f({s.x + h * k3.x, s.k + h * k3.k});
    return {s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            s.k + h / 6.0 * (k1.k + 2.0 * k2.k + 2.0 * k3.k + k4.k)};
}

// One step of size h, monitored by comparing a full step against two half
// steps.  A step whose estimate exceeds `tol` is split in two and retried;
// after `max_depth` splits a ConvergenceError is thrown.  Returns the
// two-half-step value.
Vec2 monitored_step(const Rhs& f, Vec2 s, double h, double tol, int max_depth = 12);

} // namespace lvw::ode
