#include "lvwigner/dynamics.hpp"

#include "lvwigner/error.hpp"
#include "lvwigner/gaussian.hpp"
#include "lvwigner/ode.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lvw {

std::string to_string(VelocityOrder o)
{
    switch (o) {
    case VelocityOrder::classical: return "classical";
    case VelocityOrder::alpha2: return "alpha2";
    case VelocityOrder::alpha4: return "alpha4";
    case VelocityOrder::exact: return "exact";
    }
    return "classical";
}

VelocityOrder parse_order(const std::string& s)
{
    if (s == "classical") return VelocityOrder::classical;
    if (s == "alpha2") return VelocityOrder::alpha2;
    if (s == "alpha4") return VelocityOrder::alpha4;
    if (s == "exact") return VelocityOrder::exact;
    throw DomainError("order", "unknown velocity order '" + s + "'");
}

std::string to_string(Stability s)
{
    switch (s) {
    case Stability::center_candidate: return "center-candidate";
    case Stability::stable_focus: return "stable-focus";
    case Stability::unstable_focus: return "unstable-focus";
    case Stability::stable_node: return "stable-node";
    case Stability::unstable_node: return "unstable-node";
    case Stability::saddle: return "saddle";
    }
    return "center-candidate";
}

void DynamicsParams::validate() const
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("a>0", "dynamics: a must be positive");
    if (order != VelocityOrder::classical && (!(alpha > 0.0) || !std::isfinite(alpha)))
        throw DomainError("alpha>0", "dynamics: alpha must be positive for quantum orders");
}

namespace {

// Bracket multiplying zy in the truncated fields, and its y-derivative.
double brace(const DynamicsParams& D, double y)
{
    const double a2 = D.alpha * D.alpha;
    switch (D.order) {
    case VelocityOrder::classical: return 1.0;
    case VelocityOrder::alpha2: return 1.0 + a2 / 12.0;
    case VelocityOrder::alpha4: return 1.0 + a2 / 12.0 + a2 * a2 / 160.0 * (1.0 - std::log(y) / 3.0);
    case VelocityOrder::exact: break;
    }
    return 1.0;
}

double brace_dy(const DynamicsParams& D, double y)
{
    if (D.order != VelocityOrder::alpha4)
        return 0.0;
    const double a4 = std::pow(D.alpha, 4);
    return -a4 / (480.0 * y);
}

} // namespace

Vec2 effective_velocity(const DynamicsParams& D, Species s)
{
    D.validate();
    if (!(s.y > 0.0) || !(s.z > 0.0) || !std::isfinite(s.y) || !std::isfinite(s.z))
        throw DomainError("y>0,z>0", "effective_velocity: populations must be positive");
    if (D.order == VelocityOrder::exact) {
        const GaussianParams G{D.alpha, 0.0};
        const PhasePoint p{-std::log(s.y), -std::log(s.z)};
        const double g = gaussian_weight(G, p);
        if (!(g >= default_gaussian_floor(G)))
            throw MaskedError("effective_velocity: point lies in the masked tail of the gaussian");
        const Vec2 w = gaussian_velocity(G, D.a, p, default_gaussian_floor(G));
        return {-s.y * w.x, -s.z * w.k};
    }
    const double B = brace(D, s.y);
    return {s.z * s.y * B - s.y, D.a * s.z - D.a * s.z * s.y * B};
}

Matrix2 jacobian(const DynamicsParams& D, Species s)
{
    D.validate();
    if (D.order != VelocityOrder::exact) {
        const double B = brace(D, s.y);
        const double Bp = brace_dy(D, s.y);
        const double fy = s.z * (B + s.y * Bp) - 1.0;
        const double fz = s.y * B;
        const double gy = -D.a * s.z * (B + s.y * Bp);
        const double gz = D.a - D.a * s.y * B;
        return {{{fy, fz}, {gy, gz}}};
    }
    const double hy = 1e-6 * std::max(1.0, std::abs(s.y));
    const double hz = 1e-6 * std::max(1.0, std::abs(s.z));
    const Vec2 yp = effective_velocity(D, {s.y + hy, s.z}), ym = effective_velocity(D, {s.y - hy, s.z});
    const Vec2 zp = effective_velocity(D, {s.y, s.z + hz}), zm = effective_velocity(D, {s.y, s.z - hz});
    return {{{(yp.x - ym.x) / (2 * hy), (zp.x - zm.x) / (2 * hz)}, {(yp.k - ym.k) / (2 * hy), (zp.k - zm.k) / (2 * hz)}}};
}

Species find_equilibrium(const DynamicsParams& D, Species guess)
{
    D.validate();
    Species s = guess;
    auto residual = [&](Vec2 f) { return std::abs(f.x) + std::abs(f.k); };
    for (int it = 0; it < 100; ++it) {
        const Vec2 f = effective_velocity(D, s);
        if (residual(f) <= 1e-13)
            return s;
        // Forward-difference Jacobian, used for every order.
        const double hy = 1e-7 * std::max(1.0, s.y), hz = 1e-7 * std::max(1.0, s.z);
        const Vec2 fy = effective_velocity(D, {s.y + hy, s.z});
        const Vec2 fz = effective_velocity(D, {s.y, s.z + hz});
        const double a = (fy.x - f.x) / hy, b = (fz.x - f.x) / hz;
        const double c = (fy.k - f.k) / hy, d = (fz.k - f.k) / hz;
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det))
            break;
        const double dy = -(d * f.x - b * f.k) / det;
        const double dz = -(-c * f.x + a * f.k) / det;
        double lam = 1.0;
        while (s.y + lam * dy <= 0.0 || s.z + lam * dz <= 0.0)
            lam *= 0.5;
        s = {s.y + lam * dy, s.z + lam * dz};
        if (std::abs(lam * dy) + std::abs(lam * dz) <= 1e-16 * (s.y + s.z))
            break;
    }
    if (residual(effective_velocity(D, s)) <= 1e-10)
        return s;
    throw ConvergenceError("find_equilibrium: Newton did not converge in 100 iterations");
}

Stability classify_stability(const Matrix2& J)
{
    const double tr = J[0][0] + J[1][1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    const double scale = std::max({std::abs(J[0][0]), std::abs(J[0][1]), std::abs(J[1][0]), std::abs(J[1][1])});
    if (det < 0.0)
        return Stability::saddle;
    if (std::abs(tr) <= 1e-12 * scale || det == 0.0)
        return Stability::center_candidate;
    const double disc = tr * tr - 4.0 * det;
    if (tr > 0.0)
        return disc > 0.0 ? Stability::unstable_node : Stability::unstable_focus;
    return disc > 0.0 ? Stability::stable_node : Stability::stable_focus;
}

StabilityReport stability_report(const DynamicsParams& D, Species guess)
{
    StabilityReport r;
    r.equilibrium = find_equilibrium(D, guess);
    r.jacobian = jacobian(D, r.equilibrium);
    const auto& J = r.jacobian;
    r.trace = J[0][0] + J[1][1];
    r.det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    r.discriminant = r.trace * r.trace - 4.0 * r.det;
    r.classification = classify_stability(J);
    const Vec2 f = effective_velocity(D, r.equilibrium);
    r.residual = std::abs(f.x) + std::abs(f.k);
    return r;
}

EvolveResult evolve(const DynamicsParams& D, Species initial, double tau_end, double dtau)
{
    D.validate();
    if (!(dtau > 0.0) || !(tau_end > 0.0))
        throw DomainError("dtau>0,tau_end>0", "evolve: step and horizon must be positive");
    if (D.order == VelocityOrder::exact && dtau > 1e-3)
        throw DomainError("dtau<=1e-3", "evolve: the exact order needs dtau <= 1e-3");
    if (!(initial.y > 0.0) || !(initial.z > 0.0))
        throw DomainError("y>0,z>0", "evolve: initial populations must be positive");

    const bool truncated = D.order == VelocityOrder::alpha2 || D.order == VelocityOrder::alpha4;
    const double floor = truncated ? 1e-8 : 0.0;
    const ode::Rhs rhs = [&D](Vec2 s) { return effective_velocity(D, {s.x, s.k}); };

    EvolveResult res;
    auto& tr = res.trajectory;
    auto record = [&](double t, Vec2 s) {
        tr.times.push_back(t);
        tr.species.push_back({s.x, s.k});
        const PhasePoint p{-std::log(s.x), -std::log(s.k)};
        tr.points.push_back(p);
        tr.energies.push_back(p.k + std::exp(-p.k) + D.a * (p.x + std::exp(-p.x)));
    };
    auto admissible = [&](Vec2 s) { return std::isfinite(s.x) && std::isfinite(s.k) && s.x > floor && s.k > floor; };

    // One macro step, split in halves whenever positivity would be lost.
    std::function<Vec2(Vec2, double, int)> advance = [&](Vec2 s, double h, int depth) -> Vec2 {
        Vec2 next;
        bool ok = true;
        try {
            next = ode::rk4_step(rhs, s, h);
            ok = admissible(next);
        } catch (const DomainError&) {
            ok = false;
        } catch (const MaskedError&) {
            if (depth == 0)
                throw;
            ok = false;
        }
        if (ok)
            return next;
        ++res.step_rejections;
        if (depth == 0)
            throw ConvergenceError("evolve: positivity cannot be preserved by step halving");
        const Vec2 mid = advance(s, 0.5 * h, depth - 1);
        return advance(mid, 0.5 * h, depth - 1);
    };

    const auto steps = static_cast<long>(std::ceil(tau_end / dtau - 1e-9));
    Vec2 s{initial.y, initial.z};
    record(0.0, s);
    int low_run = 0;
    for (long n = 1; n <= steps; ++n) {
        const double t = std::min(tau_end, n * dtau);
        s = advance(s, t - tr.times.back(), 30);
        record(t, s);
        if (s.x < 1e-12 || s.k < 1e-12) {
            if (++low_run >= 100 && !res.extinction) {
                res.extinction = true;
                res.extinction_time = t;
            }
        } else {
            low_run = 0;
        }
    }
    return res;
}

std::vector<PeriodSummary> period_averages(const Trajectory& tr, Species eq)
{
    std::vector<PeriodSummary> out;
    const auto& sp = tr.species;
    auto radius = [&](std::size_t i) { return std::hypot(sp[i].y - eq.y, sp[i].z - eq.z); };
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
        const double z0 = sp[i].z - eq.z, z1 = sp[i + 1].z - eq.z;
        if (z0 < 0.0 && z1 >= 0.0) {
            const double t = z0 / (z0 - z1);
            const double y = sp[i].y + t * (sp[i + 1].y - sp[i].y);
            if (y > eq.y)
                crossings.push_back(tr.times[i] + t * (tr.times[i + 1] - tr.times[i]));
        }
        if (z0 > 0.0 && z1 <= 0.0) {
            const double t = z0 / (z0 - z1);
            const double y = sp[i].y + t * (sp[i + 1].y - sp[i].y);
            if (y > eq.y)
                crossings.push_back(tr.times[i] + t * (tr.times[i + 1] - tr.times[i]));
        }
    }
    for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
        const double t0 = crossings[c], t1 = crossings[c + 1];
        double acc = 0.0, span = 0.0;
        for (std::size_t i = 0; i + 1 < sp.size(); ++i) {
            const double a = std::max(t0, tr.times[i]);
            const double b = std::min(t1, tr.times[i + 1]);
            if (b <= a)
                continue;
            acc += 0.5 * (radius(i) + radius(i + 1)) * (b - a);
            span += b - a;
        }
        out.push_back({t0, t1, span > 0.0 ? acc / span : 0.0});
    }
    return out;
}

} // namespace lvw
