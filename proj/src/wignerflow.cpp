#include "lvwigner/wignerflow.hpp"

#include "lvwigner/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lvw {

namespace {

void check_eta(int eta_max)
{
    if (eta_max < 0 || eta_max > kMaxSeriesOrder)
        throw DomainError("0<=eta_max<=60", "series truncation order out of range");
}

// Highest eta that can contribute: beyond the Hamiltonian's truncation order
// every odd derivative is identically zero.
int effective_eta(const SeparableHamiltonian& H, int eta_max)
{
    if (H.truncation_order)
        return std::min(eta_max, *H.truncation_order);
    return eta_max;
}

double checked_term(double t)
{
    if (!std::isfinite(t) || std::abs(t) > kTermOverflow)
        throw OverflowError("series term magnitude exceeds 1e12; truncation is diverging");
    return t;
}

} // namespace

double series_coefficient(int eta)
{
    double c = 1.0;
    for (int m = 1; m <= eta; ++m)
        c *= -0.25 / ((2.0 * m) * (2.0 * m + 1.0));
    return c;
}

Vec2 series_current_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p, int eta_max)
{
    check_eta(eta_max);
    const int top = effective_eta(H, eta_max);
    const auto wx = E.partials_x(2 * top, p);
    const auto wk = E.partials_k(2 * top, p);
    double jx = 0.0, jk = 0.0;
    for (int eta = 0; eta <= top; ++eta) {
        const double c = series_coefficient(eta);
        jx += checked_term(c * H.odd_dK(eta, p.k) * wx[2 * eta]);
        jk -= checked_term(c * H.odd_dV(eta, p.x) * wk[2 * eta]);
    }
    return {jx, jk};
}

double stationarity_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p, int eta_max)
{
    check_eta(eta_max);
    const int top = effective_eta(H, eta_max);
    const auto wx = E.partials_x(2 * top + 1, p);
    const auto wk = E.partials_k(2 * top + 1, p);
    double s = 0.0;
    for (int eta = 0; eta <= top; ++eta) {
        const double c = series_coefficient(eta);
        s += checked_term(c * H.odd_dV(eta, p.x) * wk[2 * eta + 1]);
        s -= checked_term(c * H.odd_dK(eta, p.k) * wx[2 * eta + 1]);
    }
    return s;
}

double series_divergence_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p, int eta_max)
{
    check_eta(eta_max);
    const int top = effective_eta(H, eta_max);
    const auto wx = E.partials_x(2 * top + 1, p);
    const auto wk = E.partials_k(2 * top + 1, p);
    double dx = 0.0, dk = 0.0;
    for (int eta = 0; eta <= top; ++eta) {
        const double c = series_coefficient(eta);
        dx += checked_term(c * H.odd_dK(eta, p.k) * wx[2 * eta + 1]);
        dk -= checked_term(c * H.odd_dV(eta, p.x) * wk[2 * eta + 1]);
    }
    return dx + dk;
}

std::optional<double> liouvillian_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p,
                                     int eta_max, double w_floor)
{
    check_eta(eta_max);
    const int top = effective_eta(H, eta_max);
    const auto wx = E.partials_x(2 * top + 1, p);
    const auto wk = E.partials_k(2 * top + 1, p);
    const double W = wx[0];
    if (!(std::abs(W) >= w_floor) || W == 0.0)
        return std::nullopt;
    // d/dx [ (1/W) d^n W ] = (W d^(n+1) W - d^n W dW) / W^2; the eta = 0 term vanishes.
    double s = 0.0;
    for (int eta = 1; eta <= top; ++eta) {
        const double c = series_coefficient(eta);
        const double gx = (wx[2 * eta + 1] * W - wx[2 * eta] * wx[1]) / (W * W);
        const double gk = (wk[2 * eta + 1] * W - wk[2 * eta] * wk[1]) / (W * W);
        s += checked_term(c * H.odd_dK(eta, p.k) * gx);
        s -= checked_term(c * H.odd_dV(eta, p.x) * gk);
    }
    return s;
}

FlowField series_currents(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max)
{
    check_eta(eta_max);
    return sample_flow(grid, series_sampler(H, E, eta_max), "series(" + std::to_string(eta_max) + ")");
}

FlowSampler series_sampler(const SeparableHamiltonian& H, const WignerEnsemble& E, int eta_max)
{
    return [H, E, eta_max](PhasePoint p) {
        const Vec2 j = series_current_at(H, E, p, eta_max);
        return FlowSample{E.value(p), j.x, j.k};
    };
}

ScalarField stationarity_series(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max)
{
    check_eta(eta_max);
    return sample_scalar(grid, [&](PhasePoint p) { return stationarity_at(H, E, p, eta_max); },
                         "series(" + std::to_string(eta_max) + ")");
}

ScalarField series_divergence(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max)
{
    check_eta(eta_max);
    return sample_scalar(grid, [&](PhasePoint p) { return series_divergence_at(H, E, p, eta_max); },
                         "series(" + std::to_string(eta_max) + ")");
}

ScalarField liouvillian_series(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max,
                               double w_floor)
{
    check_eta(eta_max);
    grid.validate();
    if (w_floor <= 0.0) {
        double wmax = 0.0;
        for (int i = 0; i < grid.nx; ++i)
            for (int j = 0; j < grid.nk; ++j)
                wmax = std::max(wmax, std::abs(E.value(grid.point(i, j))));
        w_floor = kDefaultFloorRatio * wmax;
    }
    ScalarField out;
    out.grid = grid;
    out.provenance = "series(" + std::to_string(eta_max) + ")";
    out.values.assign(grid.size(), 0.0);
    out.mask.assign(grid.size(), 0);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nk; ++j) {
            const auto n = grid.index(i, j);
            const auto v = liouvillian_at(H, E, grid.point(i, j), eta_max, w_floor);
            if (v)
                out.values[n] = *v;
            else
                out.mask[n] = 1;
        }
    return out;
}

ScalarField fd_divergence(const FlowField& F)
{
    F.grid.validate();
    const auto& g = F.grid;
    if (g.nx < 5 || g.nk < 5)
        throw DomainError("grid-nodes>=5", "fourth-order differences need at least 5 nodes per axis");
    ScalarField d;
    d.grid = g;
    d.provenance = "fd4";
    d.values.assign(g.size(), 0.0);
    d.mask.assign(g.size(), 1);
    const double cx = 1.0 / (12.0 * g.dx());
    const double ck = 1.0 / (12.0 * g.dk());
    for (int i = 2; i + 2 < g.nx; ++i)
        for (int j = 2; j + 2 < g.nk; ++j) {
            const auto n = g.index(i, j);
            const double djx = cx * (F.Jx[g.index(i - 2, j)] - 8.0 * F.Jx[g.index(i - 1, j)] + 8.0 * F.Jx[g.index(i + 1, j)]
                                     - F.Jx[g.index(i + 2, j)]);
            const double djk = ck * (F.Jk[g.index(i, j - 2)] - 8.0 * F.Jk[g.index(i, j - 1)] + 8.0 * F.Jk[g.index(i, j + 1)]
                                     - F.Jk[g.index(i, j + 2)]);
            d.values[n] = djx + djk;
            d.mask[n] = 0;
        }
    return d;
}

ScalarField continuity_residual(const FlowField& F, const ScalarField& dW_dtau)
{
    if (!(F.grid == dW_dtau.grid) || dW_dtau.values.size() != F.grid.size())
        throw DomainError("same-grid", "continuity_residual: fields live on different grids");
    ScalarField r = fd_divergence(F);
    r.provenance = "continuity-residual";
    for (std::size_t n = 0; n < r.values.size(); ++n) {
        if (dW_dtau.masked(n))
            r.mask[n] = 1;
        if (!r.masked(n))
            r.values[n] += dW_dtau.values[n];
    }
    return r;
}

double default_w_floor(const FlowField& F)
{
    double m = 0.0;
    for (double w : F.W)
        m = std::max(m, std::abs(w));
    return kDefaultFloorRatio * m;
}

VectorField quantum_velocity(const FlowField& F, double w_floor)
{
    if (!(w_floor > 0.0))
        throw DomainError("w_floor>0", "quantum_velocity: floor must be positive");
    VectorField w;
    w.grid = F.grid;
    w.provenance = F.provenance;
    w.x.assign(F.grid.size(), 0.0);
    w.k.assign(F.grid.size(), 0.0);
    w.mask.assign(F.grid.size(), 0);
    for (std::size_t n = 0; n < F.W.size(); ++n) {
        if (std::abs(F.W[n]) < w_floor) {
            w.mask[n] = 1;
            continue;
        }
        w.x[n] = F.Jx[n] / F.W[n];
        w.k[n] = F.Jk[n] / F.W[n];
    }
    return w;
}

double trapezoid_2d(const PhaseGrid& grid, const std::function<double(PhasePoint)>& f)
{
    grid.validate();
    double s = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
        const double wi = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
        double row = 0.0;
        for (int j = 0; j < grid.nk; ++j) {
            const double wj = (j == 0 || j == grid.nk - 1) ? 0.5 : 1.0;
            row += wj * f(grid.point(i, j));
        }
        s += wi * row;
    }
    return s * grid.dx() * grid.dk();
}

namespace {

double boundary_mass(const WignerEnsemble& E, const PhaseGrid& g)
{
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        s += std::abs(E.value(g.point(i, 0))) + std::abs(E.value(g.point(i, g.nk - 1)));
    }
    for (int j = 1; j + 1 < g.nk; ++j) {
        s += std::abs(E.value(g.point(0, j))) + std::abs(E.value(g.point(g.nx - 1, j)));
    }
    return s * g.dx() * g.dk();
}

} // namespace

QuadratureResult purity(const WignerEnsemble& E, const PhaseGrid& grid)
{
    QuadratureResult r;
    r.value = 2.0 * std::numbers::pi * trapezoid_2d(grid, [&](PhasePoint p) {
        const double w = E.value(p);
        return w * w;
    });
    r.boundary_mass = boundary_mass(E, grid);
    r.boundary_warning = r.boundary_mass > kBoundaryMassLimit;
    return r;
}

QuadratureResult expectation(const WignerEnsemble& E, const std::function<double(PhasePoint)>& O, const PhaseGrid& grid)
{
    QuadratureResult r;
    r.value = trapezoid_2d(grid, [&](PhasePoint p) { return E.value(p) * O(p); });
    r.boundary_mass = boundary_mass(E, grid);
    r.boundary_warning = r.boundary_mass > kBoundaryMassLimit;
    return r;
}

FlowSampler bilinear_sampler(const FlowField& F)
{
    return [&F](PhasePoint p) {
        const auto& g = F.grid;
        const double u = std::clamp((p.x - g.x_min) / g.dx(), 0.0, g.nx - 1.0);
        const double v = std::clamp((p.k - g.k_min) / g.dk(), 0.0, g.nk - 1.0);
        const int i = std::min(static_cast<int>(u), g.nx - 2);
        const int j = std::min(static_cast<int>(v), g.nk - 2);
        const double s = u - i, t = v - j;
        auto lerp = [&](const std::vector<double>& a) {
            return (1 - s) * (1 - t) * a[g.index(i, j)] + s * (1 - t) * a[g.index(i + 1, j)]
                   + s * t * a[g.index(i + 1, j + 1)] + (1 - s) * t * a[g.index(i, j + 1)];
        };
        return FlowSample{lerp(F.W), lerp(F.Jx), lerp(F.Jk)};
    };
}

namespace {

bool straddles(double a, double b, double c, double d)
{
    const double lo = std::min({a, b, c, d});
    const double hi = std::max({a, b, c, d});
    return lo <= 0.0 && hi >= 0.0;
}

} // namespace

StagnationReport find_stagnation(const FlowField& F, double tol, const FlowSampler& refine, double w_floor)
{
    if (!(tol > 0.0))
        throw DomainError("tol>0", "find_stagnation: tolerance must be positive");
    F.validate();
    const auto& g = F.grid;
    if (w_floor <= 0.0)
        w_floor = default_w_floor(F);
    const FlowSampler f = refine ? refine : bilinear_sampler(F);
    const double h = refine ? 1e-6 : 1e-3 * std::min(g.dx(), g.dk());
    const double dedupe = 1e-6;

    StagnationReport rep;
    auto known = [&](PhasePoint p, const auto& list) {
        for (const auto& q : list) {
            const PhasePoint& r = q.p;
            if (std::hypot(p.x - r.x, p.k - r.k) < dedupe)
                return true;
        }
        return false;
    };
    struct Seen { PhasePoint p; };
    std::vector<Seen> masked_seen;

    for (int i = 0; i + 1 < g.nx; ++i)
        for (int j = 0; j + 1 < g.nk; ++j) {
            const std::size_t c[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
            bool weak = false;
            for (auto n : c)
                weak = weak || std::abs(F.W[n]) < w_floor;
            if (weak)
                continue;
            if (!straddles(F.Jx[c[0]], F.Jx[c[1]], F.Jx[c[2]], F.Jx[c[3]]))
                continue;
            if (!straddles(F.Jk[c[0]], F.Jk[c[1]], F.Jk[c[2]], F.Jk[c[3]]))
                continue;

            PhasePoint p{g.x(i) + 0.5 * g.dx(), g.k(j) + 0.5 * g.dk()};
            bool converged = false;
            FlowSample s = f(p);
            for (int it = 0; it < 60; ++it) {
                const FlowSample sxp = f({p.x + h, p.k}), sxm = f({p.x - h, p.k});
                const FlowSample skp = f({p.x, p.k + h}), skm = f({p.x, p.k - h});
                const double a = (sxp.Jx - sxm.Jx) / (2 * h), b = (skp.Jx - skm.Jx) / (2 * h);
                const double c2 = (sxp.Jk - sxm.Jk) / (2 * h), d = (skp.Jk - skm.Jk) / (2 * h);
                const double det = a * d - b * c2;
                if (det == 0.0 || !std::isfinite(det))
                    break;
                double dx = -(d * s.Jx - b * s.Jk) / det;
                double dk = -(-c2 * s.Jx + a * s.Jk) / det;
                // Keep steps on the scale of a few cells.
                const double cap = 2.0 * std::max(g.dx(), g.dk());
                const double len = std::hypot(dx, dk);
                if (len > cap) {
                    dx *= cap / len;
                    dk *= cap / len;
                }
                p = {p.x + dx, p.k + dk};
                s = f(p);
                if (std::hypot(dx, dk) <= 1e-12 * (1.0 + std::hypot(p.x, p.k))) {
                    converged = true;
                    break;
                }
            }
            const double res = std::hypot(s.Jx, s.Jk);
            const bool inside = p.x >= g.x_min && p.x <= g.x_max && p.k >= g.k_min && p.k <= g.k_max;
            if (!converged || res > tol || !inside) {
                rep.non_converged.push_back(p);
                continue;
            }
            if (std::abs(s.W) < w_floor) {
                if (!known(p, masked_seen)) {
                    masked_seen.push_back({p});
                    ++rep.masked_candidates;
                }
                continue;
            }
            if (!known(p, rep.points))
                rep.points.push_back({p, res, s.W});
        }

    // A seed may fail in one cell while a neighbour converges to the same zero.
    std::vector<PhasePoint> pending;
    for (const auto& q : rep.non_converged) {
        bool dup = false;
        for (const auto& r : rep.points)
            dup = dup || std::hypot(q.x - r.p.x, q.k - r.p.k) < 2.0 * std::max(g.dx(), g.dk());
        if (!dup)
            pending.push_back(q);
    }
    rep.non_converged = std::move(pending);
    return rep;
}

std::vector<PhasePoint> circle_loop(PhasePoint center, double radius, int n)
{
    std::vector<PhasePoint> loop;
    loop.reserve(n);
    for (int m = 0; m < n; ++m) {
        const double t = 2.0 * std::numbers::pi * m / n;
        loop.push_back({center.x + radius * std::cos(t), center.k + radius * std::sin(t)});
    }
    return loop;
}

namespace {

double angle_between(double ax, double ak, double bx, double bk)
{
    return std::atan2(ax * bk - ak * bx, ax * bx + ak * bk);
}

} // namespace

WindingResult winding_number(const FlowSampler& J, const std::vector<PhasePoint>& loop)
{
    if (loop.size() < 3)
        throw DomainError("loop>=3", "winding_number: loop needs at least three vertices");
    double total = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;

    auto sample = [&](PhasePoint p) {
        const FlowSample s = J(p);
        const double m = std::hypot(s.Jx, s.Jk);
        min_abs = std::min(min_abs, m);
        max_abs = std::max(max_abs, m);
        return s;
    };
    // Recursive bisection of a segment until consecutive directions differ by < pi/8.
    std::function<double(PhasePoint, FlowSample, PhasePoint, FlowSample, int)> segment =
        [&](PhasePoint a, FlowSample sa, PhasePoint b, FlowSample sb, int depth) -> double {
        const double d = angle_between(sa.Jx, sa.Jk, sb.Jx, sb.Jk);
        if (std::abs(d) < std::numbers::pi / 8.0)
            return d;
        if (depth == 0) {
            if (std::abs(d) > std::numbers::pi / 2.0)
                throw IllConditioned("winding_number: current direction unresolved along the loop");
            return d;
        }
        const PhasePoint m{0.5 * (a.x + b.x), 0.5 * (a.k + b.k)};
        const FlowSample sm = sample(m);
        return segment(a, sa, m, sm, depth - 1) + segment(m, sm, b, sb, depth - 1);
    };

    std::vector<FlowSample> s(loop.size());
    for (std::size_t n = 0; n < loop.size(); ++n)
        s[n] = sample(loop[n]);
    for (std::size_t n = 0; n < loop.size(); ++n) {
        const std::size_t m = (n + 1) % loop.size();
        total += segment(loop[n], s[n], loop[m], s[m], 16);
    }
    if (!(min_abs > 1e-10 * max_abs) || max_abs == 0.0)
        throw IllConditioned("winding_number: loop passes too close to a zero of J");

    WindingResult r;
    const double turns = total / (2.0 * std::numbers::pi);
    r.winding = static_cast<int>(std::lround(turns));
    r.residual = std::abs(turns - r.winding);
    r.min_abs_J = min_abs;
    if (r.residual > 0.05)
        throw IllConditioned("winding_number: rounding residual above 0.05");
    return r;
}

WindingResult winding_number(const FlowField& F, const std::vector<PhasePoint>& loop)
{
    return winding_number(bilinear_sampler(F), loop);
}

std::string to_string(CriticalType t)
{
    switch (t) {
    case CriticalType::vortex: return "vortex";
    case CriticalType::saddle: return "saddle";
    case CriticalType::node: return "node";
    case CriticalType::focus: return "focus";
    case CriticalType::degenerate: return "degenerate";
    }
    return "degenerate";
}

CriticalPointInfo classify_critical_point(const FlowSampler& J, PhasePoint p, double h)
{
    const FlowSample sxp = J({p.x + h, p.k}), sxm = J({p.x - h, p.k});
    const FlowSample skp = J({p.x, p.k + h}), skm = J({p.x, p.k - h});
    const double a = (sxp.Jx - sxm.Jx) / (2 * h), b = (skp.Jx - skm.Jx) / (2 * h);
    const double c = (sxp.Jk - sxm.Jk) / (2 * h), d = (skp.Jk - skm.Jk) / (2 * h);
    CriticalPointInfo info;
    info.trace = a + d;
    info.det = a * d - b * c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (scale == 0.0 || std::abs(info.det) <= 1e-12 * scale * scale) {
        info.type = CriticalType::degenerate;
        return info;
    }
    if (info.det < 0.0) {
        info.type = CriticalType::saddle;
        return info;
    }
    const double disc = info.trace * info.trace - 4.0 * info.det;
    if (disc >= 0.0) {
        info.type = CriticalType::node;
        return info;
    }
    info.type = std::abs(info.trace) <= 1e-3 * std::sqrt(info.det) ? CriticalType::vortex : CriticalType::focus;
    info.sense = (c - b) > 0.0 ? +1 : -1;
    return info;
}

} // namespace lvw
