#include "lvwigner/classical.hpp"

#include "lvwigner/error.hpp"
#include "lvwigner/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace lvw {

Vec2 classical_velocity(const SeparableHamiltonian& H, PhasePoint p)
{
    return {H.odd_dK(0, p.k), -H.odd_dV(0, p.x)};
}

Species species_map(PhasePoint p) { return {std::exp(-p.x), std::exp(-p.k)}; }

PhasePoint log_coordinates(Species s)
{
    if (!(s.y > 0.0) || !(s.z > 0.0))
        throw DomainError("y>0,z>0", "populations must be positive");
    return {-std::log(s.y), -std::log(s.z)};
}

OrbitBranchPair parametric_orbit(double energy, const std::vector<double>& T_samples)
{
    OrbitBranchPair out;
    out.energy = energy;
    for (double T : T_samples) {
        // y z = exp(T - energy) and y + z = T.
        const double prod = std::exp(T - energy);
        const double disc = T * T - 4.0 * prod;
        if (!(T > 0.0) || disc < 0.0) {
            out.rejected.push_back(T);
            continue;
        }
        const double r = std::sqrt(disc);
        const double big = 0.5 * (T + r);
        const double small = prod / big; // avoids cancellation in (T - r)/2
        OrbitSample s;
        s.T = T;
        s.plus = {std::log(2.0) - std::log(T + r), std::log(2.0) - std::log(2.0 * small)};
        s.minus = {s.plus.k, s.plus.x};
        out.samples.push_back(s);
    }
    return out;
}

std::pair<double, double> orbit_T_interval(double energy)
{
    if (!(energy >= 2.0))
        throw DomainError("energy>=2", "orbit_T_interval: energy below the minimum H(0,0) = 2");
    // phi(T) = T^2 - 4 exp(T - energy) is maximal at T = 2 among the roots' bracket.
    auto phi = [energy](double T) { return T * T - 4.0 * std::exp(T - energy); };
    auto bisect = [&](double lo, double hi) {
        // phi(lo) and phi(hi) have opposite signs.
        const bool lo_neg = phi(lo) < 0.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((phi(mid) < 0.0) == lo_neg)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    if (phi(2.0) <= 0.0)
        return {2.0, 2.0};
    double hi = 4.0;
    while (phi(hi) >= 0.0)
        hi *= 2.0;
    return {bisect(0.0, 2.0), bisect(2.0, hi)};
}

namespace {

struct EdgeHit {
    PhasePoint p;
    int links[2] = {-1, -1};
    int degree = 0;
};

} // namespace

std::vector<Polyline> level_set(const SeparableHamiltonian& H, double energy, const PhaseGrid& grid)
{
    grid.validate();
    const int nx = grid.nx, nk = grid.nk;
    std::vector<double> f(grid.size());
    double fmin = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nk; ++j) {
            const auto n = grid.index(i, j);
            f[n] = H.evaluate(grid.point(i, j)) - energy;
            if (f[n] < fmin) {
                fmin = f[n];
                argmin = n;
            }
        }

    // Edge ids: horizontal (i,j)-(i+1,j) -> i*nk+j, vertical (i,j)-(i,j+1) -> nx*nk + i*nk+j.
    std::unordered_map<long, int> hit_of_edge;
    std::vector<EdgeHit> hits;
    auto edge_hit = [&](int i0, int j0, int i1, int j1) -> int {
        const long id = (i1 != i0) ? static_cast<long>(i0) * nk + j0 : static_cast<long>(nx) * nk + static_cast<long>(i0) * nk + j0;
        auto it = hit_of_edge.find(id);
        if (it != hit_of_edge.end())
            return it->second;
        const double f0 = f[grid.index(i0, j0)];
        const double f1 = f[grid.index(i1, j1)];
        const double t = f0 / (f0 - f1);
        const PhasePoint a = grid.point(i0, j0), b = grid.point(i1, j1);
        hits.push_back({{a.x + t * (b.x - a.x), a.k + t * (b.k - a.k)}});
        const int h = static_cast<int>(hits.size()) - 1;
        hit_of_edge.emplace(id, h);
        return h;
    };
    auto link = [&](int a, int b) {
        hits[a].links[hits[a].degree++] = b;
        hits[b].links[hits[b].degree++] = a;
    };

    for (int i = 0; i + 1 < nx; ++i)
        for (int j = 0; j + 1 < nk; ++j) {
            const double c0 = f[grid.index(i, j)], c1 = f[grid.index(i + 1, j)];
            const double c2 = f[grid.index(i + 1, j + 1)], c3 = f[grid.index(i, j + 1)];
            const bool b0 = c0 < 0, b1 = c1 < 0, b2 = c2 < 0, b3 = c3 < 0;
            int e[4];
            int ne = 0;
            int eb = -1, er = -1, et = -1, el = -1;
            if (b0 != b1) eb = e[ne++] = edge_hit(i, j, i + 1, j);
            if (b1 != b2) er = e[ne++] = edge_hit(i + 1, j, i + 1, j + 1);
            if (b3 != b2) et = e[ne++] = edge_hit(i, j + 1, i + 1, j + 1);
            if (b0 != b3) el = e[ne++] = edge_hit(i, j, i, j + 1);
            if (ne == 2) {
                link(e[0], e[1]);
            } else if (ne == 4) {
                const bool center = 0.25 * (c0 + c1 + c2 + c3) < 0;
                if (center == b0) {
                    link(eb, er);
                    link(et, el);
                } else {
                    link(el, eb);
                    link(er, et);
                }
            }
        }

    std::vector<Polyline> out;
    if (hits.empty()) {
        // Level touching the discrete minimum: report the node as a degenerate contour.
        const int i = static_cast<int>(argmin / nk), j = static_cast<int>(argmin % nk);
        const PhasePoint p = grid.point(i, j);
        const double curv = std::abs(H.dV(2, p.x)) * grid.dx() * grid.dx() + std::abs(H.dK(2, p.k)) * grid.dk() * grid.dk();
        if (fmin >= 0.0 && fmin <= curv) {
            Polyline pl;
            pl.points.push_back(p);
            pl.degenerate = true;
            out.push_back(pl);
        }
        return out;
    }

    std::vector<char> used(hits.size(), 0);
    auto walk = [&](int start) {
        Polyline pl;
        int prev = -1, cur = start;
        while (cur >= 0 && !used[cur]) {
            used[cur] = 1;
            pl.points.push_back(hits[cur].p);
            int next = -1;
            for (int d = 0; d < hits[cur].degree; ++d) {
                const int cand = hits[cur].links[d];
                if (cand != prev && !used[cand]) {
                    next = cand;
                    break;
                }
            }
            prev = cur;
            cur = next;
        }
        // Closed when the walk ends next to its starting point.
        const auto& last = hits[prev];
        for (int d = 0; d < last.degree; ++d)
            if (last.links[d] == start && pl.points.size() > 2)
                pl.closed = true;
        return pl;
    };
    for (std::size_t h = 0; h < hits.size(); ++h)
        if (!used[h] && hits[h].degree == 1)
            out.push_back(walk(static_cast<int>(h)));
    for (std::size_t h = 0; h < hits.size(); ++h)
        if (!used[h])
            out.push_back(walk(static_cast<int>(h)));
    return out;
}

VectorField classical_currents(const SeparableHamiltonian& H, const ScalarField& W)
{
    W.grid.validate();
    VectorField J;
    J.grid = W.grid;
    J.provenance = "classical";
    J.x.resize(W.grid.size());
    J.k.resize(W.grid.size());
    for (int i = 0; i < W.grid.nx; ++i)
        for (int j = 0; j < W.grid.nk; ++j) {
            const auto n = W.grid.index(i, j);
            const Vec2 v = classical_velocity(H, W.grid.point(i, j));
            J.x[n] = v.x * W.values[n];
            J.k[n] = v.k * W.values[n];
        }
    return J;
}

FlowField classical_flow(const SeparableHamiltonian& H, const std::function<double(PhasePoint)>& W, const PhaseGrid& grid)
{
    return sample_flow(grid, [&](PhasePoint p) {
        const double w = W(p);
        const Vec2 v = classical_velocity(H, p);
        return FlowSample{w, v.x * w, v.k * w};
    }, "classical");
}

Trajectory integrate_classical(const SeparableHamiltonian& H, PhasePoint p0, double tau_end, double dtau)
{
    if (!(dtau > 0.0) || !(tau_end > 0.0))
        throw DomainError("dtau>0,tau_end>0", "integrate_classical: step and horizon must be positive");
    const ode::Rhs rhs = [&H](Vec2 s) { return classical_velocity(H, {s.x, s.k}); };
    const auto steps = static_cast<long>(std::ceil(tau_end / dtau - 1e-9));
    Trajectory tr;
    tr.times.reserve(steps + 1);
    auto record = [&](double t, Vec2 s) {
        const PhasePoint p{s.x, s.k};
        tr.times.push_back(t);
        tr.points.push_back(p);
        tr.species.push_back(species_map(p));
        tr.energies.push_back(H.evaluate(p));
    };
    Vec2 s{p0.x, p0.k};
    record(0.0, s);
    for (long n = 1; n <= steps; ++n) {
        const double t = std::min(tau_end, n * dtau);
        s = ode::monitored_step(rhs, s, t - tr.times.back(), 1e-6);
        record(t, s);
    }
    return tr;
}

} // namespace lvw
