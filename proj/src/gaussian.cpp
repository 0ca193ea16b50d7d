#include "lvwigner/gaussian.hpp"

#include "lvwigner/error.hpp"
#include "lvwigner/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lvw {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kExpBudget = 700.0;

void require_isotropic(const GaussianParams& G, const char* what)
{
    G.validate();
    if (G.zeta != 0.0)
        throw DomainError("zeta==0", std::string(what) + ": defined for the isotropic gaussian only");
}

} // namespace

void GaussianParams::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("alpha>0", "gaussian: alpha must be positive");
    if (!std::isfinite(zeta))
        throw DomainError("zeta-finite", "gaussian: squeeze must be finite");
}

double gaussian_weight(const GaussianParams& G, PhasePoint p)
{
    const double sx = G.alpha * std::exp(G.zeta) * p.x;
    const double sk = G.alpha * std::exp(-G.zeta) * p.k;
    return G.alpha * G.alpha / std::numbers::pi * std::exp(-(sx * sx + sk * sk));
}

std::vector<double> gaussian_partials(const GaussianParams& G, Axis axis, int n, PhasePoint p)
{
    G.validate();
    if (n < 0 || n > kMaxGaussianOrder)
        throw OverflowError("gaussian_partial: order above 120");
    const double s = G.alpha * std::exp(axis == Axis::x ? G.zeta : -G.zeta);
    const double u = s * (axis == Axis::x ? p.x : p.k);
    // q_n = (-s)^n H_n(u) G, run directly on the scaled values so a vanishing G
    // never meets an overflowing Hermite value.
    std::vector<double> q(n + 1);
    q[0] = gaussian_weight(G, p);
    if (n >= 1)
        q[1] = -2.0 * u * s * q[0];
    for (int m = 1; m < n; ++m)
        q[m + 1] = -2.0 * u * s * q[m] - 2.0 * m * s * s * q[m - 1];
    return q;
}

double gaussian_partial(const GaussianParams& G, Axis axis, int n, PhasePoint p)
{
    return gaussian_partials(G, axis, n, p)[n];
}

WignerEnsemble gaussian_ensemble(const GaussianParams& G)
{
    G.validate();
    WignerEnsemble e;
    e.name = "gaussian";
    e.value = [G](PhasePoint p) { return gaussian_weight(G, p); };
    e.partials_x = [G](int n, PhasePoint p) { return gaussian_partials(G, Axis::x, n, p); };
    e.partials_k = [G](int n, PhasePoint p) { return gaussian_partials(G, Axis::k, n, p); };
    return e;
}

PhaseGrid gaussian_recommended_grid(const GaussianParams& G)
{
    G.validate();
    const double s = G.alpha * std::exp(-std::abs(G.zeta));
    const double half = 7.0 / s;
    return PhaseGrid::square(half, 225);
}

Vec2 lv_divergences(const GaussianParams& G, double a, PhasePoint p)
{
    require_isotropic(G, "lv_divergences");
    const double a2 = G.alpha * G.alpha;
    const double g = gaussian_weight(G, p);
    const double dxjx = -2.0 * (a2 * p.x - std::sin(a2 * p.x) * std::exp(a2 / 4.0 - p.k)) * g;
    const double dkjk = 2.0 * a * (a2 * p.k - std::sin(a2 * p.k) * std::exp(a2 / 4.0 - p.x)) * g;
    return {dxjx, dkjk};
}

Vec2 lv_currents(const GaussianParams& G, double a, PhasePoint p)
{
    require_isotropic(G, "lv_currents");
    if (G.alpha > 4.0)
        throw AccuracyLoss("lv_currents: alpha above 4 leaves the erf accuracy strip");
    const double al = G.alpha;
    const double g = gaussian_weight(G, p);
    // {Erf[al(u - i/2)] - Erf[al(u + i/2)]} = -2i Im Erf[al(u + i/2)].
    const double im_x = specfun::erf_complex({al * p.x, 0.5 * al}).imag();
    const double im_k = specfun::erf_complex({al * p.k, 0.5 * al}).imag();
    const double jx = g - al / kSqrtPi * std::exp(-(p.k + al * al * p.k * p.k)) * im_x;
    const double jk = -a * g + a * al / kSqrtPi * std::exp(-(p.x + al * al * p.x * p.x)) * im_k;
    return {jx, jk};
}

FlowSampler lv_gaussian_sampler(const GaussianParams& G, double a)
{
    require_isotropic(G, "lv_gaussian_sampler");
    return [G, a](PhasePoint p) {
        const Vec2 j = lv_currents(G, a, p);
        return FlowSample{gaussian_weight(G, p), j.x, j.k};
    };
}

double default_gaussian_floor(const GaussianParams& G)
{
    return kDefaultFloorRatio * G.alpha * G.alpha / std::numbers::pi;
}

Vec2 gaussian_velocity(const GaussianParams& G, double a, PhasePoint p, double w_floor)
{
    const double g = gaussian_weight(G, p);
    if (!(g >= w_floor) || g == 0.0)
        throw MaskedError("gaussian_velocity: weight below the floor");
    const Vec2 j = lv_currents(G, a, p);
    return {j.x / g, j.k / g};
}

Vec2 camouflage_divergences(const GaussianParams& G, const CamouflageParams& c, PhasePoint p)
{
    G.validate();
    // Effective inverse widths squared along each axis.
    const double ax2 = G.alpha * G.alpha * std::exp(2.0 * G.zeta);
    const double ak2 = G.alpha * G.alpha * std::exp(-2.0 * G.zeta);
    const double e1 = ax2 * c.mu1 * c.mu1 / 4.0;
    const double e2 = ak2 * c.nu1 * c.nu1 / 4.0;
    if (e1 > kExpBudget || e2 > kExpBudget)
        throw OverflowError("camouflage_divergences: growth factor exceeds the exp budget");
    const double g = gaussian_weight(G, p);
    const double dxjx = 2.0
                        * (c.lambda_k * std::sin(c.mu2 * p.k) * std::sinh(ax2 * c.mu2 * p.x) * std::exp(-ax2 * c.mu2 * c.mu2 / 4.0)
                           - std::sinh(c.mu1 * p.k) * std::sin(ax2 * c.mu1 * p.x) * std::exp(e1))
                        * g;
    const double dkjk = -2.0
                        * (c.lambda_x * std::sin(c.nu2 * p.x) * std::sinh(ak2 * c.nu2 * p.k) * std::exp(-ak2 * c.nu2 * c.nu2 / 4.0)
                           - std::sinh(c.nu1 * p.x) * std::sin(ak2 * c.nu1 * p.k) * std::exp(e2))
                        * g;
    return {dxjx, dkjk};
}

CamouflageParams tuned_camouflage(double nu1, double nu2, double zeta)
{
    const double s = std::exp(-2.0 * zeta);
    CamouflageParams c;
    c.nu1 = nu1;
    c.nu2 = nu2;
    c.mu1 = s * nu2;
    c.mu2 = s * nu1;
    if (s * nu1 * nu1 / 2.0 > kExpBudget || s * nu2 * nu2 / 2.0 > kExpBudget)
        throw OverflowError("tuned_camouflage: lambda exceeds the exp budget");
    c.lambda_k = -std::exp(s * nu1 * nu1 / 2.0);
    c.lambda_x = -std::exp(s * nu2 * nu2 / 2.0);
    return c;
}

CamouflageReport camouflage_stationarity_check(double nu1, double nu2, double zeta, const PhaseGrid& grid, double detune)
{
    grid.validate();
    CamouflageReport r;
    r.params = tuned_camouflage(nu1, nu2, zeta);
    r.params.lambda_k *= detune;
    r.detune = detune;
    r.gaussian = {1.0, zeta};
    r.div_x.grid = r.div_k.grid = r.div.grid = grid;
    r.div_x.provenance = r.div_k.provenance = r.div.provenance = "closed-form";
    r.div_x.values.resize(grid.size());
    r.div_k.values.resize(grid.size());
    r.div.values.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nk; ++j) {
            const auto n = grid.index(i, j);
            const Vec2 d = camouflage_divergences(r.gaussian, r.params, grid.point(i, j));
            r.div_x.values[n] = d.x;
            r.div_k.values[n] = d.k;
            r.div.values[n] = d.x + d.k;
            r.max_abs_div = std::max(r.max_abs_div, std::abs(d.x + d.k));
        }
    return r;
}

} // namespace lvw
