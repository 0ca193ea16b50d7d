#include "lvwigner/thermo.hpp"

#include "lvwigner/error.hpp"
#include "lvwigner/specfun.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace lvw {

void ThermoParams::validate() const
{
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw DomainError("beta>0", "thermo: beta must be positive");
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("a>0", "thermo: a must be positive");
}

void ThermoParams::require_corrected() const
{
    validate();
    if (!(u() < 1.0))
        throw DomainError("a*beta^2<24", "corrected ensemble needs a*beta^2 < 24 (perturbative regime exceeded)");
}

double log_partition_classical(const ThermoParams& P)
{
    P.validate();
    const double b = P.beta, a = P.a;
    return -b * (a * std::log(a) + (a + 1.0) * std::log(b)) + specfun::log_gamma(b) + specfun::log_gamma(a * b);
}

double partition_classical(const ThermoParams& P)
{
    const double l = log_partition_classical(P);
    if (l > 700.0)
        throw OverflowError("partition_classical: ln Z0 exceeds 700");
    return std::exp(l);
}

double partition_corrected(const ThermoParams& P)
{
    P.require_corrected();
    return partition_classical(P) * (1.0 - P.u());
}

namespace {

double boltzmann_exponent(const ThermoParams& P, PhasePoint p)
{
    return -P.beta * (p.k + std::exp(-p.k) + P.a * (p.x + std::exp(-p.x)));
}

double sinh2_half(double t)
{
    const double s = std::sinh(0.5 * t);
    return s * s;
}

} // namespace

double classical_weight(const ThermoParams& P, PhasePoint p)
{
    return std::exp(boltzmann_exponent(P, p) - log_partition_classical(P));
}

double chi_lv(const ThermoParams& P, PhasePoint p)
{
    P.validate();
    const double a = P.a, b = P.beta;
    return a * b * b / 8.0 * (4.0 * b / 3.0 * (a * sinh2_half(p.x) + sinh2_half(p.k)) - 1.0) * std::exp(-(p.k + p.x));
}

double chi_general(const SeparableHamiltonian& H, const ThermoParams& P, PhasePoint p)
{
    P.validate();
    const double b = P.beta;
    const double v1 = H.dV(1, p.x), v2 = H.dV(2, p.x);
    const double k1 = H.dK(1, p.k), k2 = H.dK(2, p.k);
    return -b * b / 8.0 * v2 * k2 + b * b * b / 24.0 * (v2 * k1 * k1 + k2 * v1 * v1);
}

double corrected_weight_unnormalized(const ThermoParams& P, PhasePoint p)
{
    return classical_weight(P, p) * (1.0 + chi_lv(P, p));
}

double corrected_weight(const ThermoParams& P, PhasePoint p)
{
    P.require_corrected();
    return corrected_weight_unnormalized(P, p) / (1.0 - P.u());
}

Vec2 td_currents(const ThermoParams& P, PhasePoint p)
{
    P.validate();
    const double a = P.a, b = P.beta;
    const double w0 = classical_weight(P, p);
    const double one_chi = 1.0 + chi_lv(P, p);
    const double e = std::exp(-(p.k + p.x));
    const double jx = ((1.0 - std::exp(-p.k)) * one_chi + a * b / 24.0 * (4.0 * a * b * sinh2_half(p.x) - 1.0) * e) * w0;
    const double jk = -(a * (1.0 - std::exp(-p.x)) * one_chi + a * b / 24.0 * (4.0 * b * sinh2_half(p.k) - 1.0) * e) * w0;
    return {jx, jk};
}

Vec2 td_currents_general(const SeparableHamiltonian& H, const ThermoParams& P, PhasePoint p)
{
    P.validate();
    const double b = P.beta;
    const double w0 = std::exp(-b * H.evaluate(p) - log_partition_classical(P));
    const double one_chi = 1.0 + chi_general(H, P, p);
    const double v1 = H.dV(1, p.x), v2 = H.dV(2, p.x), v3 = H.dV(3, p.x);
    const double k1 = H.dK(1, p.k), k2 = H.dK(2, p.k), k3 = H.dK(3, p.k);
    const double jx = (k1 * one_chi - k3 / 24.0 * (b * b * v1 * v1 - b * v2)) * w0;
    const double jk = -(v1 * one_chi - v3 / 24.0 * (b * b * k1 * k1 - b * k2)) * w0;
    return {jx, jk};
}

double td_liouvillian(const ThermoParams& P, PhasePoint p)
{
    P.validate();
    const double a = P.a, b = P.beta;
    return a * b * b / 12.0 * (a * std::exp(-p.x) - std::exp(-p.k)) * std::exp(-(p.k + p.x));
}

double td_liouvillian_general(const SeparableHamiltonian& H, const ThermoParams& P, PhasePoint p)
{
    P.validate();
    const double b = P.beta;
    return b * b / 12.0
           * (H.dK(3, p.k) * H.dV(2, p.x) * H.dV(1, p.x) - H.dV(3, p.x) * H.dK(2, p.k) * H.dK(1, p.k));
}

double internal_energy(const ThermoParams& P, Which which)
{
    P.validate();
    const double a = P.a, b = P.beta;
    const double e0 = a * std::log(a) + (a + 1.0) * (1.0 + std::log(b)) - specfun::digamma(b) - a * specfun::digamma(a * b);
    if (which == Which::classical)
        return e0;
    P.require_corrected();
    return e0 + (a * b / 12.0) / (1.0 - P.u());
}

double heat_capacity(const ThermoParams& P, Which which)
{
    P.validate();
    const double a = P.a, b = P.beta;
    const double c0 = b * b * (specfun::trigamma(b) + a * a * specfun::trigamma(a * b)) - (a + 1.0) * b;
    if (which == Which::classical)
        return c0;
    P.require_corrected();
    const double d = 1.0 - P.u();
    const double g = a * b / 12.0;
    return c0 + b * b * (-(a / 12.0) / d - g * g / (d * d));
}

namespace {

// d^n/dt^n exp(-c (t + e^{-t})) = exp(...) Q_n(e^{-t}),
// Q_{n+1}(u) = c (u - 1) Q_n(u) - u Q_n'(u).
std::vector<double> boltzmann_factor_partials(double c, int n, double t)
{
    const double u = std::exp(-t);
    std::vector<double> coef{1.0};
    std::vector<double> out(n + 1);
    auto eval = [&](const std::vector<double>& q) {
        double s = 0.0;
        for (std::size_t m = q.size(); m-- > 0;)
            s = s * u + q[m];
        return s;
    };
    out[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        std::vector<double> next(coef.size() + 1, 0.0);
        for (std::size_t d = 0; d < coef.size(); ++d) {
            next[d + 1] += c * coef[d];
            next[d] -= c * coef[d];
            next[d] -= static_cast<double>(d) * coef[d];
        }
        coef = std::move(next);
        out[m] = eval(coef);
    }
    return out;
}

// 1 + chi as sum_{i,j=0..2} C_ij e^{-i x} e^{-j k}.
std::array<std::array<double, 3>, 3> one_plus_chi_coefficients(const ThermoParams& P)
{
    const double a = P.a, b = P.beta;
    const double A = a * b * b / 8.0;
    const double B = A * 4.0 * b / 3.0;
    std::array<std::array<double, 3>, 3> C{};
    C[0][0] = 1.0;
    // e^{-(k+x)} a sinh^2(x/2) = a e^{-k} (1 - 2 e^{-x} + e^{-2x}) / 4
    C[0][1] += B * a * 0.25;
    C[1][1] += -B * a * 0.5;
    C[2][1] += B * a * 0.25;
    // e^{-(k+x)} sinh^2(k/2) = e^{-x} (1 - 2 e^{-k} + e^{-2k}) / 4
    C[1][0] += B * 0.25;
    C[1][1] += -B * 0.5;
    C[1][2] += B * 0.25;
    C[1][1] += -A;
    return C;
}

double binomial(int n, int m)
{
    double r = 1.0;
    for (int i = 1; i <= m; ++i)
        r = r * (n - m + i) / i;
    return r;
}

} // namespace

WignerEnsemble td_ensemble(const ThermoParams& P, Which which)
{
    P.validate();
    if (which == Which::corrected)
        P.require_corrected();
    const double norm = which == Which::corrected ? 1.0 / (1.0 - P.u()) : 1.0;
    const auto C = one_plus_chi_coefficients(P);
    const bool corrected = which == Which::corrected;

    WignerEnsemble e;
    e.name = corrected ? "td-corrected" : "td-classical";
    e.value = [P, corrected](PhasePoint p) {
        return corrected ? corrected_weight(P, p) : classical_weight(P, p);
    };
    auto make = [P, C, norm, corrected](bool along_x) {
        return [P, C, norm, corrected, along_x](int n, PhasePoint p) {
            const double w0 = classical_weight(P, p);
            const double c = along_x ? P.a * P.beta : P.beta;
            const double t = along_x ? p.x : p.k;
            const auto q = boltzmann_factor_partials(c, n, t);
            std::vector<double> out(n + 1);
            if (!corrected) {
                for (int m = 0; m <= n; ++m)
                    out[m] = w0 * q[m];
                return out;
            }
            // d^r (1 + chi) along the axis.
            std::vector<double> g(n + 1, 0.0);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double base = C[i][j] * std::exp(-i * p.x - j * p.k);
                    const int rate = along_x ? i : j;
                    double f = base;
                    for (int r = 0; r <= n; ++r) {
                        g[r] += f;
                        f *= -rate;
                    }
                }
            for (int m = 0; m <= n; ++m) {
                double s = 0.0;
                for (int r = 0; r <= m; ++r)
                    s += binomial(m, r) * q[r] * g[m - r];
                out[m] = norm * w0 * s;
            }
            return out;
        };
    };
    e.partials_x = make(true);
    e.partials_k = make(false);
    return e;
}

FlowSampler td_sampler(const ThermoParams& P)
{
    P.validate();
    return [P](PhasePoint p) {
        const Vec2 j = td_currents(P, p);
        return FlowSample{corrected_weight_unnormalized(P, p), j.x, j.k};
    };
}

Box quadrature_box(const ThermoParams& P)
{
    P.validate();
    auto lo = [](double c) { return std::min(-8.0, -std::log(40.0 / c) - 1.0); };
    auto hi = [](double c) { return std::max(20.0, 40.0 / c); };
    const double cx = P.a * P.beta, ck = P.beta;
    return {lo(cx), hi(cx), lo(ck), hi(ck)};
}

PhaseGrid recommended_grid(const ThermoParams& P, int n)
{
    const Box b = quadrature_box(P);
    return {b.x_min, b.x_max, b.k_min, b.k_max, n, n};
}

double integrate_box(const std::function<double(double, double)>& f, const Box& box, double rel_tol)
{
    using boost::math::quadrature::gauss_kronrod;
    auto inner = [&](double x) {
        return gauss_kronrod<double, 31>::integrate([&](double k) { return f(x, k); }, box.k_min, box.k_max, 15, rel_tol);
    };
    return gauss_kronrod<double, 31>::integrate(inner, box.x_min, box.x_max, 15, rel_tol);
}

} // namespace lvw
