#include "lvwigner/hamiltonian.hpp"

#include "lvwigner/error.hpp"

#include <cmath>

namespace lvw {

namespace {

double ipow(double b, int n)
{
    double r = 1.0;
    for (int i = 0; i < n; ++i)
        r *= b;
    return r;
}

double sign_eta(int eta) { return eta % 2 ? -1.0 : 1.0; }

} // namespace

SeparableHamiltonian lv_hamiltonian(double a)
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("a>0", "lv_hamiltonian: anisotropy a must be positive");
    SeparableHamiltonian h;
    h.name = "lotka-volterra";
    h.V = [a](double x) { return a * (x + std::exp(-x)); };
    h.K = [](double k) { return k + std::exp(-k); };
    h.odd_dV = [a](int eta, double x) { return a * ((eta == 0 ? 1.0 : 0.0) - std::exp(-x)); };
    h.odd_dK = [](int eta, double k) { return (eta == 0 ? 1.0 : 0.0) - std::exp(-k); };
    h.even_dV = [a](int eta, double x) { return eta == 0 ? a * (x + std::exp(-x)) : a * std::exp(-x); };
    h.even_dK = [](int eta, double k) { return eta == 0 ? k + std::exp(-k) : std::exp(-k); };
    return h;
}

SeparableHamiltonian camouflage_hamiltonian(const CamouflageParams& c)
{
    SeparableHamiltonian h;
    h.name = "camouflage";
    h.V = [c](double x) { return std::cosh(c.nu1 * x) + c.lambda_x * std::cos(c.nu2 * x); };
    h.K = [c](double k) { return std::cosh(c.mu1 * k) + c.lambda_k * std::cos(c.mu2 * k); };
    h.odd_dV = [c](int eta, double x) {
        const int n = 2 * eta + 1;
        return ipow(c.nu1, n) * std::sinh(c.nu1 * x) - sign_eta(eta) * c.lambda_x * ipow(c.nu2, n) * std::sin(c.nu2 * x);
    };
    h.odd_dK = [c](int eta, double k) {
        const int n = 2 * eta + 1;
        return ipow(c.mu1, n) * std::sinh(c.mu1 * k) - sign_eta(eta) * c.lambda_k * ipow(c.mu2, n) * std::sin(c.mu2 * k);
    };
    h.even_dV = [c](int eta, double x) {
        const int n = 2 * eta;
        return ipow(c.nu1, n) * std::cosh(c.nu1 * x) + sign_eta(eta) * c.lambda_x * ipow(c.nu2, n) * std::cos(c.nu2 * x);
    };
    h.even_dK = [c](int eta, double k) {
        const int n = 2 * eta;
        return ipow(c.mu1, n) * std::cosh(c.mu1 * k) + sign_eta(eta) * c.lambda_k * ipow(c.mu2, n) * std::cos(c.mu2 * k);
    };
    return h;
}

SeparableHamiltonian quartic_test_hamiltonian()
{
    SeparableHamiltonian h;
    h.name = "quartic";
    h.V = [](double x) { return x * x * x * x; };
    h.K = [](double k) { return k * k; };
    h.odd_dV = [](int eta, double x) {
        if (eta == 0)
            return 4.0 * x * x * x;
        return eta == 1 ? 24.0 * x : 0.0;
    };
    h.odd_dK = [](int eta, double k) { return eta == 0 ? 2.0 * k : 0.0; };
    h.even_dV = [](int eta, double x) {
        switch (eta) {
        case 0: return x * x * x * x;
        case 1: return 12.0 * x * x;
        case 2: return 24.0;
        default: return 0.0;
        }
    };
    h.even_dK = [](int eta, double k) {
        if (eta == 0)
            return k * k;
        return eta == 1 ? 2.0 : 0.0;
    };
    h.truncation_order = 1;
    return h;
}

SeparableHamiltonian harmonic_test_hamiltonian()
{
    SeparableHamiltonian h;
    h.name = "harmonic";
    h.V = [](double x) { return 0.5 * x * x; };
    h.K = [](double k) { return 0.5 * k * k; };
    h.odd_dV = [](int eta, double x) { return eta == 0 ? x : 0.0; };
    h.odd_dK = [](int eta, double k) { return eta == 0 ? k : 0.0; };
    h.even_dV = [](int eta, double x) {
        if (eta == 0)
            return 0.5 * x * x;
        return eta == 1 ? 1.0 : 0.0;
    };
    h.even_dK = [](int eta, double k) {
        if (eta == 0)
            return 0.5 * k * k;
        return eta == 1 ? 1.0 : 0.0;
    };
    h.truncation_order = 0;
    return h;
}

} // namespace lvw
