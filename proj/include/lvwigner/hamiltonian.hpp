#pragma once

#include "lvwigner/phase_space.hpp"

#include <functional>
#include <optional>
#include <string>

namespace lvw {

// H(x, k) = K(k) + V(x) with exact derivative oracles.
//   odd_dV(eta, x)  = d^(2 eta + 1) V / dx^(2 eta + 1)
//   even_dV(eta, x) = d^(2 eta) V / dx^(2 eta)   (eta = 0 gives V itself)
// and the same for K.  When truncation_order is set, every odd derivative with
// eta > truncation_order vanishes identically.
struct SeparableHamiltonian {
    std::string name;
    std::function<double(double)> V;
    std::function<double(double)> K;
    std::function<double(int, double)> odd_dV;
    std::function<double(int, double)> odd_dK;
    std::function<double(int, double)> even_dV;
    std::function<double(int, double)> even_dK;
    std::optional<int> truncation_order;

    double evaluate(PhasePoint p) const { return K(p.k) + V(p.x); }
    double dV(int n, double x) const { return n % 2 ? odd_dV(n / 2, x) : even_dV(n / 2, x); }
    double dK(int n, double k) const { return n % 2 ? odd_dK(n / 2, k) : even_dK(n / 2, k); }
};

SeparableHamiltonian lv_hamiltonian(double a);

struct CamouflageParams {
    double nu1 = 1.0, nu2 = 1.0;
    double mu1 = 1.0, mu2 = 1.0;
    double lambda_x = 0.0, lambda_k = 0.0;
};

// V = cosh(nu1 x) + lambda_x cos(nu2 x),  K = cosh(mu1 k) + lambda_k cos(mu2 k).
SeparableHamiltonian camouflage_hamiltonian(const CamouflageParams& c);

// K = k^2, V = x^4: the odd series terminates after eta = 1.
SeparableHamiltonian quartic_test_hamiltonian();

// K = k^2 / 2, V = x^2 / 2.
SeparableHamiltonian harmonic_test_hamiltonian();

} // namespace lvw
