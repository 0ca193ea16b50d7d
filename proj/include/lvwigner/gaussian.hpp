#pragma once

#include "lvwigner/field.hpp"
#include "lvwigner/hamiltonian.hpp"
#include "lvwigner/phase_space.hpp"
#include "lvwigner/wignerflow.hpp"

#include <vector>

namespace lvw {

struct GaussianParams {
    double alpha = 1.0;
    double zeta = 0.0; // squeeze: x scaled by e^zeta, k by e^-zeta

    void validate() const;
    double purity() const { return alpha * alpha; }
    bool unphysical() const { return purity() > 1.0 + 1e-12; }
};

enum class Axis { x, k };

inline constexpr int kMaxGaussianOrder = 120;

double gaussian_weight(const GaussianParams& G, PhasePoint p);
double gaussian_partial(const GaussianParams& G, Axis axis, int n, PhasePoint p);
// Orders 0..n in one recurrence pass.
std::vector<double> gaussian_partials(const GaussianParams& G, Axis axis, int n, PhasePoint p);

WignerEnsemble gaussian_ensemble(const GaussianParams& G);

// Recommended integration lattice: boundary mass far below 1e-10.
PhaseGrid gaussian_recommended_grid(const GaussianParams& G);

// (d_x Jx, d_k Jk) for the LV Hamiltonian, isotropic G only.
Vec2 lv_divergences(const GaussianParams& G, double a, PhasePoint p);

// Exact resummed LV currents.  Uses erf(alpha (x - i/2)) = conj erf(alpha (x + i/2)).
Vec2 lv_currents(const GaussianParams& G, double a, PhasePoint p);

FlowSampler lv_gaussian_sampler(const GaussianParams& G, double a);

// Throws MaskedError when G(p) < w_floor.
Vec2 gaussian_velocity(const GaussianParams& G, double a, PhasePoint p, double w_floor);
double default_gaussian_floor(const GaussianParams& G);

// (d_x Jx, d_k Jk) for the camouflage Hamiltonian.
Vec2 camouflage_divergences(const GaussianParams& G, const CamouflageParams& c, PhasePoint p);

// Parameter map under which the camouflage flow of G_1 (squeeze zeta) is
// divergence free: mu1 = e^{-2 zeta} nu2, mu2 = e^{-2 zeta} nu1,
// lambda_k = -exp(e^{-2 zeta} nu1^2 / 2), lambda_x = -exp(e^{-2 zeta} nu2^2 / 2).
CamouflageParams tuned_camouflage(double nu1, double nu2, double zeta);

struct CamouflageReport {
    CamouflageParams params;
    GaussianParams gaussian;
    double detune = 1.0;
    double max_abs_div = 0.0;
    ScalarField div_x;
    ScalarField div_k;
    ScalarField div;
};

// detune multiplies lambda_k after tuning (1 keeps the tuned identity).
CamouflageReport camouflage_stationarity_check(double nu1, double nu2, double zeta, const PhaseGrid& grid,
                                               double detune = 1.0);

} // namespace lvw
