#pragma once

#include "lvwigner/field.hpp"
#include "lvwigner/hamiltonian.hpp"
#include "lvwigner/phase_space.hpp"
#include "lvwigner/wignerflow.hpp"

#include <functional>

namespace lvw {

struct ThermoParams {
    double beta = 1.0;
    double a = 1.0;

    void validate() const;
    // a beta^2 / 24; the corrected quantities need it below 1.
    double u() const { return a * beta * beta / 24.0; }
    void require_corrected() const;
};

enum class Which { classical, corrected };

double log_partition_classical(const ThermoParams& P);
double partition_classical(const ThermoParams& P);
double partition_corrected(const ThermoParams& P);

double classical_weight(const ThermoParams& P, PhasePoint p);
double chi_lv(const ThermoParams& P, PhasePoint p);
double chi_general(const SeparableHamiltonian& H, const ThermoParams& P, PhasePoint p);

// (Z0 / Z_ST) W0 (1 + chi); requires a beta^2 < 24.
double corrected_weight(const ThermoParams& P, PhasePoint p);
// W0 (1 + chi) without the normalization, defined for every beta.
double corrected_weight_unnormalized(const ThermoParams& P, PhasePoint p);

// O(beta^2) currents with the W0 prefactor.  They do not involve Z_ST and are
// evaluated for any beta.
Vec2 td_currents(const ThermoParams& P, PhasePoint p);
// Generic form for any separable H.  The prefactor is exp(-beta H) / Z0(beta, a)
// with the LV partition function, so non-LV instances carry a constant factor.
Vec2 td_currents_general(const SeparableHamiltonian& H, const ThermoParams& P, PhasePoint p);

double td_liouvillian(const ThermoParams& P, PhasePoint p);
// (beta^2 / 12) (K''' V'' V' - V''' K'' K').
double td_liouvillian_general(const SeparableHamiltonian& H, const ThermoParams& P, PhasePoint p);

double internal_energy(const ThermoParams& P, Which which);
double heat_capacity(const ThermoParams& P, Which which);

// Weight W0 (classical) or W0 (1 + chi) Z0/Z_ST (corrected) with exact partials.
WignerEnsemble td_ensemble(const ThermoParams& P, Which which);

// W = W0 (1 + chi) (unnormalized) with the td currents.
FlowSampler td_sampler(const ThermoParams& P);

struct Box {
    double x_min, x_max, k_min, k_max;
};

// Integration box that captures the weight's mass: the e^{-c e^{-x}} wall on
// the left and the e^{-c x} tail on the right, c = a beta along x, beta along k.
Box quadrature_box(const ThermoParams& P);
PhaseGrid recommended_grid(const ThermoParams& P, int n = 801);

// Nested adaptive Gauss-Kronrod over the box.
double integrate_box(const std::function<double(double, double)>& f, const Box& box, double rel_tol = 1e-12);

} // namespace lvw
