#pragma once

#include "lvwigner/field.hpp"
#include "lvwigner/hamiltonian.hpp"
#include "lvwigner/phase_space.hpp"

#include <utility>
#include <vector>

namespace lvw {

struct Species {
    double y = 1.0;
    double z = 1.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> points;
    std::vector<Species> species;
    std::vector<double> energies;

    std::size_t size() const { return times.size(); }
};

struct OrbitSample {
    double T = 0.0;
    PhasePoint plus;  // y = (T + sqrt(D)) / 2
    PhasePoint minus; // y = (T - sqrt(D)) / 2
};

struct OrbitBranchPair {
    double energy = 0.0;
    std::vector<OrbitSample> samples;
    std::vector<double> rejected; // T values with negative discriminant
};

struct Polyline {
    std::vector<PhasePoint> points;
    bool closed = false;
    bool degenerate = false; // single point at a grid minimum touching the level
};

Vec2 classical_velocity(const SeparableHamiltonian& H, PhasePoint p);

Species species_map(PhasePoint p);
PhasePoint log_coordinates(Species s);

// Closed LV orbits at a = 1, parameterized by T = y + z.
OrbitBranchPair parametric_orbit(double energy, const std::vector<double>& T_samples);

// Admissible T interval [T_lo, T_hi] where T^2 >= 4 exp(T - energy), located
// by bisection on the discriminant.  Requires energy >= 2.
std::pair<double, double> orbit_T_interval(double energy);

std::vector<Polyline> level_set(const SeparableHamiltonian& H, double energy, const PhaseGrid& grid);

VectorField classical_currents(const SeparableHamiltonian& H, const ScalarField& W);

// Convenience: W and the classical current sampled together.
FlowField classical_flow(const SeparableHamiltonian& H, const std::function<double(PhasePoint)>& W, const PhaseGrid& grid);

Trajectory integrate_classical(const SeparableHamiltonian& H, PhasePoint p0, double tau_end, double dtau);

} // namespace lvw
