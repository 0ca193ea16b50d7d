#pragma once

#include "lvwigner/classical.hpp"
#include "lvwigner/phase_space.hpp"

#include <array>
#include <string>
#include <vector>

namespace lvw {

enum class VelocityOrder { classical, alpha2, alpha4, exact };

std::string to_string(VelocityOrder o);
VelocityOrder parse_order(const std::string& s);

struct DynamicsParams {
    VelocityOrder order = VelocityOrder::classical;
    double a = 1.0;
    double alpha = 0.0;

    void validate() const;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

enum class Stability { center_candidate, stable_focus, unstable_focus, stable_node, unstable_node, saddle };

std::string to_string(Stability s);

struct StabilityReport {
    Species equilibrium;
    Matrix2 jacobian{};
    double trace = 0.0;
    double det = 0.0;
    double discriminant = 0.0;
    Stability classification = Stability::center_candidate;
    double residual = 0.0;
};

// (dy/dtau, dz/dtau).
Vec2 effective_velocity(const DynamicsParams& D, Species s);

Species find_equilibrium(const DynamicsParams& D, Species guess = {1.0, 1.0});

Matrix2 jacobian(const DynamicsParams& D, Species s);

// Relative band: |Tr| <= 1e-12 max|J_ij| is a center candidate.
Stability classify_stability(const Matrix2& J);

StabilityReport stability_report(const DynamicsParams& D, Species guess = {1.0, 1.0});

struct EvolveResult {
    Trajectory trajectory;
    bool extinction = false;
    double extinction_time = 0.0;
    int step_rejections = 0;
};

EvolveResult evolve(const DynamicsParams& D, Species initial, double tau_end, double dtau);

struct PeriodSummary {
    double t_start = 0.0;
    double t_end = 0.0;
    double mean_radius = 0.0;
};

// Successive crossings of the ray z = z_e, y > y_e delimit periods;
// the radius is the distance to the equilibrium in the (y, z) plane,
// averaged over time within each period.
std::vector<PeriodSummary> period_averages(const Trajectory& tr, Species equilibrium);

} // namespace lvw
