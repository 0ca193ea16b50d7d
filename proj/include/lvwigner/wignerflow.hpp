#pragma once

#include "lvwigner/field.hpp"
#include "lvwigner/hamiltonian.hpp"
#include "lvwigner/phase_space.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lvw {

// Wigner weight with exact partials of every order.  partials_x(n, p) returns
// the derivatives of orders 0..n along x at p (likewise along k); computing all
// orders at once lets recurrences be shared across a series.
struct WignerEnsemble {
    std::string name;
    std::function<double(PhasePoint)> value;
    std::function<std::vector<double>(int, PhasePoint)> partials_x;
    std::function<std::vector<double>(int, PhasePoint)> partials_k;

    double partial_x(int n, PhasePoint p) const { return partials_x(n, p)[n]; }
    double partial_k(int n, PhasePoint p) const { return partials_k(n, p)[n]; }
};

inline constexpr int kMaxSeriesOrder = 60;
inline constexpr double kTermOverflow = 1e12;
inline constexpr double kDefaultFloorRatio = 1e-12;

// Real series coefficient (i/2)^(2 eta) / (2 eta + 1)! = (-1/4)^eta / (2 eta + 1)!.
double series_coefficient(int eta);

// Point-wise truncated series.  Throw OverflowError when any single term
// exceeds kTermOverflow in magnitude.
Vec2 series_current_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p, int eta_max);
double stationarity_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p, int eta_max);
double series_divergence_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p, int eta_max);
// Returns nullopt when |W(p)| < w_floor.
std::optional<double> liouvillian_at(const SeparableHamiltonian& H, const WignerEnsemble& E, PhasePoint p,
                                     int eta_max, double w_floor);

FlowField series_currents(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max);
ScalarField stationarity_series(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max);
// Analytic divergence of the truncated currents (same partials, no differencing).
ScalarField series_divergence(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max);
// w_floor <= 0 selects the default kDefaultFloorRatio * max|W| over the grid.
ScalarField liouvillian_series(const SeparableHamiltonian& H, const WignerEnsemble& E, const PhaseGrid& grid, int eta_max,
                               double w_floor = 0.0);

FlowSampler series_sampler(const SeparableHamiltonian& H, const WignerEnsemble& E, int eta_max);

// div J by fourth-order central differences; the two outermost node rings are masked.
ScalarField fd_divergence(const FlowField& F);
ScalarField continuity_residual(const FlowField& F, const ScalarField& dW_dtau);

double default_w_floor(const FlowField& F);
VectorField quantum_velocity(const FlowField& F, double w_floor);

struct QuadratureResult {
    double value = 0.0;
    double boundary_mass = 0.0;
    bool boundary_warning = false;
};

inline constexpr double kBoundaryMassLimit = 1e-10;

// 2D trapezoid rule on the grid nodes.
double trapezoid_2d(const PhaseGrid& grid, const std::function<double(PhasePoint)>& f);

QuadratureResult purity(const WignerEnsemble& E, const PhaseGrid& grid);
QuadratureResult expectation(const WignerEnsemble& E, const std::function<double(PhasePoint)>& O, const PhaseGrid& grid);

struct StagnationPoint {
    PhasePoint p;
    double residual = 0.0; // |J| at p
    double W = 0.0;
};

struct StagnationReport {
    std::vector<StagnationPoint> points;
    std::vector<PhasePoint> non_converged;
    std::size_t masked_candidates = 0; // converged, but W below the floor
};

// Cells where both Jx and Jk change sign seed a 2D Newton iteration, run on
// `refine` when given and on the bilinear interpolant of F otherwise.  Points
// whose weight falls below w_floor (default 1e-12 max|W|) belong to the decay
// region and are only counted.
StagnationReport find_stagnation(const FlowField& F, double tol, const FlowSampler& refine = {}, double w_floor = 0.0);

FlowSampler bilinear_sampler(const FlowField& F);

struct WindingResult {
    int winding = 0;
    double residual = 0.0;
    double min_abs_J = 0.0;
};

// Counter-clockwise circle, first point not repeated.
std::vector<PhasePoint> circle_loop(PhasePoint center, double radius, int n = 64);

// Angle accumulated by J along the closed polyline, divided by 2 pi.  Segments
// are subdivided until the direction change per step is below pi/8.
WindingResult winding_number(const FlowSampler& J, const std::vector<PhasePoint>& loop);
WindingResult winding_number(const FlowField& F, const std::vector<PhasePoint>& loop);

enum class CriticalType { vortex, saddle, node, focus, degenerate };
std::string to_string(CriticalType t);

struct CriticalPointInfo {
    CriticalType type = CriticalType::degenerate;
    int sense = 0; // +1 counter-clockwise rotation, -1 clockwise, 0 none
    double trace = 0.0;
    double det = 0.0;
};

// Linearization of J at a zero, by central differences of the sampler.
CriticalPointInfo classify_critical_point(const FlowSampler& J, PhasePoint p, double h = 1e-5);

} // namespace lvw
