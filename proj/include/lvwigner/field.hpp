#pragma once

#include "lvwigner/phase_space.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lvw {

// Grid-sampled scalar.  `mask` is either empty (nothing masked) or has one
// entry per node; nonzero entries are excluded from every norm.
struct ScalarField {
    PhaseGrid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;
    std::string provenance;

    bool masked(std::size_t n) const { return !mask.empty() && mask[n] != 0; }
    std::size_t masked_count() const;
    double max_abs() const;
};

struct VectorField {
    PhaseGrid grid;
    std::vector<double> x;
    std::vector<double> k;
    std::vector<std::uint8_t> mask;
    std::string provenance;

    bool masked(std::size_t n) const { return !mask.empty() && mask[n] != 0; }
    std::size_t masked_count() const;
};

// Weight W together with its current J on one grid.  Provenance is one of
// "classical", "closed-form" or "series(<eta_max>)".
struct FlowField {
    PhaseGrid grid;
    std::vector<double> W;
    std::vector<double> Jx;
    std::vector<double> Jk;
    std::string provenance;

    void validate() const;
};

struct FlowSample {
    double W = 0.0;
    double Jx = 0.0;
    double Jk = 0.0;
};

// Point evaluator of W and J; lets diagnostics refine beyond grid resolution.
using FlowSampler = std::function<FlowSample(PhasePoint)>;

FlowField sample_flow(const PhaseGrid& grid, const FlowSampler& f, std::string provenance);

ScalarField sample_scalar(const PhaseGrid& grid, const std::function<double(PhasePoint)>& f, std::string provenance);

} // namespace lvw
