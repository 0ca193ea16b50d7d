#include "lvwigner/field.hpp"

#include "lvwigner/error.hpp"

#include <algorithm>
#include <cmath>

namespace lvw {

std::size_t ScalarField::masked_count() const
{
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

double ScalarField::max_abs() const
{
    double m = 0.0;
    for (std::size_t n = 0; n < values.size(); ++n)
        if (!masked(n) && std::isfinite(values[n]))
            m = std::max(m, std::abs(values[n]));
    return m;
}

std::size_t VectorField::masked_count() const
{
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

void FlowField::validate() const
{
    grid.validate();
    const auto n = grid.size();
    if (W.size() != n || Jx.size() != n || Jk.size() != n)
        throw DomainError("shape", "flow field arrays do not match the grid");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(W[i]) || !std::isfinite(Jx[i]) || !std::isfinite(Jk[i]))
            throw DomainError("finite", "flow field contains non-finite entries");
}

FlowField sample_flow(const PhaseGrid& grid, const FlowSampler& f, std::string provenance)
{
    grid.validate();
    FlowField F;
    F.grid = grid;
    F.provenance = std::move(provenance);
    F.W.resize(grid.size());
    F.Jx.resize(grid.size());
    F.Jk.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nk; ++j) {
            const auto s = f(grid.point(i, j));
            const auto n = grid.index(i, j);
            F.W[n] = s.W;
            F.Jx[n] = s.Jx;
            F.Jk[n] = s.Jk;
        }
    return F;
}

ScalarField sample_scalar(const PhaseGrid& grid, const std::function<double(PhasePoint)>& f, std::string provenance)
{
    grid.validate();
    ScalarField s;
    s.grid = grid;
    s.provenance = std::move(provenance);
    s.values.resize(grid.size());
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.nk; ++j)
            s.values[grid.index(i, j)] = f(grid.point(i, j));
    return s;
}

} // namespace lvw
