#include "lvwigner/phase_space.hpp"

#include "lvwigner/error.hpp"

#include <cmath>

namespace lvw {

void PhaseGrid::validate() const
{
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(k_min) && std::isfinite(k_max)))
        throw DomainError("grid-finite", "grid extents must be finite");
    if (!(x_min < x_max) || !(k_min < k_max))
        throw DomainError("grid-order", "grid requires x_min < x_max and k_min < k_max");
    if (nx < 3 || nk < 3)
        throw DomainError("grid-nodes", "grid requires at least 3 nodes per axis");
}

bool operator==(const PhaseGrid& a, const PhaseGrid& b)
{
    return a.x_min == b.x_min && a.x_max == b.x_max && a.k_min == b.k_min && a.k_max == b.k_max
           && a.nx == b.nx && a.nk == b.nk;
}

} // namespace lvw
