#pragma once

#include <vector>

#include "hemidef/geometry.hpp"

namespace hemidef {

// Full game state; agent counts stay fixed for a whole episode and consumed
// agents are frozen in place.
struct WorldState {
    std::vector<DefenderPose> defenders;
    std::vector<IntruderPose> intruders;
    double t = 0.0;
};

} // namespace hemidef
