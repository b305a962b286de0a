#pragma once

#include <cstdint>
#include <vector>

#include "hemidef/linalg.hpp"
#include "hemidef/world.hpp"

namespace hemidef {

// Sensing and communication limits. The dummy triple fills unused feature
// slots: a far, non-threatening phantom; masking is what keeps it out of
// planning and loss, the value itself only needs to be fixed.
struct PerceptionConfig {
    double fov = kPi;   // horizontal field of view, inclusive boundary
    int n_af = 10;      // intruder feature slots
    int n_df = 3;       // defender feature slots
    double r_c = 1.0;   // communication range (chord), meters
    RelativeCoord dummy{0.0, 0.0, 10.0};
};

// Fixed-size per-defender observation. Valid intruder rows are sorted by
// ascending ground distance; masked rows hold exactly the dummy sentinel.
struct LocalPerception {
    std::vector<RelativeCoord> intruder_feats;  // n_af rows (psi, phi, r/R)
    std::vector<int> intruder_ids;              // world indices, -1 when masked
    std::vector<std::uint8_t> intruder_mask;
    std::vector<RelativeCoord> defender_feats;  // n_df rows (dpsi, dphi, chord/R)
    std::vector<std::uint8_t> defender_mask;
};

// Symmetric 0/1 adjacency with zero diagonal, stored dense so it can feed
// the graph layers directly.
struct CommGraph {
    Matrix s;
};

// True iff the horizontal angle between the defender's outward radial
// boresight and the direction from its ground footprint to the intruder is
// at most fov/2.
bool visible(const DefenderPose& d, const IntruderPose& a, double fov, double R);

LocalPerception extract_features(int i, const WorldState& world,
                                 const PerceptionConfig& cfg, double R);

CommGraph build_comm_graph(const std::vector<DefenderPose>& defenders, double r_c,
                           double R);

// Union of the visible-intruder sets of every defender within k comm hops
// of defender i (including i itself), ascending world index.
std::vector<int> khop_sensible(int i, const WorldState& world,
                               const PerceptionConfig& cfg, double R, int k);

// Feature matrix for the whole team: one row of 3*(n_af+n_df) reals per
// defender, intruder rows first. Dead defenders get all-dummy rows.
Matrix feature_matrix(const WorldState& world, const PerceptionConfig& cfg, double R,
                      std::vector<LocalPerception>* percepts = nullptr);

} // namespace hemidef
