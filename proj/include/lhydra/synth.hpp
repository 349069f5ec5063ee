#pragma once

#include <cstdint>

#include "lhydra/geometry.hpp"
#include "lhydra/graph.hpp"

namespace lhydra::synth {

// Distance blocks of a synthetic configuration whose first l points are the
// landmarks. Computed pairwise, without materializing the full matrix.
DistanceBlocks exact_blocks(const PointConfiguration& points, Eigen::Index l, Curvature kappa);

// Additive zero-mean Gaussian noise on every known dissimilarity, clamped at
// 0; D_L is re-symmetrized and keeps its zero diagonal.
void perturb_blocks(DistanceBlocks& blocks, double sigma, std::uint64_t seed);

} // namespace lhydra::synth
