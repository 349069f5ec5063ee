#include "lhydra/synth.hpp"

#include <algorithm>
#include <random>

#include "lhydra/parallel.hpp"

namespace lhydra::synth {

DistanceBlocks exact_blocks(const PointConfiguration& points, Eigen::Index l, Curvature kappa) {
    const Eigen::Index n = points.X.rows();
    if (l < 1 || l > n) throw UsageError("exact_blocks: need 1 <= l <= n");
    const Eigen::Index m = n - l;

    DistanceBlocks blocks;
    blocks.D_L.setZero(l, l);
    blocks.D_N.resize(m, l);

    for (Eigen::Index i = 0; i < l; ++i)
        for (Eigen::Index j = i + 1; j < l; ++j)
            blocks.D_L(i, j) = blocks.D_L(j, i) = geometry::hyperbolic_distance(
                points.X.row(i).transpose(), points.X.row(j).transpose(), kappa);

    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        const LorentzVector x = points.X.row(l + static_cast<Eigen::Index>(i)).transpose();
        for (Eigen::Index j = 0; j < l; ++j)
            blocks.D_N(static_cast<Eigen::Index>(i), j) =
                geometry::hyperbolic_distance(x, points.X.row(j).transpose(), kappa);
    });
    return blocks;
}

void perturb_blocks(DistanceBlocks& blocks, double sigma, std::uint64_t seed) {
    if (sigma == 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);

    const Eigen::Index l = blocks.D_L.rows();
    for (Eigen::Index i = 0; i < l; ++i)
        for (Eigen::Index j = i + 1; j < l; ++j) {
            double v = std::max(0.0, blocks.D_L(i, j) + gauss(rng));
            blocks.D_L(i, j) = blocks.D_L(j, i) = v;
        }
    for (Eigen::Index i = 0; i < blocks.D_N.rows(); ++i)
        for (Eigen::Index j = 0; j < l; ++j)
            blocks.D_N(i, j) = std::max(0.0, blocks.D_N(i, j) + gauss(rng));
}

} // namespace lhydra::synth
