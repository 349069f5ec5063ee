#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "lhydra/embed.hpp"
#include "lhydra/geometry.hpp"
#include "lhydra/graph.hpp"

namespace lhydra {

struct StressTolerances {
    double gradient_tol = 1e-6;  // infinity norm
    int max_iterations = 500;
};

struct StressProblem {
    const DistanceBlocks* D = nullptr;
    Curvature kappa{1.0};
    EmbeddingResult X0;  // must be projected
    StressTolerances tol;
};

// One row per accepted optimizer iteration.
struct ConvergenceRecord {
    int iteration;
    double stress;
    double gradient_norm;
};
using ConvergenceLog = std::vector<ConvergenceRecord>;

struct RefinedResult {
    EmbeddingResult result;
    double stress_before = 0.0;
    double stress_after = 0.0;
    ConvergenceLog landmark_log;
    int nonconverged_points = 0;
    bool landmark_converged = true;
    std::vector<CurvatureTrial> curvature_table;
};

// An anchor for single-point triangulation: a fixed landmark position and the
// target distance to it.
struct Anchor {
    LorentzVector position;
    double target;
};

namespace stress {

// sqrt of the squared stress summed over ordered known pairs: both orders of
// every landmark-landmark and landmark-non-landmark pair. Rows of X are
// landmarks first, matching the DistanceBlocks partition.
double stress_value(const PointConfiguration& X, const DistanceBlocks& D, Curvature kappa);

// Ordered pair count and distance sum over the same pair set.
std::size_t known_pair_count(const DistanceBlocks& D);
double known_pair_distance_sum(const DistanceBlocks& D);

double rmse(double stress, std::size_t ordered_pair_count);
double ree(double stress, double distance_sum);

// Convenience: REE of a configuration over the known pairs.
double known_pair_ree(const PointConfiguration& X, const DistanceBlocks& D, Curvature kappa);

// Gradient of sum_a (d_a - dist(x(z), y_a))^2 with respect to the spacelike
// coordinates z; the timelike coordinate is implied as sqrt(1 + |z|^2).
Eigen::VectorXd stress_gradient(const Eigen::VectorXd& z, const std::vector<Anchor>& anchors,
                                Curvature kappa);

// Stage 1: joint quasi-Newton minimization of the landmark-landmark stress.
// Returns the refined l x (d+1) block (rows on H_d) and appends the
// per-iteration log.
Eigen::MatrixXd minimize_landmark_stress(const StressProblem& problem, ConvergenceLog* log = nullptr,
                                         bool* converged = nullptr);

// Stage 2: each non-landmark point is triangulated independently against the
// fixed landmark block; runs in parallel over points.
Eigen::MatrixXd minimize_nonlandmark_stress(const StressProblem& problem,
                                            const Eigen::MatrixXd& landmark_coords,
                                            int* nonconverged = nullptr);

// L-hydra followed by two-stage stress refinement at the winning curvature.
RefinedResult lhydra_plus(const DistanceBlocks& D, int d, const std::vector<double>& grid,
                          StressTolerances tol = {});

} // namespace stress
} // namespace lhydra
