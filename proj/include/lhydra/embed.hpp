#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "lhydra/geometry.hpp"
#include "lhydra/graph.hpp"

namespace lhydra {

// Elementwise cosh(sqrt(kappa) * D) of the known distance blocks. Entries are
// >= 1; A_L keeps the unit diagonal and symmetry of D_L.
struct GramBlocks {
    Eigen::MatrixXd A_L;
    Eigen::MatrixXd A_N;
    double kappa = 1.0;
};

// Extreme eigenpairs of A_L: the algebraically largest, and the d smallest in
// descending order (lambda_bottom(0) = lambda_{l-d+1} >= ... >= lambda_l).
struct EigenPairs {
    double lambda_top = 0.0;
    Eigen::VectorXd q_top;
    Eigen::VectorXd lambda_bottom;
    Eigen::MatrixXd q_bottom;  // l x d, columns aligned with lambda_bottom
    double frobenius_sq = 0.0; // ||A_L||_F^2, used for the strain residual
};

struct EmbeddingResult {
    PointConfiguration points;  // landmarks first, then non-landmarks
    double kappa = 1.0;
    int dim = 0;
    Eigen::Index landmark_count = 0;
    std::vector<double> eigenvalues_used;  // lambda_1 followed by the d trailing
    double strain_residual = 0.0;          // sum of the squared middle eigenvalues
    bool projected = false;
};

struct CurvatureTrial {
    double kappa = 0.0;
    double objective = 0.0;  // REE over known pairs, projected coordinates
    bool ok = false;
    std::string error;
};

namespace embed {

GramBlocks cosh_transform(const DistanceBlocks& D, Curvature kappa);

// Extreme eigenpairs of a symmetric matrix: dense decomposition up to
// l = 512, Lanczos with full reorthogonalization above. Sign convention:
// q_top flipped so its largest-magnitude entry is positive (entrywise
// positive for positive A_L), trailing eigenvectors likewise.
EigenPairs reduced_eigendecomposition(const Eigen::MatrixXd& A_L, int d);

// X_L = [sqrt(lambda_1) q_1, sqrt(-lambda_{l-d+1}) q_{l-d+1}, ...].
// Throws NonNegativeTrailingEigenvalue unless all d trailing eigenvalues are
// strictly negative (relative threshold 1e-12 * lambda_1).
Eigen::MatrixXd build_landmark_coords(const EigenPairs& eig, int d);

// Least-squares triangulation X_N = A_N [q_1/sqrt(lambda_1), -q/sqrt(-lambda), ...].
Eigen::MatrixXd build_nonlandmark_coords(const Eigen::MatrixXd& A_N, const EigenPairs& eig, int d);

// The full strain-minimizing pipeline. D_N is consumed in row chunks so the
// Gram block A_N is never materialized whole.
EmbeddingResult lhydra(const DistanceBlocks& D, int d, Curvature kappa, bool project = true);

// Runs lhydra over the grid and keeps the kappa with the smallest REE over
// known pairs (ties toward smaller kappa).
std::pair<EmbeddingResult, std::vector<CurvatureTrial>>
optimize_curvature(const DistanceBlocks& D, int d, const std::vector<double>& grid);

// 16 log-spaced values in [2^-3, 2^3].
std::vector<double> default_curvature_grid();

} // namespace embed
} // namespace lhydra
