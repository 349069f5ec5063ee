#include "lhydra/embed.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lhydra/parallel.hpp"
#include "lhydra/stress.hpp"

namespace lhydra::embed {

namespace {

// cosh overflows past ~710; refuse instead of producing inf
void check_overflow(double sqrt_kappa, double max_dist) {
    if (sqrt_kappa * max_dist > 700.0)
        throw AlgorithmError("cosh_transform: sqrt(kappa)*max(D) = " +
                             std::to_string(sqrt_kappa * max_dist) +
                             " would overflow; use a smaller kappa");
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> q) {
    Eigen::Index imax = 0;
    q.cwiseAbs().maxCoeff(&imax);
    if (q(imax) < 0.0) q = -q;
}

EigenPairs dense_extreme_pairs(const Eigen::MatrixXd& A, int d) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    if (solver.info() != Eigen::Success)
        throw AlgorithmError("reduced_eigendecomposition: dense solver failed");
    const Eigen::Index l = A.rows();
    const Eigen::VectorXd& vals = solver.eigenvalues();  // ascending

    EigenPairs out;
    out.lambda_top = vals(l - 1);
    out.q_top = solver.eigenvectors().col(l - 1);
    out.lambda_bottom.resize(d);
    out.q_bottom.resize(l, d);
    for (int k = 0; k < d; ++k) {
        // descending: lambda_{l-d+1} >= ... >= lambda_l
        out.lambda_bottom(k) = vals(d - 1 - k);
        out.q_bottom.col(k) = solver.eigenvectors().col(d - 1 - k);
    }
    return out;
}

// Lanczos with full reorthogonalization; both spectrum ends converge first,
// which is exactly what is needed here.
EigenPairs lanczos_extreme_pairs(const Eigen::MatrixXd& A, int d) {
    const Eigen::Index l = A.rows();
    const int max_steps = static_cast<int>(std::min<Eigen::Index>(l, std::max(8 * (d + 2), 120)));
    const double scale = A.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm bound

    Eigen::MatrixXd V(l, max_steps + 1);
    Eigen::VectorXd alpha(max_steps), beta(max_steps);

    std::mt19937_64 rng(0x1f2e3d4c5b6a7988ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Eigen::Index i = 0; i < l; ++i) V(i, 0) = gauss(rng);
    V.col(0).normalize();

    int m = 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolver;
    for (int j = 0; j < max_steps; ++j) {
        Eigen::VectorXd w = A * V.col(j);
        alpha(j) = V.col(j).dot(w);
        w -= alpha(j) * V.col(j);
        if (j > 0) w -= beta(j - 1) * V.col(j - 1);
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        beta(j) = w.norm();
        m = j + 1;
        if (beta(j) < 1e-14 * scale) break;
        V.col(j + 1) = w / beta(j);

        if (m >= 2 * (d + 1) && (m % 10 == 0 || j == max_steps - 1)) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) T(i, i) = alpha(i);
            for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta(i);
            tsolver.compute(T);
            const Eigen::VectorXd& rv = tsolver.eigenvalues();
            // residual estimate |beta_m * s_{m,i}| for the extreme Ritz pairs
            double worst = 0.0;
            for (int k = 0; k < d; ++k)
                worst = std::max(worst, std::abs(beta(j) * tsolver.eigenvectors()(m - 1, k)));
            worst = std::max(worst, std::abs(beta(j) * tsolver.eigenvectors()(m - 1, m - 1)));
            (void)rv;
            if (worst < 1e-10 * scale) break;
        }
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = alpha(i);
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta(i);
    tsolver.compute(T);
    if (tsolver.info() != Eigen::Success || m < d + 1)
        throw AlgorithmError("reduced_eigendecomposition: Lanczos did not converge");

    EigenPairs out;
    out.lambda_top = tsolver.eigenvalues()(m - 1);
    out.q_top = V.leftCols(m) * tsolver.eigenvectors().col(m - 1);
    out.q_top.normalize();
    out.lambda_bottom.resize(d);
    out.q_bottom.resize(l, d);
    for (int k = 0; k < d; ++k) {
        out.lambda_bottom(k) = tsolver.eigenvalues()(d - 1 - k);
        out.q_bottom.col(k) = V.leftCols(m) * tsolver.eigenvectors().col(d - 1 - k);
        out.q_bottom.col(k).normalize();
    }
    return out;
}

// Columns of the triangulation map of Step 3:
// [q_1/sqrt(lambda_1), -q/sqrt(-lambda), ...]
Eigen::MatrixXd triangulation_map(const EigenPairs& eig, int d) {
    const Eigen::Index l = eig.q_top.size();
    Eigen::MatrixXd W(l, d + 1);
    W.col(0) = eig.q_top / std::sqrt(eig.lambda_top);
    for (int k = 0; k < d; ++k)
        W.col(k + 1) = -eig.q_bottom.col(k) / std::sqrt(-eig.lambda_bottom(k));
    return W;
}

void require_negative_trailing(const EigenPairs& eig, int d) {
    const double threshold = -1e-12 * eig.lambda_top;
    int admissible = 0;
    for (int k = 0; k < eig.lambda_bottom.size(); ++k)
        if (eig.lambda_bottom(k) < threshold) ++admissible;
    if (admissible < d) throw NonNegativeTrailingEigenvalue(d, admissible);
}

} // namespace

GramBlocks cosh_transform(const DistanceBlocks& D, Curvature kappa) {
    const double sk = std::sqrt(kappa.kappa);
    double max_dist = D.D_L.size() > 0 ? D.D_L.maxCoeff() : 0.0;
    if (D.D_N.size() > 0) max_dist = std::max(max_dist, D.D_N.maxCoeff());
    check_overflow(sk, max_dist);

    GramBlocks out;
    out.kappa = kappa.kappa;
    out.A_L = (sk * D.D_L).array().cosh();
    out.A_N = (sk * D.D_N).array().cosh();
    return out;
}

EigenPairs reduced_eigendecomposition(const Eigen::MatrixXd& A_L, int d) {
    const Eigen::Index l = A_L.rows();
    if (l != A_L.cols()) throw UsageError("reduced_eigendecomposition: matrix not square");
    if (l < d + 1) throw UsageError("reduced_eigendecomposition: need l >= d+1");

    EigenPairs out = l <= 512 ? dense_extreme_pairs(A_L, d) : lanczos_extreme_pairs(A_L, d);

    if (!(out.lambda_top > 0.0))
        throw AlgorithmError("reduced_eigendecomposition: leading eigenvalue not positive");
    fix_sign(out.q_top);
    for (int k = 0; k < d; ++k) fix_sign(out.q_bottom.col(k));
    out.frobenius_sq = A_L.squaredNorm();
    return out;
}

Eigen::MatrixXd build_landmark_coords(const EigenPairs& eig, int d) {
    require_negative_trailing(eig, d);
    const Eigen::Index l = eig.q_top.size();
    Eigen::MatrixXd X(l, d + 1);
    X.col(0) = std::sqrt(eig.lambda_top) * eig.q_top;
    for (int k = 0; k < d; ++k)
        X.col(k + 1) = std::sqrt(-eig.lambda_bottom(k)) * eig.q_bottom.col(k);
    return X;
}

Eigen::MatrixXd build_nonlandmark_coords(const Eigen::MatrixXd& A_N, const EigenPairs& eig, int d) {
    require_negative_trailing(eig, d);
    if (A_N.rows() == 0) return Eigen::MatrixXd(0, d + 1);
    if (A_N.cols() != eig.q_top.size())
        throw UsageError("build_nonlandmark_coords: A_N column count mismatch");
    return A_N * triangulation_map(eig, d);
}

EmbeddingResult lhydra(const DistanceBlocks& D, int d, Curvature kappa, bool project) {
    const Eigen::Index l = D.landmark_count();
    const Eigen::Index m = D.nonlandmark_count();
    if (d < 1) throw UsageError("lhydra: need d >= 1");
    if (d > l + m - 1) throw UsageError("lhydra: embedding dimension d must be <= l+m-1");
    if (l < d + 1) throw UsageError("lhydra: need at least d+1 landmarks");
    if (m > 0 && D.D_N.cols() != l) throw UsageError("lhydra: D_N column count mismatch");

    const double sk = std::sqrt(kappa.kappa);
    double max_dist = D.D_L.maxCoeff();
    if (m > 0) max_dist = std::max(max_dist, D.D_N.maxCoeff());
    check_overflow(sk, max_dist);

    Eigen::MatrixXd A_L = (sk * D.D_L).array().cosh();
    EigenPairs eig = reduced_eigendecomposition(A_L, d);

    EmbeddingResult res;
    res.kappa = kappa.kappa;
    res.dim = d;
    res.landmark_count = l;
    res.points.dim = d;
    res.points.X.resize(l + m, d + 1);
    res.points.X.topRows(l) = build_landmark_coords(eig, d);

    if (m > 0) {
        // Step 3 in row chunks: A_N is never materialized whole
        const Eigen::MatrixXd W = triangulation_map(eig, d);
        const Eigen::Index chunk = 8192;
        const std::size_t n_chunks = static_cast<std::size_t>((m + chunk - 1) / chunk);
        parallel_for(n_chunks, [&](std::size_t c) {
            const Eigen::Index begin = static_cast<Eigen::Index>(c) * chunk;
            const Eigen::Index rows = std::min(chunk, m - begin);
            res.points.X.middleRows(l + begin, rows) =
                ((sk * D.D_N.middleRows(begin, rows)).array().cosh()).matrix() * W;
        });
    }

    res.eigenvalues_used.push_back(eig.lambda_top);
    for (int k = 0; k < d; ++k) res.eigenvalues_used.push_back(eig.lambda_bottom(k));
    double middle = eig.frobenius_sq - eig.lambda_top * eig.lambda_top -
                    eig.lambda_bottom.squaredNorm();
    res.strain_residual = std::max(0.0, middle);

    if (project) {
        geometry::project_to_hyperboloid(res.points);
        res.projected = true;
    }
    return res;
}

std::vector<double> default_curvature_grid() {
    std::vector<double> grid;
    const double lo = std::log2(0.125), hi = std::log2(8.0);
    for (int i = 0; i < 16; ++i)
        grid.push_back(std::pow(2.0, lo + (hi - lo) * i / 15.0));
    return grid;
}

std::pair<EmbeddingResult, std::vector<CurvatureTrial>>
optimize_curvature(const DistanceBlocks& D, int d, const std::vector<double>& grid) {
    if (grid.empty()) throw UsageError("optimize_curvature: empty curvature grid");
    {
        // surface input validation directly instead of as aggregated trial failures
        const Eigen::Index l = D.landmark_count();
        const Eigen::Index m = D.nonlandmark_count();
        if (d < 1) throw UsageError("lhydra: need d >= 1");
        if (d > l + m - 1) throw UsageError("lhydra: embedding dimension d must be <= l+m-1");
        if (l < d + 1) throw UsageError("lhydra: need at least d+1 landmarks");
        for (double k : grid)
            if (!(k > 0.0)) throw UsageError("optimize_curvature: curvature must be positive");
    }

    std::vector<double> sorted = grid;
    std::sort(sorted.begin(), sorted.end());

    std::vector<CurvatureTrial> table(sorted.size());
    std::vector<EmbeddingResult> results(sorted.size());
    parallel_for(sorted.size(), [&](std::size_t i) {
        table[i].kappa = sorted[i];
        try {
            Curvature kappa(sorted[i]);
            results[i] = lhydra(D, d, kappa, /*project=*/true);
            table[i].objective = stress::known_pair_ree(results[i].points, D, kappa);
            table[i].ok = true;
        } catch (const std::exception& e) {
            table[i].error = e.what();
        }
    });

    int best = -1;
    for (std::size_t i = 0; i < table.size(); ++i) {
        // ascending grid plus strict comparison ties toward smaller kappa
        if (table[i].ok && (best < 0 || table[i].objective < table[best].objective))
            best = static_cast<int>(i);
    }
    if (best < 0) {
        std::string msg = "optimize_curvature: all grid points failed:";
        for (const auto& t : table) msg += "\n  kappa=" + std::to_string(t.kappa) + ": " + t.error;
        throw AlgorithmError(msg);
    }
    return {std::move(results[best]), std::move(table)};
}

} // namespace lhydra::embed
