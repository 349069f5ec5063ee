#include "lhydra/stress.hpp"

#include <atomic>
#include <cmath>

#include "lhydra/lbfgs.hpp"
#include "lhydra/parallel.hpp"

namespace lhydra::stress {

namespace {

constexpr double kDerivClamp = 1.0 + 1e-9;

double hyper_dist_from_product(double u, double sqrt_kappa) {
    if (u < 1.0) u = 1.0;
    return std::acosh(u) / sqrt_kappa;
}

// d/du of (1/sqrt(kappa)) arcosh(u), with u clamped away from the
// singularity at 1
double dist_derivative(double u, double sqrt_kappa) {
    const double uc = std::max(u, kDerivClamp);
    return 1.0 / (sqrt_kappa * std::sqrt(uc * uc - 1.0));
}

double lorentz_rows(const Eigen::MatrixXd& X, Eigen::Index i, Eigen::Index j) {
    const Eigen::Index d = X.cols() - 1;
    return X(i, 0) * X(j, 0) - X.row(i).tail(d).dot(X.row(j).tail(d));
}

// Squared stress of one point against its anchors and its gradient in the
// spacelike parametrization. Shared by both refinement stages.
double point_stress_sq(const Eigen::VectorXd& z, const std::vector<Anchor>& anchors,
                       double sqrt_kappa, Eigen::VectorXd* grad) {
    const Eigen::Index d = z.size();
    const double x1 = std::sqrt(1.0 + z.squaredNorm());
    if (grad) grad->setZero(d);
    double total = 0.0;
    for (const Anchor& a : anchors) {
        const double u = x1 * a.position(0) - z.dot(a.position.tail(d));
        const double r = a.target - hyper_dist_from_product(u, sqrt_kappa);
        total += r * r;
        if (grad) {
            const double coeff = -2.0 * r * dist_derivative(u, sqrt_kappa);
            // du/dz = y_1 * z / x1 - y_space
            *grad += coeff * (a.position(0) / x1 * z - a.position.tail(d));
        }
    }
    return total;
}

} // namespace

double stress_value(const PointConfiguration& X, const DistanceBlocks& D, Curvature kappa) {
    const Eigen::Index l = D.landmark_count();
    const Eigen::Index m = D.nonlandmark_count();
    if (X.X.rows() != l + m) throw UsageError("stress_value: row count does not match blocks");
    const double sk = std::sqrt(kappa.kappa);

    double sum = 0.0;
    for (Eigen::Index i = 0; i < l; ++i)
        for (Eigen::Index j = i + 1; j < l; ++j) {
            double r = D.D_L(i, j) - hyper_dist_from_product(lorentz_rows(X.X, i, j), sk);
            sum += 2.0 * r * r;  // both ordered pairs
        }

    std::vector<double> partial(static_cast<std::size_t>(m), 0.0);
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < l; ++j) {
            double r = D.D_N(static_cast<Eigen::Index>(i), j) -
                       hyper_dist_from_product(lorentz_rows(X.X, l + static_cast<Eigen::Index>(i), j), sk);
            s += 2.0 * r * r;
        }
        partial[i] = s;
    });
    for (double s : partial) sum += s;
    return std::sqrt(sum);
}

std::size_t known_pair_count(const DistanceBlocks& D) {
    const std::size_t l = static_cast<std::size_t>(D.landmark_count());
    const std::size_t m = static_cast<std::size_t>(D.nonlandmark_count());
    return l * (l - 1) + 2 * l * m;
}

double known_pair_distance_sum(const DistanceBlocks& D) {
    return D.D_L.sum() + 2.0 * D.D_N.sum();  // D_L already counts both orders
}

double rmse(double stress, std::size_t ordered_pair_count) {
    if (ordered_pair_count == 0) throw UsageError("rmse: zero pair count");
    return std::sqrt(stress * stress / static_cast<double>(ordered_pair_count));
}

double ree(double stress, double distance_sum) {
    if (!(distance_sum > 0.0)) throw UsageError("ree: distance sum must be positive");
    return stress / std::sqrt(distance_sum);
}

double known_pair_ree(const PointConfiguration& X, const DistanceBlocks& D, Curvature kappa) {
    return ree(stress_value(X, D, kappa), known_pair_distance_sum(D));
}

Eigen::VectorXd stress_gradient(const Eigen::VectorXd& z, const std::vector<Anchor>& anchors,
                                Curvature kappa) {
    Eigen::VectorXd grad;
    point_stress_sq(z, anchors, std::sqrt(kappa.kappa), &grad);
    return grad;
}

Eigen::MatrixXd minimize_landmark_stress(const StressProblem& problem, ConvergenceLog* log,
                                         bool* converged) {
    const DistanceBlocks& D = *problem.D;
    const Eigen::Index l = D.landmark_count();
    const int d = problem.X0.dim;
    const double sk = std::sqrt(problem.kappa.kappa);

    if (!problem.X0.projected)
        throw UsageError("minimize_landmark_stress: initial condition must be projected");

    // stack of spacelike coordinates, landmark-major
    Eigen::VectorXd z0(l * d);
    for (Eigen::Index i = 0; i < l; ++i)
        z0.segment(i * d, d) = problem.X0.points.X.row(i).tail(d).transpose();

    auto objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
        Eigen::VectorXd x1(l);
        for (Eigen::Index i = 0; i < l; ++i)
            x1(i) = std::sqrt(1.0 + z.segment(i * d, d).squaredNorm());
        grad.setZero(l * d);
        double total = 0.0;
        for (Eigen::Index i = 0; i < l; ++i) {
            const auto zi = z.segment(i * d, d);
            for (Eigen::Index j = i + 1; j < l; ++j) {
                const auto zj = z.segment(j * d, d);
                const double u = x1(i) * x1(j) - zi.dot(zj);
                const double r = D.D_L(i, j) - hyper_dist_from_product(u, sk);
                total += 2.0 * r * r;
                const double coeff = -4.0 * r * dist_derivative(u, sk);
                grad.segment(i * d, d) += coeff * (x1(j) / x1(i) * zi - zj);
                grad.segment(j * d, d) += coeff * (x1(i) / x1(j) * zj - zi);
            }
        }
        return total;
    };

    LbfgsOptions opts;
    opts.gradient_tol = problem.tol.gradient_tol;
    opts.max_iterations = problem.tol.max_iterations;
    IterationCallback cb = nullptr;
    if (log)
        cb = [log](int it, double value, double gnorm) {
            log->push_back({it, std::sqrt(std::max(0.0, value)), gnorm});
        };
    LbfgsResult res = lbfgs_minimize(objective, z0, opts, cb);
    if (converged) *converged = res.converged;

    Eigen::MatrixXd out(l, d + 1);
    for (Eigen::Index i = 0; i < l; ++i) {
        out.row(i).tail(d) = res.x.segment(i * d, d).transpose();
        out(i, 0) = std::sqrt(1.0 + res.x.segment(i * d, d).squaredNorm());
    }
    return out;
}

Eigen::MatrixXd minimize_nonlandmark_stress(const StressProblem& problem,
                                            const Eigen::MatrixXd& landmark_coords,
                                            int* nonconverged) {
    const DistanceBlocks& D = *problem.D;
    const Eigen::Index l = D.landmark_count();
    const Eigen::Index m = D.nonlandmark_count();
    const int d = problem.X0.dim;
    const double sk = std::sqrt(problem.kappa.kappa);

    Eigen::MatrixXd out(m, d + 1);
    std::atomic<int> failures{0};
    LbfgsOptions opts;
    opts.gradient_tol = problem.tol.gradient_tol;
    opts.max_iterations = problem.tol.max_iterations;

    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        const auto targets = D.D_N.row(static_cast<Eigen::Index>(i));
        Eigen::VectorXd z0 =
            problem.X0.points.X.row(l + static_cast<Eigen::Index>(i)).tail(d).transpose();
        auto objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
            const double x1 = std::sqrt(1.0 + z.squaredNorm());
            grad.setZero(z.size());
            double total = 0.0;
            for (Eigen::Index j = 0; j < l; ++j) {
                const auto y = landmark_coords.row(j);
                const double u = x1 * y(0) - z.dot(y.tail(d));
                const double r = targets(j) - hyper_dist_from_product(u, sk);
                total += r * r;
                const double coeff = -2.0 * r * dist_derivative(u, sk);
                grad += coeff * (y(0) / x1 * z - y.tail(d).transpose());
            }
            return total;
        };
        LbfgsResult res = lbfgs_minimize(objective, z0, opts);
        if (!res.converged) failures.fetch_add(1, std::memory_order_relaxed);
        out.row(static_cast<Eigen::Index>(i)).tail(d) = res.x.transpose();
        out(static_cast<Eigen::Index>(i), 0) = std::sqrt(1.0 + res.x.squaredNorm());
    });
    if (nonconverged) *nonconverged = failures.load();
    return out;
}

RefinedResult lhydra_plus(const DistanceBlocks& D, int d, const std::vector<double>& grid,
                          StressTolerances tol) {
    auto [initial, table] = embed::optimize_curvature(D, d, grid);
    const Curvature kappa(initial.kappa);

    RefinedResult refined;
    refined.curvature_table = std::move(table);
    refined.stress_before = stress_value(initial.points, D, kappa);

    StressProblem problem;
    problem.D = &D;
    problem.kappa = kappa;
    problem.X0 = initial;
    problem.tol = tol;

    EmbeddingResult result = initial;
    result.points.X.topRows(D.landmark_count()) =
        minimize_landmark_stress(problem, &refined.landmark_log, &refined.landmark_converged);
    if (D.nonlandmark_count() > 0) {
        result.points.X.bottomRows(D.nonlandmark_count()) = minimize_nonlandmark_stress(
            problem, result.points.X.topRows(D.landmark_count()), &refined.nonconverged_points);
    }
    result.points.on_hyperboloid = true;
    result.projected = true;

    refined.stress_after = stress_value(result.points, D, kappa);
    refined.result = std::move(result);
    return refined;
}

} // namespace lhydra::stress
