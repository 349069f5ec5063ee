#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>

#include "lhydra/errors.hpp"

namespace lhydra {

// A point in ambient Lorentz space R^{1,d}: coords(0) is the timelike
// coordinate, coords(1..d) are spacelike.
using LorentzVector = Eigen::VectorXd;

struct Curvature {
    double kappa;

    explicit Curvature(double k) : kappa(k) {
        if (!(k > 0.0)) throw UsageError("curvature kappa must be strictly positive");
    }
};

// Rows are Lorentz vectors; on_hyperboloid marks that every row x satisfies
// |x o x - 1| <= 1e-9 with positive first coordinate.
struct PointConfiguration {
    Eigen::MatrixXd X;   // n x (d+1)
    int dim = 0;         // d
    bool on_hyperboloid = false;

    Eigen::Index size() const { return X.rows(); }
};

namespace geometry {

/// Indefinite inner product x1*y1 - sum_{k>=2} xk*yk.
double lorentz_product(const LorentzVector& x, const LorentzVector& y);

// Hyperbolic distance (1/sqrt(kappa)) * arcosh(x o y). The arcosh argument is
// clamped from below at 1; arguments below 1 - 1e-6 bump a diagnostic counter
// (the points were not on the hyperboloid).
double hyperbolic_distance(const LorentzVector& x, const LorentzVector& y, Curvature kappa);

std::uint64_t off_hyperboloid_count();
void reset_off_hyperboloid_count();

// Projection parallel to the x1-axis: the spacelike part is kept and the
// timelike coordinate recomputed as sqrt(1 + |z|^2).
LorentzVector project_to_hyperboloid(const LorentzVector& x);
void project_to_hyperboloid(PointConfiguration& points);

// n points on H_d with spacelike coordinates sampled uniformly in the
// Euclidean ball of the given radius, then lifted onto the hyperboloid.
PointConfiguration random_hyperbolic_points(int n, int d, double radius, std::uint64_t seed);

// Symmetric zero-diagonal matrix of hyperbolic distances. Parallel over rows;
// output is identical for any thread count.
Eigen::MatrixXd pairwise_distance_matrix(const PointConfiguration& points, Curvature kappa);

// CSV with header id,x1,...,x{d+1}, 17 significant digits.
void write_points_csv(std::ostream& out, const PointConfiguration& points);
PointConfiguration read_points_csv(std::istream& in);

} // namespace geometry
} // namespace lhydra
