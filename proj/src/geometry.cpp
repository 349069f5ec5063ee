#include "lhydra/geometry.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lhydra/parallel.hpp"

namespace lhydra::geometry {

namespace {
std::atomic<std::uint64_t> g_off_hyperboloid{0};
} // namespace

std::uint64_t off_hyperboloid_count() { return g_off_hyperboloid.load(); }
void reset_off_hyperboloid_count() { g_off_hyperboloid.store(0); }

double lorentz_product(const LorentzVector& x, const LorentzVector& y) {
    if (x.size() != y.size())
        throw UsageError("lorentz_product: dimension mismatch");
    double s = x(0) * y(0);
    for (Eigen::Index k = 1; k < x.size(); ++k) s -= x(k) * y(k);
    return s;
}

double hyperbolic_distance(const LorentzVector& x, const LorentzVector& y, Curvature kappa) {
    double p = lorentz_product(x, y);
    if (p < 1.0 - 1e-6) g_off_hyperboloid.fetch_add(1, std::memory_order_relaxed);
    if (p < 1.0) p = 1.0;
    return std::acosh(p) / std::sqrt(kappa.kappa);
}

LorentzVector project_to_hyperboloid(const LorentzVector& x) {
    LorentzVector out = x;
    out(0) = std::sqrt(1.0 + x.tail(x.size() - 1).squaredNorm());
    return out;
}

void project_to_hyperboloid(PointConfiguration& points) {
    const Eigen::Index n = points.X.rows();
    const Eigen::Index d = points.X.cols() - 1;
    for (Eigen::Index i = 0; i < n; ++i)
        points.X(i, 0) = std::sqrt(1.0 + points.X.row(i).tail(d).squaredNorm());
    points.on_hyperboloid = true;
}

PointConfiguration random_hyperbolic_points(int n, int d, double radius, std::uint64_t seed) {
    if (n < 1 || d < 1) throw UsageError("random_hyperbolic_points: need n >= 1, d >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    PointConfiguration out;
    out.dim = d;
    out.X.resize(n, d + 1);
    Eigen::VectorXd z(d);
    for (int i = 0; i < n; ++i) {
        // uniform direction times U^{1/d} gives uniform density in the ball
        for (int k = 0; k < d; ++k) z(k) = gauss(rng);
        double norm = z.norm();
        double r = radius * std::pow(unif(rng), 1.0 / d);
        if (norm > 0.0) z *= r / norm;
        out.X(i, 0) = std::sqrt(1.0 + z.squaredNorm());
        out.X.row(i).tail(d) = z.transpose();
    }
    out.on_hyperboloid = true;
    return out;
}

Eigen::MatrixXd pairwise_distance_matrix(const PointConfiguration& points, Curvature kappa) {
    const Eigen::Index n = points.X.rows();
    Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const LorentzVector xi = points.X.row(static_cast<Eigen::Index>(i)).transpose();
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(i); ++j) {
            const LorentzVector xj = points.X.row(j).transpose();
            dist(static_cast<Eigen::Index>(i), j) = hyperbolic_distance(xi, xj, kappa);
        }
    });
    // mirror the strictly lower triangle
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) dist(i, j) = dist(j, i);
    return dist;
}

void write_points_csv(std::ostream& out, const PointConfiguration& points) {
    const Eigen::Index cols = points.X.cols();
    out << "id";
    for (Eigen::Index k = 0; k < cols; ++k) out << ",x" << (k + 1);
    out << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < points.X.rows(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < cols; ++k) {
            std::snprintf(buf, sizeof(buf), ",%.17g", points.X(i, k));
            out << buf;
        }
        out << "\n";
    }
}

PointConfiguration read_points_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("points CSV: empty input");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool first = true;
        while (std::getline(ss, cell, ',')) {
            if (first) { first = false; continue; } // id column
            row.push_back(std::stod(cell));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("points CSV: ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("points CSV: no data rows");
    PointConfiguration out;
    out.dim = static_cast<int>(rows.front().size()) - 1;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), out.dim + 1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int k = 0; k <= out.dim; ++k)
            out.X(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
    return out;
}

} // namespace lhydra::geometry
