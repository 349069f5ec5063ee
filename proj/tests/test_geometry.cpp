#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "lhydra/geometry.hpp"

using namespace lhydra;
using namespace lhydra::geometry;

namespace {
LorentzVector vec(std::initializer_list<double> v) {
    LorentzVector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double c : v) x(i++) = c;
    return x;
}
} // namespace

TEST_CASE("lorentz product on fixed inputs") {
    CHECK(lorentz_product(vec({1, 0, 0}), vec({1, 0, 0})) == doctest::Approx(1.0));
    CHECK(lorentz_product(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0));
    CHECK(lorentz_product(vec({std::cosh(1.0), std::sinh(1.0)}), vec({1, 0})) ==
          doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(lorentz_product(vec({1, 0}), vec({1, 0, 0})), UsageError);
}

TEST_CASE("lorentz product is bilinear and symmetric") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 200; ++trial) {
        LorentzVector x(4), y(4), z(4);
        for (int k = 0; k < 4; ++k) { x(k) = gauss(rng); y(k) = gauss(rng); z(k) = gauss(rng); }
        double a = gauss(rng), b = gauss(rng);
        CHECK(lorentz_product(x, y) == doctest::Approx(lorentz_product(y, x)).epsilon(1e-12));
        CHECK(lorentz_product(a * x + b * z, y) ==
              doctest::Approx(a * lorentz_product(x, y) + b * lorentz_product(z, y)).epsilon(1e-10));
    }
}

TEST_CASE("hyperbolic distance basics") {
    LorentzVector apex = vec({1, 0, 0});
    CHECK(hyperbolic_distance(apex, apex, Curvature(1.0)) == doctest::Approx(0.0));

    LorentzVector x = vec({1, 0});
    LorentzVector y = vec({std::cosh(2.0), std::sinh(2.0)});
    CHECK(hyperbolic_distance(x, y, Curvature(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hyperbolic_distance(x, y, Curvature(4.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distance times sqrt(kappa) is independent of kappa") {
    std::mt19937_64 rng(11);
    PointConfiguration p = random_hyperbolic_points(2, 3, 2.0, 5);
    LorentzVector x = p.X.row(0).transpose(), y = p.X.row(1).transpose();
    double base = hyperbolic_distance(x, y, Curvature(1.0));
    std::uniform_real_distribution<double> unif(0.05, 20.0);
    for (int trial = 0; trial < 50; ++trial) {
        double k = unif(rng);
        CHECK(hyperbolic_distance(x, y, Curvature(k)) * std::sqrt(k) ==
              doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("off-hyperboloid arguments are counted, not fatal") {
    reset_off_hyperboloid_count();
    LorentzVector x = vec({0.5, 0, 0});  // far off the hyperboloid
    CHECK(hyperbolic_distance(x, x, Curvature(1.0)) == doctest::Approx(0.0));
    CHECK(off_hyperboloid_count() == 1);
    reset_off_hyperboloid_count();
}

TEST_CASE("projection to the hyperboloid") {
    LorentzVector a = project_to_hyperboloid(vec({0.3, 0, 0}));
    CHECK(a(0) == doctest::Approx(1.0));

    LorentzVector b = project_to_hyperboloid(vec({5, 3, 4}));
    CHECK(b(0) == doctest::Approx(std::sqrt(26.0)).epsilon(1e-15));
    CHECK(b(1) == 3.0);
    CHECK(b(2) == 4.0);
    CHECK(lorentz_product(b, b) == doctest::Approx(1.0).epsilon(1e-14));

    // idempotent
    LorentzVector c = project_to_hyperboloid(b);
    CHECK((c - b).norm() < 1e-15);
}

TEST_CASE("random hyperbolic points") {
    PointConfiguration apex = random_hyperbolic_points(1, 2, 0.0, 42);
    CHECK(apex.X(0, 0) == doctest::Approx(1.0));
    CHECK(apex.X(0, 1) == 0.0);
    CHECK(apex.X(0, 2) == 0.0);

    PointConfiguration p = random_hyperbolic_points(100, 3, 2.0, 42);
    for (Eigen::Index i = 0; i < p.X.rows(); ++i) {
        LorentzVector x = p.X.row(i).transpose();
        CHECK(std::abs(lorentz_product(x, x) - 1.0) < 1e-12);
        CHECK(x(0) > 0.0);
        CHECK(x.tail(3).norm() <= 2.0 + 1e-12);
    }

    PointConfiguration q = random_hyperbolic_points(100, 3, 2.0, 42);
    CHECK((p.X - q.X).norm() == 0.0);  // same seed, identical output
    PointConfiguration r = random_hyperbolic_points(100, 3, 2.0, 43);
    CHECK((p.X - r.X).norm() > 0.0);
}

TEST_CASE("pairwise distance matrix") {
    PointConfiguration single = random_hyperbolic_points(1, 2, 1.0, 1);
    CHECK(pairwise_distance_matrix(single, Curvature(1.0)).isZero());

    PointConfiguration two;
    two.dim = 1;
    two.X.resize(2, 2);
    two.X << 1, 0, std::cosh(2.0), std::sinh(2.0);
    two.on_hyperboloid = true;
    Eigen::MatrixXd d2 = pairwise_distance_matrix(two, Curvature(1.0));
    CHECK(d2(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d2(1, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d2(0, 0) == 0.0);

    PointConfiguration p = random_hyperbolic_points(25, 3, 2.0, 9);
    Eigen::MatrixXd dist = pairwise_distance_matrix(p, Curvature(1.0));
    CHECK((dist - dist.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 25; ++i)
        for (int j = 0; j < 25; ++j)
            for (int k = 0; k < 25; ++k)
                CHECK(dist(i, j) <= dist(i, k) + dist(k, j) + 1e-10);
}

TEST_CASE("lorentz transforms preserve the product and the hyperboloid") {
    std::mt19937_64 rng(23);
    PointConfiguration p = random_hyperbolic_points(10, 3, 2.0, 17);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::MatrixXd t = testutil::random_lorentz_matrix(3, rng);
        for (Eigen::Index i = 0; i < p.X.rows(); ++i) {
            LorentzVector xi = p.X.row(i).transpose();
            LorentzVector ti = t * xi;
            CHECK(std::abs(lorentz_product(ti, ti) - 1.0) < 1e-10);
            for (Eigen::Index j = 0; j < i; ++j) {
                LorentzVector tj = t * p.X.row(j).transpose();
                CHECK(lorentz_product(ti, tj) ==
                      doctest::Approx(lorentz_product(xi, p.X.row(j).transpose())).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("points CSV round trip") {
    PointConfiguration p = random_hyperbolic_points(7, 2, 1.5, 3);
    std::stringstream ss;
    write_points_csv(ss, p);
    CHECK(ss.str().rfind("id,x1,x2,x3\n", 0) == 0);
    PointConfiguration q = read_points_csv(ss);
    CHECK(q.dim == p.dim);
    CHECK((p.X - q.X).cwiseAbs().maxCoeff() == 0.0);  // 17 digits are lossless
}
