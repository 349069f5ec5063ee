#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "lhydra/eval.hpp"
#include "lhydra/synth.hpp"

using namespace lhydra;
using namespace lhydra::eval;

TEST_CASE("evaluate: exact synthetic configuration") {
    PointConfiguration p = geometry::random_hyperbolic_points(40, 2, 2.0, 2);
    DistanceBlocks blocks = synth::exact_blocks(p, 6, Curvature(1.0));
    EmbeddingResult res = embed::lhydra(blocks, 2, Curvature(1.0), true);

    // validation pairs among the non-landmarks, distances from the truth
    std::vector<RowPair> validation;
    for (Eigen::Index i = 6; i < 12; ++i)
        for (Eigen::Index j = i + 1; j < 12; ++j)
            validation.push_back({i, j,
                                  geometry::hyperbolic_distance(p.X.row(i).transpose(),
                                                                p.X.row(j).transpose(), Curvature(1.0))});

    ErrorReport report = evaluate(res, blocks, validation);
    CHECK(report.landmark.ree < 1e-6);
    CHECK(report.landmark_nonlandmark.ree < 1e-6);
    REQUIRE(report.validation.has_value());
    CHECK(report.validation->ree < 1e-6);
    CHECK(report.landmark.pair_count == 6 * 5);
    CHECK(report.landmark_nonlandmark.pair_count == 2 * 6 * 34);
    CHECK(report.validation->pair_count == 2 * validation.size());
}

TEST_CASE("validation REE matches an oracle computation on a real graph") {
    std::mt19937_64 rng(83);
    Graph g = testutil::random_connected_graph(120, 100, rng);
    LandmarkSet lm = graph::select_landmarks(g, 12, 1);
    DistanceBlocks blocks = graph::landmark_distance_blocks(g, lm);
    auto pairs = graph::sample_validation_pairs(g, lm, 300, 2);
    auto rows = graph::embedding_rows(g.node_count(), lm);
    std::vector<RowPair> validation = to_row_pairs(pairs, rows);

    EmbeddingResult res = embed::optimize_curvature(blocks, 3, {0.5, 1.0, 2.0}).first;
    ErrorReport report = evaluate(res, blocks, validation);

    // oracle: recompute REE over the sampled pairs from scratch
    Eigen::MatrixXd full = testutil::floyd_warshall(g);
    double sq = 0.0, dsum = 0.0;
    for (const auto& p : pairs) {
        double dist = geometry::hyperbolic_distance(res.points.X.row(rows[p.u]).transpose(),
                                                    res.points.X.row(rows[p.v]).transpose(),
                                                    Curvature(res.kappa));
        double r = full(p.u, p.v) - dist;
        sq += 2.0 * r * r;
        dsum += 2.0 * full(p.u, p.v);
    }
    CHECK(report.validation->ree == doctest::Approx(std::sqrt(sq) / std::sqrt(dsum)).epsilon(1e-12));
}

TEST_CASE("error report JSON round trip") {
    ErrorReport report;
    report.kappa = 1.5;
    report.dim = 4;
    report.landmark = {0.125, 0.25, 90};
    report.landmark_nonlandmark = {0.3, 0.4, 1200};
    report.validation = ErrorClassStats{0.5, 0.75, 200000};
    report.distance_stage_ms = 12.5;
    report.embed_stage_ms = 3.25;

    ErrorReport back = report_from_json(report_to_json(report));
    CHECK(back.kappa == report.kappa);
    CHECK(back.dim == report.dim);
    CHECK(back.landmark.ree == report.landmark.ree);
    CHECK(back.landmark_nonlandmark.rmse == report.landmark_nonlandmark.rmse);
    REQUIRE(back.validation.has_value());
    CHECK(back.validation->pair_count == 200000);
    CHECK(back.distance_stage_ms == 12.5);

    ErrorReport no_validation;
    no_validation.landmark = {0.1, 0.2, 10};
    ErrorReport back2 = report_from_json(report_to_json(no_validation));
    CHECK(!back2.validation.has_value());
}

TEST_CASE("dimension sweep") {
    std::mt19937_64 rng(91);
    Graph g = testutil::random_connected_graph(150, 120, rng);
    LandmarkSet lm = graph::select_landmarks(g, 15, 4);

    graph::reset_bfs_invocation_count();
    DistanceBlocks blocks = graph::landmark_distance_blocks(g, lm);
    auto pairs = graph::sample_validation_pairs(g, lm, 200, 8);
    std::set<std::int32_t> sources;
    for (const auto& p : pairs) sources.insert(p.u);
    auto validation = to_row_pairs(pairs, graph::embedding_rows(g.node_count(), lm));

    SweepConfig config;
    config.method = Method::LHydra;
    config.curvature_grid = {0.5, 1.0, 2.0};
    auto rows = sweep_dimensions(blocks, validation, config, {2, 3, 4});
    CHECK(rows.size() == 9);  // three classes per dimension
    for (const auto& r : rows) CHECK(r.status == "ok");
    // blocks were computed once; the sweep itself runs no BFS
    CHECK(graph::bfs_invocation_count() == 15 + sources.size());

    // a single-dimension sweep with an impossible d records the failure
    auto bad = sweep_dimensions(blocks, validation, config, {14});
    CHECK(bad.size() == 1);
    CHECK(bad[0].error_class == "error");
    CHECK(bad[0].status != "ok");

    std::string csv = sweep_to_csv(rows);
    CHECK(csv.rfind("method,dim,error_class,value,status\n", 0) == 0);
}

TEST_CASE("REE improves with dimension on high-dimensional synthetic data") {
    PointConfiguration p = geometry::random_hyperbolic_points(200, 10, 2.0, 55);
    DistanceBlocks blocks = synth::exact_blocks(p, 20, Curvature(1.0));

    SweepConfig config;
    config.method = Method::LHydra;
    config.curvature_grid = {1.0};
    auto rows = sweep_dimensions(blocks, {}, config, {2, 10});
    REQUIRE(rows.size() == 4);
    double ree2 = rows[0].value, ree10 = rows[2].value;
    CHECK(rows[0].dim == 2);
    CHECK(rows[2].dim == 10);
    CHECK(ree10 <= ree2);
}

TEST_CASE("all-landmarks case reduces to the unlandmarked method") {
    // with l = n the landmark REE is computed over the full matrix, which is
    // exactly the unlandmarked strain solution applied to D
    PointConfiguration p = geometry::random_hyperbolic_points(30, 2, 2.0, 66);
    DistanceBlocks blocks = synth::exact_blocks(p, 30, Curvature(1.0));
    CHECK(blocks.D_N.rows() == 0);
    EmbeddingResult res = embed::lhydra(blocks, 2, Curvature(1.0), true);
    ErrorReport report = evaluate(res, blocks, {});
    CHECK(report.landmark.ree < 1e-6);
    CHECK(report.landmark_nonlandmark.pair_count == 0);
}

TEST_CASE("log-log slope fit") {
    std::vector<double> x{1e4, 3e4, 1e5, 3e5, 1e6};
    std::vector<double> y;
    for (double v : x) y.push_back(2.5e-7 * v);  // exactly linear
    CHECK(fit_loglog_slope(x, y) == doctest::Approx(1.0).epsilon(1e-6));

    std::vector<double> quad;
    for (double v : x) quad.push_back(1e-9 * v * v);
    CHECK(fit_loglog_slope(x, quad) == doctest::Approx(2.0).epsilon(1e-6));

    CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), UsageError);
}
