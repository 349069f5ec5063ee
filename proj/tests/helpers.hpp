#pragma once

// Test-only utilities: independent oracles and generators. Nothing in here
// may call into the code paths it is used to check.

#include <Eigen/Dense>
#include <Eigen/QR>

#include <random>
#include <sstream>
#include <vector>

#include "lhydra/graph.hpp"

namespace testutil {

// Positive Lorentz matrix: boost in the (1,2)-plane composed with a random
// spacelike orthogonal rotation. Satisfies T^T J T = J with T(0,0) > 0.
inline Eigen::MatrixXd random_lorentz_matrix(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);

    Eigen::MatrixXd boost = Eigen::MatrixXd::Identity(d + 1, d + 1);
    const double t = unif(rng);
    boost(0, 0) = std::cosh(t);
    boost(0, 1) = boost(1, 0) = std::sinh(t);
    boost(1, 1) = std::cosh(t);

    Eigen::MatrixXd raw(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) raw(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d + 1, d + 1);
    rot.bottomRightCorner(d, d) = qr.householderQ();

    return rot * boost;
}

// Full all-pairs shortest paths; the independent oracle for BFS-based
// distance assembly. Only for small n.
inline Eigen::MatrixXd floyd_warshall(const lhydra::Graph& g) {
    const int n = g.node_count();
    const double inf = 1e18;
    Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, inf);
    for (int v = 0; v < n; ++v) {
        dist(v, v) = 0.0;
        for (std::size_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i)
            dist(v, g.neighbors[i]) = 1.0;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (dist(i, k) + dist(k, j) < dist(i, j)) dist(i, j) = dist(i, k) + dist(k, j);
    return dist;
}

// Random connected graph: a random spanning tree plus extra random edges.
inline lhydra::Graph random_connected_graph(int n, int extra_edges, std::mt19937_64& rng) {
    std::ostringstream edges;
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> parent(0, v - 1);
        edges << parent(rng) << ' ' << v << '\n';
    }
    for (int e = 0; e < extra_edges; ++e) {
        int a = pick(rng), b = pick(rng);
        if (a != b) edges << a << ' ' << b << '\n';
    }
    std::istringstream in(edges.str());
    return lhydra::graph::load_edge_list(in);
}

} // namespace testutil
