#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lhydra/errors.hpp"

namespace lhydra {

// Immutable undirected graph in compressed adjacency form. Internal node
// indices are dense 0..n-1; node_ids keeps the original external labels.
struct Graph {
    std::vector<std::size_t> offsets;     // size n+1
    std::vector<std::int32_t> neighbors;  // both directions of every edge
    std::vector<std::int64_t> node_ids;

    std::int32_t node_count() const { return static_cast<std::int32_t>(node_ids.size()); }
    std::size_t edge_count() const { return neighbors.size() / 2; }
    std::size_t degree(std::int32_t v) const { return offsets[v + 1] - offsets[v]; }
};

struct LandmarkSet {
    std::vector<std::int32_t> indices;  // distinct internal node indices, in draw order
    std::uint64_t seed = 0;

    std::int32_t count() const { return static_cast<std::int32_t>(indices.size()); }
};

// Known dissimilarity blocks: D_L between landmarks (l x l, symmetric, zero
// diagonal) and D_N between non-landmarks and landmarks (m x l). Column order
// follows the landmark set.
struct DistanceBlocks {
    Eigen::MatrixXd D_L;
    Eigen::MatrixXd D_N;

    Eigen::Index landmark_count() const { return D_L.rows(); }
    Eigen::Index nonlandmark_count() const { return D_N.rows(); }
};

struct ValidationPair {
    std::int32_t u, v;  // internal node indices, both non-landmarks
    double distance;
};

namespace graph {

// Parses whitespace-separated integer pairs; '#' comment lines allowed.
// Duplicate and reversed edges collapse to one undirected edge; self-loops
// are dropped. External IDs map to dense indices in order of first appearance.
Graph load_edge_list(std::istream& in);

// File loader; transparently inflates gzip input.
Graph load_edge_list_file(const std::string& path);

// Induced subgraph on the largest component, ties broken toward the
// component containing the smallest internal index.
Graph largest_connected_component(const Graph& g);
std::size_t component_count(const Graph& g);

// Sequential degree-proportional sampling without replacement: at each step a
// node is drawn with probability degree / sum of remaining degrees.
LandmarkSet select_landmarks(const Graph& g, std::int32_t l, std::uint64_t seed);

// Unweighted single-source shortest paths (level-synchronous BFS).
// Unreachable nodes get -1.
std::vector<std::int32_t> bfs_distances(const Graph& g, std::int32_t source);

std::uint64_t bfs_invocation_count();
void reset_bfs_invocation_count();

// One BFS per landmark; landmark rows/columns gathered into D_L, the rest
// into D_N (non-landmarks in ascending internal order).
DistanceBlocks landmark_distance_blocks(const Graph& g, const LandmarkSet& landmarks);

// Uniformly sampled distinct unordered pairs of non-landmark nodes with their
// true BFS distances (one BFS per distinct source node).
std::vector<ValidationPair> sample_validation_pairs(const Graph& g, const LandmarkSet& landmarks,
                                                    std::size_t count, std::uint64_t seed);

// Row index of each node in the embedding matrix: landmarks first (in
// landmark order), then non-landmarks ascending.
std::vector<std::int32_t> embedding_rows(std::int32_t n, const LandmarkSet& landmarks);

// Binary cache: magic "LHYD", version u16, l and m as u64 LE, row-major f64.
void write_blocks(std::ostream& out, const DistanceBlocks& blocks);
DistanceBlocks read_blocks(std::istream& in);

} // namespace graph
} // namespace lhydra
