#include "lhydra/graph.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lhydra/parallel.hpp"

namespace lhydra::graph {

namespace {

std::atomic<std::uint64_t> g_bfs_count{0};

Graph build_from_edges(std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
                       std::vector<std::int64_t> node_ids) {
    const std::int32_t n = static_cast<std::int32_t>(node_ids.size());
    if (n == 0) throw IoError("edge list: empty graph");

    // symmetrize, dedupe
    for (auto& e : edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.node_ids = std::move(node_ids);
    g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : edges) {
        ++g.offsets[e.first + 1];
        ++g.offsets[e.second + 1];
    }
    for (std::int32_t v = 0; v < n; ++v) g.offsets[v + 1] += g.offsets[v];
    g.neighbors.resize(edges.size() * 2);
    std::vector<std::size_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (const auto& e : edges) {
        g.neighbors[cursor[e.first]++] = e.second;
        g.neighbors[cursor[e.second]++] = e.first;
    }
    for (std::int32_t v = 0; v < n; ++v)
        std::sort(g.neighbors.begin() + static_cast<std::ptrdiff_t>(g.offsets[v]),
                  g.neighbors.begin() + static_cast<std::ptrdiff_t>(g.offsets[v + 1]));
    return g;
}

} // namespace

std::uint64_t bfs_invocation_count() { return g_bfs_count.load(); }
void reset_bfs_invocation_count() { g_bfs_count.store(0); }

Graph load_edge_list(std::istream& in) {
    std::unordered_map<std::int64_t, std::int32_t> index;
    std::vector<std::int64_t> node_ids;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;

    auto intern = [&](std::int64_t id) {
        auto [it, inserted] = index.emplace(id, static_cast<std::int32_t>(node_ids.size()));
        if (inserted) node_ids.push_back(id);
        return it->second;
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::int64_t a, b;
        std::istringstream ss(line);
        if (!(ss >> a >> b))
            throw IoError("edge list: malformed line " + std::to_string(lineno) + ": '" + line + "'");
        std::string rest;
        if (ss >> rest)
            throw IoError("edge list: malformed line " + std::to_string(lineno) + ": trailing '" + rest + "'");
        if (a == b) continue;  // self-loop
        const std::int32_t ia = intern(a);
        const std::int32_t ib = intern(b);
        edges.emplace_back(ia, ib);
    }
    return build_from_edges(edges, std::move(node_ids));
}

Graph load_edge_list_file(const std::string& path) {
    // gzread handles both gzip and plain text
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open '" + path + "'");
    std::string content;
    char buf[1 << 16];
    int got;
    while ((got = gzread(f, buf, sizeof(buf))) > 0) content.append(buf, static_cast<std::size_t>(got));
    bool fail = got < 0;
    gzclose(f);
    if (fail) throw IoError("error while reading '" + path + "'");
    std::istringstream in(content);
    return load_edge_list(in);
}

namespace {

// component label per node; labels are assigned in scan order, so smaller
// labels contain smaller minimum indices
std::vector<std::int32_t> component_labels(const Graph& g, std::vector<std::size_t>& sizes) {
    const std::int32_t n = g.node_count();
    std::vector<std::int32_t> label(n, -1);
    std::deque<std::int32_t> queue;
    for (std::int32_t s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        const std::int32_t c = static_cast<std::int32_t>(sizes.size());
        sizes.push_back(0);
        label[s] = c;
        queue.push_back(s);
        while (!queue.empty()) {
            std::int32_t v = queue.front();
            queue.pop_front();
            ++sizes[c];
            for (std::size_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
                std::int32_t w = g.neighbors[i];
                if (label[w] < 0) {
                    label[w] = c;
                    queue.push_back(w);
                }
            }
        }
    }
    return label;
}

} // namespace

std::size_t component_count(const Graph& g) {
    std::vector<std::size_t> sizes;
    component_labels(g, sizes);
    return sizes.size();
}

Graph largest_connected_component(const Graph& g) {
    std::vector<std::size_t> sizes;
    std::vector<std::int32_t> label = component_labels(g, sizes);
    if (sizes.size() <= 1) return g;

    std::int32_t best = 0;
    for (std::int32_t c = 1; c < static_cast<std::int32_t>(sizes.size()); ++c)
        if (sizes[c] > sizes[best]) best = c;  // strict: first max keeps smallest min index

    const std::int32_t n = g.node_count();
    std::vector<std::int32_t> remap(n, -1);
    std::vector<std::int64_t> node_ids;
    for (std::int32_t v = 0; v < n; ++v) {
        if (label[v] == best) {
            remap[v] = static_cast<std::int32_t>(node_ids.size());
            node_ids.push_back(g.node_ids[v]);
        }
    }
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    for (std::int32_t v = 0; v < n; ++v) {
        if (label[v] != best) continue;
        for (std::size_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
            std::int32_t w = g.neighbors[i];
            if (v < w) edges.emplace_back(remap[v], remap[w]);
        }
    }
    return build_from_edges(edges, std::move(node_ids));
}

LandmarkSet select_landmarks(const Graph& g, std::int32_t l, std::uint64_t seed) {
    const std::int32_t n = g.node_count();
    if (l < 1 || l > n) throw UsageError("select_landmarks: need 1 <= l <= n");

    std::vector<double> weight(n);
    double total = 0.0;
    for (std::int32_t v = 0; v < n; ++v) {
        weight[v] = static_cast<double>(g.degree(v));
        total += weight[v];
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    LandmarkSet out;
    out.seed = seed;
    out.indices.reserve(l);
    for (std::int32_t k = 0; k < l; ++k) {
        std::int32_t chosen = -1;
        if (total > 0.0) {
            double target = unif(rng) * total;
            double acc = 0.0;
            for (std::int32_t v = 0; v < n; ++v) {
                if (weight[v] <= 0.0) continue;  // taken or isolated
                acc += weight[v];
                if (acc > target) { chosen = v; break; }
            }
        }
        if (chosen < 0) {
            // all remaining weight exhausted (isolated nodes); take smallest unused
            for (std::int32_t v = 0; v < n; ++v)
                if (weight[v] >= 0.0) { chosen = v; break; }
        }
        out.indices.push_back(chosen);
        total -= weight[chosen];
        weight[chosen] = -1.0;
    }
    return out;
}

std::vector<std::int32_t> bfs_distances(const Graph& g, std::int32_t source) {
    const std::int32_t n = g.node_count();
    if (source < 0 || source >= n) throw UsageError("bfs_distances: source out of range");
    g_bfs_count.fetch_add(1, std::memory_order_relaxed);

    std::vector<std::int32_t> dist(n, -1);
    std::vector<std::int32_t> frontier{source}, next;
    dist[source] = 0;
    std::int32_t level = 0;
    while (!frontier.empty()) {
        ++level;
        next.clear();
        for (std::int32_t v : frontier) {
            for (std::size_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
                std::int32_t w = g.neighbors[i];
                if (dist[w] < 0) {
                    dist[w] = level;
                    next.push_back(w);
                }
            }
        }
        frontier.swap(next);
    }
    return dist;
}

DistanceBlocks landmark_distance_blocks(const Graph& g, const LandmarkSet& landmarks) {
    const std::int32_t n = g.node_count();
    const std::int32_t l = landmarks.count();
    const std::int32_t m = n - l;

    std::vector<bool> is_landmark(n, false);
    for (std::int32_t v : landmarks.indices) is_landmark[v] = true;

    // row index within D_N for each non-landmark (ascending internal order)
    std::vector<std::int32_t> nrow(n, -1);
    std::int32_t r = 0;
    for (std::int32_t v = 0; v < n; ++v)
        if (!is_landmark[v]) nrow[v] = r++;

    DistanceBlocks blocks;
    blocks.D_L.resize(l, l);
    blocks.D_N.resize(m, l);

    std::atomic<bool> unreachable{false};
    parallel_for(static_cast<std::size_t>(l), [&](std::size_t col) {
        std::vector<std::int32_t> dist = bfs_distances(g, landmarks.indices[col]);
        for (std::int32_t v = 0; v < n; ++v) {
            if (dist[v] < 0) { unreachable.store(true); continue; }
            if (is_landmark[v]) continue;
            blocks.D_N(nrow[v], static_cast<Eigen::Index>(col)) = dist[v];
        }
        for (std::int32_t j = 0; j < l; ++j)
            blocks.D_L(j, static_cast<Eigen::Index>(col)) = dist[landmarks.indices[j]];
    });
    if (unreachable.load())
        throw AlgorithmError("landmark_distance_blocks: graph is not connected");
    return blocks;
}

std::vector<ValidationPair> sample_validation_pairs(const Graph& g, const LandmarkSet& landmarks,
                                                    std::size_t count, std::uint64_t seed) {
    const std::int32_t n = g.node_count();
    std::vector<bool> is_landmark(n, false);
    for (std::int32_t v : landmarks.indices) is_landmark[v] = true;

    std::vector<std::int32_t> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (std::int32_t v = 0; v < n; ++v)
        if (!is_landmark[v]) pool.push_back(v);
    const std::size_t m = pool.size();
    if (m < 2) throw UsageError("sample_validation_pairs: need at least 2 non-landmark nodes");

    const double available = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
    if (static_cast<double>(count) > available)
        throw UsageError("sample_validation_pairs: count exceeds available pairs");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    std::vector<ValidationPair> pairs;
    pairs.reserve(count);
    while (pairs.size() < count) {
        std::int32_t u = pool[pick(rng)];
        std::int32_t v = pool[pick(rng)];
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
        if (!seen.insert(key).second) continue;
        pairs.push_back({u, v, 0.0});
    }

    // one BFS per distinct source
    std::unordered_map<std::int32_t, std::vector<std::size_t>> by_source;
    for (std::size_t i = 0; i < pairs.size(); ++i) by_source[pairs[i].u].push_back(i);
    std::vector<std::int32_t> sources;
    sources.reserve(by_source.size());
    for (const auto& [s, _] : by_source) sources.push_back(s);
    std::sort(sources.begin(), sources.end());

    parallel_for(sources.size(), [&](std::size_t si) {
        std::vector<std::int32_t> dist = bfs_distances(g, sources[si]);
        for (std::size_t i : by_source.at(sources[si]))
            pairs[i].distance = dist[pairs[i].v];
    });
    return pairs;
}

std::vector<std::int32_t> embedding_rows(std::int32_t n, const LandmarkSet& landmarks) {
    std::vector<std::int32_t> row(n, -1);
    std::int32_t r = 0;
    for (std::int32_t v : landmarks.indices) row[v] = r++;
    for (std::int32_t v = 0; v < n; ++v)
        if (row[v] < 0) row[v] = r++;
    return row;
}

void write_blocks(std::ostream& out, const DistanceBlocks& blocks) {
    const char magic[4] = {'L', 'H', 'Y', 'D'};
    out.write(magic, 4);
    std::uint16_t version = 1;
    std::uint64_t l = static_cast<std::uint64_t>(blocks.D_L.rows());
    std::uint64_t m = static_cast<std::uint64_t>(blocks.D_N.rows());
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&l), sizeof(l));
    out.write(reinterpret_cast<const char*>(&m), sizeof(m));
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor dl = blocks.D_L, dn = blocks.D_N;
    out.write(reinterpret_cast<const char*>(dl.data()),
              static_cast<std::streamsize>(sizeof(double) * dl.size()));
    out.write(reinterpret_cast<const char*>(dn.data()),
              static_cast<std::streamsize>(sizeof(double) * dn.size()));
    if (!out) throw IoError("write_blocks: stream failure");
}

DistanceBlocks read_blocks(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "LHYD", 4) != 0)
        throw IoError("read_blocks: bad magic bytes");
    std::uint16_t version = 0;
    std::uint64_t l = 0, m = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&l), sizeof(l));
    in.read(reinterpret_cast<char*>(&m), sizeof(m));
    if (!in || version != 1) throw IoError("read_blocks: unsupported version");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor dl(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l));
    RowMajor dn(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l));
    in.read(reinterpret_cast<char*>(dl.data()),
            static_cast<std::streamsize>(sizeof(double) * dl.size()));
    in.read(reinterpret_cast<char*>(dn.data()),
            static_cast<std::streamsize>(sizeof(double) * dn.size()));
    if (!in) throw IoError("read_blocks: truncated file");
    DistanceBlocks blocks;
    blocks.D_L = dl;
    blocks.D_N = dn;
    return blocks;
}

} // namespace lhydra::graph
