#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "lhydra/eval.hpp"
#include "lhydra/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lhydra;

namespace {

struct RunConfig {
    std::string input;
    std::string method = "lhydra";
    int dim = 2;
    int landmarks = 100;
    std::string kappa_grid = "0.125:8:16";
    std::uint64_t seed_landmark = 1;
    std::uint64_t seed_validation = 2;
    std::uint64_t seed_synth = 3;
    std::size_t validation_count = 100000;
    std::string output = ".";
    bool cache = false;
    bool force_landmarks = false;
    bool quiet = false;

    json to_json() const {
        return json{{"input", input},
                    {"method", method},
                    {"dim", dim},
                    {"landmarks", landmarks},
                    {"kappa_grid", kappa_grid},
                    {"seed_landmark", seed_landmark},
                    {"seed_validation", seed_validation},
                    {"seed_synth", seed_synth},
                    {"validation_count", validation_count},
                    {"cache", cache}};
    }
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for hashing");
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (in.eof()) break;
    }
    return h;
}

std::vector<double> parse_kappa_grid(const std::string& spec) {
    // "min:max:count", log-spaced
    double lo, hi;
    int count;
    char c1, c2;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || lo <= 0.0 ||
        hi < lo || count < 1)
        throw UsageError("bad --kappa-grid spec '" + spec + "', expected min:max:count");
    std::vector<double> grid;
    if (count == 1) return {lo};
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        grid.push_back(std::exp(llo + (lhi - llo) * i / (count - 1)));
    return grid;
}

std::vector<int> parse_dims(const std::string& spec) {
    // "a:b" inclusive range or comma list
    std::vector<int> dims;
    if (spec.find(':') != std::string::npos) {
        int a, b;
        char c;
        std::istringstream ss(spec);
        if (!(ss >> a >> c >> b) || c != ':' || a < 1 || b < a)
            throw UsageError("bad --dims spec '" + spec + "'");
        for (int d = a; d <= b; ++d) dims.push_back(d);
    } else {
        std::istringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) dims.push_back(std::stoi(tok));
    }
    if (dims.empty()) throw UsageError("empty --dims spec");
    return dims;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
}

void say(const RunConfig& cfg, const std::string& msg) {
    if (!cfg.quiet) std::cout << msg << "\n";
}

void check_landmark_count(const RunConfig& cfg, int max_dim) {
    if (cfg.landmarks < max_dim + 2 && !cfg.force_landmarks)
        throw UsageError("need at least d+2 = " + std::to_string(max_dim + 2) +
                         " landmarks for d = " + std::to_string(max_dim) +
                         " (use --force-landmarks to override)");
}

struct LoadedInput {
    Graph graph;
    LandmarkSet landmarks;
    DistanceBlocks blocks;
    std::uint64_t input_hash = 0;
    double distance_ms = 0.0;
};

LoadedInput load_and_blocks(const RunConfig& cfg) {
    LoadedInput in;
    in.input_hash = fnv1a_file(cfg.input);

    Graph g = graph::load_edge_list_file(cfg.input);
    if (graph::component_count(g) > 1) {
        Graph reduced = graph::largest_connected_component(g);
        if (!cfg.quiet)
            std::cerr << "warning: input has multiple components; keeping the largest ("
                      << reduced.node_count() << " of " << g.node_count() << " nodes)\n";
        g = std::move(reduced);
    }
    in.landmarks = graph::select_landmarks(g, cfg.landmarks, cfg.seed_landmark);

    fs::path cache_path = fs::path(cfg.output) /
                          ("blocks_" + std::to_string(in.input_hash) + "_l" +
                           std::to_string(cfg.landmarks) + "_s" +
                           std::to_string(cfg.seed_landmark) + ".bin");
    auto start = Clock::now();
    if (cfg.cache && fs::exists(cache_path)) {
        std::ifstream f(cache_path, std::ios::binary);
        in.blocks = graph::read_blocks(f);
    } else {
        in.blocks = graph::landmark_distance_blocks(g, in.landmarks);
        if (cfg.cache) {
            std::ofstream f(cache_path, std::ios::binary);
            graph::write_blocks(f, in.blocks);
        }
    }
    in.distance_ms = ms_since(start);
    in.graph = std::move(g);
    return in;
}

json sidecar_json(const RunConfig& cfg, const EmbeddingResult& res, const LoadedInput& in,
                  double embed_ms) {
    json side{{"schema_version", 1},
              {"kappa", res.kappa},
              {"dim", res.dim},
              {"l", res.landmark_count},
              {"m", res.points.X.rows() - res.landmark_count},
              {"eigenvalues_used", res.eigenvalues_used},
              {"strain_residual", res.strain_residual},
              {"projected", res.projected},
              {"seed", cfg.seed_landmark},
              {"wall_times_ms", {{"distance", in.distance_ms}, {"embedding", embed_ms}}},
              {"input_hash", in.input_hash},
              {"config", cfg.to_json()}};
    json ids = json::array();
    for (std::int32_t v : in.landmarks.indices) ids.push_back(in.graph.node_ids[v]);
    side["landmark_ids"] = ids;
    return side;
}

int cmd_embed(const RunConfig& cfg) {
    check_landmark_count(cfg, cfg.dim);
    fs::create_directories(cfg.output);
    LoadedInput in = load_and_blocks(cfg);
    const std::vector<double> grid = parse_kappa_grid(cfg.kappa_grid);

    auto start = Clock::now();
    EmbeddingResult result;
    RefinedResult refined;
    const bool plus = cfg.method == "lhydra-plus";
    if (plus) {
        refined = stress::lhydra_plus(in.blocks, cfg.dim, grid);
        result = refined.result;
    } else {
        result = embed::optimize_curvature(in.blocks, cfg.dim, grid).first;
    }
    const double embed_ms = ms_since(start);

    std::size_t max_pairs =
        static_cast<std::size_t>(in.blocks.nonlandmark_count()) *
        (in.blocks.nonlandmark_count() > 0 ? in.blocks.nonlandmark_count() - 1 : 0) / 2;
    std::size_t vcount = std::min(cfg.validation_count, max_pairs);
    std::vector<eval::RowPair> validation;
    if (vcount > 0) {
        auto pairs = graph::sample_validation_pairs(in.graph, in.landmarks, vcount,
                                                    cfg.seed_validation);
        validation = eval::to_row_pairs(pairs, graph::embedding_rows(in.graph.node_count(),
                                                                     in.landmarks));
    }
    ErrorReport report = eval::evaluate(result, in.blocks, validation);
    report.distance_stage_ms = in.distance_ms;
    report.embed_stage_ms = embed_ms;

    std::ostringstream coords;
    geometry::write_points_csv(coords, result.points);
    write_text(fs::path(cfg.output) / "coords.csv", coords.str());

    json side = sidecar_json(cfg, result, in, embed_ms);
    if (plus) {
        side["stress_before"] = refined.stress_before;
        side["stress_after"] = refined.stress_after;
        std::ostringstream log;
        log << "iteration,stress,gradient_norm\n";
        log.precision(17);
        for (const auto& rec : refined.landmark_log)
            log << rec.iteration << ',' << rec.stress << ',' << rec.gradient_norm << '\n';
        write_text(fs::path(cfg.output) / "landmark_stage_log.csv", log.str());
    }
    write_text(fs::path(cfg.output) / "embedding.json", side.dump(2));

    json rj = json::parse(eval::report_to_json(report));
    rj["config"] = cfg.to_json();
    rj["input_hash"] = in.input_hash;
    fs::path report_path = fs::path(cfg.output) / "report.json";
    write_text(report_path, rj.dump(2));

    say(cfg, "distance stage: " + std::to_string(in.distance_ms) + " ms");
    say(cfg, "embedding stage: " + std::to_string(embed_ms) + " ms");
    say(cfg, "kappa = " + std::to_string(result.kappa) +
                 ", landmark REE = " + std::to_string(report.landmark.ree));
    std::cout << report_path.string() << "\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& coords_path,
             const std::string& sidecar_path) {
    fs::create_directories(cfg.output);
    std::ifstream side_in(sidecar_path);
    if (!side_in) throw IoError("cannot open sidecar '" + sidecar_path + "'");
    json side = json::parse(side_in);

    Graph g = graph::load_edge_list_file(cfg.input);
    if (graph::component_count(g) > 1) g = graph::largest_connected_component(g);

    // recover the landmark set from the recorded external ids
    LandmarkSet lm;
    for (std::int64_t id : side.at("landmark_ids")) {
        auto it = std::find(g.node_ids.begin(), g.node_ids.end(), id);
        if (it == g.node_ids.end())
            throw UsageError("landmark id " + std::to_string(id) + " not present in the graph");
        lm.indices.push_back(static_cast<std::int32_t>(it - g.node_ids.begin()));
    }

    DistanceBlocks blocks = graph::landmark_distance_blocks(g, lm);
    std::ifstream coords_in(coords_path);
    if (!coords_in) throw IoError("cannot open coords '" + coords_path + "'");

    EmbeddingResult res;
    res.points = geometry::read_points_csv(coords_in);
    res.points.on_hyperboloid = true;
    res.projected = true;
    res.dim = res.points.dim;
    res.kappa = side.at("kappa").get<double>();
    res.landmark_count = lm.count();

    std::size_t max_pairs = static_cast<std::size_t>(blocks.nonlandmark_count()) *
                            (blocks.nonlandmark_count() - 1) / 2;
    std::size_t vcount = std::min(cfg.validation_count, max_pairs);
    std::vector<eval::RowPair> validation;
    if (vcount > 0) {
        auto pairs = graph::sample_validation_pairs(g, lm, vcount, cfg.seed_validation);
        validation = eval::to_row_pairs(pairs, graph::embedding_rows(g.node_count(), lm));
    }
    ErrorReport report = eval::evaluate(res, blocks, validation);

    json rj = json::parse(eval::report_to_json(report));
    rj["config"] = cfg.to_json();
    rj["input_hash"] = fnv1a_file(cfg.input);
    fs::path report_path = fs::path(cfg.output) / "report.json";
    write_text(report_path, rj.dump(2));
    std::cout << report_path.string() << "\n";
    return 0;
}

int cmd_synth(const RunConfig& cfg, int n, double radius, double noise) {
    if (n < cfg.dim + 2) throw UsageError("synth: need n >= d+2");
    check_landmark_count(cfg, cfg.dim);
    fs::create_directories(cfg.output);

    PointConfiguration points =
        geometry::random_hyperbolic_points(n, cfg.dim, radius, cfg.seed_synth);
    DistanceBlocks blocks = synth::exact_blocks(points, cfg.landmarks, Curvature(1.0));
    if (noise > 0.0) synth::perturb_blocks(blocks, noise, cfg.seed_synth + 1);

    std::ostringstream coords;
    geometry::write_points_csv(coords, points);
    write_text(fs::path(cfg.output) / "points.csv", coords.str());
    {
        std::ofstream f(fs::path(cfg.output) / "blocks.bin", std::ios::binary);
        graph::write_blocks(f, blocks);
    }
    json meta{{"schema_version", 1}, {"n", n},         {"dim", cfg.dim},
              {"radius", radius},   {"noise", noise},  {"landmarks", cfg.landmarks},
              {"kappa", 1.0},       {"config", cfg.to_json()}};
    write_text(fs::path(cfg.output) / "synth.json", meta.dump(2));
    std::cout << (fs::path(cfg.output) / "blocks.bin").string() << "\n";
    return 0;
}

int cmd_bench(const RunConfig& cfg, const std::vector<std::size_t>& sizes, bool with_plus) {
    if (sizes.size() < 3) throw UsageError("bench: need at least 3 sizes");
    if (!std::is_sorted(sizes.begin(), sizes.end()))
        throw UsageError("bench: sizes must be ascending");
    fs::create_directories(cfg.output);

    std::vector<double> ns, dist_times, embed_times, plus_times;
    json raw = json::array();
    for (std::size_t n : sizes) {
        auto t0 = Clock::now();
        PointConfiguration points = geometry::random_hyperbolic_points(
            static_cast<int>(n), cfg.dim, 2.0, cfg.seed_synth);
        DistanceBlocks blocks = synth::exact_blocks(points, cfg.landmarks, Curvature(1.0));
        const double dist_ms = ms_since(t0);

        // best of three to tame timer noise at small n
        double embed_ms = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < 3; ++rep) {
            auto t1 = Clock::now();
            embed::lhydra(blocks, cfg.dim, Curvature(1.0), true);
            embed_ms = std::min(embed_ms, ms_since(t1));
        }
        double plus_ms = 0.0;
        if (with_plus) {
            auto t2 = Clock::now();
            stress::lhydra_plus(blocks, cfg.dim, {1.0});
            plus_ms = ms_since(t2);
            plus_times.push_back(plus_ms);
        }
        ns.push_back(static_cast<double>(n));
        dist_times.push_back(dist_ms);
        embed_times.push_back(embed_ms);
        raw.push_back(json{{"n", n},
                           {"distance_ms", dist_ms},
                           {"embed_ms", embed_ms},
                           {"plus_ms", with_plus ? json(plus_ms) : json(nullptr)}});
        say(cfg, "n=" + std::to_string(n) + " distance " + std::to_string(dist_ms) +
                     " ms, embed " + std::to_string(embed_ms) + " ms");
    }

    json out{{"schema_version", 1},
             {"config", cfg.to_json()},
             {"raw", raw},
             {"slopes",
              {{"distance", eval::fit_loglog_slope(ns, dist_times)},
               {"lhydra_embed", eval::fit_loglog_slope(ns, embed_times)}}}};
    if (with_plus) out["slopes"]["lhydra_plus_embed"] = eval::fit_loglog_slope(ns, plus_times);
    fs::path path = fs::path(cfg.output) / "bench.json";
    write_text(path, out.dump(2));
    std::cout << path.string() << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& dims_spec) {
    std::vector<int> dims = parse_dims(dims_spec);
    check_landmark_count(cfg, *std::max_element(dims.begin(), dims.end()));
    fs::create_directories(cfg.output);
    LoadedInput in = load_and_blocks(cfg);

    std::size_t max_pairs = static_cast<std::size_t>(in.blocks.nonlandmark_count()) *
                            (in.blocks.nonlandmark_count() - 1) / 2;
    std::size_t vcount = std::min(cfg.validation_count, max_pairs);
    std::vector<eval::RowPair> validation;
    if (vcount > 0) {
        auto pairs = graph::sample_validation_pairs(in.graph, in.landmarks, vcount,
                                                    cfg.seed_validation);
        validation = eval::to_row_pairs(pairs, graph::embedding_rows(in.graph.node_count(),
                                                                     in.landmarks));
    }

    SweepConfig sweep;
    sweep.method = cfg.method == "lhydra-plus" ? Method::LHydraPlus : Method::LHydra;
    sweep.curvature_grid = parse_kappa_grid(cfg.kappa_grid);
    auto rows = eval::sweep_dimensions(in.blocks, validation, sweep, dims);

    fs::path path = fs::path(cfg.output) / "sweep.csv";
    write_text(path, eval::sweep_to_csv(rows));
    json meta{{"config", cfg.to_json()}, {"input_hash", in.input_hash}, {"dims", dims}};
    write_text(fs::path(cfg.output) / "sweep.json", meta.dump(2));
    std::cout << path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"L-hydra: strain-minimizing hyperbolic network embedding with landmarks"};
    app.require_subcommand(1);

    RunConfig cfg;
    int synth_n = 500;
    double synth_radius = 2.0, synth_noise = 0.0;
    std::string dims_spec = "2:10";
    std::string coords_path, sidecar_path;
    std::vector<std::size_t> bench_sizes;
    bool bench_plus = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output", cfg.output, "Output directory");
        sub->add_flag("--quiet", cfg.quiet, "Print only the final artifact path");
        sub->add_option("--landmarks", cfg.landmarks, "Number of landmarks l");
        sub->add_flag("--force-landmarks", cfg.force_landmarks, "Allow l < d+2");
        sub->add_option("--dim", cfg.dim, "Embedding dimension d");
        sub->add_option("--kappa-grid", cfg.kappa_grid, "Curvature grid min:max:count");
        sub->add_option("--seed-landmark", cfg.seed_landmark, "Landmark sampling seed");
        sub->add_option("--seed-validation", cfg.seed_validation, "Validation sampling seed");
        sub->add_option("--seed-synth", cfg.seed_synth, "Synthetic data seed");
        sub->add_option("--validation-count", cfg.validation_count, "Validation pair count");
    };

    CLI::App* embed_cmd = app.add_subcommand("embed", "Embed an edge-list graph");
    embed_cmd->add_option("--input", cfg.input, "Edge list (plain or gzip)")->required();
    embed_cmd->add_option("--method", cfg.method, "lhydra or lhydra-plus")
        ->check(CLI::IsMember({"lhydra", "lhydra-plus"}));
    embed_cmd->add_flag("--cache", cfg.cache, "Cache distance blocks on disk");
    add_common(embed_cmd);

    CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate an existing embedding");
    eval_cmd->add_option("--input", cfg.input, "Edge list")->required();
    eval_cmd->add_option("--coords", coords_path, "Coordinates CSV")->required();
    eval_cmd->add_option("--sidecar", sidecar_path, "Embedding JSON sidecar")->required();
    add_common(eval_cmd);

    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--n", synth_n, "Point count");
    synth_cmd->add_option("--radius", synth_radius, "Spacelike sampling radius");
    synth_cmd->add_option("--noise", synth_noise, "Gaussian noise sigma on distances");
    add_common(synth_cmd);

    CLI::App* bench_cmd = app.add_subcommand("bench", "Scaling benchmark on synthetic inputs");
    bench_cmd->add_option("--sizes", bench_sizes, "Ascending list of point counts")
        ->required()
        ->delimiter(',');
    bench_cmd->add_flag("--plus", bench_plus, "Also time lhydra-plus");
    add_common(bench_cmd);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Embed across a range of dimensions");
    sweep_cmd->add_option("--input", cfg.input, "Edge list")->required();
    sweep_cmd->add_option("--method", cfg.method, "lhydra or lhydra-plus")
        ->check(CLI::IsMember({"lhydra", "lhydra-plus"}));
    sweep_cmd->add_option("--dims", dims_spec, "Dimension range a:b or comma list");
    sweep_cmd->add_flag("--cache", cfg.cache, "Cache distance blocks on disk");
    add_common(sweep_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto fail_json = [&](const std::string& kind, const std::string& what) {
        json err{{"error", kind}, {"message", what}};
        std::cerr << err.dump() << "\n";
    };

    try {
        if (embed_cmd->parsed()) return cmd_embed(cfg);
        if (eval_cmd->parsed()) return cmd_eval(cfg, coords_path, sidecar_path);
        if (synth_cmd->parsed()) return cmd_synth(cfg, synth_n, synth_radius, synth_noise);
        if (bench_cmd->parsed()) return cmd_bench(cfg, bench_sizes, bench_plus);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, dims_spec);
    } catch (const UsageError& e) {
        fail_json("usage", e.what());
        return 2;
    } catch (const IoError& e) {
        fail_json("io", e.what());
        return 4;
    } catch (const AlgorithmError& e) {
        fail_json("algorithm", e.what());
        return 3;
    } catch (const std::exception& e) {
        fail_json("internal", e.what());
        return 1;
    }
    return 2;
}
