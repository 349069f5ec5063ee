#include "lhydra/eval.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>

#include "lhydra/geometry.hpp"

namespace lhydra::eval {

using nlohmann::json;

std::vector<RowPair> to_row_pairs(const std::vector<ValidationPair>& pairs,
                                  const std::vector<std::int32_t>& rows) {
    std::vector<RowPair> out;
    out.reserve(pairs.size());
    for (const ValidationPair& p : pairs)
        out.push_back({rows[p.u], rows[p.v], p.distance});
    return out;
}

namespace {

ErrorClassStats stats_from(double stress_sq, double dist_sum, std::size_t ordered_pairs) {
    ErrorClassStats s;
    s.pair_count = ordered_pairs;
    const double stress_val = std::sqrt(stress_sq);
    s.rmse = stress::rmse(stress_val, ordered_pairs);
    s.ree = stress::ree(stress_val, dist_sum);
    return s;
}

} // namespace

ErrorReport evaluate(const EmbeddingResult& X, const DistanceBlocks& D,
                     const std::vector<RowPair>& validation) {
    if (!X.projected) throw UsageError("evaluate: embedding must be projected onto H_d");
    const Eigen::Index l = D.landmark_count();
    const Eigen::Index m = D.nonlandmark_count();
    const Curvature kappa(X.kappa);

    ErrorReport report;
    report.kappa = X.kappa;
    report.dim = X.dim;

    auto dist = [&](Eigen::Index i, Eigen::Index j) {
        return geometry::hyperbolic_distance(X.points.X.row(i).transpose(),
                                             X.points.X.row(j).transpose(), kappa);
    };

    double ll_sq = 0.0;
    for (Eigen::Index i = 0; i < l; ++i)
        for (Eigen::Index j = i + 1; j < l; ++j) {
            double r = D.D_L(i, j) - dist(i, j);
            ll_sq += 2.0 * r * r;
        }
    report.landmark = stats_from(ll_sq, D.D_L.sum(), static_cast<std::size_t>(l) * (l - 1));

    if (m > 0) {
        double ln_sq = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < l; ++j) {
                double r = D.D_N(i, j) - dist(l + i, j);
                ln_sq += 2.0 * r * r;
            }
        report.landmark_nonlandmark =
            stats_from(ln_sq, 2.0 * D.D_N.sum(), 2 * static_cast<std::size_t>(l) * m);
    }

    if (!validation.empty()) {
        double v_sq = 0.0, v_sum = 0.0;
        for (const RowPair& p : validation) {
            double r = p.distance - dist(p.u, p.v);
            v_sq += 2.0 * r * r;
            v_sum += 2.0 * p.distance;
        }
        report.validation = stats_from(v_sq, v_sum, 2 * validation.size());
    }
    return report;
}

std::vector<SweepRow> sweep_dimensions(const DistanceBlocks& D,
                                       const std::vector<RowPair>& validation,
                                       const SweepConfig& config, const std::vector<int>& dims) {
    if (dims.empty()) throw UsageError("sweep_dimensions: empty dimension list");
    const std::vector<double> grid =
        config.curvature_grid.empty() ? embed::default_curvature_grid() : config.curvature_grid;

    std::vector<SweepRow> rows;
    const std::string method_name = config.method == Method::LHydra ? "lhydra" : "lhydra-plus";
    for (int d : dims) {
        try {
            EmbeddingResult result;
            if (config.method == Method::LHydra) {
                result = embed::optimize_curvature(D, d, grid).first;
            } else {
                result = stress::lhydra_plus(D, d, grid, config.tol).result;
            }
            ErrorReport report = evaluate(result, D, validation);
            rows.push_back({method_name, d, "landmark", report.landmark.ree, "ok"});
            rows.push_back(
                {method_name, d, "landmark-nonlandmark", report.landmark_nonlandmark.ree, "ok"});
            if (report.validation)
                rows.push_back({method_name, d, "validation", report.validation->ree, "ok"});
        } catch (const std::exception& e) {
            rows.push_back({method_name, d, "error", 0.0, e.what()});
        }
    }
    return rows;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw UsageError("fit_loglog_slope: need at least two matching samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

json stats_to_json(const ErrorClassStats& s) {
    return json{{"ree", s.ree}, {"rmse", s.rmse}, {"pair_count", s.pair_count}};
}

ErrorClassStats stats_from_json(const json& j) {
    ErrorClassStats s;
    s.ree = j.at("ree").get<double>();
    s.rmse = j.at("rmse").get<double>();
    s.pair_count = j.at("pair_count").get<std::size_t>();
    return s;
}

} // namespace

std::string report_to_json(const ErrorReport& report) {
    json j{{"schema_version", 1},
           {"kappa", report.kappa},
           {"dim", report.dim},
           {"landmark", stats_to_json(report.landmark)},
           {"landmark_nonlandmark", stats_to_json(report.landmark_nonlandmark)},
           {"distance_stage_ms", report.distance_stage_ms},
           {"embed_stage_ms", report.embed_stage_ms}};
    j["validation"] = report.validation ? stats_to_json(*report.validation) : json(nullptr);
    return j.dump(2);
}

ErrorReport report_from_json(const std::string& text) {
    json j = json::parse(text);
    ErrorReport report;
    report.kappa = j.at("kappa").get<double>();
    report.dim = j.at("dim").get<int>();
    report.landmark = stats_from_json(j.at("landmark"));
    report.landmark_nonlandmark = stats_from_json(j.at("landmark_nonlandmark"));
    if (!j.at("validation").is_null()) report.validation = stats_from_json(j.at("validation"));
    report.distance_stage_ms = j.at("distance_stage_ms").get<double>();
    report.embed_stage_ms = j.at("embed_stage_ms").get<double>();
    return report;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "method,dim,error_class,value,status\n";
    out.precision(17);
    for (const SweepRow& r : rows)
        out << r.method << ',' << r.dim << ',' << r.error_class << ',' << r.value << ','
            << r.status << '\n';
    return out.str();
}

} // namespace lhydra::eval
