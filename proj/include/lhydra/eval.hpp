#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lhydra/embed.hpp"
#include "lhydra/graph.hpp"
#include "lhydra/stress.hpp"

namespace lhydra {

struct ErrorClassStats {
    double ree = 0.0;
    double rmse = 0.0;
    std::size_t pair_count = 0;  // ordered pairs
};

// The three-way error breakdown: landmark-landmark pairs, landmark to
// non-landmark pairs, and sampled validation pairs of non-landmarks.
struct ErrorReport {
    ErrorClassStats landmark;
    ErrorClassStats landmark_nonlandmark;
    std::optional<ErrorClassStats> validation;
    double kappa = 1.0;
    int dim = 0;
    double distance_stage_ms = 0.0;
    double embed_stage_ms = 0.0;
};

struct SweepRow {
    std::string method;
    int dim = 0;
    std::string error_class;
    double value = 0.0;
    std::string status;  // "ok" or the error message
};

enum class Method { LHydra, LHydraPlus };

struct SweepConfig {
    Method method = Method::LHydra;
    std::vector<double> curvature_grid;
    StressTolerances tol;
};

namespace eval {

// Validation pairs carry embedding-row indices here (see
// graph::embedding_rows), not raw node indices.
struct RowPair {
    Eigen::Index u, v;
    double distance;
};

std::vector<RowPair> to_row_pairs(const std::vector<ValidationPair>& pairs,
                                  const std::vector<std::int32_t>& rows);

ErrorReport evaluate(const EmbeddingResult& X, const DistanceBlocks& D,
                     const std::vector<RowPair>& validation);

// Runs the chosen method once per dimension on shared distance blocks and
// returns a long-format table; per-dimension failures become error rows.
std::vector<SweepRow> sweep_dimensions(const DistanceBlocks& D,
                                       const std::vector<RowPair>& validation,
                                       const SweepConfig& config, const std::vector<int>& dims);

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

std::string report_to_json(const ErrorReport& report);
ErrorReport report_from_json(const std::string& text);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

} // namespace eval
} // namespace lhydra
