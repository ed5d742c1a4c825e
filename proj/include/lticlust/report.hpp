#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lticlust/sweep.hpp"

namespace lticlust {

inline constexpr const char* kCsvHeader =
    "trial,K,N,T,L1,L2,width,clustering_accuracy,avg_markov_error,avg_realization_error,"
    "kmeans_sse,min_sv_U,runtime_ms,error_flag";

/// Floats are written with 17 significant digits.
std::string format_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Linear-interpolated quantile (q in [0, 1]) of the non-NaN values.
double quantile(std::vector<double> values, double q);

struct CellSummary {
    double width = 0.0;
    int N = 0;
    Index T = 0;
    int trials = 0;
    int failures = 0;
    double median_error = 0.0;
    double q25_error = 0.0;
    double q75_error = 0.0;
    double median_accuracy = 0.0;
};

/// Per-(width, N, T) summaries of avg_markov_error, failed trials excluded.
std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows);

/// Writes error_vs_T_w<i>.svg (median with 25-75 percentile band, one curve
/// per N) and error_heatmap_w<i>.svg (median error over N x T) for each
/// width, plus summary.csv. Returns the written paths.
std::vector<std::filesystem::path> emit_plots(const std::vector<ResultRow>& rows,
                                              const std::filesystem::path& dir);

}  // namespace lticlust
