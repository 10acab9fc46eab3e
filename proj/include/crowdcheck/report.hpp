#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crowdcheck/inference.hpp"
#include "crowdcheck/panel.hpp"
#include "crowdcheck/stats.hpp"

namespace crowdcheck {

struct SummaryRow {
    std::string id;
    std::string indicator;
    int horizon = 0;
    std::string survey_period;
    SummaryStats stats;
};

// One row per experiment, in dataset order. Empty dataset -> DataError.
std::vector<SummaryRow> summarize_dataset(const Dataset& dataset);

// Fields of the summary table addressable as scatter axes.
enum class StatField {
    n,
    truth,
    mean,
    gamma,
    eps,
    delta,
    skew,
    xi,
    scaled_error_signed,
    scaled_error_abs,
    scaled_rmse,
    scaled_diversity,
    dpt_residual,
};

StatField parse_stat_field(const std::string& name);
const char* to_string(StatField f);

// Empty only for skew of a zero-diversity panel.
std::optional<double> stat_value(const SummaryStats& stats, StatField field);

struct ScatterPoint {
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

struct ScatterTable {
    std::vector<ScatterPoint> points;
    double x_mean = 0.0;
    double x_sd = 0.0; // population normalization
    double y_mean = 0.0;
    double y_sd = 0.0;
    CorrelationResult corr;
    std::vector<DropRecord> skipped; // rows dropped for undefined skew
};

// Pairs of summary fields across the dataset with their correlation.
// Rows where either field is undefined are dropped and counted; fewer
// than 3 usable pairs is an error.
ScatterTable make_scatter(const Dataset& dataset, StatField x, StatField y,
                          std::uint64_t n_perm, std::uint64_t seed,
                          CorrelationStat stat = CorrelationStat::spearman);

struct HistogramTable {
    std::vector<double> bin_edges;   // bins + 1 edges
    std::vector<double> proportions; // sum to 1
    std::vector<double> cdf;         // nondecreasing, ends at 1
    // Named evaluation points computed from the raw values, not from the
    // binned counts.
    std::vector<std::pair<std::string, double>> markers;
};

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);
HistogramTable make_histogram(const std::vector<double>& values,
                              std::vector<double> edges);

// Histogram of the beat-the-crowd fraction across experiments. When all
// experiments share one panel size N the bins are centered on the
// attainable values k/N; otherwise `bins` uniform bins on [0,1].
// Markers: cdf_at_0.5 (share of experiments with xi <= 1/2) and
// prop_at_0 (share with xi == 0).
HistogramTable xi_histogram(const Dataset& dataset, std::size_t bins);

struct BiasPValueRow {
    std::string id;
    double z = 0.0;
    double p = 0.0;
};

struct BiasHistResult {
    HistogramTable hist; // marker: cdf_at_0.05
    std::vector<BiasPValueRow> pvalues;
    std::vector<DropRecord> skipped; // zero-diversity experiments
};

// Per-experiment bias-test p-values and their histogram over [0,1].
// By default each experiment is tested against its own estimated
// diversity; null_deltas substitutes a known generator variance per id.
BiasHistResult bias_histogram(const Dataset& dataset, std::size_t bins,
                              const std::map<std::string, double>* null_deltas = nullptr);

// Histogram of relative estimates g_i / mean for one experiment.
// Markers: crowd (always 1), truth_over_mean, and the band
// [band_lo, band_hi] of relative values that beat the crowd.
HistogramTable estimates_histogram(const Dataset& dataset, const std::string& id,
                                   std::size_t bins);

// --- CSV emission ---------------------------------------------------------

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_scatter_csv(std::ostream& out, const ScatterTable& table, StatField x,
                       StatField y);
void write_histogram_csv(std::ostream& out, const HistogramTable& hist);
void write_bias_pvalues_csv(std::ostream& out, const std::vector<BiasPValueRow>& rows);
void write_drops_csv(std::ostream& out, const std::vector<DropRecord>& drops);

} // namespace crowdcheck
