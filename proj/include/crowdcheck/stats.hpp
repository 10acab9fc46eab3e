#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "crowdcheck/panel.hpp"

namespace crowdcheck {

// Crowd-error decomposition of one panel against the realized value:
//   gamma = truth - mean(g)            signed crowd error
//   eps   = mean((g_i - truth)^2)      mean squared individual error
//   delta = mean((g_i - mean(g))^2)    diversity, population normalization
// These satisfy gamma^2 == eps - delta up to rounding.
struct Decomposition {
    double gamma = 0.0;
    double eps = 0.0;
    double delta = 0.0;
};

struct SummaryStats {
    std::size_t n = 0;
    double truth = 0.0;
    double mean = 0.0;
    double gamma = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    std::optional<double> skew;    // empty iff delta == 0
    double xi = 0.0;               // fraction strictly beating the crowd
    double scaled_error_signed = 0.0; // gamma / truth
    double scaled_error_abs = 0.0;    // |gamma| / truth
    double scaled_rmse = 0.0;         // sqrt(eps) / truth
    double scaled_diversity = 0.0;    // sqrt(delta) / mean
    double dpt_residual = 0.0;        // gamma^2 - (eps - delta)
};

// Mean of the panel. Sums are compensated over sorted values, so the
// result is identical for any permutation of the input.
double crowd_mean(std::span<const double> values);

Decomposition diversity_decomposition(std::span<const double> values, double truth);

// Third standardized moment, population normalization. Throws
// UndefinedSkewError when the panel has zero diversity; summaries catch
// that and flag the field instead.
double skewness(std::span<const double> values);

// Fraction of individuals with |g_i - truth| strictly below the crowd's
// |mean - truth|. Ties count for the crowd.
double fraction_beating_crowd(std::span<const double> values, double truth);

// Full panel summary. Throws StatError when a scaled statistic has a
// zero denominator (truth or crowd mean).
SummaryStats summarize(std::span<const double> values, double truth);
SummaryStats summarize(const Experiment& exp);

} // namespace crowdcheck
