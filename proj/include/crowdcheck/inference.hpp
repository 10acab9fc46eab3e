#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crowdcheck {

// Error function with absolute error below 1e-13 across the real line.
// Small arguments use the positive-term confluent series; large ones use
// the continued fraction for the complement, so neither regime cancels.
double erf(double x);
double erfc(double x);

// Mid-ranks (1-based); tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Product-moment correlation. Inputs must have equal length >= 3 and at
// least two distinct values each.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Rank correlation computed as the product-moment correlation of
// mid-ranks, which handles ties.
double spearman_rho(std::span<const double> x, std::span<const double> y);

enum class CorrelationStat { spearman, pearson };
enum class CorrelationMethod { permutation, exact_enumeration };

const char* to_string(CorrelationMethod m);
const char* to_string(CorrelationStat s);
CorrelationStat parse_correlation_stat(const std::string& name);

struct CorrelationResult {
    double rho = 0.0;
    double p_value = 0.0; // two-sided
    std::size_t n_pairs = 0;
    std::uint64_t n_perm = 0; // permutations drawn, or total enumerated
    CorrelationMethod method = CorrelationMethod::permutation;
};

// Two-sided permutation test of the correlation. When n! <= n_perm every
// arrangement is enumerated and p = count / n!; otherwise n_perm random
// shuffles are drawn and p = (count + 1) / (n_perm + 1). Each shuffle uses
// its own counter-keyed stream, so the result is independent of
// evaluation order. A permutation counts when |rho| >= |rho_obs| - 1e-12.
CorrelationResult correlation_p(std::span<const double> x, std::span<const double> y,
                                std::uint64_t n_perm = 100000, std::uint64_t seed = 0,
                                CorrelationStat stat = CorrelationStat::spearman);

struct BiasTestResult {
    double p_value = 0.0;
    double z = 0.0; // |mean - truth| / sqrt(2 delta / n)
};

// Probability that a crowd of n unbiased guessers with diversity delta
// lands at least |mean - truth| away from the realized value. The result
// is clamped away from zero so it stays usable in logs and histograms.
BiasTestResult bias_p_value(double mean, double truth, double delta, std::size_t n);

} // namespace crowdcheck
