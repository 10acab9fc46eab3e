#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crowdcheck/panel.hpp"
#include "crowdcheck/rng.hpp"

namespace crowdcheck {

// --- unbiased Gaussian null -------------------------------------------

struct UnbiasedPanelConfig {
    double truth = 0.0;
    double delta = 1.0; // variance of the estimates, > 0
    std::size_t n = 2;
    std::uint64_t seed = 0;
};

// n independent draws from Normal(truth, delta). Under this model the
// crowd has no bias and delta is the expected panel diversity.
std::vector<double> sample_unbiased_values(double truth, double delta, std::size_t n,
                                           Rng& rng);

// One synthetic experiment drawn from the unbiased null.
Experiment sample_unbiased_panel(const UnbiasedPanelConfig& config);

struct ReplicationResult {
    Dataset dataset;
    std::vector<DropRecord> skipped; // originals with zero diversity
    // (experiment id, delta used by the generator); consumers that test
    // the null against known variance read this instead of re-estimating
    // delta from the replicated panel.
    std::vector<std::pair<std::string, double>> generator_deltas;
};

// Redraws every panel of `original` from the unbiased null, keeping its
// realized value, size, and identity but replacing the estimates with
// Normal(truth, delta_hat) draws, where delta_hat is the original panel's
// diversity. Each experiment consumes a stream derived from its id, so
// the replica does not depend on dataset order.
ReplicationResult replicate_dataset_unbiased(const Dataset& original, std::uint64_t seed);

struct UnbiasedEnsembleConfig {
    double truth = 100.0;
    double delta = 25.0;
    std::size_t n_min = 9;
    std::size_t n_max = 87; // inclusive; n_min == n_max fixes the size
};

ReplicationResult unbiased_ensemble(const UnbiasedEnsembleConfig& config,
                                    std::size_t n_panels, std::uint64_t seed);

// --- augmented quincunx -------------------------------------------------

// Shared environment for one quincunx experiment: individuals start from
// anchor g_hat and weigh the same cue magnitudes, each with probability
// p_cue of the correct sign. The realized value weighs every cue
// correctly: truth = g_hat + sum(cues).
struct QuincunxParams {
    double g_hat = 1000.0;
    std::vector<double> cues;
    double p_cue = 0.7;
    std::uint64_t seed = 0;
};

double quincunx_truth(const QuincunxParams& params);

std::vector<double> sample_quincunx_values(const QuincunxParams& params, std::size_t n,
                                           Rng& rng);

// One synthetic experiment; the truth comes from quincunx_truth.
Experiment sample_quincunx_panel(const QuincunxParams& params, std::size_t n);

struct QuincunxEnsembleConfig {
    double g_hat = 1000.0;
    std::size_t n_cues = 10;
    double cue_min = -50.0;
    double cue_max = 50.0;
    double p_cue = 0.7;
    // Recenter each experiment's cues to sum to zero, putting the truth
    // at the anchor. With p_cue == 0.5 this is the unbiased limit.
    bool zero_sum_cues = false;
};

// n_experiments independent experiments, each with freshly drawn cue
// magnitudes uniform on [cue_min, cue_max] and a panel of n_per
// estimates.
Dataset quincunx_ensemble(const QuincunxEnsembleConfig& config, std::size_t n_experiments,
                          std::size_t n_per, std::uint64_t seed);

} // namespace crowdcheck
