#include "crowdcheck/null_models.hpp"

#include <cmath>
#include <cstdio>

#include "crowdcheck/errors.hpp"
#include "crowdcheck/stats.hpp"

namespace crowdcheck {

namespace {

std::string padded_id(char prefix, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%05zu", prefix, i);
    return buf;
}

Experiment one_off_experiment(const std::string& name, double truth,
                              std::vector<double> values) {
    Experiment exp;
    exp.id = name;
    exp.indicator = name;
    exp.horizon = 0;
    exp.survey_period = "2000Q1";
    exp.truth = truth;
    for (std::size_t i = 0; i < values.size(); ++i)
        exp.estimates.push_back(Estimate{padded_id('v', i + 1), values[i]});
    return exp;
}

} // namespace

std::vector<double> sample_unbiased_values(double truth, double delta, std::size_t n,
                                           Rng& rng) {
    if (!(delta > 0.0))
        throw StatError("unbiased null needs positive diversity");
    if (n < 2)
        throw StatError("unbiased null needs at least 2 estimates");
    const double sd = std::sqrt(delta);
    std::vector<double> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) v.push_back(rng.normal(truth, sd));
    return v;
}

Experiment sample_unbiased_panel(const UnbiasedPanelConfig& config) {
    Rng rng(config.seed);
    return one_off_experiment("unbiased", config.truth,
                              sample_unbiased_values(config.truth, config.delta, config.n, rng));
}

ReplicationResult replicate_dataset_unbiased(const Dataset& original, std::uint64_t seed) {
    ReplicationResult result;
    for (const auto& exp : original.experiments) {
        const auto d = diversity_decomposition(exp.values(), exp.truth);
        if (!(d.delta > 0.0)) {
            result.skipped.push_back(
                DropRecord{exp.id, "zero diversity", exp.estimates.size()});
            continue;
        }
        Rng rng(derive_seed(seed, exp.id));
        const auto values = sample_unbiased_values(exp.truth, d.delta, exp.size(), rng);

        Experiment rep;
        rep.id = exp.id;
        rep.indicator = exp.indicator;
        rep.horizon = exp.horizon;
        rep.survey_period = exp.survey_period;
        rep.truth = exp.truth;
        for (std::size_t i = 0; i < values.size(); ++i)
            rep.estimates.push_back(Estimate{padded_id('v', i + 1), values[i]});
        result.generator_deltas.emplace_back(exp.id, d.delta);
        result.dataset.experiments.push_back(std::move(rep));
    }
    result.dataset.provenance = "replicate-unbiased";
    result.dataset.canonicalize();
    return result;
}

ReplicationResult unbiased_ensemble(const UnbiasedEnsembleConfig& config,
                                    std::size_t n_panels, std::uint64_t seed) {
    if (config.n_min < 2 || config.n_max < config.n_min)
        throw StatError("unbiased ensemble needs 2 <= n_min <= n_max");

    ReplicationResult result;
    for (std::size_t e = 0; e < n_panels; ++e) {
        // The id matches the label assembly gives the panel after a CSV
        // round trip, so nulldeltas.csv keys keep working downstream.
        const std::string survey =
            quarter_name(quarter_index("2000Q1") + static_cast<long>(e));
        const std::string id = "unbiased/h0/" + survey;
        Rng rng(derive_seed(seed, id));
        std::size_t n = config.n_min;
        if (config.n_max > config.n_min)
            n += static_cast<std::size_t>(
                rng.uniform_int(config.n_max - config.n_min + 1));
        const auto values = sample_unbiased_values(config.truth, config.delta, n, rng);

        Experiment exp;
        exp.id = id;
        exp.indicator = "unbiased";
        exp.horizon = 0;
        exp.survey_period = survey;
        exp.truth = config.truth;
        for (std::size_t i = 0; i < values.size(); ++i)
            exp.estimates.push_back(Estimate{padded_id('v', i + 1), values[i]});
        result.generator_deltas.emplace_back(id, config.delta);
        result.dataset.experiments.push_back(std::move(exp));
    }
    result.dataset.provenance = "simulate-unbiased";
    result.dataset.canonicalize();
    return result;
}

double quincunx_truth(const QuincunxParams& params) {
    double sum = params.g_hat;
    for (double c : params.cues) sum += c;
    return sum;
}

std::vector<double> sample_quincunx_values(const QuincunxParams& params, std::size_t n,
                                           Rng& rng) {
    if (!(params.p_cue >= 0.0 && params.p_cue <= 1.0))
        throw StatError("quincunx cue probability must lie in [0, 1]");
    if (n < 1)
        throw StatError("quincunx needs at least 1 estimate");

    std::vector<double> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double g = params.g_hat;
        for (double cue : params.cues)
            g += rng.bernoulli(params.p_cue) ? cue : -cue;
        v.push_back(g);
    }
    return v;
}

Experiment sample_quincunx_panel(const QuincunxParams& params, std::size_t n) {
    Rng rng(params.seed);
    return one_off_experiment("quincunx", quincunx_truth(params),
                              sample_quincunx_values(params, n, rng));
}

Dataset quincunx_ensemble(const QuincunxEnsembleConfig& config, std::size_t n_experiments,
                          std::size_t n_per, std::uint64_t seed) {
    if (n_experiments < 2)
        throw StatError("quincunx ensemble needs at least 2 experiments");
    if (config.n_cues == 0)
        throw StatError("quincunx ensemble needs at least one cue");
    if (!(config.cue_max >= config.cue_min))
        throw StatError("quincunx cue range is empty");

    Dataset dataset;
    for (std::size_t e = 0; e < n_experiments; ++e) {
        const std::string survey =
            quarter_name(quarter_index("2000Q1") + static_cast<long>(e));
        const std::string id = "quincunx/h0/" + survey;
        Rng rng(derive_seed(seed, id));

        QuincunxParams params;
        params.g_hat = config.g_hat;
        params.p_cue = config.p_cue;
        params.cues.reserve(config.n_cues);
        for (std::size_t c = 0; c < config.n_cues; ++c)
            params.cues.push_back(rng.uniform(config.cue_min, config.cue_max));
        if (config.zero_sum_cues) {
            double mean = 0.0;
            for (double c : params.cues) mean += c;
            mean /= static_cast<double>(params.cues.size());
            for (double& c : params.cues) c -= mean;
        }

        Experiment exp;
        exp.id = id;
        exp.indicator = "quincunx";
        exp.horizon = 0;
        exp.survey_period = survey;
        exp.truth = quincunx_truth(params);
        const auto values = sample_quincunx_values(params, n_per, rng);
        for (std::size_t i = 0; i < values.size(); ++i)
            exp.estimates.push_back(Estimate{padded_id('v', i + 1), values[i]});
        dataset.experiments.push_back(std::move(exp));
    }
    dataset.provenance = "simulate-quincunx";
    dataset.canonicalize();
    return dataset;
}

} // namespace crowdcheck
