#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "crowdcheck/errors.hpp"
#include "crowdcheck/null_models.hpp"
#include "crowdcheck/rng.hpp"
#include "crowdcheck/stats.hpp"

using namespace crowdcheck;

TEST_CASE("unbiased sampler is deterministic for a fixed configuration") {
    UnbiasedPanelConfig config;
    config.truth = 100.0;
    config.delta = 25.0;
    config.n = 37;
    config.seed = 2024;
    const auto a = sample_unbiased_panel(config);
    const auto b = sample_unbiased_panel(config);
    CHECK(a.truth == 100.0);
    CHECK(a.size() == 37);
    CHECK(a.values() == b.values());

    config.seed = 2025;
    const auto c = sample_unbiased_panel(config);
    CHECK(a.values() != c.values());
}

TEST_CASE("unbiased draws match the requested moments") {
    Rng rng(11);
    const std::size_t n = 1000000;
    const auto v = sample_unbiased_values(0.0, 1.0, n, rng);
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(n);
    CHECK(std::abs(mean) <= 4e-3);        // 4 standard errors
    CHECK(std::abs(var - 1.0) <= 1e-2);
}

TEST_CASE("crowd means of unbiased panels have variance delta over n") {
    const double delta = 25.0;
    const std::size_t n = 37, panels = 100000;
    Rng rng(7);
    double sum = 0.0, ss = 0.0;
    std::vector<double> means;
    means.reserve(panels);
    for (std::size_t i = 0; i < panels; ++i) {
        const auto v = sample_unbiased_values(100.0, delta, n, rng);
        means.push_back(crowd_mean(v));
    }
    for (double m : means) sum += m;
    const double mbar = sum / static_cast<double>(panels);
    for (double m : means) ss += (m - mbar) * (m - mbar);
    const double var = ss / static_cast<double>(panels);
    CHECK(var == doctest::Approx(delta / static_cast<double>(n)).epsilon(0.02));
}

TEST_CASE("unbiased sampler validates its parameters") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_unbiased_values(0.0, 0.0, 5, rng), StatError);
    CHECK_THROWS_AS(sample_unbiased_values(0.0, -1.0, 5, rng), StatError);
    CHECK_THROWS_AS(sample_unbiased_values(0.0, 1.0, 1, rng), StatError);
}

namespace {

Dataset small_real_dataset() {
    Dataset ds;
    Experiment a;
    a.id = "CPI/h1/2001Q1";
    a.indicator = "CPI";
    a.horizon = 1;
    a.survey_period = "2001Q1";
    a.truth = 2.5;
    a.estimates = {{"f1", 2.0}, {"f2", 3.0}, {"f3", 2.4}, {"f4", 2.9}, {"f5", 1.8}};
    Experiment b;
    b.id = "NGDP/h2/2001Q2";
    b.indicator = "NGDP";
    b.horizon = 2;
    b.survey_period = "2001Q2";
    b.truth = 4.0;
    b.estimates = {{"f1", 3.0}, {"f2", 5.5}, {"f3", 4.2}, {"f4", 3.9}};
    ds.experiments = {a, b};
    ds.canonicalize();
    return ds;
}

} // namespace

TEST_CASE("replication preserves shape and keys, replaces values") {
    const auto ds = small_real_dataset();
    const auto rep = replicate_dataset_unbiased(ds, 99);
    REQUIRE(rep.dataset.experiments.size() == 2);
    CHECK(rep.skipped.empty());
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& orig = ds.experiments[i];
        const auto& syn = rep.dataset.experiments[i];
        CHECK(syn.id == orig.id);
        CHECK(syn.indicator == orig.indicator);
        CHECK(syn.horizon == orig.horizon);
        CHECK(syn.survey_period == orig.survey_period);
        CHECK(syn.truth == orig.truth);
        CHECK(syn.size() == orig.size());
        CHECK(syn.values() != orig.values());
    }
    CHECK(rep.generator_deltas.size() == 2);
    const double want = diversity_decomposition(ds.experiments[0].values(),
                                                ds.experiments[0].truth)
                            .delta;
    CHECK(rep.generator_deltas[0].first == ds.experiments[0].id);
    CHECK(rep.generator_deltas[0].second == want);
}

TEST_CASE("replication is keyed per experiment, not by position") {
    const auto ds = small_real_dataset();
    Dataset reversed = ds;
    std::reverse(reversed.experiments.begin(), reversed.experiments.end());

    const auto a = replicate_dataset_unbiased(ds, 123);
    const auto b = replicate_dataset_unbiased(reversed, 123);
    REQUIRE(a.dataset.experiments.size() == b.dataset.experiments.size());
    for (const auto& ea : a.dataset.experiments) {
        const Experiment* eb = b.dataset.find(ea.id);
        REQUIRE(eb != nullptr);
        CHECK(eb->values() == ea.values());
    }
}

TEST_CASE("replicated diversity concentrates on the source diversity") {
    const auto ds = small_real_dataset();
    const double delta0 =
        diversity_decomposition(ds.experiments[0].values(), ds.experiments[0].truth).delta;
    double acc = 0.0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        const auto rep = replicate_dataset_unbiased(ds, 1000 + static_cast<std::uint64_t>(r));
        const auto& e = rep.dataset.experiments[0];
        acc += diversity_decomposition(e.values(), e.truth).delta;
    }
    CHECK(acc / reps == doctest::Approx(delta0).epsilon(0.05));
}

TEST_CASE("zero-diversity panels are skipped with a reason") {
    Dataset ds = small_real_dataset();
    Experiment flat;
    flat.id = "FLAT/h1/2001Q1";
    flat.indicator = "FLAT";
    flat.horizon = 1;
    flat.survey_period = "2001Q1";
    flat.truth = 7.0;
    flat.estimates = {{"f1", 3.0}, {"f2", 3.0}, {"f3", 3.0}};
    ds.experiments.push_back(flat);
    ds.canonicalize();

    const auto rep = replicate_dataset_unbiased(ds, 5);
    CHECK(rep.dataset.experiments.size() == 2);
    REQUIRE(rep.skipped.size() == 1);
    CHECK(rep.skipped[0].group == "FLAT/h1/2001Q1");
    CHECK(rep.skipped[0].reason == "zero diversity");
    CHECK(rep.skipped[0].n_estimates == 3);
}

TEST_CASE("quincunx truth adds the cues to the anchor") {
    QuincunxParams p;
    p.g_hat = 100.0;
    p.cues = {10.0, -5.0};
    CHECK(quincunx_truth(p) == 105.0);
    p.cues.clear();
    CHECK(quincunx_truth(p) == 100.0);
}

TEST_CASE("degenerate cue probabilities pin every estimate") {
    QuincunxParams p;
    p.g_hat = 100.0;
    p.cues = {10.0, -5.0};
    p.seed = 31;

    p.p_cue = 1.0;
    const auto right = sample_quincunx_panel(p, 20);
    CHECK(right.truth == 105.0);
    for (double g : right.values()) CHECK(g == 105.0);

    p.p_cue = 0.0;
    const auto wrong = sample_quincunx_panel(p, 20);
    CHECK(wrong.truth == 105.0);
    for (double g : wrong.values()) CHECK(g == 95.0); // every cue sign flipped
}

TEST_CASE("coin-flip cues center the estimates on the anchor") {
    QuincunxParams p;
    p.g_hat = 1000.0;
    p.cues = {25.0, -40.0, 10.0, 5.0, -15.0};
    p.p_cue = 0.5;
    p.seed = 77;
    Rng rng(p.seed);
    const std::size_t n = 1000000;
    const auto v = sample_quincunx_values(p, n, rng);
    double sum = 0.0;
    for (double g : v) sum += g;
    const double mean = sum / static_cast<double>(n);
    double cue_ss = 0.0;
    for (double c : p.cues) cue_ss += c * c;
    const double se = std::sqrt(cue_ss / static_cast<double>(n));
    CHECK(std::abs(mean - 1000.0) <= 4.0 * se);
}

TEST_CASE("quincunx sampler validates parameters") {
    QuincunxParams p;
    p.cues = {1.0};
    Rng rng(1);
    p.p_cue = -0.1;
    CHECK_THROWS_AS(sample_quincunx_values(p, 5, rng), StatError);
    p.p_cue = 1.5;
    CHECK_THROWS_AS(sample_quincunx_values(p, 5, rng), StatError);
    p.p_cue = 0.5;
    CHECK_THROWS_AS(sample_quincunx_values(p, 0, rng), StatError);
}

TEST_CASE("quincunx ensemble is deterministic with distinct experiments") {
    QuincunxEnsembleConfig cfg;
    const auto a = quincunx_ensemble(cfg, 12, 15, 404);
    const auto b = quincunx_ensemble(cfg, 12, 15, 404);
    REQUIRE(a.experiments.size() == 12);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < a.experiments.size(); ++i) {
        CHECK(a.experiments[i].values() == b.experiments[i].values());
        CHECK(a.experiments[i].truth == b.experiments[i].truth);
        CHECK(a.experiments[i].size() == 15);
        ids.insert(a.experiments[i].id);
    }
    CHECK(ids.size() == 12);
    // different experiments draw different cues, hence different truths
    std::set<double> truths;
    for (const auto& e : a.experiments) truths.insert(e.truth);
    CHECK(truths.size() > 1);
}

TEST_CASE("ensemble panel means track the analytic cue attenuation") {
    // Each estimate has mean g_hat + (2p-1) * sum(cues) and
    // sum(cues) = truth - g_hat, so the panel mean should sit near
    // g_hat + (2p-1) * (truth - g_hat).
    QuincunxEnsembleConfig cfg;
    cfg.p_cue = 0.7;
    const std::size_t n_per = 200000;
    const auto ds = quincunx_ensemble(cfg, 3, n_per, 55);
    for (const auto& e : ds.experiments) {
        const double want = cfg.g_hat + (2.0 * cfg.p_cue - 1.0) * (e.truth - cfg.g_hat);
        double cue_ss_bound = 10.0 * 50.0 * 50.0; // cues bounded by the config range
        const double se = std::sqrt(cue_ss_bound / static_cast<double>(n_per));
        CHECK(std::abs(crowd_mean(e.values()) - want) <= 5.0 * se);
    }
}

TEST_CASE("zero-sum cues make the anchor the truth") {
    QuincunxEnsembleConfig cfg;
    cfg.zero_sum_cues = true;
    const auto ds = quincunx_ensemble(cfg, 20, 10, 808);
    for (const auto& e : ds.experiments)
        CHECK(std::abs(e.truth - cfg.g_hat) <= 1e-9);
}

TEST_CASE("unbiased ensemble draws panel sizes from the configured range") {
    UnbiasedEnsembleConfig cfg;
    cfg.truth = 100.0;
    cfg.delta = 25.0;
    cfg.n_min = 9;
    cfg.n_max = 87;
    const auto rep = unbiased_ensemble(cfg, 500, 31337);
    REQUIRE(rep.dataset.experiments.size() == 500);
    std::set<std::string> ids;
    std::set<std::size_t> sizes;
    for (const auto& e : rep.dataset.experiments) {
        CHECK(e.truth == 100.0);
        CHECK(e.size() >= 9);
        CHECK(e.size() <= 87);
        ids.insert(e.id);
        sizes.insert(e.size());
    }
    CHECK(ids.size() == 500);
    CHECK(sizes.size() > 20); // the range actually gets explored
    CHECK(rep.generator_deltas.size() == 500);
    for (const auto& [id, d] : rep.generator_deltas) CHECK(d == 25.0);

    const auto again = unbiased_ensemble(cfg, 500, 31337);
    for (std::size_t i = 0; i < 500; ++i)
        CHECK(rep.dataset.experiments[i].values() == again.dataset.experiments[i].values());
}

TEST_CASE("degenerate quincunx panels flag skew as undefined downstream") {
    QuincunxParams p;
    p.g_hat = 50.0;
    p.cues = {3.0, 4.0};
    p.p_cue = 1.0;
    p.seed = 3;
    const auto exp = sample_quincunx_panel(p, 40);
    const auto s = summarize(exp);
    CHECK(s.delta == 0.0);
    CHECK_FALSE(s.skew.has_value());
    CHECK(s.xi == 0.0);
}

TEST_CASE("beat-the-crowd fraction is insensitive to the diversity scale") {
    // Same seed, different delta: xi distributions should agree closely
    // because the construction only rescales distances.
    const std::size_t panels = 3000, n = 25;
    double diff = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        UnbiasedPanelConfig a{100.0, 25.0, n, 9000 + i};
        UnbiasedPanelConfig b{100.0, 400.0, n, 9000 + i};
        const auto pa = sample_unbiased_panel(a);
        const auto pb = sample_unbiased_panel(b);
        diff += std::abs(fraction_beating_crowd(pa.values(), pa.truth) -
                         fraction_beating_crowd(pb.values(), pb.truth));
    }
    CHECK(diff / static_cast<double>(panels) <= 1e-3);
}
