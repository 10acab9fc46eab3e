#include "crowdcheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "crowdcheck/errors.hpp"
#include "crowdcheck/format.hpp"

namespace crowdcheck {

std::vector<SummaryRow> summarize_dataset(const Dataset& dataset) {
    if (dataset.experiments.empty()) throw DataError("dataset has no experiments");
    std::vector<SummaryRow> rows;
    rows.reserve(dataset.experiments.size());
    for (const auto& exp : dataset.experiments)
        rows.push_back(SummaryRow{exp.id, exp.indicator, exp.horizon, exp.survey_period,
                                  summarize(exp)});
    return rows;
}

StatField parse_stat_field(const std::string& name) {
    static const std::pair<const char*, StatField> table[] = {
        {"n", StatField::n},
        {"truth", StatField::truth},
        {"mean", StatField::mean},
        {"gamma", StatField::gamma},
        {"eps", StatField::eps},
        {"delta", StatField::delta},
        {"skew", StatField::skew},
        {"xi", StatField::xi},
        {"scaled_error_signed", StatField::scaled_error_signed},
        {"scaled_error_abs", StatField::scaled_error_abs},
        {"scaled_rmse", StatField::scaled_rmse},
        {"scaled_diversity", StatField::scaled_diversity},
        {"dpt_residual", StatField::dpt_residual},
    };
    for (const auto& [key, field] : table)
        if (name == key) return field;
    throw DataError("unknown statistic field \"" + name + "\"");
}

const char* to_string(StatField f) {
    switch (f) {
    case StatField::n: return "n";
    case StatField::truth: return "truth";
    case StatField::mean: return "mean";
    case StatField::gamma: return "gamma";
    case StatField::eps: return "eps";
    case StatField::delta: return "delta";
    case StatField::skew: return "skew";
    case StatField::xi: return "xi";
    case StatField::scaled_error_signed: return "scaled_error_signed";
    case StatField::scaled_error_abs: return "scaled_error_abs";
    case StatField::scaled_rmse: return "scaled_rmse";
    case StatField::scaled_diversity: return "scaled_diversity";
    case StatField::dpt_residual: return "dpt_residual";
    }
    return "?";
}

std::optional<double> stat_value(const SummaryStats& stats, StatField field) {
    switch (field) {
    case StatField::n: return static_cast<double>(stats.n);
    case StatField::truth: return stats.truth;
    case StatField::mean: return stats.mean;
    case StatField::gamma: return stats.gamma;
    case StatField::eps: return stats.eps;
    case StatField::delta: return stats.delta;
    case StatField::skew: return stats.skew;
    case StatField::xi: return stats.xi;
    case StatField::scaled_error_signed: return stats.scaled_error_signed;
    case StatField::scaled_error_abs: return stats.scaled_error_abs;
    case StatField::scaled_rmse: return stats.scaled_rmse;
    case StatField::scaled_diversity: return stats.scaled_diversity;
    case StatField::dpt_residual: return stats.dpt_residual;
    }
    throw DataError("unknown statistic field");
}

namespace {

void moments(const std::vector<double>& v, double& mean, double& sd) {
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    mean = sum / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / n);
}

} // namespace

ScatterTable make_scatter(const Dataset& dataset, StatField x, StatField y,
                          std::uint64_t n_perm, std::uint64_t seed,
                          CorrelationStat stat) {
    const auto rows = summarize_dataset(dataset);

    ScatterTable table;
    std::vector<double> xs, ys;
    for (const auto& row : rows) {
        const auto xv = stat_value(row.stats, x);
        const auto yv = stat_value(row.stats, y);
        if (!xv || !yv) {
            table.skipped.push_back(DropRecord{row.id, "undefined skew", row.stats.n});
            continue;
        }
        table.points.push_back(ScatterPoint{row.id, *xv, *yv});
        xs.push_back(*xv);
        ys.push_back(*yv);
    }
    if (xs.size() < 3)
        throw StatError("scatter needs at least 3 usable pairs, got " +
                        std::to_string(xs.size()));

    moments(xs, table.x_mean, table.x_sd);
    moments(ys, table.y_mean, table.y_sd);
    table.corr = correlation_p(xs, ys, n_perm, seed, stat);
    return table;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    if (bins < 1) throw DataError("histogram needs at least 1 bin");
    if (!(hi > lo)) throw DataError("histogram range is empty");
    std::vector<double> edges;
    edges.reserve(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k)
        edges.push_back(lo + (hi - lo) * static_cast<double>(k) /
                                 static_cast<double>(bins));
    return edges;
}

HistogramTable make_histogram(const std::vector<double>& values,
                              std::vector<double> edges) {
    if (values.empty()) throw DataError("histogram of no values");
    if (edges.size() < 2) throw DataError("histogram needs at least 1 bin");

    HistogramTable hist;
    hist.bin_edges = std::move(edges);
    const std::size_t bins = hist.bin_edges.size() - 1;
    std::vector<std::size_t> counts(bins, 0);

    // Bins are [lo, hi) except the last, which is closed; out-of-range
    // values land in the end bins.
    for (double v : values) {
        const auto it =
            std::upper_bound(hist.bin_edges.begin(), hist.bin_edges.end(), v);
        std::size_t k = it == hist.bin_edges.begin()
                            ? 0
                            : static_cast<std::size_t>(it - hist.bin_edges.begin()) - 1;
        if (k >= bins) k = bins - 1;
        ++counts[k];
    }

    const double n = static_cast<double>(values.size());
    std::size_t cum = 0;
    for (std::size_t k = 0; k < bins; ++k) {
        cum += counts[k];
        hist.proportions.push_back(static_cast<double>(counts[k]) / n);
        hist.cdf.push_back(static_cast<double>(cum) / n);
    }
    return hist;
}

HistogramTable xi_histogram(const Dataset& dataset, std::size_t bins) {
    if (dataset.experiments.empty()) throw DataError("dataset has no experiments");

    // Computed straight from the panel, not via the summary table: the
    // fraction is defined even where a scaled summary statistic is not.
    std::vector<double> xis;
    std::set<std::size_t> sizes;
    for (const auto& exp : dataset.experiments) {
        xis.push_back(fraction_beating_crowd(exp.values(), exp.truth));
        sizes.insert(exp.size());
    }

    std::vector<double> edges;
    if (sizes.size() == 1) {
        // Attainable values are k/N; center one bin on each.
        const double n = static_cast<double>(*sizes.begin());
        for (std::size_t k = 0; k <= *sizes.begin() + 1; ++k)
            edges.push_back((static_cast<double>(k) - 0.5) / n);
    } else {
        edges = uniform_edges(0.0, 1.0, bins);
    }

    auto hist = make_histogram(xis, std::move(edges));
    std::size_t at_half = 0, at_zero = 0;
    for (double x : xis) {
        if (x <= 0.5) ++at_half;
        if (x == 0.0) ++at_zero;
    }
    const double n = static_cast<double>(xis.size());
    hist.markers.emplace_back("cdf_at_0.5", static_cast<double>(at_half) / n);
    hist.markers.emplace_back("prop_at_0", static_cast<double>(at_zero) / n);
    return hist;
}

BiasHistResult bias_histogram(const Dataset& dataset, std::size_t bins,
                              const std::map<std::string, double>* null_deltas) {
    if (dataset.experiments.empty()) throw DataError("dataset has no experiments");

    BiasHistResult result;
    std::vector<double> ps;
    for (const auto& exp : dataset.experiments) {
        const auto values = exp.values();
        const auto d = diversity_decomposition(values, exp.truth);
        double delta = d.delta;
        if (null_deltas) {
            const auto it = null_deltas->find(exp.id);
            if (it == null_deltas->end())
                throw DataError("no null diversity provided for experiment " + exp.id);
            delta = it->second;
        }
        if (!(delta > 0.0)) {
            result.skipped.push_back(
                DropRecord{exp.id, "zero diversity", exp.estimates.size()});
            continue;
        }
        const auto bt = bias_p_value(crowd_mean(values), exp.truth, delta, exp.size());
        result.pvalues.push_back(BiasPValueRow{exp.id, bt.z, bt.p_value});
        ps.push_back(bt.p_value);
    }
    if (ps.empty()) throw DataError("no experiment has positive diversity");

    result.hist = make_histogram(ps, uniform_edges(0.0, 1.0, bins));
    std::size_t at = 0;
    for (double p : ps)
        if (p <= 0.05) ++at;
    result.hist.markers.emplace_back("cdf_at_0.05",
                                     static_cast<double>(at) /
                                         static_cast<double>(ps.size()));
    return result;
}

HistogramTable estimates_histogram(const Dataset& dataset, const std::string& id,
                                   std::size_t bins) {
    const Experiment* exp = dataset.find(id);
    if (!exp) throw DataError("unknown experiment id \"" + id + "\"");

    const auto values = exp->values();
    const double mean = crowd_mean(values);
    if (mean == 0.0)
        throw StatError("relative estimates undefined: crowd mean is zero in experiment " +
                        id);

    std::vector<double> rel;
    rel.reserve(values.size());
    for (double v : values) rel.push_back(v / mean);

    const auto [lo_it, hi_it] = std::minmax_element(rel.begin(), rel.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }

    auto hist = make_histogram(rel, uniform_edges(lo, hi, bins));
    const double t = exp->truth / mean;
    const double band = std::abs(1.0 - t);
    hist.markers.emplace_back("crowd", 1.0);
    hist.markers.emplace_back("truth_over_mean", t);
    hist.markers.emplace_back("band_lo", t - band);
    hist.markers.emplace_back("band_hi", t + band);
    return hist;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "experiment_id,n,mean,gamma,eps,delta,skew,xi,scaled_error_signed,"
           "scaled_error_abs,scaled_rmse,scaled_diversity,dpt_residual\n";
    for (const auto& row : rows) {
        const auto& s = row.stats;
        out << row.id << ',' << s.n << ',' << to_sig15(s.mean) << ','
            << to_sig15(s.gamma) << ',' << to_sig15(s.eps) << ',' << to_sig15(s.delta)
            << ',' << (s.skew ? to_sig15(*s.skew) : std::string("undef")) << ','
            << to_sig15(s.xi) << ',' << to_sig15(s.scaled_error_signed) << ','
            << to_sig15(s.scaled_error_abs) << ',' << to_sig15(s.scaled_rmse) << ','
            << to_sig15(s.scaled_diversity) << ',' << to_sig15(s.dpt_residual) << '\n';
    }
}

void write_scatter_csv(std::ostream& out, const ScatterTable& table, StatField x,
                       StatField y) {
    out << "experiment_id," << to_string(x) << ',' << to_string(y) << '\n';
    for (const auto& p : table.points)
        out << p.id << ',' << to_sig15(p.x) << ',' << to_sig15(p.y) << '\n';
}

void write_histogram_csv(std::ostream& out, const HistogramTable& hist) {
    out << "bin_lo,bin_hi,proportion,cdf\n";
    for (std::size_t k = 0; k + 1 < hist.bin_edges.size(); ++k)
        out << to_sig15(hist.bin_edges[k]) << ',' << to_sig15(hist.bin_edges[k + 1])
            << ',' << to_sig15(hist.proportions[k]) << ',' << to_sig15(hist.cdf[k])
            << '\n';
}

void write_bias_pvalues_csv(std::ostream& out, const std::vector<BiasPValueRow>& rows) {
    out << "experiment_id,z,p_value\n";
    for (const auto& row : rows)
        out << row.id << ',' << to_sig15(row.z) << ',' << to_sig15(row.p) << '\n';
}

void write_drops_csv(std::ostream& out, const std::vector<DropRecord>& drops) {
    out << "group,reason,n_estimates\n";
    for (const auto& d : drops)
        out << d.group << ',' << d.reason << ',' << d.n_estimates << '\n';
}

} // namespace crowdcheck
