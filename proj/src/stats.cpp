#include "crowdcheck/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "crowdcheck/errors.hpp"

namespace crowdcheck {

namespace {

// Neumaier-compensated sum. Callers pass values in sorted order so the
// result does not depend on the original arrangement of the panel.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::vector<double> sorted_copy(std::span<const double> values) {
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    return v;
}

double mean_of_sorted(const std::vector<double>& v) {
    if (v.front() == v.back()) return v.front();
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value() / static_cast<double>(v.size());
}

} // namespace

double crowd_mean(std::span<const double> values) {
    if (values.empty()) throw StatError("crowd mean of an empty panel");
    return mean_of_sorted(sorted_copy(values));
}

Decomposition diversity_decomposition(std::span<const double> values, double truth) {
    if (values.empty()) throw StatError("decomposition of an empty panel");
    const auto v = sorted_copy(values);
    const double n = static_cast<double>(v.size());
    const double mean = mean_of_sorted(v);

    Decomposition d;
    d.gamma = truth - mean;

    CompensatedSum se;
    for (double x : v) se.add((x - truth) * (x - truth));
    d.eps = se.value() / n;

    if (v.front() == v.back()) {
        d.delta = 0.0;
    } else {
        CompensatedSum sd;
        for (double x : v) sd.add((x - mean) * (x - mean));
        d.delta = sd.value() / n;
    }
    return d;
}

double skewness(std::span<const double> values) {
    if (values.size() < 2)
        throw StatError("skewness needs at least 2 estimates, got " +
                        std::to_string(values.size()));
    const auto v = sorted_copy(values);
    if (v.front() == v.back())
        throw UndefinedSkewError("skewness undefined: panel has zero diversity");

    const double n = static_cast<double>(v.size());
    const double mean = mean_of_sorted(v);
    CompensatedSum sd;
    for (double x : v) sd.add((x - mean) * (x - mean));
    const double delta = sd.value() / n;
    if (delta <= 0.0)
        throw UndefinedSkewError("skewness undefined: panel has zero diversity");

    const double s = std::sqrt(delta);
    CompensatedSum s3;
    for (double x : v) {
        const double z = (x - mean) / s;
        s3.add(z * z * z);
    }
    return s3.value() / n;
}

double fraction_beating_crowd(std::span<const double> values, double truth) {
    if (values.empty()) throw StatError("beat-the-crowd fraction of an empty panel");
    const auto v = sorted_copy(values);
    const double crowd_abs = std::abs(truth - mean_of_sorted(v));
    std::size_t beat = 0;
    for (double x : v)
        if (std::abs(x - truth) < crowd_abs) ++beat;
    return static_cast<double>(beat) / static_cast<double>(v.size());
}

SummaryStats summarize(std::span<const double> values, double truth) {
    if (values.size() < 2)
        throw StatError("summary needs at least 2 estimates, got " +
                        std::to_string(values.size()));

    SummaryStats s;
    s.n = values.size();
    s.truth = truth;

    const auto d = diversity_decomposition(values, truth);
    s.mean = crowd_mean(values);
    s.gamma = d.gamma;
    s.eps = d.eps;
    s.delta = d.delta;
    try {
        s.skew = skewness(values);
    } catch (const UndefinedSkewError&) {
        s.skew = std::nullopt;
    }
    s.xi = fraction_beating_crowd(values, truth);
    s.dpt_residual = d.gamma * d.gamma - (d.eps - d.delta);

    if (truth == 0.0)
        throw StatError("scaled error undefined: realized value is zero");
    if (s.mean == 0.0)
        throw StatError("scaled diversity undefined: crowd mean is zero");
    s.scaled_error_signed = d.gamma / truth;
    s.scaled_error_abs = std::abs(d.gamma) / truth;
    s.scaled_rmse = std::sqrt(d.eps) / truth;
    s.scaled_diversity = std::sqrt(d.delta) / s.mean;
    return s;
}

SummaryStats summarize(const Experiment& exp) {
    try {
        return summarize(exp.values(), exp.truth);
    } catch (const StatError& e) {
        throw StatError(std::string(e.what()) + " in experiment " + exp.id);
    }
}

} // namespace crowdcheck
