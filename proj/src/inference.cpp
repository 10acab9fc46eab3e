#include "crowdcheck/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crowdcheck/errors.hpp"
#include "crowdcheck/rng.hpp"

namespace crowdcheck {

namespace {

constexpr double kInvSqrtPi = 0.564189583547756286948079451561; // 1/sqrt(pi)

// erf(x) = (2x/sqrt(pi)) e^{-x^2} sum_k (2x^2)^k / (1*3*...*(2k+1)).
// Every term is positive, so the sum carries no cancellation.
double erf_series(double x) {
    const double x2 = x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 200; ++k) {
        term *= 2.0 * x2 / (2.0 * k + 3.0);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return 2.0 * x * kInvSqrtPi * std::exp(-x2) * sum;
}

// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz method. Valid for x > 0, used for
// x >= 2.5 where it converges in a few dozen iterations.
double erfc_fraction(double x) {
    const double tiny = 1e-300;
    double f = x;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 300; ++k) {
        const double a = 0.5 * k;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) * kInvSqrtPi / f;
}

} // namespace

double erf(double x) {
    if (!std::isfinite(x)) throw StatError("erf of a non-finite argument");
    if (x < 0.0) return -erf(-x);
    if (x == 0.0) return 0.0;
    if (x < 2.5) return erf_series(x);
    return 1.0 - erfc_fraction(x);
}

double erfc(double x) {
    if (!std::isfinite(x)) throw StatError("erfc of a non-finite argument");
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x == 0.0) return 1.0;
    if (x < 2.5) return 1.0 - erf_series(x);
    return erfc_fraction(x);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

namespace {

struct Centered {
    std::vector<double> dev;
    double ss = 0.0;   // sum of squared deviations
    double norm = 0.0; // sqrt(ss)
};

Centered center(std::span<const double> v, const char* name) {
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / n;

    Centered c;
    c.dev.reserve(v.size());
    double ss = 0.0;
    for (double x : v) {
        const double d = x - mean;
        c.dev.push_back(d);
        ss += d * d;
    }
    if (ss <= 0.0)
        throw StatError(std::string("correlation undefined: ") + name + " is constant");
    c.ss = ss;
    c.norm = std::sqrt(ss);
    return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Cauchy-Schwarz equality means a perfect correlation; after rounding
// it shows up as sxy^2 landing on or past ssx*ssy, so that case returns
// +/-1 exactly. Below equality, sqrt rounds the denominator to at least
// |sxy|, which keeps the ratio inside [-1, 1].
double rho_from_sums(double sxy, double ssx, double ssy) {
    if (sxy * sxy >= ssx * ssy) return sxy > 0.0 ? 1.0 : -1.0;
    return sxy / std::sqrt(ssx * ssy);
}

void check_pair_sizes(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw StatError("correlation inputs have different lengths");
    if (x.size() < 3)
        throw StatError("correlation needs at least 3 pairs, got " +
                        std::to_string(x.size()));
}

std::uint64_t factorial_or_cap(std::size_t n, std::uint64_t cap) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        if (f > cap / i) return cap + 1;
        f *= i;
    }
    return f;
}

} // namespace

double pearson_r(std::span<const double> x, std::span<const double> y) {
    check_pair_sizes(x, y);
    const auto cx = center(x, "x");
    const auto cy = center(y, "y");
    return rho_from_sums(dot(cx.dev, cy.dev), cx.ss, cy.ss);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    check_pair_sizes(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson_r(rx, ry);
}

const char* to_string(CorrelationMethod m) {
    return m == CorrelationMethod::permutation ? "permutation" : "exact-enumeration";
}

const char* to_string(CorrelationStat s) {
    return s == CorrelationStat::spearman ? "spearman" : "pearson";
}

CorrelationStat parse_correlation_stat(const std::string& name) {
    if (name == "spearman") return CorrelationStat::spearman;
    if (name == "pearson") return CorrelationStat::pearson;
    throw DataError("unknown correlation statistic \"" + name + "\"");
}

CorrelationResult correlation_p(std::span<const double> x, std::span<const double> y,
                                std::uint64_t n_perm, std::uint64_t seed,
                                CorrelationStat stat) {
    check_pair_sizes(x, y);
    if (n_perm < 1000)
        throw StatError("permutation test needs n_perm >= 1000, got " +
                        std::to_string(n_perm));

    std::vector<double> bx, by;
    if (stat == CorrelationStat::spearman) {
        bx = average_ranks(x);
        by = average_ranks(y);
    } else {
        bx.assign(x.begin(), x.end());
        by.assign(y.begin(), y.end());
    }
    const auto cx = center(bx, "x");
    const auto cy = center(by, "y");
    const std::size_t n = bx.size();

    CorrelationResult result;
    result.rho = rho_from_sums(dot(cx.dev, cy.dev), cx.ss, cy.ss);
    result.n_pairs = n;

    // Slack below which a permuted |rho| still counts as extreme; keeps
    // the count stable when permutations tie the observed value exactly.
    const double threshold = std::abs(result.rho) - 1e-12;

    const std::uint64_t total = factorial_or_cap(n, n_perm);
    if (total <= n_perm) {
        result.method = CorrelationMethod::exact_enumeration;
        result.n_perm = total;
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::uint64_t count = 0;
        do {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += cx.dev[i] * cy.dev[perm[i]];
            if (std::abs(rho_from_sums(s, cx.ss, cy.ss)) >= threshold) ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        result.p_value = static_cast<double>(count) / static_cast<double>(total);
        return result;
    }

    result.method = CorrelationMethod::permutation;
    result.n_perm = n_perm;
    std::uint64_t count = 0;
    std::vector<double> shuffled(n);
    for (std::uint64_t p = 0; p < n_perm; ++p) {
        // Counter-keyed stream: permutation p draws from its own
        // splitmix64 sequence, independent of all others.
        std::uint64_t state = splitmix64(seed ^ splitmix64(p + 0x9e3779b97f4a7c15ULL));
        shuffled.assign(cy.dev.begin(), cy.dev.end());
        for (std::size_t i = n - 1; i > 0; --i) {
            state += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = state;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            z ^= z >> 31;
            const std::size_t j = static_cast<std::size_t>(
                (static_cast<unsigned __int128>(z) * (i + 1)) >> 64);
            std::swap(shuffled[i], shuffled[j]);
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += cx.dev[i] * shuffled[i];
        if (std::abs(rho_from_sums(s, cx.ss, cy.ss)) >= threshold) ++count;
    }
    result.p_value =
        static_cast<double>(count + 1) / static_cast<double>(n_perm + 1);
    return result;
}

BiasTestResult bias_p_value(double mean, double truth, double delta, std::size_t n) {
    if (n < 2)
        throw StatError("bias test needs at least 2 estimates, got " + std::to_string(n));
    if (!(delta > 0.0))
        throw StatError("bias test undefined: diversity is not positive");

    BiasTestResult r;
    r.z = std::abs(mean - truth) / std::sqrt(2.0 * delta / static_cast<double>(n));
    r.p_value = erfc(r.z);
    if (r.p_value <= 0.0) r.p_value = std::numeric_limits<double>::denorm_min();
    return r;
}

} // namespace crowdcheck
