#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thd/dataset.hpp"
#include "thd/network.hpp"

namespace thd {

// Exact two-sample Kolmogorov-Smirnov statistic, sup |ECDF_a - ECDF_b|,
// via a merged sweep that handles ties by advancing both samples past each
// distinct value together.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw Error("ks_statistic: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double n = static_cast<double>(sa.size());
    const double m = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == x) ++i;
        while (j < sb.size() && sb[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

// Asymptotic Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1}
// exp(-2 j^2 lambda^2), with the theta-function form below the crossover
// where the alternating series loses precision.
inline double kolmogorov_tail(double lambda) {
    constexpr double pi = 3.14159265358979323846;
    if (!(lambda > 0.0)) return 1.0;
    if (lambda < 1.18) {
        const double t = std::exp(-pi * pi / (8.0 * lambda * lambda));
        const double series =
            t + std::pow(t, 9.0) + std::pow(t, 25.0) + std::pow(t, 49.0);
        const double p = 1.0 - std::sqrt(2.0 * pi) / lambda * series;
        return std::min(1.0, std::max(0.0, p));
    }
    double sum = 0.0;
    for (int j = 1; j <= 64; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// Two-sample p-value with effective size nm/(n+m).
inline double ks_p_value(double d, std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) throw Error("ks_p_value: empty sample size");
    if (d < 0.0 || d > 1.0) throw Error("ks_p_value: statistic out of [0,1]");
    const double ne = static_cast<double>(n) * static_cast<double>(m) /
                      (static_cast<double>(n) + static_cast<double>(m));
    return kolmogorov_tail(std::sqrt(ne) * d);
}

namespace detail {

inline double log_factorial(long long x) { return std::lgamma(static_cast<double>(x) + 1.0); }

inline double log_choose(long long n, long long k) {
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace detail

// P(X = k) for X hypergeometric: k successes in n draws without replacement
// from a population of N containing K successes.
inline double hypergeometric_pmf(long long N, long long K, long long n, long long k) {
    if (N < 0 || K < 0 || K > N || n < 0 || n > N)
        throw Error("hypergeometric_pmf: invalid parameters");
    if (k < 0 || k > n || k > K || n - k > N - K) return 0.0;
    return std::exp(detail::log_choose(K, k) + detail::log_choose(N - K, n - k) -
                    detail::log_choose(N, n));
}

// Upper tail P(X >= k) by log-factorial summation. A k at or below the
// support minimum covers the whole distribution and is exactly 1.
inline double hypergeometric_tail(long long N, long long K, long long n, long long k) {
    if (N < 0 || K < 0 || K > N || n < 0 || n > N)
        throw Error("hypergeometric_tail: invalid parameters");
    if (k < 0 || k > std::min(n, K)) throw Error("hypergeometric_tail: k out of range");
    if (k <= std::max<long long>(0, n - (N - K))) return 1.0;
    double p = 0.0;
    for (long long i = k; i <= std::min(n, K); ++i) p += hypergeometric_pmf(N, K, n, i);
    return std::min(1.0, std::max(0.0, p));
}

enum class Direction { Higher, Lower };
enum class StatKind { Ks, Hypergeometric };

// One feature's separation between a group and its baseline. For continuous
// features the statistic is the KS D; for a categorical level it is the
// enrichment fold (group fraction over population fraction).
struct FeatureStat {
    std::string name;  // feature, or feature=level
    int feature = -1;
    int level = -1;  // -1 for continuous
    StatKind kind = StatKind::Ks;
    double statistic = 0.0;
    double p_value = 1.0;
    Direction direction = Direction::Higher;
    double group_mean = 0.0, group_median = 0.0;
    double baseline_mean = 0.0, baseline_median = 0.0;
    double group_stdev = 0.0;
    std::size_t group_n = 0, baseline_n = 0;
};

struct GroupComparison {
    std::string group_id;
    std::string baseline_id;
    std::vector<FeatureStat> stats;  // statistic desc, then p asc, then feature order
};

namespace detail {

struct SampleSummary {
    std::vector<double> values;
    double mean = 0.0, median = 0.0, stdev = 0.0;
};

inline SampleSummary summarize_present(const Dataset& ds, const Group& g, std::size_t col) {
    SampleSummary s;
    s.values.reserve(g.size());
    for (RowId r : g.rows)
        if (!ds.is_missing(r, col)) s.values.push_back(ds.value(r, col));
    if (s.values.empty()) return s;
    double sum = 0.0;
    for (double v : s.values) sum += v;
    s.mean = sum / static_cast<double>(s.values.size());
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(ss / static_cast<double>(s.values.size()));
    std::vector<double> sorted = s.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    s.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return s;
}

}  // namespace detail

// KS per continuous feature; per categorical level, the hypergeometric tail
// of the level's count in the group drawn from group + baseline. Missing
// values are excluded pairwise; features with no present values on either
// side are skipped. The label feature is never compared.
inline GroupComparison compare_groups(const Dataset& ds, const Group& group, const Group& baseline) {
    if (group.empty() || baseline.empty()) throw Error("compare_groups: empty group");
    if (!groups_disjoint(group, baseline)) throw Error("compare_groups: groups overlap");

    GroupComparison out;
    for (std::size_t c = 0; c < ds.features().size(); ++c) {
        const FeatureMeta& f = ds.feature(c);
        if (f.is_label) continue;
        if (f.kind == FeatureKind::Continuous) {
            const auto ga = detail::summarize_present(ds, group, c);
            const auto gb = detail::summarize_present(ds, baseline, c);
            if (ga.values.empty() || gb.values.empty()) continue;
            FeatureStat st;
            st.name = f.name;
            st.feature = static_cast<int>(c);
            st.kind = StatKind::Ks;
            st.statistic = ks_statistic(ga.values, gb.values);
            st.p_value = ks_p_value(st.statistic, ga.values.size(), gb.values.size());
            st.direction = ga.mean > gb.mean ? Direction::Higher : Direction::Lower;
            st.group_mean = ga.mean;
            st.group_median = ga.median;
            st.group_stdev = ga.stdev;
            st.baseline_mean = gb.mean;
            st.baseline_median = gb.median;
            st.group_n = ga.values.size();
            st.baseline_n = gb.values.size();
            out.stats.push_back(std::move(st));
        } else {
            std::vector<long long> count_g(ds.levels(c).size(), 0), count_b(ds.levels(c).size(), 0);
            long long n_g = 0, n_b = 0;
            for (RowId r : group.rows)
                if (!ds.is_missing(r, c)) {
                    ++count_g[static_cast<std::size_t>(ds.value(r, c))];
                    ++n_g;
                }
            for (RowId r : baseline.rows)
                if (!ds.is_missing(r, c)) {
                    ++count_b[static_cast<std::size_t>(ds.value(r, c))];
                    ++n_b;
                }
            if (n_g == 0 || n_b == 0) continue;
            const long long population = n_g + n_b;
            for (std::size_t lv = 0; lv < ds.levels(c).size(); ++lv) {
                const long long successes = count_g[lv] + count_b[lv];
                if (successes == 0) continue;
                FeatureStat st;
                st.name = f.name + "=" + ds.levels(c)[lv];
                st.feature = static_cast<int>(c);
                st.level = static_cast<int>(lv);
                st.kind = StatKind::Hypergeometric;
                const double frac_g = static_cast<double>(count_g[lv]) / static_cast<double>(n_g);
                const double frac_b = static_cast<double>(count_b[lv]) / static_cast<double>(n_b);
                const double frac_pop =
                    static_cast<double>(successes) / static_cast<double>(population);
                st.statistic = frac_g / frac_pop;  // enrichment fold
                st.p_value = hypergeometric_tail(population, successes, n_g, count_g[lv]);
                st.direction = frac_g > frac_b ? Direction::Higher : Direction::Lower;
                st.group_mean = st.group_median = frac_g;
                st.baseline_mean = st.baseline_median = frac_b;
                st.group_n = static_cast<std::size_t>(n_g);
                st.baseline_n = static_cast<std::size_t>(n_b);
                out.stats.push_back(std::move(st));
            }
        }
    }
    std::stable_sort(out.stats.begin(), out.stats.end(), [](const FeatureStat& x, const FeatureStat& y) {
        if (x.statistic != y.statistic) return x.statistic > y.statistic;
        return x.p_value < y.p_value;
    });
    return out;
}

// Per-node color: mean of a continuous feature over the node's rows, or the
// fraction of a designated level for a categorical feature. Nodes with no
// present values get NaN (serialized as null).
inline std::vector<double> node_coloring(const Dataset& ds, const TopologicalNetwork& net,
                                         const std::string& feature,
                                         const std::optional<std::string>& level = std::nullopt) {
    const int c = ds.feature_index(feature);
    if (c < 0) throw Error("node_coloring: unknown feature '" + feature + "'");
    const auto col = static_cast<std::size_t>(c);
    const bool categorical = ds.feature(col).kind == FeatureKind::Categorical;
    int level_code = -1;
    if (categorical) {
        if (!level) throw Error("node_coloring: categorical feature needs a level");
        const auto& lvls = ds.levels(col);
        for (std::size_t lv = 0; lv < lvls.size(); ++lv)
            if (lvls[lv] == *level) level_code = static_cast<int>(lv);
        if (level_code < 0) throw Error("node_coloring: unknown level '" + *level + "'");
    }

    std::vector<double> colors(net.nodes.size(), std::numeric_limits<double>::quiet_NaN());
    for (const NetworkNode& node : net.nodes) {
        double sum = 0.0;
        std::size_t present = 0;
        for (RowId r : node.rows) {
            if (ds.is_missing(r, col)) continue;
            ++present;
            if (categorical)
                sum += ds.value(r, col) == static_cast<double>(level_code) ? 1.0 : 0.0;
            else
                sum += ds.value(r, col);
        }
        if (present > 0)
            colors[static_cast<std::size_t>(node.id)] = sum / static_cast<double>(present);
    }
    return colors;
}

}  // namespace thd
