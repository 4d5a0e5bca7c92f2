#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately reimplement results by the most direct route available
// (brute force, exact integer arithmetic, closed forms) and never call the
// code paths they check.

#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "thd/dataset.hpp"
#include "thd/network.hpp"

namespace testutil {

using thd::Dataset;
using thd::RowId;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// --- fixtures --------------------------------------------------------------

inline std::string csv_of(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows) {
    std::ostringstream out;
    thd::csv::write_row(out, header);
    for (const auto& r : rows) thd::csv::write_row(out, r);
    return out.str();
}

inline Dataset ingest_string(const std::string& text, const thd::CsvSchema& schema) {
    std::istringstream in(text);
    return thd::ingest_csv(in, schema);
}

// Two Gaussian blobs: rows [0, n_a) around the origin, rows [n_a, n_a+n_b)
// around (separation, 0, ...), unit variance. Blob A is labeled "Good",
// blob B "Bad".
struct BlobFixture {
    Dataset dataset;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    std::string csv_text;
};

inline BlobFixture make_blobs(std::uint64_t seed, std::size_t n_a = 200, std::size_t n_b = 300,
                              int dim = 2, double separation = 10.0) {
    auto gen = rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::string> header;
    for (int d = 0; d < dim; ++d) header.push_back("f" + std::to_string(d));
    header.push_back("outcome");

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < n_a + n_b; ++i) {
        const bool in_b = i >= n_a;
        std::vector<std::string> row;
        for (int d = 0; d < dim; ++d) {
            const double offset = (in_b && d == 0) ? separation : 0.0;
            row.push_back(thd::detail::format_double(offset + normal(gen)));
        }
        row.push_back(in_b ? "Bad" : "Good");
        rows.push_back(std::move(row));
    }

    BlobFixture fx;
    fx.n_a = n_a;
    fx.n_b = n_b;
    fx.csv_text = csv_of(header, rows);
    thd::CsvSchema schema;
    schema.label = "outcome";
    fx.dataset = ingest_string(fx.csv_text, schema);
    return fx;
}

// Unlabeled numeric matrix as a Dataset (feature names f0..f{d-1}).
inline Dataset matrix_dataset(const std::vector<std::vector<double>>& rows) {
    std::vector<std::string> header;
    for (std::size_t d = 0; d < rows.front().size(); ++d) header.push_back("f" + std::to_string(d));
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        std::vector<std::string> row;
        for (double v : r) row.push_back(thd::detail::format_double(v));
        cells.push_back(std::move(row));
    }
    return ingest_string(csv_of(header, cells), {});
}

// --- oracles ---------------------------------------------------------------

// Brute-force nerve: one edge per cluster pair with a non-empty row
// intersection, weight = intersection size.
inline std::vector<std::tuple<int, int, int>> brute_nerve_edges(
    const std::vector<std::pair<int, std::vector<RowId>>>& clusters) {
    std::vector<std::tuple<int, int, int>> edges;
    for (std::size_t a = 0; a < clusters.size(); ++a)
        for (std::size_t b = a + 1; b < clusters.size(); ++b) {
            int shared = 0;
            for (RowId r : clusters[a].second)
                for (RowId s : clusters[b].second)
                    if (r == s) ++shared;
            if (shared > 0) edges.emplace_back(static_cast<int>(a), static_cast<int>(b), shared);
        }
    return edges;
}

// BFS components over the network's edge list (node-id sets, ascending),
// independent of the union-find used in production.
inline std::vector<std::vector<int>> bfs_components(const thd::TopologicalNetwork& net) {
    const std::size_t n = net.nodes.size();
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : net.edges) {
        adj[static_cast<std::size_t>(e.source)].push_back(e.target);
        adj[static_cast<std::size_t>(e.target)].push_back(e.source);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::vector<int>> comps;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<int> comp, queue{static_cast<int>(s)};
        seen[s] = true;
        while (!queue.empty()) {
            const int v = queue.back();
            queue.pop_back();
            comp.push_back(v);
            for (int w : adj[static_cast<std::size_t>(v)])
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = true;
                    queue.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

// Brute-force two-sample ECDF sup difference evaluated at every sample point.
inline double ecdf_sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    auto ecdf = [](const std::vector<double>& s, double x) {
        std::size_t count = 0;
        for (double v : s)
            if (v <= x) ++count;
        return static_cast<double>(count) / static_cast<double>(s.size());
    };
    double d = 0.0;
    for (const auto* sample : {&a, &b})
        for (double x : *sample) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
    return d;
}

// Direct summation of the Kolmogorov alternating series.
inline double kolmogorov_series(double lambda) {
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1) ? term : -term;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// Exact rational hypergeometric tail via Pascal's triangle in unsigned
// 64-bit (exact for N <= 60, where C(60,30) < 2^63).
class ExactHypergeometric {
public:
    explicit ExactHypergeometric(int max_n = 60) : choose_(static_cast<std::size_t>(max_n) + 1) {
        for (std::size_t n = 0; n < choose_.size(); ++n) {
            choose_[n].assign(n + 1, 1);
            for (std::size_t k = 1; k < n; ++k)
                choose_[n][k] = choose_[n - 1][k - 1] + choose_[n - 1][k];
        }
    }

    double tail(int N, int K, int n, int k) const {
        unsigned long long numer = 0;
        for (int i = k; i <= std::min(n, K); ++i) {
            if (n - i > N - K) continue;
            numer += c(K, i) * c(N - K, n - i);
        }
        return static_cast<double>(static_cast<long double>(numer) /
                                   static_cast<long double>(c(N, n)));
    }

    double pmf(int N, int K, int n, int k) const {
        if (k < 0 || k > n || k > K || n - k > N - K) return 0.0;
        return static_cast<double>(static_cast<long double>(c(K, k) * c(N - K, n - k)) /
                                   static_cast<long double>(c(N, n)));
    }

private:
    unsigned long long c(int n, int k) const {
        return choose_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
    }
    std::vector<std::vector<unsigned long long>> choose_;
};

// Naive double-loop pairwise distances.
inline std::vector<std::vector<double>> naive_pairwise(const thd::Matrix& m,
                                                       const std::vector<double>& weights) {
    std::vector<std::vector<double>> d(m.rows(), std::vector<double>(m.rows(), 0.0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.rows(); ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const double diff = m.at(i, c) - m.at(j, c);
                s += weights[c] * diff * diff;
            }
            d[i][j] = std::sqrt(s);
        }
    return d;
}

}  // namespace testutil
