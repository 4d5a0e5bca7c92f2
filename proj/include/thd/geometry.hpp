#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

#include "thd/parallel.hpp"
#include "thd/types.hpp"

namespace thd {

enum class Metric { Vne, Euclidean };

struct VarianceInfo {
    std::vector<double> variance;       // population variance per column
    std::vector<std::uint8_t> is_zero;  // flagged zero-variance columns
};

// Population variance (divide by n) per column, two-pass so constant columns
// come out exactly zero.
inline VarianceInfo feature_variances(const Matrix& m) {
    if (m.rows() == 0) throw Error("feature_variances: empty matrix");
    VarianceInfo out;
    out.variance.assign(m.cols(), 0.0);
    out.is_zero.assign(m.cols(), 0);
    const double n = static_cast<double>(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) mean += m.at(r, c);
        mean /= n;
        double ss = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const double d = m.at(r, c) - mean;
            ss += d * d;
        }
        out.variance[c] = ss / n;
        out.is_zero[c] = (out.variance[c] == 0.0) ? 1 : 0;
    }
    return out;
}

// Variance-normalized Euclidean distance; zero-variance columns are skipped
// rather than divided by an epsilon.
inline double vne_distance(std::span<const double> x, std::span<const double> y,
                           const VarianceInfo& vars) {
    if (x.size() != y.size() || x.size() != vars.variance.size())
        throw Error("vne_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        if (vars.is_zero[c]) continue;
        const double d = x[c] - y[c];
        s += d * d / vars.variance[c];
    }
    return std::sqrt(s);
}

inline double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("euclidean_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double d = x[c] - y[c];
        s += d * d;
    }
    return std::sqrt(s);
}

// Symmetric non-negative distances with zero diagonal, stored as the strict
// upper triangle.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), tri_(n * (n - 1) / 2, 0.0) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return tri_[tri_index(std::min(i, j), std::max(i, j))];
    }

    double& upper(std::size_t i, std::size_t j) { return tri_[tri_index(i, j)]; }

    double max_value() const {
        double m = 0.0;
        for (double v : tri_) m = std::max(m, v);
        return m;
    }

private:
    std::size_t tri_index(std::size_t i, std::size_t j) const {
        return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
    }

    std::size_t n_ = 0;
    std::vector<double> tri_;
};

namespace detail {

inline std::vector<double> metric_weights(const Matrix& m, Metric metric) {
    std::vector<double> w(m.cols(), 1.0);
    if (metric == Metric::Vne) {
        const VarianceInfo vars = feature_variances(m);
        for (std::size_t c = 0; c < m.cols(); ++c)
            w[c] = vars.is_zero[c] ? 0.0 : 1.0 / vars.variance[c];
    }
    return w;
}

}  // namespace detail

// Row-parallel with a fixed chunk grid; every entry is computed and written
// independently, so results match for any thread count.
inline DistanceMatrix pairwise_distances(const Matrix& m, Metric metric) {
    const std::size_t n = m.rows();
    if (n == 0) throw Error("pairwise_distances: empty matrix");
    DistanceMatrix d(n);
    if (n == 1) return d;
    const std::vector<double> w = detail::metric_weights(m, metric);
    const std::size_t cols = m.cols();
    parallel_chunks(n - 1, 64, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double* xi = m.row(i);
            for (std::size_t j = i + 1; j < n; ++j) {
                const double* xj = m.row(j);
                double s = 0.0;
                for (std::size_t c = 0; c < cols; ++c) {
                    const double diff = xi[c] - xj[c];
                    s += w[c] * diff * diff;
                }
                d.upper(i, j) = std::sqrt(s);
            }
        }
    });
    return d;
}

// Coordinates in filter space, one point per matrix row.
struct FilterValues {
    std::size_t n = 0;
    int dim = 0;
    std::vector<double> coords;  // row-major n x dim

    double at(std::size_t i, int d) const { return coords[i * static_cast<std::size_t>(dim) + d]; }
    double& at(std::size_t i, int d) { return coords[i * static_cast<std::size_t>(dim) + d]; }
};

namespace detail {

// Flip an axis so its largest-magnitude coordinate is positive; ties keep
// the smallest row index, removing eigensolver sign ambiguity.
inline void fix_axis_sign(std::span<double> axis) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (std::abs(axis[i]) > std::abs(axis[best])) best = i;
    if (axis[best] < 0.0)
        for (double& v : axis) v = -v;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct EigenPairs {
    std::vector<double> values;                // descending
    std::vector<std::vector<double>> vectors;  // unit vectors, one per value
};

// Lanczos with full reorthogonalization for the top-k algebraic eigenpairs
// of a symmetric operator. Restarts against converged Ritz vectors cover
// degenerate eigenvalues. Fully deterministic: fixed start vectors, fixed
// sequential reductions.
template <typename MatVec>
EigenPairs lanczos_topk(std::size_t n, int k, const MatVec& apply,
                        const std::vector<std::vector<double>>& deflate, int max_steps) {
    EigenPairs result;
    std::vector<std::vector<double>> locked = deflate;  // orthogonality constraints

    auto orthogonalize = [&](std::vector<double>& w, const std::vector<std::vector<double>>& basis) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) {
                const double c = dot(w, u);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * u[i];
            }
    };

    int restarts = 0;
    while (static_cast<int>(result.values.size()) < k && restarts < k + 2) {
        // fresh deterministic start vector, orthogonal to everything locked
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = static_cast<double>(splitmix64(i + 0x5851f42d * static_cast<std::uint64_t>(restarts + 1))) /
                       static_cast<double>(std::numeric_limits<std::uint64_t>::max()) -
                   0.5;
        orthogonalize(v, locked);
        double nv = std::sqrt(dot(v, v));
        if (nv < 1e-12) break;  // locked space spans everything reachable
        for (double& x : v) x /= nv;

        std::vector<std::vector<double>> basis{v};
        std::vector<double> alphas, betas;
        std::vector<double> w(n);
        const int steps = std::min<std::size_t>(static_cast<std::size_t>(max_steps), n);
        double scale = 0.0;
        for (int j = 0; j < steps; ++j) {
            apply(basis[static_cast<std::size_t>(j)].data(), w.data());
            const double alpha = dot(w, basis[static_cast<std::size_t>(j)]);
            alphas.push_back(alpha);
            scale = std::max(scale, std::abs(alpha));
            for (std::size_t i = 0; i < n; ++i) w[i] -= alpha * basis[static_cast<std::size_t>(j)][i];
            if (j > 0)
                for (std::size_t i = 0; i < n; ++i)
                    w[i] -= betas[static_cast<std::size_t>(j - 1)] * basis[static_cast<std::size_t>(j - 1)][i];
            orthogonalize(w, locked);
            orthogonalize(w, basis);
            const double beta = std::sqrt(dot(w, w));
            if (!(beta > scale * 1e-13) || j + 1 == steps) break;
            betas.push_back(beta);
            std::vector<double> next(n);
            for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / beta;
            basis.push_back(std::move(next));
        }

        const int m = static_cast<int>(alphas.size());
        if (m == 0) break;
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alphas[static_cast<std::size_t>(i)];
            if (i + 1 < m) {
                t(i, i + 1) = betas[static_cast<std::size_t>(i)];
                t(i + 1, i) = betas[static_cast<std::size_t>(i)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const int want = k - static_cast<int>(result.values.size());
        for (int a = 0; a < std::min(want, m); ++a) {
            const int col = m - 1 - a;  // eigenvalues ascending in Eigen
            std::vector<double> x(n, 0.0);
            for (int j = 0; j < m; ++j) {
                const double c = es.eigenvectors()(j, col);
                const auto& bj = basis[static_cast<std::size_t>(j)];
                for (std::size_t i = 0; i < n; ++i) x[i] += c * bj[i];
            }
            const double nx = std::sqrt(dot(x, x));
            if (nx > 0)
                for (double& xv : x) xv /= nx;
            result.values.push_back(es.eigenvalues()(col));
            result.vectors.push_back(x);
            locked.push_back(result.vectors.back());
        }
        ++restarts;
    }

    // merge-sort by value descending (restarts can interleave values)
    std::vector<std::size_t> order(result.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return result.values[a] > result.values[b]; });
    EigenPairs sorted;
    for (std::size_t idx : order) {
        sorted.values.push_back(result.values[idx]);
        sorted.vectors.push_back(std::move(result.vectors[idx]));
    }
    return sorted;
}

constexpr std::size_t kDenseEigenLimit = 1024;

// Double-centered squared-distance Gram matrix, dense.
inline Eigen::MatrixXd torgerson_gram(const DistanceMatrix& d) {
    const std::size_t n = d.size();
    Eigen::MatrixXd d2(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d(i, j);
            d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v * v;
        }
    const Eigen::VectorXd row_means = d2.rowwise().mean();
    const double grand = d2.mean();
    Eigen::MatrixXd b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                -0.5 * (d2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                        row_means(static_cast<Eigen::Index>(i)) -
                        row_means(static_cast<Eigen::Index>(j)) + grand);
    return b;
}

// y = D2 x from the triangle, squares computed on the fly. Each output row
// is a sequential sum over all columns, so row-chunked parallelism is exact.
inline void squared_distance_matvec(const DistanceMatrix& d, const double* x, double* y) {
    const std::size_t n = d.size();
    parallel_chunks(n, 128, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double v = d(i, j);
                s += v * v * x[j];
            }
            y[i] = s;
        }
    });
}

inline EigenPairs mds_eigenpairs(const DistanceMatrix& d, int k) {
    const std::size_t n = d.size();
    if (n <= kDenseEigenLimit) {
        const Eigen::MatrixXd b = torgerson_gram(d);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
        EigenPairs out;
        for (int a = 0; a < k && a < static_cast<int>(n); ++a) {
            const auto col = static_cast<Eigen::Index>(n) - 1 - a;
            out.values.push_back(es.eigenvalues()(col));
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), col);
            out.vectors.push_back(std::move(v));
        }
        return out;
    }
    std::vector<double> t(n), u(n);
    auto apply = [&](const double* x, double* y) {
        double mean_x = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean_x += x[i];
        mean_x /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = x[i] - mean_x;
        squared_distance_matvec(d, t.data(), u.data());
        double mean_u = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean_u += u[i];
        mean_u /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = -0.5 * (u[i] - mean_u);
    };
    return lanczos_topk(n, k, apply, {}, 96);
}

}  // namespace detail

// Classical (Torgerson) multidimensional scaling: top-k eigenpairs of the
// double-centered Gram matrix, coordinates scaled by sqrt(eigenvalue).
// Negative or missing eigenvalues yield zero-width axes.
inline FilterValues classical_mds(const DistanceMatrix& d, int k) {
    const std::size_t n = d.size();
    if (n < 2) throw Error("classical_mds: need at least 2 points");
    if (k < 1 || k > 2) throw Error("classical_mds: output dimension must be 1 or 2");

    const detail::EigenPairs pairs = detail::mds_eigenpairs(d, k);
    FilterValues out;
    out.n = n;
    out.dim = k;
    out.coords.assign(n * static_cast<std::size_t>(k), 0.0);
    for (int a = 0; a < k; ++a) {
        if (a >= static_cast<int>(pairs.values.size())) continue;
        const double lambda = pairs.values[static_cast<std::size_t>(a)];
        if (!(lambda > 0.0)) continue;  // truncated to a zero-width axis
        const double s = std::sqrt(lambda);
        std::vector<double> axis(n);
        for (std::size_t i = 0; i < n; ++i)
            axis[i] = s * pairs.vectors[static_cast<std::size_t>(a)][i];
        detail::fix_axis_sign(axis);
        for (std::size_t i = 0; i < n; ++i) out.at(i, a) = axis[i];
    }
    return out;
}

namespace detail {

struct KnnGraph {
    std::vector<std::vector<int>> adjacency;  // symmetrized, ascending neighbor lists
};

inline KnnGraph build_knn_graph(const DistanceMatrix& d, int k_neighbors) {
    const std::size_t n = d.size();
    std::vector<std::vector<int>> nearest(n);
    parallel_chunks(n, 64, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            // max-heap over (distance, index); ties resolved toward smaller index
            using Entry = std::pair<double, int>;
            std::priority_queue<Entry> heap;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const Entry e{d(i, j), static_cast<int>(j)};
                if (heap.size() < static_cast<std::size_t>(k_neighbors)) {
                    heap.push(e);
                } else if (e < heap.top()) {
                    heap.pop();
                    heap.push(e);
                }
            }
            auto& out = nearest[i];
            while (!heap.empty()) {
                out.push_back(heap.top().second);
                heap.pop();
            }
            std::sort(out.begin(), out.end());
        }
    });

    KnnGraph g;
    g.adjacency.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        for (int j : nearest[i]) {
            g.adjacency[i].push_back(j);
            g.adjacency[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
        }
    for (auto& adj : g.adjacency) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    return g;
}

// Two eigenvectors of the normalized Laplacian with smallest nonzero
// eigenvalues, for one connected vertex set (local indices into `members`).
inline std::vector<std::array<double, 2>> component_eigenmap(const KnnGraph& g,
                                                             const std::vector<int>& members) {
    const std::size_t m = members.size();
    std::vector<std::array<double, 2>> coords(m, {0.0, 0.0});
    if (m == 1) return coords;

    std::vector<int> local_of(g.adjacency.size(), -1);
    for (std::size_t i = 0; i < m; ++i) local_of[static_cast<std::size_t>(members[i])] = static_cast<int>(i);
    std::vector<double> inv_sqrt_deg(m);
    for (std::size_t i = 0; i < m; ++i)
        inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(g.adjacency[static_cast<std::size_t>(members[i])].size()));

    if (m <= kDenseEigenLimit) {
        Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                        static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (int nb : g.adjacency[static_cast<std::size_t>(members[i])]) {
                const int j = local_of[static_cast<std::size_t>(nb)];
                lap(static_cast<Eigen::Index>(i), j) = -inv_sqrt_deg[i] * inv_sqrt_deg[static_cast<std::size_t>(j)];
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
        // index 0 is the component's null vector; take the next two
        for (int a = 0; a < 2; ++a) {
            const int col = 1 + a;
            if (col >= static_cast<int>(m)) break;
            for (std::size_t i = 0; i < m; ++i)
                coords[i][static_cast<std::size_t>(a)] = es.eigenvectors()(static_cast<Eigen::Index>(i), col);
        }
    } else {
        // Lanczos on 2I - L restricted to the complement of the known null
        // vector; largest pairs there are the smallest nonzero of L.
        std::vector<double> null_vec(m);
        double nn = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            null_vec[i] = 1.0 / inv_sqrt_deg[i];  // D^{1/2} 1
            nn += null_vec[i] * null_vec[i];
        }
        nn = std::sqrt(nn);
        for (double& v : null_vec) v /= nn;

        auto apply = [&](const double* x, double* y) {
            parallel_chunks(m, 256, [&](std::size_t begin, std::size_t end) {
                for (std::size_t i = begin; i < end; ++i) {
                    double s = x[i];  // (2I - L) x = x + D^{-1/2} A D^{-1/2} x
                    for (int nb : g.adjacency[static_cast<std::size_t>(members[i])]) {
                        const int j = local_of[static_cast<std::size_t>(nb)];
                        s += inv_sqrt_deg[i] * inv_sqrt_deg[static_cast<std::size_t>(j)] *
                             x[static_cast<std::size_t>(j)];
                    }
                    y[i] = s;
                }
            });
        };
        const EigenPairs pairs = lanczos_topk(m, 2, apply, {null_vec}, 200);
        for (int a = 0; a < 2 && a < static_cast<int>(pairs.vectors.size()); ++a)
            for (std::size_t i = 0; i < m; ++i)
                coords[i][static_cast<std::size_t>(a)] = pairs.vectors[static_cast<std::size_t>(a)][i];
    }

    for (int a = 0; a < 2; ++a) {
        std::vector<double> axis(m);
        for (std::size_t i = 0; i < m; ++i) axis[i] = coords[i][static_cast<std::size_t>(a)];
        fix_axis_sign(axis);
        for (std::size_t i = 0; i < m; ++i) coords[i][static_cast<std::size_t>(a)] = axis[i];
    }
    return coords;
}

}  // namespace detail

// Deterministic neighborhood lens: Laplacian-eigenmap coordinates of the
// symmetrized k-nearest-neighbor graph. Components of a disconnected graph
// are embedded separately, min-max normalized, and offset along the first
// axis by component rank so they occupy disjoint regions.
inline FilterValues neighborhood_lens(const DistanceMatrix& d, int k_neighbors) {
    const std::size_t n = d.size();
    if (k_neighbors < 1) throw Error("neighborhood_lens: k_neighbors must be >= 1");
    if (n <= static_cast<std::size_t>(k_neighbors))
        throw Error("neighborhood_lens: need more points than k_neighbors");

    FilterValues out;
    out.n = n;
    out.dim = 2;
    out.coords.assign(n * 2, 0.0);
    if (d.max_value() == 0.0) return out;  // all points identical: all-zero coordinates

    const detail::KnnGraph g = detail::build_knn_graph(d, k_neighbors);

    // connected components in discovery order of the smallest contained index
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> comps;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(comps.size());
        std::vector<int> stack{static_cast<int>(s)}, members;
        comp[s] = id;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int nb : g.adjacency[static_cast<std::size_t>(v)])
                if (comp[static_cast<std::size_t>(nb)] < 0) {
                    comp[static_cast<std::size_t>(nb)] = id;
                    stack.push_back(nb);
                }
        }
        std::sort(members.begin(), members.end());
        comps.push_back(std::move(members));
    }

    for (std::size_t c = 0; c < comps.size(); ++c) {
        auto coords = detail::component_eigenmap(g, comps[c]);
        if (comps.size() > 1) {
            // normalize each axis to [0,1] and shift by component rank
            for (int a = 0; a < 2; ++a) {
                double lo = std::numeric_limits<double>::infinity();
                double hi = -std::numeric_limits<double>::infinity();
                for (const auto& p : coords) {
                    lo = std::min(lo, p[static_cast<std::size_t>(a)]);
                    hi = std::max(hi, p[static_cast<std::size_t>(a)]);
                }
                const double range = hi - lo;
                for (auto& p : coords)
                    p[static_cast<std::size_t>(a)] =
                        range > 0 ? (p[static_cast<std::size_t>(a)] - lo) / range : 0.5;
            }
            for (auto& p : coords) p[0] += 2.0 * static_cast<double>(c);
        }
        for (std::size_t i = 0; i < comps[c].size(); ++i) {
            out.at(static_cast<std::size_t>(comps[c][i]), 0) = coords[i][0];
            out.at(static_cast<std::size_t>(comps[c][i]), 1) = coords[i][1];
        }
    }
    return out;
}

}  // namespace thd
