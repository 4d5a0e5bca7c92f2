#pragma once

#include <limits>
#include <span>
#include <vector>

#include "thd/geometry.hpp"
#include "thd/types.hpp"

namespace thd {

// One dendrogram merge: the minimum spanning tree edge that joins two
// single-linkage clusters. a < b are indices into the distance matrix.
struct Merge {
    double distance;
    int a;
    int b;
};

// Single-linkage merge sequence over a point subset, via Prim's algorithm on
// the sliced distance matrix. Deterministic: candidates are scanned in
// ascending index order with strict improvement, and the final sequence is
// sorted by (distance, a, b).
inline std::vector<Merge> single_linkage(std::span<const int> members, const DistanceMatrix& d) {
    const std::size_t m = members.size();
    if (m == 0) throw Error("single_linkage: empty point set");
    std::vector<Merge> merges;
    if (m == 1) return merges;
    merges.reserve(m - 1);

    std::vector<double> best(m, std::numeric_limits<double>::infinity());
    std::vector<int> best_from(m, 0);
    std::vector<std::uint8_t> in_tree(m, 0);
    in_tree[0] = 1;
    for (std::size_t i = 1; i < m; ++i) {
        best[i] = d(static_cast<std::size_t>(members[0]), static_cast<std::size_t>(members[i]));
        best_from[i] = 0;
    }
    for (std::size_t step = 1; step < m; ++step) {
        std::size_t pick = 0;
        double pick_d = std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::size_t i = 0; i < m; ++i) {
            if (in_tree[i]) continue;
            if (!found || best[i] < pick_d) {
                pick = i;
                pick_d = best[i];
                found = true;
            }
        }
        in_tree[pick] = 1;
        const int u = members[static_cast<std::size_t>(best_from[pick])];
        const int v = members[pick];
        merges.push_back({pick_d, std::min(u, v), std::max(u, v)});
        for (std::size_t i = 0; i < m; ++i) {
            if (in_tree[i]) continue;
            const double dv = d(static_cast<std::size_t>(members[pick]), static_cast<std::size_t>(members[i]));
            if (dv < best[i]) {
                best[i] = dv;
                best_from[i] = static_cast<int>(pick);
            }
        }
    }
    std::sort(merges.begin(), merges.end(), [](const Merge& x, const Merge& y) {
        if (x.distance != y.distance) return x.distance < y.distance;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return merges;
}

namespace detail {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);  // smaller index wins: stable roots
        parent[static_cast<std::size_t>(b)] = a;
    }
};

}  // namespace detail

// First-gap histogram cut: merge distances are histogrammed into equal-width
// bins over [0, max]; the cut sits at the lower edge of the first empty bin
// that follows an occupied one. No gap means a single cluster. Returned
// clusters partition `members`, each ascending, ordered by smallest member.
inline std::vector<std::vector<int>> cut_by_gap(std::span<const int> members,
                                                const std::vector<Merge>& merges,
                                                int histogram_bins = 10) {
    if (histogram_bins < 1) throw Error("cut_by_gap: histogram_bins must be >= 1");
    const std::size_t m = members.size();
    std::vector<std::vector<int>> clusters;
    if (m == 0) return clusters;

    double cut = std::numeric_limits<double>::infinity();
    if (!merges.empty()) {
        const double dmax = merges.back().distance;  // merges sorted ascending
        if (dmax > 0.0) {
            std::vector<std::size_t> counts(static_cast<std::size_t>(histogram_bins), 0);
            for (const Merge& mg : merges) {
                auto bin = static_cast<std::size_t>(mg.distance / dmax * histogram_bins);
                bin = std::min(bin, static_cast<std::size_t>(histogram_bins - 1));
                ++counts[bin];
            }
            std::size_t first_occupied = 0;
            while (counts[first_occupied] == 0) ++first_occupied;
            for (std::size_t k = first_occupied + 1; k < counts.size(); ++k) {
                if (counts[k] == 0) {
                    cut = dmax * static_cast<double>(k) / histogram_bins;
                    break;
                }
            }
        }
    }

    std::vector<int> local_of;
    int max_member = 0;
    for (int v : members) max_member = std::max(max_member, v);
    local_of.assign(static_cast<std::size_t>(max_member) + 1, -1);
    for (std::size_t i = 0; i < m; ++i) local_of[static_cast<std::size_t>(members[i])] = static_cast<int>(i);

    detail::UnionFind uf(m);
    for (const Merge& mg : merges) {
        if (!(mg.distance < cut)) break;
        uf.unite(local_of[static_cast<std::size_t>(mg.a)], local_of[static_cast<std::size_t>(mg.b)]);
    }

    std::vector<int> cluster_of(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        const int root = uf.find(static_cast<int>(i));
        if (cluster_of[static_cast<std::size_t>(root)] < 0) {
            cluster_of[static_cast<std::size_t>(root)] = static_cast<int>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<std::size_t>(cluster_of[static_cast<std::size_t>(root)])].push_back(
            members[i]);
    }
    return clusters;
}

}  // namespace thd
