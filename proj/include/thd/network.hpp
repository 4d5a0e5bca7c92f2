#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "thd/clustering.hpp"
#include "thd/types.hpp"

namespace thd {

// One cluster of the pullback cover: a vertex of the nerve.
struct NetworkNode {
    int id = 0;   // assigned in (bin index, cluster order) order
    int bin = 0;  // flattened cover bin index
    std::vector<RowId> rows;  // sorted global row ids
};

struct NetworkEdge {
    int source = 0;  // source < target
    int target = 0;
    int weight = 0;  // |shared rows|
};

// The 1-skeleton of the MAPPER nerve: an edge joins two clusters whenever
// they share at least one row.
struct TopologicalNetwork {
    std::vector<NetworkNode> nodes;
    std::vector<NetworkEdge> edges;
    std::unordered_map<RowId, std::vector<int>> row_to_nodes;  // node ids ascending

    const std::vector<int>& nodes_of(RowId r) const {
        static const std::vector<int> none;
        auto it = row_to_nodes.find(r);
        return it == row_to_nodes.end() ? none : it->second;
    }

    bool operator==(const TopologicalNetwork& other) const {
        if (nodes.size() != other.nodes.size() || edges.size() != other.edges.size()) return false;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id != other.nodes[i].id || nodes[i].bin != other.nodes[i].bin ||
                nodes[i].rows != other.nodes[i].rows)
                return false;
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].source != other.edges[i].source || edges[i].target != other.edges[i].target ||
                edges[i].weight != other.edges[i].weight)
                return false;
        return true;
    }
};

// Assembles the nerve 1-skeleton from per-bin clusters (already ordered by
// bin index, then cluster order within the bin). Edge weights count shared
// rows; edges come out sorted by (source, target).
inline TopologicalNetwork build_network(
    const std::vector<std::pair<int, std::vector<RowId>>>& clusters) {
    TopologicalNetwork net;
    net.nodes.reserve(clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        NetworkNode node;
        node.id = static_cast<int>(i);
        node.bin = clusters[i].first;
        node.rows = clusters[i].second;
        for (RowId r : node.rows) net.row_to_nodes[r].push_back(node.id);
        net.nodes.push_back(std::move(node));
    }

    // shared-row counting over each row's node list; node lists are ascending
    std::unordered_map<std::uint64_t, int> pair_counts;
    for (const auto& [row, node_ids] : net.row_to_nodes) {
        (void)row;
        for (std::size_t a = 0; a < node_ids.size(); ++a)
            for (std::size_t b = a + 1; b < node_ids.size(); ++b) {
                const auto key = (static_cast<std::uint64_t>(node_ids[a]) << 32) |
                                 static_cast<std::uint32_t>(node_ids[b]);
                ++pair_counts[key];
            }
    }
    net.edges.reserve(pair_counts.size());
    for (const auto& [key, weight] : pair_counts)
        net.edges.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu), weight});
    std::sort(net.edges.begin(), net.edges.end(), [](const NetworkEdge& x, const NetworkEdge& y) {
        if (x.source != y.source) return x.source < y.source;
        return x.target < y.target;
    });
    return net;
}

// A connected piece of the network with the union of its rows.
struct Component {
    std::vector<int> node_ids;  // ascending
    std::vector<RowId> rows;    // ascending, deduplicated
};

// Components sorted by row count descending; ties keep the component with
// the smallest node id first.
inline std::vector<Component> connected_components(const TopologicalNetwork& net) {
    const std::size_t n = net.nodes.size();
    detail::UnionFind uf(n);
    for (const NetworkEdge& e : net.edges) uf.unite(e.source, e.target);

    std::unordered_map<int, std::size_t> comp_of_root;
    std::vector<Component> comps;
    for (std::size_t i = 0; i < n; ++i) {
        const int root = uf.find(static_cast<int>(i));
        auto [it, inserted] = comp_of_root.try_emplace(root, comps.size());
        if (inserted) comps.emplace_back();
        comps[it->second].node_ids.push_back(net.nodes[i].id);
    }
    for (auto& c : comps) {
        for (int node_id : c.node_ids) {
            const auto& rows = net.nodes[static_cast<std::size_t>(node_id)].rows;
            c.rows.insert(c.rows.end(), rows.begin(), rows.end());
        }
        std::sort(c.rows.begin(), c.rows.end());
        c.rows.erase(std::unique(c.rows.begin(), c.rows.end()), c.rows.end());
    }
    std::sort(comps.begin(), comps.end(), [](const Component& x, const Component& y) {
        if (x.rows.size() != y.rows.size()) return x.rows.size() > y.rows.size();
        return x.node_ids.front() < y.node_ids.front();
    });
    return comps;
}

}  // namespace thd
