#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "thd/mapper.hpp"
#include "thd/sha256.hpp"

namespace thd {

struct ThdParams {
    int initial_resolution = 1;   // N0
    int resolution_increment = 1; // dN
    double gain = 2.7;            // fixed for the entire decomposition
    int split_threshold = 20;     // t: minimum rows for a component to branch
    int max_resolution = 100;     // cap guaranteeing termination
    Metric metric = Metric::Vne;
    LensSpec lens;
    int histogram_bins = 10;

    void validate() const {
        if (initial_resolution < 1) throw Error("thd: initial_resolution must be >= 1");
        if (resolution_increment < 1) throw Error("thd: resolution_increment must be >= 1");
        if (!(gain >= 1.0)) throw Error("thd: gain must be >= 1");
        if (split_threshold < 1) throw Error("thd: split_threshold must be >= 1");
        if (max_resolution < initial_resolution)
            throw Error("thd: max_resolution must be >= initial_resolution");
        if (histogram_bins < 1) throw Error("thd: histogram_bins must be >= 1");
    }
};

// Summary of one MAPPER run while a node waits for its split.
struct ResolutionStep {
    int resolution = 0;
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t components = 0;
    std::size_t components_at_threshold = 0;
};

// One group in the decomposition. The linear (non-branching) resolution path
// is recorded in resolution_history; children appear only at a split.
struct ThdNode {
    std::string id;  // dotted path label, root is "1"
    Group group;
    std::vector<ResolutionStep> resolution_history;
    TopologicalNetwork network;   // at the terminating resolution
    std::vector<RowId> outliers;  // rows of sub-threshold components at the split
    std::vector<ThdNode> children;

    bool leaf() const { return children.empty(); }
};

struct ThdTree {
    ThdParams params;
    ThdNode root;
    std::string fingerprint;  // sha256 over params and dataset content

    const ThdNode* find(std::string_view id) const {
        if (id.empty() || id.substr(0, 1) != "1") return nullptr;
        const ThdNode* cur = &root;
        std::size_t pos = 1;
        while (pos < id.size()) {
            if (id[pos] != '.') return nullptr;
            std::size_t end = id.find('.', pos + 1);
            if (end == std::string_view::npos) end = id.size();
            int rank = 0;
            for (std::size_t i = pos + 1; i < end; ++i) {
                if (id[i] < '0' || id[i] > '9') return nullptr;
                rank = rank * 10 + (id[i] - '0');
            }
            if (rank < 1 || static_cast<std::size_t>(rank) > cur->children.size()) return nullptr;
            cur = &cur->children[static_cast<std::size_t>(rank - 1)];
            pos = end;
        }
        return cur;
    }
};

namespace detail {

inline std::string thd_params_digest(const ThdParams& p) {
    Sha256 h;
    h.update_pod(p.initial_resolution);
    h.update_pod(p.resolution_increment);
    h.update_pod(p.gain);
    h.update_pod(p.split_threshold);
    h.update_pod(p.max_resolution);
    h.update_pod(static_cast<int>(p.metric));
    h.update_pod(static_cast<int>(p.lens.kind));
    h.update_pod(p.lens.out_dim);
    h.update_pod(p.lens.k_neighbors);
    h.update_pod(p.histogram_bins);
    return h.hex_digest();
}

inline void run_thd_node(const Dataset& ds, ThdNode& node, const ThdParams& params) {
    const auto threshold = static_cast<std::size_t>(params.split_threshold);

    if (node.group.size() < 2) {
        // a singleton can never split; terminate with the trivial network
        node.network = build_network({{0, node.group.rows}});
        node.resolution_history.push_back({params.initial_resolution, 1, 0, 1,
                                           node.group.size() >= threshold ? std::size_t{1} : std::size_t{0}});
        return;
    }

    // the group-level context (distance triangle included) is scoped so it is
    // released before recursing into children
    {
        MapperParams mp;
        mp.metric = params.metric;
        mp.lens = params.lens;
        mp.histogram_bins = params.histogram_bins;
        mp.cover.gain = params.gain;
        const MapperContext ctx = MapperContext::build(ds, node.group, mp);

        int resolution = params.initial_resolution;
        for (;;) {
            CoverParams cover{resolution, params.gain};
            const TopologicalNetwork net =
                mapper_at_resolution(ctx, node.group, cover, params.histogram_bins);
            const std::vector<Component> comps = connected_components(net);

            std::vector<const Component*> big;
            for (const Component& c : comps)
                if (c.rows.size() >= threshold) big.push_back(&c);

            node.resolution_history.push_back(
                {resolution, net.nodes.size(), net.edges.size(), comps.size(), big.size()});

            if (big.size() >= 2) {
                node.network = net;
                for (const Component& c : comps)
                    if (c.rows.size() < threshold)
                        node.outliers.insert(node.outliers.end(), c.rows.begin(), c.rows.end());
                std::sort(node.outliers.begin(), node.outliers.end());

                // children ranked by descending size (components are pre-sorted)
                for (std::size_t i = 0; i < big.size(); ++i) {
                    ThdNode child;
                    child.id = node.id + "." + std::to_string(i + 1);
                    child.group = Group{big[i]->rows};
                    node.children.push_back(std::move(child));
                }
                break;
            }

            if (resolution + params.resolution_increment > params.max_resolution) {
                node.network = net;  // leaf: cap reached without a split
                return;
            }
            resolution += params.resolution_increment;
        }
    }
    for (ThdNode& child : node.children) run_thd_node(ds, child, params);
}

}  // namespace detail

// Decomposes a group by running MAPPER at increasing resolution until the
// network's above-threshold components number at least two, then recursing
// on each such component with the resolution reset. Rows of sub-threshold
// components are dropped as outliers at the split.
inline ThdTree run_thd(const Dataset& ds, const Group& root_group, const ThdParams& params) {
    params.validate();
    if (root_group.size() < static_cast<std::size_t>(params.split_threshold))
        throw Error("run_thd: group smaller than the split threshold");
    ThdTree tree;
    tree.params = params;
    tree.fingerprint = Sha256::of(detail::thd_params_digest(params) + ds.content_sha256());
    tree.root.id = "1";
    tree.root.group = root_group;
    detail::run_thd_node(ds, tree.root, params);
    return tree;
}

inline ThdTree run_thd(const Dataset& ds, const ThdParams& params) {
    return run_thd(ds, ds.all_rows(), params);
}

// Root-to-deepest path of one row; dropped_as_outlier marks rows that exit
// through a sub-threshold component instead of reaching a leaf.
struct PointPath {
    std::vector<std::string> node_ids;
    bool dropped_as_outlier = false;
};

inline PointPath trace_point_path(const ThdTree& tree, RowId row) {
    if (!tree.root.group.contains(row))
        throw Error("trace_point_path: row " + std::to_string(row) + " not in the tree");
    PointPath path;
    const ThdNode* cur = &tree.root;
    path.node_ids.push_back(cur->id);
    for (;;) {
        if (std::binary_search(cur->outliers.begin(), cur->outliers.end(), row)) {
            path.dropped_as_outlier = true;
            return path;
        }
        const ThdNode* next = nullptr;
        for (const ThdNode& child : cur->children)
            if (child.group.contains(row)) {
                next = &child;
                break;
            }
        if (!next) return path;  // leaf
        cur = next;
        path.node_ids.push_back(cur->id);
    }
}

struct NodeStat {
    std::string id;
    std::size_t size = 0;
    int depth = 0;
    std::size_t outlier_count = 0;
    std::map<std::string, double> label_distribution;  // empty without a label
};

struct TreeStats {
    std::size_t node_count = 0;
    std::size_t leaf_count = 0;
    std::size_t total_outliers = 0;
    int max_depth = 0;
    std::vector<NodeStat> nodes;  // preorder
};

inline TreeStats tree_statistics(const Dataset& ds, const ThdTree& tree) {
    TreeStats stats;
    auto walk = [&](auto&& self, const ThdNode& node, int depth) -> void {
        NodeStat ns;
        ns.id = node.id;
        ns.size = node.group.size();
        ns.depth = depth;
        ns.outlier_count = node.outliers.size();
        if (ds.label_index() >= 0 && !node.group.empty())
            ns.label_distribution = label_distribution(ds, node.group);
        stats.nodes.push_back(std::move(ns));
        ++stats.node_count;
        stats.total_outliers += node.outliers.size();
        stats.max_depth = std::max(stats.max_depth, depth);
        if (node.leaf()) ++stats.leaf_count;
        for (const ThdNode& child : node.children) self(self, child, depth + 1);
    };
    walk(walk, tree.root, 0);
    return stats;
}

}  // namespace thd
