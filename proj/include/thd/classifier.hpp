#pragma once

#include <iterator>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "thd/stats.hpp"
#include "thd/thd.hpp"

namespace thd {

struct Prediction {
    RowId row = 0;
    std::string label;  // empty on abstention
    double confidence = 0.0;
    std::string leaf_id;
    bool outlier_vote = false;  // voted from the node where the row was dropped
    bool abstained = false;
};

struct ClassifierResult {
    ThdTree tree;
    std::vector<Prediction> predictions;
};

namespace detail {

// Per-node voting context: the node's analysis matrix and variance weights,
// shared by every test row that lands in the node.
struct VoteContext {
    AnalysisMatrix matrix;
    std::vector<double> weights;  // metric weights over matrix columns
    std::unordered_map<RowId, std::size_t> local_of;
};

inline double weighted_distance(const Matrix& m, const std::vector<double>& w, std::size_t i,
                                std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const double d = m.at(i, c) - m.at(j, c);
        s += w[c] * d * d;
    }
    return std::sqrt(s);
}

}  // namespace detail

// Semi-supervised classification: one decomposition over train + test rows
// jointly (labels never touch the structure), then a majority vote among the
// k nearest labeled rows that share a network node with the test row,
// expanding to immediate neighbor nodes when voters run short.
inline ClassifierResult fit_predict(const Dataset& ds, const Group& train, const Group& test,
                                    const ThdParams& params, int k_votes = 5) {
    if (train.empty()) throw Error("fit_predict: empty training group");
    if (k_votes < 1) throw Error("fit_predict: k_votes must be >= 1");
    if (!groups_disjoint(train, test)) throw Error("fit_predict: train and test overlap");
    if (ds.label_index() < 0) throw Error("fit_predict: dataset has no label column");
    const auto label_col = static_cast<std::size_t>(ds.label_index());
    for (RowId r : train.rows)
        if (ds.is_missing(r, label_col))
            throw Error("fit_predict: training row " + std::to_string(r) + " has no label");

    Group everyone;
    everyone.rows.reserve(train.size() + test.size());
    std::merge(train.rows.begin(), train.rows.end(), test.rows.begin(), test.rows.end(),
               std::back_inserter(everyone.rows));

    ClassifierResult result;
    result.tree = run_thd(ds, everyone, params);

    // globally most frequent training label, the tie-break target
    const auto& levels = ds.levels(label_col);
    std::vector<std::size_t> global_counts(levels.size(), 0);
    for (RowId r : train.rows) ++global_counts[static_cast<std::size_t>(ds.value(r, label_col))];
    std::size_t global_majority = 0;
    for (std::size_t lv = 1; lv < levels.size(); ++lv)
        if (global_counts[lv] > global_counts[global_majority]) global_majority = lv;

    std::map<std::string, detail::VoteContext> contexts;
    auto context_for = [&](const ThdNode& node) -> detail::VoteContext& {
        auto it = contexts.find(node.id);
        if (it != contexts.end()) return it->second;
        detail::VoteContext ctx;
        ctx.matrix = analysis_matrix(ds, node.group);
        ctx.weights = detail::metric_weights(ctx.matrix.values, params.metric);
        for (std::size_t i = 0; i < ctx.matrix.row_ids.size(); ++i)
            ctx.local_of[ctx.matrix.row_ids[i]] = i;
        return contexts.emplace(node.id, std::move(ctx)).first->second;
    };

    for (RowId row : test.rows) {
        const PointPath path = trace_point_path(result.tree, row);
        const ThdNode* node = result.tree.find(path.node_ids.back());
        const TopologicalNetwork& net = node->network;

        Prediction pred;
        pred.row = row;
        pred.leaf_id = node->id;
        pred.outlier_vote = path.dropped_as_outlier;

        // candidate voters: training rows co-resident in the row's network nodes
        const std::vector<int>& own_nodes = net.nodes_of(row);
        std::set<RowId> candidates;
        auto add_rows_of = [&](int node_id) {
            for (RowId r : net.nodes[static_cast<std::size_t>(node_id)].rows)
                if (train.contains(r)) candidates.insert(r);
        };
        for (int nid : own_nodes) add_rows_of(nid);

        if (candidates.size() < static_cast<std::size_t>(k_votes)) {
            // one hop to immediate neighbors
            std::set<int> own(own_nodes.begin(), own_nodes.end());
            for (const NetworkEdge& e : net.edges) {
                if (own.count(e.source) && !own.count(e.target)) add_rows_of(e.target);
                else if (own.count(e.target) && !own.count(e.source)) add_rows_of(e.source);
            }
        }

        if (candidates.empty()) {
            pred.abstained = true;
            result.predictions.push_back(std::move(pred));
            continue;
        }

        detail::VoteContext& ctx = context_for(*node);
        const std::size_t self_local = ctx.local_of.at(row);
        std::vector<std::pair<double, RowId>> ranked;
        ranked.reserve(candidates.size());
        for (RowId cand : candidates)
            ranked.emplace_back(
                detail::weighted_distance(ctx.matrix.values, ctx.weights, self_local,
                                          ctx.local_of.at(cand)),
                cand);
        std::sort(ranked.begin(), ranked.end());
        if (ranked.size() > static_cast<std::size_t>(k_votes))
            ranked.resize(static_cast<std::size_t>(k_votes));

        std::vector<std::size_t> votes(levels.size(), 0);
        for (const auto& [dist, cand] : ranked) {
            (void)dist;
            ++votes[static_cast<std::size_t>(ds.value(cand, label_col))];
        }
        std::size_t winner = 0;
        bool any = false;
        for (std::size_t lv = 0; lv < levels.size(); ++lv) {
            if (votes[lv] == 0) continue;
            if (!any || votes[lv] > votes[winner]) {
                winner = lv;
                any = true;
            } else if (votes[lv] == votes[winner]) {
                // tie: prefer the globally more frequent label
                if (global_counts[lv] > global_counts[winner]) winner = lv;
            }
        }
        pred.label = levels[winner];
        pred.confidence = static_cast<double>(votes[winner]) / static_cast<double>(ranked.size());
        result.predictions.push_back(std::move(pred));
    }
    return result;
}

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t support = 0;  // truth count
};

// Accuracy and per-class metrics are computed over committed predictions;
// abstentions are reported through abstain_rate, never silently folded into
// the error count.
struct Evaluation {
    double accuracy = 0.0;
    double abstain_rate = 0.0;
    std::size_t total = 0;      // all predictions including abstentions
    std::size_t committed = 0;  // non-abstained predictions
    std::vector<ClassMetrics> per_class;
};

inline Evaluation evaluate(const std::vector<Prediction>& predictions,
                           const std::map<RowId, std::string>& truth) {
    Evaluation ev;
    ev.total = predictions.size();
    if (ev.total == 0) return ev;

    std::map<std::string, std::size_t> tp, predicted, actual;
    std::size_t correct = 0, abstained = 0;
    for (const Prediction& p : predictions) {
        auto it = truth.find(p.row);
        if (it == truth.end()) throw Error("evaluate: no truth for row " + std::to_string(p.row));
        ++actual[it->second];
        if (p.abstained) {
            ++abstained;
            continue;
        }
        ++predicted[p.label];
        if (p.label == it->second) {
            ++correct;
            ++tp[p.label];
        }
    }
    ev.committed = ev.total - abstained;
    ev.accuracy =
        ev.committed ? static_cast<double>(correct) / static_cast<double>(ev.committed) : 0.0;
    ev.abstain_rate = static_cast<double>(abstained) / static_cast<double>(ev.total);
    for (const auto& [label, support] : actual) {
        ClassMetrics m;
        m.label = label;
        m.support = support;
        const std::size_t np = predicted.count(label) ? predicted.at(label) : 0;
        const std::size_t ntp = tp.count(label) ? tp.at(label) : 0;
        m.precision = np ? static_cast<double>(ntp) / static_cast<double>(np) : 0.0;
        m.recall = support ? static_cast<double>(ntp) / static_cast<double>(support) : 0.0;
        ev.per_class.push_back(std::move(m));
    }
    return ev;
}

}  // namespace thd
