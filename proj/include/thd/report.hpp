#pragma once

#include <json.hpp>

#include <cstdio>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "thd/stats.hpp"
#include "thd/thd.hpp"

namespace thd {

using Json = nlohmann::ordered_json;

namespace detail {

// All exported numerics are fixed at 6 significant digits.
inline std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline double round6(double v) {
    if (std::isnan(v)) return v;
    return std::strtod(fmt6(v).c_str(), nullptr);
}

inline Json distribution_json(const std::map<std::string, double>& dist) {
    Json j = Json::object();
    for (const auto& [k, v] : dist) j[k] = round6(v);
    return j;
}

inline std::string parent_of(const std::string& id) {
    const auto pos = id.rfind('.');
    return pos == std::string::npos ? std::string() : id.substr(0, pos);
}

inline Json feature_stat_json(const FeatureStat& st) {
    Json f;
    f["name"] = st.name;
    f["kind"] = st.kind == StatKind::Ks ? "ks" : "hypergeometric";
    f["statistic"] = round6(st.statistic);
    f["p_value"] = round6(st.p_value);
    f["direction"] = st.direction == Direction::Higher ? "higher" : "lower";
    f["group_mean"] = round6(st.group_mean);
    f["group_median"] = round6(st.group_median);
    f["baseline_mean"] = round6(st.baseline_mean);
    f["baseline_median"] = round6(st.baseline_median);
    f["group_n"] = st.group_n;
    f["baseline_n"] = st.baseline_n;
    return f;
}

}  // namespace detail

inline Group group_minus(const Group& a, const Group& b) {
    Group out;
    std::set_difference(a.rows.begin(), a.rows.end(), b.rows.begin(), b.rows.end(),
                        std::back_inserter(out.rows));
    return out;
}

struct StatsOptions {
    int top_features = 5;
    double p_threshold = 0.01;
    std::string risky_level;  // empty: the globally most frequent label level
};

// Fig-3-style node card: size, label distribution, and the strongest
// feature statistics against the rest of the split (parent minus node).
struct SplitSummary {
    std::string node_id;
    std::string parent_id;  // empty for the root
    std::size_t size = 0;
    std::map<std::string, double> label_distribution;
    std::vector<FeatureStat> top_features;
    double p_threshold = 0.01;
    int top_k = 5;
};

inline SplitSummary summarize_split(const Dataset& ds, const ThdTree& tree,
                                    std::string_view node_id, const StatsOptions& opts = {}) {
    const ThdNode* node = tree.find(node_id);
    if (!node) throw Error("summarize_split: unknown node id '" + std::string(node_id) + "'");

    SplitSummary s;
    s.node_id = node->id;
    s.parent_id = detail::parent_of(node->id);
    s.size = node->group.size();
    s.p_threshold = opts.p_threshold;
    s.top_k = opts.top_features;
    if (ds.label_index() >= 0) s.label_distribution = label_distribution(ds, node->group);
    if (s.parent_id.empty()) return s;  // the root has no baseline

    const ThdNode* parent = tree.find(s.parent_id);
    const Group baseline = group_minus(parent->group, node->group);
    if (baseline.empty()) return s;
    GroupComparison comp = compare_groups(ds, node->group, baseline);
    comp.group_id = node->id;
    comp.baseline_id = "rest of " + s.parent_id;
    for (FeatureStat& st : comp.stats) {
        if (st.p_value > opts.p_threshold) continue;
        s.top_features.push_back(std::move(st));
        if (static_cast<int>(s.top_features.size()) >= opts.top_features) break;
    }
    return s;
}

// Direction phrase per the skew rule: medians for skewed features, means
// otherwise.
inline std::string direction_phrase(const FeatureStat& st) {
    const char* dir = st.direction == Direction::Higher ? "higher" : "lower";
    const bool skewed = std::abs(st.group_mean - st.group_median) > 0.5 * st.group_stdev &&
                        st.group_stdev > 0.0;
    const double shown = skewed ? st.group_median : st.group_mean;
    const double base = skewed ? st.baseline_median : st.baseline_mean;
    return std::string(dir) + " " + st.name + " than peers (" + (skewed ? "median " : "mean ") +
           detail::fmt6(shown) + " vs " + detail::fmt6(base) + ")";
}

enum class Verdict { DenyLeaning, GrantLeaning, Neutral };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::DenyLeaning: return "deny-leaning";
        case Verdict::GrantLeaning: return "grant-leaning";
        case Verdict::Neutral: return "neutral";
    }
    return "neutral";
}

struct ExplanationHop {
    std::string node_id;
    std::size_t size = 0;
    std::vector<FeatureStat> top;  // at most 3
    std::vector<std::string> phrases;
};

// The row's story: its path through the decomposition, the strongest
// group-vs-peers statistics at every hop, and a verdict comparing the final
// group's risky-level share against the global share.
struct ExplanationTrace {
    RowId row_id = 0;
    std::vector<ExplanationHop> path;
    bool dropped_as_outlier = false;
    std::map<std::string, double> final_distribution;
    std::string risky_level;
    double final_risky_fraction = 0.0;
    double global_risky_fraction = 0.0;
    Verdict verdict = Verdict::Neutral;
    std::vector<std::string> sentences;
};

namespace detail {

inline std::string resolve_risky_level(const Dataset& ds, const StatsOptions& opts) {
    if (ds.label_index() < 0) throw Error("explain: dataset has no label column");
    if (!opts.risky_level.empty()) {
        const auto& lvls = ds.levels(static_cast<std::size_t>(ds.label_index()));
        if (std::find(lvls.begin(), lvls.end(), opts.risky_level) == lvls.end())
            throw Error("explain: unknown label level '" + opts.risky_level + "'");
        return opts.risky_level;
    }
    const auto dist = label_distribution(ds, ds.all_rows());
    std::string best;
    double best_frac = -1.0;
    for (const auto& [level, frac] : dist)
        if (frac > best_frac) {
            best = level;
            best_frac = frac;
        }
    return best;
}

inline double fraction_of(const std::map<std::string, double>& dist, const std::string& level) {
    auto it = dist.find(level);
    return it == dist.end() ? 0.0 : it->second;
}

inline std::string percent(double frac) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", frac * 100.0);
    return buf;
}

}  // namespace detail

inline ExplanationTrace explain_individual(const Dataset& ds, const ThdTree& tree, RowId row,
                                           const StatsOptions& opts = {}) {
    const PointPath pp = trace_point_path(tree, row);

    ExplanationTrace tr;
    tr.row_id = row;
    tr.dropped_as_outlier = pp.dropped_as_outlier;
    tr.risky_level = detail::resolve_risky_level(ds, opts);
    tr.global_risky_fraction =
        detail::fraction_of(label_distribution(ds, tree.root.group), tr.risky_level);

    StatsOptions hop_opts = opts;
    hop_opts.top_features = 3;
    for (const std::string& node_id : pp.node_ids) {
        const SplitSummary s = summarize_split(ds, tree, node_id, hop_opts);
        ExplanationHop hop;
        hop.node_id = node_id;
        hop.size = s.size;
        hop.top = s.top_features;
        for (const FeatureStat& st : hop.top) hop.phrases.push_back(direction_phrase(st));
        tr.path.push_back(std::move(hop));
    }

    const ThdNode* final_node = tree.find(pp.node_ids.back());
    tr.final_distribution = label_distribution(ds, final_node->group);
    tr.final_risky_fraction = detail::fraction_of(tr.final_distribution, tr.risky_level);

    if (std::abs(tr.final_risky_fraction - tr.global_risky_fraction) <= 1e-12)
        tr.verdict = Verdict::Neutral;
    else if (tr.final_risky_fraction > tr.global_risky_fraction)
        tr.verdict = Verdict::DenyLeaning;
    else
        tr.verdict = Verdict::GrantLeaning;

    tr.sentences.push_back("Row " + std::to_string(row) + " enters group 1 (n=" +
                           std::to_string(tr.path.front().size) + ").");
    for (std::size_t i = 1; i < tr.path.size(); ++i) {
        const ExplanationHop& hop = tr.path[i];
        std::string s = "Group " + hop.node_id + " (n=" + std::to_string(hop.size) + "): ";
        if (hop.phrases.empty()) {
            s += "no strongly distinguishing features.";
        } else {
            for (std::size_t j = 0; j < hop.phrases.size(); ++j) {
                if (j) s += "; ";
                s += hop.phrases[j];
            }
            s += ".";
        }
        tr.sentences.push_back(std::move(s));
    }
    if (tr.dropped_as_outlier)
        tr.sentences.push_back("Row " + std::to_string(row) + " leaves the decomposition at group " +
                               pp.node_ids.back() + " as part of a small component.");
    std::string verdict_sentence = std::string("Verdict: ") + to_string(tr.verdict) +
                                   " - share of level \"" + tr.risky_level +
                                   "\" in the final group is " +
                                   detail::percent(tr.final_risky_fraction) + " vs " +
                                   detail::percent(tr.global_risky_fraction) + " globally.";
    tr.sentences.push_back(std::move(verdict_sentence));
    return tr;
}

inline Json to_json(const ExplanationTrace& tr) {
    Json j;
    j["row_id"] = tr.row_id;
    j["dropped_as_outlier"] = tr.dropped_as_outlier;
    j["risky_level"] = tr.risky_level;
    j["global_risky_fraction"] = detail::round6(tr.global_risky_fraction);
    j["final_risky_fraction"] = detail::round6(tr.final_risky_fraction);
    j["verdict"] = to_string(tr.verdict);
    j["final_distribution"] = detail::distribution_json(tr.final_distribution);
    j["path"] = Json::array();
    for (const ExplanationHop& hop : tr.path) {
        Json h;
        h["node"] = hop.node_id;
        h["size"] = hop.size;
        h["features"] = Json::array();
        for (const FeatureStat& st : hop.top) h["features"].push_back(detail::feature_stat_json(st));
        j["path"].push_back(std::move(h));
    }
    j["sentences"] = tr.sentences;
    return j;
}

// Debugging aid: filter coordinates as a JSON document.
inline Json to_json(const FilterValues& f) {
    Json j;
    j["n"] = f.n;
    j["dim"] = f.dim;
    j["coords"] = Json::array();
    for (std::size_t i = 0; i < f.n; ++i) {
        Json row = Json::array();
        for (int d = 0; d < f.dim; ++d) row.push_back(detail::round6(f.at(i, d)));
        j["coords"].push_back(std::move(row));
    }
    return j;
}

// ---------------------------------------------------------------------------
// Tree export / import

namespace detail {

inline Json params_json(const ThdParams& p) {
    Json j;
    j["initial_resolution"] = p.initial_resolution;
    j["resolution_increment"] = p.resolution_increment;
    j["gain"] = p.gain;
    j["split_threshold"] = p.split_threshold;
    j["max_resolution"] = p.max_resolution;
    j["metric"] = p.metric == Metric::Vne ? "vne" : "euclidean";
    j["lens"] = Json{{"name", p.lens.kind == LensKind::Mds ? "mds" : "nhl"},
                     {"out_dim", p.lens.out_dim},
                     {"k_neighbors", p.lens.k_neighbors}};
    j["histogram_bins"] = p.histogram_bins;
    return j;
}

inline ThdParams params_from_json(const Json& j) {
    ThdParams p;
    p.initial_resolution = j.at("initial_resolution").get<int>();
    p.resolution_increment = j.at("resolution_increment").get<int>();
    p.gain = j.at("gain").get<double>();
    p.split_threshold = j.at("split_threshold").get<int>();
    p.max_resolution = j.at("max_resolution").get<int>();
    const std::string metric = j.at("metric").get<std::string>();
    if (metric == "vne") p.metric = Metric::Vne;
    else if (metric == "euclidean") p.metric = Metric::Euclidean;
    else throw Error("params: unknown metric '" + metric + "'");
    const Json& lens = j.at("lens");
    const std::string lens_name = lens.at("name").get<std::string>();
    if (lens_name == "mds") p.lens.kind = LensKind::Mds;
    else if (lens_name == "nhl") p.lens.kind = LensKind::Nhl;
    else throw Error("params: unknown lens '" + lens_name + "'");
    p.lens.out_dim = lens.at("out_dim").get<int>();
    p.lens.k_neighbors = lens.at("k_neighbors").get<int>();
    p.histogram_bins = j.at("histogram_bins").get<int>();
    return p;
}

inline Json network_json(const TopologicalNetwork& net) {
    Json j;
    j["nodes"] = Json::array();
    for (const NetworkNode& node : net.nodes)
        j["nodes"].push_back(Json{{"id", node.id}, {"bin", node.bin}, {"rows", node.rows}});
    j["edges"] = Json::array();
    for (const NetworkEdge& e : net.edges)
        j["edges"].push_back(Json::array({e.source, e.target, e.weight}));
    return j;
}

inline TopologicalNetwork network_from_json(const Json& j) {
    std::vector<std::pair<int, std::vector<RowId>>> clusters;
    for (const Json& node : j.at("nodes"))
        clusters.emplace_back(node.at("bin").get<int>(), node.at("rows").get<std::vector<RowId>>());
    TopologicalNetwork net = build_network(clusters);
    // weights are recomputed by build_network; sanity-check the edge count
    if (net.edges.size() != j.at("edges").size())
        throw Error("tree import: network edges do not match node row sets");
    return net;
}

inline Json node_json(const Dataset* ds, const ThdNode& node) {
    Json j;
    j["id"] = node.id;
    j["size"] = node.group.size();
    j["rows"] = node.group.rows;
    j["outliers"] = node.outliers;
    j["resolution_history"] = Json::array();
    for (const ResolutionStep& st : node.resolution_history)
        j["resolution_history"].push_back(Json{{"resolution", st.resolution},
                                               {"nodes", st.nodes},
                                               {"edges", st.edges},
                                               {"components", st.components},
                                               {"components_at_threshold", st.components_at_threshold}});
    if (ds && ds->label_index() >= 0 && !node.group.empty())
        j["label_distribution"] = distribution_json(label_distribution(*ds, node.group));
    j["network"] = network_json(node.network);
    j["children"] = Json::array();
    for (const ThdNode& child : node.children) j["children"].push_back(node_json(ds, child));
    return j;
}

inline ThdNode node_from_json(const Json& j) {
    ThdNode node;
    node.id = j.at("id").get<std::string>();
    node.group = Group{j.at("rows").get<std::vector<RowId>>()};
    node.outliers = j.at("outliers").get<std::vector<RowId>>();
    for (const Json& st : j.at("resolution_history"))
        node.resolution_history.push_back({st.at("resolution").get<int>(),
                                           st.at("nodes").get<std::size_t>(),
                                           st.at("edges").get<std::size_t>(),
                                           st.at("components").get<std::size_t>(),
                                           st.at("components_at_threshold").get<std::size_t>()});
    node.network = network_from_json(j.at("network"));
    for (const Json& child : j.at("children")) node.children.push_back(node_from_json(child));
    return node;
}

}  // namespace detail

// Lossless structural export; `embed` (for example the run configuration)
// is carried verbatim under "config".
inline std::string export_tree_json(const Dataset& ds, const ThdTree& tree,
                                    const Json* embed_config = nullptr) {
    Json j;
    j["format"] = "thd-tree/1";
    j["fingerprint"] = tree.fingerprint;
    if (embed_config) j["config"] = *embed_config;
    j["params"] = detail::params_json(tree.params);
    j["root"] = detail::node_json(&ds, tree.root);
    return j.dump(2) + "\n";
}

inline ThdTree import_tree_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(std::string("tree import: invalid JSON: ") + e.what());
    }
    if (!j.contains("format") || j.at("format").get<std::string>() != "thd-tree/1")
        throw Error("tree import: not a thd-tree/1 document");
    ThdTree tree;
    tree.fingerprint = j.at("fingerprint").get<std::string>();
    tree.params = detail::params_from_json(j.at("params"));
    tree.root = detail::node_from_json(j.at("root"));
    return tree;
}

inline Json embedded_config(const std::string& tree_json_text) {
    const Json j = Json::parse(tree_json_text);
    if (!j.contains("config")) throw Error("tree document carries no embedded config");
    return j.at("config");
}

inline bool tree_equal(const ThdTree& a, const ThdTree& b) {
    const auto params_eq = [](const ThdParams& x, const ThdParams& y) {
        return x.initial_resolution == y.initial_resolution &&
               x.resolution_increment == y.resolution_increment && x.gain == y.gain &&
               x.split_threshold == y.split_threshold && x.max_resolution == y.max_resolution &&
               x.metric == y.metric && x.lens.kind == y.lens.kind &&
               x.lens.out_dim == y.lens.out_dim && x.lens.k_neighbors == y.lens.k_neighbors &&
               x.histogram_bins == y.histogram_bins;
    };
    auto node_eq = [](auto&& self, const ThdNode& x, const ThdNode& y) -> bool {
        if (x.id != y.id || x.group.rows != y.group.rows || x.outliers != y.outliers) return false;
        if (x.resolution_history.size() != y.resolution_history.size()) return false;
        for (std::size_t i = 0; i < x.resolution_history.size(); ++i) {
            const auto& p = x.resolution_history[i];
            const auto& q = y.resolution_history[i];
            if (p.resolution != q.resolution || p.nodes != q.nodes || p.edges != q.edges ||
                p.components != q.components || p.components_at_threshold != q.components_at_threshold)
                return false;
        }
        if (!(x.network == y.network)) return false;
        if (x.children.size() != y.children.size()) return false;
        for (std::size_t i = 0; i < x.children.size(); ++i)
            if (!self(self, x.children[i], y.children[i])) return false;
        return true;
    };
    return params_eq(a.params, b.params) && a.fingerprint == b.fingerprint &&
           node_eq(node_eq, a.root, b.root);
}

// Fig-2-style skeleton: one DOT node per tree node labeled id / size /
// risky-level share, one edge per parent-child link.
inline std::string export_tree_dot(const Dataset& ds, const ThdTree& tree,
                                   const StatsOptions& opts = {}) {
    std::string risky;
    if (ds.label_index() >= 0) risky = detail::resolve_risky_level(ds, opts);
    std::ostringstream out;
    out << "digraph thd {\n  node [shape=box];\n";
    auto walk = [&](auto&& self, const ThdNode& node) -> void {
        out << "  \"" << node.id << "\" [label=\"" << node.id << "\\nn=" << node.group.size();
        if (!risky.empty()) {
            const double frac =
                detail::fraction_of(label_distribution(ds, node.group), risky);
            out << "\\n" << risky << " " << detail::percent(frac);
        }
        out << "\"];\n";
        for (const ThdNode& child : node.children) {
            out << "  \"" << node.id << "\" -> \"" << child.id << "\";\n";
            self(self, child);
        }
    };
    walk(walk, tree.root);
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Network export

enum class NetworkFormat { Json, Dot, Graphml };

inline NetworkFormat parse_network_format(std::string_view s) {
    if (s == "json") return NetworkFormat::Json;
    if (s == "dot") return NetworkFormat::Dot;
    if (s == "graphml") return NetworkFormat::Graphml;
    throw UsageError("unknown network format '" + std::string(s) + "' (json, dot, graphml)");
}

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

// JSON network document: nodes with row lists and per-feature means (label
// excluded), weighted edges, optional coloring values.
inline std::string export_network_json(const Dataset& ds, const TopologicalNetwork& net,
                                       const std::optional<std::string>& coloring = std::nullopt,
                                       const std::optional<std::string>& level = std::nullopt) {
    std::vector<double> colors;
    if (coloring) colors = node_coloring(ds, net, *coloring, level);

    Json j;
    j["format"] = "thd-network/1";
    if (coloring) j["coloring"] = *coloring;
    j["nodes"] = Json::array();
    for (const NetworkNode& node : net.nodes) {
        Json n;
        n["id"] = node.id;
        n["bin"] = node.bin;
        n["size"] = node.rows.size();
        n["rows"] = node.rows;
        Json means = Json::object();
        for (std::size_t c = 0; c < ds.features().size(); ++c) {
            if (ds.feature(c).is_label || ds.feature(c).kind != FeatureKind::Continuous) continue;
            double sum = 0.0;
            std::size_t present = 0;
            for (RowId r : node.rows)
                if (!ds.is_missing(r, c)) {
                    sum += ds.value(r, c);
                    ++present;
                }
            if (present > 0)
                means[ds.feature(c).name] = detail::round6(sum / static_cast<double>(present));
            else
                means[ds.feature(c).name] = nullptr;
        }
        n["means"] = std::move(means);
        if (coloring) {
            const double v = colors[static_cast<std::size_t>(node.id)];
            if (std::isnan(v)) n["color"] = nullptr;
            else n["color"] = detail::round6(v);
        }
        j["nodes"].push_back(std::move(n));
    }
    j["edges"] = Json::array();
    for (const NetworkEdge& e : net.edges)
        j["edges"].push_back(Json{{"source", e.source}, {"target", e.target}, {"weight", e.weight}});
    return j.dump(2) + "\n";
}

inline std::string export_network_dot(const Dataset& ds, const TopologicalNetwork& net,
                                      const std::optional<std::string>& coloring = std::nullopt,
                                      const std::optional<std::string>& level = std::nullopt) {
    std::vector<double> colors;
    if (coloring) colors = node_coloring(ds, net, *coloring, level);
    std::ostringstream out;
    out << "graph mapper {\n  node [shape=circle];\n";
    for (const NetworkNode& node : net.nodes) {
        out << "  n" << node.id << " [label=\"" << node.id << " (n=" << node.rows.size() << ")\"";
        if (coloring) {
            const double v = colors[static_cast<std::size_t>(node.id)];
            if (!std::isnan(v)) out << ", value=\"" << detail::fmt6(v) << "\"";
        }
        out << "];\n";
    }
    for (const NetworkEdge& e : net.edges)
        out << "  n" << e.source << " -- n" << e.target << " [label=\"" << e.weight << "\"];\n";
    out << "}\n";
    return out.str();
}

inline std::string export_network_graphml(const Dataset& ds, const TopologicalNetwork& net,
                                          const std::optional<std::string>& coloring = std::nullopt,
                                          const std::optional<std::string>& level = std::nullopt) {
    std::vector<double> colors;
    if (coloring) colors = node_coloring(ds, net, *coloring, level);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
           "  <key id=\"d0\" for=\"node\" attr.name=\"size\" attr.type=\"int\"/>\n";
    if (coloring)
        out << "  <key id=\"d1\" for=\"node\" attr.name=\"" << detail::xml_escape(*coloring)
            << "\" attr.type=\"double\"/>\n";
    out << "  <key id=\"d2\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
           "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (const NetworkNode& node : net.nodes) {
        out << "    <node id=\"n" << node.id << "\"><data key=\"d0\">" << node.rows.size()
            << "</data>";
        if (coloring) {
            const double v = colors[static_cast<std::size_t>(node.id)];
            if (!std::isnan(v)) out << "<data key=\"d1\">" << detail::fmt6(v) << "</data>";
        }
        out << "</node>\n";
    }
    for (const NetworkEdge& e : net.edges)
        out << "    <edge source=\"n" << e.source << "\" target=\"n" << e.target
            << "\"><data key=\"d2\">" << e.weight << "</data></edge>\n";
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

inline std::string export_network(const Dataset& ds, const TopologicalNetwork& net,
                                  NetworkFormat format,
                                  const std::optional<std::string>& coloring = std::nullopt,
                                  const std::optional<std::string>& level = std::nullopt) {
    switch (format) {
        case NetworkFormat::Json: return export_network_json(ds, net, coloring, level);
        case NetworkFormat::Dot: return export_network_dot(ds, net, coloring, level);
        case NetworkFormat::Graphml: return export_network_graphml(ds, net, coloring, level);
    }
    throw Error("export_network: unknown format");
}

}  // namespace thd
