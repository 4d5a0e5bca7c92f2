#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "thd/classifier.hpp"
#include "thd/config.hpp"
#include "thd/report.hpp"

namespace thd {

struct ArtifactFile {
    std::string path;  // relative to the output directory
    std::size_t bytes = 0;
    std::string sha256;
};

struct RunArtifacts {
    std::filesystem::path dir;
    std::string fingerprint;
    std::vector<ArtifactFile> files;  // sorted by path, manifest last
};

namespace detail {

inline std::filesystem::path resolve_output_dir(const RunConfig& config) {
    if (const char* env = std::getenv("THD_OUTPUT_DIR"); env && *env) return env;
    return config.output_dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << content;
}

inline Json summary_json(const SplitSummary& s) {
    Json j;
    j["id"] = s.node_id;
    j["parent"] = s.parent_id;
    j["size"] = s.size;
    j["label_distribution"] = distribution_json(s.label_distribution);
    j["top_features"] = Json::array();
    for (const FeatureStat& st : s.top_features) j["top_features"].push_back(feature_stat_json(st));
    j["p_threshold"] = s.p_threshold;
    j["top_k"] = s.top_k;
    return j;
}

inline Dataset load_dataset(const RunConfig& config, const std::filesystem::path& anchor = {}) {
    std::filesystem::path p = config.dataset_path;
    if (p.is_relative() && !std::filesystem::exists(p) && !anchor.empty() &&
        std::filesystem::exists(anchor / p))
        p = anchor / p;
    return ingest_csv(p, config.schema);
}

}  // namespace detail

// Runs one THD and writes tree.json, summaries.json, tree.dot, per-split
// network documents, and a manifest with content hashes. Byte-identical for
// identical config + data, independent of the thread count.
inline RunArtifacts cmd_run(const RunConfig& config, std::ostream& log) {
    config.validate();
    set_thread_limit(static_cast<std::size_t>(config.threads));

    const Dataset ds = detail::load_dataset(config);
    const std::string fingerprint = config.fingerprint(ds);
    log << "dataset: " << ds.row_count() << " rows, " << ds.features().size() << " features\n";

    const ThdTree tree = run_thd(ds, config.thd);
    const TreeStats stats = tree_statistics(ds, tree);
    log << "tree: " << stats.node_count << " nodes, " << stats.leaf_count << " leaves, depth "
        << stats.max_depth << ", " << stats.total_outliers << " outliers\n";

    RunArtifacts artifacts;
    artifacts.dir = detail::resolve_output_dir(config);
    artifacts.fingerprint = fingerprint;

    std::vector<std::pair<std::string, std::string>> contents;  // path -> bytes

    // embed only the semantic configuration; execution knobs (threads,
    // output_dir) must not leak into artifact bytes
    nlohmann::json semantic = config.to_json();
    semantic.erase("output_dir");
    semantic.erase("threads");
    const Json config_json = Json::parse(semantic.dump());
    contents.emplace_back("tree.json", export_tree_json(ds, tree, &config_json));

    Json summaries;
    summaries["format"] = "thd-summaries/1";
    summaries["fingerprint"] = fingerprint;
    summaries["splits"] = Json::array();
    for (const NodeStat& ns : stats.nodes)
        summaries["splits"].push_back(
            detail::summary_json(summarize_split(ds, tree, ns.id, config.stats)));
    contents.emplace_back("summaries.json", summaries.dump(2) + "\n");

    contents.emplace_back("tree.dot", export_tree_dot(ds, tree, config.stats));

    auto export_split_networks = [&](auto&& self, const ThdNode& node) -> void {
        if (node.id == "1" || !node.children.empty())
            contents.emplace_back("networks/" + node.id + ".json",
                                  export_network_json(ds, node.network));
        for (const ThdNode& child : node.children) self(self, child);
    };
    export_split_networks(export_split_networks, tree.root);

    std::sort(contents.begin(), contents.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    Json manifest;
    manifest["format"] = "thd-manifest/1";
    manifest["fingerprint"] = fingerprint;
    manifest["files"] = Json::array();
    for (const auto& [rel, bytes] : contents) {
        ArtifactFile f{rel, bytes.size(), Sha256::of(bytes)};
        manifest["files"].push_back(
            Json{{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
        artifacts.files.push_back(std::move(f));
    }
    contents.emplace_back("manifest.json", manifest.dump(2) + "\n");
    artifacts.files.push_back({"manifest.json", contents.back().second.size(),
                               Sha256::of(contents.back().second)});

    for (const auto& [rel, bytes] : contents) detail::write_file(artifacts.dir / rel, bytes);
    log << "wrote " << contents.size() << " artifacts to " << artifacts.dir.string() << "\n";
    return artifacts;
}

namespace detail {

struct LoadedTree {
    ThdTree tree;
    RunConfig config;
    Dataset dataset;
};

inline LoadedTree load_tree_document(const std::filesystem::path& tree_path) {
    std::ifstream in(tree_path, std::ios::binary);
    if (!in) throw Error("cannot open tree file: " + tree_path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    LoadedTree lt;
    lt.tree = import_tree_json(text);
    lt.config = RunConfig::from_json(nlohmann::json::parse(embedded_config(text).dump()));
    lt.dataset = load_dataset(lt.config, tree_path.parent_path());
    // the tree fingerprint pins params + dataset content; a swapped or edited
    // dataset must not silently produce wrong explanations
    const std::string expected =
        Sha256::of(detail::thd_params_digest(lt.tree.params) + lt.dataset.content_sha256());
    if (expected != lt.tree.fingerprint)
        throw Error("dataset at '" + lt.config.dataset_path +
                    "' does not match the tree document (fingerprint mismatch)");
    return lt;
}

}  // namespace detail

// Prints the explanation sentences followed by the JSON trace.
inline void cmd_trace(const std::filesystem::path& tree_path, RowId row, std::ostream& out) {
    const detail::LoadedTree lt = detail::load_tree_document(tree_path);
    if (row < 0 || static_cast<std::size_t>(row) >= lt.dataset.row_count())
        throw UsageError("row id " + std::to_string(row) + " out of range (dataset has " +
                         std::to_string(lt.dataset.row_count()) + " rows)");
    const ExplanationTrace tr = explain_individual(lt.dataset, lt.tree, row, lt.config.stats);
    for (const std::string& s : tr.sentences) out << s << "\n";
    out << to_json(tr).dump(2) << "\n";
}

// Exports one node's topological network in the requested format.
inline void cmd_export(const std::filesystem::path& tree_path, const std::string& node_id,
                       const std::string& format, const std::optional<std::string>& coloring,
                       std::ostream& out) {
    const NetworkFormat fmt = parse_network_format(format);
    const detail::LoadedTree lt = detail::load_tree_document(tree_path);
    const ThdNode* node = lt.tree.find(node_id);
    if (!node) throw UsageError("unknown node id '" + node_id + "'");

    std::optional<std::string> level;
    if (coloring) {
        const int c = lt.dataset.feature_index(*coloring);
        if (c < 0) throw UsageError("unknown feature '" + *coloring + "'");
        if (lt.dataset.feature(static_cast<std::size_t>(c)).kind == FeatureKind::Categorical) {
            StatsOptions opts = lt.config.stats;
            level = detail::resolve_risky_level(lt.dataset, opts);
        }
    }
    out << export_network(lt.dataset, node->network, fmt, coloring, level);
}

// Builds a decomposition over train + test jointly and writes a predictions
// CSV; prints evaluation metrics when the test file carries labels.
inline void cmd_classify(const RunConfig& config, const std::filesystem::path& train_path,
                         const std::filesystem::path& test_path, int k_votes, std::ostream& log) {
    config.validate();
    set_thread_limit(static_cast<std::size_t>(config.threads));

    const Dataset train_ds = ingest_csv(train_path, config.schema);
    const Dataset test_ds = ingest_csv(test_path, config.schema);
    const Dataset ds = Dataset::concat(train_ds, test_ds);
    const Group train = Group::range(0, static_cast<RowId>(train_ds.row_count()));
    const Group test = Group::range(static_cast<RowId>(train_ds.row_count()),
                                    static_cast<RowId>(ds.row_count()));

    const ClassifierResult result = fit_predict(ds, train, test, config.thd, k_votes);

    std::ostringstream csv_out;
    csv_out << "row_id,label,confidence,leaf_id,abstain,outlier\n";
    for (const Prediction& p : result.predictions)
        csv_out << p.row << "," << p.label << "," << detail::fmt6(p.confidence) << "," << p.leaf_id
                << "," << (p.abstained ? 1 : 0) << "," << (p.outlier_vote ? 1 : 0) << "\n";
    const std::filesystem::path out_dir = detail::resolve_output_dir(config);
    detail::write_file(out_dir / "predictions.csv", csv_out.str());
    log << "wrote " << (out_dir / "predictions.csv").string() << " (" << result.predictions.size()
        << " predictions)\n";

    // evaluate when the test slice is fully labeled
    const int label_col = ds.label_index();
    if (label_col >= 0) {
        std::map<RowId, std::string> truth;
        bool complete = true;
        for (RowId r : test.rows) {
            if (ds.is_missing(r, static_cast<std::size_t>(label_col))) {
                complete = false;
                break;
            }
            truth[r] = ds.levels(static_cast<std::size_t>(label_col))[static_cast<std::size_t>(
                ds.value(r, static_cast<std::size_t>(label_col)))];
        }
        if (complete && !truth.empty()) {
            const Evaluation ev = evaluate(result.predictions, truth);
            log << "accuracy " << detail::fmt6(ev.accuracy) << ", abstain rate "
                << detail::fmt6(ev.abstain_rate) << "\n";
            for (const ClassMetrics& m : ev.per_class)
                log << "  " << m.label << ": precision " << detail::fmt6(m.precision) << ", recall "
                    << detail::fmt6(m.recall) << " (support " << m.support << ")\n";
        }
    }
}

}  // namespace thd
