#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "thd/dataset.hpp"
#include "thd/report.hpp"
#include "thd/thd.hpp"

namespace thd {

// One experiment in one JSON document. Unknown keys are rejected at every
// level so typos never silently fall back to defaults.
struct RunConfig {
    std::string dataset_path;
    CsvSchema schema;
    ThdParams thd;
    StatsOptions stats;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int threads = 0;  // 0: hardware concurrency

    void validate() const {
        if (dataset_path.empty()) throw Error("config: 'dataset' is required");
        thd.validate();
        if (stats.top_features < 0) throw Error("config: stats.top_features must be >= 0");
        if (!(stats.p_threshold >= 0.0 && stats.p_threshold <= 1.0))
            throw Error("config: stats.p_threshold must be in [0,1]");
        if (threads < 0) throw Error("config: threads must be >= 0");
    }

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig from_json_checked(const nlohmann::json& j);
    nlohmann::json to_json() const;

    static RunConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open config file: " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw Error("config: invalid JSON in " + path.string() + ": " + e.what());
        }
        return from_json(j);
    }

    // "--set key.path=value" overrides; the value is parsed as JSON with a
    // bare-string fallback.
    void apply_override(std::string_view assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw UsageError("--set expects key.path=value, got '" + std::string(assignment) + "'");
        const std::string key(assignment.substr(0, eq));
        const std::string raw(assignment.substr(eq + 1));
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(raw);
        } catch (const nlohmann::json::parse_error&) {
            value = raw;  // unquoted string
        }
        nlohmann::json doc = to_json();
        nlohmann::json* cursor = &doc;
        std::size_t pos = 0;
        for (;;) {
            const std::size_t dot = key.find('.', pos);
            const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
            if (part.empty()) throw UsageError("--set: empty key segment in '" + key + "'");
            if (dot == std::string::npos) {
                (*cursor)[part] = value;
                break;
            }
            if (!cursor->contains(part) || !(*cursor)[part].is_object())
                (*cursor)[part] = nlohmann::json::object();
            cursor = &(*cursor)[part];
            pos = dot + 1;
        }
        *this = from_json(doc);  // re-validates, rejects unknown keys
    }

    // Hash of the semantic configuration plus the dataset contents.
    // output_dir and threads are execution knobs and deliberately excluded:
    // results must not depend on them.
    std::string fingerprint(const Dataset& ds) const {
        nlohmann::json j = to_json();
        j.erase("output_dir");
        j.erase("threads");
        return Sha256::of(j.dump() + ds.content_sha256());
    }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw Error("config: unknown key '" + key + "' in " + where);
    }
}

}  // namespace detail

inline RunConfig RunConfig::from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(
        j, {"dataset", "schema", "metric", "lens", "thd", "stats", "output_dir", "seed", "threads"},
        "config");
    if (!j.contains("dataset")) throw Error("config: 'dataset' is required");
    try {
        return from_json_checked(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
}

inline RunConfig RunConfig::from_json_checked(const nlohmann::json& j) {
    RunConfig c;
    c.dataset_path = j.at("dataset").get<std::string>();

    if (j.contains("schema")) {
        const auto& s = j.at("schema");
        detail::reject_unknown_keys(s, {"label", "excluded", "sentinels", "kinds"}, "schema");
        if (s.contains("label")) c.schema.label = s.at("label").get<std::string>();
        if (s.contains("excluded"))
            c.schema.excluded = s.at("excluded").get<std::vector<std::string>>();
        if (s.contains("sentinels"))
            c.schema.sentinels = s.at("sentinels").get<std::vector<double>>();
        if (s.contains("kinds")) {
            for (const auto& [name, kind] : s.at("kinds").items()) {
                const std::string k = kind.get<std::string>();
                if (k == "continuous") c.schema.kinds[name] = FeatureKind::Continuous;
                else if (k == "categorical") c.schema.kinds[name] = FeatureKind::Categorical;
                else throw Error("config: unknown kind '" + k + "' for column '" + name + "'");
            }
        }
    }

    if (j.contains("metric")) {
        const std::string m = j.at("metric").get<std::string>();
        if (m == "vne") c.thd.metric = Metric::Vne;
        else if (m == "euclidean") c.thd.metric = Metric::Euclidean;
        else throw Error("config: unknown metric '" + m + "'");
    }

    if (j.contains("lens")) {
        const auto& l = j.at("lens");
        detail::reject_unknown_keys(l, {"name", "out_dim", "k_neighbors"}, "lens");
        const std::string name = l.at("name").get<std::string>();
        if (name == "mds") c.thd.lens.kind = LensKind::Mds;
        else if (name == "nhl") c.thd.lens.kind = LensKind::Nhl;
        else throw Error("config: unknown lens '" + name + "'");
        if (l.contains("out_dim")) c.thd.lens.out_dim = l.at("out_dim").get<int>();
        if (l.contains("k_neighbors")) c.thd.lens.k_neighbors = l.at("k_neighbors").get<int>();
    }

    if (j.contains("thd")) {
        const auto& t = j.at("thd");
        detail::reject_unknown_keys(t,
                                    {"initial_resolution", "resolution_increment", "gain",
                                     "split_threshold", "max_resolution", "histogram_bins"},
                                    "thd");
        if (t.contains("initial_resolution"))
            c.thd.initial_resolution = t.at("initial_resolution").get<int>();
        if (t.contains("resolution_increment"))
            c.thd.resolution_increment = t.at("resolution_increment").get<int>();
        if (t.contains("gain")) c.thd.gain = t.at("gain").get<double>();
        if (t.contains("split_threshold")) c.thd.split_threshold = t.at("split_threshold").get<int>();
        if (t.contains("max_resolution")) c.thd.max_resolution = t.at("max_resolution").get<int>();
        if (t.contains("histogram_bins")) c.thd.histogram_bins = t.at("histogram_bins").get<int>();
    }

    if (j.contains("stats")) {
        const auto& s = j.at("stats");
        detail::reject_unknown_keys(s, {"top_features", "p_threshold", "risky_level"}, "stats");
        if (s.contains("top_features")) c.stats.top_features = s.at("top_features").get<int>();
        if (s.contains("p_threshold")) c.stats.p_threshold = s.at("p_threshold").get<double>();
        if (s.contains("risky_level")) c.stats.risky_level = s.at("risky_level").get<std::string>();
    }

    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    return c;
}

inline nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["dataset"] = dataset_path;
    nlohmann::json s = nlohmann::json::object();
    if (schema.label) s["label"] = *schema.label;
    s["excluded"] = schema.excluded;
    s["sentinels"] = schema.sentinels;
    nlohmann::json kinds = nlohmann::json::object();
    for (const auto& [name, kind] : schema.kinds)
        kinds[name] = kind == FeatureKind::Continuous ? "continuous" : "categorical";
    s["kinds"] = std::move(kinds);
    j["schema"] = std::move(s);
    j["metric"] = thd.metric == Metric::Vne ? "vne" : "euclidean";
    j["lens"] = {{"name", thd.lens.kind == LensKind::Mds ? "mds" : "nhl"},
                 {"out_dim", thd.lens.out_dim},
                 {"k_neighbors", thd.lens.k_neighbors}};
    j["thd"] = {{"initial_resolution", thd.initial_resolution},
                {"resolution_increment", thd.resolution_increment},
                {"gain", thd.gain},
                {"split_threshold", thd.split_threshold},
                {"max_resolution", thd.max_resolution},
                {"histogram_bins", thd.histogram_bins}};
    j["stats"] = {{"top_features", stats.top_features},
                  {"p_threshold", stats.p_threshold},
                  {"risky_level", stats.risky_level}};
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    j["threads"] = threads;
    return j;
}

}  // namespace thd
