#include <doctest.h>

#include <regex>

#include "helpers.hpp"
#include "thd/report.hpp"

using namespace thd;

namespace {

ThdParams blob_params(int max_resolution = 8) {
    ThdParams p;
    p.split_threshold = 20;
    p.gain = 2.7;
    p.max_resolution = max_resolution;
    return p;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

TEST_SUITE_BEGIN("report");

TEST_CASE("summarize_split") {
    const auto fx = testutil::make_blobs(301, 200, 300, 2, 10.0);
    const ThdTree tree = run_thd(fx.dataset, blob_params());
    REQUIRE(tree.root.children.size() == 2);

    SUBCASE("root carries size and distribution only") {
        const SplitSummary s = summarize_split(fx.dataset, tree, "1");
        CHECK(s.size == 500);
        CHECK(s.parent_id.empty());
        CHECK(s.top_features.empty());
        CHECK(s.label_distribution.at("Bad") == doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("a blob child is separated by the shifted coordinate") {
        // child 1.1 is blob B, shifted +10 on f0
        const SplitSummary s = summarize_split(fx.dataset, tree, "1.1");
        REQUIRE(!s.top_features.empty());
        CHECK(s.top_features[0].name == "f0");
        CHECK(s.top_features[0].direction == Direction::Higher);
        CHECK(s.top_features[0].statistic > 0.9);
    }
    SUBCASE("unknown node errors") {
        CHECK_THROWS_AS(summarize_split(fx.dataset, tree, "1.7.9"), Error);
    }
}

TEST_CASE("equal-distribution siblings produce no significant features") {
    // hand-built split whose children come from one distribution
    const auto fx = testutil::make_blobs(307, 120, 0, 3, 0.0);
    ThdTree tree;
    tree.params = blob_params();
    tree.fingerprint = "test";
    tree.root.id = "1";
    tree.root.group = fx.dataset.all_rows();
    ThdNode a, b;
    a.id = "1.1";
    b.id = "1.2";
    for (RowId r = 0; r < 120; ++r)
        (r % 2 == 0 ? a : b).group.rows.push_back(r);
    tree.root.children = {a, b};

    const SplitSummary s = summarize_split(fx.dataset, tree, "1.1", {.p_threshold = 0.01});
    CHECK(s.top_features.empty());
}

TEST_CASE("explain_individual") {
    const auto fx = testutil::make_blobs(311, 200, 300, 2, 10.0);
    const ThdTree tree = run_thd(fx.dataset, blob_params());
    StatsOptions opts;
    opts.risky_level = "Bad";

    SUBCASE("path matches trace_point_path and names the separating feature") {
        for (RowId row : {5, 250, 499}) {
            const ExplanationTrace tr = explain_individual(fx.dataset, tree, row, opts);
            const PointPath pp = trace_point_path(tree, row);
            REQUIRE(tr.path.size() == pp.node_ids.size());
            for (std::size_t i = 0; i < pp.node_ids.size(); ++i)
                CHECK(tr.path[i].node_id == pp.node_ids[i]);
            CHECK(tr.dropped_as_outlier == pp.dropped_as_outlier);
        }
        const ExplanationTrace tr = explain_individual(fx.dataset, tree, 250, opts);
        bool mentions_f0 = false;
        for (const auto& hop : tr.path)
            for (const auto& st : hop.top)
                if (st.name == "f0") mentions_f0 = true;
        CHECK(mentions_f0);
    }

    SUBCASE("verdict follows the risky fraction against the global average") {
        // a pure blob-B row: risky fraction ~1 vs global 0.6
        const ExplanationTrace bad = explain_individual(fx.dataset, tree, 250, opts);
        if (!bad.dropped_as_outlier && bad.final_risky_fraction > bad.global_risky_fraction)
            CHECK(bad.verdict == Verdict::DenyLeaning);
        const ExplanationTrace good = explain_individual(fx.dataset, tree, 5, opts);
        if (!good.dropped_as_outlier && good.final_risky_fraction < good.global_risky_fraction)
            CHECK(good.verdict == Verdict::GrantLeaning);
    }

    SUBCASE("a root-only tree gives a neutral verdict") {
        const auto single = testutil::make_blobs(313, 60, 0, 2);
        ThdParams p = blob_params(3);
        const ThdTree leaf_tree = run_thd(single.dataset, p);
        REQUIRE(leaf_tree.root.leaf());
        const ExplanationTrace tr = explain_individual(single.dataset, leaf_tree, 0,
                                                       {.risky_level = "Good"});
        CHECK(tr.verdict == Verdict::Neutral);
    }

    SUBCASE("sentences never reference the label feature") {
        for (RowId row : {0, 123, 456}) {
            const ExplanationTrace tr = explain_individual(fx.dataset, tree, row, opts);
            for (const std::string& s : tr.sentences)
                CHECK(s.find("outcome") == std::string::npos);
        }
    }
}

TEST_CASE("tree json export round-trips losslessly") {
    const auto fx = testutil::make_blobs(317, 100, 130, 2, 10.0);
    const ThdTree tree = run_thd(fx.dataset, blob_params(6));
    const std::string text = export_tree_json(fx.dataset, tree);
    const ThdTree again = import_tree_json(text);
    CHECK(tree_equal(tree, again));
    // re-export of the import is byte-identical
    CHECK(export_tree_json(fx.dataset, again) == text);
}

TEST_CASE("tree dot export") {
    SUBCASE("single leaf: one node statement, no edges") {
        const auto fx = testutil::make_blobs(331, 40, 0, 2);
        const ThdTree tree = run_thd(fx.dataset, blob_params(3));
        const std::string dot = export_tree_dot(fx.dataset, tree);
        CHECK(count_occurrences(dot, "[label=") == 1);
        CHECK(count_occurrences(dot, "->") == 0);
    }
    SUBCASE("blob tree: three nodes, two edges") {
        const auto fx = testutil::make_blobs(337, 200, 300, 2, 10.0);
        ThdParams p = blob_params(1);  // stop children at max_resolution 1
        const ThdTree tree = run_thd(fx.dataset, p);
        REQUIRE(tree.root.children.size() == 2);
        REQUIRE(tree.root.children[0].leaf());
        const std::string dot = export_tree_dot(fx.dataset, tree);
        CHECK(count_occurrences(dot, "[label=") == 3);
        CHECK(count_occurrences(dot, "->") == 2);
    }
}

TEST_CASE("network exports in all formats") {
    const auto fx = testutil::make_blobs(347, 40, 0, 2);
    const TopologicalNetwork net = build_network({{0, fx.dataset.all_rows().rows}});
    REQUIRE(net.nodes.size() == 1);

    SUBCASE("single node appears once in every format") {
        const std::string j = export_network(fx.dataset, net, NetworkFormat::Json);
        CHECK(Json::parse(j).at("nodes").size() == 1);
        CHECK(Json::parse(j).at("edges").empty());

        const std::string dot = export_network(fx.dataset, net, NetworkFormat::Dot);
        CHECK(count_occurrences(dot, "[label=") == 1);
        CHECK(count_occurrences(dot, "--") == 0);

        const std::string gml = export_network(fx.dataset, net, NetworkFormat::Graphml);
        CHECK(count_occurrences(gml, "<node ") == 1);
        CHECK(count_occurrences(gml, "<edge ") == 0);
    }

    SUBCASE("unknown format is a usage error") {
        CHECK_THROWS_AS(parse_network_format("svg"), UsageError);
    }
}

TEST_CASE("graphml counts match the in-memory network") {
    const auto fx = testutil::make_blobs(349, 60, 50, 2, 10.0);
    MapperParams params;
    params.cover = {4, 2.7};
    const TopologicalNetwork net = mapper(fx.dataset, fx.dataset.all_rows(), params);
    const std::string gml = export_network(fx.dataset, net, NetworkFormat::Graphml);
    CHECK(count_occurrences(gml, "<node ") == net.nodes.size());
    CHECK(count_occurrences(gml, "<edge ") == net.edges.size());
}

TEST_CASE("coloring a constant feature paints every node the same") {
    const Dataset ds = testutil::matrix_dataset(
        {{5.0, 1.0}, {5.0, 1.5}, {5.0, 3.0}, {5.0, 7.0}, {5.0, 7.5}});
    MapperParams params;
    params.cover = {2, 1.5};
    const TopologicalNetwork net = mapper(ds, ds.all_rows(), params);
    const std::string j = export_network(ds, net, NetworkFormat::Json, std::string("f0"));
    const Json doc = Json::parse(j);
    for (const auto& node : doc.at("nodes")) CHECK(node.at("color").get<double>() == 5.0);
}

TEST_CASE("filter values serialize to json for debugging") {
    FilterValues f;
    f.n = 2;
    f.dim = 2;
    f.coords = {1.0, 2.0, 3.0, 4.0};
    const Json j = to_json(f);
    CHECK(j.at("n") == 2);
    CHECK(j.at("coords")[1][0] == 3.0);
}

TEST_CASE("summary numbers are reproducible from tree and dataset") {
    const auto fx = testutil::make_blobs(353, 200, 300, 2, 10.0);
    const ThdTree tree = run_thd(fx.dataset, blob_params());
    const SplitSummary s = summarize_split(fx.dataset, tree, "1.1");

    const ThdNode* node = tree.find("1.1");
    CHECK(s.size == node->group.size());
    const auto dist = label_distribution(fx.dataset, node->group);
    for (const auto& [level, frac] : s.label_distribution)
        CHECK(frac == doctest::Approx(dist.at(level)).epsilon(1e-12));

    // recompute each cited KS statistic straight from the data
    const Group baseline = group_minus(tree.root.group, node->group);
    for (const FeatureStat& st : s.top_features) {
        if (st.kind != StatKind::Ks) continue;
        std::vector<double> a, b;
        const auto col = static_cast<std::size_t>(st.feature);
        for (RowId r : node->group.rows)
            if (!fx.dataset.is_missing(r, col)) a.push_back(fx.dataset.value(r, col));
        for (RowId r : baseline.rows)
            if (!fx.dataset.is_missing(r, col)) b.push_back(fx.dataset.value(r, col));
        CHECK(st.statistic == doctest::Approx(testutil::ecdf_sup_diff(a, b)).epsilon(1e-9));
    }
}

TEST_SUITE_END();
