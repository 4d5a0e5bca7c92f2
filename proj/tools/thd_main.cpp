#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "thd/pipeline.hpp"

namespace {

thd::RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                           int threads_flag) {
    thd::RunConfig config = thd::RunConfig::load(path);
    for (const std::string& assignment : overrides) config.apply_override(assignment);
    if (threads_flag >= 0) config.threads = threads_flag;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological hierarchical decomposition toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = -1;
    app.add_option("--threads", threads, "Worker thread bound (0 = hardware)");

    // run
    auto* run = app.add_subcommand("run", "Run a decomposition and write artifacts");
    std::string run_config_path;
    std::vector<std::string> run_overrides;
    std::string run_output;
    run->add_option("-c,--config", run_config_path, "Run configuration JSON")->required();
    run->add_option("--set", run_overrides, "Override a config key (key.path=value)");
    run->add_option("-o,--output", run_output, "Output directory (overrides config)");

    // trace
    auto* trace = app.add_subcommand("trace", "Explain one row's path through a tree");
    std::string trace_tree;
    thd::RowId trace_row = 0;
    trace->add_option("-t,--tree", trace_tree, "tree.json produced by run")->required();
    trace->add_option("-r,--row", trace_row, "Row id to trace")->required();

    // export
    auto* exp = app.add_subcommand("export", "Export one node's network");
    std::string export_tree_path, export_node, export_format = "json", export_out, export_color;
    exp->add_option("-t,--tree", export_tree_path, "tree.json produced by run")->required();
    exp->add_option("-n,--node", export_node, "Node id, e.g. 1.2")->required();
    exp->add_option("-f,--format", export_format, "json, dot, or graphml");
    exp->add_option("-o,--output", export_out, "Output file (stdout when omitted)");
    exp->add_option("--color-by", export_color, "Feature used for node coloring");

    // classify
    auto* cls = app.add_subcommand("classify", "Semi-supervised prediction over train+test");
    std::string cls_config_path, cls_train, cls_test, cls_output;
    std::vector<std::string> cls_overrides;
    int k_votes = 5;
    cls->add_option("-c,--config", cls_config_path, "Run configuration JSON")->required();
    cls->add_option("--train", cls_train, "Labeled training CSV")->required();
    cls->add_option("--test", cls_test, "Test CSV (labels, if present, are only used to score)")
        ->required();
    cls->add_option("--k-votes", k_votes, "Neighbors voting per prediction");
    cls->add_option("--set", cls_overrides, "Override a config key (key.path=value)");
    cls->add_option("-o,--output", cls_output, "Output directory (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run) {
            thd::RunConfig config = load_config(run_config_path, run_overrides, threads);
            if (!run_output.empty()) config.output_dir = run_output;
            thd::cmd_run(config, std::cout);
        } else if (*trace) {
            thd::cmd_trace(trace_tree, trace_row, std::cout);
        } else if (*exp) {
            std::optional<std::string> coloring;
            if (!export_color.empty()) coloring = export_color;
            if (export_out.empty()) {
                thd::cmd_export(export_tree_path, export_node, export_format, coloring, std::cout);
            } else {
                std::ofstream out(export_out, std::ios::binary);
                if (!out) throw thd::Error("cannot write file: " + export_out);
                thd::cmd_export(export_tree_path, export_node, export_format, coloring, out);
            }
        } else if (*cls) {
            thd::RunConfig config = load_config(cls_config_path, cls_overrides, threads);
            if (!cls_output.empty()) config.output_dir = cls_output;
            thd::cmd_classify(config, cls_train, cls_test, k_votes, std::cout);
        }
    } catch (const thd::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
