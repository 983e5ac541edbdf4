// cohesum command line: corpus runs, lambda sweeps, block-strategy analysis,
// the extractive oracle, and reference statistics.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cohesum/harness.hpp"

namespace fs = std::filesystem;
using namespace cohesum;

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

struct CommonArgs {
    std::string config_path;
    std::string input;
    std::string output_dir;
    std::string method;
    std::string provider;
    std::vector<std::string> overrides; // key=value pairs
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key=value config file");
    cmd->add_option("--input", args.input, "JSONL corpus path");
    cmd->add_option("--output-dir", args.output_dir, "directory for result files");
    cmd->add_option("--method", args.method,
                    "selector: greedy|mmr|npass|dist_sim|dist_gap|kvd");
    cmd->add_option("--provider", args.provider,
                    "informativeness provider: lexrank|oracle|external");
    cmd->add_option("--set", args.overrides,
                    "override any config key, e.g. --set selector.lambda_sel=0.5")
        ->take_all();
}

RunConfig build_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty())
        cfg = load_config_file(args.config_path);
    if (!args.input.empty())
        cfg.input_path = args.input;
    if (!args.output_dir.empty())
        cfg.output_dir = args.output_dir;
    if (!args.method.empty())
        cfg.method = parse_method(args.method);
    if (!args.provider.empty())
        cfg.provider = parse_provider(args.provider);
    for (const std::string& kv : args.overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw Error("--set expects key=value, got: " + kv);
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (cfg.input_path.empty())
        throw Error("no input corpus given (use --input or the config file)");
    return cfg;
}

std::vector<Document> load_corpus(const RunConfig& cfg, std::vector<std::string>* skipped) {
    IngestReport report = ingest(cfg.input_path, cfg.ingestion);
    for (const std::string& reason : report.skipped)
        std::cerr << "skipped: " << reason << '\n';
    if (skipped)
        *skipped = std::move(report.skipped);
    if (report.documents.empty())
        throw Error("no usable documents in " + cfg.input_path);
    return std::move(report.documents);
}

void require_output_dir(const RunConfig& cfg) {
    if (cfg.output_dir.empty())
        throw Error("no output directory given (use --output-dir or the config file)");
    fs::create_directories(cfg.output_dir);
}

int cmd_run(const CommonArgs& args) {
    RunConfig cfg = build_config(args);
    require_output_dir(cfg);
    std::vector<std::string> skipped;
    const auto docs = load_corpus(cfg, &skipped);
    const CorpusResult result = run_corpus(docs, cfg);
    write_run_outputs(result, cfg, skipped);
    std::cout << "documents: " << result.docs.size() << "  failed: " << result.failed_count
              << "\naggregate rouge1=" << result.aggregate.rouge1
              << " rdrl=" << result.aggregate.rdrl << " egr=" << result.aggregate.egr
              << "\nresults in " << cfg.output_dir << '\n';
    return result.failed_count == static_cast<int>(result.docs.size()) ? 1 : 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& methods_csv,
              const std::string& values_csv) {
    RunConfig cfg = build_config(args);
    require_output_dir(cfg);
    std::vector<SelectionMethod> methods;
    for (const std::string& m : split_list(methods_csv))
        methods.push_back(parse_method(m));
    std::vector<double> values;
    for (const std::string& v : split_list(values_csv))
        values.push_back(std::stod(v));
    if (methods.empty() || values.empty())
        throw Error("sweep needs --methods and --values");
    const auto docs = load_corpus(cfg, nullptr);
    const auto rows = sweep_lambda(docs, cfg, methods, values);
    const std::string out = (fs::path(cfg.output_dir) / "sweep.csv").string();
    write_sweep_csv(rows, out);
    std::cout << rows.size() << " rows written to " << out << '\n';
    return 0;
}

int cmd_blocks(const CommonArgs& args, const std::string& strategies_csv) {
    RunConfig cfg = build_config(args);
    require_output_dir(cfg);
    std::vector<BlockStrategy> strategies;
    for (const std::string& s : split_list(strategies_csv))
        strategies.push_back(parse_block_strategy(s));
    if (strategies.empty())
        throw Error("blocks needs --strategies");
    const auto docs = load_corpus(cfg, nullptr);
    const auto rows = block_analysis(docs, cfg, strategies);
    const std::string out = (fs::path(cfg.output_dir) / "block_analysis.csv").string();
    write_block_analysis_csv(rows, out);
    std::cout << rows.size() << " rows written to " << out << '\n';
    return 0;
}

int cmd_oracle(const CommonArgs& args) {
    RunConfig cfg = build_config(args);
    require_output_dir(cfg);
    std::vector<std::string> skipped;
    const auto docs = load_corpus(cfg, &skipped);
    const CorpusResult result = run_ext_oracle(docs, cfg);
    write_run_outputs(result, cfg, skipped);
    std::cout << "documents: " << result.docs.size() << "  failed: " << result.failed_count
              << "\noracle aggregate rouge1=" << result.aggregate.rouge1 << "\nresults in "
              << cfg.output_dir << '\n';
    return result.failed_count == static_cast<int>(result.docs.size()) ? 1 : 0;
}

int cmd_refstats(const CommonArgs& args, const std::string& out_path) {
    RunConfig cfg = build_config(args);
    const auto docs = load_corpus(cfg, nullptr);
    std::string out = out_path;
    if (out.empty()) {
        if (cfg.output_dir.empty())
            throw Error("refstats needs --out or an output directory");
        fs::create_directories(cfg.output_dir);
        out = (fs::path(cfg.output_dir) / "refstats.json").string();
    }
    const ReferenceStats stats = write_reference_stats(docs, cfg, out);
    std::cout << "mean_sim=" << stats.mean_sim << " mean_gap=" << stats.mean_gap << " over "
              << stats.references_used << " references (" << stats.references_skipped
              << " skipped) -> " << out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cohesum: budgeted extractive summarization with redundancy and cohesion control"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, blocks_args, oracle_args, refstats_args;
    std::string methods_csv = "greedy,mmr,kvd";
    std::string values_csv = "0.0,0.2,0.4,0.6,0.8,1.0";
    std::string strategies_csv = "balanced,original,max_redundancy";
    std::string refstats_out;

    add_common(app.add_subcommand("run", "summarize a corpus and emit reports"), run_args);
    auto* sweep = app.add_subcommand("sweep", "run a lambda_sel sweep over methods");
    add_common(sweep, sweep_args);
    sweep->add_option("--methods", methods_csv, "comma-separated selector list");
    sweep->add_option("--values", values_csv, "comma-separated lambda_sel values");
    auto* blocks = app.add_subcommand("blocks", "block-selection strategy analysis");
    add_common(blocks, blocks_args);
    blocks->add_option("--strategies", strategies_csv, "comma-separated strategy list");
    add_common(app.add_subcommand("oracle", "greedy extractive upper bound"), oracle_args);
    auto* refstats = app.add_subcommand("refstats", "reference similarity statistics");
    add_common(refstats, refstats_args);
    refstats->add_option("--out", refstats_out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("run"))
            return cmd_run(run_args);
        if (app.got_subcommand("sweep"))
            return cmd_sweep(sweep_args, methods_csv, values_csv);
        if (app.got_subcommand("blocks"))
            return cmd_blocks(blocks_args, strategies_csv);
        if (app.got_subcommand("oracle"))
            return cmd_oracle(oracle_args);
        if (app.got_subcommand("refstats"))
            return cmd_refstats(refstats_args, refstats_out);
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", e.what()}};
        std::cerr << err.dump() << '\n';
        return 1;
    }
    return 0;
}
