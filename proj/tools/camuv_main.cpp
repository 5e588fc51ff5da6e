#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "camuv/commands.hpp"
#include "camuv/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Causal discovery for nonlinear additive models with latent variables"};
    app.set_version_flag("--version", camuv::kVersion);
    app.require_subcommand(1);

    // simulate
    camuv::SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic instance with ground truth");
    simulate->add_option("--kind", sim.kind, "Instance kind: iid or ts")->check(CLI::IsMember({"iid", "ts"}));
    std::string sim_config;
    simulate->add_option("--config", sim_config, "Generator config JSON");
    int sim_n = 0;
    simulate->add_option("--n", sim_n, "Sample count override");
    unsigned long sim_seed = 0;
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Generator seed");
    simulate->add_option("--out-data", sim.out_data, "Output CSV path");
    simulate->add_option("--out-truth", sim.out_truth, "Output ground-truth JSON path");

    // discover
    camuv::DiscoverOptions dis;
    auto* discover = app.add_subcommand("discover", "Run discovery on a CSV dataset");
    discover->add_option("--data", dis.data_path, "Input CSV")->required();
    discover->add_option("--alpha", dis.alpha, "Significance level");
    discover->add_option("--max-subset", dis.max_subset_size, "Max candidate subset size (d)");
    std::string dis_prior;
    discover->add_option("--prior", dis_prior, "Prior-knowledge JSON (forbidden cause pairs)");
    discover->add_option("--out", dis.out_prefix, "Output prefix (.json/.dot)");
    discover->add_option("--format", dis.echo_format, "Echo result to stdout: json or dot")
        ->check(CLI::IsMember({"json", "dot"}));

    // discover-ts
    camuv::DiscoverTsOptions dts;
    auto* discover_ts = app.add_subcommand("discover-ts", "Run time-series discovery on a CSV dataset");
    discover_ts->add_option("--data", dts.data_path, "Input CSV")->required();
    discover_ts->add_option("--max-lag", dts.max_lag, "Max time lag (r)");
    discover_ts->add_option("--alpha", dts.alpha, "Significance level");
    discover_ts->add_option("--max-subset", dts.max_subset_size, "Max candidate subset size (d)");
    std::string dts_prior;
    discover_ts->add_option("--prior", dts_prior, "Extra prior JSON over embedded column names");
    discover_ts->add_option("--out", dts.out_prefix, "Output prefix (.json/.dot)");
    discover_ts->add_option("--format", dts.echo_format, "Echo result to stdout: json or dot")
        ->check(CLI::IsMember({"json", "dot"}));

    // evaluate
    camuv::EvaluateOptions ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score an estimated graph against ground truth");
    evaluate->add_option("--kind", ev.kind, "Graph kind: iid or ts")->check(CLI::IsMember({"iid", "ts"}));
    evaluate->add_option("--truth", ev.truth_path, "Ground-truth JSON")->required();
    evaluate->add_option("--graph", ev.graph_path, "Estimated graph JSON")->required();
    std::string ev_excluded;
    evaluate->add_option("--excluded", ev_excluded, "JSON with ordered pairs to exclude");
    std::string ev_out;
    evaluate->add_option("--out", ev_out, "Score JSON path (stdout if omitted)");

    // benchmark
    camuv::BenchmarkOptions bench;
    auto* benchmark = app.add_subcommand("benchmark", "Run a sweep protocol and write aggregate CSV");
    benchmark->add_option("--protocol", bench.protocol, "pk-sweep or ts-sweep")
        ->check(CLI::IsMember({"pk-sweep", "ts-sweep"}));
    benchmark->add_option("--reps", bench.repetitions, "Repetitions per cell");
    benchmark->add_option("--n", bench.sample_sizes, "Sample size(s)");
    benchmark->add_option("--seed", bench.seed, "Base seed");
    benchmark->add_option("--alpha", bench.alpha, "Significance level");
    benchmark->add_option("--max-subset", bench.max_subset_size, "Max candidate subset size (d)");
    benchmark->add_option("--max-lag", bench.max_lag, "Max time lag for ts-sweep");
    benchmark->add_option("--threads", bench.threads, "Worker pool size (default: CAMUV_THREADS or hardware)");
    benchmark->add_option("--out", bench.out_csv, "Aggregate CSV path");
    benchmark->add_option("--format", bench.echo_format, "Echo rows to stdout: csv")
        ->check(CLI::IsMember({"csv"}));

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) {
        if (!sim_config.empty()) sim.config_path = sim_config;
        if (simulate->count("--n")) sim.n_samples = sim_n;
        if (sim_seed_opt->count()) sim.seed = sim_seed;
        return camuv::cmd_simulate(sim);
    }
    if (discover->parsed()) {
        if (!dis_prior.empty()) dis.prior_path = dis_prior;
        return camuv::cmd_discover(dis);
    }
    if (discover_ts->parsed()) {
        if (!dts_prior.empty()) dts.prior_path = dts_prior;
        return camuv::cmd_discover_ts(dts);
    }
    if (evaluate->parsed()) {
        if (!ev_excluded.empty()) ev.excluded_path = ev_excluded;
        if (!ev_out.empty()) ev.out_path = ev_out;
        return camuv::cmd_evaluate(ev);
    }
    if (benchmark->parsed()) return camuv::cmd_benchmark(bench);
    return camuv::kExitUsage;
}
