#ifndef CAMUV_COMMANDS_HPP
#define CAMUV_COMMANDS_HPP

#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "camuv/benchmark.hpp"
#include "camuv/camuv.hpp"
#include "camuv/dataset.hpp"
#include "camuv/errors.hpp"
#include "camuv/eval.hpp"
#include "camuv/graph.hpp"
#include "camuv/simgen.hpp"
#include "camuv/tscamuv.hpp"
#include "camuv/version.hpp"

namespace camuv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // usage / input errors
inline constexpr int kExitInternal = 3;   // internal invariant violations

namespace cmd_detail {

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

class ManifestWriter {
public:
    ManifestWriter(std::string command, unsigned long seed)
        : start_(std::chrono::steady_clock::now()) {
        manifest_["command"] = std::move(command);
        manifest_["seed"] = seed;
        manifest_["tool_version"] = kVersion;
        manifest_["inputs"] = nlohmann::json::object();
        manifest_["outputs"] = nlohmann::json::object();
    }

    void config(const nlohmann::json& cfg) { manifest_["config"] = cfg; }
    void input(const std::string& role, const std::string& path) { manifest_["inputs"][role] = path; }
    void output(const std::string& role, const std::string& path) { manifest_["outputs"][role] = path; }

    void write(const std::string& path) {
        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start_).count();
        manifest_["wall_clock_seconds"] = elapsed;
        write_json_file(path, manifest_);
    }

private:
    nlohmann::json manifest_;
    std::chrono::steady_clock::time_point start_;
};

inline int worker_threads() {
    if (const char* env = std::getenv("CAMUV_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace cmd_detail

struct SimulateOptions {
    std::string kind = "iid";            // "iid" | "ts"
    std::optional<std::string> config_path;
    std::optional<int> n_samples;
    std::optional<unsigned long> seed;
    std::string out_data = "data.csv";
    std::string out_truth = "truth.json";
};

inline int cmd_simulate(const SimulateOptions& opt) {
    return cmd_detail::guarded([&]() {
        nlohmann::json cfg_json = opt.config_path
                                      ? cmd_detail::read_json_file(*opt.config_path)
                                      : nlohmann::json::object();
        if (opt.kind == "iid") {
            ScmConfig cfg = scm_config_from_json(cfg_json);
            if (opt.n_samples) cfg.n_samples = *opt.n_samples;
            if (opt.seed) cfg.seed = *opt.seed;
            cmd_detail::ManifestWriter manifest("simulate", cfg.seed);
            manifest.config(to_json(cfg));
            auto [data, truth] = gen_camuv_instance(cfg);
            write_csv(data, opt.out_data);
            cmd_detail::write_json_file(opt.out_truth, to_json(truth));
            manifest.output("data", opt.out_data);
            manifest.output("truth", opt.out_truth);
            manifest.write(opt.out_data + ".manifest.json");
        } else if (opt.kind == "ts") {
            TsScmConfig cfg = ts_config_from_json(cfg_json);
            if (opt.n_samples) cfg.n_samples = *opt.n_samples;
            if (opt.seed) cfg.seed = *opt.seed;
            cmd_detail::ManifestWriter manifest("simulate", cfg.seed);
            manifest.config(to_json(cfg));
            auto [data, truth] = gen_ts_instance(cfg);
            write_csv(data, opt.out_data);
            cmd_detail::write_json_file(opt.out_truth, to_json(truth));
            manifest.output("data", opt.out_data);
            manifest.output("truth", opt.out_truth);
            manifest.write(opt.out_data + ".manifest.json");
        } else {
            throw std::invalid_argument("simulate: unknown kind '" + opt.kind + "'");
        }
        return kExitOk;
    });
}

struct DiscoverOptions {
    std::string data_path;
    double alpha = 0.01;
    int max_subset_size = 2;
    std::optional<std::string> prior_path;
    std::string out_prefix = "graph";
    std::string echo_format;  // "json" | "dot": also print the graph to stdout
};

inline int cmd_discover(const DiscoverOptions& opt) {
    return cmd_detail::guarded([&]() {
        Dataset data = read_csv(opt.data_path);
        DiscoveryConfig cfg;
        cfg.alpha = opt.alpha;
        cfg.max_subset_size = opt.max_subset_size;
        if (opt.prior_path) cfg.prior = prior_from_json(cmd_detail::read_json_file(*opt.prior_path));

        cmd_detail::ManifestWriter manifest("discover", 0);
        manifest.config(nlohmann::json{{"alpha", cfg.alpha},
                                       {"max_subset_size", cfg.max_subset_size},
                                       {"prior", to_json(cfg.prior)}});
        manifest.input("data", opt.data_path);
        if (opt.prior_path) manifest.input("prior", *opt.prior_path);

        CausalGraph g = discover(data, cfg);
        cmd_detail::write_json_file(opt.out_prefix + ".json", to_json(g));
        cmd_detail::write_text_file(opt.out_prefix + ".dot", to_dot(g));
        if (opt.echo_format == "json") std::cout << to_json(g).dump(2) << "\n";
        if (opt.echo_format == "dot") std::cout << to_dot(g);
        manifest.output("graph_json", opt.out_prefix + ".json");
        manifest.output("graph_dot", opt.out_prefix + ".dot");
        manifest.write(opt.out_prefix + ".manifest.json");
        return kExitOk;
    });
}

struct DiscoverTsOptions {
    std::string data_path;
    int max_lag = 2;
    double alpha = 0.01;
    int max_subset_size = 2;
    std::optional<std::string> prior_path;  // forbidden pairs over embedded column names
    std::string out_prefix = "lag_graph";
    std::string echo_format;  // "json" | "dot": also print the lag graph to stdout
};

inline int cmd_discover_ts(const DiscoverTsOptions& opt) {
    return cmd_detail::guarded([&]() {
        Dataset data = read_csv(opt.data_path);
        PriorKnowledge extra;
        if (opt.prior_path) extra = prior_from_json(cmd_detail::read_json_file(*opt.prior_path));

        cmd_detail::ManifestWriter manifest("discover-ts", 0);
        manifest.config(nlohmann::json{{"alpha", opt.alpha},
                                       {"max_subset_size", opt.max_subset_size},
                                       {"max_lag", opt.max_lag},
                                       {"prior", to_json(extra)}});
        manifest.input("data", opt.data_path);
        if (opt.prior_path) manifest.input("prior", *opt.prior_path);

        auto result = discover_ts(data, opt.max_lag, opt.alpha, opt.max_subset_size, extra);
        for (const auto& note : result.notes) std::cerr << "note: " << note << "\n";
        cmd_detail::write_json_file(opt.out_prefix + ".json", to_json(result.graph));
        cmd_detail::write_text_file(opt.out_prefix + ".dot", to_dot(result.graph));
        if (opt.echo_format == "json") std::cout << to_json(result.graph).dump(2) << "\n";
        if (opt.echo_format == "dot") std::cout << to_dot(result.graph);
        manifest.output("graph_json", opt.out_prefix + ".json");
        manifest.output("graph_dot", opt.out_prefix + ".dot");
        manifest.write(opt.out_prefix + ".manifest.json");
        return kExitOk;
    });
}

struct EvaluateOptions {
    std::string kind = "iid";  // "iid" | "ts"
    std::string truth_path;
    std::string graph_path;
    std::optional<std::string> excluded_path;  // {"excluded": [["a","b"],...]}
    std::optional<std::string> out_path;       // stdout when absent
};

inline int cmd_evaluate(const EvaluateOptions& opt) {
    return cmd_detail::guarded([&]() {
        cmd_detail::ManifestWriter manifest("evaluate", 0);
        manifest.input("truth", opt.truth_path);
        manifest.input("graph", opt.graph_path);
        Score score;
        if (opt.kind == "iid") {
            GroundTruth truth = truth_from_json(cmd_detail::read_json_file(opt.truth_path));
            CausalGraph est = graph_from_json(cmd_detail::read_json_file(opt.graph_path));
            std::set<std::array<std::string, 2>> excluded;
            if (opt.excluded_path) {
                auto j = cmd_detail::read_json_file(*opt.excluded_path);
                for (const auto& p : j.at("excluded"))
                    excluded.insert({p[0].get<std::string>(), p[1].get<std::string>()});
            }
            score = score_directed(truth, est, excluded);
        } else if (opt.kind == "ts") {
            TsGroundTruth truth = ts_truth_from_json(cmd_detail::read_json_file(opt.truth_path));
            LagGraph est = lag_graph_from_json(cmd_detail::read_json_file(opt.graph_path));
            score = score_lag_graph(truth, est);
        } else {
            throw std::invalid_argument("evaluate: unknown kind '" + opt.kind + "'");
        }
        const std::string rendered = to_json(score).dump(2) + "\n";
        if (opt.out_path) {
            cmd_detail::write_text_file(*opt.out_path, rendered);
            manifest.output("score", *opt.out_path);
            manifest.write(*opt.out_path + ".manifest.json");
        } else {
            std::cout << rendered;
        }
        return kExitOk;
    });
}

struct BenchmarkOptions {
    std::string protocol = "pk-sweep";  // "pk-sweep" | "ts-sweep"
    int repetitions = 20;
    std::vector<int> sample_sizes;      // pk-sweep uses the first entry only
    unsigned long seed = 0;
    double alpha = 0.01;
    int max_subset_size = 2;
    int max_lag = 2;
    int threads = 0;                    // 0: CAMUV_THREADS or hardware
    std::string out_csv = "benchmark.csv";
    std::string echo_format;            // "csv": also print the rows to stdout
};

inline int cmd_benchmark(const BenchmarkOptions& opt) {
    return cmd_detail::guarded([&]() {
        const int threads = opt.threads > 0 ? opt.threads : cmd_detail::worker_threads();
        cmd_detail::ManifestWriter manifest("benchmark", opt.seed);
        std::string csv;
        if (opt.protocol == "pk-sweep") {
            PkSweepConfig cfg;
            cfg.repetitions = opt.repetitions;
            cfg.alpha = opt.alpha;
            cfg.max_subset_size = opt.max_subset_size;
            cfg.seed = opt.seed;
            cfg.threads = threads;
            if (!opt.sample_sizes.empty()) cfg.instance.n_samples = opt.sample_sizes.front();
            manifest.config(nlohmann::json{{"protocol", opt.protocol},
                                           {"repetitions", cfg.repetitions},
                                           {"alpha", cfg.alpha},
                                           {"max_subset_size", cfg.max_subset_size},
                                           {"instance", to_json(cfg.instance)}});
            csv = benchmark_csv(run_pk_sweep(cfg), true);
        } else if (opt.protocol == "ts-sweep") {
            TsSweepConfig cfg;
            cfg.repetitions = opt.repetitions;
            cfg.alpha = opt.alpha;
            cfg.max_subset_size = opt.max_subset_size;
            cfg.instance.max_lag = opt.max_lag;
            cfg.seed = opt.seed;
            cfg.threads = threads;
            if (!opt.sample_sizes.empty()) cfg.sample_sizes = opt.sample_sizes;
            manifest.config(nlohmann::json{{"protocol", opt.protocol},
                                           {"repetitions", cfg.repetitions},
                                           {"alpha", cfg.alpha},
                                           {"max_subset_size", cfg.max_subset_size},
                                           {"sample_sizes", cfg.sample_sizes},
                                           {"instance", to_json(cfg.instance)}});
            csv = benchmark_csv(run_ts_sweep(cfg), false);
        } else {
            throw std::invalid_argument("benchmark: unknown protocol '" + opt.protocol + "'");
        }
        cmd_detail::write_text_file(opt.out_csv, csv);
        if (opt.echo_format == "csv") std::cout << csv;
        manifest.output("results", opt.out_csv);
        manifest.write(opt.out_csv + ".manifest.json");
        return kExitOk;
    });
}

}  // namespace camuv

#endif
