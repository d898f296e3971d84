#include "smartfog/centrality.hpp"
#include "smartfog/clustering.hpp"
#include "smartfog/decision.hpp"
#include "smartfog/error.hpp"
#include "smartfog/harness.hpp"
#include "smartfog/overlay.hpp"
#include "smartfog/simulation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace smartfog;

struct ExperimentFlags {
    std::string config_path;
    std::vector<std::size_t> sizes;
    std::vector<std::string> modes;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<std::size_t> threads;
    bool timing_only = false;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--sizes", flags.sizes, "overlay sizes, e.g. 20,30,40")->delimiter(',');
    cmd->add_option("--modes", flags.modes, "smartfog,unoptimized")->delimiter(',');
    cmd->add_option("--reps", flags.reps, "replications per cell");
    cmd->add_option("--seed", flags.seed, "seed base; replication r uses seed + r");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
}

ExperimentConfig resolve(const ExperimentFlags& flags) {
    ExperimentConfig cfg = flags.config_path.empty() ? ExperimentConfig{} : load_config(flags.config_path);
    if (!flags.sizes.empty()) {
        cfg.overlay_sizes = flags.sizes;
    }
    if (!flags.modes.empty()) {
        cfg.modes.clear();
        for (const auto& m : flags.modes) {
            cfg.modes.push_back(parse_mode(m));
        }
    }
    if (flags.reps) {
        cfg.replications = *flags.reps;
    }
    if (flags.seed) {
        cfg.seed_base = *flags.seed;
    }
    if (!flags.out.empty()) {
        cfg.output_dir = flags.out;
    }
    if (flags.threads) {
        cfg.threads = *flags.threads;
    }
    cfg.validate();
    return cfg;
}

struct OverlayFlags {
    std::string overlay_path;
    std::size_t size = 20;
    std::uint64_t seed = 1;
    std::vector<std::string> areas{"compute", "memory", "compute"};
    std::string centrality = "weighted";
    std::string out;
};

void add_overlay_flags(CLI::App* cmd, OverlayFlags& flags) {
    cmd->add_option("--overlay", flags.overlay_path, "overlay JSON file (otherwise generated)")->check(CLI::ExistingFile);
    cmd->add_option("--size", flags.size, "devices in the generated overlay");
    cmd->add_option("--seed", flags.seed, "generator seed");
    cmd->add_option("--areas", flags.areas, "functional area types, e.g. compute,memory")->delimiter(',');
    cmd->add_option("--centrality", flags.centrality, "weighted or unweighted")
        ->check(CLI::IsMember({"weighted", "unweighted"}));
    cmd->add_option("--out", flags.out, "output file (default stdout)");
}

FogOverlay load_or_build(const OverlayFlags& flags) {
    if (flags.overlay_path.empty()) {
        return build_overlay(flags.size, flags.seed);
    }
    std::ifstream in(flags.overlay_path);
    if (!in) {
        throw IoError("cannot read " + flags.overlay_path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_overlay(buffer.str());
}

std::vector<AreaType> area_list(const OverlayFlags& flags) {
    std::vector<AreaType> out;
    for (const auto& a : flags.areas) {
        out.push_back(parse_area_type(a));
    }
    return out;
}

CentralityMode centrality_mode(const OverlayFlags& flags) {
    return flags.centrality == "unweighted" ? CentralityMode::Unweighted : CentralityMode::WeightedByLatency;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!(out << text)) {
        throw IoError("cannot write " + path);
    }
}

void print_timing(const TimingOutput& timing) {
    for (const auto& s : timing.summary) {
        std::cout << "n=" << s.n_devices << " betweenness " << s.median.betweenness_ms << " ms (sd "
                  << s.stddev.betweenness_ms << "), sort+decision " << s.median.decision_ms << " ms (sd "
                  << s.stddev.decision_ms << "), clustering " << s.median.clustering_ms << " ms (sd "
                  << s.stddev.clustering_ms << ")\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SmartFog gateway selection, functional-area clustering and fog simulation"};
    app.require_subcommand(1);

    ExperimentFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "run the SmartFog vs unoptimized experiment sweep");
    add_experiment_flags(simulate, sim_flags);
    simulate->add_flag("--timing-only", sim_flags.timing_only, "only time the algorithm stages");

    ExperimentFlags timing_flags;
    auto* timing = app.add_subcommand("timing", "benchmark betweenness, sorting+decision and clustering stages");
    add_experiment_flags(timing, timing_flags);

    OverlayFlags select_flags;
    auto* select = app.add_subcommand("select", "emit the gateway assignment for one overlay");
    add_overlay_flags(select, select_flags);

    OverlayFlags cluster_flags;
    std::size_t clusters = PlanOptions{}.clusters;
    std::optional<double> bandwidth;
    auto* cluster = app.add_subcommand("cluster", "emit functional areas for one overlay");
    add_overlay_flags(cluster, cluster_flags);
    cluster->add_option("--k", clusters, "clusters per gateway");
    cluster->add_option("--bandwidth", bandwidth, "Gaussian kernel bandwidth (default: median distance)");

    OverlayFlags overlay_flags;
    auto* overlay_cmd = app.add_subcommand("overlay", "generate an overlay and print it as JSON");
    add_overlay_flags(overlay_cmd, overlay_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed() || timing->parsed()) {
            const auto& flags = simulate->parsed() ? sim_flags : timing_flags;
            const auto cfg = resolve(flags);
            if (timing->parsed() || sim_flags.timing_only) {
                const auto out = timing_report(cfg);
                write_timing(cfg, out);
                print_timing(out);
                std::cout << "wrote " << (cfg.output_dir / "timing.csv").string() << "\n";
            } else {
                const auto out = run_experiment(cfg);
                for (const auto& cell : out.summary) {
                    std::cout << format_summary(cell) << "\n";
                }
                std::cout << "wrote " << out.results_csv.string() << " (" << out.rows.size() << " rows) and "
                          << out.summary_csv.string() << "\n";
            }
        } else if (select->parsed()) {
            const auto overlay = load_or_build(select_flags);
            const auto scores = betweenness(overlay, centrality_mode(select_flags));
            emit(select_flags.out, serialize_assignment(select_gateways(overlay, area_list(select_flags), scores)));
        } else if (cluster->parsed()) {
            const auto overlay = load_or_build(cluster_flags);
            const auto scores = betweenness(overlay, centrality_mode(cluster_flags));
            const auto assignment = select_gateways(overlay, area_list(cluster_flags), scores);
            SpectralOptions options;
            options.bandwidth = bandwidth;
            const auto areas = cluster_functional_areas(overlay, assignment, clusters, cluster_flags.seed, options);
            emit(cluster_flags.out, serialize_functional_areas(areas));
        } else if (overlay_cmd->parsed()) {
            emit(overlay_flags.out, serialize_overlay(load_or_build(overlay_flags)));
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
