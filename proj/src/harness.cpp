#include "smartfog/harness.hpp"

#include "smartfog/centrality.hpp"
#include "smartfog/clustering.hpp"
#include "smartfog/decision.hpp"
#include "smartfog/error.hpp"
#include "smartfog/stats.hpp"

#include <algorithm>

#include <json.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace smartfog {

void ExperimentConfig::validate() const {
    if (overlay_sizes.empty()) {
        throw ConfigError("invalid config field 'overlay_sizes': must not be empty");
    }
    for (const auto n : overlay_sizes) {
        if (n < 2) {
            throw ConfigError("invalid config field 'overlay_sizes': every size must be >= 2");
        }
        if (plan.areas.size() > n) {
            throw ConfigError("invalid config field 'areas': more areas than devices");
        }
    }
    if (modes.empty()) {
        throw ConfigError("invalid config field 'modes': must not be empty");
    }
    if (replications < 1) {
        throw ConfigError("invalid config field 'replications': must be >= 1");
    }
    if (plan.areas.empty()) {
        throw ConfigError("invalid config field 'areas': must not be empty");
    }
    if (plan.clusters < 1) {
        throw ConfigError("invalid config field 'clusters': must be >= 1");
    }
    if (plan.spectral.bandwidth && !(*plan.spectral.bandwidth > 0.0)) {
        throw ConfigError("invalid config field 'bandwidth': must be positive");
    }
    const bool plans = std::find(modes.begin(), modes.end(), Mode::SmartFog) != modes.end();
    for (const auto n : overlay_sizes) {
        if (plans && n - plan.areas.size() < plan.clusters) {
            throw ConfigError("invalid config field 'clusters': size " + std::to_string(n) +
                              " leaves fewer non-gateway devices than clusters");
        }
    }
    overlay.validate();
    workload.validate();
}

namespace {

template <typename T>
void read_if(const nlohmann::json& doc, const char* key, T& target) {
    if (doc.contains(key)) {
        try {
            target = doc.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string("invalid config field '") + key + "': wrong type");
        }
    }
}

} // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("malformed config: top level must be an object");
    }
    ExperimentConfig cfg;
    read_if(doc, "overlay_sizes", cfg.overlay_sizes);
    read_if(doc, "replications", cfg.replications);
    read_if(doc, "seed_base", cfg.seed_base);
    read_if(doc, "threads", cfg.threads);
    std::string out = cfg.output_dir.string();
    read_if(doc, "output_dir", out);
    cfg.output_dir = out;
    if (doc.contains("modes")) {
        std::vector<std::string> modes;
        read_if(doc, "modes", modes);
        cfg.modes.clear();
        for (const auto& m : modes) {
            cfg.modes.push_back(parse_mode(m));
        }
    }
    if (doc.contains("areas")) {
        std::vector<std::string> areas;
        read_if(doc, "areas", areas);
        cfg.plan.areas.clear();
        for (const auto& a : areas) {
            cfg.plan.areas.push_back(parse_area_type(a));
        }
    }
    read_if(doc, "clusters", cfg.plan.clusters);
    if (doc.contains("bandwidth")) {
        double g = 0.0;
        read_if(doc, "bandwidth", g);
        cfg.plan.spectral.bandwidth = g;
    }
    if (doc.contains("centrality")) {
        std::string c;
        read_if(doc, "centrality", c);
        if (c == "weighted") {
            cfg.plan.centrality = CentralityMode::WeightedByLatency;
        } else if (c == "unweighted") {
            cfg.plan.centrality = CentralityMode::Unweighted;
        } else {
            throw ConfigError("invalid config field 'centrality': expected weighted or unweighted");
        }
    }
    if (doc.contains("overlay")) {
        const auto& o = doc.at("overlay");
        auto& p = cfg.overlay;
        read_if(o, "mips_min", p.mips_min);
        read_if(o, "mips_max", p.mips_max);
        read_if(o, "memory_min_gb", p.memory_min_gb);
        read_if(o, "memory_max_gb", p.memory_max_gb);
        read_if(o, "storage_gb", p.storage_gb);
        read_if(o, "mean_degree", p.mean_degree);
        read_if(o, "latency_min_ms", p.latency_min_ms);
        read_if(o, "latency_max_ms", p.latency_max_ms);
        read_if(o, "cloud_latency_min_ms", p.cloud_latency_min_ms);
        read_if(o, "cloud_latency_max_ms", p.cloud_latency_max_ms);
        read_if(o, "cloud_attach_fraction", p.cloud_attach_fraction);
    }
    if (doc.contains("workload")) {
        const auto& w = doc.at("workload");
        auto& s = cfg.workload;
        read_if(w, "sensors_per_device", s.sensors_per_device);
        read_if(w, "spa_interval_ms", s.spa_interval_ms);
        read_if(w, "pc_interval_ms", s.pc_interval_ms);
        read_if(w, "jitter", s.jitter);
        read_if(w, "spa_mi_min", s.spa_mi_min);
        read_if(w, "spa_mi_max", s.spa_mi_max);
        read_if(w, "pc_mi_min", s.pc_mi_min);
        read_if(w, "pc_mi_max", s.pc_mi_max);
        read_if(w, "spa_bytes", s.spa_bytes);
        read_if(w, "pc_bytes", s.pc_bytes);
        read_if(w, "access_latency_min_ms", s.access_latency_min_ms);
        read_if(w, "access_latency_max_ms", s.access_latency_max_ms);
        read_if(w, "access_hops", s.access_hops);
        read_if(w, "cloud_hops", s.cloud_hops);
        read_if(w, "cloud_mips", s.cloud_mips);
        read_if(w, "horizon_ms", s.horizon_ms);
        read_if(w, "warmup_ms", s.warmup_ms);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

RunRow summarize_report(const SimulationReport& report) {
    return {report.mode,
            report.n_devices,
            report.seed,
            median(report.spa_delays_ms),
            stddev(report.spa_delays_ms),
            median(report.pc_delays_ms),
            stddev(report.pc_delays_ms),
            report.network_load_bytes,
            report.completed(),
            report.dropped()};
}

std::vector<CellSummary> summarize_cells(const std::vector<RunRow>& rows) {
    std::vector<CellSummary> out;
    std::vector<std::vector<const RunRow*>> members;
    for (const auto& row : rows) {
        std::size_t cell = 0;
        while (cell < out.size() && !(out[cell].mode == row.mode && out[cell].n_devices == row.n_devices)) {
            ++cell;
        }
        if (cell == out.size()) {
            out.push_back({row.mode, row.n_devices});
            members.emplace_back();
        }
        members[cell].push_back(&row);
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        std::vector<double> spa, pc, load;
        for (const auto* r : members[c]) {
            spa.push_back(r->spa_median_ms);
            pc.push_back(r->pc_median_ms);
            load.push_back(static_cast<double>(r->network_load_bytes));
        }
        auto& s = out[c];
        s.runs = members[c].size();
        s.spa_median_ms = median(spa);
        s.spa_stddev_ms = stddev(spa);
        s.pc_median_ms = median(pc);
        s.pc_stddev_ms = stddev(pc);
        s.network_load_median_bytes = median(load);
        s.network_load_stddev_bytes = stddev(load);
    }
    return out;
}

SimulationReport run_replication(const ExperimentConfig& config, std::size_t n_devices, Mode mode,
                                 std::size_t replication) {
    const auto seed = config.seed_for(replication);
    const auto overlay = build_overlay(n_devices, seed, config.overlay);
    if (mode == Mode::SmartFog) {
        const auto plan = plan_smartfog(overlay, config.plan, seed);
        return run_simulation(overlay, mode, config.workload, seed, &plan);
    }
    return run_simulation(overlay, mode, config.workload, seed);
}

std::vector<RunRow> run_replications(const ExperimentConfig& config) {
    config.validate();
    struct Job {
        std::size_t n;
        Mode mode;
        std::size_t rep;
    };
    std::vector<Job> jobs;
    for (const auto n : config.overlay_sizes) {
        for (const auto mode : config.modes) {
            for (std::size_t r = 0; r < config.replications; ++r) {
                jobs.push_back({n, mode, r});
            }
        }
    }
    std::vector<RunRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (auto i = next++; i < jobs.size(); i = next++) {
            try {
                rows[i] = summarize_report(run_replication(config, jobs[i].n, jobs[i].mode, jobs[i].rep));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::size_t threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
    return rows;
}

namespace {

std::string number(double x) {
    std::ostringstream out;
    out.precision(17);
    out << x;
    return out.str();
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

} // namespace

std::string format_row(const RunRow& row) {
    std::ostringstream out;
    out << to_string(row.mode) << ',' << row.n_devices << ',' << row.seed << ',' << number(row.spa_median_ms) << ','
        << number(row.spa_stddev_ms) << ',' << number(row.pc_median_ms) << ',' << number(row.pc_stddev_ms) << ','
        << row.network_load_bytes << ',' << row.completed << ',' << row.dropped;
    return out.str();
}

std::string format_summary(const CellSummary& cell) {
    std::ostringstream out;
    out << to_string(cell.mode) << ',' << cell.n_devices << ',' << cell.runs << ',' << number(cell.spa_median_ms)
        << ',' << number(cell.spa_stddev_ms) << ',' << number(cell.pc_median_ms) << ',' << number(cell.pc_stddev_ms)
        << ',' << number(cell.network_load_median_bytes) << ',' << number(cell.network_load_stddev_bytes);
    return out.str();
}

RunRow parse_row(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in{std::string(line)};
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (fields.size() != 10) {
        throw ConfigError("result row has " + std::to_string(fields.size()) + " fields, expected 10");
    }
    auto real = [](const std::string& s) {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw ConfigError("malformed number '" + s + "'");
        }
        return v;
    };
    auto integer = [](const std::string& s) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw ConfigError("malformed integer '" + s + "'");
        }
        return v;
    };
    try {
        return {parse_mode(fields[0]),
                static_cast<std::size_t>(integer(fields[1])),
                integer(fields[2]),
                real(fields[3]),
                real(fields[4]),
                real(fields[5]),
                real(fields[6]),
                integer(fields[7]),
                static_cast<std::size_t>(integer(fields[8])),
                static_cast<std::size_t>(integer(fields[9]))};
    } catch (const std::logic_error&) {
        throw ConfigError("malformed result row '" + std::string(line) + "'");
    }
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    ExperimentOutput out;
    out.rows = run_replications(config);
    out.summary = summarize_cells(out.rows);
    out.results_csv = config.output_dir / "results.csv";
    out.summary_csv = config.output_dir / "summary.csv";

    auto results = open_output(out.results_csv);
    results << kReportCsvHeader << '\n';
    for (const auto& row : out.rows) {
        results << format_row(row) << '\n';
    }
    finish(results, out.results_csv);

    auto summary = open_output(out.summary_csv);
    summary << kSummaryCsvHeader << '\n';
    for (const auto& cell : out.summary) {
        summary << format_summary(cell) << '\n';
    }
    finish(summary, out.summary_csv);
    return out;
}

StageTimings time_stages(const FogOverlay& overlay, const PlanOptions& plan, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
    StageTimings t;
    const auto t0 = clock::now();
    const auto scores = betweenness(overlay, plan.centrality);
    const auto t1 = clock::now();
    const auto assignment = select_gateways(overlay, plan.areas, scores);
    const auto t2 = clock::now();
    const auto areas = cluster_functional_areas(overlay, assignment, plan.clusters, seed, plan.spectral);
    const auto t3 = clock::now();
    t.betweenness_ms = ms(t1 - t0);
    t.decision_ms = ms(t2 - t1);
    t.clustering_ms = ms(t3 - t2);
    return t;
}

TimingOutput timing_report(const ExperimentConfig& config) {
    config.validate();
    TimingOutput out;
    for (const auto n : config.overlay_sizes) {
        std::vector<double> b, d, c;
        for (std::size_t r = 0; r < config.replications; ++r) {
            const auto seed = config.seed_for(r);
            const auto overlay = build_overlay(n, seed, config.overlay);
            const auto t = time_stages(overlay, config.plan, seed);
            out.rows.push_back({n, seed, t});
            b.push_back(t.betweenness_ms);
            d.push_back(t.decision_ms);
            c.push_back(t.clustering_ms);
        }
        out.summary.push_back({n, config.replications, {median(b), median(d), median(c)}, {stddev(b), stddev(d), stddev(c)}});
    }
    return out;
}

void write_timing(const ExperimentConfig& config, const TimingOutput& output) {
    const auto rows_path = config.output_dir / "timing.csv";
    auto rows = open_output(rows_path);
    rows << "n_devices,seed,betweenness_ms,decision_ms,clustering_ms\n";
    for (const auto& r : output.rows) {
        rows << r.n_devices << ',' << r.seed << ',' << number(r.timings.betweenness_ms) << ','
             << number(r.timings.decision_ms) << ',' << number(r.timings.clustering_ms) << '\n';
    }
    finish(rows, rows_path);

    const auto summary_path = config.output_dir / "timing_summary.csv";
    auto summary = open_output(summary_path);
    summary << "n_devices,runs,betweenness_median_ms,betweenness_stddev_ms,decision_median_ms,decision_stddev_ms,"
               "clustering_median_ms,clustering_stddev_ms\n";
    for (const auto& s : output.summary) {
        summary << s.n_devices << ',' << s.runs << ',' << number(s.median.betweenness_ms) << ','
                << number(s.stddev.betweenness_ms) << ',' << number(s.median.decision_ms) << ','
                << number(s.stddev.decision_ms) << ',' << number(s.median.clustering_ms) << ','
                << number(s.stddev.clustering_ms) << '\n';
    }
    finish(summary, summary_path);
}

} // namespace smartfog
