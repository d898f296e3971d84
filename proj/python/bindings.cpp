#include "smartfog/centrality.hpp"
#include "smartfog/clustering.hpp"
#include "smartfog/decision.hpp"
#include "smartfog/error.hpp"
#include "smartfog/harness.hpp"
#include "smartfog/overlay.hpp"
#include "smartfog/pareto.hpp"
#include "smartfog/simulation.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <tuple>

namespace py = pybind11;
using namespace smartfog;

namespace {

CentralityMode centrality_mode(bool weighted) {
    return weighted ? CentralityMode::WeightedByLatency : CentralityMode::Unweighted;
}

std::vector<AreaType> area_types(const std::vector<std::string>& names) {
    std::vector<AreaType> out;
    for (const auto& n : names) {
        out.push_back(parse_area_type(n));
    }
    return out;
}

py::dict device_dict(const FogDevice& d) {
    py::dict out;
    out["id"] = raw(d.id);
    out["mips"] = d.mips;
    out["memory_gb"] = d.memory_gb;
    out["storage_gb"] = d.storage_gb;
    out["arch"] = std::string(to_string(d.arch));
    return out;
}

py::dict report_dict(const SimulationReport& r) {
    py::dict out;
    out["mode"] = std::string(to_string(r.mode));
    out["n_devices"] = r.n_devices;
    out["seed"] = r.seed;
    out["spa_delays_ms"] = r.spa_delays_ms;
    out["pc_delays_ms"] = r.pc_delays_ms;
    out["network_load_bytes"] = r.network_load_bytes;
    for (const auto& [name, k] : {std::pair{"spa", &r.spa}, std::pair{"pc", &r.pc}}) {
        py::dict counters;
        counters["emitted"] = k->emitted;
        counters["completed"] = k->completed;
        counters["dropped"] = k->dropped;
        counters["in_flight"] = k->in_flight;
        out[name] = counters;
    }
    out["csv_row"] = report_csv_row(r);
    return out;
}

py::dict summary_dict(const CellSummary& c) {
    py::dict out;
    out["mode"] = std::string(to_string(c.mode));
    out["n_devices"] = c.n_devices;
    out["runs"] = c.runs;
    out["spa_median_ms"] = c.spa_median_ms;
    out["spa_stddev_ms"] = c.spa_stddev_ms;
    out["pc_median_ms"] = c.pc_median_ms;
    out["pc_stddev_ms"] = c.pc_stddev_ms;
    out["network_load_median_bytes"] = c.network_load_median_bytes;
    out["network_load_stddev_bytes"] = c.network_load_stddev_bytes;
    return out;
}

} // namespace

PYBIND11_MODULE(_smartfog, m) {
    m.doc() = "Fog overlay gateway selection, functional-area clustering and simulation";

    static py::exception<Error> base(m, "SmartFogError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<TopologyError>(m, "TopologyError", base.ptr());
    py::register_exception<ChurnRejected>(m, "ChurnRejected", base.ptr());
    py::register_exception<ConflictError>(m, "ConflictError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<FogOverlay>(m, "Overlay")
        .def_static("from_json", [](const std::string& text) { return parse_overlay(text); }, py::arg("text"))
        .def("to_json", [](const FogOverlay& o) { return serialize_overlay(o); })
        .def("__len__", &FogOverlay::size)
        .def("cloud_attached",
             [](const FogOverlay& o) {
                 std::map<std::uint32_t, double> out;
                 for (const auto& [id, latency] : o.cloud_latency()) {
                     out[raw(id)] = latency;
                 }
                 return out;
             })
        .def("devices",
             [](const FogOverlay& o) {
                 py::list out;
                 for (const auto& d : o.devices()) {
                     out.append(device_dict(d));
                 }
                 return out;
             })
        .def("links",
             [](const FogOverlay& o) {
                 std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> out;
                 for (const auto& l : o.links()) {
                     out.emplace_back(raw(l.a), raw(l.b), l.latency_ms);
                 }
                 return out;
             })
        .def("latency_to_cloud",
             [](const FogOverlay& o, std::uint32_t device) { return latency_to_cloud(o, DeviceId{device}); },
             py::arg("device"))
        .def(
            "leave",
            [](const FogOverlay& o, std::uint32_t device) {
                return apply_churn(o, ChurnEvent{LeaveEvent{DeviceId{device}}, 0.0});
            },
            py::arg("device"), "Overlay without `device`; raises ChurnRejected if that would disconnect it.")
        .def("__eq__", [](const FogOverlay& a, const FogOverlay& b) { return a == b; });

    m.def("build_overlay", [](std::size_t n, std::uint64_t seed) { return build_overlay(n, seed); }, py::arg("n"),
          py::arg("seed"));

    m.def(
        "betweenness",
        [](const FogOverlay& o, bool weighted) {
            std::map<std::uint32_t, double> out;
            for (const auto& [id, s] : betweenness(o, centrality_mode(weighted)).scores) {
                out[raw(id)] = s;
            }
            return out;
        },
        py::arg("overlay"), py::arg("weighted") = true);

    m.def(
        "non_dominated_sort",
        [](const std::vector<std::vector<double>>& points, const std::vector<bool>& maximize) {
            std::vector<Sense> senses;
            for (const bool b : maximize) {
                senses.push_back(b ? Sense::Maximize : Sense::Minimize);
            }
            std::vector<ObjectiveVector> pts;
            for (const auto& p : points) {
                pts.emplace_back(p, senses);
            }
            return non_dominated_sort(pts).fronts;
        },
        py::arg("points"), py::arg("maximize"));

    m.def(
        "select_gateways",
        [](const FogOverlay& o, const std::vector<std::string>& areas, bool weighted) {
            std::vector<std::pair<std::uint32_t, std::string>> out;
            const auto types = area_types(areas);
            const auto evaluations = evaluate_devices(o, betweenness(o, centrality_mode(weighted)));
            for (const auto& g : select_gateways(evaluations, types).gateways) {
                out.emplace_back(raw(g.device), std::string(to_string(g.area)));
            }
            return out;
        },
        py::arg("overlay"), py::arg("areas"), py::arg("weighted") = true);

    m.def(
        "functional_areas_json",
        [](const FogOverlay& o, const std::vector<std::string>& areas, std::size_t k, std::uint64_t seed) {
            PlanOptions options;
            options.areas = area_types(areas);
            options.clusters = k;
            return serialize_functional_areas(plan_smartfog(o, options, seed).areas);
        },
        py::arg("overlay"), py::arg("areas"), py::arg("k"), py::arg("seed"));

    m.def(
        "simulate",
        [](const FogOverlay& o, const std::string& mode, std::uint64_t seed, const std::string& config_json) {
            const auto cfg = parse_config(config_json);
            const auto m = parse_mode(mode);
            SimulationReport r;
            {
                py::gil_scoped_release release;
                if (m == Mode::SmartFog) {
                    const auto plan = plan_smartfog(o, cfg.plan, seed);
                    r = run_simulation(o, m, cfg.workload, seed, &plan);
                } else {
                    r = run_simulation(o, m, cfg.workload, seed);
                }
            }
            return report_dict(r);
        },
        py::arg("overlay"), py::arg("mode"), py::arg("seed"), py::arg("config_json") = "{}");

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            const auto cfg = parse_config(config_json);
            cfg.validate();
            ExperimentOutput out;
            {
                py::gil_scoped_release release;
                out = run_experiment(cfg);
            }
            py::list cells;
            for (const auto& c : out.summary) {
                cells.append(summary_dict(c));
            }
            py::dict result;
            result["results_csv"] = out.results_csv.string();
            result["summary_csv"] = out.summary_csv.string();
            result["summary"] = cells;
            return result;
        },
        py::arg("config_json"));
}
