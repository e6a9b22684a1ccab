#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aoirelay/analytics.hpp"
#include "aoirelay/experiment.hpp"
#include "aoirelay/matching.hpp"
#include "aoirelay/signaling.hpp"
#include "aoirelay/simulator.hpp"

namespace py = pybind11;
using namespace aoirelay;

namespace {

py::dict bound(std::size_t n_eds, double p, std::size_t n_channels, std::size_t n_relays, double eps1) {
    const auto b = analytics::aoi_bound({n_eds, p, n_channels, n_relays, eps1});
    py::dict d;
    d["q"] = b.q;
    d["aaoi"] = b.aaoi;
    d["paoi"] = b.paoi;
    return d;
}

py::tuple optimum(std::size_t n_eds, std::size_t n_channels, std::size_t n_relays, double eps1) {
    const auto o = analytics::optimize_activation(n_eds, n_channels, n_relays, eps1);
    return py::make_tuple(o.p_star, o.aaoi);
}

// weights[l], edges as (left, right) pairs.
py::tuple matching(const std::vector<std::uint64_t>& weights, std::size_t n_right,
                   const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    WeightedBipartiteGraph g(weights.size(), n_right);
    for (std::size_t l = 0; l < weights.size(); ++l) g.set_weight(l, weights[l]);
    for (auto [l, r] : edges) {
        if (l >= weights.size() || r >= n_right) throw py::index_error("edge outside the graph");
        g.add_edge(l, r);
    }
    const auto m = max_weight_matching(g);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& p : m.pairs) pairs.emplace_back(p.left, p.right);
    return py::make_tuple(m.total_weight, pairs);
}

py::dict signaling(const std::string& scheduler, std::size_t n_relays, std::size_t buffer_size) {
    SymbolBudget budget;
    budget.buffer_size = buffer_size;
    const auto c = signaling_cost(parse_scheduler_kind(scheduler), budget, n_relays);
    py::dict d;
    d["pilot"] = c.pilot;
    d["packet_id"] = c.packet_id;
    d["grant"] = c.grant;
    d["rts"] = c.rts;
    d["cts"] = c.cts;
    d["header"] = c.header;
    d["acknowledge"] = c.acknowledge;
    d["in_slot"] = c.in_slot();
    d["payload"] = c.payload(budget.t_total);
    return d;
}

py::dict simulate(const std::string& scheduler, std::size_t n_eds, double p, std::size_t n_channels,
                  std::size_t n_relays, std::vector<double> eps1, double eps2, std::size_t buffer_size,
                  std::optional<std::uint32_t> resolution, std::uint64_t horizon, std::uint64_t warmup,
                  std::uint64_t seed) {
    NetworkConfig c;
    c.n_eds = n_eds;
    c.activation_prob = p;
    c.n_channels = n_channels;
    c.n_relays = n_relays;
    c.erasure_p1 = std::move(eps1);
    c.erasure_p2 = eps2;
    c.buffer_size = buffer_size;
    c.rts_resolution = resolution;
    c.horizon_slots = horizon;
    c.warmup_slots = warmup;
    c.seed = seed;
    Simulator sim(c, parse_scheduler_kind(scheduler));
    {
        py::gil_scoped_release release;
        sim.run();
    }
    const auto& m = sim.metrics();
    const auto& k = sim.counters();
    py::dict d;
    d["aaoi"] = m.aaoi();
    d["aaoi_se"] = m.aaoi_stderr();
    d["paoi"] = m.paoi();
    d["paoi_se"] = m.paoi_stderr();
    d["measured_slots"] = m.slots();
    d["deliveries"] = k.deliveries;
    d["ap_collisions"] = k.ap_collisions;
    d["erased_tx"] = k.erased_tx;
    d["rts_collisions"] = k.rts_collisions;
    d["max_buffer_occupancy"] = k.max_buffer_occupancy;
    std::vector<double> per_ed;
    for (std::size_t i = 0; i < m.n_eds(); ++i) per_ed.push_back(m.ed_aaoi(i));
    d["ed_aaoi"] = per_ed;
    return d;
}

std::string experiment_csv(const std::string& json, std::size_t jobs) {
    const auto spec = parse_experiment(json);
    ResultTable table;
    {
        py::gil_scoped_release release;
        table = run_experiment(spec, jobs);
    }
    return format_csv(table);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Relay-assisted AoI simulator and analytic bounds";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("bound", &bound, py::arg("n_eds") = 30, py::arg("p") = 0.1, py::arg("n_channels") = 2,
          py::arg("n_relays") = 5, py::arg("eps1") = 0.1, "Q, AAoI and PAoI lower bounds");
    m.def("success_prob", [](std::size_t n, double p, std::size_t f, std::size_t k, double e) {
        return analytics::success_prob({n, p, f, k, e});
    }, py::arg("n_eds"), py::arg("p"), py::arg("n_channels"), py::arg("n_relays"), py::arg("eps1"));
    m.def("optimize_activation", &optimum, py::arg("n_eds") = 30, py::arg("n_channels") = 2,
          py::arg("n_relays") = 5, py::arg("eps1") = 0.1, "(p*, AAoI at p*)");
    m.def("convolved_pmf", &analytics::convolved_pmf_closed, py::arg("n"), py::arg("delta"), py::arg("p"),
          py::arg("q"));
    m.def("network_aoi_ccdf", [](double delta, std::size_t n, double p, double q) {
        return analytics::network_aoi_ccdf(delta, n, p, q).value;
    }, py::arg("delta"), py::arg("n_eds"), py::arg("p"), py::arg("q"));
    m.def("max_weight_matching", &matching, py::arg("weights"), py::arg("n_right"), py::arg("edges"),
          "(total weight, [(left, right)])");
    m.def("signaling_cost", &signaling, py::arg("scheduler"), py::arg("n_relays") = 5, py::arg("buffer_size") = 1);
    m.def("simulate", &simulate, py::arg("scheduler"), py::arg("n_eds") = 30, py::arg("p") = 0.1,
          py::arg("n_channels") = 2, py::arg("n_relays") = 5, py::arg("eps1") = std::vector<double>{0.1},
          py::arg("eps2") = 0.1, py::arg("buffer_size") = 1, py::arg("resolution") = py::none(),
          py::arg("horizon") = 100'000, py::arg("warmup") = 1'000, py::arg("seed") = 1);
    m.def("experiment_csv", &experiment_csv, py::arg("json"), py::arg("jobs") = 0,
          "Runs a JSON experiment and returns the CSV text");
    m.def("preset_names", &preset_names);
}
