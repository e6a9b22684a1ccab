#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aoirelay/analytics.hpp"
#include "aoirelay/experiment.hpp"
#include "aoirelay/signaling.hpp"

namespace {

using namespace aoirelay;

struct Overrides {
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> horizon;
    std::optional<std::uint64_t> warmup;
    std::optional<std::size_t> replications;
    std::size_t jobs = 0;
    bool quiet = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-o,--out", o.out, "Output CSV path");
    cmd->add_option("--seed", o.seed, "Base seed");
    cmd->add_option("--horizon", o.horizon, "Slots per run, warm-up included");
    cmd->add_option("--warmup", o.warmup, "Warm-up slots excluded from metrics");
    cmd->add_option("--replications", o.replications, "Replications per point and scheduler");
    cmd->add_option("-j,--jobs", o.jobs, "Worker threads (0: all cores)");
    cmd->add_flag("-q,--quiet", o.quiet, "No progress on stderr");
}

std::filesystem::path output_path(const ExperimentSpec& spec, const Overrides& o) {
    if (!o.out.empty()) return o.out;
    if (!spec.output.empty()) return spec.output;
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("AOIRELAY_OUTPUT_DIR"); env != nullptr && *env != '\0') dir = env;
    return dir / (spec.name + ".csv");
}

int execute(ExperimentSpec spec, const Overrides& o) {
    if (o.seed) spec.base.seed = *o.seed;
    if (o.horizon) spec.base.horizon_slots = *o.horizon;
    if (o.warmup) spec.base.warmup_slots = *o.warmup;
    if (o.replications) spec.replications = *o.replications;
    const auto path = output_path(spec, o);

    ProgressFn progress;
    if (!o.quiet) {
        progress = [](const RunResult& r, std::size_t done, std::size_t total) {
            std::fprintf(stderr, "[%zu/%zu] point %zu %s rep %zu: AAoI %.4f  %.2fs\n", done, total, r.point,
                         std::string(to_string(r.scheduler)).c_str(), r.replication, r.metrics.aaoi(),
                         r.wall_seconds);
        };
    }
    const ResultTable table = run_experiment(spec, o.jobs, progress);
    for (const auto& written : write_outputs(table, path)) {
        if (!o.quiet) std::fprintf(stderr, "wrote %s\n", written.string().c_str());
    }
    return 0;
}

void print_bound(std::size_t n, double p, std::size_t f, std::size_t k, double eps1) {
    const analytics::BoundInputs in{n, p, f, k, eps1};
    const auto b = analytics::aoi_bound(in);
    const auto opt = analytics::optimize_activation(n, f, k, eps1);
    std::printf("N=%zu p=%s F=%zu K=%zu eps1=%s\n", n, format_number(p).c_str(), f, k, format_number(eps1).c_str());
    std::printf("Q        %s\n", format_number(b.q).c_str());
    std::printf("AAoI     %s\n", format_number(b.aaoi).c_str());
    std::printf("PAoI     %s\n", format_number(b.paoi).c_str());
    std::printf("p*       %s\n", format_number(opt.p_star).c_str());
    std::printf("AAoI(p*) %s\n", format_number(opt.aaoi).c_str());
}

void print_signaling(const SymbolBudget& budget, std::size_t k) {
    std::printf("T=%llu Tp=%llu Ti=%llu Tk=%llu Tr=%llu K=%zu B=%zu\n",
                static_cast<unsigned long long>(budget.t_total), static_cast<unsigned long long>(budget.t_pilot),
                static_cast<unsigned long long>(budget.t_id), static_cast<unsigned long long>(budget.t_relay_id),
                static_cast<unsigned long long>(budget.t_rts), k, budget.buffer_size);
    std::printf("%-8s %6s %6s %6s %6s %6s %6s %8s %8s %4s\n", "scheme", "pilot", "ids", "grant", "rts", "cts",
                "header", "in_slot", "payload", "ack");
    using enum SchedulerKind;
    for (auto kind : {kImas, kMam, kBufferedImas, kAbdr, kBufferedAbdr, kAlohaForward, kOracle}) {
        const auto c = signaling_cost(kind, budget, k);
        std::printf("%-8s %6llu %6llu %6llu %6llu %6llu %6llu %8llu %8lld %4llu\n",
                    std::string(to_string(kind)).c_str(), static_cast<unsigned long long>(c.pilot),
                    static_cast<unsigned long long>(c.packet_id), static_cast<unsigned long long>(c.grant),
                    static_cast<unsigned long long>(c.rts), static_cast<unsigned long long>(c.cts),
                    static_cast<unsigned long long>(c.header), static_cast<unsigned long long>(c.in_slot()),
                    static_cast<long long>(c.payload(budget.t_total)),
                    static_cast<unsigned long long>(c.acknowledge));
    }
    std::printf("max RTS vs memoryless %llu\n",
                static_cast<unsigned long long>(max_rts_budget(budget, k, budget.buffer_size, false)));
    std::printf("max RTS vs buffered   %llu\n",
                static_cast<unsigned long long>(max_rts_budget(budget, k, budget.buffer_size, true)));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relay-assisted AoI simulator"};
    app.require_subcommand(1);

    Overrides run_opts;
    std::string spec_file;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a JSON file");
    run_cmd->add_option("spec", spec_file, "Experiment JSON")->required();
    add_overrides(run_cmd, run_opts);

    Overrides preset_opts;
    std::string preset;
    auto* preset_cmd = app.add_subcommand("preset", "Run a figure preset");
    preset_cmd->add_option("name", preset, "f3..f10 or hetnet")->required();
    add_overrides(preset_cmd, preset_opts);

    std::size_t n = 30, f = 2, k = 5;
    double p = 0.1, eps1 = 0.1;
    auto* bound_cmd = app.add_subcommand("bound", "Analytic Q, AAoI, PAoI and optimal p");
    bound_cmd->add_option("-N,--eds", n, "EDs")->capture_default_str();
    bound_cmd->add_option("-p,--activation", p, "Activation probability")->capture_default_str();
    bound_cmd->add_option("-F,--channels", f, "Channels")->capture_default_str();
    bound_cmd->add_option("-K,--relays", k, "Relays")->capture_default_str();
    bound_cmd->add_option("-e,--eps1", eps1, "Phase-1 erasure probability")->capture_default_str();

    SymbolBudget budget;
    std::size_t sig_n = 30, sig_k = 5;
    bool derive_ids = false;
    auto* sig_cmd = app.add_subcommand("signaling", "Per-slot signaling symbols of each scheme");
    sig_cmd->add_option("-N,--eds", sig_n, "EDs (with --derive-ids)")->capture_default_str();
    sig_cmd->add_option("-K,--relays", sig_k, "Relays")->capture_default_str();
    sig_cmd->add_option("-B,--buffer", budget.buffer_size, "Buffer size")->capture_default_str();
    sig_cmd->add_option("--T", budget.t_total, "Phase-2 slot length")->capture_default_str();
    sig_cmd->add_option("--Tp", budget.t_pilot, "Pilot symbols")->capture_default_str();
    sig_cmd->add_option("--Ti", budget.t_id, "Packet ID symbols")->capture_default_str();
    sig_cmd->add_option("--Tk", budget.t_relay_id, "Relay ID symbols")->capture_default_str();
    sig_cmd->add_option("--Tr", budget.t_rts, "RTS symbols")->capture_default_str();
    sig_cmd->add_flag("--derive-ids", derive_ids, "Size Ti and Tk as ceil(log2 N) and ceil(log2 K)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return execute(load_experiment(spec_file), run_opts);
        if (*preset_cmd) return execute(figure_preset(preset), preset_opts);
        if (*bound_cmd) {
            print_bound(n, p, f, k, eps1);
            return 0;
        }
        if (*sig_cmd) {
            if (derive_ids) {
                const auto derived = SymbolBudget::for_network(sig_n, sig_k, budget.buffer_size);
                budget.t_id = derived.t_id;
                budget.t_relay_id = derived.t_relay_id;
            }
            budget.validate(sig_n, sig_k);
            print_signaling(budget, sig_k);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "simctl: invalid configuration: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "simctl: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
