#include "aoirelay/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aoirelay/phase1.hpp"

namespace aoirelay {
namespace {

double batch_stderr(const std::vector<double>& means) {
    if (means.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(means.size());
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    const double n = static_cast<double>(means.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

} // namespace

MetricsAccumulator::MetricsAccumulator(std::size_t n_eds, std::uint64_t measured_slots, std::size_t n_batches)
    : measured_slots_(measured_slots),
      age_sum_(n_eds, 0),
      peak_sum_(n_eds, 0),
      peak_count_(n_eds, 0),
      batch_age_sum_(std::max<std::size_t>(n_batches, 1), 0.0),
      batch_slots_(std::max<std::size_t>(n_batches, 1), 0),
      batch_peak_sum_(std::max<std::size_t>(n_batches, 1), 0.0),
      batch_peak_count_(std::max<std::size_t>(n_batches, 1), 0) {}

std::size_t MetricsAccumulator::batch_of(std::uint64_t slot_index) const {
    const std::size_t n = batch_slots_.size();
    if (measured_slots_ == 0) return 0;
    const auto b = static_cast<std::size_t>((static_cast<unsigned __int128>(slot_index) * n) / measured_slots_);
    return std::min(b, n - 1);
}

void MetricsAccumulator::record_slot(const AoiState& ages) {
    if (ages.size() != age_sum_.size()) throw std::invalid_argument("AoI vector has the wrong length");
    const std::size_t b = batch_of(slots_);
    for (std::size_t i = 0; i < ages.size(); ++i) age_sum_[i] += ages[i];
    const std::uint64_t total = ages.total();
    batch_age_sum_[b] += static_cast<double>(total);
    ++batch_slots_[b];
    const std::uint64_t bin = total - ages.size();
    if (bin >= histogram_.size()) histogram_.resize(bin + 1, 0);
    ++histogram_[bin];
    ++slots_;
}

void MetricsAccumulator::record_peak(std::size_t ed, Age age) {
    if (ed >= peak_sum_.size()) throw std::out_of_range("ED index out of range");
    peak_sum_[ed] += age;
    ++peak_count_[ed];
    const std::size_t b = batch_of(slots_ == 0 ? 0 : slots_ - 1);
    batch_peak_sum_[b] += static_cast<double>(age);
    ++batch_peak_count_[b];
}

void MetricsAccumulator::merge(const MetricsAccumulator& other) {
    if (other.n_eds() != n_eds() || other.batch_slots_.size() != batch_slots_.size()) {
        throw std::invalid_argument("cannot merge accumulators of different shapes");
    }
    measured_slots_ += other.measured_slots_;
    slots_ += other.slots_;
    for (std::size_t i = 0; i < age_sum_.size(); ++i) {
        age_sum_[i] += other.age_sum_[i];
        peak_sum_[i] += other.peak_sum_[i];
        peak_count_[i] += other.peak_count_[i];
    }
    for (std::size_t b = 0; b < batch_slots_.size(); ++b) {
        batch_age_sum_[b] += other.batch_age_sum_[b];
        batch_slots_[b] += other.batch_slots_[b];
        batch_peak_sum_[b] += other.batch_peak_sum_[b];
        batch_peak_count_[b] += other.batch_peak_count_[b];
    }
    if (other.histogram_.size() > histogram_.size()) histogram_.resize(other.histogram_.size(), 0);
    for (std::size_t s = 0; s < other.histogram_.size(); ++s) histogram_[s] += other.histogram_[s];
}

std::uint64_t MetricsAccumulator::peaks() const noexcept {
    std::uint64_t n = 0;
    for (auto c : peak_count_) n += c;
    return n;
}

double MetricsAccumulator::ed_aaoi(std::size_t ed) const {
    if (slots_ == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(age_sum_.at(ed)) / static_cast<double>(slots_);
}

double MetricsAccumulator::ed_paoi(std::size_t ed) const {
    if (peak_count_.at(ed) == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(peak_sum_[ed]) / static_cast<double>(peak_count_[ed]);
}

double MetricsAccumulator::aaoi() const {
    if (slots_ == 0 || age_sum_.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::uint64_t total = 0;
    for (auto s : age_sum_) total += s;
    return static_cast<double>(total) / (static_cast<double>(slots_) * static_cast<double>(age_sum_.size()));
}

double MetricsAccumulator::paoi() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < peak_count_.size(); ++i) {
        if (peak_count_[i] == 0) continue;
        sum += ed_paoi(i);
        ++n;
    }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

double MetricsAccumulator::aaoi_stderr() const {
    std::vector<double> means;
    for (std::size_t b = 0; b < batch_slots_.size(); ++b) {
        if (batch_slots_[b] == 0) continue;
        means.push_back(batch_age_sum_[b] /
                        (static_cast<double>(batch_slots_[b]) * static_cast<double>(age_sum_.size())));
    }
    return batch_stderr(means);
}

double MetricsAccumulator::paoi_stderr() const {
    std::vector<double> means;
    for (std::size_t b = 0; b < batch_peak_count_.size(); ++b) {
        if (batch_peak_count_[b] == 0) continue;
        means.push_back(batch_peak_sum_[b] / static_cast<double>(batch_peak_count_[b]));
    }
    return batch_stderr(means);
}

double MetricsAccumulator::empirical_ccdf(double delta) const {
    if (slots_ == 0) return std::numeric_limits<double>::quiet_NaN();
    const double scaled = delta * static_cast<double>(n_eds());
    const double n = static_cast<double>(n_eds());
    std::uint64_t above = 0;
    for (std::size_t bin = 0; bin < histogram_.size(); ++bin) {
        if (static_cast<double>(bin) + n > scaled + 1e-9) above += histogram_[bin];
    }
    return static_cast<double>(above) / static_cast<double>(slots_);
}

void RunCounters::merge(const RunCounters& o) {
    deliveries += o.deliveries;
    ap_collisions += o.ap_collisions;
    erased_tx += o.erased_tx;
    rts_ties += o.rts_ties;
    rts_collisions += o.rts_collisions;
    approximate_slots += o.approximate_slots;
    overhead_symbols += o.overhead_symbols;
    max_buffer_occupancy = std::max(max_buffer_occupancy, o.max_buffer_occupancy);
}

Simulator::Simulator(NetworkConfig config, SchedulerKind kind)
    : Simulator(config, kind, SymbolBudget::for_network(config.n_eds, config.n_relays, config.buffer_size)) {}

Simulator::Simulator(NetworkConfig config, SchedulerKind kind, SymbolBudget budget)
    : config_(std::move(config)), kind_(kind), budget_(budget) {
    config_.validate_for(kind_);
    budget_.validate(config_.n_eds, config_.n_relays);
    erasure_p1_ = resolve_erasure_p1(config_);
    ages_ = AoiState(config_.n_eds);
    buffers_ = RelayBuffers(config_.n_relays, is_buffered(kind_) ? config_.buffer_size : 0);
    metrics_ = MetricsAccumulator(config_.n_eds, config_.measured_slots());
}

SlotRecord Simulator::step() {
    if (done()) throw std::logic_error("simulation horizon exhausted");
    SlotRecord record;
    advance(&record);
    return record;
}

void Simulator::run() {
    while (!done()) advance(nullptr);
}

void Simulator::advance(SlotRecord* record) {
    const Slot t = slot_;
    const bool measured = t >= config_.warmup_slots;
    if (measured) metrics_.record_slot(ages_);

    const Phase1Realization realization = activate(config_, erasure_p1_, t);
    CaptureReport captures = resolve_captures(realization, config_.n_channels);
    ConnectivityMatrix h =
        ConnectivityMatrix::draw(config_.n_channels, config_.n_relays, config_.erasure_p2, config_.seed, t);

    const SlotContext context{captures, buffers_, h, ages_, t, config_.seed,
                              RtsParams{config_.rts_max_delay, config_.rts_resolution}};
    ScheduleResult scheduled = schedule(kind_, context, budget_);
    SlotOutcome outcome = resolve_phase2(scheduled.plan, h, t);
    outcome.overhead_symbols = scheduled.overhead_symbols;

    if (measured) {
        // One peak per ED per slot, from its freshest delivery.
        std::vector<Age> freshest(config_.n_eds, std::numeric_limits<Age>::max());
        for (const auto& d : outcome.delivered) {
            freshest[d.packet.source_ed] = std::min(freshest[d.packet.source_ed], d.age);
        }
        for (std::size_t ed = 0; ed < freshest.size(); ++ed) {
            if (freshest[ed] < ages_[ed]) metrics_.record_peak(ed, ages_[ed]);
        }
        counters_.deliveries += outcome.delivered.size();
        counters_.ap_collisions += outcome.ap_collisions;
        counters_.erased_tx += outcome.erased_tx;
        counters_.rts_ties += scheduled.plan.rts_ties;
        counters_.rts_collisions += scheduled.plan.rts_collisions;
        counters_.approximate_slots += scheduled.plan.approximate ? 1 : 0;
        counters_.overhead_symbols += outcome.overhead_symbols;
    }

    AoiState next = apply_deliveries(ages_, outcome.delivered, t);
    if (is_buffered(kind_)) {
        buffers_ = update_buffers(buffers_, captures, next, t);
        counters_.max_buffer_occupancy = std::max(counters_.max_buffer_occupancy, buffers_.occupancy());
    }

    if (record != nullptr) {
        record->slot = t;
        record->ages_before = ages_;
        record->captures = std::move(captures);
        record->h = std::move(h);
        record->plan = std::move(scheduled.plan);
        record->outcome = std::move(outcome);
    }
    ages_ = std::move(next);
    ++slot_;
}

} // namespace aoirelay
