#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace aoirelay::analytics {

struct BoundInputs {
    std::size_t n_eds = 30;
    double activation_prob = 0.1;
    std::size_t n_channels = 2;
    std::size_t n_relays = 5;
    double erasure_p1 = 0.1;

    void validate() const;
};

struct BoundResult {
    double q = 0.0;       // per-slot success probability of an active ED
    double aaoi = 0.0;    // 1 / (p q)
    double paoi = 0.0;    // 1 / (p q)
    double p_ratio = 0.0; // p q / (1 - p q)
};

/// Probability that n of the other N-1 EDs are active.
double prob_n_active(std::size_t n, std::size_t n_eds, double p);

/// Probability that u of n other active EDs picked the tagged ED's channel.
double prob_u_same_channel(std::size_t u, std::size_t n, std::size_t n_channels);

/// Probability that one relay captures the tagged packet with u colliders:
/// (1 - eps1) eps1^u.
double capture_prob(std::size_t u, double erasure_p1);

/// Probability that an active ED's packet is captured by at least one relay.
double success_prob(const BoundInputs& inputs);

/// Per-ED success probability when every ED has its own phase-1 erasure rate.
/// Reduces to success_prob when all rates are equal.
double success_prob_heterogeneous(std::size_t ed, std::span<const double> erasure_p1, double p,
                                  std::size_t n_channels, std::size_t n_relays);

BoundResult aoi_bound(const BoundInputs& inputs);

/// Stationary AoI pmf pi(a) = pQ (1 - pQ)^(a-1), a >= 1.
double stationary_pmf(std::uint64_t a, double p, double q);

/// n-fold convolution of pi evaluated in closed form at integer delta;
/// zero below n.
double convolved_pmf_closed(std::size_t n, std::uint64_t delta, double p, double q);

/// Density of the network-average AoI at delta on the 1/N lattice, built
/// from log-gamma terms.
double network_aoi_density(double delta, std::size_t n_eds, double p, double q);

struct TailSum {
    double value = 0.0;
    double mass_defect = 0.0; // probability mass dropped by truncation
};

/// Pr{network-average AoI > delta}, summed over lattice points k/N > delta
/// until the remaining mass falls below 1e-12.
TailSum network_aoi_ccdf(double delta, std::size_t n_eds, double p, double q);

/// Lattice CCDF for every integer total S = N, N+1, ..., max_total: entry
/// S - N is Pr{sum of ages > S}.
std::vector<double> network_aoi_ccdf_table(std::size_t n_eds, double p, double q, std::uint64_t max_total);

struct ActivationOptimum {
    double p_star = 0.0;
    double aaoi = 0.0;
};

/// Minimizes the AAoI bound over p in (0, 1]: 1e-3 grid scan, unimodality
/// check, golden-section refinement. Throws std::runtime_error when the grid
/// is not unimodal.
ActivationOptimum optimize_activation(std::size_t n_eds, std::size_t n_channels, std::size_t n_relays,
                                      double erasure_p1);

} // namespace aoirelay::analytics
