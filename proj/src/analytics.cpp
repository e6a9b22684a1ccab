#include "aoirelay/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aoirelay::analytics {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailMass = 1e-12;

// log C(n, k) by the multiplicative recurrence C(n, k) = prod (n-k+i)/i.
double log_choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return kNegInf;
    k = std::min(k, n - k);
    double acc = 0.0;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc += std::log(static_cast<double>(n - k + i) / static_cast<double>(i));
    }
    return acc;
}

// log of a binomial pmf given the row's log C values; exact at prob 0 and 1.
double log_binomial_term(double log_coeff, std::uint64_t k, std::uint64_t n, double prob) {
    if (prob <= 0.0) return k == 0 ? 0.0 : kNegInf;
    if (prob >= 1.0) return k == n ? 0.0 : kNegInf;
    return log_coeff + static_cast<double>(k) * std::log(prob) + static_cast<double>(n - k) * std::log1p(-prob);
}

// 1 - (1 - x)^K without cancellation for small x.
double at_least_one(double x, std::size_t k) {
    if (x >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(k) * std::log1p(-x));
}

void require_probability(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

// Log pmf of the summed AoI S of n i.i.d. geometric(pq) ages:
// (pq)^n (1-pq)^(S-n) C(S-1, n-1). The closed-form n-fold convolution.
double log_sum_pmf(std::uint64_t total, std::size_t n, double pq) {
    if (total < n) return kNegInf;
    if (pq >= 1.0) return total == n ? 0.0 : kNegInf;
    return static_cast<double>(n) * std::log(pq) + static_cast<double>(total - n) * std::log1p(-pq) +
           log_choose(total - 1, n - 1);
}

struct Tail {
    double value;
    double defect;
};

// Sum of the S-pmf over S >= first, stopped once the geometric envelope of
// what is left drops below kTailMass.
Tail sum_pmf_from(std::uint64_t first, std::size_t n, double pq) {
    first = std::max<std::uint64_t>(first, n);
    if (pq >= 1.0) return {first == n ? 1.0 : 0.0, 0.0};
    if (pq <= 0.0) return {1.0, 0.0};
    const double log_keep = std::log1p(-pq);
    double log_term = log_sum_pmf(first, n, pq);
    double sum = 0.0;
    for (std::uint64_t s = first;; ++s) {
        const double term = std::exp(log_term);
        sum += term;
        // Ratio pmf(s+1)/pmf(s) = (1-pq) s / (s-n+1); it decreases in s.
        const double log_ratio = log_keep + std::log(static_cast<double>(s)) -
                                 std::log(static_cast<double>(s - n + 1));
        const double ratio = std::exp(log_ratio);
        if (ratio < 1.0) {
            const double envelope = term * ratio / (1.0 - ratio);
            if (envelope < kTailMass) return {sum, envelope};
        }
        log_term += log_ratio;
    }
}

} // namespace

void BoundInputs::validate() const {
    if (n_eds < 1) throw std::invalid_argument("n_eds must be at least 1");
    if (n_channels < 1) throw std::invalid_argument("n_channels must be at least 1");
    if (n_relays < 1) throw std::invalid_argument("n_relays must be at least 1");
    require_probability(activation_prob, "activation_prob");
    require_probability(erasure_p1, "erasure_p1");
}

double prob_n_active(std::size_t n, std::size_t n_eds, double p) {
    if (n_eds < 1) throw std::invalid_argument("n_eds must be at least 1");
    require_probability(p, "p");
    const std::uint64_t others = n_eds - 1;
    if (n > others) return 0.0;
    return std::exp(log_binomial_term(log_choose(others, n), n, others, p));
}

double prob_u_same_channel(std::size_t u, std::size_t n, std::size_t n_channels) {
    if (n_channels < 1) throw std::invalid_argument("n_channels must be at least 1");
    if (u > n) return 0.0;
    return std::exp(log_binomial_term(log_choose(n, u), u, n, 1.0 / static_cast<double>(n_channels)));
}

double capture_prob(std::size_t u, double erasure_p1) {
    require_probability(erasure_p1, "erasure_p1");
    if (u == 0) return 1.0 - erasure_p1;
    return (1.0 - erasure_p1) * std::pow(erasure_p1, static_cast<double>(u));
}

double success_prob(const BoundInputs& in) {
    in.validate();
    const std::size_t others = in.n_eds - 1;
    const double p = in.activation_prob;
    const double per_channel = 1.0 / static_cast<double>(in.n_channels);

    std::vector<double> reach(others + 1);
    for (std::size_t u = 0; u <= others; ++u) reach[u] = at_least_one(capture_prob(u, in.erasure_p1), in.n_relays);

    double q = 0.0;
    double log_c_n = 0.0; // log C(others, n), advanced by recurrence
    for (std::size_t n = 0; n <= others; ++n) {
        if (n > 0) {
            log_c_n += std::log(static_cast<double>(others - n + 1) / static_cast<double>(n));
        }
        const double log_pn = log_binomial_term(log_c_n, n, others, p);
        if (log_pn == kNegInf) continue;
        const double pn = std::exp(log_pn);
        double inner = 0.0;
        double log_c_u = 0.0; // log C(n, u)
        for (std::size_t u = 0; u <= n; ++u) {
            if (u > 0) log_c_u += std::log(static_cast<double>(n - u + 1) / static_cast<double>(u));
            const double log_pu = log_binomial_term(log_c_u, u, n, per_channel);
            if (log_pu == kNegInf) continue;
            inner += std::exp(log_pu) * reach[u];
        }
        q += pn * inner;
    }
    return std::clamp(q, 0.0, 1.0);
}

double success_prob_heterogeneous(std::size_t ed, std::span<const double> erasure_p1, double p,
                                  std::size_t n_channels, std::size_t n_relays) {
    if (ed >= erasure_p1.size()) throw std::out_of_range("ED index outside erasure vector");
    require_probability(p, "p");
    if (n_channels < 1 || n_relays < 1) throw std::invalid_argument("need at least one channel and relay");
    // 1 - E[(1 - a)^K] with a = (1-e_i) prod_{j in colliders} e_j and each other
    // ED colliding independently with probability p/F; expand binomially.
    const double collide = p / static_cast<double>(n_channels);
    const double own = 1.0 - erasure_p1[ed];
    double q = 0.0;
    double log_c = 0.0;
    for (std::size_t m = 1; m <= n_relays; ++m) {
        log_c += std::log(static_cast<double>(n_relays - m + 1) / static_cast<double>(m));
        double moment = std::pow(own, static_cast<double>(m));
        for (std::size_t j = 0; j < erasure_p1.size(); ++j) {
            if (j == ed) continue;
            moment *= 1.0 - collide * (1.0 - std::pow(erasure_p1[j], static_cast<double>(m)));
        }
        const double term = std::exp(log_c) * moment;
        q += (m % 2 == 1) ? term : -term;
    }
    return std::clamp(q, 0.0, 1.0);
}

BoundResult aoi_bound(const BoundInputs& inputs) {
    BoundResult r;
    r.q = success_prob(inputs);
    const double pq = inputs.activation_prob * r.q;
    const double inf = std::numeric_limits<double>::infinity();
    r.aaoi = pq > 0.0 ? 1.0 / pq : inf;
    r.paoi = r.aaoi;
    r.p_ratio = pq < 1.0 ? pq / (1.0 - pq) : inf;
    return r;
}

double stationary_pmf(std::uint64_t a, double p, double q) {
    require_probability(p, "p");
    require_probability(q, "q");
    if (a < 1) return 0.0;
    const double pq = p * q;
    return pq * std::pow(1.0 - pq, static_cast<double>(a - 1));
}

double convolved_pmf_closed(std::size_t n, std::uint64_t delta, double p, double q) {
    if (n < 1) throw std::invalid_argument("convolution order must be at least 1");
    require_probability(p, "p");
    require_probability(q, "q");
    if (delta < n) return 0.0;
    return std::exp(log_sum_pmf(delta, n, p * q));
}

double network_aoi_density(double delta, std::size_t n_eds, double p, double q) {
    if (n_eds < 1) throw std::invalid_argument("n_eds must be at least 1");
    if (!(delta >= 1.0)) throw std::invalid_argument("network-average AoI is at least 1");
    require_probability(p, "p");
    require_probability(q, "q");
    const double pq = p * q;
    const double n = static_cast<double>(n_eds);
    const double scaled = delta * n;
    if (pq >= 1.0) return scaled == n ? 1.0 : 0.0;
    if (pq <= 0.0) return 0.0;
    // P^N (1-pq)^(dN) = (pq)^N (1-pq)^(dN - N).
    const double log_density = n * std::log(pq) + (scaled - n) * std::log1p(-pq) - std::lgamma(n) +
                               std::lgamma(scaled) - std::lgamma(scaled - n + 1.0);
    return std::exp(log_density);
}

TailSum network_aoi_ccdf(double delta, std::size_t n_eds, double p, double q) {
    if (n_eds < 1) throw std::invalid_argument("n_eds must be at least 1");
    require_probability(p, "p");
    require_probability(q, "q");
    // Lattice points k/N strictly above delta.
    const double scaled = delta * static_cast<double>(n_eds);
    const std::uint64_t first =
        scaled < 0.0 ? 0 : static_cast<std::uint64_t>(std::floor(scaled + 1e-9)) + 1;
    const Tail t = sum_pmf_from(first, n_eds, p * q);
    return {std::min(t.value, 1.0), t.defect};
}

std::vector<double> network_aoi_ccdf_table(std::size_t n_eds, double p, double q, std::uint64_t max_total) {
    if (n_eds < 1) throw std::invalid_argument("n_eds must be at least 1");
    if (max_total < n_eds) return {};
    const double pq = p * q;
    std::vector<double> table(max_total - n_eds + 1);
    // Accumulate from the far tail inward so small tails keep full precision.
    double above = sum_pmf_from(max_total + 1, n_eds, pq).value;
    for (std::uint64_t s = max_total;; --s) {
        table[s - n_eds] = std::min(above, 1.0);
        if (s == n_eds) break;
        above += std::exp(log_sum_pmf(s, n_eds, pq));
    }
    return table;
}

ActivationOptimum optimize_activation(std::size_t n_eds, std::size_t n_channels, std::size_t n_relays,
                                      double erasure_p1) {
    BoundInputs in{n_eds, 0.0, n_channels, n_relays, erasure_p1};
    in.activation_prob = 0.5;
    in.validate();
    auto aaoi_at = [&](double p) {
        in.activation_prob = p;
        return aoi_bound(in).aaoi;
    };

    constexpr std::size_t kGrid = 1000;
    std::vector<double> grid(kGrid + 1, std::numeric_limits<double>::infinity());
    std::size_t best = 1;
    for (std::size_t i = 1; i <= kGrid; ++i) {
        grid[i] = aaoi_at(static_cast<double>(i) / kGrid);
        if (grid[i] < grid[best]) best = i;
    }
    if (!std::isfinite(grid[best])) throw std::runtime_error("AAoI bound is infinite for every p");
    const double slack = 1e-12 * grid[best];
    for (std::size_t i = 2; i <= best; ++i) {
        if (grid[i] > grid[i - 1] + slack) throw std::runtime_error("AAoI bound is not unimodal in p");
    }
    for (std::size_t i = best + 1; i <= kGrid; ++i) {
        if (grid[i] + slack < grid[i - 1]) throw std::runtime_error("AAoI bound is not unimodal in p");
    }

    double lo = static_cast<double>(best - 1) / kGrid;
    double hi = static_cast<double>(std::min(best + 1, kGrid)) / kGrid;
    lo = std::max(lo, 1e-9);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = aaoi_at(x1);
    double f2 = aaoi_at(x2);
    while (hi - lo > 1e-10) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = aaoi_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = aaoi_at(x2);
        }
    }
    ActivationOptimum out{0.5 * (lo + hi), 0.0};
    out.aaoi = aaoi_at(out.p_star);
    const double grid_p = static_cast<double>(best) / kGrid;
    if (grid[best] < out.aaoi) out = {grid_p, grid[best]};
    return out;
}

} // namespace aoirelay::analytics
