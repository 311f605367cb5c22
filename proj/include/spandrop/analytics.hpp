#pragma once

// Closed-form characterization of the mask distributions, plus Monte Carlo
// and exhaustive cross-checkers.
//
// Conventions, used consistently everywhere:
//   - k counts KEPT spans; the per-span keep probability is 1 - p.
//   - bernoulli keep count:       Bin(n, 1 - p)
//   - beta-bernoulli keep count:  B-Bin(n; alpha = gamma, beta = gamma (1-p)/p),
//     with beta attached to the kept count and alpha to the dropped count:
//       P(k | n, a, b) = C(n, k) G(k+b) G(n-k+a) G(a+b) / (G(n+a+b) G(a) G(b))
//   - entropies are in nats; divide by ln 2 for bits.
// Mask modes share the distribution of their underlying drop mode, and
// gamma = +inf routes beta modes to the bernoulli closed forms.

#include <cstdint>
#include <vector>

#include "spandrop/rng.hpp"
#include "spandrop/types.hpp"

namespace spandrop::analytics {

// ln Gamma(x) for x > 0 (throws std::domain_error otherwise). Lanczos
// approximation evaluated in extended precision; good to ~1e-14 relative.
double log_gamma(double x);

// ln n! with a cached table for small n.
double log_factorial(std::int64_t n);

// ln C(n, k).
double log_choose(std::int64_t n, std::int64_t k);

// P(keep count = k) when each of N spans is independently dropped with
// probability p. Throws std::domain_error when k is out of [0, N].
double binomial_pmf(std::int64_t k, std::int64_t N, double p);

// Beta-binomial pmf of the kept count; alpha, beta > 0.
double beta_binomial_pmf(std::int64_t k, std::int64_t N, double alpha, double beta);

// Probability that all m supporting spans survive one mask draw.
double prob_noise_free(std::int64_t m, const DropConfig& cfg);

// Probability that the whole length-n sequence survives.
double prob_full_length(std::int64_t n, const DropConfig& cfg);

// Entropy of the mask distribution divided by n, in nats. The mask law is
// exchangeable, so every pattern with k kept spans has the same probability
// q_k = pmf(k) / C(n, k) and the total entropy is -sum_k C(n,k) q_k ln q_k.
double per_span_entropy(std::int64_t n, const DropConfig& cfg);

// Full pmf over k = 0..n for the configured mode.
std::vector<double> keep_count_distribution(std::int64_t n, const DropConfig& cfg);

struct AnalyticReport {
    std::int64_t n = 0;
    std::int64_t m = 0;
    DropConfig config;
    std::vector<double> keep_pmf;
    double p_noise_free = 0.0;
    double p_full_length = 0.0;
    double entropy_per_span = 0.0;
};

AnalyticReport analytic_report(std::int64_t n, std::int64_t m, const DropConfig& cfg);

// Empirical counterpart of AnalyticReport, produced either by Monte Carlo
// sampling of the real mask sampler or by exhaustive enumeration.
struct EmpiricalReport {
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::uint64_t trials = 0;
    std::vector<double> keep_pmf;
    double noise_free_fraction = 0.0;
    double full_length_fraction = 0.0;
    double entropy_per_span = 0.0;   // plug-in estimate from the keep-count histogram
    double mean_keep = 0.0;

    // Gaps against the analytic report for the same (n, m, cfg).
    double tv_distance = 0.0;
    double noise_free_gap = 0.0;
    double mean_keep_gap = 0.0;
};

// Draws `trials` masks from the unconstrained sampler (no noise-free policy)
// and compares against the closed forms. Trials are partitioned into fixed
// chunks with sub-streams derived from `rng`, so the result is identical for
// any worker count.
EmpiricalReport monte_carlo_report(std::int64_t n, std::int64_t m, const DropConfig& cfg,
                                   std::uint64_t trials, RandomStream& rng, int workers = 1);

// Exact alternative to Monte Carlo for small n: enumerates all 2^n masks,
// weighting each mask from first principles (product of per-span
// probabilities for bernoulli; numeric integration over the sequence-level
// rate for beta modes). Independent of the closed-form path above. n <= 22.
EmpiricalReport exhaustive_report(std::int64_t n, std::int64_t m, const DropConfig& cfg,
                                  std::int64_t quadrature_points = 1000000);

double total_variation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace spandrop::analytics
