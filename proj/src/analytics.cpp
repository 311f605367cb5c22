#include "spandrop/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "spandrop/sampler.hpp"

namespace spandrop::analytics {

namespace {

// Lanczos approximation (g = 671/128, 14 terms), evaluated in long double so
// the rounding of the (x + 0.5) ln(x + g + 0.5) term stays below the
// approximation error even for x ~ 1e7.
long double lgamma_ld(long double x) {
    static const long double cof[14] = {
        57.1562356658629235L,     -59.5979603554754912L,    14.1360979747417471L,
        -0.491913816097620199L,   0.339946499848118887e-4L, 0.465236289270485756e-4L,
        -0.983744753048795646e-4L, 0.158088703224912494e-3L, -0.210264441724104883e-3L,
        0.217439618115212643e-3L, -0.164318106536763890e-3L, 0.844182239838527433e-4L,
        -0.261908384015814087e-4L, 0.368991826595316234e-5L};
    long double y = x;
    long double tmp = x + 5.24218750000000000L;
    tmp = (x + 0.5L) * std::log(tmp) - tmp;
    long double ser = 0.999999999999997092L;
    for (int j = 0; j < 14; ++j) ser += cof[j] / ++y;
    return tmp + std::log(2.5066282746310005L * ser / x);
}

constexpr std::int64_t kLogFactCache = 1 << 17;

const std::vector<long double>& log_fact_table() {
    static const std::vector<long double> table = [] {
        std::vector<long double> t(kLogFactCache + 1);
        t[0] = 0.0L;
        long double sum = 0.0L, comp = 0.0L;   // Kahan-compensated sum of ln k
        for (std::int64_t k = 1; k <= kLogFactCache; ++k) {
            const long double term = std::log(static_cast<long double>(k)) - comp;
            const long double next = sum + term;
            comp = (next - sum) - term;
            sum = next;
            t[static_cast<std::size_t>(k)] = sum;
        }
        return t;
    }();
    return table;
}

long double log_fact_ld(std::int64_t n) {
    if (n <= kLogFactCache) return log_fact_table()[static_cast<std::size_t>(n)];
    return lgamma_ld(static_cast<long double>(n) + 1.0L);
}

long double log_choose_ld(std::int64_t n, std::int64_t k) {
    return log_fact_ld(n) - log_fact_ld(k) - log_fact_ld(n - k);
}

long double log_binomial_pmf_ld(std::int64_t k, std::int64_t N, double p) {
    long double L = log_choose_ld(N, k);
    if (k > 0) L += static_cast<long double>(k) * std::log1p(-static_cast<long double>(p));
    if (N - k > 0) L += static_cast<long double>(N - k) * std::log(static_cast<long double>(p));
    return L;
}

long double log_beta_binomial_pmf_ld(std::int64_t k, std::int64_t N, long double a, long double b) {
    return log_choose_ld(N, k) + lgamma_ld(static_cast<long double>(k) + b) +
           lgamma_ld(static_cast<long double>(N - k) + a) - lgamma_ld(static_cast<long double>(N) + a + b) +
           lgamma_ld(a + b) - lgamma_ld(a) - lgamma_ld(b);
}

// True when the keep-count law for cfg is the plain binomial: bernoulli and
// mask_bernoulli modes, and beta modes at gamma = +inf (degenerate beta).
bool binomial_law(const DropConfig& cfg) {
    return !is_beta_mode(cfg.mode) || std::isinf(cfg.gamma);
}

void check_count_range(std::int64_t k, std::int64_t N) {
    if (N < 0) throw std::domain_error("negative count");
    if (k < 0 || k > N) throw std::domain_error("kept count out of [0, N]");
}

double bernoulli_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

}  // namespace

double log_gamma(double x) {
    if (std::isnan(x) || x <= 0.0) throw std::domain_error("log_gamma requires x > 0");
    return static_cast<double>(lgamma_ld(static_cast<long double>(x)));
}

double log_factorial(std::int64_t n) {
    if (n < 0) throw std::domain_error("log_factorial requires n >= 0");
    return static_cast<double>(log_fact_ld(n));
}

double log_choose(std::int64_t n, std::int64_t k) {
    check_count_range(k, n);
    return static_cast<double>(log_choose_ld(n, k));
}

double binomial_pmf(std::int64_t k, std::int64_t N, double p) {
    check_count_range(k, N);
    if (std::isnan(p) || p < 0.0 || p > 1.0) throw std::domain_error("p out of [0, 1]");
    if (p == 0.0) return k == N ? 1.0 : 0.0;
    if (p == 1.0) return k == 0 ? 1.0 : 0.0;
    return static_cast<double>(std::exp(log_binomial_pmf_ld(k, N, p)));
}

double beta_binomial_pmf(std::int64_t k, std::int64_t N, double alpha, double beta) {
    check_count_range(k, N);
    if (!(alpha > 0.0) || !(beta > 0.0) || std::isinf(alpha) || std::isinf(beta))
        throw std::domain_error("alpha and beta must be positive and finite");
    return static_cast<double>(std::exp(log_beta_binomial_pmf_ld(
        k, N, static_cast<long double>(alpha), static_cast<long double>(beta))));
}

double prob_noise_free(std::int64_t m, const DropConfig& cfg) {
    if (m < 0) throw std::domain_error("m must be >= 0");
    if (m == 0 || cfg.p == 0.0) return 1.0;
    if (binomial_law(cfg))
        return static_cast<double>(
            std::exp(static_cast<long double>(m) * std::log1p(-static_cast<long double>(cfg.p))));
    return beta_binomial_pmf(m, m, cfg.alpha(), cfg.beta());
}

double prob_full_length(std::int64_t n, const DropConfig& cfg) {
    if (n < 0) throw std::domain_error("n must be >= 0");
    if (n == 0 || cfg.p == 0.0) return 1.0;
    if (binomial_law(cfg))
        return static_cast<double>(
            std::exp(static_cast<long double>(n) * std::log1p(-static_cast<long double>(cfg.p))));
    const long double a = cfg.alpha();
    const long double b = cfg.beta();
    const long double nl = static_cast<long double>(n);
    return static_cast<double>(
        std::exp(lgamma_ld(nl + b) + lgamma_ld(a + b) - lgamma_ld(nl + a + b) - lgamma_ld(b)));
}

double per_span_entropy(std::int64_t n, const DropConfig& cfg) {
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (cfg.p == 0.0) return 0.0;
    if (binomial_law(cfg)) return bernoulli_entropy(cfg.p);

    const long double a = cfg.alpha();
    const long double b = cfg.beta();
    const long double const_part = lgamma_ld(a + b) - lgamma_ld(a) - lgamma_ld(b) -
                                   lgamma_ld(static_cast<long double>(n) + a + b);
    long double H = 0.0L;
    for (std::int64_t k = 0; k <= n; ++k) {
        // log q_k: probability of one particular pattern with k kept spans.
        const long double log_q = lgamma_ld(static_cast<long double>(k) + b) +
                                  lgamma_ld(static_cast<long double>(n - k) + a) + const_part;
        const long double log_pmf = log_choose_ld(n, k) + log_q;
        H -= std::exp(log_pmf) * log_q;
    }
    return static_cast<double>(H / static_cast<long double>(n));
}

std::vector<double> keep_count_distribution(std::int64_t n, const DropConfig& cfg) {
    if (n < 0) throw std::domain_error("n must be >= 0");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (cfg.p == 0.0) {
        pmf[static_cast<std::size_t>(n)] = 1.0;
        return pmf;
    }
    if (binomial_law(cfg)) {
        for (std::int64_t k = 0; k <= n; ++k)
            pmf[static_cast<std::size_t>(k)] =
                static_cast<double>(std::exp(log_binomial_pmf_ld(k, n, cfg.p)));
    } else {
        const long double a = cfg.alpha();
        const long double b = cfg.beta();
        for (std::int64_t k = 0; k <= n; ++k)
            pmf[static_cast<std::size_t>(k)] =
                static_cast<double>(std::exp(log_beta_binomial_pmf_ld(k, n, a, b)));
    }
    return pmf;
}

AnalyticReport analytic_report(std::int64_t n, std::int64_t m, const DropConfig& cfg) {
    if (m < 0 || m > n) throw std::domain_error("need 0 <= m <= n");
    AnalyticReport report;
    report.n = n;
    report.m = m;
    report.config = cfg;
    report.keep_pmf = keep_count_distribution(n, cfg);
    report.p_noise_free = prob_noise_free(m, cfg);
    report.p_full_length = report.keep_pmf[static_cast<std::size_t>(n)];
    report.entropy_per_span = n >= 1 ? per_span_entropy(n, cfg) : 0.0;
    return report;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t len = std::max(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        sum += std::fabs(x - y);
    }
    return 0.5 * sum;
}

namespace {

struct Tally {
    std::vector<std::uint64_t> count_by_keep;
    std::uint64_t noise_free = 0;

    explicit Tally(std::size_t bins) : count_by_keep(bins, 0) {}

    void merge(const Tally& other) {
        for (std::size_t i = 0; i < count_by_keep.size(); ++i)
            count_by_keep[i] += other.count_by_keep[i];
        noise_free += other.noise_free;
    }
};

constexpr std::uint64_t kChunk = 1 << 16;

// Draws one chunk of trials with its own derived stream; any partition of
// chunks over workers tallies to the same totals.
void run_chunk(std::int64_t n, std::int64_t m, const DropConfig& cfg, std::uint64_t base_seed,
               std::uint64_t chunk, std::uint64_t chunk_trials, Tally& tally) {
    RandomStream rng = derive_stream(base_seed, chunk);
    DropMask mask;
    for (std::uint64_t t = 0; t < chunk_trials; ++t) {
        sample_mask(static_cast<std::size_t>(n), cfg, rng, mask);
        std::size_t kept = 0;
        bool nf = true;
        for (std::size_t i = 0; i < mask.keep.size(); ++i) kept += mask.keep[i];
        for (std::int64_t i = 0; i < m; ++i) nf &= mask.keep[static_cast<std::size_t>(i)] != 0;
        tally.count_by_keep[kept] += 1;
        tally.noise_free += nf ? 1 : 0;
    }
}

double plug_in_entropy(std::int64_t n, const std::vector<std::uint64_t>& counts, std::uint64_t total) {
    if (n < 1 || total == 0) return 0.0;
    long double H = 0.0L;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) continue;
        const long double f = static_cast<long double>(counts[k]) / static_cast<long double>(total);
        const long double log_q = std::log(f) - log_choose_ld(n, static_cast<std::int64_t>(k));
        H -= f * log_q;
    }
    return static_cast<double>(H / static_cast<long double>(n));
}

EmpiricalReport finish_report(std::int64_t n, std::int64_t m, const DropConfig& cfg,
                              std::uint64_t trials, const std::vector<double>& pmf,
                              double noise_free_fraction, double entropy) {
    const AnalyticReport analytic = analytic_report(n, m, cfg);
    EmpiricalReport rep;
    rep.n = n;
    rep.m = m;
    rep.trials = trials;
    rep.keep_pmf = pmf;
    rep.noise_free_fraction = noise_free_fraction;
    rep.full_length_fraction = pmf[static_cast<std::size_t>(n)];
    rep.entropy_per_span = entropy;
    double mean = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) mean += static_cast<double>(k) * pmf[k];
    rep.mean_keep = mean;
    rep.tv_distance = total_variation(pmf, analytic.keep_pmf);
    rep.noise_free_gap = std::fabs(noise_free_fraction - analytic.p_noise_free);
    rep.mean_keep_gap = std::fabs(mean - static_cast<double>(n) * (1.0 - cfg.p));
    return rep;
}

}  // namespace

EmpiricalReport monte_carlo_report(std::int64_t n, std::int64_t m, const DropConfig& cfg,
                                   std::uint64_t trials, RandomStream& rng, int workers) {
    if (n < 0 || m < 0 || m > n) throw std::domain_error("need 0 <= m <= n");
    if (trials < 1) throw std::domain_error("trials must be >= 1");
    cfg.validate();

    const std::uint64_t base_seed = rng.next_u64();
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    const std::size_t bins = static_cast<std::size_t>(n) + 1;

    Tally total(bins);
    if (workers <= 1 || chunks == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c)
            run_chunk(n, m, cfg, base_seed, c, std::min<std::uint64_t>(kChunk, trials - c * kChunk), total);
    } else {
        const int w = std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), chunks);
        std::vector<Tally> partial(static_cast<std::size_t>(w), Tally(bins));
        std::vector<std::thread> pool;
        for (int i = 0; i < w; ++i) {
            pool.emplace_back([&, i] {
                for (std::uint64_t c = static_cast<std::uint64_t>(i); c < chunks; c += static_cast<std::uint64_t>(w))
                    run_chunk(n, m, cfg, base_seed, c, std::min<std::uint64_t>(kChunk, trials - c * kChunk),
                              partial[static_cast<std::size_t>(i)]);
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& p : partial) total.merge(p);
    }

    std::vector<double> pmf(bins, 0.0);
    for (std::size_t k = 0; k < bins; ++k)
        pmf[k] = static_cast<double>(total.count_by_keep[k]) / static_cast<double>(trials);
    const double nf = static_cast<double>(total.noise_free) / static_cast<double>(trials);
    const double entropy = plug_in_entropy(n, total.count_by_keep, trials);
    return finish_report(n, m, cfg, trials, pmf, nf, entropy);
}

namespace {

// Weight of a single mask with k kept spans under the beta modes, computed by
// numeric integration over the sequence-level rate. The substitution
// pi = sin^2(theta) keeps the integrand smooth for alpha, beta >= 1/2.
std::vector<long double> beta_mask_weights(std::int64_t n, long double a, long double b,
                                           std::int64_t points) {
    std::vector<long double> sums(static_cast<std::size_t>(n) + 1, 0.0L);
    long double norm = 0.0L;
    const long double h = 1.5707963267948966192L / static_cast<long double>(points);
    for (std::int64_t i = 0; i < points; ++i) {
        const long double theta = (static_cast<long double>(i) + 0.5L) * h;
        const long double s = std::sin(theta);
        const long double c = std::cos(theta);
        const long double s2 = s * s, c2 = c * c;
        // integrand for k kept spans: sin^(2(n-k+a)-1) * cos^(2(k+b)-1)
        long double t = std::pow(s2, static_cast<long double>(n) + a - 0.5L) * std::pow(c2, b - 0.5L);
        const long double r = c2 / s2;
        for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
            sums[k] += t;
            t *= r;
        }
        norm += std::pow(s2, a - 0.5L) * std::pow(c2, b - 0.5L);
    }
    for (auto& v : sums) v /= norm;
    return sums;
}

}  // namespace

EmpiricalReport exhaustive_report(std::int64_t n, std::int64_t m, const DropConfig& cfg,
                                  std::int64_t quadrature_points) {
    if (n < 0 || n > 22) throw std::domain_error("exhaustive enumeration supports 0 <= n <= 22");
    if (m < 0 || m > n) throw std::domain_error("need 0 <= m <= n");
    cfg.validate();

    const std::size_t bins = static_cast<std::size_t>(n) + 1;
    std::vector<long double> weight(bins, 0.0L);   // per-mask weight by kept count
    if (cfg.p == 0.0) {
        weight[bins - 1] = 1.0L;
    } else if (binomial_law(cfg)) {
        for (std::int64_t k = 0; k <= n; ++k) {
            long double L = 0.0L;
            if (k > 0) L += static_cast<long double>(k) * std::log1p(-static_cast<long double>(cfg.p));
            if (n - k > 0) L += static_cast<long double>(n - k) * std::log(static_cast<long double>(cfg.p));
            weight[static_cast<std::size_t>(k)] = std::exp(L);
        }
    } else {
        const long double a = cfg.alpha();
        const long double b = cfg.beta();
        if (a < 0.5L || b < 0.5L)
            throw std::invalid_argument(
                "exhaustive beta integration requires alpha >= 0.5 and beta >= 0.5; "
                "use Monte Carlo verification for smaller concentrations");
        weight = beta_mask_weights(n, a, b, quadrature_points);
    }

    std::vector<std::uint64_t> count(bins, 0);
    long double noise_free = 0.0L;
    const std::uint64_t sup_bits = m == 0 ? 0 : ((std::uint64_t(1) << m) - 1);
    const std::uint64_t total_masks = std::uint64_t(1) << n;
    for (std::uint64_t mask = 0; mask < total_masks; ++mask) {
        const int k = __builtin_popcountll(mask);
        count[static_cast<std::size_t>(k)] += 1;
        if ((mask & sup_bits) == sup_bits) noise_free += weight[static_cast<std::size_t>(k)];
    }

    std::vector<double> pmf(bins, 0.0);
    long double entropy = 0.0L;
    for (std::size_t k = 0; k < bins; ++k) {
        const long double mass = static_cast<long double>(count[k]) * weight[k];
        pmf[k] = static_cast<double>(mass);
        if (weight[k] > 0.0L) entropy -= mass * std::log(weight[k]);
    }
    const double entropy_per_span = n >= 1 ? static_cast<double>(entropy / static_cast<long double>(n)) : 0.0;
    return finish_report(n, m, cfg, total_masks, pmf, static_cast<double>(noise_free), entropy_per_span);
}

}  // namespace spandrop::analytics
