#include "spandrop/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "spandrop/jsonl.hpp"

namespace spandrop {

namespace {

void fill_bernoulli(std::vector<std::uint8_t>& keep, std::size_t n, double drop_rate,
                    RandomStream& rng) {
    keep.resize(n);
    const double keep_rate = 1.0 - drop_rate;
    for (std::size_t i = 0; i < n; ++i) keep[i] = rng.bernoulli(keep_rate) ? 1 : 0;
}

}  // namespace

DropMask sample_bernoulli_mask(std::size_t n, double p, RandomStream& rng) {
    if (!(p >= 0.0 && p < 1.0)) throw std::invalid_argument("need 0 <= p < 1");
    DropMask mask;
    fill_bernoulli(mask.keep, n, p, rng);
    return mask;
}

DropMask sample_beta_mask(std::size_t n, double p, double gamma, RandomStream& rng) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("need 0 < p < 1");
    if (std::isnan(gamma) || !(gamma > 0.0)) throw std::invalid_argument("need gamma > 0");
    DropMask mask;
    const double pi = std::isinf(gamma) ? p : rng.beta_variate(gamma, gamma * (1.0 - p) / p);
    mask.pi = pi;
    fill_bernoulli(mask.keep, n, pi, rng);
    return mask;
}

void sample_mask(std::size_t n, const DropConfig& cfg, RandomStream& rng, DropMask& out) {
    if (cfg.p == 0.0) {
        // Identity transform for every mode; the beta rate degenerates to 0.
        out.keep.assign(n, 1);
        out.pi = is_beta_mode(cfg.mode) ? std::optional<double>(0.0) : std::nullopt;
        return;
    }
    if (is_beta_mode(cfg.mode)) {
        const double pi =
            std::isinf(cfg.gamma) ? cfg.p : rng.beta_variate(cfg.alpha(), cfg.beta());
        out.pi = pi;
        fill_bernoulli(out.keep, n, pi, rng);
    } else {
        out.pi.reset();
        fill_bernoulli(out.keep, n, cfg.p, rng);
    }
}

SequenceExample apply_mask(const SequenceExample& ex, const DropMask& mask, ApplyMode mode,
                           const std::string& mask_token) {
    if (mask.keep.size() != ex.spans.size())
        throw std::invalid_argument("mask length does not match span count");

    SequenceExample out;
    out.id = ex.id;
    out.label = ex.label;

    if (mode == ApplyMode::drop) {
        // new_position[i] is valid only where keep[i] is set.
        std::vector<std::size_t> new_position(ex.spans.size(), 0);
        std::size_t next = 0;
        for (std::size_t i = 0; i < ex.spans.size(); ++i) {
            if (!mask.keep[i]) continue;
            new_position[i] = next;
            Span span = ex.spans[i];
            span.index = next++;
            out.spans.push_back(std::move(span));
        }
        for (std::size_t s : ex.supporting)
            if (mask.keep[s]) out.supporting.push_back(new_position[s]);
    } else {
        out.spans = ex.spans;
        for (std::size_t i = 0; i < out.spans.size(); ++i)
            if (!mask.keep[i]) out.spans[i].tokens = {mask_token};
        for (std::size_t s : ex.supporting)
            if (mask.keep[s]) out.supporting.push_back(s);
    }
    return out;
}

namespace {

bool all_supporting_kept(const SequenceExample& ex, const DropMask& mask) {
    for (std::size_t s : ex.supporting)
        if (!mask.keep[s]) return false;
    return true;
}

AugmentOutcome build_outcome(const SequenceExample& ex, const DropConfig& cfg, DropMask mask,
                             int retries_used) {
    AugmentOutcome outcome;
    outcome.noise_free = all_supporting_kept(ex, mask);
    outcome.retries_used = retries_used;
    outcome.example = apply_mask(ex, mask, is_mask_mode(cfg.mode) ? ApplyMode::mask : ApplyMode::drop,
                                 cfg.mask_token);

    Provenance prov;
    prov.source_id = ex.id;
    for (std::size_t i = 0; i < mask.keep.size(); ++i)
        if (mask.keep[i]) prov.kept_indices.push_back(i);
    prov.pi = mask.pi;
    outcome.example.provenance = std::move(prov);
    outcome.mask = std::move(mask);
    return outcome;
}

}  // namespace

AugmentOutcome augment(const SequenceExample& ex, const DropConfig& cfg, RandomStream& rng) {
    cfg.validate();
    require_valid(ex);

    const std::size_t n = ex.spans.size();
    const std::size_t min_keep = std::min(cfg.min_keep, n);

    DropMask mask;
    for (int attempt = 0;; ++attempt) {
        sample_mask(n, cfg, rng, mask);
        if (cfg.policy == NoiseFreePolicy::force_keep)
            for (std::size_t s : ex.supporting) mask.keep[s] = 1;

        const bool supporting_ok =
            cfg.policy != NoiseFreePolicy::rejection || all_supporting_kept(ex, mask);
        if (supporting_ok && mask.kept_count() >= min_keep)
            return build_outcome(ex, cfg, std::move(mask), attempt);

        if (attempt >= cfg.max_retries) {
            std::ostringstream msg;
            msg << "augment exhausted " << cfg.max_retries << " resamples for example '" << ex.id
                << "'";
            throw AugmentError(msg.str(), build_outcome(ex, cfg, std::move(mask), attempt));
        }
    }
}

namespace {

struct LineResult {
    std::string output;            // epochs augmented records, newline-terminated
    std::uint64_t spans_out = 0;   // summed over epochs
    std::uint64_t noise_free = 0;
    std::uint64_t records = 0;
    bool parse_failed = false;
    bool exhausted = false;
    std::string error;
};

LineResult process_line(const std::string& line, std::uint64_t line_no, const DropConfig& cfg,
                        std::uint64_t epochs) {
    LineResult result;
    SequenceExample ex;
    try {
        ex = parse_example(line);
        require_valid(ex);
    } catch (const std::exception& e) {
        result.parse_failed = true;
        result.error = "line " + std::to_string(line_no) + ": " + e.what();
        return result;
    }
    try {
        for (std::uint64_t epoch = 0; epoch < epochs; ++epoch) {
            RandomStream rng = derive_stream(cfg.seed, example_stream_id(ex.id, epoch));
            AugmentOutcome outcome = augment(ex, cfg, rng);
            result.output += to_json_line(outcome.example);
            result.output += '\n';
            result.spans_out += outcome.example.spans.size();
            result.noise_free += outcome.noise_free ? 1 : 0;
            result.records += 1;
        }
    } catch (const AugmentError& e) {
        result.exhausted = true;
        result.error = "line " + std::to_string(line_no) + ": " + e.what();
        result.output.clear();
        result.records = 0;
    }
    return result;
}

}  // namespace

BatchSummary augment_file(const std::string& input_path, const std::string& output_path,
                          const DropConfig& cfg, const BatchOptions& options) {
    cfg.validate();
    if (options.epochs < 1) throw std::invalid_argument("epochs must be >= 1");

    std::ifstream in(input_path);
    if (!in) throw std::runtime_error("cannot open input: " + input_path);
    std::ofstream out(output_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output: " + output_path);

    BatchSummary summary;
    std::uint64_t spans_total = 0;
    std::uint64_t noise_free_total = 0;
    std::uint64_t line_no = 0;

    const std::size_t block_size = 4096;
    std::vector<std::string> block;
    std::vector<std::uint64_t> block_line_no;
    block.reserve(block_size);

    const auto flush_block = [&] {
        if (block.empty()) return;
        std::vector<LineResult> results(block.size());
        const int workers = std::max(1, options.workers);
        if (workers == 1 || block.size() == 1) {
            for (std::size_t i = 0; i < block.size(); ++i)
                results[i] = process_line(block[i], block_line_no[i], cfg, options.epochs);
        } else {
            std::vector<std::thread> pool;
            const int w = static_cast<int>(std::min<std::size_t>(workers, block.size()));
            for (int t = 0; t < w; ++t) {
                pool.emplace_back([&, t] {
                    for (std::size_t i = static_cast<std::size_t>(t); i < block.size();
                         i += static_cast<std::size_t>(w))
                        results[i] = process_line(block[i], block_line_no[i], cfg, options.epochs);
                });
            }
            for (auto& th : pool) th.join();
        }
        for (auto& r : results) {
            if (r.parse_failed || r.exhausted) {
                if (options.strict) throw std::runtime_error(r.error);
                summary.skipped_lines += r.parse_failed ? 1 : 0;
                summary.skipped_exhausted += r.exhausted ? 1 : 0;
                continue;
            }
            out << r.output;
            summary.records_out += r.records;
            spans_total += r.spans_out;
            noise_free_total += r.noise_free;
        }
        block.clear();
        block_line_no.clear();
    };

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        summary.records_in += 1;
        block.push_back(line);
        block_line_no.push_back(line_no);
        if (block.size() >= block_size) flush_block();
    }
    flush_block();
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + output_path);

    if (summary.records_out > 0) {
        summary.mean_output_length =
            static_cast<double>(spans_total) / static_cast<double>(summary.records_out);
        summary.noise_free_fraction =
            static_cast<double>(noise_free_total) / static_cast<double>(summary.records_out);
    }
    return summary;
}

}  // namespace spandrop
