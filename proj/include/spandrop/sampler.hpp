#pragma once

// The augmentation engine: mask sampling for both drop distributions, mask
// application (removal or token replacement), noise-free policies, and the
// batch file-to-file entry point.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "spandrop/rng.hpp"
#include "spandrop/types.hpp"

namespace spandrop {

// Each span kept independently with probability 1 - p. Requires 0 <= p < 1.
DropMask sample_bernoulli_mask(std::size_t n, double p, RandomStream& rng);

// Draws the sequence-level rate pi from Beta(gamma, gamma (1-p)/p) once, then
// keeps each span independently with probability 1 - pi. Requires 0 < p < 1
// and gamma > 0; gamma = +inf pins pi to p exactly.
DropMask sample_beta_mask(std::size_t n, double p, double gamma, RandomStream& rng);

// Mode dispatch used by augment() and the Monte Carlo verifier: handles the
// p = 0 identity case (all kept; pi = 0 recorded for beta modes) and reuses
// `out`'s storage.
void sample_mask(std::size_t n, const DropConfig& cfg, RandomStream& rng, DropMask& out);

enum class ApplyMode { drop, mask };

// drop: surviving spans concatenated in original order, span indices
// renumbered, supporting indices remapped (dropped ones removed).
// mask: length preserved, each dropped span's content replaced by the single
// mask token; supporting keeps the surviving indices at their old positions.
SequenceExample apply_mask(const SequenceExample& ex, const DropMask& mask, ApplyMode mode,
                           const std::string& mask_token);

struct AugmentOutcome {
    SequenceExample example;
    DropMask mask;
    int retries_used = 0;
    bool noise_free = false;
};

// Thrown when the resampling budget is exhausted; carries the last attempt.
class AugmentError : public std::runtime_error {
public:
    AugmentError(std::string msg, AugmentOutcome last)
        : std::runtime_error(std::move(msg)), last_attempt(std::move(last)) {}

    AugmentOutcome last_attempt;
};

// One augmentation of one example. Policies:
//   off        - no constraint on supporting spans
//   force_keep - supporting spans switched to kept after sampling
//   rejection  - masks resampled until every supporting span is kept
// Masks leaving fewer than min_keep spans are resampled under the same
// budget: at most cfg.max_retries resamples after the first attempt.
AugmentOutcome augment(const SequenceExample& ex, const DropConfig& cfg, RandomStream& rng);

struct BatchOptions {
    std::uint64_t epochs = 1;   // augmented copies per input record
    int workers = 1;
    bool strict = false;        // abort on malformed/failed records instead of skipping
};

struct BatchSummary {
    std::uint64_t records_in = 0;
    std::uint64_t records_out = 0;
    std::uint64_t skipped_lines = 0;      // malformed or invalid inputs (non-strict)
    std::uint64_t skipped_exhausted = 0;  // resampling budget exhausted (non-strict)
    double mean_output_length = 0.0;      // spans per augmented record
    double noise_free_fraction = 0.0;
};

// Streams a JSONL file through augment(), writing epochs * records_in
// augmented records. Streams are derived from (seed, example id, epoch), so
// the output is byte-identical for any worker count.
BatchSummary augment_file(const std::string& input_path, const std::string& output_path,
                          const DropConfig& cfg, const BatchOptions& options);

}  // namespace spandrop
