#pragma once

// Synthetic subsequence-detection benchmark: does a character string contain
// a given needle (e.g. "cat") as a not-necessarily-contiguous subsequence?
// Each character is one span; positives know exactly which positions carry
// the needle, so supporting facts come for free.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spandrop/rng.hpp"
#include "spandrop/types.hpp"

namespace spandrop::fa {

enum class PositionMode { uniform, fixed, first_k };

struct TaskConfig {
    std::string needle = "cat";
    std::size_t n = 300;
    std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
    std::size_t count = 10000;
    PositionMode position_mode = PositionMode::uniform;
    std::vector<std::size_t> fixed_positions;   // fixed mode: strictly increasing, size == needle length
    std::size_t first_k = 0;                    // first_k mode: needle length <= first_k <= n
    std::uint64_t seed = 0;

    void validate() const;   // throws std::invalid_argument
};

// Greedy left-to-right subsequence match (greedy completes iff any match exists).
bool is_subsequence(std::string_view needle, std::string_view haystack);

// Length of the longest needle prefix that is a subsequence of s.
std::size_t matched_prefix_len(std::string_view needle, std::string_view s);

// Length-n string over the alphabet that does not contain the needle as a
// subsequence. Constructive: characters are sampled left to right while
// tracking the greedy match state j; whenever j would allow the final needle
// character to complete a match, that single position is resampled from the
// alphabet minus that character.
std::string generate_negative(const TaskConfig& cfg, RandomStream& rng);

// Writes the needle's characters, in order, at positions sampled per
// position_mode; returns the string and the (strictly increasing) positions.
std::pair<std::string, std::vector<std::size_t>> make_positive(std::string base,
                                                               const TaskConfig& cfg,
                                                               RandomStream& rng);

struct DatasetStats {
    std::size_t positives = 0;
    std::size_t negatives = 0;
    // Redundancy diagnostic: how much of the needle the base strings already
    // contain before insertion (partial matches create redundant evidence).
    double mean_base_prefix_len = 0.0;
    double frac_base_prefix_maximal = 0.0;   // fraction with prefix length == needle length - 1
};

struct DatasetResult {
    std::vector<SequenceExample> examples;
    DatasetStats stats;
};

// count examples, floor(count/2) positives and the rest negatives, shuffled;
// deterministic under cfg.seed and independent of generation parallelism
// (example i always uses stream i). Positives carry supporting = inserted
// positions; negatives have an empty supporting set. Labels are 1 / 0.
DatasetResult generate_dataset(const TaskConfig& cfg);

}  // namespace spandrop::fa
