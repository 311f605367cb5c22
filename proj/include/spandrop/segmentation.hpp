#pragma once

// Strategies for cutting a token stream into spans. Every strategy preserves
// the partition property: concatenating the span contents reproduces the
// input token list exactly.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spandrop/types.hpp"

namespace spandrop::seg {

using TokenList = std::vector<std::string>;

struct Strategy {
    enum class Kind { per_token, fixed, delimiter, adaptive };

    Kind kind = Kind::per_token;
    std::size_t fixed_k = 1;        // fixed: tokens per span, >= 1
    std::vector<std::string> enders;  // delimiter: sentence-ending tokens
    std::size_t ngram_order = 2;    // adaptive: minimum shared n-gram order, >= 2
    bool fold_case = true;          // adaptive: ASCII case folding before matching

    void validate() const;
};

// Flag syntax: "token" | "fixed=K" | "sentence=.,!,?" | "adaptive=N".
Strategy parse_strategy(std::string_view text);

// Consecutive chunks of k tokens; the final chunk may be shorter.
std::vector<Span> segment_fixed(const TokenList& tokens, std::size_t k);

// Each span ends at a token in `enders` (inclusive) or at end of input.
std::vector<Span> segment_delimiter(const TokenList& tokens, const std::vector<std::string>& enders);

// marks[i] is true iff some length-`order` window of `context` covering
// position i appears verbatim anywhere in `reference`. Longer shared n-grams
// are covered automatically by their constituent windows. order >= 2.
std::vector<std::uint8_t> mark_ngram_overlap(const TokenList& context, const TokenList& reference,
                                             std::size_t order, bool fold_case);

struct AdaptiveResult {
    std::vector<Span> spans;
    std::vector<std::size_t> supporting;   // indices of the merged overlap spans
};

// Each maximal run of overlap-marked tokens becomes a single supporting span;
// every unmarked token becomes a singleton span.
AdaptiveResult segment_adaptive(const TokenList& context, const TokenList& reference,
                                std::size_t order, bool fold_case);

// Dispatch on strategy. `reference` is required for (and only used by) the
// adaptive strategy; non-adaptive strategies return an empty supporting set.
AdaptiveResult segment(const TokenList& tokens, const Strategy& strategy,
                       const TokenList* reference = nullptr);

}  // namespace spandrop::seg
