#include "spandrop/findanimals.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace spandrop::fa {

void TaskConfig::validate() const {
    if (needle.empty()) throw std::invalid_argument("needle must be non-empty");
    if (needle.size() > n) throw std::invalid_argument("needle longer than sequence length n");
    if (alphabet.size() < 2) throw std::invalid_argument("alphabet needs at least 2 characters");
    std::unordered_set<char> seen(alphabet.begin(), alphabet.end());
    if (seen.size() != alphabet.size())
        throw std::invalid_argument("alphabet contains duplicate characters");

    switch (position_mode) {
        case PositionMode::uniform:
            break;
        case PositionMode::fixed: {
            if (fixed_positions.size() != needle.size())
                throw std::invalid_argument("fixed position list must match needle length");
            for (std::size_t i = 0; i < fixed_positions.size(); ++i) {
                if (fixed_positions[i] >= n)
                    throw std::invalid_argument("fixed position out of range: " +
                                                std::to_string(fixed_positions[i]));
                if (i > 0 && fixed_positions[i] <= fixed_positions[i - 1])
                    throw std::invalid_argument("fixed positions must be strictly increasing");
            }
            break;
        }
        case PositionMode::first_k:
            if (first_k < needle.size() || first_k > n)
                throw std::invalid_argument("first_k must satisfy needle length <= k <= n");
            break;
    }
}

bool is_subsequence(std::string_view needle, std::string_view haystack) {
    return matched_prefix_len(needle, haystack) == needle.size();
}

std::size_t matched_prefix_len(std::string_view needle, std::string_view s) {
    std::size_t j = 0;
    for (char c : s) {
        if (j < needle.size() && c == needle[j]) ++j;
    }
    return j;
}

std::string generate_negative(const TaskConfig& cfg, RandomStream& rng) {
    const std::string& needle = cfg.needle;
    const std::string& alphabet = cfg.alphabet;
    if (needle.empty())
        throw std::invalid_argument("empty needle is a subsequence of every string");
    const std::size_t last = needle.size() - 1;
    const char final_char = needle[last];

    std::string s(cfg.n, '\0');
    std::size_t j = 0;   // greedy match state
    for (std::size_t i = 0; i < cfg.n; ++i) {
        char c = alphabet[rng.below(alphabet.size())];
        if (j == last && c == final_char) {
            // One more match would complete the needle; redraw this position
            // from the alphabet minus the completing character.
            std::size_t pick = rng.below(alphabet.size() - 1);
            for (std::size_t a = 0;; ++a) {
                if (alphabet[a] == final_char) continue;
                if (pick == 0) {
                    c = alphabet[a];
                    break;
                }
                --pick;
            }
        } else if (j < last && c == needle[j]) {
            ++j;
        }
        s[i] = c;
    }
    return s;
}

namespace {

// Floyd's algorithm: uniform m-subset of {0..limit-1}, returned sorted.
std::vector<std::size_t> sample_positions(std::size_t limit, std::size_t m, RandomStream& rng) {
    std::vector<std::size_t> out;
    out.reserve(m);
    for (std::size_t i = limit - m; i < limit; ++i) {
        const std::size_t j = rng.below(i + 1);
        if (std::find(out.begin(), out.end(), j) != out.end())
            out.push_back(i);
        else
            out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::pair<std::string, std::vector<std::size_t>> make_positive(std::string base,
                                                               const TaskConfig& cfg,
                                                               RandomStream& rng) {
    if (base.size() != cfg.n) throw std::invalid_argument("base string has wrong length");

    std::vector<std::size_t> positions;
    switch (cfg.position_mode) {
        case PositionMode::uniform:
            positions = sample_positions(cfg.n, cfg.needle.size(), rng);
            break;
        case PositionMode::fixed:
            positions = cfg.fixed_positions;
            break;
        case PositionMode::first_k:
            positions = sample_positions(cfg.first_k, cfg.needle.size(), rng);
            break;
    }
    for (std::size_t i = 0; i < positions.size(); ++i) base[positions[i]] = cfg.needle[i];
    return {std::move(base), std::move(positions)};
}

DatasetResult generate_dataset(const TaskConfig& cfg) {
    cfg.validate();

    const std::size_t positives = cfg.count / 2;
    DatasetResult result;
    result.examples.reserve(cfg.count);
    result.stats.positives = positives;
    result.stats.negatives = cfg.count - positives;

    double prefix_sum = 0.0;
    std::size_t prefix_maximal = 0;

    for (std::size_t i = 0; i < cfg.count; ++i) {
        RandomStream rng = derive_stream(cfg.seed, i);
        std::string base = generate_negative(cfg, rng);

        const std::size_t prefix = matched_prefix_len(cfg.needle, base);
        prefix_sum += static_cast<double>(prefix);
        if (prefix + 1 == cfg.needle.size()) ++prefix_maximal;

        SequenceExample ex;
        ex.id = "fa-" + std::to_string(i);
        if (i < positives) {
            auto [text, positions] = make_positive(std::move(base), cfg, rng);
            base = std::move(text);
            ex.supporting = std::move(positions);
            ex.label = Label::number(1);
        } else {
            ex.label = Label::number(0);
        }
        ex.spans.reserve(cfg.n);
        for (std::size_t pos = 0; pos < base.size(); ++pos)
            ex.spans.push_back(Span{pos, {std::string(1, base[pos])}});
        result.examples.push_back(std::move(ex));
    }

    if (cfg.count > 0) {
        result.stats.mean_base_prefix_len = prefix_sum / static_cast<double>(cfg.count);
        result.stats.frac_base_prefix_maximal =
            static_cast<double>(prefix_maximal) / static_cast<double>(cfg.count);
    }

    // Shuffle with a stream reserved for ordering so example streams stay
    // keyed to the generation index.
    RandomStream shuffle_rng = derive_stream(cfg.seed, ~std::uint64_t(0));
    for (std::size_t i = result.examples.size(); i > 1; --i)
        std::swap(result.examples[i - 1], result.examples[shuffle_rng.below(i)]);

    return result;
}

}  // namespace spandrop::fa
