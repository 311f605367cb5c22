#include "spandrop/types.hpp"

#include <cmath>
#include <sstream>

namespace spandrop {

std::string_view to_string(DropMode m) {
    switch (m) {
        case DropMode::bernoulli: return "bernoulli";
        case DropMode::beta_bernoulli: return "beta_bernoulli";
        case DropMode::mask_bernoulli: return "mask_bernoulli";
        case DropMode::mask_beta: return "mask_beta";
    }
    return "?";
}

std::string_view to_string(NoiseFreePolicy p) {
    switch (p) {
        case NoiseFreePolicy::off: return "off";
        case NoiseFreePolicy::force_keep: return "force_keep";
        case NoiseFreePolicy::rejection: return "rejection";
    }
    return "?";
}

DropMode parse_drop_mode(std::string_view s) {
    if (s == "bernoulli") return DropMode::bernoulli;
    if (s == "beta_bernoulli" || s == "beta") return DropMode::beta_bernoulli;
    if (s == "mask_bernoulli") return DropMode::mask_bernoulli;
    if (s == "mask_beta") return DropMode::mask_beta;
    throw std::invalid_argument("unknown drop mode: " + std::string(s));
}

NoiseFreePolicy parse_noise_free_policy(std::string_view s) {
    if (s == "off") return NoiseFreePolicy::off;
    if (s == "force_keep") return NoiseFreePolicy::force_keep;
    if (s == "rejection") return NoiseFreePolicy::rejection;
    throw std::invalid_argument("unknown noise-free policy: " + std::string(s));
}

void DropConfig::validate() const {
    if (!(p >= 0.0 && p < 1.0))
        throw std::invalid_argument("drop ratio p must satisfy 0 <= p < 1");
    if (std::isnan(gamma) || !(gamma > 0.0))
        throw std::invalid_argument("gamma must be > 0");
    if (max_retries < 1)
        throw std::invalid_argument("max_retries must be >= 1");
    if (is_mask_mode(mode) && mask_token.empty())
        throw std::invalid_argument("mask_token must be non-empty for mask modes");
}

std::vector<std::string> validate_example(const SequenceExample& ex) {
    std::vector<std::string> violations;
    const std::size_t n = ex.spans.size();

    for (std::size_t i = 0; i < n; ++i) {
        if (ex.spans[i].tokens.empty())
            violations.push_back("empty span at index " + std::to_string(i));
        if (ex.spans[i].index != i)
            violations.push_back("span index mismatch at position " + std::to_string(i));
    }

    for (std::size_t j = 0; j < ex.supporting.size(); ++j) {
        const std::size_t s = ex.supporting[j];
        if (s >= n)
            violations.push_back("supporting index out of range: " + std::to_string(s));
        if (j > 0) {
            if (ex.supporting[j] == ex.supporting[j - 1])
                violations.push_back("duplicate supporting index: " + std::to_string(s));
            else if (ex.supporting[j] < ex.supporting[j - 1])
                violations.push_back("supporting indices not sorted");
        }
    }

    return violations;
}

void require_valid(const SequenceExample& ex) {
    const auto violations = validate_example(ex);
    if (violations.empty()) return;
    std::ostringstream msg;
    msg << "invalid example '" << ex.id << "':";
    for (const auto& v : violations) msg << " [" << v << "]";
    throw std::invalid_argument(msg.str());
}

}  // namespace spandrop
