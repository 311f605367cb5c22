#pragma once

// Domain types shared by the sampler, the generators and the CLI. All types
// are immutable values after construction; the engine never inspects span
// contents or labels.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spandrop {

struct Span {
    std::size_t index = 0;             // position in the parent example
    std::vector<std::string> tokens;   // opaque; must be non-empty

    friend bool operator==(const Span&, const Span&) = default;
};

// A label is either an opaque string or an integer class id; which one it was
// must survive a serialize/parse round trip.
class Label {
public:
    Label() = default;

    static Label text(std::string v) {
        Label l;
        l.is_text_ = true;
        l.text_ = std::move(v);
        return l;
    }
    static Label number(std::int64_t v) {
        Label l;
        l.is_text_ = false;
        l.number_ = v;
        return l;
    }

    bool is_text() const { return is_text_; }
    const std::string& text_value() const { return text_; }
    std::int64_t number_value() const { return number_; }

    friend bool operator==(const Label&, const Label&) = default;

private:
    bool is_text_ = true;
    std::string text_;
    std::int64_t number_ = 0;
};

struct Provenance {
    std::string source_id;
    std::vector<std::size_t> kept_indices;
    std::optional<double> pi;   // sequence-level drop rate, beta modes only

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SequenceExample {
    std::string id;
    std::vector<Span> spans;
    std::vector<std::size_t> supporting;   // strictly increasing span indices
    Label label;
    std::optional<Provenance> provenance;

    std::size_t size() const { return spans.size(); }

    friend bool operator==(const SequenceExample&, const SequenceExample&) = default;
};

enum class DropMode { bernoulli, beta_bernoulli, mask_bernoulli, mask_beta };
enum class NoiseFreePolicy { off, force_keep, rejection };

constexpr bool is_beta_mode(DropMode m) {
    return m == DropMode::beta_bernoulli || m == DropMode::mask_beta;
}
constexpr bool is_mask_mode(DropMode m) {
    return m == DropMode::mask_bernoulli || m == DropMode::mask_beta;
}

std::string_view to_string(DropMode m);
std::string_view to_string(NoiseFreePolicy p);
DropMode parse_drop_mode(std::string_view s);             // throws std::invalid_argument
NoiseFreePolicy parse_noise_free_policy(std::string_view s);

struct DropConfig {
    DropMode mode = DropMode::bernoulli;
    double p = 0.1;            // drop ratio, in [0, 1)
    double gamma = 1.0;        // concentration; ignored by bernoulli modes; +inf degenerates to bernoulli
    NoiseFreePolicy policy = NoiseFreePolicy::off;
    int max_retries = 100;     // resampling budget after the first attempt
    std::size_t min_keep = 1;  // minimum surviving spans (capped at the example's span count)
    std::string mask_token = "[MASK]";
    std::uint64_t seed = 0;

    double alpha() const { return gamma; }
    // Defined only for p > 0.
    double beta() const { return gamma * (1.0 - p) / p; }

    // Throws std::invalid_argument on the first violated constraint. p = 1 is
    // rejected here: beta would be undefined and the output always empty.
    void validate() const;
};

struct DropMask {
    std::vector<std::uint8_t> keep;   // 1 = span retained
    std::optional<double> pi;         // present iff the mode is beta

    std::size_t kept_count() const {
        std::size_t c = 0;
        for (auto k : keep) c += k;
        return c;
    }
};

// Returns the list of violated invariants; empty means the example is valid.
std::vector<std::string> validate_example(const SequenceExample& ex);

// Throws std::invalid_argument listing every violation.
void require_valid(const SequenceExample& ex);

}  // namespace spandrop
