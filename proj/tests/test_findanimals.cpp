#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "oracles.hpp"
#include "spandrop/findanimals.hpp"
#include "spandrop/jsonl.hpp"

using namespace spandrop;
using namespace spandrop::fa;

namespace {

TaskConfig base_config() {
    TaskConfig cfg;
    cfg.needle = "cat";
    cfg.n = 300;
    cfg.count = 100;
    cfg.seed = 5;
    return cfg;
}

std::string flatten(const SequenceExample& ex) {
    std::string s;
    for (const auto& span : ex.spans)
        for (const auto& tok : span.tokens) s += tok;
    return s;
}

}  // namespace

TEST_CASE("is_subsequence on hand-checked strings") {
    CHECK(is_subsequence("cat", "abcdafgbijktma"));
    CHECK_FALSE(is_subsequence("cat", "abcdefhtijkamn"));
    CHECK(is_subsequence("", "anything"));
    CHECK(is_subsequence("", ""));
    CHECK_FALSE(is_subsequence("a", ""));
    CHECK(is_subsequence("aa", "xaxa"));
    CHECK_FALSE(is_subsequence("aa", "xa"));
}

TEST_CASE("is_subsequence agrees with a DP oracle on random strings") {
    RandomStream rng = derive_stream(20, 0);
    const std::string alpha = "abc";
    for (int t = 0; t < 20000; ++t) {
        std::string needle, hay;
        const std::size_t nlen = rng.below(4);
        const std::size_t hlen = rng.below(10);
        for (std::size_t i = 0; i < nlen; ++i) needle += alpha[rng.below(alpha.size())];
        for (std::size_t i = 0; i < hlen; ++i) hay += alpha[rng.below(alpha.size())];
        CHECK(is_subsequence(needle, hay) == oracles::subsequence_dp(needle, hay));
    }
}

TEST_CASE("matched_prefix_len is the longest needle prefix present") {
    CHECK(matched_prefix_len("cat", "xxcxxaxx") == 2);
    CHECK(matched_prefix_len("cat", "tac") == 1);
    CHECK(matched_prefix_len("cat", "") == 0);
    CHECK(matched_prefix_len("cat", "cat") == 3);
}

TEST_CASE("generate_negative never contains the needle") {
    auto cfg = base_config();
    RandomStream rng = derive_stream(21, 0);
    for (int t = 0; t < 10000; ++t) {
        const std::string s = generate_negative(cfg, rng);
        REQUIRE(s.size() == cfg.n);
        CHECK_FALSE(is_subsequence(cfg.needle, s));
    }
}

TEST_CASE("generate_negative oracle sweep over needle lengths and n") {
    // 1e5 generations spread over the grid, zero oracle failures allowed
    RandomStream rng = derive_stream(22, 0);
    const std::string letters = "abcdefghij";
    std::size_t failures = 0;
    for (std::size_t len = 2; len <= 10; ++len) {
        for (const std::size_t n : {std::size_t(10), std::size_t(300)}) {
            if (len > n) continue;
            TaskConfig cfg;
            cfg.needle = letters.substr(0, len);
            cfg.n = n;
            for (int t = 0; t < 5600; ++t)
                failures += is_subsequence(cfg.needle, generate_negative(cfg, rng)) ? 1 : 0;
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("generate_negative: unconstrained positions look uniform (chi-squared)") {
    // Position 0 is sampled before any needle prefix can be matched, so its
    // marginal must be uniform over the alphabet. Critical value for
    // chi-squared with 25 dof at p = 0.001 is 52.62.
    auto cfg = base_config();
    cfg.n = 4;
    RandomStream rng = derive_stream(23, 0);
    std::vector<std::uint64_t> counts(26, 0);
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) counts[generate_negative(cfg, rng)[0] - 'a'] += 1;
    const double expected = draws / 26.0;
    double chi2 = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    CHECK(chi2 < 52.62);
}

TEST_CASE("make_positive: fixed positions carry needle characters exactly") {
    auto cfg = base_config();
    cfg.position_mode = PositionMode::fixed;
    cfg.fixed_positions = {10, 110, 210};
    cfg.validate();
    RandomStream rng = derive_stream(24, 0);
    for (int t = 0; t < 200; ++t) {
        const auto [s, positions] = make_positive(generate_negative(cfg, rng), cfg, rng);
        CHECK(positions == std::vector<std::size_t>{10, 110, 210});
        CHECK(s[10] == 'c');
        CHECK(s[110] == 'a');
        CHECK(s[210] == 't');
        CHECK(is_subsequence("cat", s));
    }
}

TEST_CASE("make_positive: first_k keeps every inserted position below k") {
    auto cfg = base_config();
    cfg.position_mode = PositionMode::first_k;
    cfg.first_k = 100;
    cfg.validate();
    RandomStream rng = derive_stream(25, 0);
    for (int t = 0; t < 500; ++t) {
        const auto [s, positions] = make_positive(generate_negative(cfg, rng), cfg, rng);
        REQUIRE(positions.size() == 3);
        for (std::size_t i = 0; i < positions.size(); ++i) {
            CHECK(positions[i] < 100);
            if (i > 0) CHECK(positions[i] > positions[i - 1]);
        }
        CHECK(is_subsequence("cat", s));
    }
}

TEST_CASE("make_positive: uniform positions are symmetric around the middle") {
    auto cfg = base_config();
    cfg.count = 200000;
    const auto result = generate_dataset(cfg);
    double sum = 0.0;
    std::uint64_t count = 0;
    for (const auto& ex : result.examples) {
        for (std::size_t pos : ex.supporting) {
            sum += static_cast<double>(pos);
            ++count;
        }
    }
    CHECK(count == 3 * result.stats.positives);
    CHECK(std::fabs(sum / static_cast<double>(count) - 149.5) < 1.0);
}

TEST_CASE("generate_dataset: balance, soundness and span shape") {
    auto cfg = base_config();
    cfg.count = 10000;
    const auto result = generate_dataset(cfg);
    REQUIRE(result.examples.size() == 10000);
    CHECK(result.stats.positives == 5000);
    CHECK(result.stats.negatives == 5000);

    std::size_t positives = 0;
    std::set<std::string> ids;
    for (const auto& ex : result.examples) {
        REQUIRE(validate_example(ex).empty());
        REQUIRE(ex.spans.size() == cfg.n);
        for (const auto& span : ex.spans) REQUIRE(span.tokens.size() == 1);
        const bool contains = is_subsequence(cfg.needle, flatten(ex));
        const bool labeled_positive = ex.label == Label::number(1);
        REQUIRE(contains == labeled_positive);   // label soundness against the oracle
        if (labeled_positive) {
            positives += 1;
            REQUIRE(ex.supporting.size() == cfg.needle.size());
            for (std::size_t i = 0; i < ex.supporting.size(); ++i) {
                CHECK(ex.spans[ex.supporting[i]].tokens[0][0] == cfg.needle[i]);
                if (i > 0) CHECK(ex.supporting[i] > ex.supporting[i - 1]);
            }
        } else {
            CHECK(ex.supporting.empty());
        }
        ids.insert(ex.id);
    }
    CHECK(positives == 5000);
    CHECK(ids.size() == 10000);
}

TEST_CASE("generate_dataset: deterministic under the seed") {
    auto cfg = base_config();
    cfg.count = 2;
    const auto a = generate_dataset(cfg);
    const auto b = generate_dataset(cfg);
    REQUIRE(a.examples.size() == b.examples.size());
    for (std::size_t i = 0; i < a.examples.size(); ++i)
        CHECK(to_json_line(a.examples[i]) == to_json_line(b.examples[i]));

    cfg.seed += 1;
    const auto c = generate_dataset(cfg);
    CHECK(to_json_line(a.examples[0]) != to_json_line(c.examples[0]));
}

TEST_CASE("generate_dataset: odd counts round positives down") {
    auto cfg = base_config();
    cfg.count = 5;
    const auto result = generate_dataset(cfg);
    CHECK(result.stats.positives == 2);
    CHECK(result.stats.negatives == 3);
}

TEST_CASE("redundancy diagnostic reports partial needle matches in the bases") {
    auto cfg = base_config();
    cfg.count = 2000;
    const auto result = generate_dataset(cfg);
    // At n = 300 nearly every base contains 'c' then 'a' somewhere, so the
    // mean matched prefix should be close to (but can never reach) needle size.
    CHECK(result.stats.mean_base_prefix_len > 1.5);
    CHECK(result.stats.mean_base_prefix_len < 3.0);
    CHECK(result.stats.frac_base_prefix_maximal > 0.9);
}

TEST_CASE("TaskConfig validation") {
    TaskConfig cfg = base_config();
    CHECK_NOTHROW(cfg.validate());

    cfg.needle = "";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = base_config();
    cfg.n = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = base_config();
    cfg.alphabet = "a";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = base_config();
    cfg.alphabet = "abca";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = base_config();
    cfg.position_mode = PositionMode::fixed;
    cfg.fixed_positions = {10, 110};   // wrong arity
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.fixed_positions = {10, 110, 400};   // out of range
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.fixed_positions = {110, 10, 210};   // not increasing
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = base_config();
    cfg.position_mode = PositionMode::first_k;
    cfg.first_k = 2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
