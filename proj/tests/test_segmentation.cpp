#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "oracles.hpp"
#include "spandrop/sampler.hpp"
#include "spandrop/segmentation.hpp"

using namespace spandrop;
using namespace spandrop::seg;

namespace {

TokenList flatten(const std::vector<Span>& spans) {
    TokenList out;
    for (const auto& span : spans)
        for (const auto& tok : span.tokens) out.push_back(tok);
    return out;
}

TokenList random_tokens(RandomStream& rng, std::size_t max_len) {
    static const TokenList vocab = {"the", "cat", "sat", "on", "mat", "a", ".", "!", "?", "dog"};
    TokenList out;
    const std::size_t len = rng.below(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) out.push_back(vocab[rng.below(vocab.size())]);
    return out;
}

}  // namespace

TEST_CASE("segment_fixed: chunk arithmetic") {
    const TokenList ten = {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"};
    const auto spans = segment_fixed(ten, 4);
    REQUIRE(spans.size() == 3);
    CHECK(spans[0].tokens.size() == 4);
    CHECK(spans[1].tokens.size() == 4);
    CHECK(spans[2].tokens.size() == 2);
    CHECK(flatten(spans) == ten);

    CHECK(segment_fixed(ten, 1).size() == 10);
    CHECK(segment_fixed(ten, 100).size() == 1);
    CHECK(segment_fixed({}, 3).empty());
    CHECK_THROWS_AS(segment_fixed(ten, 0), std::invalid_argument);
}

TEST_CASE("segment_delimiter: spans end at ender tokens") {
    const auto spans = segment_delimiter({"a", ".", "b", "c", ".", "d"}, {"."});
    REQUIRE(spans.size() == 3);
    CHECK(spans[0].tokens == TokenList{"a", "."});
    CHECK(spans[1].tokens == TokenList{"b", "c", "."});
    CHECK(spans[2].tokens == TokenList{"d"});

    CHECK(segment_delimiter({"x", "y"}, {"."}).size() == 1);
    CHECK(segment_delimiter({}, {"."}).empty());
}

TEST_CASE("partition property holds for every strategy on random inputs") {
    RandomStream rng = derive_stream(30, 0);
    const Strategy strategies[] = {
        parse_strategy("token"),         parse_strategy("fixed=1"),  parse_strategy("fixed=3"),
        parse_strategy("fixed=7"),       parse_strategy("sentence=.,!,?"),
        parse_strategy("adaptive=2"),
    };
    for (int t = 0; t < 2000; ++t) {
        const TokenList tokens = random_tokens(rng, 24);
        const TokenList reference = random_tokens(rng, 8);
        for (const auto& strategy : strategies) {
            const auto result = segment(tokens, strategy, &reference);
            CHECK(flatten(result.spans) == tokens);
            for (std::size_t i = 0; i < result.spans.size(); ++i) {
                REQUIRE(result.spans[i].index == i);
                REQUIRE_FALSE(result.spans[i].tokens.empty());
            }
        }
    }
}

TEST_CASE("mark_ngram_overlap: hand-checked cases") {
    const auto marks =
        mark_ngram_overlap({"the", "cat", "sat"}, {"where", "is", "the", "cat"}, 2, true);
    CHECK(marks == std::vector<std::uint8_t>{1, 1, 0});

    CHECK(mark_ngram_overlap({"a", "b", "c"}, {"x", "y", "z"}, 2, true) ==
          std::vector<std::uint8_t>{0, 0, 0});

    const TokenList same = {"a", "b", "c", "d"};
    for (std::size_t order : {std::size_t(2), std::size_t(3), std::size_t(4)})
        CHECK(mark_ngram_overlap(same, same, order, true) ==
              std::vector<std::uint8_t>{1, 1, 1, 1});

    // shared trigram marks all three positions even when its bigrams differ
    CHECK(mark_ngram_overlap({"a", "b"}, {"a", "b"}, 3, true) == std::vector<std::uint8_t>{0, 0});
    CHECK_THROWS_AS(mark_ngram_overlap({"a"}, {"a"}, 1, true), std::invalid_argument);
}

TEST_CASE("mark_ngram_overlap: case folding toggles matching") {
    const TokenList context = {"The", "Cat", "sat"};
    const TokenList reference = {"the", "cat"};
    CHECK(mark_ngram_overlap(context, reference, 2, true) == std::vector<std::uint8_t>{1, 1, 0});
    CHECK(mark_ngram_overlap(context, reference, 2, false) == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("mark_ngram_overlap agrees with the window-scan oracle") {
    RandomStream rng = derive_stream(31, 0);
    for (int t = 0; t < 3000; ++t) {
        const TokenList context = random_tokens(rng, 20);
        const TokenList reference = random_tokens(rng, 10);
        const std::size_t order = 2 + rng.below(3);
        const bool fold = rng.bernoulli(0.5);
        CHECK(mark_ngram_overlap(context, reference, order, fold) ==
              oracles::brute_ngram_marks(context, reference, order, fold));
    }
}

TEST_CASE("segment_adaptive: documented example") {
    const auto result =
        segment_adaptive({"the", "cat", "sat", "on", "the", "mat"}, {"where", "is", "the", "cat"},
                         2, true);
    REQUIRE(result.spans.size() == 5);
    CHECK(result.spans[0].tokens == TokenList{"the", "cat"});
    CHECK(result.spans[1].tokens == TokenList{"sat"});
    CHECK(result.spans[2].tokens == TokenList{"on"});
    CHECK(result.spans[3].tokens == TokenList{"the"});
    CHECK(result.spans[4].tokens == TokenList{"mat"});
    CHECK(result.supporting == std::vector<std::size_t>{0});
}

TEST_CASE("segment_adaptive: degenerate overlaps") {
    const auto none = segment_adaptive({"a", "b", "c"}, {"x", "y"}, 2, true);
    CHECK(none.spans.size() == 3);
    CHECK(none.supporting.empty());

    const auto all = segment_adaptive({"a", "b", "c"}, {"a", "b", "c"}, 2, true);
    REQUIRE(all.spans.size() == 1);
    CHECK(all.spans[0].tokens == TokenList{"a", "b", "c"});
    CHECK(all.supporting == std::vector<std::size_t>{0});

    CHECK(segment_adaptive({}, {"a", "b"}, 2, true).spans.empty());
}

TEST_CASE("segment_adaptive matches runs of the oracle marks; no adjacent supporting spans") {
    RandomStream rng = derive_stream(32, 0);
    for (int t = 0; t < 3000; ++t) {
        const TokenList context = random_tokens(rng, 20);
        const TokenList reference = random_tokens(rng, 10);
        const auto result = segment_adaptive(context, reference, 2, true);
        const auto marks = oracles::brute_ngram_marks(context, reference, 2, true);

        // reconstruct expected spans from the oracle marks
        std::vector<TokenList> expected;
        std::vector<std::size_t> expected_supporting;
        std::size_t i = 0;
        while (i < context.size()) {
            if (marks[i]) {
                TokenList run;
                while (i < context.size() && marks[i]) run.push_back(context[i++]);
                expected_supporting.push_back(expected.size());
                expected.push_back(std::move(run));
            } else {
                expected.push_back({context[i++]});
            }
        }
        REQUIRE(result.spans.size() == expected.size());
        for (std::size_t s = 0; s < expected.size(); ++s)
            CHECK(result.spans[s].tokens == expected[s]);
        CHECK(result.supporting == expected_supporting);
        for (std::size_t s = 1; s < result.supporting.size(); ++s)
            CHECK(result.supporting[s] > result.supporting[s - 1] + 1);
    }
}

TEST_CASE("noise-free augmentation preserves every shared reference n-gram") {
    const TokenList reference = {"where", "did", "the", "small", "dog", "sit"};
    const TokenList context = {"one", "day", "the", "small", "dog", "ran", "off", "then",
                               "the",  "dog", "sit", "down", "for", "a",   "while"};
    const auto segmented = segment_adaptive(context, reference, 2, true);

    SequenceExample ex;
    ex.id = "ctx";
    ex.spans = segmented.spans;
    ex.supporting = segmented.supporting;
    ex.label = Label::text("answer");
    REQUIRE(validate_example(ex).empty());

    DropConfig cfg;
    cfg.mode = DropMode::beta_bernoulli;
    cfg.p = 0.5;
    cfg.policy = NoiseFreePolicy::rejection;
    cfg.max_retries = 10000;

    // which reference bigrams appear in a token list
    const auto shared_bigrams = [&](const TokenList& tokens) {
        std::set<std::string> found;
        for (std::size_t i = 0; i + 2 <= tokens.size(); ++i) {
            for (std::size_t j = 0; j + 2 <= reference.size(); ++j)
                if (tokens[i] == reference[j] && tokens[i + 1] == reference[j + 1])
                    found.insert(tokens[i] + "\x1f" + tokens[i + 1]);
        }
        return found;
    };
    const auto before = shared_bigrams(context);
    REQUIRE_FALSE(before.empty());

    for (int t = 0; t < 300; ++t) {
        RandomStream rng = derive_stream(33, static_cast<std::uint64_t>(t));
        const auto outcome = augment(ex, cfg, rng);
        TokenList out_tokens;
        for (const auto& span : outcome.example.spans)
            for (const auto& tok : span.tokens) out_tokens.push_back(tok);
        const auto after = shared_bigrams(out_tokens);
        for (const auto& gram : before) CHECK(after.count(gram) == 1);
    }
}

TEST_CASE("parse_strategy: flag syntax") {
    CHECK(parse_strategy("token").kind == Strategy::Kind::per_token);
    CHECK(parse_strategy("fixed=8").fixed_k == 8);
    const auto sentence = parse_strategy("sentence=.,!,?");
    CHECK(sentence.enders == std::vector<std::string>{".", "!", "?"});
    CHECK(parse_strategy("adaptive=3").ngram_order == 3);
    CHECK(parse_strategy("adaptive").ngram_order == 2);
    CHECK_THROWS_AS(parse_strategy("fixed=0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy("adaptive=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy("fixed=abc"), std::invalid_argument);
}
