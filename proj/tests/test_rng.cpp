#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spandrop/rng.hpp"

using namespace spandrop;

namespace {
std::vector<std::uint64_t> draw(RandomStream rng, int count) {
    std::vector<std::uint64_t> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(rng.next_u64());
    return out;
}
}  // namespace

TEST_CASE("identical (seed, stream_id) pairs reproduce the same stream") {
    CHECK(draw(derive_stream(42, 0), 1000) == draw(derive_stream(42, 0), 1000));
    CHECK(draw(derive_stream(7, 123456789), 100) == draw(derive_stream(7, 123456789), 100));
}

TEST_CASE("different stream ids give different streams") {
    const auto a = draw(derive_stream(42, 0), 1000);
    const auto b = draw(derive_stream(42, 1), 1000);
    int collisions = 0;
    for (int i = 0; i < 1000; ++i) collisions += a[i] == b[i];
    CHECK(collisions == 0);
}

TEST_CASE("a stream is keyed to its id, not to who derives it") {
    // Simulate 1 worker walking ids in order vs 8 workers touching id 7 last;
    // the stream for id 7 must not depend on the derivation order.
    std::vector<std::uint64_t> direct = draw(derive_stream(42, 7), 64);
    for (std::uint64_t id = 0; id < 16; ++id) {
        RandomStream rng = derive_stream(42, id);
        (void)rng.next_u64();
    }
    CHECK(draw(derive_stream(42, 7), 64) == direct);
}

TEST_CASE("stable_hash64 matches published FNV-1a vectors") {
    CHECK(stable_hash64("") == 0xcbf29ce484222325ULL);
    CHECK(stable_hash64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(stable_hash64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("example_stream_id separates epochs and ids") {
    CHECK(example_stream_id("ex-1", 0) != example_stream_id("ex-1", 1));
    CHECK(example_stream_id("ex-1", 0) != example_stream_id("ex-2", 0));
    CHECK(example_stream_id("ex-1", 3) == example_stream_id("ex-1", 3));
}

TEST_CASE("next_double lives in [0,1) and looks uniform") {
    RandomStream rng = derive_stream(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = rng.next_double();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("below(n) is in range and roughly uniform") {
    RandomStream rng = derive_stream(2, 0);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        counts[v]++;
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("gamma variates have the right first two moments") {
    RandomStream rng = derive_stream(3, 0);
    for (double shape : {0.3, 1.0, 2.5, 9.0}) {
        double sum = 0.0, sum2 = 0.0;
        const int trials = 200000;
        for (int i = 0; i < trials; ++i) {
            const double x = rng.gamma_variate(shape);
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / trials;
        const double var = sum2 / trials - mean * mean;
        CHECK(mean == doctest::Approx(shape).epsilon(0.02));
        CHECK(var == doctest::Approx(shape).epsilon(0.06));
    }
}

TEST_CASE("beta variates are open-interval and have the beta mean") {
    RandomStream rng = derive_stream(4, 0);
    double sum = 0.0;
    const int trials = 1000000;
    for (int i = 0; i < trials; ++i) {
        const double x = rng.beta_variate(1.0, 4.0);
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(sum / trials == doctest::Approx(0.2).epsilon(0.005));
}
