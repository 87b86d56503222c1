#include "doctest.h"
#include "quaysched/rng.hpp"

#include <set>

using namespace quaysched;

TEST_SUITE("rng") {

TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform_int stays in bounds and hits every value") {
    Rng rng(7);
    std::set<int> seen;
    for (int i = 0; i < 10000; ++i) {
        const int v = rng.uniform_int(3, 9);
        REQUIRE(v >= 3);
        REQUIRE(v <= 9);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("mix_seed derives order-independent child streams") {
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    CHECK(mix_seed(1, 2) != mix_seed(2, 2));
    CHECK(mix_seed(1, 2, 5) != mix_seed(1, 2, 6));
}

TEST_CASE("normal has roughly the requested moments") {
    Rng rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal(5.0, 2.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(5.0).epsilon(0.02));
    CHECK(var == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("shuffle permutes deterministically") {
    std::vector<int> v{1, 2, 3, 4, 5, 6};
    Rng a(3);
    a.shuffle(v);
    std::vector<int> w{1, 2, 3, 4, 5, 6};
    Rng b(3);
    b.shuffle(w);
    CHECK(v == w);
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<int>{1, 2, 3, 4, 5, 6});
}

}  // TEST_SUITE
