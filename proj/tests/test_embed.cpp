#include "cogfric/descriptor.hpp"
#include "cogfric/embed.hpp"
#include "cogfric/errors.hpp"
#include "cogfric/hash.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

using namespace cogfric;

namespace {

const EmbedConfig kCfg;  // dimension 1024, hash_seed 0

Descriptor make(const std::vector<std::tuple<std::string, std::string, double>>& entries) {
    Descriptor d;
    for (const auto& [ch, tok, w] : entries) {
        d.set_max(ch, tok, w);
    }
    return d;
}

}  // namespace

TEST_CASE("descriptor set_max keeps the larger weight and drops non-positive") {
    Descriptor d;
    d.set_max("material", "glass", 0.4);
    d.set_max("material", "glass", 0.9);
    CHECK(d.weight_of("material", "glass") == 0.9);
    d.set_max("material", "glass", 0.2);
    CHECK(d.weight_of("material", "glass") == 0.9);
    d.set_max("lighting", "even", 0.0);
    d.set_max("lighting", "even", -1.0);
    CHECK(d.weight_of("lighting", "even") == 0.0);
    CHECK(d.size() == 1);
}

TEST_CASE("descriptor add accumulates") {
    Descriptor d;
    d.add("affordance", "passable", 0.3);
    d.add("affordance", "passable", 0.5);
    CHECK(d.weight_of("affordance", "passable") == doctest::Approx(0.8));
    CHECK(d.max_weight() == doctest::Approx(0.8));
}

TEST_CASE("descriptor top_tokens orders by weight then label") {
    Descriptor d;
    d.set_max("b", "t", 0.5);
    d.set_max("a", "t", 0.5);
    d.set_max("c", "t", 0.9);
    const auto top = d.top_tokens();
    REQUIRE(top.size() == 3);
    CHECK(top[0].first == "c:t");
    CHECK(top[1].first == "a:t");
    CHECK(top[2].first == "b:t");
    CHECK(d.top_tokens(2).size() == 2);
    CHECK(Descriptor().top_tokens().empty());
}

TEST_CASE("descriptor canonical_json is ordered by (channel, token)") {
    Descriptor d;
    d.set_max("lighting", "even", 0.25);
    d.set_max("affordance", "passable", 1.0);
    CHECK(d.canonical_json() == "[[\"affordance\",\"passable\",1.0],[\"lighting\",\"even\",0.25]]");
}

TEST_CASE("token_index is the seeded fnv1a hash of channel:token mod dimension") {
    for (const char* tok : {"glass", "concrete", "even"}) {
        const std::uint64_t h = fnv1a64(std::string("material:") + tok, kCfg.hash_seed);
        CHECK(token_index("material", tok, kCfg) ==
              static_cast<std::size_t>(h % static_cast<std::uint64_t>(kCfg.dimension)));
    }
    const EmbedConfig other{1024, 7};
    CHECK(token_index("material", "glass", kCfg) != token_index("material", "glass", other));
}

TEST_CASE("embed_descriptor places weights at hashed indices, normalized") {
    const auto d = make({{"material", "glass", 3.0}, {"lighting", "even", 4.0}});
    const EmbeddingVector v = embed_descriptor(d, kCfg);
    const std::size_t gi = token_index("material", "glass", kCfg);
    const std::size_t ei = token_index("lighting", "even", kCfg);
    REQUIRE(gi != ei);
    CHECK(v[gi] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(v[ei] == doctest::Approx(0.8).epsilon(1e-12));
    double norm2 = 0.0;
    for (int i = 0; i < v.dimension(); ++i) {
        norm2 += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embedding is invariant under uniform descriptor scaling") {
    auto d1 = make({{"material", "glass", 3.0}, {"lighting", "even", 4.0}});
    auto d2 = make({{"material", "glass", 6.0}, {"lighting", "even", 8.0}});
    const EmbeddingVector a = embed_descriptor(d1, kCfg);
    const EmbeddingVector b = embed_descriptor(d2, kCfg);
    CHECK(cosine_sim(a, b) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("colliding tokens accumulate additively") {
    // At dimension 2 every token lands on index 0 or 1, so collisions are
    // easy to construct.
    const EmbedConfig tiny{2, 0};
    std::string a = "t0";
    std::string b;
    const std::size_t ia = token_index("c", a, tiny);
    for (int i = 1; b.empty(); ++i) {
        std::string cand = "t" + std::to_string(i);
        if (token_index("c", cand, tiny) == ia) {
            b = cand;
        }
    }
    Descriptor d;
    d.set_max("c", a, 0.5);
    d.set_max("c", b, 0.5);
    const EmbeddingVector v = embed_descriptor(d, tiny);
    CHECK(v[ia] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embed_descriptor rejects empty descriptors and tiny dimensions") {
    CHECK_THROWS_AS(embed_descriptor(Descriptor(), kCfg), EmptyDescriptor);
    const EmbedConfig bad{1, 0};
    CHECK_THROWS_AS(embed_descriptor(make({{"a", "b", 1.0}}), bad), ValidationError);
}

TEST_CASE("embedding vectors reject negatives and zero norms") {
    CHECK_THROWS_AS(EmbeddingVector::normalized({1.0, -0.5}), ValidationError);
    CHECK_THROWS_AS(EmbeddingVector::normalized({0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(EmbeddingVector::normalized({}), ValidationError);
}

TEST_CASE("cosine_sim endpoints") {
    const auto a = embed_descriptor(make({{"m", "a", 1.0}}), kCfg);
    const auto b = embed_descriptor(make({{"m", "b", 1.0}}), kCfg);
    REQUIRE(token_index("m", "a", kCfg) != token_index("m", "b", kCfg));
    CHECK(cosine_sim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_sim(a, b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cosine_sim of a one-hot against an equal two-token mix is 1/sqrt(2)") {
    const auto a = embed_descriptor(make({{"m", "a", 1.0}}), kCfg);
    const auto mix = embed_descriptor(make({{"m", "a", 1.0}, {"m", "b", 1.0}}), kCfg);
    CHECK(cosine_sim(a, mix) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("cosine_sim demands equal dimensions") {
    const auto a = embed_descriptor(make({{"m", "a", 1.0}}), kCfg);
    const auto b = embed_descriptor(make({{"m", "a", 1.0}}), EmbedConfig{512, 0});
    CHECK_THROWS_AS(cosine_sim(a, b), DimensionMismatch);
}

TEST_CASE("cosine_sim stays in [0,1] for random non-negative vectors") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> xs(16, 0.0);
        std::vector<double> ys(16, 0.0);
        for (int i = 0; i < 16; ++i) {
            xs[static_cast<std::size_t>(i)] = u(rng);
            ys[static_cast<std::size_t>(i)] = u(rng);
        }
        xs[static_cast<std::size_t>(trial % 16)] += 0.5;  // never all-zero
        ys[static_cast<std::size_t>((trial + 7) % 16)] += 0.5;
        const auto a = EmbeddingVector::normalized(xs);
        const auto b = EmbeddingVector::normalized(ys);
        const double s = cosine_sim(a, b);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(cosine_sim(b, a) == s);
    }
}

TEST_CASE("aggregate_embeddings averages and renormalizes") {
    const auto a = embed_descriptor(make({{"m", "a", 1.0}}), kCfg);
    const auto b = embed_descriptor(make({{"m", "b", 1.0}}), kCfg);
    const auto mean = aggregate_embeddings({a, b});
    const double expect = 1.0 / std::sqrt(2.0);
    CHECK(mean[token_index("m", "a", kCfg)] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(mean[token_index("m", "b", kCfg)] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(aggregate_embeddings({a}) == a);
    CHECK_THROWS_AS(aggregate_embeddings({}), EmptyList);
    const auto c = embed_descriptor(make({{"m", "a", 1.0}}), EmbedConfig{512, 0});
    CHECK_THROWS_AS(aggregate_embeddings({a, c}), DimensionMismatch);
}

TEST_CASE("embedding is a pure function of descriptor and config") {
    const auto d = make({{"material", "glass", 0.9}, {"lighting", "even", 0.2}});
    CHECK(embed_descriptor(d, kCfg) == embed_descriptor(d, kCfg));
}
