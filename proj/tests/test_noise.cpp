#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/noise.hpp"

using namespace wbwt;

namespace {

// Replays a fixed draw sequence so stage behaviour can be checked against
// hand-worked traces.
struct ScriptedSource final : RandomSource {
    std::vector<double> us;
    std::vector<uint64_t> ints;
    size_t ui = 0, ii = 0;

    double uniform() override {
        REQUIRE(ui < us.size());
        return us[ui++];
    }
    uint64_t uniform_int(uint64_t n) override {
        REQUIRE(ii < ints.size());
        REQUIRE(ints[ii] < n);
        return ints[ii++];
    }
    void expect_exhausted() const {
        CHECK(ui == us.size());
        CHECK(ii == ints.size());
    }
};

std::vector<std::string> toks(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

bool is_subsequence(const std::vector<std::string>& small, const std::vector<std::string>& big) {
    size_t i = 0;
    for (const auto& t : big)
        if (i < small.size() && small[i] == t) ++i;
    return i == small.size();
}

} // namespace

TEST_CASE("permutation follows the jittered-key trace") {
    ScriptedSource rng;
    rng.ints = {2, 0, 0, 1};  // keys 2 1 2 4
    auto out = noise_permute(toks("a b c d"), 2, rng);
    CHECK(out == toks("b a c d"));
    rng.expect_exhausted();
}

TEST_CASE("equal keys keep source order") {
    ScriptedSource rng;
    rng.ints = {1, 0};  // both keys equal 1
    auto out = noise_permute(toks("x y"), 1, rng);
    CHECK(out == toks("x y"));
    rng.expect_exhausted();
}

TEST_CASE("zero displacement still consumes one draw per token") {
    ScriptedSource rng;
    rng.ints = {0, 0, 0};
    auto out = noise_permute(toks("a b c"), 0, rng);
    CHECK(out == toks("a b c"));
    rng.expect_exhausted();
}

TEST_CASE("deletion drops tokens whose draw falls below the threshold") {
    ScriptedSource rng;
    rng.us = {0.4, 0.6, 0.49};
    auto out = noise_delete(toks("a b c"), 0.5, rng);
    CHECK(out == toks("b"));
    rng.expect_exhausted();
}

TEST_CASE("insertion draws a gate then a rank, before each token only") {
    ScriptedSource rng;
    rng.us = {0.3, 0.7};  // fire before a, skip before b
    rng.ints = {1};
    auto out = noise_insert(toks("a b"), 0.5, 2, {"x", "y", "z"}, rng);
    CHECK(out == toks("y a b"));
    rng.expect_exhausted();
}

TEST_CASE("insertion pool is capped by the vocabulary size") {
    ScriptedSource rng;
    rng.us = {0.0};
    rng.ints = {2};  // must be < pool = min(50, 3) = 3
    auto out = noise_insert(toks("a"), 0.5, 50, {"x", "y", "z"}, rng);
    CHECK(out == toks("z a"));
    rng.expect_exhausted();
}

TEST_CASE("empty input consumes no insertion draws") {
    ScriptedSource rng;  // any draw would trip the REQUIRE
    CHECK(noise_insert({}, 0.9, 5, {"x"}, rng).empty());
    CHECK(noise_permute({}, 3, rng).empty());
    CHECK(noise_delete({}, 0.5, rng).empty());
}

TEST_CASE("stage argument validation") {
    SplitMix64 rng(1);
    CHECK_THROWS_AS(noise_permute(toks("a"), -1, rng), Error);
    CHECK_THROWS_AS(noise_delete(toks("a"), 1.0, rng), Error);
    CHECK_THROWS_AS(noise_delete(toks("a"), -0.1, rng), Error);
    CHECK_THROWS_AS(noise_insert(toks("a"), 1.0, 5, {"x"}, rng), Error);
    CHECK_THROWS_AS(noise_insert(toks("a"), 0.5, 0, {"x"}, rng), Error);
    try {
        noise_permute(toks("a"), -1, rng);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_argument);
    }
}

TEST_CASE("insertion with an empty vocabulary only fails when it fires") {
    ScriptedSource quiet;
    quiet.us = {0.9, 0.9};
    CHECK(noise_insert(toks("a b"), 0.5, 5, {}, quiet) == toks("a b"));
    ScriptedSource firing;
    firing.us = {0.0};
    CHECK_THROWS_AS(noise_insert(toks("a"), 0.5, 5, {}, firing), Error);
}

TEST_CASE("permutation invariants over random trials") {
    std::vector<std::string> sent;
    for (int i = 0; i < 10; ++i) sent.push_back("t" + std::to_string(i));
    for (int d_per : {0, 1, 2, 3, 5}) {
        SplitMix64 rng(1000 + (uint64_t)d_per);
        for (int trial = 0; trial < 400; ++trial) {
            auto out = noise_permute(sent, d_per, rng);
            REQUIRE(out.size() == sent.size());
            auto sorted_in = sent, sorted_out = out;
            std::sort(sorted_in.begin(), sorted_in.end());
            std::sort(sorted_out.begin(), sorted_out.end());
            CHECK(sorted_in == sorted_out);
            for (size_t i = 0; i < sent.size(); ++i) {
                auto it = std::find(out.begin(), out.end(), sent[i]);
                int shift = (int)std::distance(out.begin(), it) - (int)i;
                CHECK(std::abs(shift) <= d_per);
            }
        }
    }
}

TEST_CASE("deletion yields an ordered subsequence") {
    auto sent = toks("a b c d e f g h");
    SplitMix64 rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        auto out = noise_delete(sent, 0.3, rng);
        CHECK(out.size() <= sent.size());
        CHECK(is_subsequence(out, sent));
    }
    auto keep = noise_delete(sent, 0.0, rng);
    CHECK(keep == sent);
}

TEST_CASE("insertion preserves the original tokens and never appends") {
    auto sent = toks("a b c d");
    std::vector<std::string> vocab = {"v0", "v1", "v2", "v3", "v4", "v5"};
    SplitMix64 rng(43);
    for (int trial = 0; trial < 500; ++trial) {
        auto out = noise_insert(sent, 0.4, 3, vocab, rng);
        CHECK(out.size() >= sent.size());
        CHECK(out.size() <= 2 * sent.size());
        CHECK(is_subsequence(sent, out));
        CHECK(out.back() == sent.back());
        for (const auto& t : out)
            if (t[0] == 'v') CHECK((t == "v0" || t == "v1" || t == "v2"));
    }
    auto none = noise_insert(sent, 0.0, 3, vocab, rng);
    CHECK(none == sent);
}

TEST_CASE("corruption is a pure function of the seed") {
    auto sent = toks("the quick brown fox jumps over the lazy dog");
    std::vector<std::string> vocab = {"u0", "u1", "u2"};
    NoiseSpec spec;
    spec.d_per = 2;
    spec.p_del = 0.2;
    spec.p_ins = 0.2;
    spec.v_ins = 3;
    CHECK(corrupt(sent, spec, vocab, 99) == corrupt(sent, spec, vocab, 99));
    bool differs = false;
    auto base = corrupt(sent, spec, vocab, 0);
    for (uint64_t s = 1; s < 20 && !differs; ++s)
        differs = corrupt(sent, spec, vocab, s) != base;
    CHECK(differs);
}

TEST_CASE("denoising corpus layout and per-pair independence") {
    std::vector<std::vector<std::string>> corpus = {
        toks("a b c d e"), toks("f g h i j"), toks("k l m n o")};
    std::vector<std::string> vocab = {"u0", "u1"};
    NoiseSpec spec;
    spec.d_per = 2;
    spec.p_del = 0.3;
    spec.p_ins = 0.3;
    spec.v_ins = 2;

    auto pairs = make_denoising_corpus(corpus, spec, vocab, 7, 2);
    REQUIRE(pairs.size() == 6);
    for (int e = 0; e < 2; ++e)
        for (size_t s = 0; s < 3; ++s) CHECK(pairs[e * 3 + s].clean == corpus[s]);

    // identical call reproduces everything
    auto again = make_denoising_corpus(corpus, spec, vocab, 7, 2);
    for (size_t i = 0; i < pairs.size(); ++i) CHECK(pairs[i].noisy == again[i].noisy);

    // a pair depends only on (seed, epoch, sentence index), not on siblings
    auto prefix = make_denoising_corpus({corpus[0], corpus[1]}, spec, vocab, 7, 2);
    CHECK(prefix[0].noisy == pairs[0].noisy);
    CHECK(prefix[1].noisy == pairs[1].noisy);
    CHECK(prefix[2].noisy == pairs[3].noisy);  // epoch 1, sentence 0

    // epochs see different noise
    bool epoch_differs = false;
    for (size_t s = 0; s < 3; ++s)
        if (pairs[s].noisy != pairs[3 + s].noisy) epoch_differs = true;
    CHECK(epoch_differs);

    CHECK_THROWS_AS(make_denoising_corpus(corpus, spec, vocab, 7, 0), Error);
}

TEST_CASE("validation pairs are identities") {
    std::vector<std::vector<std::string>> corpus = {toks("a b"), {}, toks("c")};
    auto pairs = make_validation_pairs(corpus);
    REQUIRE(pairs.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(pairs[i].noisy == corpus[i]);
        CHECK(pairs[i].clean == corpus[i]);
    }
}

TEST_CASE("pair writers") {
    std::vector<NoisePair> pairs = {{toks("n1 n2"), toks("c1")}, {{}, toks("c2 c3")}};
    std::string tsv = "test_noise_pairs.tsv";
    write_pairs_tsv(pairs, tsv);
    {
        std::ifstream in(tsv);
        std::string l1, l2;
        std::getline(in, l1);
        std::getline(in, l2);
        CHECK(l1 == "n1 n2\tc1");
        CHECK(l2 == "\tc2 c3");
    }
    std::remove(tsv.c_str());

    std::string np = "test_noise_noisy.txt", cp = "test_noise_clean.txt";
    write_pairs_files(pairs, np, cp);
    {
        std::ifstream noisy(np), clean(cp);
        std::string l1, l2;
        std::getline(noisy, l1);
        std::getline(noisy, l2);
        CHECK(l1 == "n1 n2");
        CHECK(l2 == "");
        std::getline(clean, l1);
        std::getline(clean, l2);
        CHECK(l1 == "c1");
        CHECK(l2 == "c2 c3");
    }
    std::remove(np.c_str());
    std::remove(cp.c_str());
}
