#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/ngram_lm.hpp"

using namespace wbwt;

namespace {

double prob(const NgramModel& m, const std::vector<std::string>& hist, const std::string& w) {
    return std::pow(10.0, m.score_tokens(hist, w));
}

// Counting helper over string sentences for readability.
CountSet count(const std::vector<std::vector<std::string>>& corpus, int order, LmVocab& vocab) {
    std::vector<std::vector<int>> ids(corpus.size());
    for (size_t s = 0; s < corpus.size(); ++s)
        for (const auto& t : corpus[s]) ids[s].push_back(vocab.add(t));
    return count_ngrams(ids, order);
}

} // namespace

TEST_CASE("raw counts exclude <s> from unigrams") {
    LmVocab vocab = LmVocab::base();
    CountSet cs = count({{"x"}}, 2, vocab);
    int x = vocab.find("x");
    CHECK(cs.raw[0].size() == 2);
    CHECK(cs.raw[0].at(Gram{x}) == 1);
    CHECK(cs.raw[0].at(Gram{kEosId}) == 1);
    CHECK(cs.raw[0].count(Gram{kBosId}) == 0);
    CHECK(cs.raw[1].at(Gram{kBosId, x}) == 1);
    CHECK(cs.raw[1].at(Gram{x, kEosId}) == 1);
}

TEST_CASE("continuation counts below the top order, raw for <s>-initial grams") {
    LmVocab vocab = LmVocab::base();
    CountSet cs = count({{"a", "a", "a"}}, 2, vocab);
    int a = vocab.find("a");
    // a is preceded by <s> and by a: continuation count 2 (raw is 3)
    CHECK(cs.raw[0].at(Gram{a}) == 3);
    CHECK(cs.used[0].at(Gram{a}) == 2);
    CHECK(cs.used[0].at(Gram{kEosId}) == 1);
    // top order counts stay raw
    CHECK(cs.used[1].at(Gram{a, a}) == 2);
    CHECK(cs.used[1].at(Gram{kBosId, a}) == 1);
}

TEST_CASE("discount estimation from count-of-counts") {
    GramCounts counts;
    counts[Gram{10}] = 1;
    counts[Gram{11}] = 2;
    counts[Gram{12}] = 3;
    counts[Gram{13}] = 4;
    counts[Gram{14}] = 1;
    // t1=2 t2=1 t3=1 t4=1 -> Y=0.5, D1=0.5, D2=0.5, D3+=1
    Discounts d = estimate_discounts(counts);
    CHECK_FALSE(d.flat);
    CHECK(d.d1 == doctest::Approx(0.5));
    CHECK(d.d2 == doctest::Approx(0.5));
    CHECK(d.d3 == doctest::Approx(1.0));
    CHECK(d.of(1) == doctest::Approx(0.5));
    CHECK(d.of(2) == doctest::Approx(0.5));
    CHECK(d.of(7) == doctest::Approx(1.0));
    CHECK(d.of(0) == doctest::Approx(0.0));
}

TEST_CASE("sparse count-of-counts falls back to the flat discount") {
    GramCounts counts;
    counts[Gram{10}] = 1;
    counts[Gram{11}] = 2;  // t3 = t4 = 0
    Discounts d = estimate_discounts(counts);
    CHECK(d.flat);
    CHECK(d.of(1) == doctest::Approx(0.5));
    CHECK(d.of(5) == doctest::Approx(0.5));
}

TEST_CASE("bigram model on a a a matches hand-computed values") {
    NgramModel m = train_lm({{"a", "a", "a"}}, 2);
    const double eps = 1e-9;
    CHECK(prob(m, {}, "a") == doctest::Approx(11.0 / 18.0).epsilon(eps));
    CHECK(prob(m, {}, "</s>") == doctest::Approx(5.0 / 18.0).epsilon(eps));
    CHECK(prob(m, {}, "<unk>") == doctest::Approx(1.0 / 9.0).epsilon(eps));
    CHECK(prob(m, {"a"}, "a") == doctest::Approx(19.0 / 27.0).epsilon(eps));
    CHECK(prob(m, {"a"}, "</s>") == doctest::Approx(7.0 / 27.0).epsilon(eps));
    CHECK(prob(m, {"a"}, "<unk>") == doctest::Approx(1.0 / 27.0).epsilon(eps));
    CHECK(prob(m, {"<s>"}, "a") == doctest::Approx(29.0 / 36.0).epsilon(eps));
}

TEST_CASE("unigram model with estimated discounts matches hand-computed values") {
    NgramModel m = train_lm({{"a", "b", "b", "c", "c", "c", "d", "d", "d", "d"}}, 1);
    const double eps = 1e-12;
    CHECK(prob(m, {}, "a") == doctest::Approx(6.5 / 66.0).epsilon(eps));
    CHECK(prob(m, {}, "b") == doctest::Approx(12.5 / 66.0).epsilon(eps));
    CHECK(prob(m, {}, "c") == doctest::Approx(15.5 / 66.0).epsilon(eps));
    CHECK(prob(m, {}, "d") == doctest::Approx(21.5 / 66.0).epsilon(eps));
    CHECK(prob(m, {}, "</s>") == doctest::Approx(6.5 / 66.0).epsilon(eps));
    CHECK(prob(m, {}, "<unk>") == doctest::Approx(3.5 / 66.0).epsilon(eps));
}

TEST_CASE("conditional distributions sum to one over the predictable vocabulary") {
    NgramModel m = train_lm({{"a", "a", "a"}}, 2);
    for (const std::vector<std::string>& hist :
         {std::vector<std::string>{}, {"a"}, {"<s>"}, {"zzz"}}) {
        double total = 0.0;
        for (const char* w : {"a", "</s>", "<unk>"}) total += prob(m, hist, w);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sum to one with estimated discounts and longer histories") {
    std::vector<std::vector<std::string>> corpus;
    // enough repetition variety to give nonzero t1..t4 at order 1
    std::istringstream text(
        "b c d e f g h i j k l m n o p q\n"
        "b b c c d d e e f f g g\n"
        "b b b c c c d d d e e e\n"
        "b b b b c c c c d d d d\n"
        "q r s t u v w x y z\n");
    std::string line;
    while (std::getline(text, line)) {
        corpus.emplace_back();
        std::istringstream toks(line);
        std::string t;
        while (toks >> t) corpus.back().push_back(t);
    }
    NgramModel m = train_lm(corpus, 3);

    // predictable vocabulary: every seen word plus </s> and <unk>
    std::vector<std::string> v_pred;
    for (const auto& tok : m.vocab.tokens)
        if (tok != "<s>") v_pred.push_back(tok);

    for (const std::vector<std::string>& hist :
         {std::vector<std::string>{}, {"b"}, {"b", "c"}, {"<s>"}, {"<s>", "b"}, {"zzz", "b"}}) {
        double total = 0.0;
        for (const auto& w : v_pred) total += prob(m, hist, w);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("perplexity of the training sentence matches the hand-computed product") {
    NgramModel m = train_lm({{"a", "a", "a"}}, 2);
    double product = (29.0 / 36.0) * (19.0 / 27.0) * (19.0 / 27.0) * (7.0 / 27.0);
    double want = std::pow(product, -0.25);
    CHECK(corpus_perplexity(m, {{"a", "a", "a"}}) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("unknown words score as <unk>") {
    NgramModel m = train_lm({{"a", "a", "a"}}, 2);
    CHECK(m.score_tokens({}, "zzz") == doctest::Approx(m.score_tokens({}, "<unk>")));
    CHECK(m.score_tokens({"qqq"}, "a") == doctest::Approx(m.score_tokens({"<unk>"}, "a")));
}

TEST_CASE("ARPA round-trip preserves scores") {
    std::vector<std::vector<std::string>> corpus = {
        {"the", "cat", "sat"},       {"the", "dog", "sat"},   {"a", "cat", "ran"},
        {"the", "cat", "ran", "up"}, {"a", "dog", "sat", "up"}};
    NgramModel m = train_lm(corpus, 3);
    std::string path = "test_lm_roundtrip.arpa";
    write_arpa(m, path);
    NgramModel back = read_arpa(path);
    CHECK(back.order == 3);
    for (const auto& sent : corpus) {
        std::vector<int> a_ids, b_ids;
        for (const auto& t : sent) {
            a_ids.push_back(m.vocab.find_or_unk(t));
            b_ids.push_back(back.vocab.find_or_unk(t));
        }
        CHECK(back.sentence_logprob(b_ids) ==
              doctest::Approx(m.sentence_logprob(a_ids)).epsilon(1e-6));
    }
    CHECK(back.score_tokens({"the"}, "zebra") ==
          doctest::Approx(m.score_tokens({"the"}, "zebra")).epsilon(1e-6));
    std::remove(path.c_str());
}

TEST_CASE("ARPA layout: header, sorted sections, -99 start probability") {
    NgramModel m = train_lm({{"b", "a"}}, 2);
    std::string path = "test_lm_layout.arpa";
    write_arpa(m, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "\\data\\");
    std::getline(in, line);
    CHECK(line.rfind("ngram 1=", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("ngram 2=", 0) == 0);
    std::getline(in, line);
    CHECK(line.empty());
    std::getline(in, line);
    CHECK(line == "\\1-grams:");
    bool saw_start = false;
    std::vector<std::string> grams;
    while (std::getline(in, line) && !line.empty()) {
        size_t tab1 = line.find('\t');
        size_t tab2 = line.find('\t', tab1 + 1);
        REQUIRE(tab1 != std::string::npos);
        REQUIRE(tab2 != std::string::npos);  // unigrams carry a backoff column
        grams.push_back(line.substr(tab1 + 1, tab2 - tab1 - 1));
        if (grams.back() == "<s>") {
            saw_start = true;
            CHECK(std::stod(line.substr(0, tab1)) == doctest::Approx(-99.0));
        }
    }
    CHECK(saw_start);
    CHECK(std::is_sorted(grams.begin(), grams.end()));
    std::remove(path.c_str());
}

TEST_CASE("ARPA parse errors") {
    auto write_file = [](const std::string& path, const std::string& text) {
        std::ofstream out(path);
        out << text;
    };
    std::string path = "test_lm_bad.arpa";

    write_file(path, "not an arpa file\n");
    CHECK_THROWS_AS(read_arpa(path), Error);

    write_file(path, "\\data\\\nngram 1=2\n\n\\1-grams:\n-0.5\t<unk>\t0.0\n\n\\end\\\n");
    CHECK_THROWS_AS(read_arpa(path), Error);  // declared 2, found 1

    write_file(path, "\\data\\\nngram 1=1\n\n\\1-grams:\n-0.5\ta\t0.0\n\n\\end\\\n");
    CHECK_THROWS_AS(read_arpa(path), Error);  // missing <unk>
    std::remove(path.c_str());
}

TEST_CASE("flat-discount fallback warns") {
    int warnings = 0;
    train_lm({{"a", "a", "a"}}, 2, [&](const std::string&) { ++warnings; });
    CHECK(warnings == 2);  // both orders are too sparse
}

TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(train_lm({}, 2), Error);
    CHECK_THROWS_AS(train_lm({{"a"}}, 0), Error);
    // an empty sentence alone still trains: <s> </s> windows exist
    NgramModel m = train_lm({{}}, 2);
    CHECK(prob(m, {}, "</s>") > 0.0);
}
