#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"

// Exercises the installed command-line tool end to end through std::system.

namespace {

std::string cli() { return std::string("\"") + WBWT_CLI_PATH + "\""; }

int run(const std::string& args, const std::string& stdout_path = "cli_stdout.txt") {
    std::string cmd = cli() + " " + args + " >" + stdout_path + " 2>cli_stderr.txt";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string all, line;
    while (std::getline(in, line)) {
        all += line;
        all += '\n';
    }
    return all;
}

void write_basis_pair(const std::string& src_path, const std::string& tgt_path) {
    spit(src_path, "3 3\ns0 1 0 0\ns1 0 1 0\ns2 0 0 1\n");
    spit(tgt_path, "3 3\nt0 1 0 0\nt1 0 1 0\nt2 0 0 1\n");
}

} // namespace

TEST_CASE("usage errors exit with 2, help with 0") {
    CHECK(run("") == 2);
    CHECK(run("--help") == 0);
    CHECK(run("frobnicate") == 2);
    CHECK(run("eval --hyp only.txt") == 2);       // missing required --ref
    CHECK(run("eval --hyp a --ref b --bogus x") == 2);
    CHECK(run("sweep --mode nonsense --out s.tsv") == 2);
}

TEST_CASE("missing input files exit with 2") {
    CHECK(run("lm train --corpus cli_no_such.txt --out cli_x.arpa") == 2);
    CHECK(run("eval --hyp cli_no_such.txt --ref cli_no_such.txt") == 2);
    CHECK(run("map --src cli_no_such.vec --tgt cli_no_such.vec --out cli_x.map") == 2);
}

TEST_CASE("prep masks numbers and builds a vocabulary") {
    spit("cli_raw.txt", "The Total IS 42 Euro\nB B a\n");
    int rc = run(
        "prep --in cli_raw.txt --out cli_prep.txt --mask-numbers --sidecar cli_side.tsv "
        "--vocab-out cli_vocab.tsv");
    CHECK(rc == 0);
    CHECK(slurp("cli_prep.txt") == "the total is <num> euro\nb b a\n");
    CHECK(slurp("cli_side.tsv") == "42\n\n");
    CHECK(slurp("cli_vocab.tsv") == "b\t2\n<num>\t1\na\t1\neuro\t1\nis\t1\nthe\t1\ntotal\t1\n");

    CHECK(run("prep --in cli_raw.txt --out cli_prep.txt --mask-numbers") == 2);
}

TEST_CASE("lm train and score report the expected perplexity") {
    spit("cli_lm_corpus.txt", "a a a\n");
    REQUIRE(run("lm train --corpus cli_lm_corpus.txt --order 2 --out cli_lm.arpa") == 0);
    REQUIRE(run("lm score --model cli_lm.arpa --corpus cli_lm_corpus.txt") == 0);

    double lp = 0.0, ppl = 0.0;
    unsigned long long tokens = 0;
    std::string out = slurp("cli_stdout.txt");
    REQUIRE(std::sscanf(out.c_str(), "logprob10=%lf tokens=%llu perplexity=%lf", &lp, &tokens,
                        &ppl) == 3);
    double want_lp = std::log10(29.0 / 36.0) + 2.0 * std::log10(19.0 / 27.0) +
                     std::log10(7.0 / 27.0);
    CHECK(tokens == 4);
    CHECK(lp == doctest::Approx(want_lp).epsilon(1e-3));
    CHECK(ppl == doctest::Approx(std::pow(10.0, -want_lp / 4.0)).epsilon(1e-3));
}

TEST_CASE("map, dict, and translate round-trip on aligned embeddings") {
    write_basis_pair("cli_src.vec", "cli_tgt.vec");
    REQUIRE(run("map --src cli_src.vec --tgt cli_tgt.vec --out cli_rot.map "
                "--init identity --refine-iters 2 --csls-k 2") == 0);

    spit("cli_gold.tsv", "s0\tt0\ns1\tt1\n");
    REQUIRE(run("dict --src cli_src.vec --tgt cli_tgt.vec --map cli_rot.map "
                "--out cli_dict.tsv --gold cli_gold.tsv --csls-k 2") == 0);
    CHECK(slurp("cli_dict.tsv") == "s0\tt0\ns1\tt1\ns2\tt2\n");
    CHECK(slurp("cli_stdout.txt").rfind("precision@1 = 1.0000", 0) == 0);

    spit("cli_t_corpus.txt", "t0 t1 t2\nt0 t1\n");
    REQUIRE(run("lm train --corpus cli_t_corpus.txt --order 2 --out cli_t.arpa") == 0);
    spit("cli_t_in.txt", "s0 s1\ns2 zzz\n");
    REQUIRE(run("translate --src cli_src.vec --tgt cli_tgt.vec --map cli_rot.map "
                "--lm cli_t.arpa --in cli_t_in.txt --out cli_t_out.txt --csls-k 2") == 0);
    CHECK(slurp("cli_t_out.txt") == "t0 t1\nt2 zzz\n");

    SUBCASE("thread count does not change the output") {
        REQUIRE(run("--threads 3 translate --src cli_src.vec --tgt cli_tgt.vec "
                    "--map cli_rot.map --lm cli_t.arpa --in cli_t_in.txt "
                    "--out cli_t_out2.txt --csls-k 2") == 0);
        CHECK(slurp("cli_t_out2.txt") == slurp("cli_t_out.txt"));
    }
    SUBCASE("postprocess rewrites placeholders from the source") {
        spit("cli_post_in.txt", "<unk> t1\n");
        spit("cli_post_src.txt", "s9 s1\n");
        REQUIRE(run("postprocess --in cli_post_in.txt --source cli_post_src.txt "
                    "--out cli_post_out.txt") == 0);
        CHECK(slurp("cli_post_out.txt") == "s9 t1\n");
    }
}

TEST_CASE("numeric blowups exit with 1") {
    write_basis_pair("cli_nsrc.vec", "cli_ntgt.vec");
    // the first epoch's loss is computed before the exploding update lands,
    // so a second epoch is needed to observe the non-finite loss
    CHECK(run("map --src cli_nsrc.vec --tgt cli_ntgt.vec --out cli_n.map "
              "--init adversarial --epochs 2 --lr 1e30 --refine-iters 0") == 1);
}

TEST_CASE("noise writes pairs plus a meta sidecar and reproduces from the seed") {
    spit("cli_noise_corpus.txt", "a b c d e f\ng h i j k l\n");
    REQUIRE(run("--seed 5 noise --corpus cli_noise_corpus.txt --out cli_pairs.tsv "
                "--dper 2 --pdel 0.2 --pins 0.2 --epochs 2") == 0);
    std::string first = slurp("cli_pairs.tsv");
    CHECK(std::count(first.begin(), first.end(), '\n') == 4);

    auto meta = nlohmann::json::parse(slurp("cli_pairs.tsv.meta"));
    CHECK(meta.at("seed") == 5);
    CHECK(meta.at("d_per") == 2);
    CHECK(meta.at("p_del") == doctest::Approx(0.2));
    CHECK(meta.at("epochs") == 2);

    REQUIRE(run("--seed 5 noise --corpus cli_noise_corpus.txt --out cli_pairs2.tsv "
                "--dper 2 --pdel 0.2 --pins 0.2 --epochs 2") == 0);
    CHECK(slurp("cli_pairs2.tsv") == first);

    REQUIRE(run("noise --corpus cli_noise_corpus.txt --noisy cli_nzy.txt --clean cli_cln.txt "
                "--validation") == 0);
    CHECK(slurp("cli_nzy.txt") == slurp("cli_cln.txt"));

    CHECK(run("noise --corpus cli_noise_corpus.txt") == 2);  // no output selected
}

TEST_CASE("eval prints BLEU and honours --json") {
    spit("cli_hyp.txt", "the cat sat\n");
    spit("cli_ref.txt", "the cat sat down\n");
    REQUIRE(run("eval --hyp cli_hyp.txt --ref cli_ref.txt --max-n 3") == 0);
    double bleu = 0.0;
    REQUIRE(std::sscanf(slurp("cli_stdout.txt").c_str(), "BLEU = %lf", &bleu) == 1);
    CHECK(bleu == doctest::Approx(100.0 * std::exp(-1.0 / 3.0)).epsilon(1e-4));

    REQUIRE(run("--json eval --hyp cli_hyp.txt --ref cli_ref.txt --max-n 3") == 0);
    std::string out = slurp("cli_stdout.txt");
    auto brace = out.find('{');
    REQUIRE(brace != std::string::npos);
    auto diag = nlohmann::json::parse(out.substr(brace));
    CHECK(diag.at("command") == "eval");
    // stdout rounds to two decimals; the JSON diagnostic carries full precision
    CHECK(diag.at("bleu").get<double>() ==
          doctest::Approx(100.0 * std::exp(-1.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("config file fills in flags and explicit flags win") {
    spit("cli_hyp4.txt", "the the the the\n");
    spit("cli_ref4.txt", "the cat\n");
    spit("cli_conf.json", "{\"max-n\": 1}\n");

    // default max_n = 4 gives 0 here; the config lowers it to 1
    REQUIRE(run("eval --hyp cli_hyp4.txt --ref cli_ref4.txt") == 0);
    CHECK(slurp("cli_stdout.txt").rfind("BLEU = 0.00", 0) == 0);
    REQUIRE(run("--config cli_conf.json eval --hyp cli_hyp4.txt --ref cli_ref4.txt") == 0);
    CHECK(slurp("cli_stdout.txt").rfind("BLEU = 25.00", 0) == 0);
    REQUIRE(run("--config cli_conf.json eval --hyp cli_hyp4.txt --ref cli_ref4.txt "
                "--max-n 4") == 0);
    CHECK(slurp("cli_stdout.txt").rfind("BLEU = 0.00", 0) == 0);

    CHECK(run("--config cli_no_such.json eval --hyp cli_hyp4.txt --ref cli_ref4.txt") == 2);
    spit("cli_badconf.json", "{not json\n");
    CHECK(run("--config cli_badconf.json eval --hyp cli_hyp4.txt --ref cli_ref4.txt") == 2);
}

TEST_CASE("noise sweep writes a stable grid") {
    spit("cli_sw_corpus.txt", "a b c d e f g h\ni j k l m n o p\n");
    std::string args =
        "--seed 9 sweep --mode noise --out cli_sweep.tsv --corpus cli_sw_corpus.txt "
        "--dper-grid 0,2 --pdel-grid 0.0,0.3 --pins 0.1 --epochs 1";
    REQUIRE(run(args) == 0);
    std::string first = slurp("cli_sweep.tsv");
    // header comments, column names, then one row per grid point
    CHECK(std::count(first.begin(), first.end(), '\n') == 7);
    CHECK(first.find("d_per\tp_del\tbleu\n") != std::string::npos);
    REQUIRE(run(args) == 0);
    CHECK(slurp("cli_sweep.tsv") == first);

    CHECK(run("sweep --mode noise --out cli_sweep2.tsv") == 2);  // --corpus missing
}
