// Command-line front end for the word-by-word translation toolkit. Talks to
// the shared library exclusively through the public C interface.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wbwt.h"

using nlohmann::json;

namespace {

struct ToolError {
    int code;
    std::string message;
};

int status_exit_code(wbwt_status st) {
    switch (st) {
        case WBWT_OK:
            return 0;
        case WBWT_E_INVALID:
        case WBWT_E_IO:
        case WBWT_E_PARSE:
            return 2;
        default:
            return 1;
    }
}

void check(wbwt_status st) {
    if (st != WBWT_OK) throw ToolError{status_exit_code(st), wbwt_last_error()};
}

using EmbPtr = std::unique_ptr<wbwt_embeddings, decltype(&wbwt_embeddings_free)>;
using MapPtr = std::unique_ptr<wbwt_map, decltype(&wbwt_map_free)>;
using LmPtr = std::unique_ptr<wbwt_lm, decltype(&wbwt_lm_free)>;

EmbPtr load_embeddings(const std::string& path, bool normalize = true) {
    wbwt_embeddings* e = nullptr;
    check(wbwt_embeddings_load(path.c_str(), normalize ? 1 : 0, &e));
    return EmbPtr(e, &wbwt_embeddings_free);
}

MapPtr load_map(const std::string& path) {
    wbwt_map* m = nullptr;
    check(wbwt_map_load(path.c_str(), &m));
    return MapPtr(m, &wbwt_map_free);
}

LmPtr load_lm(const std::string& path) {
    wbwt_lm* m = nullptr;
    check(wbwt_lm_load_arpa(path.c_str(), &m));
    return LmPtr(m, &wbwt_lm_free);
}

json g_config;      // from --config, flat {"flag-name": value}
bool g_json = false;
unsigned long long g_seed = 0;
int g_threads = 1;

// Config file values fill in for flags the user did not pass.
template <typename T>
void jset(CLI::App* cmd, const char* flag, T& value) {
    if (!g_config.is_object()) return;
    std::string key(flag + 2);
    if (cmd->count(flag) == 0 && g_config.contains(key)) value = g_config.at(key).get<T>();
}

void emit(const json& diag) {
    if (g_json) std::printf("%s\n", diag.dump(2).c_str());
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
    std::vector<double> out;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        std::string item = text.substr(start, comma - start);
        if (!item.empty()) {
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ToolError{2, std::string("bad ") + what + " grid value: " + item};
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ToolError{2, std::string("empty ") + what + " grid"};
    return out;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---- map ----------------------------------------------------------------

struct MapArgs {
    std::string src, tgt, out;
    std::string init = "identity";  // identity | adversarial | map file path
    int refine_iters = 10;
    int v_cross_train = 100000;
    int csls_k = 10;
    bool cosine_nn = false;
    int hidden = 512;
    int epochs = 40;
    int batch_size = 32;
    double lr = 0.5;
    double smoothing = 0.1;
    double beta = 0.01;
};

MapPtr make_initial_map(const MapArgs& a, const wbwt_embeddings* src,
                        const wbwt_embeddings* tgt) {
    wbwt_map* m = nullptr;
    if (a.init == "identity") {
        check(wbwt_map_identity(wbwt_embeddings_dim(src), &m));
    } else if (a.init == "adversarial") {
        wbwt_adversarial_params p;
        wbwt_adversarial_params_init(&p);
        p.hidden = a.hidden;
        p.epochs = a.epochs;
        p.batch_size = a.batch_size;
        p.learning_rate = a.lr;
        p.smoothing = a.smoothing;
        p.beta_ortho = a.beta;
        p.seed = g_seed;
        p.v_cross_train = a.v_cross_train;
        p.csls_k = a.csls_k;
        p.threads = g_threads;
        check(wbwt_map_train_adversarial(src, tgt, &p, &m));
    } else {
        return load_map(a.init);
    }
    return MapPtr(m, &wbwt_map_free);
}

MapPtr train_map(const MapArgs& a, const wbwt_embeddings* src, const wbwt_embeddings* tgt) {
    MapPtr map = make_initial_map(a, src, tgt);
    if (a.refine_iters > 0) {
        wbwt_refine_params p;
        wbwt_refine_params_init(&p);
        p.iters = a.refine_iters;
        p.v_cross_train = a.v_cross_train;
        p.csls_k = a.csls_k;
        p.mutual_nn_cosine = a.cosine_nn ? 1 : 0;
        p.threads = g_threads;
        wbwt_map* refined = nullptr;
        check(wbwt_map_refine(src, tgt, map.get(), &p, &refined));
        map.reset(refined);
    }
    return map;
}

void add_map_flags(CLI::App* cmd, MapArgs& a, bool with_out) {
    cmd->add_option("--src", a.src, "source embeddings file")->required();
    cmd->add_option("--tgt", a.tgt, "target embeddings file")->required();
    if (with_out) cmd->add_option("--out", a.out, "output map file")->required();
    cmd->add_option("--init", a.init, "identity, adversarial, or a map file to start from");
    cmd->add_option("--refine-iters", a.refine_iters, "refinement iterations");
    cmd->add_option("--v-cross-train", a.v_cross_train, "vocabulary cap for map training");
    cmd->add_option("--csls-k", a.csls_k, "CSLS neighborhood size");
    cmd->add_flag("--cosine-nn", a.cosine_nn, "mutual neighbors by plain cosine");
    cmd->add_option("--hidden", a.hidden, "adversarial discriminator hidden units");
    cmd->add_option("--epochs", a.epochs, "adversarial training epochs");
    cmd->add_option("--batch-size", a.batch_size, "adversarial batch size");
    cmd->add_option("--lr", a.lr, "adversarial learning rate");
    cmd->add_option("--smoothing", a.smoothing, "adversarial label smoothing");
    cmd->add_option("--beta", a.beta, "orthogonalization strength");
}

void apply_map_config(CLI::App* cmd, MapArgs& a) {
    jset(cmd, "--init", a.init);
    jset(cmd, "--refine-iters", a.refine_iters);
    jset(cmd, "--v-cross-train", a.v_cross_train);
    jset(cmd, "--csls-k", a.csls_k);
    jset(cmd, "--cosine-nn", a.cosine_nn);
    jset(cmd, "--hidden", a.hidden);
    jset(cmd, "--epochs", a.epochs);
    jset(cmd, "--batch-size", a.batch_size);
    jset(cmd, "--lr", a.lr);
    jset(cmd, "--smoothing", a.smoothing);
    jset(cmd, "--beta", a.beta);
}

void run_map(CLI::App* cmd, MapArgs& a) {
    apply_map_config(cmd, a);
    EmbPtr src = load_embeddings(a.src);
    EmbPtr tgt = load_embeddings(a.tgt);
    MapPtr map = train_map(a, src.get(), tgt.get());
    check(wbwt_map_save(map.get(), a.out.c_str()));
    emit({{"command", "map"},
          {"dim", wbwt_map_dim(map.get())},
          {"init", a.init},
          {"refine_iters", a.refine_iters},
          {"out", a.out}});
}

// ---- dict ----------------------------------------------------------------

struct DictArgs {
    std::string src, tgt, map, out, gold;
    int v_cross_train = 100000;
    int csls_k = 10;
    bool cosine_nn = false;
};

void run_dict(CLI::App* cmd, DictArgs& a) {
    jset(cmd, "--v-cross-train", a.v_cross_train);
    jset(cmd, "--csls-k", a.csls_k);
    jset(cmd, "--cosine-nn", a.cosine_nn);
    EmbPtr src = load_embeddings(a.src);
    EmbPtr tgt = load_embeddings(a.tgt);
    MapPtr map = load_map(a.map);
    wbwt_dict_params p;
    wbwt_dict_params_init(&p);
    p.v_cross_train = a.v_cross_train;
    p.csls_k = a.csls_k;
    p.mutual_nn_cosine = a.cosine_nn ? 1 : 0;
    p.threads = g_threads;
    json diag{{"command", "dict"}, {"out", a.out}};
    if (!a.out.empty()) {
        size_t pairs = 0;
        check(wbwt_induce_dictionary(src.get(), tgt.get(), map.get(), &p, a.out.c_str(), &pairs));
        std::fprintf(stderr, "induced %zu dictionary pairs\n", pairs);
        diag["pairs"] = pairs;
    }
    if (!a.gold.empty()) {
        double precision = 0.0;
        size_t evaluated = 0;
        check(wbwt_translation_precision(src.get(), tgt.get(), map.get(), a.gold.c_str(), &p,
                                         &precision, &evaluated));
        std::printf("precision@1 = %.4f (%zu pairs)\n", precision, evaluated);
        diag["precision"] = precision;
        diag["evaluated"] = evaluated;
    }
    emit(diag);
}

// ---- lm -------------------------------------------------------------------

struct LmTrainArgs {
    std::string corpus, out;
    int order = 5;
};

void run_lm_train(CLI::App* cmd, LmTrainArgs& a) {
    jset(cmd, "--order", a.order);
    wbwt_lm* lm = nullptr;
    check(wbwt_lm_train(a.corpus.c_str(), a.order, &lm));
    LmPtr holder(lm, &wbwt_lm_free);
    check(wbwt_lm_save_arpa(lm, a.out.c_str()));
    emit({{"command", "lm train"}, {"order", a.order}, {"out", a.out}});
}

struct LmScoreArgs {
    std::string model, corpus;
};

void run_lm_score(CLI::App*, LmScoreArgs& a) {
    LmPtr lm = load_lm(a.model);
    double logprob = 0.0, ppl = 0.0;
    unsigned long long tokens = 0;
    check(wbwt_lm_score_file(lm.get(), a.corpus.c_str(), &logprob, &tokens, &ppl));
    std::printf("logprob10=%.4f tokens=%llu perplexity=%.4f\n", logprob, tokens, ppl);
    emit({{"command", "lm score"},
          {"logprob10", logprob},
          {"tokens", tokens},
          {"perplexity", ppl}});
}

// ---- translate -------------------------------------------------------------

struct TranslateArgs {
    std::string src, tgt, map, lm, in, out, scores;
    double lambda_emb = 1.0;
    double lambda_lm = 0.1;
    int beam = 10;
    int candidates = 100;
    int vocab_limit = 50000;
    int csls_k = 10;
    bool lexical_csls = false;
};

void apply_translate_config(CLI::App* cmd, TranslateArgs& a) {
    jset(cmd, "--lambda-emb", a.lambda_emb);
    jset(cmd, "--lambda-lm", a.lambda_lm);
    jset(cmd, "--beam", a.beam);
    jset(cmd, "--candidates", a.candidates);
    jset(cmd, "--vocab-limit", a.vocab_limit);
    jset(cmd, "--csls-k", a.csls_k);
    jset(cmd, "--lexical-csls", a.lexical_csls);
}

wbwt_translate_stats translate_once(const TranslateArgs& a, const wbwt_embeddings* src,
                                    const wbwt_embeddings* tgt, const wbwt_map* map,
                                    const wbwt_lm* lm, const std::string& in,
                                    const std::string& out) {
    wbwt_translate_params p;
    wbwt_translate_params_init(&p);
    p.lambda_emb = a.lambda_emb;
    p.lambda_lm = a.lambda_lm;
    p.beam_size = a.beam;
    p.candidates_per_word = a.candidates;
    p.vocab_limit = a.vocab_limit;
    p.csls_k = a.csls_k;
    p.lexical_csls = a.lexical_csls ? 1 : 0;
    p.threads = g_threads;
    wbwt_translate_stats stats{};
    check(wbwt_translate_file(src, tgt, map, lm, &p, in.c_str(), out.c_str(),
                              a.scores.empty() ? nullptr : a.scores.c_str(), &stats));
    return stats;
}

void run_translate(CLI::App* cmd, TranslateArgs& a) {
    apply_translate_config(cmd, a);
    EmbPtr src = load_embeddings(a.src);
    EmbPtr tgt = load_embeddings(a.tgt);
    MapPtr map = load_map(a.map);
    LmPtr lm = load_lm(a.lm);
    wbwt_translate_stats stats =
        translate_once(a, src.get(), tgt.get(), map.get(), lm.get(), a.in, a.out);
    std::fprintf(stderr, "translated %llu sentences, %llu tokens out, %llu copied\n",
                 stats.sentences, stats.tokens_out, stats.copies);
    emit({{"command", "translate"},
          {"sentences", stats.sentences},
          {"tokens_out", stats.tokens_out},
          {"copies", stats.copies},
          {"out", a.out}});
}

// ---- noise -----------------------------------------------------------------

struct NoiseArgs {
    std::string corpus, vocab, out, noisy, clean;
    int dper = 3;
    double pdel = 0.1;
    double pins = 0.1;
    int vins = 50;
    int epochs = 1;
    bool validation = false;
};

void write_meta(const std::string& base, const json& meta) {
    std::ofstream out(base + ".meta");
    if (!out) throw ToolError{2, "cannot write meta file: " + base + ".meta"};
    out << meta.dump(2) << "\n";
}

void run_noise(CLI::App* cmd, NoiseArgs& a) {
    jset(cmd, "--dper", a.dper);
    jset(cmd, "--pdel", a.pdel);
    jset(cmd, "--pins", a.pins);
    jset(cmd, "--vins", a.vins);
    jset(cmd, "--epochs", a.epochs);
    if (a.out.empty() && (a.noisy.empty() || a.clean.empty()))
        throw ToolError{2, "noise: need --out or both --noisy and --clean"};
    wbwt_noise_params p;
    wbwt_noise_params_init(&p);
    p.d_per = a.dper;
    p.p_del = a.pdel;
    p.p_ins = a.pins;
    p.v_ins = a.vins;
    p.epochs = a.epochs;
    p.seed = g_seed;
    p.validation = a.validation ? 1 : 0;
    check(wbwt_noise_corpus(a.corpus.c_str(), a.vocab.empty() ? nullptr : a.vocab.c_str(), &p,
                            a.out.empty() ? nullptr : a.out.c_str(),
                            a.noisy.empty() ? nullptr : a.noisy.c_str(),
                            a.clean.empty() ? nullptr : a.clean.c_str()));
    json meta{{"seed", g_seed},      {"d_per", a.dper},   {"p_del", a.pdel},
              {"p_ins", a.pins},     {"v_ins", a.vins},   {"epochs", a.epochs},
              {"validation", a.validation}};
    write_meta(a.out.empty() ? a.noisy : a.out, meta);
    emit({{"command", "noise"}, {"meta", meta}});
}

// ---- prep / postprocess ------------------------------------------------------

struct PrepArgs {
    std::string in, out, sidecar, vocab_out;
    int max_len = 100;
    bool mask_numbers = false;
    unsigned long long min_count = 1;
    int vocab_limit = 0;
};

void run_prep(CLI::App* cmd, PrepArgs& a) {
    jset(cmd, "--max-len", a.max_len);
    jset(cmd, "--mask-numbers", a.mask_numbers);
    jset(cmd, "--min-count", a.min_count);
    jset(cmd, "--vocab-limit", a.vocab_limit);
    if (a.mask_numbers && a.sidecar.empty())
        throw ToolError{2, "prep: --mask-numbers needs --sidecar"};
    wbwt_preprocess_stats stats{};
    check(wbwt_preprocess(a.in.c_str(), a.out.c_str(), a.max_len, a.mask_numbers ? 1 : 0,
                          a.sidecar.empty() ? nullptr : a.sidecar.c_str(), &stats));
    if (!a.vocab_out.empty())
        check(wbwt_build_vocab(a.out.c_str(), a.min_count, a.vocab_limit, a.vocab_out.c_str()));
    std::fprintf(stderr, "kept %llu of %llu lines (%llu tokens)\n", stats.lines_kept,
                 stats.lines_in, stats.tokens);
    emit({{"command", "prep"},
          {"lines_in", stats.lines_in},
          {"lines_kept", stats.lines_kept},
          {"tokens", stats.tokens},
          {"out", a.out}});
}

struct PostArgs {
    std::string in, source, out, sidecar;
};

void run_postprocess(CLI::App*, PostArgs& a) {
    if (a.sidecar.empty()) {
        check(wbwt_postprocess(a.in.c_str(), a.source.c_str(), a.out.c_str()));
    } else {
        std::string tmp = a.out + ".tmp";
        check(wbwt_postprocess(a.in.c_str(), a.source.c_str(), tmp.c_str()));
        check(wbwt_unmask(tmp.c_str(), a.sidecar.c_str(), a.out.c_str()));
        std::filesystem::remove(tmp);
    }
    emit({{"command", "postprocess"}, {"out", a.out}});
}

// ---- eval ---------------------------------------------------------------------

struct EvalArgs {
    std::string hyp, ref;
    int max_n = 4;
};

void run_eval(CLI::App* cmd, EvalArgs& a) {
    jset(cmd, "--max-n", a.max_n);
    double bleu = 0.0;
    check(wbwt_bleu(a.hyp.c_str(), a.ref.c_str(), a.max_n, &bleu));
    std::printf("BLEU = %.2f\n", bleu);
    emit({{"command", "eval"}, {"bleu", bleu}, {"max_n", a.max_n}});
}

// ---- sweep ---------------------------------------------------------------------

struct SweepArgs {
    std::string mode;  // noise | vocab
    std::string out;
    // noise mode
    std::string corpus, vocab, denoise_cmd;
    std::string dper_grid = "0,1,2,3";
    std::string pdel_grid = "0.0,0.1,0.2";
    double pins = 0.1;
    int vins = 50;
    int epochs = 1;
    // vocab mode
    std::string vocab_grid = "1000,2000,5000";
    MapArgs map_args;          // --src/--tgt plus map training knobs
    TranslateArgs trans_args;  // shares --src/--tgt with map_args
    std::string lm, in, ref;
    int max_n = 4;
};

void run_sweep_noise(SweepArgs& a, std::ofstream& out, json& rows) {
    if (a.corpus.empty()) throw ToolError{2, "sweep: --corpus required in noise mode"};
    auto dpers = parse_grid(a.dper_grid, "d_per");
    auto pdels = parse_grid(a.pdel_grid, "p_del");
    std::filesystem::path work(a.out + ".work");
    std::filesystem::create_directories(work);

    out << "# sweep mode=noise seed=" << g_seed << " pins=" << a.pins << " vins=" << a.vins
        << " epochs=" << a.epochs << "\n";
    out << "# grid dper=" << a.dper_grid << " pdel=" << a.pdel_grid << "\n";
    out << "d_per\tp_del\tbleu\n";
    int point = 0;
    for (double dper : dpers) {
        for (double pdel : pdels) {
            double t0 = now_seconds();
            std::string tag = std::to_string(point);
            std::string noisy = (work / ("noisy_" + tag + ".txt")).string();
            std::string clean = (work / ("clean_" + tag + ".txt")).string();
            wbwt_noise_params p;
            wbwt_noise_params_init(&p);
            p.d_per = (int)dper;
            p.p_del = pdel;
            p.p_ins = a.pins;
            p.v_ins = a.vins;
            p.epochs = a.epochs;
            p.seed = g_seed;
            check(wbwt_noise_corpus(a.corpus.c_str(),
                                    a.vocab.empty() ? nullptr : a.vocab.c_str(), &p, nullptr,
                                    noisy.c_str(), clean.c_str()));
            std::string hyp = noisy;
            if (!a.denoise_cmd.empty()) {
                std::string denoised = (work / ("denoised_" + tag + ".txt")).string();
                std::string cmdline = a.denoise_cmd + " " + noisy + " " + denoised;
                int rc = std::system(cmdline.c_str());
                if (rc != 0)
                    throw ToolError{1, "denoise command failed (" + std::to_string(rc) +
                                           "): " + cmdline};
                hyp = denoised;
            }
            double bleu = 0.0;
            check(wbwt_bleu(hyp.c_str(), clean.c_str(), a.max_n, &bleu));
            char row[96];
            std::snprintf(row, sizeof row, "%d\t%g\t%.1f", (int)dper, pdel, bleu);
            out << row << "\n";
            double secs = now_seconds() - t0;
            std::fprintf(stderr, "sweep point d_per=%d p_del=%g bleu=%.1f (%.2fs)\n", (int)dper,
                         pdel, bleu, secs);
            rows.push_back({{"d_per", (int)dper},
                            {"p_del", pdel},
                            {"bleu", bleu},
                            {"seconds", secs}});
            ++point;
        }
    }
}

void run_sweep_vocab(SweepArgs& a, std::ofstream& out, json& rows) {
    if (a.map_args.src.empty() || a.map_args.tgt.empty())
        throw ToolError{2, "sweep: --src and --tgt required in vocab mode"};
    if (a.lm.empty() || a.in.empty() || a.ref.empty())
        throw ToolError{2, "sweep: --lm, --in and --ref required in vocab mode"};
    auto vocabs = parse_grid(a.vocab_grid, "vocab");
    std::filesystem::path work(a.out + ".work");
    std::filesystem::create_directories(work);

    EmbPtr src = load_embeddings(a.map_args.src);
    EmbPtr tgt = load_embeddings(a.map_args.tgt);
    LmPtr lm = load_lm(a.lm);

    out << "# sweep mode=vocab seed=" << g_seed << " init=" << a.map_args.init
        << " refine_iters=" << a.map_args.refine_iters << "\n";
    out << "# grid vocab=" << a.vocab_grid << "\n";
    out << "v_cross_train\tbleu\n";
    int point = 0;
    for (double v : vocabs) {
        double t0 = now_seconds();
        MapArgs ma = a.map_args;
        ma.v_cross_train = (int)v;
        MapPtr map = train_map(ma, src.get(), tgt.get());
        std::string tag = std::to_string(point);
        std::string trans = (work / ("trans_" + tag + ".txt")).string();
        TranslateArgs ta = a.trans_args;
        translate_once(ta, src.get(), tgt.get(), map.get(), lm.get(), a.in, trans);
        double bleu = 0.0;
        check(wbwt_bleu(trans.c_str(), a.ref.c_str(), a.max_n, &bleu));
        char row[64];
        std::snprintf(row, sizeof row, "%d\t%.1f", (int)v, bleu);
        out << row << "\n";
        double secs = now_seconds() - t0;
        std::fprintf(stderr, "sweep point v_cross_train=%d bleu=%.1f (%.2fs)\n", (int)v, bleu,
                     secs);
        rows.push_back({{"v_cross_train", (int)v}, {"bleu", bleu}, {"seconds", secs}});
        ++point;
    }
}

void run_sweep(CLI::App* cmd, SweepArgs& a) {
    jset(cmd, "--mode", a.mode);
    jset(cmd, "--dper-grid", a.dper_grid);
    jset(cmd, "--pdel-grid", a.pdel_grid);
    jset(cmd, "--vocab-grid", a.vocab_grid);
    jset(cmd, "--pins", a.pins);
    jset(cmd, "--vins", a.vins);
    jset(cmd, "--epochs", a.epochs);
    std::ofstream out(a.out);
    if (!out) throw ToolError{2, "cannot write sweep file: " + a.out};
    json rows = json::array();
    if (a.mode == "noise")
        run_sweep_noise(a, out, rows);
    else if (a.mode == "vocab")
        run_sweep_vocab(a, out, rows);
    else
        throw ToolError{2, "sweep: --mode must be noise or vocab"};
    if (!out) throw ToolError{2, "write failed: " + a.out};
    emit({{"command", "sweep"}, {"mode", a.mode}, {"rows", rows}, {"out", a.out}});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"word-by-word translation toolkit"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags take precedence");
    app.add_option("--seed", g_seed, "random seed");
    app.add_option("--threads", g_threads, "worker threads");
    app.add_flag("--json", g_json, "print machine-readable results to stdout");

    MapArgs map_args;
    CLI::App* map_cmd = app.add_subcommand("map", "learn a cross-lingual embedding map");
    add_map_flags(map_cmd, map_args, true);

    DictArgs dict_args;
    CLI::App* dict_cmd = app.add_subcommand("dict", "induce a bilingual dictionary");
    dict_cmd->add_option("--src", dict_args.src, "source embeddings file")->required();
    dict_cmd->add_option("--tgt", dict_args.tgt, "target embeddings file")->required();
    dict_cmd->add_option("--map", dict_args.map, "map file")->required();
    dict_cmd->add_option("--out", dict_args.out, "output dictionary TSV");
    dict_cmd->add_option("--gold", dict_args.gold, "gold dictionary for precision@1");
    dict_cmd->add_option("--v-cross-train", dict_args.v_cross_train, "vocabulary cap");
    dict_cmd->add_option("--csls-k", dict_args.csls_k, "CSLS neighborhood size");
    dict_cmd->add_flag("--cosine-nn", dict_args.cosine_nn, "mutual neighbors by plain cosine");

    CLI::App* lm_cmd = app.add_subcommand("lm", "n-gram language model");
    lm_cmd->require_subcommand(1);
    LmTrainArgs lm_train_args;
    CLI::App* lm_train_cmd = lm_cmd->add_subcommand("train", "estimate a Kneser-Ney model");
    lm_train_cmd->add_option("--corpus", lm_train_args.corpus, "training corpus")->required();
    lm_train_cmd->add_option("--order", lm_train_args.order, "model order");
    lm_train_cmd->add_option("--out", lm_train_args.out, "output ARPA file")->required();
    LmScoreArgs lm_score_args;
    CLI::App* lm_score_cmd = lm_cmd->add_subcommand("score", "score a corpus");
    lm_score_cmd->add_option("--model", lm_score_args.model, "ARPA file")->required();
    lm_score_cmd->add_option("--corpus", lm_score_args.corpus, "corpus to score")->required();

    TranslateArgs trans_args;
    CLI::App* trans_cmd = app.add_subcommand("translate", "word-by-word beam translation");
    trans_cmd->add_option("--src", trans_args.src, "source embeddings file")->required();
    trans_cmd->add_option("--tgt", trans_args.tgt, "target embeddings file")->required();
    trans_cmd->add_option("--map", trans_args.map, "map file")->required();
    trans_cmd->add_option("--lm", trans_args.lm, "target language model (ARPA)")->required();
    trans_cmd->add_option("--in", trans_args.in, "input corpus")->required();
    trans_cmd->add_option("--out", trans_args.out, "output file")->required();
    trans_cmd->add_option("--scores", trans_args.scores, "per-sentence score file");
    trans_cmd->add_option("--lambda-emb", trans_args.lambda_emb, "lexical weight");
    trans_cmd->add_option("--lambda-lm", trans_args.lambda_lm, "language model weight");
    trans_cmd->add_option("--beam", trans_args.beam, "beam size");
    trans_cmd->add_option("--candidates", trans_args.candidates, "candidates per word");
    trans_cmd->add_option("--vocab-limit", trans_args.vocab_limit, "translation vocabulary cap");
    trans_cmd->add_option("--csls-k", trans_args.csls_k, "CSLS neighborhood size");
    trans_cmd->add_flag("--lexical-csls", trans_args.lexical_csls,
                        "lexical weight from halved CSLS scores");

    NoiseArgs noise_args;
    CLI::App* noise_cmd = app.add_subcommand("noise", "generate denoising training pairs");
    noise_cmd->add_option("--corpus", noise_args.corpus, "clean corpus")->required();
    noise_cmd->add_option("--vocab", noise_args.vocab, "insertion vocabulary file");
    noise_cmd->add_option("--out", noise_args.out, "output TSV (noisy<TAB>clean)");
    noise_cmd->add_option("--noisy", noise_args.noisy, "output noisy file");
    noise_cmd->add_option("--clean", noise_args.clean, "output clean file");
    noise_cmd->add_option("--dper", noise_args.dper, "max permutation displacement");
    noise_cmd->add_option("--pdel", noise_args.pdel, "deletion probability");
    noise_cmd->add_option("--pins", noise_args.pins, "insertion probability");
    noise_cmd->add_option("--vins", noise_args.vins, "insertion vocabulary size");
    noise_cmd->add_option("--epochs", noise_args.epochs, "passes over the corpus");
    noise_cmd->add_flag("--validation", noise_args.validation, "identity pairs, no corruption");

    PrepArgs prep_args;
    CLI::App* prep_cmd = app.add_subcommand("prep", "preprocess a raw corpus");
    prep_cmd->add_option("--in", prep_args.in, "raw input corpus")->required();
    prep_cmd->add_option("--out", prep_args.out, "preprocessed output")->required();
    prep_cmd->add_option("--max-len", prep_args.max_len, "sentence length cap");
    prep_cmd->add_flag("--mask-numbers", prep_args.mask_numbers, "replace numbers with <num>");
    prep_cmd->add_option("--sidecar", prep_args.sidecar, "masked-number sidecar file");
    prep_cmd->add_option("--vocab-out", prep_args.vocab_out, "also write a vocabulary file");
    prep_cmd->add_option("--min-count", prep_args.min_count, "vocabulary count threshold");
    prep_cmd->add_option("--vocab-limit", prep_args.vocab_limit, "vocabulary size cap");

    PostArgs post_args;
    CLI::App* post_cmd = app.add_subcommand("postprocess", "resolve <unk> and unmask numbers");
    post_cmd->add_option("--in", post_args.in, "translated file")->required();
    post_cmd->add_option("--source", post_args.source, "aligned source file")->required();
    post_cmd->add_option("--out", post_args.out, "output file")->required();
    post_cmd->add_option("--sidecar", post_args.sidecar, "number sidecar from prep");

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "corpus BLEU");
    eval_cmd->add_option("--hyp", eval_args.hyp, "hypothesis file")->required();
    eval_cmd->add_option("--ref", eval_args.ref, "reference file")->required();
    eval_cmd->add_option("--max-n", eval_args.max_n, "maximum n-gram order");

    SweepArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid evaluation");
    sweep_cmd->add_option("--mode", sweep_args.mode, "noise or vocab")->required();
    sweep_cmd->add_option("--out", sweep_args.out, "output TSV")->required();
    sweep_cmd->add_option("--corpus", sweep_args.corpus, "clean corpus (noise mode)");
    sweep_cmd->add_option("--vocab", sweep_args.vocab, "insertion vocabulary file");
    sweep_cmd->add_option("--denoise-cmd", sweep_args.denoise_cmd,
                          "external denoiser: cmd <noisy> <out>");
    sweep_cmd->add_option("--dper-grid", sweep_args.dper_grid, "comma list of d_per values");
    sweep_cmd->add_option("--pdel-grid", sweep_args.pdel_grid, "comma list of p_del values");
    sweep_cmd->add_option("--pins", sweep_args.pins, "insertion probability");
    sweep_cmd->add_option("--vins", sweep_args.vins, "insertion vocabulary size");
    sweep_cmd->add_option("--epochs", sweep_args.epochs, "noise passes per point");
    sweep_cmd->add_option("--vocab-grid", sweep_args.vocab_grid,
                          "comma list of v_cross_train values (vocab mode)");
    sweep_cmd->add_option("--src", sweep_args.map_args.src, "source embeddings (vocab mode)");
    sweep_cmd->add_option("--tgt", sweep_args.map_args.tgt, "target embeddings (vocab mode)");
    sweep_cmd->add_option("--init", sweep_args.map_args.init, "map init for vocab mode");
    sweep_cmd->add_option("--refine-iters", sweep_args.map_args.refine_iters,
                          "refinement iterations");
    sweep_cmd->add_option("--lm", sweep_args.lm, "language model (vocab mode)");
    sweep_cmd->add_option("--in", sweep_args.in, "input corpus (vocab mode)");
    sweep_cmd->add_option("--ref", sweep_args.ref, "reference corpus (vocab mode)");
    sweep_cmd->add_option("--max-n", sweep_args.max_n, "BLEU n-gram order");
    sweep_cmd->add_option("--lambda-lm", sweep_args.trans_args.lambda_lm,
                          "language model weight (vocab mode)");
    sweep_cmd->add_option("--beam", sweep_args.trans_args.beam, "beam size (vocab mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    if (!config_path.empty()) {
        std::ifstream cfg(config_path);
        if (!cfg) {
            std::fprintf(stderr, "error: cannot open config file: %s\n", config_path.c_str());
            return 2;
        }
        try {
            cfg >> g_config;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: bad config file: %s\n", e.what());
            return 2;
        }
        if (app.count("--seed") == 0 && g_config.contains("seed"))
            g_seed = g_config.at("seed").get<unsigned long long>();
        if (app.count("--threads") == 0 && g_config.contains("threads"))
            g_threads = g_config.at("threads").get<int>();
    }

    wbwt_set_log([](const char* msg, void*) { std::fprintf(stderr, "%s\n", msg); }, nullptr);

    try {
        if (map_cmd->parsed()) run_map(map_cmd, map_args);
        else if (dict_cmd->parsed()) run_dict(dict_cmd, dict_args);
        else if (lm_train_cmd->parsed()) run_lm_train(lm_train_cmd, lm_train_args);
        else if (lm_score_cmd->parsed()) run_lm_score(lm_score_cmd, lm_score_args);
        else if (trans_cmd->parsed()) run_translate(trans_cmd, trans_args);
        else if (noise_cmd->parsed()) run_noise(noise_cmd, noise_args);
        else if (prep_cmd->parsed()) run_prep(prep_cmd, prep_args);
        else if (post_cmd->parsed()) run_postprocess(post_cmd, post_args);
        else if (eval_cmd->parsed()) run_eval(eval_cmd, eval_args);
        else if (sweep_cmd->parsed()) run_sweep(sweep_cmd, sweep_args);
    } catch (const ToolError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        if (g_json) std::printf("%s\n", json{{"error", e.message}}.dump(2).c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
