#include "wbwt.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <new>
#include <sstream>
#include <string>

#include "core/crossmap.hpp"
#include "core/decoder.hpp"
#include "core/embedding.hpp"
#include "core/error.hpp"
#include "core/ngram_lm.hpp"
#include "core/noise.hpp"
#include "core/textpipe.hpp"

struct wbwt_embeddings {
    wbwt::EmbeddingTable table;
};
struct wbwt_map {
    wbwt::LinearMap map;
};
struct wbwt_lm {
    wbwt::NgramModel model;
};

namespace {

thread_local std::string g_last_error;

std::mutex g_log_mutex;
wbwt_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

void emit_log(const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    if (g_log_fn) g_log_fn(msg.c_str(), g_log_user);
}

wbwt::LogFn log_hook() {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    if (!g_log_fn) return {};
    return [](const std::string& m) { emit_log(m); };
}

wbwt_status to_status(wbwt::ErrorKind kind) {
    switch (kind) {
        case wbwt::ErrorKind::invalid_argument: return WBWT_E_INVALID;
        case wbwt::ErrorKind::io: return WBWT_E_IO;
        case wbwt::ErrorKind::parse: return WBWT_E_PARSE;
        case wbwt::ErrorKind::numeric: return WBWT_E_NUMERIC;
        case wbwt::ErrorKind::internal: return WBWT_E_INTERNAL;
    }
    return WBWT_E_INTERNAL;
}

template <typename Fn>
wbwt_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return WBWT_OK;
    } catch (const wbwt::Error& e) {
        g_last_error = e.what();
        return to_status(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return WBWT_E_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return WBWT_E_INTERNAL;
    }
}

wbwt_status invalid(const char* msg) {
    g_last_error = msg;
    return WBWT_E_INVALID;
}

wbwt::CrossmapConfig dict_config(const wbwt_dict_params* p) {
    wbwt::CrossmapConfig cfg;
    if (p) {
        cfg.v_cross_train = p->v_cross_train;
        cfg.csls_k = p->csls_k;
        cfg.mutual_nn_cosine = p->mutual_nn_cosine != 0;
    }
    return cfg;
}

} // namespace

extern "C" {

const char* wbwt_last_error(void) { return g_last_error.c_str(); }

const char* wbwt_version(void) { return "1.0.0"; }

void wbwt_set_log(wbwt_log_fn fn, void* user) {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    g_log_fn = fn;
    g_log_user = user;
}

/* ---- embeddings ------------------------------------------------------- */

wbwt_status wbwt_embeddings_load(const char* path, int normalize, wbwt_embeddings** out) {
    if (!path || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        auto handle = new wbwt_embeddings{wbwt::load_embeddings_file(path)};
        if (normalize) wbwt::normalize(handle->table);
        *out = handle;
    });
}

void wbwt_embeddings_free(wbwt_embeddings* emb) { delete emb; }

size_t wbwt_embeddings_size(const wbwt_embeddings* emb) { return emb ? emb->table.size() : 0; }

int wbwt_embeddings_dim(const wbwt_embeddings* emb) { return emb ? emb->table.dim : 0; }

/* ---- cross-lingual map ------------------------------------------------ */

void wbwt_adversarial_params_init(wbwt_adversarial_params* p) {
    if (!p) return;
    p->hidden = 512;
    p->epochs = 40;
    p->batch_size = 32;
    p->learning_rate = 0.5;
    p->smoothing = 0.1;
    p->beta_ortho = 0.01;
    p->seed = 0;
    p->v_cross_train = 100000;
    p->csls_k = 10;
    p->threads = 1;
}

void wbwt_refine_params_init(wbwt_refine_params* p) {
    if (!p) return;
    p->iters = 10;
    p->v_cross_train = 100000;
    p->csls_k = 10;
    p->mutual_nn_cosine = 0;
    p->threads = 1;
}

void wbwt_dict_params_init(wbwt_dict_params* p) {
    if (!p) return;
    p->v_cross_train = 100000;
    p->csls_k = 10;
    p->mutual_nn_cosine = 0;
    p->threads = 1;
}

wbwt_status wbwt_map_identity(int dim, wbwt_map** out) {
    if (!out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        if (dim < 1) wbwt::fail(wbwt::ErrorKind::invalid_argument, "map: dim must be >= 1");
        *out = new wbwt_map{wbwt::LinearMap::identity(dim)};
    });
}

wbwt_status wbwt_map_load(const char* path, wbwt_map** out) {
    if (!path || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] { *out = new wbwt_map{wbwt::load_map(path)}; });
}

wbwt_status wbwt_map_save(const wbwt_map* map, const char* path) {
    if (!map || !path) return invalid("null argument");
    return guarded([&] { wbwt::save_map(map->map, path); });
}

void wbwt_map_free(wbwt_map* map) { delete map; }

int wbwt_map_dim(const wbwt_map* map) { return map ? map->map.dim() : 0; }

wbwt_status wbwt_map_train_adversarial(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                       const wbwt_adversarial_params* params, wbwt_map** out) {
    if (!src || !tgt || !params || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        wbwt::CrossmapConfig cfg;
        cfg.v_cross_train = params->v_cross_train;
        cfg.csls_k = params->csls_k;
        cfg.adversarial.discriminator_hidden = params->hidden;
        cfg.adversarial.epochs = params->epochs;
        cfg.adversarial.batch_size = params->batch_size;
        cfg.adversarial.learning_rate = params->learning_rate;
        cfg.adversarial.smoothing = params->smoothing;
        cfg.adversarial.beta_ortho = params->beta_ortho;
        cfg.adversarial.seed = params->seed;
        *out = new wbwt_map{wbwt::adversarial_init(src->table, tgt->table, cfg, log_hook())};
    });
}

wbwt_status wbwt_map_refine(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                            const wbwt_map* map_in, const wbwt_refine_params* params,
                            wbwt_map** out) {
    if (!src || !tgt || !map_in || !params || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        wbwt::CrossmapConfig cfg;
        cfg.v_cross_train = params->v_cross_train;
        cfg.refinement_iters = params->iters;
        cfg.csls_k = params->csls_k;
        cfg.mutual_nn_cosine = params->mutual_nn_cosine != 0;
        *out = new wbwt_map{wbwt::refine(src->table, tgt->table, map_in->map, cfg, nullptr,
                                         log_hook(), params->threads)};
    });
}

wbwt_status wbwt_induce_dictionary(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                   const wbwt_map* map, const wbwt_dict_params* params,
                                   const char* out_path, size_t* pairs_out) {
    if (!src || !tgt || !map || !out_path) return invalid("null argument");
    return guarded([&] {
        wbwt::CrossmapConfig cfg = dict_config(params);
        auto dict = wbwt::build_mutual_nn_dictionary(src->table, tgt->table, map->map, cfg,
                                                     nullptr, params ? params->threads : 1);
        wbwt::save_dictionary(dict, src->table, tgt->table, out_path);
        if (pairs_out) *pairs_out = dict.pairs.size();
    });
}

wbwt_status wbwt_translation_precision(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                       const wbwt_map* map, const char* gold_path,
                                       const wbwt_dict_params* params, double* precision_out,
                                       size_t* evaluated_out) {
    if (!src || !tgt || !map || !gold_path || !precision_out) return invalid("null argument");
    return guarded([&] {
        std::ifstream in(gold_path);
        if (!in) wbwt::fail(wbwt::ErrorKind::io, std::string("cannot open gold file: ") + gold_path);
        std::vector<wbwt::DictPair> gold;
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            size_t tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
                wbwt::fail(wbwt::ErrorKind::parse,
                           "gold dictionary: malformed line " + std::to_string(lineno));
            int si = src->table.find(line.substr(0, tab));
            int ti = tgt->table.find(line.substr(tab + 1));
            if (si < 0 || ti < 0) continue;  // out-of-vocabulary gold pair
            gold.push_back({si, ti});
        }
        if (gold.empty())
            wbwt::fail(wbwt::ErrorKind::invalid_argument,
                       "gold dictionary: no pairs found in the vocabularies");
        wbwt::CrossmapConfig cfg = dict_config(params);
        *precision_out = wbwt::word_translation_precision(src->table, tgt->table, map->map, cfg,
                                                          gold, params ? params->threads : 1);
        if (evaluated_out) *evaluated_out = gold.size();
    });
}

/* ---- language model --------------------------------------------------- */

wbwt_status wbwt_lm_train(const char* corpus_path, int order, wbwt_lm** out) {
    if (!corpus_path || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] {
        auto corpus = wbwt::read_corpus(corpus_path);
        auto hook = log_hook();
        *out = new wbwt_lm{wbwt::train_lm(corpus, order, hook)};
    });
}

wbwt_status wbwt_lm_save_arpa(const wbwt_lm* lm, const char* path) {
    if (!lm || !path) return invalid("null argument");
    return guarded([&] { wbwt::write_arpa(lm->model, path); });
}

wbwt_status wbwt_lm_load_arpa(const char* path, wbwt_lm** out) {
    if (!path || !out) return invalid("null argument");
    *out = nullptr;
    return guarded([&] { *out = new wbwt_lm{wbwt::read_arpa(path)}; });
}

void wbwt_lm_free(wbwt_lm* lm) { delete lm; }

int wbwt_lm_order(const wbwt_lm* lm) { return lm ? lm->model.order : 0; }

wbwt_status wbwt_lm_score_sentence(const wbwt_lm* lm, const char* sentence, double* logprob_out) {
    if (!lm || !sentence || !logprob_out) return invalid("null argument");
    return guarded([&] {
        auto tokens = wbwt::tokenize(sentence);
        std::vector<int> ids;
        ids.reserve(tokens.size());
        for (const auto& t : tokens) ids.push_back(lm->model.vocab.find_or_unk(t));
        *logprob_out = lm->model.sentence_logprob(ids);
    });
}

wbwt_status wbwt_lm_score_file(const wbwt_lm* lm, const char* corpus_path, double* logprob_out,
                               unsigned long long* tokens_out, double* perplexity_out) {
    if (!lm || !corpus_path) return invalid("null argument");
    return guarded([&] {
        auto corpus = wbwt::read_corpus(corpus_path);
        if (corpus.empty())
            wbwt::fail(wbwt::ErrorKind::invalid_argument, "lm: empty corpus");
        double total = 0.0;
        unsigned long long tokens = 0;
        std::vector<int> ids;
        for (const auto& sent : corpus) {
            ids.clear();
            for (const auto& t : sent) ids.push_back(lm->model.vocab.find_or_unk(t));
            total += lm->model.sentence_logprob(ids);
            tokens += sent.size() + 1;
        }
        if (logprob_out) *logprob_out = total;
        if (tokens_out) *tokens_out = tokens;
        if (perplexity_out) *perplexity_out = std::pow(10.0, -total / (double)tokens);
    });
}

/* ---- translation ------------------------------------------------------ */

void wbwt_translate_params_init(wbwt_translate_params* p) {
    if (!p) return;
    p->lambda_emb = 1.0;
    p->lambda_lm = 0.1;
    p->beam_size = 10;
    p->candidates_per_word = 100;
    p->vocab_limit = 50000;
    p->csls_k = 10;
    p->lexical_csls = 0;
    p->threads = 1;
}

wbwt_status wbwt_translate_file(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                const wbwt_map* map, const wbwt_lm* lm,
                                const wbwt_translate_params* params, const char* in_path,
                                const char* out_path, const char* scores_path,
                                wbwt_translate_stats* stats_out) {
    if (!src || !tgt || !map || !lm || !params || !in_path || !out_path)
        return invalid("null argument");
    return guarded([&] {
        wbwt::DecoderConfig cfg;
        cfg.lambda_emb = params->lambda_emb;
        cfg.lambda_lm = params->lambda_lm;
        cfg.beam_size = params->beam_size;
        cfg.candidates_per_word = params->candidates_per_word;
        cfg.translate_vocab_limit = params->vocab_limit;
        cfg.csls_k = params->csls_k;
        cfg.lexical_csls = params->lexical_csls != 0;
        wbwt::Translator tr(src->table, tgt->table, map->map, lm->model, cfg, params->threads);
        auto stats = tr.translate_file(in_path, out_path, scores_path ? scores_path : "");
        if (stats_out) {
            stats_out->sentences = stats.sentences;
            stats_out->tokens_out = stats.tokens_out;
            stats_out->copies = stats.copies;
        }
    });
}

/* ---- noise ------------------------------------------------------------ */

void wbwt_noise_params_init(wbwt_noise_params* p) {
    if (!p) return;
    p->d_per = 3;
    p->p_del = 0.1;
    p->p_ins = 0.1;
    p->v_ins = 50;
    p->epochs = 1;
    p->seed = 0;
    p->validation = 0;
}

wbwt_status wbwt_noise_corpus(const char* corpus_path, const char* vocab_path,
                              const wbwt_noise_params* params, const char* tsv_path,
                              const char* noisy_path, const char* clean_path) {
    if (!corpus_path || !params) return invalid("null argument");
    if (!tsv_path && !(noisy_path && clean_path))
        return invalid("need a TSV path or a noisy/clean file pair");
    if ((noisy_path && !clean_path) || (!noisy_path && clean_path))
        return invalid("noisy and clean paths must be given together");
    return guarded([&] {
        auto corpus = wbwt::read_corpus(corpus_path);
        if (corpus.empty())
            wbwt::fail(wbwt::ErrorKind::invalid_argument, "noise: empty corpus");
        std::vector<wbwt::NoisePair> pairs;
        if (params->validation) {
            pairs = wbwt::make_validation_pairs(corpus);
        } else {
            std::vector<std::string> vocab;
            if (vocab_path) {
                for (auto& e : wbwt::read_vocab(vocab_path)) vocab.push_back(std::move(e.token));
            } else {
                for (auto& e : wbwt::build_vocab(corpus)) vocab.push_back(std::move(e.token));
            }
            wbwt::NoiseSpec spec;
            spec.d_per = params->d_per;
            spec.p_del = params->p_del;
            spec.p_ins = params->p_ins;
            spec.v_ins = params->v_ins;
            pairs = wbwt::make_denoising_corpus(corpus, spec, vocab, params->seed, params->epochs);
        }
        if (tsv_path) wbwt::write_pairs_tsv(pairs, tsv_path);
        if (noisy_path) wbwt::write_pairs_files(pairs, noisy_path, clean_path);
    });
}

/* ---- text utilities ---------------------------------------------------- */

wbwt_status wbwt_preprocess(const char* in_path, const char* out_path, int max_len,
                            int mask_numbers, const char* sidecar_path,
                            wbwt_preprocess_stats* stats_out) {
    if (!in_path || !out_path) return invalid("null argument");
    return guarded([&] {
        auto stats = wbwt::preprocess_file(in_path, out_path, max_len, mask_numbers != 0,
                                           sidecar_path ? sidecar_path : "");
        if (stats_out) {
            stats_out->lines_in = stats.lines_in;
            stats_out->lines_kept = stats.lines_kept;
            stats_out->tokens = stats.tokens;
        }
    });
}

wbwt_status wbwt_unmask(const char* in_path, const char* sidecar_path, const char* out_path) {
    if (!in_path || !sidecar_path || !out_path) return invalid("null argument");
    return guarded([&] { wbwt::unmask_file(in_path, sidecar_path, out_path); });
}

wbwt_status wbwt_postprocess(const char* translated_path, const char* source_path,
                             const char* out_path) {
    if (!translated_path || !source_path || !out_path) return invalid("null argument");
    return guarded([&] { wbwt::postprocess_file(translated_path, source_path, out_path); });
}

wbwt_status wbwt_build_vocab(const char* corpus_path, unsigned long long min_count, int limit,
                             const char* out_path) {
    if (!corpus_path || !out_path) return invalid("null argument");
    return guarded([&] {
        auto corpus = wbwt::read_corpus(corpus_path);
        wbwt::write_vocab(wbwt::build_vocab(corpus, min_count, limit), out_path);
    });
}

wbwt_status wbwt_bleu(const char* hyp_path, const char* ref_path, int max_n, double* bleu_out) {
    if (!hyp_path || !ref_path || !bleu_out) return invalid("null argument");
    return guarded([&] { *bleu_out = wbwt::bleu_files(hyp_path, ref_path, max_n); });
}

} // extern "C"
