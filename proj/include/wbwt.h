#ifndef WBWT_H
#define WBWT_H

/* C interface to the word-by-word translation toolkit: cross-lingual
 * embedding mapping, Kneser-Ney language models, beam-search translation,
 * denoising-noise generation and text utilities. All functions return
 * WBWT_OK or an error status; wbwt_last_error() describes the most recent
 * failure on the calling thread. Handles are opaque and must be released
 * with their _free function. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wbwt_status {
    WBWT_OK = 0,
    WBWT_E_INVALID = 1,  /* bad argument or malformed input data */
    WBWT_E_IO = 2,       /* file could not be read or written */
    WBWT_E_PARSE = 3,    /* file contents not in the expected format */
    WBWT_E_NUMERIC = 4,  /* numerical failure (divergence, non-finite) */
    WBWT_E_INTERNAL = 5
} wbwt_status;

/* Message for the last failing call on this thread; empty string if none. */
const char* wbwt_last_error(void);

const char* wbwt_version(void);

/* Progress/diagnostic lines (training epochs, refinement iterations).
 * Pass fn = NULL to silence. The hook is global. */
typedef void (*wbwt_log_fn)(const char* message, void* user);
void wbwt_set_log(wbwt_log_fn fn, void* user);

typedef struct wbwt_embeddings wbwt_embeddings;
typedef struct wbwt_map wbwt_map;
typedef struct wbwt_lm wbwt_lm;

/* ---- embeddings ------------------------------------------------------- */

/* Text format: "count dim" header then one word per line followed by dim
 * values. normalize != 0 scales every vector to unit length. */
wbwt_status wbwt_embeddings_load(const char* path, int normalize, wbwt_embeddings** out);
void wbwt_embeddings_free(wbwt_embeddings* emb);
size_t wbwt_embeddings_size(const wbwt_embeddings* emb);
int wbwt_embeddings_dim(const wbwt_embeddings* emb);

/* ---- cross-lingual map ------------------------------------------------ */

typedef struct wbwt_adversarial_params {
    int hidden;                /* discriminator hidden units */
    int epochs;
    int batch_size;
    double learning_rate;
    double smoothing;          /* discriminator label smoothing */
    double beta_ortho;         /* orthogonalization pull-back strength */
    unsigned long long seed;
    int v_cross_train;         /* vocabulary cap for training and selection */
    int csls_k;
    int threads;
} wbwt_adversarial_params;
void wbwt_adversarial_params_init(wbwt_adversarial_params* p);

typedef struct wbwt_refine_params {
    int iters;
    int v_cross_train;
    int csls_k;
    int mutual_nn_cosine;      /* 1: plain cosine neighbors instead of CSLS */
    int threads;
} wbwt_refine_params;
void wbwt_refine_params_init(wbwt_refine_params* p);

typedef struct wbwt_dict_params {
    int v_cross_train;
    int csls_k;
    int mutual_nn_cosine;
    int threads;
} wbwt_dict_params;
void wbwt_dict_params_init(wbwt_dict_params* p);

wbwt_status wbwt_map_identity(int dim, wbwt_map** out);
wbwt_status wbwt_map_load(const char* path, wbwt_map** out);
wbwt_status wbwt_map_save(const wbwt_map* map, const char* path);
void wbwt_map_free(wbwt_map* map);
int wbwt_map_dim(const wbwt_map* map);

wbwt_status wbwt_map_train_adversarial(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                       const wbwt_adversarial_params* params, wbwt_map** out);

/* Alternates mutual-nearest-neighbor dictionary induction (CSLS) with the
 * orthogonal Procrustes solution, starting from map_in. */
wbwt_status wbwt_map_refine(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                            const wbwt_map* map_in, const wbwt_refine_params* params,
                            wbwt_map** out);

/* Writes the induced dictionary as "source<TAB>target" lines; *pairs_out
 * (optional) receives the pair count. */
wbwt_status wbwt_induce_dictionary(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                   const wbwt_map* map, const wbwt_dict_params* params,
                                   const char* out_path, size_t* pairs_out);

/* Precision@1 of the mapped retrieval against a gold "source<TAB>target"
 * dictionary. Pairs whose words are missing from the tables are skipped;
 * *evaluated_out (optional) receives the number actually scored. */
wbwt_status wbwt_translation_precision(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                       const wbwt_map* map, const char* gold_path,
                                       const wbwt_dict_params* params, double* precision_out,
                                       size_t* evaluated_out);

/* ---- language model --------------------------------------------------- */

/* Interpolated modified Kneser-Ney over a one-sentence-per-line corpus. */
wbwt_status wbwt_lm_train(const char* corpus_path, int order, wbwt_lm** out);
wbwt_status wbwt_lm_save_arpa(const wbwt_lm* lm, const char* path);
wbwt_status wbwt_lm_load_arpa(const char* path, wbwt_lm** out);
void wbwt_lm_free(wbwt_lm* lm);
int wbwt_lm_order(const wbwt_lm* lm);

/* log10 probability of one whitespace-tokenized sentence, </s> included. */
wbwt_status wbwt_lm_score_sentence(const wbwt_lm* lm, const char* sentence, double* logprob_out);

/* Corpus totals: log10 probability, predicted token count and perplexity.
 * Output pointers may be NULL. */
wbwt_status wbwt_lm_score_file(const wbwt_lm* lm, const char* corpus_path, double* logprob_out,
                               unsigned long long* tokens_out, double* perplexity_out);

/* ---- translation ------------------------------------------------------ */

typedef struct wbwt_translate_params {
    double lambda_emb;
    double lambda_lm;
    int beam_size;
    int candidates_per_word;
    int vocab_limit;           /* source and target shortlist cap */
    int csls_k;
    int lexical_csls;          /* 1: lexical weight from halved CSLS scores */
    int threads;
} wbwt_translate_params;
void wbwt_translate_params_init(wbwt_translate_params* p);

typedef struct wbwt_translate_stats {
    unsigned long long sentences;
    unsigned long long tokens_out;
    unsigned long long copies;  /* positions passed through unchanged */
} wbwt_translate_stats;

wbwt_status wbwt_translate_file(const wbwt_embeddings* src, const wbwt_embeddings* tgt,
                                const wbwt_map* map, const wbwt_lm* lm,
                                const wbwt_translate_params* params, const char* in_path,
                                const char* out_path, const char* scores_path,
                                wbwt_translate_stats* stats_out);

/* ---- noise ------------------------------------------------------------ */

typedef struct wbwt_noise_params {
    int d_per;
    double p_del;
    double p_ins;
    int v_ins;
    int epochs;
    unsigned long long seed;
    int validation;            /* 1: identity pairs, no corruption */
} wbwt_noise_params;
void wbwt_noise_params_init(wbwt_noise_params* p);

/* Generates (noisy, clean) pairs from a clean corpus. vocab_path selects the
 * insertion vocabulary file (NULL: built from the corpus by frequency).
 * Output is tsv_path ("noisy<TAB>clean") and/or the aligned pair of files;
 * unused outputs may be NULL, at least one form is required. */
wbwt_status wbwt_noise_corpus(const char* corpus_path, const char* vocab_path,
                              const wbwt_noise_params* params, const char* tsv_path,
                              const char* noisy_path, const char* clean_path);

/* ---- text utilities ---------------------------------------------------- */

typedef struct wbwt_preprocess_stats {
    unsigned long long lines_in;
    unsigned long long lines_kept;
    unsigned long long tokens;
} wbwt_preprocess_stats;

/* Lowercase + whitespace tokenization, dropping sentences over max_len
 * tokens. mask_numbers != 0 replaces number tokens with <num> and records
 * the originals in sidecar_path (required in that case). */
wbwt_status wbwt_preprocess(const char* in_path, const char* out_path, int max_len,
                            int mask_numbers, const char* sidecar_path,
                            wbwt_preprocess_stats* stats_out);

wbwt_status wbwt_unmask(const char* in_path, const char* sidecar_path, const char* out_path);

/* Replaces <unk> tokens in a translation using the aligned source corpus. */
wbwt_status wbwt_postprocess(const char* translated_path, const char* source_path,
                             const char* out_path);

wbwt_status wbwt_build_vocab(const char* corpus_path, unsigned long long min_count, int limit,
                             const char* out_path);

/* Corpus BLEU (percentage) of hypothesis vs reference files. */
wbwt_status wbwt_bleu(const char* hyp_path, const char* ref_path, int max_n, double* bleu_out);

#ifdef __cplusplus
}
#endif

#endif /* WBWT_H */
