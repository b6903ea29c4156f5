#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wbwt {

// Lowercases via the bundled one-to-one Unicode mapping table. Bytes that do
// not form valid UTF-8 pass through unchanged.
std::string lowercase_utf8(const std::string& s);

// Splits on ASCII whitespace (space, tab, CR, LF, FF, VT).
std::vector<std::string> tokenize(const std::string& line);

bool is_number_token(const std::string& tok);

// Replaces number tokens with <num>, returning the masked tokens and the
// originals in order.
std::pair<std::vector<std::string>, std::vector<std::string>> mask_numbers_line(
    const std::vector<std::string>& tokens);

// Puts numbers back: the k-th <num> takes numbers[k]. Surplus <num> labels
// stay as they are; surplus numbers are dropped.
std::vector<std::string> unmask_line(const std::vector<std::string>& tokens,
                                     const std::vector<std::string>& numbers);

struct PreprocessStats {
    uint64_t lines_in = 0;
    uint64_t lines_kept = 0;
    uint64_t tokens = 0;
};

// Lowercase + tokenize, dropping sentences longer than max_len tokens. With
// mask_numbers a sidecar file records the masked originals, one
// tab-separated line per kept sentence.
PreprocessStats preprocess_file(const std::string& in_path, const std::string& out_path,
                                int max_len, bool mask_numbers,
                                const std::string& sidecar_path = "");

void unmask_file(const std::string& in_path, const std::string& sidecar_path,
                 const std::string& out_path);

struct VocabEntry {
    std::string token;
    uint64_t count;
};

// Tokens with count >= min_count, ordered by count descending then token
// ascending, truncated to limit entries when limit > 0.
std::vector<VocabEntry> build_vocab(const std::vector<std::vector<std::string>>& corpus,
                                    uint64_t min_count = 1, int limit = 0);

void write_vocab(const std::vector<VocabEntry>& vocab, const std::string& path);
std::vector<VocabEntry> read_vocab(const std::string& path);

// Rewrites <unk> tokens in output using the source sentence: each takes the
// first unused source token not already present in the output; with none
// left the <unk> is dropped.
std::vector<std::string> replace_unknowns(const std::vector<std::string>& output_tokens,
                                          const std::vector<std::string>& source_tokens);

void postprocess_file(const std::string& translated_path, const std::string& source_path,
                      const std::string& out_path);

// Corpus-level BLEU as a percentage: clipped n-gram precisions up to max_n
// with the brevity penalty; any order with zero matches gives 0.
double bleu_corpus(const std::vector<std::vector<std::string>>& hypotheses,
                   const std::vector<std::vector<std::string>>& references, int max_n = 4);

double bleu_files(const std::string& hyp_path, const std::string& ref_path, int max_n = 4);

std::vector<std::vector<std::string>> read_corpus(const std::string& path);
void write_corpus(const std::vector<std::vector<std::string>>& corpus, const std::string& path);

} // namespace wbwt
