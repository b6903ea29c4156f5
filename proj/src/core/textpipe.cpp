#include "textpipe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "error.hpp"

namespace wbwt {

namespace {

struct CaseFoldPair {
    uint32_t upper;
    uint32_t lower;
};

#include "casefold_table.inc"

uint32_t fold_codepoint(uint32_t cp) {
    size_t lo = 0, hi = sizeof(kCaseFoldTable) / sizeof(kCaseFoldTable[0]);
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (kCaseFoldTable[mid].upper < cp)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < sizeof(kCaseFoldTable) / sizeof(kCaseFoldTable[0]) &&
        kCaseFoldTable[lo].upper == cp)
        return kCaseFoldTable[lo].lower;
    return cp;
}

void encode_utf8(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out += (char)cp;
    } else if (cp < 0x800) {
        out += (char)(0xC0 | (cp >> 6));
        out += (char)(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += (char)(0xE0 | (cp >> 12));
        out += (char)(0x80 | ((cp >> 6) & 0x3F));
        out += (char)(0x80 | (cp & 0x3F));
    } else {
        out += (char)(0xF0 | (cp >> 18));
        out += (char)(0x80 | ((cp >> 12) & 0x3F));
        out += (char)(0x80 | ((cp >> 6) & 0x3F));
        out += (char)(0x80 | (cp & 0x3F));
    }
}

} // namespace

std::string lowercase_utf8(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0, n = s.size();
    while (i < n) {
        unsigned char b0 = (unsigned char)s[i];
        uint32_t cp = 0;
        int len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            out += s[i++];  // stray continuation byte
            continue;
        }
        if (i + len > n) {
            out += s[i++];  // truncated sequence
            continue;
        }
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            unsigned char bk = (unsigned char)s[i + k];
            if ((bk & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (!ok) {
            out += s[i++];
            continue;
        }
        encode_utf8(fold_codepoint(cp), out);
        i += len;
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    size_t i = 0, n = line.size();
    auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    };
    while (i < n) {
        while (i < n && is_ws(line[i])) ++i;
        size_t start = i;
        while (i < n && !is_ws(line[i])) ++i;
        if (i > start) out.emplace_back(line, start, i - start);
    }
    return out;
}

bool is_number_token(const std::string& tok) {
    size_t i = 0, n = tok.size();
    if (n == 0) return false;
    if (tok[i] == '+' || tok[i] == '-') ++i;
    size_t d0 = i;
    while (i < n && tok[i] >= '0' && tok[i] <= '9') ++i;
    if (i == d0) return false;
    if (i == n) return true;
    if (tok[i] != '.' && tok[i] != ',') return false;
    ++i;
    size_t d1 = i;
    while (i < n && tok[i] >= '0' && tok[i] <= '9') ++i;
    return i == n && i > d1;
}

std::pair<std::vector<std::string>, std::vector<std::string>> mask_numbers_line(
    const std::vector<std::string>& tokens) {
    std::vector<std::string> masked;
    std::vector<std::string> numbers;
    masked.reserve(tokens.size());
    for (const auto& tok : tokens) {
        if (is_number_token(tok)) {
            masked.emplace_back("<num>");
            numbers.push_back(tok);
        } else {
            masked.push_back(tok);
        }
    }
    return {std::move(masked), std::move(numbers)};
}

std::vector<std::string> unmask_line(const std::vector<std::string>& tokens,
                                     const std::vector<std::string>& numbers) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    size_t k = 0;
    for (const auto& tok : tokens) {
        if (tok == "<num>" && k < numbers.size())
            out.push_back(numbers[k++]);
        else
            out.push_back(tok);
    }
    return out;
}

namespace {

std::string join(const std::vector<std::string>& toks, char sep = ' ') {
    std::string s;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) s += sep;
        s += toks[i];
    }
    return s;
}

} // namespace

PreprocessStats preprocess_file(const std::string& in_path, const std::string& out_path,
                                int max_len, bool mask_numbers,
                                const std::string& sidecar_path) {
    if (max_len < 1) fail(ErrorKind::invalid_argument, "preprocess: max_len must be >= 1");
    if (mask_numbers && sidecar_path.empty())
        fail(ErrorKind::invalid_argument, "preprocess: number masking needs a sidecar path");
    std::ifstream in(in_path);
    if (!in) fail(ErrorKind::io, "cannot open input file: " + in_path);
    std::ofstream out(out_path);
    if (!out) fail(ErrorKind::io, "cannot write output file: " + out_path);
    std::ofstream sidecar;
    if (mask_numbers) {
        sidecar.open(sidecar_path);
        if (!sidecar) fail(ErrorKind::io, "cannot write sidecar file: " + sidecar_path);
    }

    PreprocessStats stats;
    std::string line;
    while (std::getline(in, line)) {
        ++stats.lines_in;
        auto tokens = tokenize(lowercase_utf8(line));
        if ((int)tokens.size() > max_len) continue;
        ++stats.lines_kept;
        stats.tokens += tokens.size();
        if (mask_numbers) {
            auto [masked, numbers] = mask_numbers_line(tokens);
            out << join(masked) << "\n";
            sidecar << join(numbers, '\t') << "\n";
        } else {
            out << join(tokens) << "\n";
        }
    }
    if (!out || (mask_numbers && !sidecar)) fail(ErrorKind::io, "write failed: " + out_path);
    return stats;
}

void unmask_file(const std::string& in_path, const std::string& sidecar_path,
                 const std::string& out_path) {
    std::ifstream in(in_path);
    if (!in) fail(ErrorKind::io, "cannot open input file: " + in_path);
    std::ifstream sidecar(sidecar_path);
    if (!sidecar) fail(ErrorKind::io, "cannot open sidecar file: " + sidecar_path);
    std::ofstream out(out_path);
    if (!out) fail(ErrorKind::io, "cannot write output file: " + out_path);

    std::string line, nums;
    while (std::getline(in, line)) {
        if (!std::getline(sidecar, nums))
            fail(ErrorKind::parse, "unmask: sidecar has fewer lines than input");
        std::vector<std::string> numbers;
        size_t start = 0;
        if (!nums.empty()) {
            for (;;) {
                size_t tab = nums.find('\t', start);
                numbers.push_back(nums.substr(start, tab - start));
                if (tab == std::string::npos) break;
                start = tab + 1;
            }
        }
        out << join(unmask_line(tokenize(line), numbers)) << "\n";
    }
    if (std::getline(sidecar, nums))
        fail(ErrorKind::parse, "unmask: sidecar has more lines than input");
    if (!out) fail(ErrorKind::io, "write failed: " + out_path);
}

std::vector<VocabEntry> build_vocab(const std::vector<std::vector<std::string>>& corpus,
                                    uint64_t min_count, int limit) {
    std::unordered_map<std::string, uint64_t> counts;
    for (const auto& sent : corpus)
        for (const auto& tok : sent) ++counts[tok];
    std::vector<VocabEntry> vocab;
    vocab.reserve(counts.size());
    for (auto& [tok, c] : counts)
        if (c >= min_count) vocab.push_back({tok, c});
    std::sort(vocab.begin(), vocab.end(), [](const VocabEntry& a, const VocabEntry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.token < b.token;
    });
    if (limit > 0 && (int)vocab.size() > limit) vocab.resize(limit);
    return vocab;
}

void write_vocab(const std::vector<VocabEntry>& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write vocab file: " + path);
    for (const auto& e : vocab) out << e.token << "\t" << e.count << "\n";
    if (!out) fail(ErrorKind::io, "write failed: " + path);
}

std::vector<VocabEntry> read_vocab(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open vocab file: " + path);
    std::vector<VocabEntry> vocab;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            fail(ErrorKind::parse,
                 "vocab file: malformed line " + std::to_string(lineno));
        uint64_t count = 0;
        try {
            count = std::stoull(line.substr(tab + 1));
        } catch (const std::exception&) {
            fail(ErrorKind::parse, "vocab file: bad count on line " + std::to_string(lineno));
        }
        vocab.push_back({line.substr(0, tab), count});
    }
    return vocab;
}

std::vector<std::string> replace_unknowns(const std::vector<std::string>& output_tokens,
                                          const std::vector<std::string>& source_tokens) {
    std::unordered_set<std::string> present;
    for (const auto& tok : output_tokens)
        if (tok != "<unk>") present.insert(tok);
    std::vector<std::string> out;
    out.reserve(output_tokens.size());
    size_t cursor = 0;
    for (const auto& tok : output_tokens) {
        if (tok != "<unk>") {
            out.push_back(tok);
            continue;
        }
        while (cursor < source_tokens.size() && present.count(source_tokens[cursor])) ++cursor;
        if (cursor < source_tokens.size()) {
            out.push_back(source_tokens[cursor]);
            present.insert(source_tokens[cursor]);
            ++cursor;
        }
        // no source token left to substitute: drop the <unk>
    }
    return out;
}

void postprocess_file(const std::string& translated_path, const std::string& source_path,
                      const std::string& out_path) {
    std::ifstream trans(translated_path);
    if (!trans) fail(ErrorKind::io, "cannot open translated file: " + translated_path);
    std::ifstream src(source_path);
    if (!src) fail(ErrorKind::io, "cannot open source file: " + source_path);
    std::ofstream out(out_path);
    if (!out) fail(ErrorKind::io, "cannot write output file: " + out_path);

    std::string tline, sline;
    while (std::getline(trans, tline)) {
        if (!std::getline(src, sline))
            fail(ErrorKind::parse, "postprocess: source has fewer lines than translation");
        out << join(replace_unknowns(tokenize(tline), tokenize(sline))) << "\n";
    }
    if (std::getline(src, sline))
        fail(ErrorKind::parse, "postprocess: source has more lines than translation");
    if (!out) fail(ErrorKind::io, "write failed: " + out_path);
}

double bleu_corpus(const std::vector<std::vector<std::string>>& hypotheses,
                   const std::vector<std::vector<std::string>>& references, int max_n) {
    if (max_n < 1) fail(ErrorKind::invalid_argument, "bleu: max_n must be >= 1");
    if (hypotheses.size() != references.size())
        fail(ErrorKind::invalid_argument, "bleu: corpus size mismatch");
    if (hypotheses.empty()) fail(ErrorKind::invalid_argument, "bleu: empty corpus");

    std::vector<uint64_t> matches(max_n, 0), totals(max_n, 0);
    uint64_t hyp_len = 0, ref_len = 0;
    std::unordered_map<std::string, uint64_t> hyp_grams, ref_grams;
    for (size_t s = 0; s < hypotheses.size(); ++s) {
        const auto& hyp = hypotheses[s];
        const auto& ref = references[s];
        hyp_len += hyp.size();
        ref_len += ref.size();
        for (int n = 1; n <= max_n; ++n) {
            hyp_grams.clear();
            ref_grams.clear();
            for (size_t i = 0; i + n <= hyp.size(); ++i) {
                std::string g = hyp[i];
                for (int k = 1; k < n; ++k) {
                    g += '\x1f';
                    g += hyp[i + k];
                }
                ++hyp_grams[std::move(g)];
            }
            for (size_t i = 0; i + n <= ref.size(); ++i) {
                std::string g = ref[i];
                for (int k = 1; k < n; ++k) {
                    g += '\x1f';
                    g += ref[i + k];
                }
                ++ref_grams[std::move(g)];
            }
            for (const auto& [g, c] : hyp_grams) {
                totals[n - 1] += c;
                auto it = ref_grams.find(g);
                if (it != ref_grams.end()) matches[n - 1] += std::min(c, it->second);
            }
        }
    }

    if (hyp_len == 0) return 0.0;
    // Orders with no candidate n-grams anywhere (every sentence shorter than
    // n) drop out of the geometric mean, so a perfect match always scores 100.
    double log_prec = 0.0;
    int orders = 0;
    for (int n = 1; n <= max_n; ++n) {
        if (totals[n - 1] == 0) continue;
        if (matches[n - 1] == 0) return 0.0;
        log_prec += std::log((double)matches[n - 1] / (double)totals[n - 1]);
        ++orders;
    }
    double bp = hyp_len >= ref_len ? 1.0 : std::exp(1.0 - (double)ref_len / (double)hyp_len);
    return 100.0 * bp * std::exp(log_prec / orders);
}

double bleu_files(const std::string& hyp_path, const std::string& ref_path, int max_n) {
    return bleu_corpus(read_corpus(hyp_path), read_corpus(ref_path), max_n);
}

std::vector<std::vector<std::string>> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open corpus file: " + path);
    std::vector<std::vector<std::string>> corpus;
    std::string line;
    while (std::getline(in, line)) corpus.push_back(tokenize(line));
    return corpus;
}

void write_corpus(const std::vector<std::vector<std::string>>& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write corpus file: " + path);
    for (const auto& sent : corpus) out << join(sent) << "\n";
    if (!out) fail(ErrorKind::io, "write failed: " + path);
}

} // namespace wbwt
