#include "ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"

namespace wbwt {

LmVocab LmVocab::base() {
    LmVocab v;
    v.add("<unk>");
    v.add("<s>");
    v.add("</s>");
    return v;
}

int LmVocab::add(const std::string& tok) {
    auto it = ids.find(tok);
    if (it != ids.end()) return it->second;
    int id = (int)tokens.size();
    tokens.push_back(tok);
    ids.emplace(tok, id);
    return id;
}

int LmVocab::find(const std::string& tok) const {
    auto it = ids.find(tok);
    return it == ids.end() ? -1 : it->second;
}

int LmVocab::find_or_unk(const std::string& tok) const {
    int id = find(tok);
    return id < 0 ? kUnkId : id;
}

CountSet count_ngrams(const std::vector<std::vector<int>>& sentences, int order) {
    if (order < 1) fail(ErrorKind::invalid_argument, "lm: order must be >= 1");
    CountSet cs;
    cs.order = order;
    cs.raw.resize(order);
    std::vector<int> padded;
    for (const auto& sent : sentences) {
        padded.clear();
        padded.push_back(kBosId);
        padded.insert(padded.end(), sent.begin(), sent.end());
        padded.push_back(kEosId);
        int len = (int)padded.size();
        for (int n = 1; n <= order; ++n) {
            for (int i = 0; i + n <= len; ++i) {
                if (padded[i + n - 1] == kBosId) continue;  // window ends in <s>
                Gram g(padded.begin() + i, padded.begin() + i + n);
                ++cs.raw[n - 1][std::move(g)];
            }
        }
    }

    cs.used.resize(order);
    cs.used[order - 1] = cs.raw[order - 1];
    for (int n = order - 1; n >= 1; --n) {
        GramCounts adj;
        for (const auto& [gram, c] : cs.raw[n]) {  // (n+1)-grams
            (void)c;
            Gram suffix(gram.begin() + 1, gram.end());
            ++adj[std::move(suffix)];
        }
        // Nothing can precede <s>, so <s>-initial grams keep raw counts.
        for (const auto& [gram, c] : cs.raw[n - 1])
            if (gram[0] == kBosId) adj[gram] = c;
        cs.used[n - 1] = std::move(adj);
    }
    return cs;
}

Discounts estimate_discounts(const GramCounts& counts) {
    uint64_t t[5] = {0, 0, 0, 0, 0};
    for (const auto& [gram, c] : counts) {
        (void)gram;
        if (c >= 1 && c <= 4) ++t[c];
    }
    Discounts d;
    if (t[1] == 0 || t[2] == 0 || t[3] == 0 || t[4] == 0) {
        d.flat = true;
        return d;
    }
    double y = (double)t[1] / ((double)t[1] + 2.0 * (double)t[2]);
    d.d1 = 1.0 - 2.0 * y * (double)t[2] / (double)t[1];
    d.d2 = 2.0 - 3.0 * y * (double)t[3] / (double)t[2];
    d.d3 = 3.0 - 4.0 * y * (double)t[4] / (double)t[3];
    if (d.d2 < 0.0 || d.d3 < 0.0) {
        d = Discounts{};
        d.flat = true;
    }
    return d;
}

namespace {

struct HistoryStats {
    uint64_t total = 0;
    uint64_t n1 = 0, n2 = 0, n3p = 0;
};

double log10_safe(double p) {
    if (!(p > 0.0)) fail(ErrorKind::numeric, "lm: non-positive probability");
    return std::log10(p);
}

} // namespace

NgramModel train_lm(const std::vector<std::vector<std::string>>& corpus, int order,
                    const WarnFn& warn) {
    if (order < 1) fail(ErrorKind::invalid_argument, "lm: order must be >= 1");
    if (corpus.empty()) fail(ErrorKind::invalid_argument, "lm: empty corpus");

    NgramModel model;
    model.order = order;
    model.vocab = LmVocab::base();
    std::vector<std::vector<int>> encoded(corpus.size());
    for (size_t s = 0; s < corpus.size(); ++s) {
        encoded[s].reserve(corpus[s].size());
        for (const auto& tok : corpus[s]) encoded[s].push_back(model.vocab.add(tok));
    }

    CountSet cs = count_ngrams(encoded, order);
    std::vector<Discounts> disc(order);
    for (int n = 1; n <= order; ++n) {
        disc[n - 1] = estimate_discounts(cs.used[n - 1]);
        if (disc[n - 1].flat && warn) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "lm: order %d count-of-counts too sparse, using flat discount 0.5", n);
            warn(buf);
        }
    }

    model.grams.resize(order);

    // Predictable vocabulary: every token with a unigram count, plus </s> and
    // <unk>; <s> never has one. The unigram level interpolates with the
    // uniform distribution over this set.
    uint64_t uni_total = 0;
    HistoryStats eps;
    for (const auto& [gram, c] : cs.used[0]) {
        (void)gram;
        uni_total += c;
        eps.total += c;
        if (c == 1)
            ++eps.n1;
        else if (c == 2)
            ++eps.n2;
        else
            ++eps.n3p;
    }
    if (uni_total == 0) fail(ErrorKind::invalid_argument, "lm: empty corpus");
    size_t v_pred = cs.used[0].size();
    if (!cs.used[0].count(Gram{kEosId})) ++v_pred;
    if (!cs.used[0].count(Gram{kUnkId})) ++v_pred;

    const Discounts& d1 = disc[0];
    double gamma_eps = (d1.flat ? 0.5 * (double)(eps.n1 + eps.n2 + eps.n3p)
                                : d1.d1 * (double)eps.n1 + d1.d2 * (double)eps.n2 +
                                      d1.d3 * (double)eps.n3p) /
                       (double)eps.total;
    double uniform = 1.0 / (double)v_pred;
    for (const auto& [gram, c] : cs.used[0]) {
        double u = ((double)c - d1.of(c)) / (double)eps.total;
        model.grams[0][gram] = {log10_safe(u + gamma_eps * uniform), 0.0};
    }
    if (!model.grams[0].count(Gram{kUnkId}))
        model.grams[0][Gram{kUnkId}] = {log10_safe(gamma_eps * uniform), 0.0};
    model.grams[0][Gram{kBosId}] = {-99.0, 0.0};

    for (int n = 2; n <= order; ++n) {
        const GramCounts& counts = cs.used[n - 1];
        const Discounts& dn = disc[n - 1];

        std::unordered_map<Gram, HistoryStats, GramHash> hist;
        for (const auto& [gram, c] : counts) {
            Gram h(gram.begin(), gram.end() - 1);
            auto& s = hist[std::move(h)];
            s.total += c;
            if (c == 1)
                ++s.n1;
            else if (c == 2)
                ++s.n2;
            else
                ++s.n3p;
        }

        std::unordered_map<Gram, double, GramHash> gamma;
        gamma.reserve(hist.size());
        for (const auto& [h, s] : hist) {
            double num = dn.flat ? 0.5 * (double)(s.n1 + s.n2 + s.n3p)
                                 : dn.d1 * (double)s.n1 + dn.d2 * (double)s.n2 +
                                       dn.d3 * (double)s.n3p;
            gamma[h] = num / (double)s.total;
        }

        for (const auto& [gram, c] : counts) {
            Gram h(gram.begin(), gram.end() - 1);
            Gram lower(gram.begin() + 1, gram.end());
            auto lo = model.grams[n - 2].find(lower);
            if (lo == model.grams[n - 2].end())
                fail(ErrorKind::internal, "lm: missing lower-order gram");
            double u = ((double)c - dn.of(c)) / (double)hist[h].total;
            double p = u + gamma[h] * std::pow(10.0, lo->second.logp);
            model.grams[n - 1][gram] = {log10_safe(p), 0.0};
        }

        // gamma(h) becomes the backoff weight stored on the history gram.
        for (const auto& [h, g] : gamma) {
            auto it = model.grams[n - 2].find(h);
            if (it == model.grams[n - 2].end())
                it = model.grams[n - 2].emplace(h, NgramModel::Entry{-99.0, 0.0}).first;
            it->second.backoff = log10_safe(g);
        }
    }
    return model;
}

double NgramModel::score(std::span<const int> history, int word) const {
    int max_h = order - 1;
    int hl = (int)history.size();
    if (hl > max_h) {
        history = history.subspan(hl - max_h);
        hl = max_h;
    }
    double bo = 0.0;
    for (int m = hl; m >= 0; --m) {
        Gram g;
        g.reserve(m + 1);
        g.insert(g.end(), history.end() - m, history.end());
        g.push_back(word);
        auto it = grams[m].find(g);
        if (it != grams[m].end()) return bo + it->second.logp;
        if (m > 0) {
            Gram h(history.end() - m, history.end());
            auto hit = grams[m - 1].find(h);
            if (hit != grams[m - 1].end()) bo += hit->second.backoff;
        }
    }
    fail(ErrorKind::internal, "lm: unigram missing for id " + std::to_string(word));
}

double NgramModel::score_tokens(const std::vector<std::string>& history,
                                const std::string& word) const {
    std::vector<int> h(history.size());
    for (size_t i = 0; i < history.size(); ++i) h[i] = vocab.find_or_unk(history[i]);
    return score(h, vocab.find_or_unk(word));
}

double NgramModel::sentence_logprob(std::span<const int> sentence) const {
    std::vector<int> h{kBosId};
    double total = 0.0;
    for (int w : sentence) {
        total += score(h, w);
        h.push_back(w);
    }
    total += score(h, kEosId);
    return total;
}

double corpus_perplexity(const NgramModel& model,
                         const std::vector<std::vector<std::string>>& corpus) {
    if (corpus.empty()) fail(ErrorKind::invalid_argument, "perplexity: empty corpus");
    double total = 0.0;
    uint64_t tokens = 0;
    std::vector<int> ids;
    for (const auto& sent : corpus) {
        ids.clear();
        for (const auto& tok : sent) ids.push_back(model.vocab.find_or_unk(tok));
        total += model.sentence_logprob(ids);
        tokens += sent.size() + 1;  // </s> is predicted too
    }
    return std::pow(10.0, -total / (double)tokens);
}

namespace {

std::string gram_text(const NgramModel& model, const Gram& g) {
    std::string s;
    for (size_t i = 0; i < g.size(); ++i) {
        if (i) s += ' ';
        s += model.vocab.tokens[g[i]];
    }
    return s;
}

} // namespace

void write_arpa(const NgramModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::io, "cannot write ARPA file: " + path);
    out << "\\data\\\n";
    for (int n = 1; n <= model.order; ++n)
        out << "ngram " << n << "=" << model.grams[n - 1].size() << "\n";

    char buf[64];
    for (int n = 1; n <= model.order; ++n) {
        std::vector<std::pair<std::string, const NgramModel::Entry*>> rows;
        rows.reserve(model.grams[n - 1].size());
        for (const auto& [gram, e] : model.grams[n - 1])
            rows.emplace_back(gram_text(model, gram), &e);
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        out << "\n\\" << n << "-grams:\n";
        for (const auto& [text, e] : rows) {
            std::snprintf(buf, sizeof buf, "%.7f", e->logp);
            out << buf << "\t" << text;
            if (n < model.order) {
                std::snprintf(buf, sizeof buf, "%.7f", e->backoff);
                out << "\t" << buf;
            }
            out << "\n";
        }
    }
    out << "\n\\end\\\n";
    if (!out) fail(ErrorKind::io, "write failed: " + path);
}

NgramModel read_arpa(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open ARPA file: " + path);
    std::string line;

    auto next_nonblank = [&](std::string& dst) {
        while (std::getline(in, dst)) {
            if (!dst.empty() && dst.back() == '\r') dst.pop_back();
            if (!dst.empty()) return true;
        }
        return false;
    };

    if (!next_nonblank(line) || line != "\\data\\")
        fail(ErrorKind::parse, "ARPA: missing \\data\\ header");

    std::vector<size_t> declared;
    while (next_nonblank(line)) {
        if (line.rfind("ngram ", 0) != 0) break;
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorKind::parse, "ARPA: bad ngram count line");
        int n = std::stoi(line.substr(6, eq - 6));
        if (n != (int)declared.size() + 1) fail(ErrorKind::parse, "ARPA: ngram counts out of order");
        declared.push_back((size_t)std::stoull(line.substr(eq + 1)));
    }
    if (declared.empty()) fail(ErrorKind::parse, "ARPA: no ngram counts");

    NgramModel model;
    model.order = (int)declared.size();
    model.vocab = LmVocab::base();
    model.grams.resize(model.order);

    for (int n = 1; n <= model.order; ++n) {
        std::string expect = "\\" + std::to_string(n) + "-grams:";
        if (line != expect) fail(ErrorKind::parse, "ARPA: expected " + expect);
        size_t read = 0;
        while (next_nonblank(line)) {
            if (!line.empty() && line[0] == '\\') break;
            // logp \t tokens [\t backoff]
            size_t tab1 = line.find('\t');
            if (tab1 == std::string::npos) fail(ErrorKind::parse, "ARPA: malformed entry line");
            size_t tab2 = line.find('\t', tab1 + 1);
            NgramModel::Entry e;
            try {
                e.logp = std::stod(line.substr(0, tab1));
                if (tab2 != std::string::npos) e.backoff = std::stod(line.substr(tab2 + 1));
            } catch (const std::exception&) {
                fail(ErrorKind::parse, "ARPA: bad number in entry line");
            }
            std::string text = tab2 == std::string::npos ? line.substr(tab1 + 1)
                                                         : line.substr(tab1 + 1, tab2 - tab1 - 1);
            Gram g;
            std::istringstream toks(text);
            std::string tok;
            while (toks >> tok) g.push_back(model.vocab.add(tok));
            if ((int)g.size() != n) fail(ErrorKind::parse, "ARPA: entry of wrong order");
            model.grams[n - 1][std::move(g)] = e;
            ++read;
        }
        if (read != declared[n - 1])
            fail(ErrorKind::parse, "ARPA: section " + std::to_string(n) + " has " +
                                       std::to_string(read) + " entries, declared " +
                                       std::to_string(declared[n - 1]));
    }
    if (line != "\\end\\") fail(ErrorKind::parse, "ARPA: missing \\end\\");
    if (!model.grams[0].count(Gram{kUnkId}))
        fail(ErrorKind::parse, "ARPA: missing <unk> unigram");
    if (!model.grams[0].count(Gram{kEosId}))
        fail(ErrorKind::parse, "ARPA: missing </s> unigram");
    return model;
}

} // namespace wbwt
