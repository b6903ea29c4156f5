#include "embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "matrix.hpp"

namespace wbwt {

namespace {

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

bool parse_int(const std::string& s, long& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

} // namespace

int EmbeddingTable::at(const std::string& word) const {
    int i = find(word);
    if (i < 0) fail(ErrorKind::invalid_argument, "unknown word: " + word);
    return i;
}

void EmbeddingTable::rebuild_index() {
    index_.clear();
    index_.reserve(words.size());
    for (size_t i = 0; i < words.size(); ++i) index_.emplace(words[i], static_cast<int>(i));
}

EmbeddingTable load_embeddings(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::parse, "embeddings: empty stream");

    auto header = split_ws(line);
    long count = 0, dim = 0;
    if (header.size() != 2 || !parse_int(header[0], count) || !parse_int(header[1], dim) ||
        count < 0 || dim <= 0)
        fail(ErrorKind::parse, "embeddings: malformed header \"" + line + "\"");

    EmbeddingTable t;
    t.dim = static_cast<int>(dim);
    t.words.reserve(count);
    t.data.reserve(static_cast<size_t>(count) * dim);

    std::unordered_map<std::string, int> seen;
    long rows = 0;
    while (std::getline(in, line)) {
        auto fields = split_ws(line);
        if (fields.empty()) continue;  // tolerate trailing blank lines
        if (rows == count)
            fail(ErrorKind::parse, "embeddings: row count mismatch (header says " +
                                       std::to_string(count) + ", found more)");
        if (static_cast<long>(fields.size()) != dim + 1)
            fail(ErrorKind::parse, "embeddings: dimension mismatch at word \"" + fields[0] +
                                       "\" (expected " + std::to_string(dim) + " components)");
        double sq = 0.0;
        for (long j = 0; j < dim; ++j) {
            double v;
            if (!parse_double(fields[j + 1], v))
                fail(ErrorKind::parse, "embeddings: non-numeric component \"" + fields[j + 1] +
                                           "\" at word \"" + fields[0] + "\"");
            t.data.push_back(v);
            sq += v * v;
        }
        if (sq == 0.0)
            fail(ErrorKind::parse, "embeddings: zero vector at word \"" + fields[0] + "\"");
        if (!seen.emplace(fields[0], 1).second)
            fail(ErrorKind::parse, "embeddings: duplicate word \"" + fields[0] + "\"");
        t.words.push_back(std::move(fields[0]));
        ++rows;
    }
    if (rows != count)
        fail(ErrorKind::parse, "embeddings: row count mismatch (header says " +
                                   std::to_string(count) + ", found " + std::to_string(rows) + ")");

    t.rebuild_index();
    return t;
}

EmbeddingTable load_embeddings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open embeddings file: " + path);
    return load_embeddings(in);
}

void normalize(EmbeddingTable& table) {
    for (int i = 0; i < table.size(); ++i) {
        double* r = table.data.data() + static_cast<size_t>(i) * table.dim;
        double sq = 0.0;
        for (int j = 0; j < table.dim; ++j) sq += r[j] * r[j];
        if (sq == 0.0)
            fail(ErrorKind::numeric, "normalize: zero-norm row at word \"" + table.words[i] + "\"");
        double inv = 1.0 / std::sqrt(sq);
        for (int j = 0; j < table.dim; ++j) r[j] *= inv;
    }
    table.normalized = true;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) fail(ErrorKind::invalid_argument, "cosine: dimension mismatch");
    double uu = dot(u, u), vv = dot(v, v);
    if (uu == 0.0 || vv == 0.0) fail(ErrorKind::invalid_argument, "cosine: zero vector");
    double c = dot(u, v) / std::sqrt(uu * vv);
    return std::clamp(c, -1.0, 1.0);
}

std::vector<std::pair<int, double>> top_k_from_scores(std::span<const double> scores, int k) {
    if (k <= 0) fail(ErrorKind::invalid_argument, "top_k: k must be positive");
    if (scores.empty()) fail(ErrorKind::invalid_argument, "top_k: empty table");
    if (static_cast<size_t>(k) > scores.size())
        fail(ErrorKind::invalid_argument, "top_k: k exceeds table size");

    std::vector<int> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto better = [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), better);

    std::vector<std::pair<int, double>> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) out.emplace_back(idx[i], scores[idx[i]]);
    return out;
}

std::vector<std::pair<int, double>> top_k_neighbors(const EmbeddingTable& table,
                                                    std::span<const double> query,
                                                    int k) {
    if (table.size() == 0) fail(ErrorKind::invalid_argument, "top_k_neighbors: empty table");
    if (static_cast<int>(query.size()) != table.dim)
        fail(ErrorKind::invalid_argument, "top_k_neighbors: query dimension mismatch");
    double qn = norm2(query);
    if (qn == 0.0) fail(ErrorKind::invalid_argument, "top_k_neighbors: zero query");

    std::vector<double> scores(table.size());
    for (int i = 0; i < table.size(); ++i) {
        auto r = table.row(i);
        double rn = table.normalized ? 1.0 : norm2(r);
        scores[i] = std::clamp(dot(r, query) / (rn * qn), -1.0, 1.0);
    }
    return top_k_from_scores(scores, k);
}

} // namespace wbwt
