#pragma once

#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace wbwt {

// Frequency-ranked word list plus one d-dimensional vector per word, loaded
// from word2vec-style text ("<count> <dim>" header, then "<word> v1 .. vd"
// per line; load order is frequency rank). Immutable after construction and
// safe to share across threads.
struct EmbeddingTable {
    std::vector<std::string> words;
    std::vector<double> data;  // row-major, size() == words.size() * dim
    int dim = 0;
    bool normalized = false;

    int size() const { return static_cast<int>(words.size()); }

    std::span<const double> row(int i) const {
        return {data.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
    }

    // Rank of a word, or -1 if absent.
    int find(const std::string& word) const {
        auto it = index_.find(word);
        return it == index_.end() ? -1 : it->second;
    }

    // Rank of a word; errors on unknown words (callers that want copy-through
    // semantics must check find() first).
    int at(const std::string& word) const;

    void rebuild_index();

private:
    std::unordered_map<std::string, int> index_;
};

EmbeddingTable load_embeddings(std::istream& in);
EmbeddingTable load_embeddings_file(const std::string& path);

// Scales every row to unit Euclidean norm and sets the normalized flag.
void normalize(EmbeddingTable& table);

// u . v / (|u| |v|), clamped to [-1, 1]. Errors on dimension mismatch or a
// zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

// Exact top-k rows of a normalized table by cosine to the query, descending;
// ties go to the lower (more frequent) index.
std::vector<std::pair<int, double>> top_k_neighbors(const EmbeddingTable& table,
                                                    std::span<const double> query,
                                                    int k);

// Exact top-k over a precomputed score vector, same contract.
std::vector<std::pair<int, double>> top_k_from_scores(std::span<const double> scores, int k);

} // namespace wbwt
