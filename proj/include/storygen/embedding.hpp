#pragma once

// Word vectors and the sentence-similarity score used by the novelty metric.

#include "storygen/errors.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace storygen {

using Vector = std::vector<double>;

struct EmbeddingModel {
    std::size_t dim = 0;
    std::map<std::string, Vector> vectors;
    std::string corpus_id;  // optional provenance
    std::string training;   // optional, e.g. "sgns dim=50 window=4 ..."

    const Vector* find(std::string_view token) const;
};

struct TrainConfig {
    std::size_t dim = 50;
    std::size_t window = 4;
    std::size_t epochs = 5;
    std::size_t negative_samples = 5;
    double learning_rate = 0.025;  // decays linearly towards 0.0001 * learning_rate
    std::size_t min_count = 1;
    std::uint64_t seed = 1;

    void validate() const;
};

// Lowercase ASCII; splits on every run of non-alphanumeric bytes.
std::vector<std::string> tokenize(std::string_view text);

// Skip-gram with negative sampling; one sentence per line. Throws EmptyCorpus when
// no line has two tokens. Deterministic for a fixed config.
EmbeddingModel train_embeddings(std::istream& corpus, const TrainConfig& cfg);
EmbeddingModel train_embeddings(const std::vector<std::vector<std::string>>& sentences, const TrainConfig& cfg);

// "<count> <dim>" header, then "token c1 ... c_dim" per line.
EmbeddingModel load_vectors(std::istream& in);
EmbeddingModel load_vectors_text(std::string_view text);
std::string save_vectors(const EmbeddingModel& m);

// Mean of in-vocabulary token vectors (zero vector when none). Tokens are summed
// in sorted order, so the result does not depend on word order.
Vector sentence_vector(const EmbeddingModel& m, std::string_view text);

// Cosine, defined as 0 when either vector is zero; clamped to [-1, 1].
double cosine(const Vector& a, const Vector& b);

// (1 + cosine) / 2 over sentence vectors, in [0, 1].
double similarity(const EmbeddingModel& m, std::string_view a, std::string_view b);
double similarity_of_vectors(const Vector& a, const Vector& b);

}  // namespace storygen
