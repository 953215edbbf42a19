#include "storygen/embedding.hpp"

#include "storygen/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace storygen {

void TrainConfig::validate() const {
    if (dim < 2) throw ConfigError("embedding dim must be >= 2");
    if (window < 1) throw ConfigError("window must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
}

namespace {

double sigmoid(double x) {
    if (x > 6.0) return 1.0;
    if (x < -6.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

class SkipGramTrainer {
public:
    SkipGramTrainer(std::vector<std::vector<std::size_t>> corpus, std::vector<std::uint64_t> counts,
                    const TrainConfig& cfg)
        : corpus_(std::move(corpus)), cfg_(cfg), rng_(cfg.seed), vocab_(counts.size()) {
        double total = 0.0;
        cumulative_.reserve(vocab_);
        for (auto c : counts) {
            total += std::pow(static_cast<double>(c), 0.75);
            cumulative_.push_back(total);
        }
        center_.resize(vocab_ * cfg.dim);
        for (double& w : center_) w = (rng_.next_double() - 0.5) / static_cast<double>(cfg.dim);
        context_.assign(vocab_ * cfg.dim, 0.0);
        for (const auto& s : corpus_) tokens_ += s.size();
    }

    void run() {
        const double total_steps = static_cast<double>(cfg_.epochs * tokens_);
        std::size_t step = 0;
        for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
            for (const auto& sentence : corpus_) {
                for (std::size_t pos = 0; pos < sentence.size(); ++pos, ++step) {
                    double lr = cfg_.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(step) / total_steps);
                    // Shrunk window, as in the reference word2vec.
                    std::size_t reach = cfg_.window - rng_.below(cfg_.window);
                    std::size_t lo = pos >= reach ? pos - reach : 0;
                    std::size_t hi = std::min(sentence.size() - 1, pos + reach);
                    for (std::size_t c = lo; c <= hi; ++c) {
                        if (c != pos) train_pair(sentence[pos], sentence[c], lr);
                    }
                }
            }
        }
    }

    Vector center_vector(std::size_t word) const {
        auto first = center_.begin() + static_cast<std::ptrdiff_t>(word * cfg_.dim);
        return Vector(first, first + static_cast<std::ptrdiff_t>(cfg_.dim));
    }

private:
    std::size_t sample_negative() {
        double u = rng_.next_double() * cumulative_.back();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), vocab_ - 1);
    }

    void train_pair(std::size_t center, std::size_t context, double lr) {
        const std::size_t dim = cfg_.dim;
        double* h = &center_[center * dim];
        grad_.assign(dim, 0.0);
        for (std::size_t n = 0; n <= cfg_.negative_samples; ++n) {
            std::size_t target = context;
            double label = 1.0;
            if (n > 0) {
                target = sample_negative();
                if (target == context) continue;
                label = 0.0;
            }
            double* out = &context_[target * dim];
            double f = 0.0;
            for (std::size_t d = 0; d < dim; ++d) f += h[d] * out[d];
            double g = (label - sigmoid(f)) * lr;
            for (std::size_t d = 0; d < dim; ++d) {
                grad_[d] += g * out[d];
                out[d] += g * h[d];
            }
        }
        for (std::size_t d = 0; d < dim; ++d) h[d] += grad_[d];
    }

    std::vector<std::vector<std::size_t>> corpus_;
    const TrainConfig& cfg_;
    SplitMix64 rng_;
    std::size_t vocab_;
    std::size_t tokens_ = 0;
    std::vector<double> cumulative_;
    std::vector<double> center_;
    std::vector<double> context_;
    std::vector<double> grad_;
};

}  // namespace

EmbeddingModel train_embeddings(const std::vector<std::vector<std::string>>& sentences, const TrainConfig& cfg) {
    cfg.validate();
    std::unordered_map<std::string, std::uint64_t> freq;
    for (const auto& s : sentences) {
        for (const auto& t : s) ++freq[t];
    }
    std::vector<std::pair<std::string, std::uint64_t>> vocab;
    for (auto& [t, c] : freq) {
        if (c >= cfg.min_count) vocab.emplace_back(t, c);
    }
    std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::unordered_map<std::string, std::size_t> ids;
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        ids.emplace(vocab[i].first, i);
        counts.push_back(vocab[i].second);
    }

    std::vector<std::vector<std::size_t>> corpus;
    for (const auto& s : sentences) {
        std::vector<std::size_t> encoded;
        for (const auto& t : s) {
            if (auto it = ids.find(t); it != ids.end()) encoded.push_back(it->second);
        }
        if (encoded.size() >= 2) corpus.push_back(std::move(encoded));
    }
    if (corpus.empty()) throw EmptyCorpus("corpus has no sentence with at least two (frequent enough) tokens");

    SkipGramTrainer trainer(std::move(corpus), counts, cfg);
    trainer.run();

    EmbeddingModel m;
    m.dim = cfg.dim;
    for (std::size_t i = 0; i < vocab.size(); ++i) m.vectors.emplace(vocab[i].first, trainer.center_vector(i));
    m.training = "sgns dim=" + std::to_string(cfg.dim) + " window=" + std::to_string(cfg.window) +
                 " epochs=" + std::to_string(cfg.epochs) + " negative=" + std::to_string(cfg.negative_samples) +
                 " min_count=" + std::to_string(cfg.min_count) + " seed=" + std::to_string(cfg.seed);
    return m;
}

EmbeddingModel train_embeddings(std::istream& corpus, const TrainConfig& cfg) {
    std::vector<std::vector<std::string>> sentences;
    std::string line;
    while (std::getline(corpus, line)) {
        auto tokens = tokenize(line);
        if (!tokens.empty()) sentences.push_back(std::move(tokens));
    }
    return train_embeddings(sentences, cfg);
}

}  // namespace storygen
