#pragma once

// Grammatical evolution driven by novelty search. Genomes decode through a
// grammar into storylets; the novelty of a storylet is its mean dissimilarity
// (1 - similarity) to its k nearest neighbours in population + archive, and the
// archive keeps every feasible, previously unseen storylet whose novelty reaches
// the threshold rho.

#include "storygen/embedding.hpp"
#include "storygen/grammar.hpp"
#include "storygen/rng.hpp"

#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace storygen {

struct Individual {
    Genome genome;
    std::optional<Storylet> storylet;  // empty after InvalidMapping
    bool feasible = false;
    std::optional<double> novelty;     // set by evaluation; 0 for infeasible/invalid
};

struct ArchiveMember {
    std::string text;
    TagSet tags;
    double novelty = 0.0;
    int generation = 0;
    bool operator==(const ArchiveMember&) const = default;
};

class NoveltyArchive {
public:
    explicit NoveltyArchive(double rho = 0.30);

    double rho() const noexcept { return rho_; }
    const std::vector<ArchiveMember>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    bool contains(const std::string& text) const { return texts_.count(text) != 0; }

    // Inserted iff the individual is feasible, has novelty >= rho and its text is new.
    bool try_insert(const Individual& ind, int generation);

    // For documents read back from disk; enforces the same soundness rules.
    void restore(ArchiveMember member);

    bool operator==(const NoveltyArchive& o) const { return rho_ == o.rho_ && members_ == o.members_; }

private:
    double rho_;
    std::vector<ArchiveMember> members_;
    std::unordered_set<std::string> texts_;
};

inline bool try_archive_insert(NoveltyArchive& archive, const Individual& ind, int generation = 0) {
    return archive.try_insert(ind, generation);
}

// Sparseness of population[candidate] against every other population member
// with a storylet plus every archive member. Returns 1 when there is nobody to
// compare with. Throws Unevaluated if the candidate has no storylet.
double novelty_score(std::size_t candidate, std::span<const Individual> population, const NoveltyArchive& archive,
                     std::size_t k, const EmbeddingModel& model);

// Same, for a candidate that is not part of `population`.
double novelty_score(const Individual& candidate, std::span<const Individual> population,
                     const NoveltyArchive& archive, std::size_t k, const EmbeddingModel& model);

// Mean similarity over all unordered pairs (1 = no diversity). Throws TooFew for < 2.
double population_diversity(std::span<const std::string> storylets, const EmbeddingModel& model);

Genome random_genome(std::size_t length, SplitMix64& rng);
Genome mutate(const Genome& g, double rate, SplitMix64& rng);
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, SplitMix64& rng);
// Children are a[0,cut)+b[cut,n) and b[0,cut)+a[cut,n); cut in [1, n-1].
std::pair<Genome, Genome> crossover_at(const Genome& a, const Genome& b, std::size_t cut);

struct EvolutionConfig {
    std::size_t population_size = 100;
    int generations = 50;
    std::size_t k_neighbors = 15;
    double rho = 0.30;
    double mutation_rate = 0.05;
    double crossover_rate = 0.9;
    std::size_t tournament_size = 3;
    std::size_t genome_length = 64;
    std::string room_tag;
    std::string symbol = "origin";
    std::uint64_t seed = 0;
    ExpansionLimits limits;

    // Throws ConfigError on any violated invariant.
    void validate() const;
};

struct GenerationStats {
    int generation = 0;
    double best_novelty = 0.0;
    double mean_novelty = 0.0;
    std::optional<double> diversity;  // absent when fewer than two storylets decoded
    std::size_t archive_size = 0;
    std::size_t feasible = 0;
    bool operator==(const GenerationStats&) const = default;
};

struct EvolutionResult {
    NoveltyArchive archive;
    std::vector<GenerationStats> telemetry;
    std::vector<std::string> warnings;  // e.g. generations with no feasible individual
};

EvolutionResult evolve(const Grammar& g, const EvolutionConfig& cfg, const EmbeddingModel& model,
                       const CompatTable& compat);

// Copy of base whose target_symbol alternatives are the archive texts (as
// literals carrying their tags), in archive order. Throws EmptyArchive.
Grammar export_augmented_grammar(const Grammar& base, const NoveltyArchive& archive, const std::string& target_symbol);

// Archive document (JSON) and telemetry (CSV).
std::string serialize_archive(const NoveltyArchive& archive, const EvolutionConfig* cfg = nullptr);
NoveltyArchive parse_archive(std::string_view source);
std::string telemetry_csv(const std::vector<GenerationStats>& telemetry);

}  // namespace storygen
