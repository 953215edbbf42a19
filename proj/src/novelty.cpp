#include "storygen/novelty.hpp"

#include "canonical.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace storygen {

namespace {

using json = nlohmann::json;

// Mean of the k smallest dissimilarities between `candidate` and `others`.
double sparseness(const Vector& candidate, const std::vector<const Vector*>& others, std::size_t k) {
    if (others.empty()) return 1.0;
    std::vector<double> dist;
    dist.reserve(others.size());
    for (const Vector* o : others) dist.push_back(1.0 - similarity_of_vectors(candidate, *o));
    const std::size_t n = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(n), dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += dist[i];
    return std::clamp(sum / static_cast<double>(n), 0.0, 1.0);
}

double score_against(const Individual& candidate, std::span<const Individual> population, std::size_t skip,
                     const NoveltyArchive& archive, std::size_t k, const EmbeddingModel& model) {
    if (!candidate.storylet) throw Unevaluated("candidate has no decoded storylet");
    if (k == 0) throw ConfigError("k must be >= 1");
    std::vector<Vector> vectors;
    vectors.reserve(population.size() + archive.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (i != skip && population[i].storylet) vectors.push_back(sentence_vector(model, population[i].storylet->text));
    }
    for (const auto& m : archive.members()) vectors.push_back(sentence_vector(model, m.text));
    std::vector<const Vector*> others;
    for (const auto& v : vectors) others.push_back(&v);
    return sparseness(sentence_vector(model, candidate.storylet->text), others, k);
}

std::size_t tournament(const std::vector<Individual>& pop, std::size_t size, SplitMix64& rng) {
    std::size_t best = rng.below(pop.size());
    for (std::size_t i = 1; i < size; ++i) {
        std::size_t c = rng.below(pop.size());
        if (pop[c].novelty.value_or(0.0) > pop[best].novelty.value_or(0.0)) best = c;
    }
    return best;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

NoveltyArchive::NoveltyArchive(double rho) : rho_(rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
}

bool NoveltyArchive::try_insert(const Individual& ind, int generation) {
    if (!ind.feasible || !ind.storylet || !ind.novelty) return false;
    if (*ind.novelty < rho_ || contains(ind.storylet->text)) return false;
    members_.push_back(ArchiveMember{ind.storylet->text, ind.storylet->tags, *ind.novelty, generation});
    texts_.insert(ind.storylet->text);
    return true;
}

void NoveltyArchive::restore(ArchiveMember member) {
    if (member.novelty < rho_) throw Error("archive member below rho: '" + member.text + "'");
    if (contains(member.text)) throw Error("duplicate archive member: '" + member.text + "'");
    texts_.insert(member.text);
    members_.push_back(std::move(member));
}

double novelty_score(std::size_t candidate, std::span<const Individual> population, const NoveltyArchive& archive,
                     std::size_t k, const EmbeddingModel& model) {
    if (candidate >= population.size()) throw Error("candidate index out of range");
    return score_against(population[candidate], population, candidate, archive, k, model);
}

double novelty_score(const Individual& candidate, std::span<const Individual> population,
                     const NoveltyArchive& archive, std::size_t k, const EmbeddingModel& model) {
    return score_against(candidate, population, population.size(), archive, k, model);
}

double population_diversity(std::span<const std::string> storylets, const EmbeddingModel& model) {
    if (storylets.size() < 2) throw TooFew("diversity needs at least two storylets");
    std::vector<Vector> vectors;
    for (const auto& s : storylets) vectors.push_back(sentence_vector(model, s));
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            sum += similarity_of_vectors(vectors[i], vectors[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

Genome random_genome(std::size_t length, SplitMix64& rng) {
    Genome g;
    g.codons.reserve(length);
    for (std::size_t i = 0; i < length; ++i) g.codons.push_back(static_cast<std::uint32_t>(rng.next()));
    return g;
}

Genome mutate(const Genome& g, double rate, SplitMix64& rng) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("mutation rate must lie in [0, 1]");
    Genome out = g;
    for (auto& c : out.codons) {
        if (rng.next_double() < rate) c = static_cast<std::uint32_t>(rng.next());
    }
    return out;
}

std::pair<Genome, Genome> crossover_at(const Genome& a, const Genome& b, std::size_t cut) {
    if (a.codons.size() != b.codons.size()) throw LengthMismatch("crossover parents differ in length");
    if (a.codons.size() < 2) throw LengthMismatch("crossover needs genomes of length >= 2");
    if (cut < 1 || cut >= a.codons.size()) throw ConfigError("crossover cut outside [1, len-1]");
    Genome x = a, y = b;
    std::swap_ranges(x.codons.begin() + static_cast<std::ptrdiff_t>(cut), x.codons.end(),
                     y.codons.begin() + static_cast<std::ptrdiff_t>(cut));
    return {std::move(x), std::move(y)};
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, SplitMix64& rng) {
    if (a.codons.size() != b.codons.size()) throw LengthMismatch("crossover parents differ in length");
    if (a.codons.size() < 2) throw LengthMismatch("crossover needs genomes of length >= 2");
    return crossover_at(a, b, 1 + rng.below(a.codons.size() - 1));
}

void EvolutionConfig::validate() const {
    if (population_size < 2) throw ConfigError("population size must be >= 2");
    if (generations < 1) throw ConfigError("generations must be >= 1");
    if (k_neighbors < 1) throw ConfigError("k must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigError("mutation rate must lie in [0, 1]");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConfigError("crossover rate must lie in [0, 1]");
    if (tournament_size < 1) throw ConfigError("tournament size must be >= 1");
    if (genome_length < 2) throw ConfigError("genome length must be >= 2");
    if (limits.max_depth < 1 || limits.max_wraps < 0) throw ConfigError("invalid expansion limits");
}

EvolutionResult evolve(const Grammar& g, const EvolutionConfig& cfg, const EmbeddingModel& model,
                       const CompatTable& compat) {
    cfg.validate();
    if (!g.has_rule(cfg.symbol)) throw Error("grammar has no rule '" + cfg.symbol + "'");
    if (auto missing = dangling_symbols(g); !missing.empty()) throw DanglingSymbol(std::move(missing));

    EvolutionResult result{NoveltyArchive(cfg.rho), {}, {}};
    SplitMix64 rng(cfg.seed);
    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    for (std::size_t i = 0; i < cfg.population_size; ++i) pop.push_back({random_genome(cfg.genome_length, rng), {}, false, {}});

    std::vector<Vector> archive_vectors;
    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Vector> vectors(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) {
            auto& ind = pop[i];
            try {
                ind.storylet = decode(g, cfg.symbol, ind.genome, cfg.limits);
                ind.feasible = check_feasibility(*ind.storylet, cfg.room_tag, compat);
                vectors[i] = sentence_vector(model, ind.storylet->text);
            } catch (const InvalidMapping&) {
                ind.storylet.reset();
                ind.feasible = false;
            }
        }

        GenerationStats stats;
        stats.generation = gen;
        std::vector<std::string> texts;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            auto& ind = pop[i];
            if (!ind.storylet) {
                ind.novelty = 0.0;
                continue;
            }
            texts.push_back(ind.storylet->text);
            if (!ind.feasible) {
                ind.novelty = 0.0;
                continue;
            }
            ++stats.feasible;
            std::vector<const Vector*> others;
            for (std::size_t j = 0; j < pop.size(); ++j) {
                if (j != i && pop[j].storylet) others.push_back(&vectors[j]);
            }
            for (const auto& v : archive_vectors) others.push_back(&v);
            ind.novelty = sparseness(vectors[i], others, cfg.k_neighbors);
        }
        if (stats.feasible == 0) {
            result.warnings.push_back("generation " + std::to_string(gen) + ": no feasible individuals");
        }

        // Serialized insertion after every score in the generation is known.
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (result.archive.try_insert(pop[i], gen)) archive_vectors.push_back(vectors[i]);
        }

        double sum = 0.0;
        for (const auto& ind : pop) {
            stats.best_novelty = std::max(stats.best_novelty, *ind.novelty);
            sum += *ind.novelty;
        }
        stats.mean_novelty = sum / static_cast<double>(pop.size());
        if (texts.size() >= 2) stats.diversity = population_diversity(texts, model);
        stats.archive_size = result.archive.size();
        result.telemetry.push_back(stats);

        if (gen + 1 == cfg.generations) break;
        std::vector<Individual> next;
        next.reserve(cfg.population_size);
        while (next.size() < cfg.population_size) {
            const Genome& a = pop[tournament(pop, cfg.tournament_size, rng)].genome;
            const Genome& b = pop[tournament(pop, cfg.tournament_size, rng)].genome;
            std::pair<Genome, Genome> kids = rng.next_double() < cfg.crossover_rate ? crossover(a, b, rng)
                                                                                    : std::make_pair(a, b);
            next.push_back({mutate(kids.first, cfg.mutation_rate, rng), {}, false, {}});
            if (next.size() < cfg.population_size) {
                next.push_back({mutate(kids.second, cfg.mutation_rate, rng), {}, false, {}});
            }
        }
        pop = std::move(next);
    }
    return result;
}

Grammar export_augmented_grammar(const Grammar& base, const NoveltyArchive& archive, const std::string& target_symbol) {
    if (archive.empty()) throw EmptyArchive("cannot export an empty archive");
    if (!is_valid_symbol_name(target_symbol)) throw ConfigError("invalid symbol name '" + target_symbol + "'");
    Grammar out = base;
    auto& alts = out.rules[target_symbol];
    alts.clear();
    for (const auto& m : archive.members()) {
        Alternative alt;
        if (!m.text.empty()) alt.parts.emplace_back(Literal{m.text});
        alt.tags = m.tags;
        alts.push_back(std::move(alt));
    }
    return out;
}

std::string serialize_archive(const NoveltyArchive& archive, const EvolutionConfig* cfg) {
    json doc;
    doc["rho"] = detail::round6(archive.rho());
    if (cfg) {
        doc["config"] = {
            {"population_size", cfg->population_size},
            {"generations", cfg->generations},
            {"k_neighbors", cfg->k_neighbors},
            {"rho", detail::round6(cfg->rho)},
            {"mutation_rate", detail::round6(cfg->mutation_rate)},
            {"crossover_rate", detail::round6(cfg->crossover_rate)},
            {"tournament_size", cfg->tournament_size},
            {"genome_length", cfg->genome_length},
            {"room_tag", cfg->room_tag},
            {"symbol", cfg->symbol},
            {"seed", cfg->seed},
            {"max_depth", cfg->limits.max_depth},
            {"max_wraps", cfg->limits.max_wraps},
        };
    }
    json members = json::array();
    for (const auto& m : archive.members()) {
        members.push_back({{"text", m.text}, {"tags", m.tags}, {"novelty", detail::round6(m.novelty)},
                           {"generation", m.generation}});
    }
    doc["members"] = std::move(members);
    return doc.dump(2) + "\n";
}

NoveltyArchive parse_archive(std::string_view source) {
    try {
        json doc = json::parse(source.begin(), source.end());
        NoveltyArchive archive(doc.at("rho").get<double>());
        for (const auto& m : doc.at("members")) {
            archive.restore(ArchiveMember{m.at("text").get<std::string>(), m.value("tags", TagSet{}),
                                          m.at("novelty").get<double>(), m.value("generation", 0)});
        }
        return archive;
    } catch (const json::exception& e) {
        throw Error(std::string("archive document: ") + e.what());
    }
}

std::string telemetry_csv(const std::vector<GenerationStats>& telemetry) {
    std::string out = "generation,best_novelty,mean_novelty,diversity,archive_size\n";
    for (const auto& s : telemetry) {
        out += std::to_string(s.generation) + "," + fixed6(s.best_novelty) + "," + fixed6(s.mean_novelty) + "," +
               (s.diversity ? fixed6(*s.diversity) : std::string()) + "," + std::to_string(s.archive_size) + "\n";
    }
    return out;
}

}  // namespace storygen
