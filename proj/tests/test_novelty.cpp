#include "doctest.h"

#include "storygen/novelty.hpp"

#include "../src/canonical.hpp"

#include <algorithm>
#include <cmath>

using namespace storygen;

namespace {

EmbeddingModel two_d() {
    EmbeddingModel m;
    m.dim = 2;
    m.vectors = {{"a", {1, 0}}, {"b", {0, 1}}, {"c", {-1, 0}}};
    return m;
}

Individual evaluated(std::string text, double novelty = 0.0, TagSet tags = {}, bool feasible = true) {
    Individual ind;
    ind.genome = Genome{{0, 0}};
    ind.storylet = Storylet{std::move(text), std::move(tags), {}};
    ind.feasible = feasible;
    ind.novelty = novelty;
    return ind;
}

// All-pairs reference for the novelty score.
double naive_novelty(std::size_t candidate, const std::vector<Individual>& pop, const NoveltyArchive& archive,
                     std::size_t k, const EmbeddingModel& m) {
    std::vector<double> d;
    const std::string& text = pop[candidate].storylet->text;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (i != candidate && pop[i].storylet) d.push_back(1.0 - similarity(m, text, pop[i].storylet->text));
    }
    for (const auto& member : archive.members()) d.push_back(1.0 - similarity(m, text, member.text));
    if (d.empty()) return 1.0;
    std::sort(d.begin(), d.end());
    std::size_t n = std::min(k, d.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += d[i];
    return sum / static_cast<double>(n);
}

double naive_diversity(const std::vector<std::string>& texts, const EmbeddingModel& m) {
    double sum = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        for (std::size_t j = 0; j < texts.size(); ++j) {
            if (i < j) {
                sum += similarity(m, texts[i], texts[j]);
                ++pairs;
            }
        }
    }
    return sum / pairs;
}

Grammar toy24() { return parse_grammar(detail::read_file(STORYGEN_TEST_DATA "/toy24.json")); }
EmbeddingModel toy24_vectors() { return load_vectors_text(detail::read_file(STORYGEN_TEST_DATA "/toy24.vec")); }

EvolutionConfig small_config(std::uint64_t seed) {
    EvolutionConfig cfg;
    cfg.population_size = 30;
    cfg.generations = 12;
    cfg.k_neighbors = 5;
    cfg.rho = 0.2;
    cfg.genome_length = 16;
    cfg.room_tag = "STREAM";
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("novelty-evolver") {

TEST_CASE("novelty_score examples") {
    EmbeddingModel m = two_d();
    NoveltyArchive empty(0.3);

    std::vector<Individual> same = {evaluated("a b"), evaluated("a b"), evaluated("a b")};
    for (std::size_t i = 0; i < same.size(); ++i) CHECK(novelty_score(i, same, empty, 2, m) == 0.0);

    std::vector<Individual> pair = {evaluated("a"), evaluated("b")};
    CHECK(novelty_score(0, pair, empty, 1, m) == 0.5);
    CHECK(novelty_score(1, pair, empty, 3, m) == 0.5);

    std::vector<Individual> sole = {evaluated("a")};
    CHECK(novelty_score(0, sole, empty, 5, m) == 1.0);

    Individual blank;
    blank.genome = Genome{{1, 2}};
    CHECK_THROWS_AS(novelty_score(blank, sole, empty, 1, m), Unevaluated);

    // An exact duplicate of an archive member has a zero-distance neighbour.
    NoveltyArchive archive(0.3);
    REQUIRE(archive.try_insert(evaluated("c", 0.9), 0));
    CHECK(novelty_score(evaluated("c"), std::span<const Individual>{}, archive, 1, m) == 0.0);
    CHECK(novelty_score(evaluated("a"), std::span<const Individual>{}, archive, 1, m) == 1.0);
}

TEST_CASE("novelty_score matches the all-pairs oracle") {
    EmbeddingModel m = load_vectors_text(detail::read_file(STORYGEN_TEST_DATA "/fixed.vec"));
    std::vector<std::string> vocab;
    for (const auto& [t, v] : m.vectors) vocab.push_back(t);
    SplitMix64 rng(77);
    auto sentence = [&] {
        std::string s;
        for (std::uint64_t i = 0, n = 1 + rng.below(4); i < n; ++i) s += vocab[rng.below(vocab.size())] + " ";
        return s;
    };
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Individual> pop;
        for (std::uint64_t i = 0, n = 1 + rng.below(20); i < n; ++i) {
            if (rng.below(10) == 0) {
                pop.push_back(Individual{Genome{{1, 1}}, std::nullopt, false, 0.0});
            } else {
                pop.push_back(evaluated(sentence()));
            }
        }
        NoveltyArchive archive(0.0);
        for (std::uint64_t i = 0, n = rng.below(6); i < n; ++i) archive.try_insert(evaluated(sentence(), 0.5), 0);
        std::size_t k = 1 + rng.below(12);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (!pop[i].storylet) continue;
            double fast = novelty_score(i, pop, archive, k, m);
            CHECK(std::abs(fast - naive_novelty(i, pop, archive, k, m)) <= 1e-12);
            CHECK(fast >= 0.0);
            CHECK(fast <= 1.0);
        }
    }
}

TEST_CASE("population_diversity") {
    EmbeddingModel m = two_d();
    std::vector<std::string> same = {"a b", "a b", "b a"};
    CHECK(population_diversity(same, m) == 1.0);
    std::vector<std::string> opposite = {"a", "c"};
    CHECK(population_diversity(opposite, m) == 0.0);

    std::vector<std::string> three = {"a", "b", "a b"};
    double expected = naive_diversity(three, m);
    CHECK(expected == doctest::Approx(0.7357).epsilon(1e-4));
    CHECK(population_diversity(three, m) == doctest::Approx(expected).epsilon(1e-15));
    // Hand value: s = (1 + 1/sqrt(2)) / 2, mean of {0.5, s, s}.
    double s = (1.0 + 1.0 / std::sqrt(2.0)) / 2.0;
    CHECK(population_diversity(three, m) == doctest::Approx((0.5 + 2 * s) / 3.0).epsilon(1e-12));

    std::vector<std::string> one = {"a"};
    CHECK_THROWS_AS(population_diversity(one, m), TooFew);
}

TEST_CASE("mutate") {
    SplitMix64 seed_rng(1);
    Genome g = random_genome(64, seed_rng);

    SplitMix64 r0(5);
    CHECK(mutate(g, 0.0, r0) == g);

    SplitMix64 r1(5);
    Genome all = mutate(g, 1.0, r1);
    REQUIRE(all.codons.size() == 64);
    int changed = 0;
    for (std::size_t i = 0; i < 64; ++i) changed += all.codons[i] != g.codons[i];
    CHECK(changed >= 60);

    for (double rate : {0.0, 0.05, 0.5, 1.0}) {
        SplitMix64 a(9), b(9);
        Genome x = mutate(g, rate, a);
        CHECK(x.codons.size() == 64);
        CHECK(x == mutate(g, rate, b));
    }
    SplitMix64 r2(5);
    CHECK_THROWS_AS(mutate(g, 1.5, r2), ConfigError);
}

TEST_CASE("crossover") {
    auto [x, y] = crossover_at(Genome{{1, 1, 1, 1}}, Genome{{2, 2, 2, 2}}, 2);
    CHECK(x == Genome{{1, 1, 2, 2}});
    CHECK(y == Genome{{2, 2, 1, 1}});

    SplitMix64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t len = 2 + rng.below(20);
        Genome a = random_genome(len, rng);
        Genome b = random_genome(len, rng);
        auto [c, d] = crossover(a, b, rng);
        CHECK(c.codons.size() == len);
        CHECK(d.codons.size() == len);
        std::vector<std::uint32_t> parents = a.codons, kids = c.codons;
        parents.insert(parents.end(), b.codons.begin(), b.codons.end());
        kids.insert(kids.end(), d.codons.begin(), d.codons.end());
        std::sort(parents.begin(), parents.end());
        std::sort(kids.begin(), kids.end());
        CHECK(parents == kids);
        // The cut is strictly inside: both children start like a/b and end like b/a.
        CHECK(c.codons.front() == a.codons.front());
        CHECK(c.codons.back() == b.codons.back());
    }
    CHECK_THROWS_AS(crossover(Genome{{1, 2, 3}}, Genome{{1, 2}}, rng), LengthMismatch);
    CHECK_THROWS_AS(crossover(Genome{{1}}, Genome{{2}}, rng), LengthMismatch);
}

TEST_CASE("try_archive_insert") {
    NoveltyArchive archive(0.30);
    CHECK(try_archive_insert(archive, evaluated("new text", 0.31)));
    CHECK_FALSE(try_archive_insert(archive, evaluated("other text", 0.29)));
    CHECK_FALSE(try_archive_insert(archive, evaluated("new text", 0.9)));
    CHECK(try_archive_insert(archive, evaluated("boundary", 0.30)));
    CHECK_FALSE(try_archive_insert(archive, evaluated("infeasible", 0.9, {}, false)));
    Individual invalid{Genome{{1, 2}}, std::nullopt, false, 0.0};
    CHECK_FALSE(try_archive_insert(archive, invalid));
    CHECK(archive.size() == 2);
    CHECK_THROWS_AS(NoveltyArchive(1.01), ConfigError);
}

TEST_CASE("evolve: determinism, soundness and monotone growth") {
    Grammar g = toy24();
    EmbeddingModel m = toy24_vectors();
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        EvolutionConfig cfg = small_config(seed);
        EvolutionResult a = evolve(g, cfg, m, default_compat_table());
        EvolutionResult b = evolve(g, cfg, m, default_compat_table());
        CHECK(a.archive == b.archive);
        CHECK(a.telemetry == b.telemetry);
        CHECK(a.telemetry.size() == 12);

        std::set<std::string> texts;
        for (const auto& member : a.archive.members()) {
            CHECK(member.novelty >= cfg.rho);
            texts.insert(member.text);
        }
        CHECK(texts.size() == a.archive.size());
        for (std::size_t i = 1; i < a.telemetry.size(); ++i) {
            CHECK(a.telemetry[i].archive_size >= a.telemetry[i - 1].archive_size);
            CHECK(a.telemetry[i].best_novelty <= 1.0);
            CHECK(a.telemetry[i].mean_novelty <= a.telemetry[i].best_novelty);
        }
        CHECK(a.telemetry.back().archive_size == a.archive.size());
    }
}

TEST_CASE("evolved archive is at least as spread as random derivations") {
    Grammar g = toy24();
    EmbeddingModel m = toy24_vectors();
    auto spread = [&](const std::vector<std::string>& texts) {
        double sum = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            for (std::size_t j = i + 1; j < texts.size(); ++j) {
                sum += 1.0 - similarity(m, texts[i], texts[j]);
                ++pairs;
            }
        }
        return pairs ? sum / pairs : 0.0;
    };
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        EvolutionConfig cfg = small_config(seed);
        cfg.population_size = 50;
        cfg.generations = 20;
        cfg.k_neighbors = 10;
        cfg.genome_length = 64;
        EvolutionResult r = evolve(g, cfg, m, default_compat_table());
        std::vector<std::string> evolved;
        for (const auto& member : r.archive.members()) evolved.push_back(member.text);
        // Baseline: 24 derivations from uniformly random genomes.
        SplitMix64 rng(seed + 500);
        std::vector<std::string> sampled;
        for (int i = 0; i < 24; ++i) sampled.push_back(decode(g, "origin", random_genome(64, rng)).text);
        wins += evolved.size() >= 2 && spread(evolved) >= spread(sampled);
    }
    CHECK(wins >= 8);
}

TEST_CASE("evolve: single-text grammar and infeasible grammars") {
    EmbeddingModel m = toy24_vectors();
    Grammar one = parse_grammar(R"({"origin":["quiet #c#"], "c":["crab"]})");
    EvolutionConfig cfg = small_config(4);
    cfg.rho = 0.0;
    CHECK(evolve(one, cfg, m, default_compat_table()).archive.size() <= 1);

    Grammar snowy = parse_grammar(R"({"origin":["ancient owl@SNOW", "quiet eel sings@SNOW"]})");
    EvolutionResult r = evolve(snowy, small_config(4), m, default_compat_table());
    CHECK(r.archive.empty());
    CHECK(r.warnings.size() == 12);
    for (const auto& t : r.telemetry) CHECK(t.best_novelty == 0.0);

    Grammar lava = parse_grammar(R"({"origin":["hot@LAVA"]})");
    CHECK_THROWS_AS(evolve(lava, small_config(4), m, default_compat_table()), UnknownTag);

    // Runaway recursion decodes to InvalidMapping and is simply infeasible.
    Grammar loop = parse_grammar(R"({"origin":["#origin#"]})");
    EvolutionResult lr = evolve(loop, small_config(4), m, default_compat_table());
    CHECK(lr.archive.empty());
    CHECK_FALSE(lr.telemetry.front().diversity.has_value());
}

TEST_CASE("EvolutionConfig validation") {
    Grammar g = toy24();
    EmbeddingModel m = toy24_vectors();
    auto with = [&](auto edit) {
        EvolutionConfig cfg = small_config(1);
        edit(cfg);
        return cfg;
    };
    CHECK_THROWS_AS(evolve(g, with([](auto& c) { c.rho = 1.01; }), m, {}), ConfigError);
    CHECK_THROWS_AS(evolve(g, with([](auto& c) { c.rho = -0.1; }), m, {}), ConfigError);
    CHECK_THROWS_AS(evolve(g, with([](auto& c) { c.k_neighbors = 0; }), m, {}), ConfigError);
    CHECK_THROWS_AS(evolve(g, with([](auto& c) { c.population_size = 1; }), m, {}), ConfigError);
    CHECK_THROWS_AS(evolve(g, with([](auto& c) { c.genome_length = 1; }), m, {}), ConfigError);
    CHECK_THROWS_AS(evolve(g, with([](auto& c) { c.symbol = "nope"; }), m, {}), Error);
}

TEST_CASE("export_augmented_grammar") {
    Grammar base = toy24();
    NoveltyArchive archive(0.2);
    const std::vector<std::string> texts = {"quiet crab waits", "hungry owl sings", "ancient eel waits",
                                            "restless crab sings", "odd #text# @ [x]"};
    for (const auto& t : texts) REQUIRE(archive.try_insert(evaluated(t, 0.5, {"STREAM"}), 1));

    Grammar out = export_augmented_grammar(base, archive, "storylet");
    CHECK(base == toy24());
    CHECK(out.rules.size() == base.rules.size() + 1);
    REQUIRE(out.rules.at("storylet").size() == 5);
    CHECK(out.rules.at("storylet")[0].tags == TagSet{"STREAM"});
    CHECK(export_augmented_grammar(base, archive, "storylet") == out);

    Grammar back = parse_grammar(serialize_grammar(out));
    CHECK(back == out);
    for (std::size_t i = 0; i < texts.size(); ++i) {
        Grammar single = back;
        single.rules["origin"] = {Alternative{{SymbolRef{"storylet", {}}}, {}}};
        Genome pick{{0, static_cast<std::uint32_t>(i)}};
        CHECK(decode(single, "origin", pick).text == texts[i]);
    }

    Grammar replaced = export_augmented_grammar(base, archive, "mood");
    CHECK(replaced.rules.at("mood").size() == 5);
    CHECK_THROWS_AS(export_augmented_grammar(base, NoveltyArchive(0.2), "storylet"), EmptyArchive);
}

TEST_CASE("archive document and telemetry") {
    EvolutionConfig cfg = small_config(8);
    EvolutionResult r = evolve(toy24(), cfg, toy24_vectors(), default_compat_table());
    REQUIRE_FALSE(r.archive.empty());
    std::string doc = serialize_archive(r.archive, &cfg);
    NoveltyArchive back = parse_archive(doc);
    CHECK(back.size() == r.archive.size());
    CHECK(back.rho() == cfg.rho);
    CHECK(serialize_archive(back, &cfg) == doc);
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back.members()[i].text == r.archive.members()[i].text);
        CHECK(back.members()[i].novelty == doctest::Approx(r.archive.members()[i].novelty).epsilon(1e-6));
    }
    CHECK_THROWS_AS(parse_archive(R"({"rho":0.5,"members":[{"text":"x","novelty":0.1}]})"), Error);
    CHECK_THROWS_AS(parse_archive(R"({"rho":0.1,"members":[{"text":"x","novelty":0.2},{"text":"x","novelty":0.3}]})"),
                    Error);

    std::string csv = telemetry_csv(r.telemetry);
    CHECK(csv.rfind("generation,best_novelty,mean_novelty,diversity,archive_size\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

}  // TEST_SUITE
