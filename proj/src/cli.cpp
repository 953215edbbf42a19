#include "storygen/cli.hpp"

#include "canonical.hpp"
#include "storygen/bundle.hpp"
#include "storygen/embedding.hpp"
#include "storygen/grammar.hpp"
#include "storygen/novelty.hpp"
#include "storygen/worldgen.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <functional>
#include <ostream>

namespace storygen::cli {

namespace {

using detail::read_file;
using detail::write_file;

// Re-raises domain errors from reading/parsing `path` with the path as context.
template <typename Fn>
auto from_file(const std::string& path, Fn&& fn) -> decltype(fn(std::string{})) {
    try {
        return fn(read_file(path));
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

Grammar load_grammar(const std::string& path) {
    return from_file(path, [](const std::string& text) { return parse_grammar(text); });
}

struct WorldgenArgs {
    std::uint64_t seed = 0;
    int width = 16;
    int height = 16;
    int npcs = 3;
    double scale = 0.1;
    std::vector<std::string> impassable;
    std::string out;
};

struct TrainArgs {
    std::string corpus;
    std::string out;
    TrainConfig cfg;
};

struct GenerateArgs {
    std::string grammar;
    std::string symbol = "origin";
    std::uint64_t seed = 0;
    bool tags = false;
};

struct EvolveArgs {
    std::string grammar;
    std::string vectors;
    std::string compat;
    std::string out;
    std::string telemetry;
    EvolutionConfig cfg;
};

struct AugmentArgs {
    std::string grammar;
    std::string archive;
    std::string symbol = "storylet";
    std::string out;
};

struct MinimapArgs {
    std::string world;
    std::optional<int> cx;
    std::optional<int> cy;
    int radius = 5;
};

struct FixturesArgs {
    std::string bundle;
    std::size_t count = 25;
    std::uint64_t seed = 0;
    std::string out;
};

struct RoomArgs {
    std::string bundle;
    int x = 0;
    int y = 0;
    std::uint64_t reroll = 0;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grammar-driven storylet generation with novelty-search grammatical evolution", "storygen"};
    app.require_subcommand(1);

    WorldgenArgs wg;
    auto* worldgen = app.add_subcommand("worldgen", "Generate a simplex-noise world document");
    worldgen->add_option("--seed", wg.seed, "World seed")->required();
    worldgen->add_option("--width", wg.width, "Grid width")->capture_default_str();
    worldgen->add_option("--height", wg.height, "Grid height")->capture_default_str();
    worldgen->add_option("--npcs", wg.npcs, "Number of NPCs")->capture_default_str();
    worldgen->add_option("--scale", wg.scale, "Noise sampling scale")->capture_default_str();
    worldgen->add_option("--impassable", wg.impassable, "Tags the player cannot enter");
    worldgen->add_option("--out", wg.out, "Output world file")->required();

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Train skip-gram word vectors on a corpus");
    train->add_option("--corpus", tr.corpus, "Corpus file, one sentence per line")->required();
    train->add_option("--dim", tr.cfg.dim, "Vector dimension")->capture_default_str();
    train->add_option("--window", tr.cfg.window, "Context window")->capture_default_str();
    train->add_option("--epochs", tr.cfg.epochs, "Training epochs")->capture_default_str();
    train->add_option("--negative", tr.cfg.negative_samples, "Negative samples per pair")->capture_default_str();
    train->add_option("--lr", tr.cfg.learning_rate, "Initial learning rate")->capture_default_str();
    train->add_option("--min-count", tr.cfg.min_count, "Minimum token frequency")->capture_default_str();
    train->add_option("--seed", tr.cfg.seed, "Training seed")->capture_default_str();
    train->add_option("--out", tr.out, "Output vector file")->required();

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Expand a grammar symbol with a seed");
    generate->add_option("--grammar", gen.grammar, "Grammar file")->required();
    generate->add_option("--symbol", gen.symbol, "Start symbol")->capture_default_str();
    generate->add_option("--seed", gen.seed, "Expansion seed")->required();
    generate->add_flag("--tags", gen.tags, "Also print the collected tags");

    EvolveArgs ev;
    auto* evolve_cmd = app.add_subcommand("evolve", "Run novelty-search grammatical evolution");
    evolve_cmd->add_option("--grammar", ev.grammar, "Grammar file")->required();
    evolve_cmd->add_option("--vectors", ev.vectors, "Word vector file")->required();
    evolve_cmd->add_option("--tag", ev.cfg.room_tag, "Room tag used for feasibility")->required();
    evolve_cmd->add_option("--pop", ev.cfg.population_size, "Population size")->capture_default_str();
    evolve_cmd->add_option("--gens", ev.cfg.generations, "Generations")->capture_default_str();
    evolve_cmd->add_option("--k", ev.cfg.k_neighbors, "Nearest neighbours in the novelty score")->capture_default_str();
    evolve_cmd->add_option("--rho", ev.cfg.rho, "Archive novelty threshold")->capture_default_str();
    evolve_cmd->add_option("--seed", ev.cfg.seed, "Evolution seed")->required();
    evolve_cmd->add_option("--symbol", ev.cfg.symbol, "Start symbol")->capture_default_str();
    evolve_cmd->add_option("--genome-length", ev.cfg.genome_length, "Codons per genome")->capture_default_str();
    evolve_cmd->add_option("--mutation", ev.cfg.mutation_rate, "Per-codon mutation rate")->capture_default_str();
    evolve_cmd->add_option("--crossover", ev.cfg.crossover_rate, "Crossover rate")->capture_default_str();
    evolve_cmd->add_option("--tournament", ev.cfg.tournament_size, "Tournament size")->capture_default_str();
    evolve_cmd->add_option("--compat", ev.compat, "Tag compatibility table (JSON)");
    evolve_cmd->add_option("--out", ev.out, "Output archive file")->required();
    evolve_cmd->add_option("--telemetry", ev.telemetry, "Per-generation CSV");

    AugmentArgs au;
    auto* augment = app.add_subcommand("augment", "Fold an archive back into a grammar");
    augment->add_option("--grammar", au.grammar, "Base grammar file")->required();
    augment->add_option("--archive", au.archive, "Archive file")->required();
    augment->add_option("--symbol", au.symbol, "Rule receiving the archive texts")->capture_default_str();
    augment->add_option("--out", au.out, "Output grammar file")->required();

    MinimapArgs mm;
    auto* minimap = app.add_subcommand("minimap", "Print the text minimap around a cell");
    minimap->add_option("--world", mm.world, "World file")->required();
    minimap->add_option("--cx", mm.cx, "Viewport centre x (default: player)");
    minimap->add_option("--cy", mm.cy, "Viewport centre y (default: player)");
    minimap->add_option("--radius", mm.radius, "Viewport radius")->capture_default_str();

    ExportPaths ex;
    auto* export_cmd = app.add_subcommand("export-web", "Write bundle.json for the browser explorer");
    export_cmd->add_option("--world", ex.world_file, "World file")->required();
    export_cmd->add_option("--grammars", ex.grammar_dir, "Directory of <TAG>.json grammars")->required();
    export_cmd->add_option("--archives", ex.archive_dir, "Directory of <TAG>.json archives")->required();
    export_cmd->add_option("--out", ex.out_dir, "Output directory")->required();
    export_cmd->add_option("--assets", ex.assets_dir, "Explorer assets to copy alongside");

    FixturesArgs fx;
    auto* fixtures = app.add_subcommand("fixtures", "Write the room-text parity table for a bundle");
    fixtures->add_option("--bundle", fx.bundle, "bundle.json")->required();
    fixtures->add_option("--count", fx.count, "Cells to sample")->capture_default_str();
    fixtures->add_option("--seed", fx.seed, "Sampling seed")->required();
    fixtures->add_option("--out", fx.out, "Output file (default: stdout)");

    RoomArgs rm;
    auto* room = app.add_subcommand("room-text", "Print the title and description of one room");
    room->add_option("--bundle", rm.bundle, "bundle.json")->required();
    room->add_option("--x", rm.x, "Cell x")->required();
    room->add_option("--y", rm.y, "Cell y")->required();
    room->add_option("--reroll", rm.reroll, "Reroll counter")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return 2;
    }

    try {
        if (worldgen->parsed()) {
            WorldParams p;
            p.seed = wg.seed;
            p.width = wg.width;
            p.height = wg.height;
            p.npc_count = wg.npcs;
            p.noise_scale = wg.scale;
            p.impassable = {wg.impassable.begin(), wg.impassable.end()};
            write_file(wg.out, serialize_world(generate_world(p)));
        } else if (train->parsed()) {
            std::ifstream corpus(tr.corpus);
            if (!corpus) throw IoError("cannot open '" + tr.corpus + "' for reading");
            EmbeddingModel m = train_embeddings(corpus, tr.cfg);
            write_file(tr.out, save_vectors(m));
        } else if (generate->parsed()) {
            Grammar g = load_grammar(gen.grammar);
            Storylet s = expand(g, gen.symbol, gen.seed);
            out << s.text << "\n";
            if (gen.tags) {
                for (const auto& t : s.tags) out << "@" << t << "\n";
            }
        } else if (evolve_cmd->parsed()) {
            ev.cfg.validate();
            Grammar g = load_grammar(ev.grammar);
            EmbeddingModel model = from_file(ev.vectors, [](const std::string& t) { return load_vectors_text(t); });
            CompatTable compat = ev.compat.empty()
                                     ? default_compat_table()
                                     : from_file(ev.compat, [](const std::string& t) { return parse_compat_table(t); });
            EvolutionResult r = evolve(g, ev.cfg, model, compat);
            for (const auto& w : r.warnings) err << "warning: " << w << "\n";
            write_file(ev.out, serialize_archive(r.archive, &ev.cfg));
            if (!ev.telemetry.empty()) write_file(ev.telemetry, telemetry_csv(r.telemetry));
        } else if (augment->parsed()) {
            Grammar g = load_grammar(au.grammar);
            NoveltyArchive archive = from_file(au.archive, [](const std::string& t) { return parse_archive(t); });
            write_file(au.out, serialize_grammar(export_augmented_grammar(g, archive, au.symbol)));
        } else if (minimap->parsed()) {
            WorldGrid w = from_file(mm.world, [](const std::string& t) { return parse_world(t); });
            const Entity& player = w.player();
            out << render_minimap(w, Viewport{mm.cx.value_or(player.x), mm.cy.value_or(player.y), mm.radius}) << "\n";
        } else if (export_cmd->parsed()) {
            export_web(ex);
        } else if (fixtures->parsed()) {
            Bundle b = from_file(fx.bundle, [](const std::string& t) { return parse_bundle(t); });
            std::string table = fixture_table(b, fx.count, fx.seed);
            if (fx.out.empty()) {
                out << table;
            } else {
                write_file(fx.out, table);
            }
        } else if (room->parsed()) {
            Bundle b = from_file(rm.bundle, [](const std::string& t) { return parse_bundle(t); });
            RoomText t = room_text(b, rm.x, rm.y, rm.reroll);
            out << t.title << "\n" << t.description << "\n";
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace storygen::cli
