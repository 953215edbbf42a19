#include "storygen/bundle.hpp"

#include "canonical.hpp"
#include "storygen/rng.hpp"

#include "json.hpp"

#include <filesystem>

namespace storygen {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::map<std::string, std::string> read_tag_documents(const std::string& dir, bool required) {
    std::map<std::string, std::string> docs;
    if (dir.empty()) return docs;
    if (!fs::is_directory(dir)) {
        if (required) throw IoError("'" + dir + "' is not a directory");
        return docs;
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        docs.emplace(entry.path().stem().string(), detail::read_file(entry.path().string()));
    }
    return docs;
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(what + ": " + e.what());
    }
}

}  // namespace

std::map<std::string, std::string> default_display_map() {
    return {
        {"@", "🙂"},
        {"&", "😐"},
        {"~", "🌊"},
        {"*", "❄️"},
        {"\"", "🌿"},
        {".", "🪨"},
        {"Δ", "⛰️"},
    };
}

Bundle make_bundle(WorldGrid world, std::map<std::string, std::string> grammar_documents,
                   std::map<std::string, std::string> archive_documents) {
    Bundle b;
    for (const auto& [tag, text] : grammar_documents) {
        try {
            b.grammars.emplace(tag, parse_grammar(text));
        } catch (const Error& e) {
            throw Error("grammar for " + tag + ": " + e.what());
        }
    }
    for (const auto& [tag, text] : archive_documents) {
        try {
            b.archives.emplace(tag, parse_archive(text));
        } catch (const Error& e) {
            throw Error("archive for " + tag + ": " + e.what());
        }
    }
    for (const auto& tag : world.tags) {
        if (!b.grammars.count(tag)) throw MissingGrammarForTag(tag);
    }
    b.manifest.world_seed = world.seed;
    b.manifest.display_map = default_display_map();
    b.world = std::move(world);
    b.grammar_documents = std::move(grammar_documents);
    b.archive_documents = std::move(archive_documents);
    return b;
}

std::string serialize_bundle(const Bundle& b) {
    json doc;
    doc["manifest"] = {
        {"format_version", b.manifest.format_version},
        {"seeds", {{"world", b.manifest.world_seed}}},
        {"display_map", b.manifest.display_map},
    };
    doc["world"] = parse_json(serialize_world(b.world), "world");
    json grammars = json::object();
    for (const auto& [tag, text] : b.grammar_documents) grammars[tag] = parse_json(text, "grammar " + tag);
    doc["grammars"] = std::move(grammars);
    json archives = json::object();
    for (const auto& [tag, text] : b.archive_documents) archives[tag] = parse_json(text, "archive " + tag);
    doc["archives"] = std::move(archives);
    return doc.dump(1) + "\n";
}

Bundle parse_bundle(std::string_view source) {
    json doc = parse_json(std::string(source), "bundle");
    try {
        const auto& manifest = doc.at("manifest");
        int version = manifest.at("format_version").get<int>();
        if (version != kBundleFormatVersion) {
            throw Error("bundle format_version " + std::to_string(version) + " is not supported");
        }
        std::map<std::string, std::string> grammars, archives;
        for (const auto& [tag, g] : doc.at("grammars").items()) grammars.emplace(tag, g.dump());
        if (doc.contains("archives")) {
            for (const auto& [tag, a] : doc.at("archives").items()) archives.emplace(tag, a.dump());
        }
        Bundle b = make_bundle(parse_world(doc.at("world").dump()), std::move(grammars), std::move(archives));
        b.manifest.format_version = version;
        b.manifest.world_seed = manifest.at("seeds").value("world", b.world.seed);
        if (manifest.contains("display_map")) {
            b.manifest.display_map = manifest.at("display_map").get<std::map<std::string, std::string>>();
        }
        return b;
    } catch (const json::exception& e) {
        throw Error(std::string("bundle: ") + e.what());
    }
}

Bundle export_web(const ExportPaths& paths) {
    WorldGrid world;
    try {
        world = parse_world(detail::read_file(paths.world_file));
    } catch (const Error& e) {
        throw Error(paths.world_file + ": " + e.what());
    }
    Bundle b = make_bundle(std::move(world), read_tag_documents(paths.grammar_dir, true),
                           read_tag_documents(paths.archive_dir, false));

    fs::create_directories(paths.out_dir);
    detail::write_file((fs::path(paths.out_dir) / "bundle.json").string(), serialize_bundle(b));
    if (!paths.assets_dir.empty()) {
        if (!fs::is_directory(paths.assets_dir)) throw IoError("'" + paths.assets_dir + "' is not a directory");
        fs::copy(paths.assets_dir, paths.out_dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    }
    return b;
}

RoomText room_text(const Bundle& b, int x, int y, std::uint64_t reroll) {
    if (!b.world.in_bounds(x, y)) throw ConfigError("room outside the world");
    RoomText out;
    out.tag = b.world.tag_at(x, y);
    const std::uint64_t seed = b.world.room_seed_at(x, y) + reroll;
    const Grammar& g = b.grammars.at(out.tag);

    out.title = g.has_rule(kTitleSymbol) ? expand(g, kTitleSymbol, seed).text : out.tag;
    if (auto it = b.archives.find(out.tag); it != b.archives.end() && !it->second.empty()) {
        out.description = it->second.members()[seed % it->second.size()].text;
    } else {
        out.description = expand(g, kDescriptionSymbol, seed).text;
    }
    return out;
}

std::string fixture_table(const Bundle& b, std::size_t count, std::uint64_t seed) {
    SplitMix64 rng(seed);
    json cells = json::array();
    for (std::size_t i = 0; i < count; ++i) {
        int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(b.world.width)));
        int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(b.world.height)));
        std::uint64_t reroll = i % 4;
        RoomText t = room_text(b, x, y, reroll);
        cells.push_back({{"x", x},
                         {"y", y},
                         {"reroll", reroll},
                         {"room_seed", std::to_string(b.world.room_seed_at(x, y))},
                         {"tag", t.tag},
                         {"title", t.title},
                         {"description", t.description}});
    }
    json doc;
    doc["seed"] = seed;
    doc["cells"] = std::move(cells);
    return doc.dump(1) + "\n";
}

}  // namespace storygen
