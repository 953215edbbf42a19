#pragma once

// The static web bundle: world + one grammar per room tag + optional novelty
// archives per tag, plus a manifest the explorer validates on load.

#include "storygen/grammar.hpp"
#include "storygen/novelty.hpp"
#include "storygen/worldgen.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace storygen {

inline constexpr int kBundleFormatVersion = 1;

// Symbols the explorer expands: a room's title and its description.
inline constexpr const char* kTitleSymbol = "title";
inline constexpr const char* kDescriptionSymbol = "origin";

struct Manifest {
    int format_version = kBundleFormatVersion;
    std::uint64_t world_seed = 0;
    std::map<std::string, std::string> display_map;  // glyph -> emoji
};

std::map<std::string, std::string> default_display_map();

struct Bundle {
    WorldGrid world;
    std::map<std::string, std::string> grammar_documents;  // tag -> grammar JSON text
    std::map<std::string, std::string> archive_documents;  // tag -> archive JSON text
    std::map<std::string, Grammar> grammars;
    std::map<std::string, NoveltyArchive> archives;
    Manifest manifest;
};

// Validates every document; throws MissingGrammarForTag when a world tag has no grammar.
Bundle make_bundle(WorldGrid world, std::map<std::string, std::string> grammar_documents,
                   std::map<std::string, std::string> archive_documents);

// One canonical JSON document (sorted keys, 6-decimal reals).
std::string serialize_bundle(const Bundle& b);
Bundle parse_bundle(std::string_view source);

struct ExportPaths {
    std::string world_file;
    std::string grammar_dir;   // <TAG>.json per room tag
    std::string archive_dir;   // optional <TAG>.json per room tag; may be empty
    std::string out_dir;
    std::string assets_dir;    // optional explorer assets copied next to bundle.json
};

// Writes out_dir/bundle.json (and the assets, if any). Returns the bundle written.
Bundle export_web(const ExportPaths& paths);

struct RoomText {
    std::string tag;
    std::string title;
    std::string description;
};

// Room seed + reroll (mod 2^64) picks archive[seed mod size] when the tag has a
// non-empty archive, otherwise seeds the description expansion. The title comes
// from the tag grammar's "title" rule with the same seed, or is the tag itself.
RoomText room_text(const Bundle& b, int x, int y, std::uint64_t reroll = 0);

// Parity table for the explorer: `count` seeded cells, reroll = index mod 4.
std::string fixture_table(const Bundle& b, std::size_t count, std::uint64_t seed);

}  // namespace storygen
