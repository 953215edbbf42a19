#pragma once

// 2-D simplex-noise world: normalized noise values, per-cell environment tags,
// entity placement, per-room seeds and a text minimap.

#include "storygen/errors.hpp"

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace storygen {

struct PermutationTable {
    std::array<std::uint8_t, 512> perm{};
    std::uint64_t seed = 0;
};

// Fisher-Yates shuffle of 0..255 driven by SplitMix64(seed), doubled to 512 entries.
PermutationTable build_permutation(std::uint64_t seed);

// Standard 2-D simplex noise, clamped to [-1, 1].
double simplex2(const PermutationTable& t, double x, double y) noexcept;

// (raw + 1) / 2. Throws OutOfRange for raw outside [-1, 1] (or NaN).
double normalize(double raw);

struct FeatureBand {
    double lo = 0.0;
    double hi = 0.0;
    std::string tag;
    std::string glyph;  // one display character, UTF-8
    bool operator==(const FeatureBand&) const = default;
};

// Closed bands matched first-to-last; the first band containing a value wins.
struct FeatureTable {
    std::vector<FeatureBand> bands;

    // Throws ConfigError unless every band has lo <= hi and the bands cover [0, 1].
    void validate() const;
    const FeatureBand* band_for_tag(std::string_view tag) const noexcept;
    bool operator==(const FeatureTable&) const = default;
};

// STREAM [0.35,0.55] is listed first so shared endpoints resolve to it; the remaining
// order (SNOW, VEGETATION, CAVERN, TUNNEL) makes each lower edge win, which yields
// TUNNEL [0,0.2), CAVERN [0.2,0.35), STREAM [0.35,0.55], VEGETATION (0.55,0.75), SNOW [0.75,1].
FeatureTable default_feature_table();

// Throws Uncovered if no band contains v.
const std::string& classify(double v, const FeatureTable& ft);

enum class EntityKind { Player, Npc };

std::string_view entity_kind_name(EntityKind k) noexcept;

struct Entity {
    EntityKind kind = EntityKind::Npc;
    int x = 0;
    int y = 0;
    bool operator==(const Entity&) const = default;
};

struct WorldParams {
    std::uint64_t seed = 0;
    int width = 16;
    int height = 16;
    int npc_count = 0;
    double noise_scale = 0.1;
    FeatureTable features = default_feature_table();
    std::set<std::string> impassable;
};

struct WorldGrid {
    int width = 0;
    int height = 0;
    std::uint64_t seed = 0;
    double noise_scale = 0.1;
    FeatureTable features;
    std::set<std::string> impassable;
    std::vector<double> values;               // row-major, index y * width + x
    std::vector<std::string> tags;            // row-major
    std::vector<Entity> entities;             // PLAYER first
    std::vector<std::uint64_t> room_seeds;    // row-major

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    bool in_bounds(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width && y < height; }
    double value_at(int x, int y) const { return values.at(index(x, y)); }
    const std::string& tag_at(int x, int y) const { return tags.at(index(x, y)); }
    std::uint64_t room_seed_at(int x, int y) const { return room_seeds.at(index(x, y)); }
    const Entity& player() const;
    bool operator==(const WorldGrid&) const = default;
};

// Deterministic in params. One SplitMix64(seed) stream supplies, in order, the
// permutation shuffle, the row-major room seeds and the NPC placement.
WorldGrid generate_world(const WorldParams& params);

struct Viewport {
    int cx = 0;
    int cy = 0;
    int radius = 0;
};

// (2*radius+1) lines joined by '\n' (no trailing newline). Cells outside the
// world render as a space; PLAYER "@" and NPC "&" override terrain glyphs.
std::string render_minimap(const WorldGrid& w, const Viewport& view);

// World document (JSON, canonical). Room seeds are written as decimal strings so
// that JavaScript consumers keep all 64 bits.
std::string serialize_world(const WorldGrid& w);
WorldGrid parse_world(std::string_view source);

}  // namespace storygen
