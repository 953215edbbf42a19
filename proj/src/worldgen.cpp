#include "storygen/worldgen.hpp"

#include "canonical.hpp"
#include "storygen/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace storygen {

namespace {

using json = nlohmann::json;

constexpr double kF2 = 0.36602540378443864676;  // (sqrt(3) - 1) / 2
constexpr double kG2 = 0.21132486540518711775;  // (3 - sqrt(3)) / 6

constexpr int kGrad[8][2] = {{1, 2}, {-1, 2}, {1, -2}, {-1, -2}, {2, 1}, {-2, 1}, {2, -1}, {-2, -1}};

double corner(int gi, double x, double y) {
    double t = 0.5 - x * x - y * y;
    if (t < 0.0) return 0.0;
    t *= t;
    return t * t * (kGrad[gi][0] * x + kGrad[gi][1] * y);
}

void shuffle_into(PermutationTable& t, SplitMix64& rng) {
    std::array<std::uint8_t, 256> p{};
    std::iota(p.begin(), p.end(), std::uint8_t{0});
    for (std::size_t i = 255; i > 0; --i) {
        std::size_t j = rng.below(i + 1);
        std::swap(p[i], p[j]);
    }
    for (std::size_t i = 0; i < 512; ++i) t.perm[i] = p[i & 255];
}

[[noreturn]] void bad_world(const std::string& msg) { throw Error("world document: " + msg); }

}  // namespace

PermutationTable build_permutation(std::uint64_t seed) {
    PermutationTable t;
    t.seed = seed;
    SplitMix64 rng(seed);
    shuffle_into(t, rng);
    return t;
}

double simplex2(const PermutationTable& t, double x, double y) noexcept {
    const double s = (x + y) * kF2;
    const auto i = static_cast<long long>(std::floor(x + s));
    const auto j = static_cast<long long>(std::floor(y + s));
    const double u = static_cast<double>(i + j) * kG2;
    const double x0 = x - (static_cast<double>(i) - u);
    const double y0 = y - (static_cast<double>(j) - u);

    const int i1 = x0 > y0 ? 1 : 0;
    const int j1 = x0 > y0 ? 0 : 1;

    const double x1 = x0 - i1 + kG2;
    const double y1 = y0 - j1 + kG2;
    const double x2 = x0 - 1.0 + 2.0 * kG2;
    const double y2 = y0 - 1.0 + 2.0 * kG2;

    const auto ii = static_cast<std::size_t>(i & 255);
    const auto jj = static_cast<std::size_t>(j & 255);
    const auto& p = t.perm;
    const int g0 = p[ii + p[jj]] % 8;
    const int g1 = p[ii + i1 + p[jj + j1]] % 8;
    const int g2 = p[ii + 1 + p[jj + 1]] % 8;

    const double n = 70.0 * (corner(g0, x0, y0) + corner(g1, x1, y1) + corner(g2, x2, y2));
    return std::clamp(n, -1.0, 1.0);
}

double normalize(double raw) {
    if (!(raw >= -1.0 && raw <= 1.0)) throw OutOfRange("noise value " + std::to_string(raw) + " outside [-1, 1]");
    return (raw + 1.0) / 2.0;
}

void FeatureTable::validate() const {
    if (bands.empty()) throw ConfigError("feature table has no bands");
    std::vector<std::pair<double, double>> spans;
    for (const auto& b : bands) {
        if (!(b.lo <= b.hi)) throw ConfigError("feature band '" + b.tag + "' has lo > hi");
        if (b.tag.empty() || b.glyph.empty()) throw ConfigError("feature band needs a tag and a glyph");
        spans.emplace_back(b.lo, b.hi);
    }
    std::sort(spans.begin(), spans.end());
    double reach = 0.0;
    if (spans.front().first > 0.0) throw ConfigError("feature table does not cover 0");
    for (const auto& [lo, hi] : spans) {
        if (lo > reach) throw ConfigError("feature table leaves a gap above " + std::to_string(reach));
        reach = std::max(reach, hi);
    }
    if (reach < 1.0) throw ConfigError("feature table does not cover 1");
}

const FeatureBand* FeatureTable::band_for_tag(std::string_view tag) const noexcept {
    for (const auto& b : bands) {
        if (b.tag == tag) return &b;
    }
    return nullptr;
}

FeatureTable default_feature_table() {
    return FeatureTable{{
        {0.35, 0.55, "STREAM", "~"},
        {0.75, 1.00, "SNOW", "*"},
        {0.55, 0.75, "VEGETATION", "\""},
        {0.20, 0.35, "CAVERN", "."},
        {0.00, 0.20, "TUNNEL", "Δ"},
    }};
}

const std::string& classify(double v, const FeatureTable& ft) {
    for (const auto& b : ft.bands) {
        if (b.lo <= v && v <= b.hi) return b.tag;
    }
    throw Uncovered("no feature band contains " + std::to_string(v));
}

std::string_view entity_kind_name(EntityKind k) noexcept { return k == EntityKind::Player ? "PLAYER" : "NPC"; }

const Entity& WorldGrid::player() const {
    for (const auto& e : entities) {
        if (e.kind == EntityKind::Player) return e;
    }
    throw Error("world has no PLAYER entity");
}

WorldGrid generate_world(const WorldParams& params) {
    if (params.width < 1 || params.height < 1) throw ConfigError("world dimensions must be positive");
    const std::size_t cells = static_cast<std::size_t>(params.width) * static_cast<std::size_t>(params.height);
    if (params.npc_count < 0 || static_cast<std::size_t>(params.npc_count) >= cells) {
        throw ConfigError("npc count must be in [0, width*height)");
    }
    if (!std::isfinite(params.noise_scale)) throw ConfigError("noise scale must be finite");
    params.features.validate();

    WorldGrid w;
    w.width = params.width;
    w.height = params.height;
    w.seed = params.seed;
    w.noise_scale = params.noise_scale;
    w.features = params.features;
    w.impassable = params.impassable;

    SplitMix64 rng(params.seed);
    PermutationTable perm;
    perm.seed = params.seed;
    shuffle_into(perm, rng);

    w.values.reserve(cells);
    w.tags.reserve(cells);
    for (int y = 0; y < w.height; ++y) {
        for (int x = 0; x < w.width; ++x) {
            double v = normalize(simplex2(perm, x * w.noise_scale, y * w.noise_scale));
            w.values.push_back(v);
            w.tags.push_back(classify(v, w.features));
        }
    }
    w.room_seeds.reserve(cells);
    for (std::size_t i = 0; i < cells; ++i) w.room_seeds.push_back(rng.next());

    std::vector<std::size_t> passable;
    for (std::size_t i = 0; i < cells; ++i) {
        if (!w.impassable.count(w.tags[i])) passable.push_back(i);
    }
    if (passable.empty()) throw NoPassableCell("every cell is impassable");
    auto place = [&](EntityKind kind, std::size_t cell) {
        w.entities.push_back(Entity{kind, static_cast<int>(cell % w.width), static_cast<int>(cell / w.width)});
    };
    place(EntityKind::Player, passable.front());

    const auto npcs = static_cast<std::size_t>(params.npc_count);
    if (passable.size() - 1 < npcs) {
        throw NoPassableCell("only " + std::to_string(passable.size() - 1) + " free passable cells for " +
                             std::to_string(npcs) + " NPCs");
    }
    for (std::size_t i = 0; i < npcs; ++i) {
        std::size_t j = 1 + i + rng.below(passable.size() - 1 - i);
        std::swap(passable[1 + i], passable[j]);
        place(EntityKind::Npc, passable[1 + i]);
    }
    return w;
}

std::string render_minimap(const WorldGrid& w, const Viewport& view) {
    if (!w.in_bounds(view.cx, view.cy)) throw ConfigError("minimap center outside the world");
    if (view.radius < 0) throw ConfigError("minimap radius must be non-negative");
    std::string out;
    for (int y = view.cy - view.radius; y <= view.cy + view.radius; ++y) {
        if (y != view.cy - view.radius) out += '\n';
        for (int x = view.cx - view.radius; x <= view.cx + view.radius; ++x) {
            if (!w.in_bounds(x, y)) {
                out += ' ';
                continue;
            }
            const Entity* here = nullptr;
            for (const auto& e : w.entities) {
                if (e.x == x && e.y == y && (!here || e.kind == EntityKind::Player)) here = &e;
            }
            if (here) {
                out += here->kind == EntityKind::Player ? '@' : '&';
            } else if (const auto* band = w.features.band_for_tag(w.tag_at(x, y))) {
                out += band->glyph;
            } else {
                out += '?';
            }
        }
    }
    return out;
}

std::string serialize_world(const WorldGrid& w) {
    json doc;
    doc["width"] = w.width;
    doc["height"] = w.height;
    doc["seed"] = w.seed;
    doc["noise_scale"] = detail::round6(w.noise_scale);
    json bands = json::array();
    for (const auto& b : w.features.bands) {
        bands.push_back({{"lo", detail::round6(b.lo)}, {"hi", detail::round6(b.hi)}, {"tag", b.tag}, {"glyph", b.glyph}});
    }
    doc["feature_table"] = std::move(bands);
    doc["impassable"] = w.impassable;
    json values = json::array();
    for (double v : w.values) values.push_back(detail::round6(v));
    doc["values"] = std::move(values);
    doc["tags"] = w.tags;
    json entities = json::array();
    for (const auto& e : w.entities) {
        entities.push_back({{"kind", std::string(entity_kind_name(e.kind))}, {"x", e.x}, {"y", e.y}});
    }
    doc["entities"] = std::move(entities);
    json seeds = json::array();
    for (auto s : w.room_seeds) seeds.push_back(std::to_string(s));
    doc["room_seeds"] = std::move(seeds);
    return doc.dump(1) + "\n";
}

WorldGrid parse_world(std::string_view source) {
    json doc;
    try {
        doc = json::parse(source.begin(), source.end());
    } catch (const json::exception& e) {
        bad_world(e.what());
    }
    WorldGrid w;
    try {
        w.width = doc.at("width").get<int>();
        w.height = doc.at("height").get<int>();
        w.seed = doc.at("seed").get<std::uint64_t>();
        w.noise_scale = doc.value("noise_scale", 0.1);
        for (const auto& b : doc.at("feature_table")) {
            w.features.bands.push_back(FeatureBand{b.at("lo").get<double>(), b.at("hi").get<double>(),
                                                   b.at("tag").get<std::string>(), b.at("glyph").get<std::string>()});
        }
        if (doc.contains("impassable")) w.impassable = doc.at("impassable").get<std::set<std::string>>();
        w.values = doc.at("values").get<std::vector<double>>();
        w.tags = doc.at("tags").get<std::vector<std::string>>();
        for (const auto& e : doc.at("entities")) {
            auto kind = e.at("kind").get<std::string>();
            if (kind != "PLAYER" && kind != "NPC") bad_world("unknown entity kind '" + kind + "'");
            w.entities.push_back(Entity{kind == "PLAYER" ? EntityKind::Player : EntityKind::Npc, e.at("x").get<int>(),
                                        e.at("y").get<int>()});
        }
        for (const auto& s : doc.at("room_seeds")) {
            const auto& text = s.get_ref<const std::string&>();
            std::uint64_t v = 0;
            auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || end != text.data() + text.size()) bad_world("bad room seed '" + text + "'");
            w.room_seeds.push_back(v);
        }
    } catch (const json::exception& e) {
        bad_world(e.what());
    }
    if (w.width < 1 || w.height < 1) bad_world("dimensions must be positive");
    const auto cells = static_cast<std::size_t>(w.width) * static_cast<std::size_t>(w.height);
    if (w.values.size() != cells || w.tags.size() != cells || w.room_seeds.size() != cells) {
        bad_world("value/tag/room_seed arrays must have width*height entries");
    }
    for (double v : w.values) {
        if (!(v >= 0.0 && v <= 1.0)) bad_world("value outside [0, 1]");
    }
    int players = 0;
    for (const auto& e : w.entities) {
        if (!w.in_bounds(e.x, e.y)) bad_world("entity outside the grid");
        players += e.kind == EntityKind::Player;
    }
    if (players != 1) bad_world("expected exactly one PLAYER");
    try {
        w.features.validate();
    } catch (const ConfigError& e) {
        bad_world(e.what());
    }
    return w;
}

}  // namespace storygen
