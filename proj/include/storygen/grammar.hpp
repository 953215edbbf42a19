#pragma once

// Tracery-style grammar engine.
//
// A grammar maps rule names to ordered lists of alternatives. Alternatives are
// strings mixing literal text with `#symbol.mod1.mod2#` references and
// `[name:#symbol#]` bindings, optionally followed by an `@TAG1,TAG2` suffix that
// attaches feasibility tags to that alternative.
//
// Derivations are depth-first and left-to-right. Every rule expansion is one
// choice point; a binding reference (a name introduced by `[name:...]`) reuses
// the frozen text and is not a choice point.

#include "storygen/errors.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace storygen {

enum class Modifier { Article, Capitalize, Plural, Past };

std::string_view modifier_name(Modifier m) noexcept;

// Throws EmptyInput on empty text. Regular English rules only; irregular
// plurals/past forms are the grammar author's job.
std::string apply_modifier(std::string_view text, Modifier m);

struct Literal {
    std::string text;
    bool operator==(const Literal&) const = default;
};

struct SymbolRef {
    std::string name;
    std::vector<Modifier> modifiers;
    bool operator==(const SymbolRef&) const = default;
};

struct Binding {
    std::string name;
    SymbolRef inner;
    bool operator==(const Binding&) const = default;
};

using Part = std::variant<Literal, SymbolRef, Binding>;

struct Alternative {
    std::vector<Part> parts;
    std::set<std::string> tags;
    bool operator==(const Alternative&) const = default;
};

using TagSet = std::set<std::string>;

struct Grammar {
    std::map<std::string, std::vector<Alternative>> rules;
    std::string start_symbol = "origin";

    bool has_rule(std::string_view name) const { return rules.find(std::string(name)) != rules.end(); }
    bool operator==(const Grammar&) const = default;
};

struct Choice {
    std::string symbol;
    std::size_t alternative = 0;
    auto operator<=>(const Choice&) const = default;
};

struct Storylet {
    std::string text;
    TagSet tags;
    std::vector<Choice> derivation_choices;
    bool operator==(const Storylet&) const = default;
};

// Codon genome for grammatical-evolution decoding.
struct Genome {
    std::vector<std::uint32_t> codons;
    bool operator==(const Genome&) const = default;
};

struct ExpansionLimits {
    int max_depth = 32;
    int max_wraps = 3;
};

// ---- parsing / serialization -----------------------------------------------

// Parses a single alternative string. `rule` and `index` only feed error positions.
Alternative parse_alternative(std::string_view source, std::string_view rule = {}, std::size_t index = 0);

// Inverse of parse_alternative: parse_alternative(render_alternative(a)) == a.
std::string render_alternative(const Alternative& alt);

// Parses a JSON grammar document. Throws ParseError for malformed documents or
// alternatives, DanglingSymbol (listing every unresolved name) when references
// resolve neither to a rule nor to any binding name in the grammar.
Grammar parse_grammar(std::string_view source);

// Canonical JSON document (sorted rule names, two-space indent).
std::string serialize_grammar(const Grammar& g);

// Names referenced anywhere in g that resolve neither to a rule nor to a binding.
std::vector<std::string> dangling_symbols(const Grammar& g);

bool is_valid_symbol_name(std::string_view name) noexcept;

// ---- derivation --------------------------------------------------------------

// Seeded random expansion. Each choice point draws one SplitMix64 value and takes
// it modulo the alternative count. Throws DepthExceeded on runaway recursion.
Storylet expand(const Grammar& g, std::string_view symbol, std::uint64_t seed,
                const ExpansionLimits& limits = {});

// Grammatical-evolution decoding: choice point i takes codon (cursor mod n) and
// advances the cursor, wrapping to codon 0 at most limits.max_wraps times.
// Throws InvalidMapping when wraps run out or the depth limit trips.
Storylet decode(const Grammar& g, std::string_view symbol, const Genome& genome,
                const ExpansionLimits& limits = {});

// Re-runs a derivation with its choices forced. Throws Error if the recorded
// choices do not fit the grammar.
Storylet replay(const Grammar& g, std::string_view symbol, std::span<const Choice> choices,
                const ExpansionLimits& limits = {});

// ---- feasibility -------------------------------------------------------------

// Storylet tag -> room tags it may appear under.
using CompatTable = std::map<std::string, std::set<std::string>>;

CompatTable default_compat_table();
CompatTable parse_compat_table(std::string_view json_source);

// True iff every storylet tag admits room_tag. Throws UnknownTag for tags the
// table does not list.
bool check_feasibility(const Storylet& s, std::string_view room_tag, const CompatTable& compat);

}  // namespace storygen
