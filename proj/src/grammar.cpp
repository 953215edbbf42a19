#include "storygen/grammar.hpp"

#include "storygen/rng.hpp"

#include <cctype>

namespace storygen {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_vowel(char c) {
    switch (lower(c)) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    default: return false;
    }
}

bool is_consonant(char c) { return std::isalpha(static_cast<unsigned char>(c)) && !is_vowel(c); }

bool ends_with_ci(std::string_view text, std::string_view suffix) {
    if (text.size() < suffix.size()) return false;
    auto tail = text.substr(text.size() - suffix.size());
    for (std::size_t i = 0; i < suffix.size(); ++i) {
        if (lower(tail[i]) != suffix[i]) return false;
    }
    return true;
}

// Consonant + 'y' ending ("city", "carry").
bool consonant_y(std::string_view t) {
    return t.size() >= 2 && lower(t.back()) == 'y' && is_consonant(t[t.size() - 2]);
}

// Source of alternative indices for one derivation.
class ChoiceSource {
public:
    virtual ~ChoiceSource() = default;
    virtual std::size_t choose(const std::string& symbol, std::size_t n) = 0;
};

class SeededChoices final : public ChoiceSource {
public:
    explicit SeededChoices(std::uint64_t seed) : rng_(seed) {}
    std::size_t choose(const std::string&, std::size_t n) override { return rng_.below(n); }

private:
    SplitMix64 rng_;
};

class CodonChoices final : public ChoiceSource {
public:
    CodonChoices(const Genome& genome, int max_wraps) : codons_(genome.codons), max_wraps_(max_wraps) {}

    std::size_t choose(const std::string&, std::size_t n) override {
        if (cursor_ == codons_.size()) {
            if (++wraps_ > max_wraps_) throw InvalidMapping("genome exhausted after " + std::to_string(max_wraps_) + " wraps");
            cursor_ = 0;
        }
        return codons_[cursor_++] % n;
    }

private:
    const std::vector<std::uint32_t>& codons_;
    int max_wraps_;
    int wraps_ = 0;
    std::size_t cursor_ = 0;
};

class ForcedChoices final : public ChoiceSource {
public:
    explicit ForcedChoices(std::span<const Choice> choices) : choices_(choices) {}

    std::size_t choose(const std::string& symbol, std::size_t n) override {
        if (next_ >= choices_.size()) throw Error("replay ran out of recorded choices at '" + symbol + "'");
        const auto& c = choices_[next_++];
        if (c.symbol != symbol || c.alternative >= n) {
            throw Error("recorded choice (" + c.symbol + ", " + std::to_string(c.alternative) +
                        ") does not fit symbol '" + symbol + "'");
        }
        return c.alternative;
    }

    bool exhausted() const { return next_ == choices_.size(); }

private:
    std::span<const Choice> choices_;
    std::size_t next_ = 0;
};

class Derivation {
public:
    Derivation(const Grammar& g, ChoiceSource& source, const ExpansionLimits& limits)
        : grammar_(g), source_(source), limits_(limits) {}

    Storylet run(std::string_view symbol) {
        std::string start(symbol);
        if (!grammar_.has_rule(start)) throw Error("grammar has no rule '" + start + "'");
        out_.text = expand_symbol(start, 1);
        return std::move(out_);
    }

private:
    std::string expand_ref(const SymbolRef& ref, int depth) {
        std::string text;
        if (auto it = bindings_.find(ref.name); it != bindings_.end()) {
            text = it->second;
        } else {
            text = expand_symbol(ref.name, depth + 1);
        }
        for (auto m : ref.modifiers) text = apply_modifier(text, m);
        return text;
    }

    std::string expand_symbol(const std::string& name, int depth) {
        if (depth > limits_.max_depth) {
            throw DepthExceeded("derivation deeper than " + std::to_string(limits_.max_depth) + " at '" + name + "'");
        }
        auto it = grammar_.rules.find(name);
        if (it == grammar_.rules.end()) throw DanglingSymbol({name});
        const auto& alts = it->second;
        std::size_t index = source_.choose(name, alts.size());
        out_.derivation_choices.push_back(Choice{name, index});
        const Alternative& alt = alts[index];
        out_.tags.insert(alt.tags.begin(), alt.tags.end());

        std::string text;
        for (const auto& part : alt.parts) {
            if (auto* lit = std::get_if<Literal>(&part)) {
                text += lit->text;
            } else if (auto* ref = std::get_if<SymbolRef>(&part)) {
                text += expand_ref(*ref, depth);
            } else {
                const auto& b = std::get<Binding>(part);
                bindings_[b.name] = expand_ref(b.inner, depth);
            }
        }
        return text;
    }

    const Grammar& grammar_;
    ChoiceSource& source_;
    const ExpansionLimits& limits_;
    std::map<std::string, std::string> bindings_;
    Storylet out_;
};

}  // namespace

std::string_view modifier_name(Modifier m) noexcept {
    switch (m) {
    case Modifier::Article: return "a";
    case Modifier::Capitalize: return "capitalize";
    case Modifier::Plural: return "s";
    case Modifier::Past: return "ed";
    }
    return "?";
}

std::string apply_modifier(std::string_view text, Modifier m) {
    if (text.empty()) throw EmptyInput("modifier '" + std::string(modifier_name(m)) + "' applied to empty text");
    std::string out(text);
    switch (m) {
    case Modifier::Article:
        return (is_vowel(text.front()) ? "an " : "a ") + out;
    case Modifier::Capitalize:
        out.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(out.front())));
        return out;
    case Modifier::Plural:
        if (consonant_y(text)) {
            out.pop_back();
            return out + "ies";
        }
        if (ends_with_ci(text, "s") || ends_with_ci(text, "x") || ends_with_ci(text, "z") ||
            ends_with_ci(text, "ch") || ends_with_ci(text, "sh")) {
            return out + "es";
        }
        return out + "s";
    case Modifier::Past:
        if (lower(text.back()) == 'e') return out + "d";
        if (consonant_y(text)) {
            out.pop_back();
            return out + "ied";
        }
        return out + "ed";
    }
    return out;
}

Storylet expand(const Grammar& g, std::string_view symbol, std::uint64_t seed, const ExpansionLimits& limits) {
    SeededChoices source(seed);
    return Derivation(g, source, limits).run(symbol);
}

Storylet decode(const Grammar& g, std::string_view symbol, const Genome& genome, const ExpansionLimits& limits) {
    if (genome.codons.empty()) throw InvalidMapping("empty genome");
    CodonChoices source(genome, limits.max_wraps);
    try {
        return Derivation(g, source, limits).run(symbol);
    } catch (const DepthExceeded& e) {
        throw InvalidMapping(e.what());
    }
}

Storylet replay(const Grammar& g, std::string_view symbol, std::span<const Choice> choices,
                const ExpansionLimits& limits) {
    ForcedChoices source(choices);
    Storylet s = Derivation(g, source, limits).run(symbol);
    if (!source.exhausted()) throw Error("replay left recorded choices unused");
    return s;
}

CompatTable default_compat_table() {
    return {
        {"TUNNEL", {"TUNNEL", "CAVERN"}},
        {"CAVERN", {"CAVERN", "TUNNEL"}},
        {"STREAM", {"STREAM", "CAVERN", "VEGETATION"}},
        {"VEGETATION", {"VEGETATION", "STREAM"}},
        {"SNOW", {"SNOW"}},
    };
}

bool check_feasibility(const Storylet& s, std::string_view room_tag, const CompatTable& compat) {
    bool ok = true;
    for (const auto& tag : s.tags) {
        auto it = compat.find(tag);
        if (it == compat.end()) throw UnknownTag(tag);
        if (!it->second.count(std::string(room_tag))) ok = false;
    }
    return ok;
}

}  // namespace storygen
