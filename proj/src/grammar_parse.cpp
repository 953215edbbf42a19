#include "storygen/grammar.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace storygen {

namespace {

using json = nlohmann::json;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_tag_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Splits "A,B_2" into tags; empty result means the text is not a tag list.
std::set<std::string> parse_tag_list(std::string_view text) {
    std::set<std::string> tags;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view tag = text.substr(start, comma - start);
        if (tag.empty() || !std::all_of(tag.begin(), tag.end(), is_tag_char)) return {};
        tags.emplace(tag);
        start = comma + 1;
    }
    return tags;
}

std::optional<Modifier> modifier_from(std::string_view name) {
    if (name == "a") return Modifier::Article;
    if (name == "capitalize") return Modifier::Capitalize;
    if (name == "s") return Modifier::Plural;
    if (name == "ed") return Modifier::Past;
    return std::nullopt;
}

class AlternativeParser {
public:
    AlternativeParser(std::string_view src, std::string_view rule, std::size_t index)
        : src_(src), rule_(rule), index_(index) {}

    Alternative parse() {
        Alternative alt;
        std::size_t body_end = split_tags(alt.tags);
        std::string literal;
        std::size_t i = 0;
        auto flush = [&] {
            if (!literal.empty()) alt.parts.emplace_back(Literal{std::move(literal)});
            literal.clear();
        };
        while (i < body_end) {
            char c = src_[i];
            if (c == '\\') {
                if (i + 1 >= body_end) fail(i, "dangling escape at end of alternative");
                literal += src_[i + 1];
                i += 2;
            } else if (c == '#') {
                flush();
                std::size_t close = src_.find('#', i + 1);
                if (close == std::string_view::npos || close >= body_end) fail(i, "unterminated '#' reference");
                alt.parts.emplace_back(parse_ref(src_.substr(i + 1, close - i - 1), i + 1));
                i = close + 1;
            } else if (c == '[') {
                flush();
                i = parse_binding(i, body_end, alt);
            } else if (c == ']') {
                fail(i, "unmatched ']'");
            } else {
                literal += c;
                ++i;
            }
        }
        flush();
        return alt;
    }

private:
    [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
        throw ParseError(SourcePosition{std::string(rule_), index_, offset}, msg);
    }

    // Finds a trailing unescaped "@TAGS" suffix. Returns the end of the body.
    std::size_t split_tags(std::set<std::string>& tags) const {
        std::size_t last_at = std::string_view::npos;
        for (std::size_t i = 0; i < src_.size(); ++i) {
            if (src_[i] == '\\') {
                ++i;
            } else if (src_[i] == '@') {
                last_at = i;
            }
        }
        if (last_at == std::string_view::npos) return src_.size();
        auto parsed = parse_tag_list(src_.substr(last_at + 1));
        if (parsed.empty()) return src_.size();
        tags = std::move(parsed);
        return last_at;
    }

    SymbolRef parse_ref(std::string_view body, std::size_t offset) const {
        SymbolRef ref;
        std::size_t dot = body.find('.');
        ref.name = std::string(body.substr(0, dot));
        if (!is_valid_symbol_name(ref.name)) fail(offset, "invalid symbol name '" + ref.name + "'");
        while (dot != std::string_view::npos) {
            std::size_t next = body.find('.', dot + 1);
            std::string_view mod = body.substr(dot + 1, next == std::string_view::npos ? next : next - dot - 1);
            auto m = modifier_from(mod);
            if (!m) fail(offset + dot + 1, "unsupported modifier '" + std::string(mod) + "'");
            ref.modifiers.push_back(*m);
            dot = next;
        }
        return ref;
    }

    std::size_t parse_binding(std::size_t open, std::size_t body_end, Alternative& alt) const {
        std::size_t colon = src_.find(':', open + 1);
        std::size_t close = src_.find(']', open + 1);
        if (close == std::string_view::npos || close >= body_end) fail(open, "unterminated '[' binding");
        if (colon == std::string_view::npos || colon > close) fail(open, "binding must have the form [name:#symbol#]");
        std::string name(src_.substr(open + 1, colon - open - 1));
        if (!is_valid_symbol_name(name) || name.find_first_of(":[]") != std::string::npos) {
            fail(open + 1, "invalid binding name '" + name + "'");
        }
        std::string_view inner = src_.substr(colon + 1, close - colon - 1);
        if (inner.size() < 2 || inner.front() != '#' || inner.back() != '#' ||
            inner.substr(1, inner.size() - 2).find('#') != std::string_view::npos) {
            fail(colon + 1, "binding value must be a single #symbol# reference");
        }
        alt.parts.emplace_back(Binding{std::move(name), parse_ref(inner.substr(1, inner.size() - 2), colon + 2)});
        return close + 1;
    }

    std::string_view src_;
    std::string_view rule_;
    std::size_t index_;
};

void escape_literal(std::string_view text, std::string& out) {
    for (char c : text) {
        if (c == '\\' || c == '#' || c == '[' || c == ']' || c == '@') out += '\\';
        out += c;
    }
}

void render_ref(const SymbolRef& ref, std::string& out) {
    out += '#';
    out += ref.name;
    for (auto m : ref.modifiers) {
        out += '.';
        out += modifier_name(m);
    }
    out += '#';
}

template <typename Fn>
void for_each_ref(const Grammar& g, Fn&& fn) {
    for (const auto& [rule, alts] : g.rules) {
        for (const auto& alt : alts) {
            for (const auto& part : alt.parts) {
                if (auto* ref = std::get_if<SymbolRef>(&part)) fn(*ref, static_cast<const Binding*>(nullptr));
                if (auto* b = std::get_if<Binding>(&part)) fn(b->inner, b);
            }
        }
    }
}

}  // namespace

bool is_valid_symbol_name(std::string_view name) noexcept {
    if (name.empty()) return false;
    return std::none_of(name.begin(), name.end(), [](char c) { return c == '#' || is_space(c); });
}

Alternative parse_alternative(std::string_view source, std::string_view rule, std::size_t index) {
    return AlternativeParser(source, rule, index).parse();
}

std::string render_alternative(const Alternative& alt) {
    std::string out;
    for (const auto& part : alt.parts) {
        if (auto* lit = std::get_if<Literal>(&part)) {
            escape_literal(lit->text, out);
        } else if (auto* ref = std::get_if<SymbolRef>(&part)) {
            render_ref(*ref, out);
        } else {
            const auto& b = std::get<Binding>(part);
            out += '[';
            out += b.name;
            out += ':';
            render_ref(b.inner, out);
            out += ']';
        }
    }
    if (!alt.tags.empty()) {
        out += '@';
        bool first = true;
        for (const auto& t : alt.tags) {
            if (!first) out += ',';
            out += t;
            first = false;
        }
    }
    return out;
}

std::vector<std::string> dangling_symbols(const Grammar& g) {
    std::set<std::string> bound;
    for_each_ref(g, [&](const SymbolRef&, const Binding* b) {
        if (b) bound.insert(b->name);
    });
    std::set<std::string> missing;
    for_each_ref(g, [&](const SymbolRef& ref, const Binding*) {
        if (!g.has_rule(ref.name) && !bound.count(ref.name)) missing.insert(ref.name);
    });
    return {missing.begin(), missing.end()};
}

Grammar parse_grammar(std::string_view source) {
    json doc;
    try {
        doc = json::parse(source.begin(), source.end());
    } catch (const json::parse_error& e) {
        throw ParseError(SourcePosition{{}, 0, e.byte}, e.what());
    }
    if (!doc.is_object()) throw ParseError({}, "grammar document must be a JSON object");
    if (doc.empty()) throw ParseError({}, "grammar document has no rules");

    Grammar g;
    for (const auto& [name, value] : doc.items()) {
        if (!is_valid_symbol_name(name)) {
            throw ParseError(SourcePosition{name, 0, 0}, "invalid rule name '" + name + "'");
        }
        if (!value.is_array() || value.empty()) {
            throw ParseError(SourcePosition{name, 0, 0}, "rule must be a non-empty array of strings");
        }
        auto& alts = g.rules[name];
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (!value[i].is_string()) throw ParseError(SourcePosition{name, i, 0}, "alternative must be a string");
            alts.push_back(parse_alternative(value[i].get_ref<const std::string&>(), name, i));
        }
    }
    if (auto missing = dangling_symbols(g); !missing.empty()) throw DanglingSymbol(std::move(missing));
    return g;
}

std::string serialize_grammar(const Grammar& g) {
    json doc = json::object();
    for (const auto& [name, alts] : g.rules) {
        json arr = json::array();
        for (const auto& alt : alts) arr.push_back(render_alternative(alt));
        doc[name] = std::move(arr);
    }
    return doc.dump(2) + "\n";
}

CompatTable parse_compat_table(std::string_view json_source) {
    json doc;
    try {
        doc = json::parse(json_source.begin(), json_source.end());
    } catch (const json::parse_error& e) {
        throw ParseError(SourcePosition{{}, 0, e.byte}, e.what());
    }
    if (!doc.is_object()) throw ParseError({}, "compatibility table must be a JSON object");
    CompatTable table;
    for (const auto& [tag, rooms] : doc.items()) {
        if (!rooms.is_array()) throw ParseError(SourcePosition{tag, 0, 0}, "expected an array of room tags");
        auto& set = table[tag];
        for (const auto& r : rooms) {
            if (!r.is_string()) throw ParseError(SourcePosition{tag, 0, 0}, "room tags must be strings");
            set.insert(r.get<std::string>());
        }
    }
    return table;
}

}  // namespace storygen
