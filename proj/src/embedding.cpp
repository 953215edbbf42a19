#include "storygen/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace storygen {

const Vector* EmbeddingModel::find(std::string_view token) const {
    auto it = vectors.find(std::string(token));
    return it == vectors.end() ? nullptr : &it->second;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        auto uc = static_cast<unsigned char>(c);
        if (uc < 0x80 && std::isalnum(uc)) {
            current += static_cast<char>(std::tolower(uc));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) fields.push_back(s.substr(start, i - start));
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && end == text.data() + text.size();
}

}  // namespace

EmbeddingModel load_vectors(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t count = 0;
    EmbeddingModel m;

    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    {
        auto header = split_ws(line);
        if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], m.dim)) {
            throw FormatError(line_no, "expected header '<count> <dim>'");
        }
        if (m.dim == 0) throw FormatError(line_no, "dimension must be positive");
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_ws(line);
        if (fields.size() - 1 != m.dim) {
            throw DimensionMismatch(line_no, "expected " + std::to_string(m.dim) + " components, found " +
                                                 std::to_string(fields.size() - 1));
        }
        std::string token(fields[0]);
        std::transform(token.begin(), token.end(), token.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        Vector v(m.dim);
        for (std::size_t d = 0; d < m.dim; ++d) {
            if (!parse_number(fields[d + 1], v[d]) || !std::isfinite(v[d])) {
                throw FormatError(line_no, "bad component '" + std::string(fields[d + 1]) + "'");
            }
        }
        if (!m.vectors.emplace(std::move(token), std::move(v)).second) {
            throw FormatError(line_no, "duplicate token '" + std::string(fields[0]) + "'");
        }
    }
    if (m.vectors.size() != count) {
        throw FormatError(line_no, "header declares " + std::to_string(count) + " vectors, found " +
                                       std::to_string(m.vectors.size()));
    }
    return m;
}

EmbeddingModel load_vectors_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_vectors(in);
}

std::string save_vectors(const EmbeddingModel& m) {
    std::string out = std::to_string(m.vectors.size()) + " " + std::to_string(m.dim) + "\n";
    char buf[64];
    for (const auto& [token, v] : m.vectors) {
        out += token;
        for (double x : v) {
            std::snprintf(buf, sizeof buf, " %.6f", x);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Vector sentence_vector(const EmbeddingModel& m, std::string_view text) {
    auto tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    Vector sum(m.dim, 0.0);
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (const Vector* v = m.find(t)) {
            for (std::size_t d = 0; d < m.dim; ++d) sum[d] += (*v)[d];
            ++hits;
        }
    }
    if (hits > 0) {
        for (double& x : sum) x /= static_cast<double>(hits);
    }
    return sum;
}

double cosine(const Vector& a, const Vector& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t d = 0; d < a.size() && d < b.size(); ++d) {
        dot += a[d] * b[d];
        na += a[d] * a[d];
        nb += b[d] * b[d];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double similarity_of_vectors(const Vector& a, const Vector& b) { return (1.0 + cosine(a, b)) / 2.0; }

double similarity(const EmbeddingModel& m, std::string_view a, std::string_view b) {
    return similarity_of_vectors(sentence_vector(m, a), sentence_vector(m, b));
}

}  // namespace storygen
