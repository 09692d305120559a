#include "dkg/extraction/text.hpp"

#include <cctype>
#include <cmath>

namespace dkg::extraction {

Tokens preprocess(std::string_view raw) {
    Tokens tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    for (char ch : raw) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80) {
            current += ch;
        } else if (std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
        } else if (c == '\'') {
            continue;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::string join(const Tokens& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += sep;
        out += tokens[i];
    }
    return out;
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<double> embed(const Tokens& tokens, std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    if (dim == 0 || tokens.empty()) return v;

    auto add = [&](const std::string& feature) {
        const std::uint64_t h = fnv1a(feature);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        v[(h & 0x7fffffffffffffffULL) % dim] += sign;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        add("u:" + tokens[i]);
        if (i + 1 < tokens.size()) add("b:" + tokens[i] + " " + tokens[i + 1]);
    }

    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (double& x : v) x *= inv;
    }
    return v;
}

double cosine(std::span<const double> a, std::span<const double> b) noexcept {
    if (a.size() != b.size() || a.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace dkg::extraction
