/**
 * @file text.hpp
 * @brief Text normalization and the feature-hashing embedding used for
 *        entity linking and graph similarity.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dkg::extraction {

using Tokens = std::vector<std::string>;

inline constexpr std::size_t kDefaultEmbeddingDim = 256;

/// Lowercase, strip punctuation, collapse whitespace, split into tokens.
/// ASCII punctuation separates tokens except apostrophes, which are dropped
/// ("patient's" -> "patients"). Bytes >= 0x80 are kept verbatim.
Tokens preprocess(std::string_view raw);

std::string join(const Tokens& tokens, std::string_view sep = " ");

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

/// Signed feature hashing of unigrams and adjacent bigrams into `dim`
/// buckets, L2-normalized. Empty input yields the zero vector.
std::vector<double> embed(const Tokens& tokens, std::size_t dim = kDefaultEmbeddingDim);

/// Cosine similarity; 0 when either vector is zero or the sizes differ.
double cosine(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace dkg::extraction
