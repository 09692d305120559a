/**
 * @file config.hpp
 * @brief Engine configuration and its flat `key = value` file format.
 *
 *   # comments start with '#'
 *   tau = 0.7
 *   data_dir = /var/lib/dkg
 *   extractor = lexicon
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "dkg/extraction/remote_extractor.hpp"
#include "dkg/graph/types.hpp"
#include "dkg/params.hpp"

namespace dkg::gateway {

enum class ExtractorKind { Lexicon, Remote };

inline constexpr std::string_view kConfigFileName = "dkg.conf";
inline constexpr const char* kDataDirEnv = "DKG_DATA_DIR";

struct EngineConfig {
    TunableParams params;
    graph::CapacityConfig capacity;
    double mrf_smoothing = 1.0;
    double epsilon = 0.01;
    double diagnosis_threshold = 0.2;
    std::size_t embedding_dim = 256;
    double link_threshold = 0.85;
    std::uint64_t seed = 42;
    std::filesystem::path data_dir = "dkg-data";
    ExtractorKind extractor = ExtractorKind::Lexicon;
    std::size_t docs_per_batch = 100;
    std::size_t replay_capacity = 256;

    std::string remote_host = "127.0.0.1";
    int remote_port = 8090;
    std::string remote_path = "/extract";
    std::int64_t remote_timeout_ms = 5000;
    std::size_t remote_max_in_flight = 4;
    /// When set, remote responses are read from this fixture file instead of the network.
    std::string remote_replay;

    /// Throws InvalidConfig.
    void validate() const;

    extraction::RemoteExtractorConfig remote() const;

    /// Lossless: parse(to_text()) == *this.
    std::string to_text() const;
    /// Unset keys keep their defaults. Throws InvalidConfig naming the line.
    static EngineConfig parse(std::string_view text);
    static EngineConfig load_file(const std::filesystem::path& path);

    /// data_dir <- $DKG_DATA_DIR when set and nonempty.
    void apply_environment();

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

std::string_view to_string(ExtractorKind k) noexcept;

}  // namespace dkg::gateway
