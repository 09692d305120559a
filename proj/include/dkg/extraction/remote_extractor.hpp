/**
 * @file remote_extractor.hpp
 * @brief Extractor adapter for a remote LLM service.
 *
 * Request  (POST <path>, application/json):
 *   {"doc_id": str, "source": str, "context_tag": str, "text": str}
 *
 * Response (200, application/json), both arrays required:
 *   {"spans":     [{"surface": str, "entity_type": NodeType, "prob": [0,1]}],
 *    "relations": [{"src_surface": str, "dst_surface": str,
 *                   "edge_type": EdgeType, "prob": [0,1],
 *                   "src_type"?: NodeType, "dst_type"?: NodeType}]}
 *
 * Spans sharing a normalized surface form one mention position and are
 * renormalized to sum to 1. Relation endpoint types default to the most
 * probable span type of that surface.
 *
 * In replay mode responses come from a fixture map keyed by doc_id and no
 * network traffic happens.
 */

#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "dkg/extraction/extractor.hpp"

namespace dkg::extraction {

struct RemoteExtractorConfig {
    std::string host = "127.0.0.1";
    int port = 8090;
    std::string path = "/extract";
    std::chrono::milliseconds timeout{5000};
    std::size_t max_in_flight = 4;
    std::size_t embedding_dim = kDefaultEmbeddingDim;
};

class RemoteLLMExtractor final : public ExtractorPort {
public:
    explicit RemoteLLMExtractor(RemoteExtractorConfig config);

    /// Replay mode: `fixtures` maps doc_id to a raw response body.
    static RemoteLLMExtractor replay(std::map<std::string, std::string> fixtures,
                                     std::size_t embedding_dim = kDefaultEmbeddingDim);

    /// Fixture file: a JSON object {doc_id: response-object, ...}.
    static RemoteLLMExtractor replay_file(const std::string& path,
                                          std::size_t embedding_dim = kDefaultEmbeddingDim);

    /// Throws RemoteTransport (network, status, missing fixture) or
    /// RemoteSchema (response does not match the schema).
    Candidates extract(const Document& doc, std::string_view context) const override;

    static std::string build_request(const Document& doc, std::string_view context);
    static Candidates parse_response(const Document& doc, std::string_view body, std::size_t embedding_dim);

    bool replaying() const noexcept { return fixtures_.has_value(); }

private:
    using Semaphore = std::counting_semaphore<1024>;

    RemoteExtractorConfig config_;
    std::optional<std::map<std::string, std::string>> fixtures_;
    std::shared_ptr<Semaphore> in_flight_;
};

}  // namespace dkg::extraction
