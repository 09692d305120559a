/**
 * @file snapshot.hpp
 * @brief Self-describing JSON snapshot of a KnowledgeGraph.
 *
 * Document layout (schema_version 1):
 *
 *   { "schema_version": 1,
 *     "capacity": {"max_edges": N, "batch_budget": B},
 *     "batch_counter": C,
 *     "nodes": [{"id", "type", "label", "prior", "attributes", "embedding",
 *                "relevance", "created_at", "updated_at"}, ...],
 *     "edges": [{"src", "dst", "type", "weight", "evidence_count",
 *                "created_at", "updated_at"}, ...] }
 *
 * load(snapshot(g)) == g for every graph g.
 */

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dkg/graph/knowledge_graph.hpp"

namespace dkg::graph {

inline constexpr int kSnapshotSchemaVersion = 1;

std::string snapshot(const KnowledgeGraph& g);

/// Throws SchemaVersionMismatch or CorruptDocument.
KnowledgeGraph load(std::string_view document);

/// Write-then-rename, so readers never observe a half-written snapshot.
void save_file(const KnowledgeGraph& g, const std::filesystem::path& path);
KnowledgeGraph load_file(const std::filesystem::path& path);

/// Write `contents` to `path` through a temporary file and an atomic rename.
void atomic_write(const std::filesystem::path& path, std::string_view contents);

}  // namespace dkg::graph
