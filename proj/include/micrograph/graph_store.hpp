// Copyright 2026 The Micrograph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "micrograph/micrograph_builder.hpp"

namespace micrograph {

struct IngestReport {
  std::size_t nodes_added = 0;
  std::size_t edges_added = 0;
  std::size_t duplicates_skipped = 0;
  friend bool operator==(const IngestReport&, const IngestReport&) = default;
};

enum class Direction { Out, In };

// In-memory indexes, all reconstructible from the journal.
struct StoreIndex {
  using EdgeKey = std::tuple<std::string, EdgeKind, std::optional<int>, std::string>;

  std::map<std::string, GraphNode> nodes;
  std::map<std::string, std::uint64_t> node_offset;  // id -> journal offset of its record
  std::map<std::pair<std::string, std::string>, std::set<std::string>> entities;
  std::map<std::string, std::string> documents;  // url -> Document id
  std::map<EdgeKey, GraphEdge> edges;
  std::map<std::string, std::vector<EdgeKey>> out_edges;
  std::map<std::string, std::vector<EdgeKey>> in_edges;

  friend bool operator==(const StoreIndex&, const StoreIndex&) = default;
};

// File-backed property-graph store: root/journal.ndjson holds records
// `<type> <length> <json>` grouped as B (begin), N/E (node, edge) and C
// (commit). Only committed groups are replayed. A writer holds an
// exclusive lock on root/LOCK; readers replay a snapshot.
class GraphStore {
 public:
  enum class Mode { Read, Write };

  // Throws IoError (missing store in Read mode, lock held, unreadable files).
  static GraphStore open(const std::filesystem::path& root, Mode mode);

  GraphStore(GraphStore&&) noexcept;
  GraphStore& operator=(GraphStore&&) noexcept;
  GraphStore(const GraphStore&) = delete;
  GraphStore& operator=(const GraphStore&) = delete;
  ~GraphStore();

  // Throws ValidationError (store unchanged) or IoError.
  IngestReport ingest(const Micrograph& g);

  // Throws UnknownNode.
  std::vector<GraphNode> query_neighbors(const std::string& node_id, EdgeKind kind,
                                         Direction direction) const;
  std::vector<GraphNode> find_documents_mentioning(const std::string& canonical) const;
  // Throws UnknownDocument.
  Micrograph export_micrograph(const std::string& document_url) const;
  // Document URLs in order.
  std::vector<std::string> documents() const;

  // Differences between the live indexes and ones rebuilt from the journal.
  std::vector<std::string> verify() const;

  const StoreIndex& index() const { return index_; }
  const std::filesystem::path& root() const { return root_; }
  std::uint64_t journal_size() const { return journal_end_; }

  // Offsets just past each record in a journal, for crash tests.
  static std::vector<std::uint64_t> record_boundaries(const std::filesystem::path& journal);

 private:
  GraphStore() = default;
  const GraphNode& node(const std::string& id) const;

  std::filesystem::path root_;
  Mode mode_ = Mode::Read;
  int lock_fd_ = -1;
  StoreIndex index_;
  std::uint64_t journal_end_ = 0;
};

// Rebuilds indexes from journal bytes. Stops at the first torn or malformed
// record; returns the offset just past the last committed group.
std::uint64_t replay_journal(std::string_view bytes, StoreIndex& index);

}  // namespace micrograph
