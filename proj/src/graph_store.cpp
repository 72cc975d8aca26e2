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

#include "micrograph/graph_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <deque>
#include <fstream>
#include <sstream>

#include "micrograph/error.hpp"

namespace micrograph {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kJournal = "journal.ndjson";
constexpr const char* kLock = "LOCK";
constexpr const char* kMeta = "meta.json";

StoreIndex::EdgeKey key_of(const GraphEdge& e) { return {e.src, e.kind, e.order, e.dst}; }

json node_json(const GraphNode& n) {
  return {{"id", n.id}, {"kind", to_string(n.kind)}, {"props", n.props}};
}

json edge_json(const GraphEdge& e) {
  json j = {{"src", e.src}, {"dst", e.dst}, {"kind", to_string(e.kind)}};
  if (e.order) j["order"] = *e.order;
  if (!e.props.is_null()) j["props"] = e.props;
  return j;
}

void append_record(std::string& out, char type, const json& payload) {
  const auto body = payload.dump(-1, ' ', false, json::error_handler_t::replace);
  out += type;
  out += ' ';
  out += std::to_string(body.size());
  out += ' ';
  out += body;
  out += '\n';
}

void apply_node(StoreIndex& ix, const GraphNode& n, std::uint64_t offset) {
  if (ix.nodes.count(n.id)) return;
  ix.nodes.emplace(n.id, n);
  ix.node_offset[n.id] = offset;
  if (n.kind == GraphNodeKind::Entity || n.kind == GraphNodeKind::Action) {
    ix.entities[{n.props.value("canonical", ""), n.props.value("entity_type", "")}].insert(n.id);
  }
  if (n.kind == GraphNodeKind::Document) ix.documents[n.props.value("url", "")] = n.id;
}

void apply_edge(StoreIndex& ix, const GraphEdge& e) {
  auto key = key_of(e);
  if (ix.edges.count(key)) return;
  ix.edges.emplace(key, e);
  ix.out_edges[e.src].push_back(key);
  ix.in_edges[e.dst].push_back(key);
}

struct Record {
  char type = 0;
  std::string_view payload;
  std::uint64_t offset = 0;
  std::uint64_t end = 0;
};

// Parses one record at `pos`; nullopt for a torn or malformed line.
std::optional<Record> read_record(std::string_view bytes, std::uint64_t pos) {
  if (pos + 4 > bytes.size()) return std::nullopt;
  Record r;
  r.offset = pos;
  r.type = bytes[pos];
  if (bytes[pos + 1] != ' ') return std::nullopt;
  std::uint64_t i = pos + 2;
  std::uint64_t len = 0;
  const auto digits = i;
  while (i < bytes.size() && bytes[i] >= '0' && bytes[i] <= '9' && i - digits < 12)
    len = len * 10 + static_cast<std::uint64_t>(bytes[i++] - '0');
  if (i == digits || i >= bytes.size() || bytes[i] != ' ') return std::nullopt;
  ++i;
  if (i + len + 1 > bytes.size() || bytes[i + len] != '\n') return std::nullopt;
  r.payload = bytes.substr(i, len);
  r.end = i + len + 1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("write to " + path.string() + " failed: " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

std::uint64_t replay_journal(std::string_view bytes, StoreIndex& index) {
  std::uint64_t pos = 0, committed = 0;
  std::vector<std::pair<GraphNode, std::uint64_t>> nodes;
  std::vector<GraphEdge> edges;
  bool open = false;
  while (auto r = read_record(bytes, pos)) {
    try {
      const auto j = json::parse(r->payload);
      if (r->type == 'B') {
        if (open) break;
        open = true;
        nodes.clear();
        edges.clear();
      } else if (r->type == 'N' && open) {
        auto kind = graph_node_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) break;
        nodes.push_back({GraphNode{j.at("id").get<std::string>(), *kind, j.at("props")}, r->offset});
      } else if (r->type == 'E' && open) {
        auto kind = edge_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) break;
        GraphEdge e{j.at("src").get<std::string>(), j.at("dst").get<std::string>(), *kind,
                    std::nullopt, j.contains("props") ? j["props"] : json(nullptr)};
        if (j.contains("order")) e.order = j["order"].get<int>();
        edges.push_back(std::move(e));
      } else if (r->type == 'C' && open) {
        for (const auto& [n, off] : nodes) apply_node(index, n, off);
        for (const auto& e : edges) apply_edge(index, e);
        open = false;
        committed = r->end;
      } else {
        break;
      }
    } catch (const json::exception&) {
      break;
    }
    pos = r->end;
  }
  return committed;
}

GraphStore GraphStore::open(const fs::path& root, Mode mode) {
  GraphStore s;
  s.root_ = root;
  s.mode_ = mode;
  std::error_code ec;
  if (mode == Mode::Read) {
    if (!fs::is_directory(root, ec)) throw IoError("no store at " + root.string());
  } else {
    fs::create_directories(root, ec);
    if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());
    const auto lock = (root / kLock).string();
    s.lock_fd_ = ::open(lock.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (s.lock_fd_ < 0) throw IoError("cannot open " + lock + ": " + std::strerror(errno));
    if (::flock(s.lock_fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(s.lock_fd_);
      s.lock_fd_ = -1;
      throw IoError("store " + root.string() + " is locked by another writer");
    }
    if (!fs::exists(root / kMeta)) {
      std::ofstream meta(root / kMeta, std::ios::binary);
      meta << json{{"schema_version", kSchemaVersion}, {"corpus_id", ""}}.dump() << "\n";
      if (!meta) throw IoError("cannot write " + (root / kMeta).string());
    }
  }

  const auto journal = root / kJournal;
  std::string bytes;
  if (fs::exists(journal)) bytes = read_file(journal);
  s.journal_end_ = replay_journal(bytes, s.index_);
  if (mode == Mode::Write) {
    if (bytes.size() > s.journal_end_) {
      fs::resize_file(journal, s.journal_end_, ec);
      if (ec) throw IoError("cannot truncate " + journal.string() + ": " + ec.message());
    } else if (!fs::exists(journal)) {
      std::ofstream(journal, std::ios::binary).flush();
    }
  }
  return s;
}

GraphStore::GraphStore(GraphStore&& o) noexcept
    : root_(std::move(o.root_)),
      mode_(o.mode_),
      lock_fd_(std::exchange(o.lock_fd_, -1)),
      index_(std::move(o.index_)),
      journal_end_(o.journal_end_) {}

GraphStore& GraphStore::operator=(GraphStore&& o) noexcept {
  if (this != &o) {
    if (lock_fd_ >= 0) ::close(lock_fd_);
    root_ = std::move(o.root_);
    mode_ = o.mode_;
    lock_fd_ = std::exchange(o.lock_fd_, -1);
    index_ = std::move(o.index_);
    journal_end_ = o.journal_end_;
  }
  return *this;
}

GraphStore::~GraphStore() {
  if (lock_fd_ >= 0) ::close(lock_fd_);  // releases the flock
}

IngestReport GraphStore::ingest(const Micrograph& g) {
  if (mode_ != Mode::Write) throw IoError("store opened read-only");
  const auto violations = validate_micrograph(to_json(g));
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw ValidationError(std::to_string(violations.size()) + " violation(s), first: " + v.rule +
                          " at " + v.subject + ": " + v.message);
  }

  IngestReport report;
  std::vector<const GraphNode*> new_nodes;
  std::vector<const GraphEdge*> new_edges;
  std::set<StoreIndex::EdgeKey> seen;
  for (const auto& n : g.nodes) {
    if (index_.nodes.count(n.id)) ++report.duplicates_skipped;
    else new_nodes.push_back(&n);
  }
  for (const auto& e : g.edges) {
    auto k = key_of(e);
    if (index_.edges.count(k) || !seen.insert(k).second) ++report.duplicates_skipped;
    else new_edges.push_back(&e);
  }
  if (new_nodes.empty() && new_edges.empty()) return report;

  const auto* doc = g.find(g.document);
  const std::string url = doc ? doc->props.value("url", "") : "";
  std::string buf;
  std::vector<std::uint64_t> offsets;
  append_record(buf, 'B', {{"document", url}, {"nodes", new_nodes.size()}, {"edges", new_edges.size()}});
  for (const auto* n : new_nodes) {
    offsets.push_back(journal_end_ + buf.size());
    append_record(buf, 'N', node_json(*n));
  }
  for (const auto* e : new_edges) append_record(buf, 'E', edge_json(*e));
  append_record(buf, 'C', {{"document", url}});

  const auto journal = root_ / kJournal;
  const int fd = ::open(journal.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot open " + journal.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, buf, journal);
    if (::fsync(fd) != 0) throw IoError("fsync " + journal.string() + " failed");
  } catch (...) {
    // Drop the partial group so the file stays replay-consistent.
    if (::ftruncate(fd, static_cast<off_t>(journal_end_)) != 0) {
      // Replay stops at the torn group anyway.
    }
    ::close(fd);
    throw;
  }
  ::close(fd);

  for (std::size_t i = 0; i < new_nodes.size(); ++i) apply_node(index_, *new_nodes[i], offsets[i]);
  for (const auto* e : new_edges) apply_edge(index_, *e);
  journal_end_ += buf.size();
  report.nodes_added = new_nodes.size();
  report.edges_added = new_edges.size();

  if (doc) {
    const auto meta_path = root_ / kMeta;
    json meta = json::object();
    try {
      meta = json::parse(read_file(meta_path));
    } catch (const std::exception&) {
    }
    if (meta.value("corpus_id", "").empty()) {
      meta["schema_version"] = kSchemaVersion;
      meta["corpus_id"] = doc->props.value("corpus_id", "");
      std::ofstream out(meta_path, std::ios::binary | std::ios::trunc);
      out << meta.dump() << "\n";
    }
  }
  return report;
}

const GraphNode& GraphStore::node(const std::string& id) const {
  auto it = index_.nodes.find(id);
  if (it == index_.nodes.end()) throw UnknownNode("no node " + id + " in store");
  return it->second;
}

std::vector<GraphNode> GraphStore::query_neighbors(const std::string& node_id, EdgeKind kind,
                                                   Direction direction) const {
  node(node_id);
  const auto& adj = direction == Direction::Out ? index_.out_edges : index_.in_edges;
  std::vector<std::pair<std::optional<int>, std::string>> hits;
  if (auto it = adj.find(node_id); it != adj.end()) {
    for (const auto& k : it->second) {
      if (std::get<1>(k) != kind) continue;
      hits.emplace_back(std::get<2>(k), direction == Direction::Out ? std::get<3>(k) : std::get<0>(k));
    }
  }
  std::sort(hits.begin(), hits.end());
  std::vector<GraphNode> out;
  for (const auto& h : hits) out.push_back(node(h.second));
  return out;
}

std::vector<GraphNode> GraphStore::find_documents_mentioning(const std::string& canonical) const {
  std::set<std::string> targets;
  for (auto it = index_.entities.lower_bound({canonical, ""});
       it != index_.entities.end() && it->first.first == canonical; ++it)
    targets.insert(it->second.begin(), it->second.end());

  std::map<std::string, std::string> docs;  // url -> id
  std::set<std::string> visited;
  std::deque<std::string> queue;
  for (const auto& t : targets) {
    auto in = index_.in_edges.find(t);
    if (in == index_.in_edges.end()) continue;
    for (const auto& k : in->second) {
      if (std::get<1>(k) == EdgeKind::MENTIONS && visited.insert(std::get<0>(k)).second)
        queue.push_back(std::get<0>(k));
    }
  }
  while (!queue.empty()) {
    const auto id = queue.front();
    queue.pop_front();
    const auto& n = node(id);
    if (n.kind == GraphNodeKind::Document) {
      docs[n.props.value("url", "")] = id;
      continue;
    }
    auto in = index_.in_edges.find(id);
    if (in == index_.in_edges.end()) continue;
    for (const auto& k : in->second) {
      if (is_containment(std::get<1>(k)) && visited.insert(std::get<0>(k)).second)
        queue.push_back(std::get<0>(k));
    }
  }
  std::vector<GraphNode> out;
  for (const auto& [url, id] : docs) out.push_back(node(id));
  return out;
}

Micrograph GraphStore::export_micrograph(const std::string& url) const {
  auto d = index_.documents.find(url);
  if (d == index_.documents.end()) throw UnknownDocument("document " + url + " is not in the store");
  Micrograph g;
  g.document = d->second;
  std::set<std::string> visited{d->second};
  std::deque<std::string> queue{d->second};
  while (!queue.empty()) {
    const auto id = queue.front();
    queue.pop_front();
    g.nodes.push_back(node(id));
    auto out = index_.out_edges.find(id);
    if (out == index_.out_edges.end()) continue;
    for (const auto& k : out->second) {
      g.edges.push_back(index_.edges.at(k));
      if (visited.insert(std::get<3>(k)).second) queue.push_back(std::get<3>(k));
    }
  }
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
  std::sort(g.edges.begin(), g.edges.end(), edge_less);
  return g;
}

std::vector<std::string> GraphStore::documents() const {
  std::vector<std::string> out;
  for (const auto& [url, id] : index_.documents) out.push_back(url);
  return out;
}

std::vector<std::string> GraphStore::verify() const {
  std::vector<std::string> problems;
  const auto journal = root_ / kJournal;
  std::string bytes;
  if (fs::exists(journal)) bytes = read_file(journal);
  StoreIndex rebuilt;
  const auto end = replay_journal(bytes, rebuilt);
  if (end != journal_end_) problems.push_back("journal end " + std::to_string(end) + " != live " + std::to_string(journal_end_));
  if (rebuilt.nodes != index_.nodes) problems.push_back("node table differs");
  if (rebuilt.node_offset != index_.node_offset) problems.push_back("node offset index differs");
  if (rebuilt.entities != index_.entities) problems.push_back("entity index differs");
  if (rebuilt.documents != index_.documents) problems.push_back("document index differs");
  if (rebuilt.edges != index_.edges) problems.push_back("edge table differs");
  if (rebuilt.out_edges != index_.out_edges) problems.push_back("out adjacency differs");
  if (rebuilt.in_edges != index_.in_edges) problems.push_back("in adjacency differs");
  return problems;
}

std::vector<std::uint64_t> GraphStore::record_boundaries(const fs::path& journal) {
  const auto bytes = read_file(journal);
  std::vector<std::uint64_t> out;
  std::uint64_t pos = 0;
  while (auto r = read_record(bytes, pos)) {
    out.push_back(r->end);
    pos = r->end;
  }
  return out;
}

}  // namespace micrograph
