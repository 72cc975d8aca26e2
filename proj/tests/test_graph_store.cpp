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

#include <gtest/gtest.h>
#include <unistd.h>

#include <json.hpp>

#include "micrograph/error.hpp"
#include "micrograph/graph_store.hpp"
#include "micrograph/pipeline.hpp"
#include "test_support.hpp"

using namespace micrograph;
using testing_support::test_meta;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int n = 0;
    path_ = fs::temp_directory_path() / ("mg_store_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

Micrograph page(const std::string& html) { return process_page(html, test_meta(), {}, "file:t").graph; }

std::vector<Micrograph> corpus() {
  std::vector<Micrograph> out;
  for (const auto& p : testing_support::corpus_pages())
    out.push_back(process_page(testing_support::read_file(p), test_meta(), {}, "file:" + p.filename().string()).graph);
  return out;
}

std::string url_of(const Micrograph& g) { return g.find(g.document)->props["url"]; }

}  // namespace

TEST(GraphStore, RoundTripEveryFixture) {
  TempDir dir;
  auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
  const auto graphs = corpus();
  for (const auto& g : graphs) store.ingest(g);
  for (const auto& g : graphs)
    EXPECT_EQ(serialize_canonical(store.export_micrograph(url_of(g))), serialize_canonical(g)) << url_of(g);
  EXPECT_TRUE(store.verify().empty());
}

TEST(GraphStore, Idempotent) {
  TempDir dir;
  auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
  const auto g = page(testing_support::read_file(testing_support::fixtures() / "corpus/22_db2_isolation_level.html"));
  const auto first = store.ingest(g);
  EXPECT_EQ(first.nodes_added, g.nodes.size());
  EXPECT_EQ(first.edges_added, g.edges.size());
  const auto once = serialize_canonical(store.export_micrograph(url_of(g)));
  const auto size = store.journal_size();
  const auto second = store.ingest(g);
  EXPECT_EQ(second.nodes_added, 0u);
  EXPECT_EQ(second.edges_added, 0u);
  EXPECT_EQ(second.duplicates_skipped, g.nodes.size() + g.edges.size());
  EXPECT_EQ(serialize_canonical(store.export_micrograph(url_of(g))), once);
  EXPECT_EQ(store.journal_size(), size);
}

TEST(GraphStore, EntitiesMergeAcrossDocuments) {
  TempDir dir;
  auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
  const auto a = page("<link rel=canonical href=https://e.com/a><h1>A</h1><h2>Solution</h2><p>Restart DB2 on Linux.</p>");
  const auto b = page("<link rel=canonical href=https://e.com/b><h1>B</h1><h2>Solution</h2><p>Stop DB2. Then stop DB2 again.</p>");
  store.ingest(a);
  store.ingest(b);
  EXPECT_EQ(store.index().entities.at({"DB2", "product"}).size(), 1u);
  const auto db2 = store.find_documents_mentioning("DB2");
  ASSERT_EQ(db2.size(), 2u);
  const auto on_linux = store.find_documents_mentioning("Linux");
  ASSERT_EQ(on_linux.size(), 1u);
  EXPECT_EQ(on_linux[0].props["url"], "https://e.com/a");
  EXPECT_TRUE(store.find_documents_mentioning("Solaris").empty());
  // Each export still carries the shared entity.
  EXPECT_EQ(store.export_micrograph("https://e.com/b"), b);
  EXPECT_EQ(store.export_micrograph("https://e.com/a"), a);
}

TEST(GraphStore, InvalidGraphRejected) {
  TempDir dir;
  auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
  auto g = page("<h1>T</h1><h2>Solution</h2><p>x</p>");
  store.ingest(g);
  const auto size = store.journal_size();
  const auto bytes = testing_support::read_file(dir.path() / "journal.ndjson");
  g.edges.push_back(GraphEdge{g.document, "sec:missing", EdgeKind::HAS_SECTION, 5, nullptr});
  EXPECT_THROW(store.ingest(g), ValidationError);
  EXPECT_EQ(store.journal_size(), size);
  EXPECT_EQ(testing_support::read_file(dir.path() / "journal.ndjson"), bytes);
}

TEST(GraphStore, Neighbors) {
  TempDir dir;
  auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
  const auto g = page(testing_support::read_file(testing_support::fixtures() / "corpus/16_diagnostic_steps.html"));
  store.ingest(g);
  const auto secs = store.query_neighbors(g.document, EdgeKind::HAS_SECTION, Direction::Out);
  ASSERT_EQ(secs.size(), 2u);
  EXPECT_EQ(secs[0].props["order"], 1);
  EXPECT_EQ(secs[1].props["order"], 2);
  for (const auto& n : g.nodes)
    if (n.kind == GraphNodeKind::Step) {
      EXPECT_LE(store.query_neighbors(n.id, EdgeKind::NEXT_STEP, Direction::Out).size(), 1u);
      EXPECT_EQ(store.query_neighbors(n.id, EdgeKind::HAS_STEP, Direction::In).size(), 1u);
    }
  EXPECT_THROW(store.query_neighbors("step:nope", EdgeKind::NEXT_STEP, Direction::Out), UnknownNode);
  EXPECT_THROW(store.export_micrograph("https://never.example"), UnknownDocument);
}

TEST(GraphStore, ReopenReplays) {
  TempDir dir;
  const auto graphs = corpus();
  StoreIndex live;
  {
    auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
    for (std::size_t i = 0; i < 5; ++i) store.ingest(graphs[i]);
    live = store.index();
  }
  auto reader = GraphStore::open(dir.path(), GraphStore::Mode::Read);
  EXPECT_EQ(reader.index(), live);
  EXPECT_TRUE(reader.verify().empty());
  EXPECT_THROW(reader.ingest(graphs[6]), IoError);
  EXPECT_THROW(GraphStore::open(dir.path() / "missing", GraphStore::Mode::Read), IoError);
}

TEST(GraphStore, SingleWriter) {
  TempDir dir;
  auto a = GraphStore::open(dir.path(), GraphStore::Mode::Write);
  EXPECT_THROW(GraphStore::open(dir.path(), GraphStore::Mode::Write), IoError);
  auto reader = GraphStore::open(dir.path(), GraphStore::Mode::Read);
  (void)reader;
}

// Cutting the journal anywhere replays to the state after some prefix of
// the ingests, and reopening for write drops the torn tail.
TEST(GraphStore, TruncationYieldsPrefixState) {
  TempDir dir;
  const auto graphs = corpus();
  std::vector<StoreIndex> snapshots{StoreIndex{}};
  {
    auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
    for (std::size_t i = 0; i < 6; ++i) {
      store.ingest(graphs[i]);
      snapshots.push_back(store.index());
    }
  }
  const auto journal = dir.path() / "journal.ndjson";
  const auto full = testing_support::read_file(journal);
  auto cuts = GraphStore::record_boundaries(journal);
  cuts.insert(cuts.begin(), 0);
  for (std::size_t c = 1; c < full.size(); c += 97) cuts.push_back(c);
  for (auto cut : cuts) {
    StoreIndex idx;
    replay_journal(std::string_view(full).substr(0, cut), idx);
    const auto hit = std::find(snapshots.begin(), snapshots.end(), idx);
    ASSERT_NE(hit, snapshots.end()) << "cut at " << cut;
  }
  // A writer opening a torn journal truncates it to the last commit.
  const auto mid = cuts[cuts.size() / 2];
  {
    std::ofstream out(journal, std::ios::binary | std::ios::trunc);
    out << full.substr(0, mid) << "N 9999 {\"torn";
  }
  auto store = GraphStore::open(dir.path(), GraphStore::Mode::Write);
  EXPECT_TRUE(store.verify().empty());
  EXPECT_NE(std::find(snapshots.begin(), snapshots.end(), store.index()), snapshots.end());
  store.ingest(graphs[10]);
  EXPECT_EQ(store.export_micrograph(url_of(graphs[10])), graphs[10]);
}
