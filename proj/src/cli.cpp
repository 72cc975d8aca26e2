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

#include "micrograph/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "micrograph/error.hpp"
#include "micrograph/graph_store.hpp"
#include "micrograph/pipeline.hpp"

namespace micrograph::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunReport {
  std::size_t inputs_processed = 0;
  std::size_t micrographs_written = 0;
  PageCounts counts;
  json diagnostics = json::array();

  void add(const std::string& file, const std::string& rule, const std::string& message) {
    diagnostics.push_back({{"file", file}, {"rule", rule}, {"message", message}});
  }
  json to_json() const {
    return {{"inputs_processed", inputs_processed},
            {"micrographs_written", micrographs_written},
            {"procedures", counts.procedures},
            {"steps", counts.steps},
            {"conditional_blocks", counts.conditional_blocks},
            {"mentions", counts.mentions},
            {"diagnostics", diagnostics}};
  }
};

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_html(const fs::path& p) {
  const auto ext = text::to_lower(p.extension().string());
  return ext == ".html" || ext == ".htm";
}

// Files as given, directories expanded to their HTML files in path order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && is_html(e.path())) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(in, ec)) {
      out.emplace_back(in);
    } else {
      throw IoError("no such input: " + in);
    }
  }
  return out;
}

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string meta;
  std::string out_dir = ".";
  double coverage_threshold = 0.75;
  double preamble_ratio = 0.25;
  int max_depth = 8;
  bool no_linking = false;
  std::string annotations;
  bool strict = false;
};

CorpusMeta load_meta_arg(const std::string& path) {
  std::string p = path;
  if (p.empty()) {
    if (const char* env = std::getenv("MICROGRAPH_META")) p = env;
  }
  if (p.empty()) throw UsageError("--meta is required (or set MICROGRAPH_META)");
  try {
    return load_meta_file(p);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError("meta " + p + ": " + e.what());
  }
}

// Runs the pipeline over every input; writes micrographs when `write`.
int extract(const ExtractArgs& a, bool write, std::ostream& out, std::ostream& err,
            RunReport& report) {
  const auto meta = load_meta_arg(a.meta);
  if (a.coverage_threshold < 0.0 || a.coverage_threshold > 1.0)
    throw UsageError("--coverage-threshold must lie in [0,1]");
  if (a.preamble_ratio < 0.0 || a.preamble_ratio > 1.0)
    throw UsageError("--preamble-ratio must lie in [0,1]");
  if (a.max_depth < 0) throw UsageError("--max-depth must be non-negative");

  std::shared_ptr<const Annotator> baseline =
      std::make_shared<BaselineAnnotator>(meta.condition_markers);
  std::unique_ptr<SidecarAnnotator> sidecar;
  if (!a.annotations.empty())
    sidecar.reset(new SidecarAnnotator(SidecarAnnotator::load(a.annotations, baseline)));

  PipelineOptions opts;
  opts.extraction = {a.coverage_threshold, a.preamble_ratio, a.max_depth};
  opts.linking = !a.no_linking;
  opts.annotator = sidecar ? static_cast<const Annotator*>(sidecar.get()) : baseline.get();

  if (write) {
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
  }

  bool failed = false;
  for (const auto& path : expand_inputs(a.inputs)) {
    ++report.inputs_processed;
    const auto file = path.string();
    PageResult page;
    try {
      page = process_page(read_file(path), meta, opts, "file:" + file);
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      err << file << ": " << e.kind() << ": " << e.what() << "\n";
      report.add(file, e.kind(), e.what());
      failed = true;
      continue;
    }
    for (const auto& d : page.diagnostics) {
      err << file << ": " << d.rule << ": " << d.message << "\n";
      report.add(file, d.rule, d.message);
      failed = true;
    }
    report.counts.procedures += page.counts.procedures;
    report.counts.steps += page.counts.steps;
    report.counts.conditional_blocks += page.counts.conditional_blocks;
    report.counts.mentions += page.counts.mentions;

    const auto url = *page.outline.source_url;
    const bool has_url = page.doc.source_url.has_value();
    const auto name = text::sha256_hex(has_url ? url : file) + ".micrograph.json";
    json line = {{"file", file},
                 {"url", url},
                 {"procedures", page.counts.procedures},
                 {"steps", page.counts.steps},
                 {"conditional_blocks", page.counts.conditional_blocks},
                 {"mentions", page.counts.mentions}};
    if (write) {
      const auto target = fs::path(a.out_dir) / name;
      std::ofstream o(target, std::ios::binary | std::ios::trunc);
      o << serialize_canonical(page.graph);
      o.close();
      if (!o) throw IoError("cannot write " + target.string());
      ++report.micrographs_written;
      line["output"] = target.string();
    }
    out << dump(line) << "\n";
  }
  if (sidecar && sidecar->misses() > 0)
    err << "annotations: " << sidecar->misses() << " text(s) fell back to the baseline annotator\n";
  return a.strict && failed ? kFailure : kOk;
}

int validate(const std::vector<std::string>& files, std::ostream& out, std::ostream& err) {
  bool any = false;
  for (const auto& f : files) {
    const auto bytes = read_file(f);
    json line = {{"file", f}};
    std::vector<Violation> v;
    try {
      v = validate_schema(bytes);
    } catch (const SyntaxError& e) {
      v.push_back({"syntax", "", e.what()});
    }
    json list = json::array();
    for (const auto& x : v) {
      list.push_back({{"rule", x.rule}, {"subject", x.subject}, {"message", x.message}});
      err << f << ": " << x.rule << " " << x.subject << ": " << x.message << "\n";
    }
    line["ok"] = v.empty();
    line["violations"] = list;
    any = any || !v.empty();
    out << dump(line) << "\n";
  }
  return any ? kFailure : kOk;
}

int ingest(const std::string& store_dir, const std::vector<std::string>& files, std::ostream& out,
           std::ostream& err) {
  auto store = GraphStore::open(store_dir, GraphStore::Mode::Write);
  bool failed = false;
  for (const auto& f : files) {
    try {
      const auto g = parse_micrograph(read_file(f));
      const auto r = store.ingest(g);
      out << dump({{"file", f},
                   {"nodes_added", r.nodes_added},
                   {"edges_added", r.edges_added},
                   {"duplicates_skipped", r.duplicates_skipped}})
          << "\n";
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      err << f << ": " << e.kind() << ": " << e.what() << "\n";
      failed = true;
    }
  }
  return failed ? kFailure : kOk;
}

json node_line(const GraphNode& n) { return {{"id", n.id}, {"kind", to_string(n.kind)}, {"props", n.props}}; }

int query(const std::string& store_dir, const std::string& what, const std::string& arg,
          std::ostream& out) {
  const auto store = GraphStore::open(store_dir, GraphStore::Mode::Read);
  if (what == "mentions") {
    for (const auto& d : store.find_documents_mentioning(arg))
      out << dump({{"url", d.props.value("url", "")}, {"document", d.id}}) << "\n";
    return kOk;
  }
  const auto g = store.export_micrograph(arg);
  if (what == "export") {
    out << serialize_canonical(g);
    return kOk;
  }
  // Steps and conditions in page order: walk procedures depth first.
  std::function<void(const std::string&, int)> walk_proc;
  auto ordered = [&](const std::string& id, EdgeKind kind) {
    return store.query_neighbors(id, kind, Direction::Out);
  };
  walk_proc = [&](const std::string& pid, int depth) {
    for (const auto& step : ordered(pid, EdgeKind::HAS_STEP)) {
      if (what == "steps") {
        out << dump({{"procedure", pid}, {"depth", depth}, {"step", node_line(step)}}) << "\n";
      } else {
        for (const auto& c : ordered(step.id, EdgeKind::HAS_CONDITION))
          out << dump({{"step", step.id}, {"condition", node_line(c)}}) << "\n";
      }
      for (const auto& n : ordered(step.id, EdgeKind::HAS_NESTED)) walk_proc(n.id, depth + 1);
    }
  };
  for (const auto& s : ordered(g.document, EdgeKind::HAS_SECTION))
    for (const auto& p : ordered(s.id, EdgeKind::HAS_PROCEDURE)) walk_proc(p.id, 0);
  return kOk;
}

int store_stats(const std::string& store_dir, std::ostream& out) {
  const auto store = GraphStore::open(store_dir, GraphStore::Mode::Read);
  const auto& ix = store.index();
  std::map<std::string, std::size_t> kinds;
  for (const auto& [id, n] : ix.nodes) ++kinds[std::string(to_string(n.kind))];
  std::size_t mentions = 0;
  for (const auto& [k, e] : ix.edges) mentions += e.kind == EdgeKind::MENTIONS;
  out << dump({{"documents", ix.documents.size()},
               {"nodes", ix.nodes.size()},
               {"edges", ix.edges.size()},
               {"node_kinds", kinds},
               {"procedures", kinds["Procedure"]},
               {"steps", kinds["Step"]},
               {"conditional_blocks", kinds["ConditionalBlock"]},
               {"mentions", mentions}})
      << "\n";
  return kOk;
}

int dispatch(CLI::App& app, const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  ExtractArgs ex;
  auto add_extract_options = [&](CLI::App* sub) {
    sub->add_option("--meta", ex.meta, "corpus meta-information JSON (default: $MICROGRAPH_META)");
    sub->add_option("--coverage-threshold", ex.coverage_threshold, "minimum parent stepset coverage");
    sub->add_option("--preamble-ratio", ex.preamble_ratio,
                    "largest preamble share ignored by coverage");
    sub->add_option("--max-depth", ex.max_depth, "procedure nesting cap");
    sub->add_flag("--no-linking", ex.no_linking, "skip entity and action linking");
    sub->add_option("--annotations", ex.annotations, "JSON-lines sidecar of sentence annotations");
    sub->add_flag("--strict", ex.strict, "exit 1 when any diagnostic is raised");
  };

  auto* extract_cmd = app.add_subcommand("extract", "HTML pages to micrograph JSON files");
  extract_cmd->add_option("inputs", ex.inputs, "HTML files or directories")->required();
  extract_cmd->add_option("--out", ex.out_dir, "output directory");
  add_extract_options(extract_cmd);

  std::vector<std::string> files;
  auto* validate_cmd = app.add_subcommand("validate", "check micrograph files");
  validate_cmd->add_option("files", files, "micrograph JSON files")->required();

  std::string store_dir;
  auto* ingest_cmd = app.add_subcommand("ingest", "add micrographs to a store");
  ingest_cmd->add_option("--store", store_dir, "store directory")->required();
  ingest_cmd->add_option("files", files, "micrograph JSON files")->required();

  auto* query_cmd = app.add_subcommand("query", "read from a store");
  query_cmd->add_option("--store", store_dir, "store directory")->required();
  query_cmd->require_subcommand(1);
  std::string query_arg;
  for (const auto& [name, what] :
       std::vector<std::pair<const char*, const char*>>{{"mentions", "CANONICAL"},
                                                        {"steps", "URL"},
                                                        {"conditions", "URL"},
                                                        {"export", "URL"}}) {
    auto* q = query_cmd->add_subcommand(name, std::string(name) + " " + what);
    q->add_option("arg", query_arg, what)->required();
  }

  auto* stats_cmd = app.add_subcommand("stats", "RunReport for a store or for HTML inputs");
  stats_cmd->add_option("--store", store_dir, "store directory");
  stats_cmd->add_option("inputs", ex.inputs, "HTML files or directories");
  add_extract_options(stats_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "rebuild store indexes and compare");
  verify_cmd->add_option("--store", store_dir, "store directory")->required();

  app.require_subcommand(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (extract_cmd->parsed()) {
    RunReport report;
    const int code = extract(ex, true, out, err, report);
    out << dump({{"run_report", report.to_json()}}) << "\n";
    return code;
  }
  if (validate_cmd->parsed()) return validate(files, out, err);
  if (ingest_cmd->parsed()) return ingest(store_dir, files, out, err);
  if (query_cmd->parsed()) {
    for (auto* sub : query_cmd->get_subcommands())
      return query(store_dir, sub->get_name(), query_arg, out);
  }
  if (stats_cmd->parsed()) {
    if (!store_dir.empty() && !ex.inputs.empty())
      throw UsageError("stats takes either --store or inputs, not both");
    if (!store_dir.empty()) return store_stats(store_dir, out);
    if (ex.inputs.empty()) throw UsageError("stats needs --store or inputs");
    RunReport report;
    const int code = extract(ex, false, err, err, report);
    out << dump(report.to_json()) << "\n";
    return code;
  }
  if (verify_cmd->parsed()) {
    const auto store = GraphStore::open(store_dir, GraphStore::Mode::Read);
    const auto problems = store.verify();
    out << dump({{"ok", problems.empty()}, {"problems", problems}}) << "\n";
    return problems.empty() ? kOk : kFailure;
  }
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Builds per-page knowledge graphs from technical support HTML pages."};
  app.name("micrograph");
  try {
    return dispatch(app, args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << e.kind() << ": " << e.what() << "\n";
    return kFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace micrograph::cli
