// flowscope command-line front end: ingest, report, export-svg, serve, synth.
//
// Exit status: 0 success, 1 input or usage error, 2 internal error.

#include "flowscope/error.hpp"
#include "flowscope/report.hpp"
#include "flowscope/serialize.hpp"
#include "flowscope/service.hpp"
#include "flowscope/snapshot.hpp"
#include "flowscope/svg.hpp"
#include "flowscope/synth.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using flowscope::Error;
using flowscope::ErrorCode;
using nlohmann::json;

namespace {

constexpr const char* kDefaultBind = "127.0.0.1:8080";

std::string env_or(const char* name, const std::string& fallback)
{
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

void write_output(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  }
}

std::vector<std::string> split_list(const std::string& text)
{
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

// Accepts a bare layout or any report payload that embeds one.
std::string render_any(const json& j, flowscope::SvgSize size)
{
  if (!j.is_object()) {
    throw Error(ErrorCode::MalformedRecord, "layout file must hold a JSON object");
  }
  if (j.contains("nodes") && j.contains("links")) {
    return flowscope::render_svg(flowscope::sankey_layout_from_json(j), size);
  }
  if (j.contains("placements")) {
    return flowscope::render_svg(flowscope::radial_layout_from_json(j), size);
  }
  if (j.contains("polygon")) {
    return flowscope::render_svg(flowscope::violin_outline_from_json(j), size);
  }
  for (const char* key : { "layout", "outline", "radial" }) {
    if (j.contains(key)) {
      if (j[key].is_null()) {
        throw Error(ErrorCode::EmptyFlow, "the report holds no flows to render");
      }
      return render_any(j[key], size);
    }
  }
  throw Error(ErrorCode::MalformedRecord, "unrecognized layout JSON");
}

flowscope::Server* g_server = nullptr;

void on_signal(int)
{
  if (g_server) {
    g_server->stop();
  }
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Flow-based diagnostics for hierarchical classification data" };
  app.require_subcommand(1);

  // ingest
  flowscope::IngestPaths paths;
  std::string ingest_out;
  bool allow_inner = false;
  auto* ingest = app.add_subcommand("ingest", "Validate input files and write a snapshot directory");
  ingest->add_option("--taxonomy", paths.taxonomy, "taxonomy.jsonl")->required();
  ingest->add_option("--labels", paths.labels, "labels.jsonl");
  ingest->add_option("--features", paths.features, "features.jsonl");
  ingest->add_option("--evaluation", paths.evaluation, "evaluation.jsonl (any number of runs)");
  ingest->add_option("--sources", paths.sources, "sources.jsonl trust registry");
  ingest->add_option("--out", ingest_out, "snapshot directory")->required();
  ingest->add_flag("--allow-inner-labels", allow_inner, "accept labels on inner taxonomy nodes");

  // report
  std::string snapshot_dir = env_or("FLOWSCOPE_SNAPSHOT", "");
  std::string kind;
  std::string runs_text;
  std::string report_out;
  flowscope::ReportParams params;
  auto* report = app.add_subcommand("report", "Run an analysis and print its JSON payload");
  report->add_option("--snapshot", snapshot_dir, "snapshot directory (default $FLOWSCOPE_SNAPSHOT)");
  report->add_option("--kind", kind, "analysis kind")
    ->required()
    ->check(CLI::IsMember(flowscope::report_kinds()));
  report->add_option("--run", params.run, "model id");
  report->add_option("--runs", runs_text, "comma-separated model ids (default: all, by ordinal)");
  report->add_option("--node", params.node, "taxonomy node (default: root)");
  report->add_option("--beta", params.beta, "quantity threshold factor")->check(CLI::Range(0.0, 1e9));
  report->add_option("--trust", params.trust, "trusted-share threshold")->check(CLI::Range(0.0, 1.0));
  report->add_option("--depth", params.depth, "multilevel depth")->check(CLI::Range(1, 64));
  report->add_option("--feature", params.feature, "feature name");
  report->add_option("--a", params.class_a, "first class for welch");
  report->add_option("--b", params.class_b, "second class for welch");
  report->add_option("--category", params.category, "category for violin");
  report->add_option("--epsilon", params.epsilon, "trend tolerance")->check(CLI::Range(0.0, 1.0));
  report->add_option("--min-flow", params.min_flow, "diagnose minimum flow")->check(CLI::Range(1, 1 << 30));
  report->add_option("--fanin", params.fanin, "diagnose broad-category fan-in")->check(CLI::Range(1, 1 << 20));
  report->add_option("--grid", params.grid, "violin grid points")->check(CLI::Range(2, 4096));
  report->add_option("--out", report_out, "output file (default stdout)");

  // export-svg
  std::string svg_in;
  std::string svg_out;
  flowscope::SvgSize size;
  auto* svg = app.add_subcommand("export-svg", "Render a layout JSON file to SVG");
  svg->add_option("--in", svg_in, "layout or report JSON")->required();
  svg->add_option("--out", svg_out, "SVG file (default stdout)");
  svg->add_option("--width", size.width, "pixels")->check(CLI::Range(50.0, 100000.0));
  svg->add_option("--height", size.height, "pixels")->check(CLI::Range(50.0, 100000.0));

  // serve
  std::string bind = env_or("FLOWSCOPE_BIND", kDefaultBind);
  auto* serve = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  serve->add_option("--snapshot", snapshot_dir, "snapshot directory (default $FLOWSCOPE_SNAPSHOT)");
  serve->add_option("--bind", bind, "host:port (default $FLOWSCOPE_BIND or 127.0.0.1:8080)");

  // synth
  flowscope::SynthOptions synth_options;
  std::string synth_out;
  std::string branching = "5,10,10";
  auto* synth = app.add_subcommand("synth", "Write a deterministic synthetic catalog");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_options.seed);
  synth->add_option("--instances", synth_options.instances);
  synth->add_option("--runs", synth_options.runs);
  synth->add_option("--eval", synth_options.eval_per_run, "evaluation records per run");
  synth->add_option("--branching", branching, "children per level, comma-separated");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) {
      flowscope::IngestOptions options;
      options.allow_inner_labels = allow_inner;
      auto result = flowscope::ingest_files(paths, options);
      for (const auto& w : result.warnings) {
        std::cerr << "warning: " << w << '\n';
      }
      flowscope::save_snapshot(*result.snapshot, ingest_out);
      const auto stats = result.snapshot->stats();
      std::cout << json{ { "snapshot", ingest_out },
                         { "instances", stats.instances },
                         { "runs", stats.run_sizes },
                         { "warnings", result.warnings.size() } }
                     .dump()
                << '\n';
      return 0;
    }
    if (*report) {
      if (snapshot_dir.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no snapshot: pass --snapshot or set FLOWSCOPE_SNAPSHOT");
      }
      params.runs = split_list(runs_text);
      const auto loaded = flowscope::load_snapshot(snapshot_dir);
      const auto payload = flowscope::run_report(*loaded.snapshot, kind, params);
      write_output(report_out, payload.dump(2) + "\n");
      return 0;
    }
    if (*svg) {
      std::ifstream in(svg_in);
      if (!in) {
        throw Error(ErrorCode::InvalidArgument, "cannot read " + svg_in);
      }
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedRecord, std::string("layout file is not JSON: ") + e.what());
      }
      write_output(svg_out, render_any(j, size));
      return 0;
    }
    if (*serve) {
      if (snapshot_dir.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no snapshot: pass --snapshot or set FLOWSCOPE_SNAPSHOT");
      }
      const auto [host, port] = flowscope::parse_bind_address(bind);
      flowscope::SnapshotStore store(flowscope::load_snapshot(snapshot_dir).snapshot, snapshot_dir);
      flowscope::Server server(store);
      const int bound = server.bind(host, port);
      if (bound < 0) {
        throw Error(ErrorCode::InvalidArgument, "cannot bind " + bind);
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ':' << bound << std::endl;
      const bool clean = server.run();
      g_server = nullptr;
      return clean ? 0 : 2;
    }
    if (*synth) {
      synth_options.branching.clear();
      for (const auto& b : split_list(branching)) {
        int v = 0;
        auto [end, ec] = std::from_chars(b.data(), b.data() + b.size(), v);
        if (ec != std::errc() || end != b.data() + b.size()) {
          throw Error(ErrorCode::InvalidArgument, "invalid --branching entry '" + b + "'");
        }
        synth_options.branching.push_back(v);
      }
      flowscope::write_catalog(flowscope::synthesize(synth_options), synth_out);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << flowscope::to_string(e.code()) << ": " << e.what() << '\n';
    for (std::size_t i = 0; i < e.details().size() && i < 20; ++i) {
      std::cerr << "  " << e.details()[i] << '\n';
    }
    return e.code() == ErrorCode::Internal ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
