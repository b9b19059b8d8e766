#include "doctest.h"

#include "flowscope/report.hpp"
#include "flowscope/svg.hpp"

#include "../support/fixtures.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace flowscope;

namespace {

struct Result
{
  int exit = -1;
  std::string out;
};

// Runs the CLI with stderr folded into a side file.
Result cli(const std::string& args, const std::filesystem::path& err_file = {})
{
  std::string cmd = std::string("'") + FLOWSCOPE_CLI + "' " + args;
  if (!err_file.empty()) {
    cmd += " 2>'" + err_file.string() + "'";
  }
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    r.out.append(buf, n);
  }
  const int status = ::pclose(pipe);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string q(const std::filesystem::path& p)
{
  return "'" + p.string() + "'";
}

} // namespace

TEST_CASE("cli: ingest, report and export-svg")
{
  const auto dir = fixture::temp_dir("cli");
  auto paths = fixture::write_catalog_files(dir);
  const auto snap_dir = dir / "snap";
  const auto err = dir / "stderr.txt";

  auto ingest = cli("ingest --taxonomy " + q(paths.taxonomy) + " --labels " + q(paths.labels) + " --features " +
                      q(paths.features) + " --evaluation " + q(paths.evaluation) + " --sources " +
                      q(paths.sources) + " --out " + q(snap_dir),
                    err);
  REQUIRE(ingest.exit == 0);
  auto snap = load_snapshot(snap_dir).snapshot;
  CHECK(snap->instances() == fixture::catalog()->instances());

  auto diag = cli("report --snapshot " + q(snap_dir) + " --kind diagnose --run M1 --min-flow 5", err);
  REQUIRE(diag.exit == 0);
  auto payload = json::parse(diag.out);
  CHECK(payload["findings"] == json(diagnose(snap->run("M1"), *snap, { 5, 3 })));

  auto acc = cli("report --snapshot " + q(snap_dir) + " --kind accuracy --run M1", err);
  REQUIRE(acc.exit == 0);
  auto rows = json::parse(acc.out)["rows"];
  CHECK(rows == json(accuracy_report(snap->run("M1"))));
  CHECK(rows[0].contains("category"));
  CHECK(rows[0].contains("sampleSize"));
  CHECK(rows[0].contains("accuracy"));

  // CLI and library/API payloads agree for every kind with defaults
  for (const std::string kind : { "quantity", "quality", "importance", "trend", "audit", "runs" }) {
    auto r = cli("report --snapshot " + q(snap_dir) + " --kind " + kind, err);
    INFO(kind << ": " << slurp(err));
    REQUIRE(r.exit == 0);
    CHECK(json::parse(r.out) == run_report(*snap, kind, {}));
  }

  const auto out = dir / "diff.json";
  REQUIRE(cli("report --snapshot " + q(snap_dir) + " --kind model-diff --runs M0,M1,M2 --out " + q(out), err).exit ==
          0);
  const auto svg = dir / "diff.svg";
  REQUIRE(cli("export-svg --in " + q(out) + " --out " + q(svg), err).exit == 0);
  CHECK(slurp(svg) == render_svg(layout_sankey(model_diff(std::span<const ModelRun>(snap->runs())))));
  const auto svg2 = dir / "diff2.svg";
  REQUIRE(cli("export-svg --in " + q(out) + " --out " + q(svg2), err).exit == 0);
  CHECK(slurp(svg) == slurp(svg2));

  std::filesystem::remove_all(dir);
}

TEST_CASE("cli: error exits")
{
  const auto dir = fixture::temp_dir("cli-errors");
  const auto err = dir / "stderr.txt";
  const auto snap_dir = dir / "snap";
  auto base = fixture::catalog();
  ModelRun oracle_run{ "perfect", 9, base->runs().front().records };
  for (auto& r : oracle_run.records) {
    r.predicted_label = r.true_label;
  }
  save_snapshot(*build_snapshot(base->taxonomy(), base->instances(), base->features(), { oracle_run },
                                base->sources()),
                snap_dir);

  // a perfect model has an empty misclassification flow
  auto perfect = cli("report --snapshot " + q(snap_dir) + " --kind misclassification --run perfect --out " +
                       q(dir / "empty.json"),
                     err);
  REQUIRE(perfect.exit == 0);
  CHECK(json::parse(slurp(dir / "empty.json"))["layout"].is_null());
  auto svg = cli("export-svg --in " + q(dir / "empty.json") + " --out " + q(dir / "flow.svg"), err);
  CHECK(svg.exit == 1);
  CHECK(slurp(err).find("EmptyFlow") != std::string::npos);

  auto missing = cli("report --snapshot " + q(snap_dir) + " --kind accuracy", err);
  CHECK(missing.exit == 1);
  CHECK(slurp(err).find("--run") != std::string::npos);

  auto unknown = cli("report --snapshot " + q(snap_dir) + " --kind accuracy --run nope", err);
  CHECK(unknown.exit == 1);
  CHECK(slurp(err).find("UnknownRun") != std::string::npos);

  CHECK(cli("report --snapshot " + q(snap_dir) + " --kind bogus", err).exit != 0);
  CHECK(cli("frobnicate", err).exit != 0);

  std::ofstream(dir / "bad_tax.jsonl") << "{\"id\":\"r\",\"name\":\"r\",\"level\":0}\n{\"id\":\"r\",\"name\":\"r\",\"level\":0}\n";
  auto bad = cli("ingest --taxonomy " + q(dir / "bad_tax.jsonl") + " --out " + q(dir / "x"), err);
  CHECK(bad.exit == 1);
  CHECK(slurp(err).find("DuplicateId") != std::string::npos);
  std::filesystem::remove_all(dir);
}
