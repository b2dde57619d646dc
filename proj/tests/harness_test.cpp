#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rtbopt/error.hpp"
#include "rtbopt/harness.hpp"

using namespace rtbopt;
namespace fs = std::filesystem;

namespace {

std::vector<AuctionRecord> small_dataset(std::size_t n, std::uint64_t seed = 42)
{
  GeneratorConfig cfg;
  cfg.n_auctions = n;
  cfg.bids.p2    = 0.3;
  cfg.seed       = seed;
  return generate_dataset(cfg);
}

SweepConfig quick(std::vector<double> grid, std::size_t folds)
{
  SweepConfig c;
  c.theta1_grid   = std::move(grid);
  c.folds         = folds;
  c.grid_step     = 0.25;
  c.normalization = NormalizationScope::PerDataset;
  return c;
}

std::string slurp(fs::path const &p)
{
  std::ifstream      in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(std::string const &name)
{
  auto const dir = fs::temp_directory_path() / ("rtbopt_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(std::string const &args)
{
  int const status = std::system((std::string(RTBOPT_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("default theta1 grid")
{
  auto const g = default_theta1_grid();
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == -0.05);
  CHECK(g.back() == -0.5);
}

TEST_CASE("zero revenue tolerance gives infeasible rows with zero change")
{
  auto const report = run_sweep(small_dataset(60), quick({0.0}, 3));
  REQUIRE(report.rows.size() == 6);
  for (auto const &row : report.rows)
  {
    CHECK(row.status == Status::Infeasible);
    CHECK(row.xi == std::array<double, 6>{});
    CHECK_FALSE(row.objective.has_value());
  }
}

TEST_CASE("sweep rows are ordered and train objectives grow with the tolerance")
{
  auto const report = run_sweep(small_dataset(90), quick({0.0, -0.1, -0.2, -0.4}, 3));
  REQUIRE(report.rows.size() == 4 * 3 * 2);
  for (std::size_t i = 0; i < report.rows.size(); ++i)
  {
    auto const &row = report.rows[i];
    CHECK(row.theta1 == report.metadata.theta1_grid[i / 6]);
    CHECK(row.fold == (i / 2) % 3);
    CHECK(row.split == (i % 2 == 0 ? Split::Train : Split::Test));
    if (row.status == Status::Feasible && row.split == Split::Train)
    {
      CHECK(std::fabs(row.xi[0]) <= std::fabs(row.theta1));
    }
  }
  for (std::size_t fold = 0; fold < 3; ++fold)
  {
    std::optional<double> previous;
    for (std::size_t t = 0; t < 4; ++t)
    {
      auto const &row = report.rows[t * 6 + fold * 2];
      if (!row.objective)
      {
        CHECK_FALSE(previous.has_value());
        continue;
      }
      if (previous)
      {
        CHECK(*row.objective >= *previous);
      }
      previous = row.objective;
    }
  }
  CHECK(report.metadata.n_auctions == 90);
  CHECK(report.metadata.dataset_fingerprint.size() == 16);
}

TEST_CASE("reports are deterministic and well formed")
{
  auto const ds  = small_dataset(40);
  auto const cfg = quick({-0.1, -0.3}, 2);
  auto const a   = run_sweep(ds, cfg);
  auto const b   = run_sweep(ds, cfg);
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(sweep_json(a) == sweep_json(b));

  auto const csv = sweep_csv(a);
  CHECK(csv.rfind("theta1,fold,split,status,objective,xi_revenue,xi_utility,xi_memorability,xi_ctr,"
                  "xi_relevance,xi_saliency\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 8);

  auto const summary = summary_csv(a);
  std::istringstream lines(summary);
  std::string        line;
  std::vector<std::string> rows;
  while (std::getline(lines, line))
  {
    rows.push_back(line);
  }
  REQUIRE(rows.size() == 5);
  CHECK(rows[1].rfind("-0.1,train,2,", 0) == 0);
  CHECK(rows[2].rfind("-0.1,test,2,", 0) == 0);
  CHECK(rows[3].rfind("-0.3,train,", 0) == 0);

  auto const j = nlohmann::json::parse(sweep_json(a));
  CHECK(j["metadata"]["seed"] == 42);
  CHECK(j["rows"].size() == 8);

  auto const dir1  = scratch("report1");
  auto const dir2  = scratch("report2");
  auto const paths = emit_report(a, dir1);
  CHECK(paths.size() == 3);
  emit_report(b, dir2);
  for (char const *name : {"sweep.csv", "summary.csv", "sweep.json"})
  {
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }
  CHECK(emit_report(a, scratch("report3"), {ReportFormat::Json}).size() == 1);
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  fs::remove_all(fs::temp_directory_path() / "rtbopt_report3");
}

TEST_CASE("sweep input validation")
{
  auto const ds = small_dataset(10);
  CHECK_THROWS_AS(run_sweep(ds, quick({0.1}, 2)), ValidationError);
  CHECK_THROWS_AS(run_sweep(ds, quick({}, 2)), ValidationError);
  CHECK_THROWS_WITH(run_sweep(ds, quick({-0.1}, 11)), doctest::Contains("too few auctions"));
}

TEST_CASE("saved weights round trip")
{
  auto const ds     = prepare_dataset(small_dataset(30), 0.0, NormalizationScope::PerDataset);
  auto const thr    = TradeoffThresholds::make(-0.3, {0, 0, 0, 0, 0});
  auto const result = optimize_weights(ds, thr, 0.25);
  auto const saved  = parse_result_json(result_json(result, thr, 0.25, NormalizationScope::PerDataset, 0.0));
  CHECK(saved.weights == result.weights);
  CHECK(saved.normalization == NormalizationScope::PerDataset);

  auto const eval = evaluate_dataset(ds, saved.weights);
  CHECK(eval.proposed.size() == 30);
  if (result.train_changes)
  {
    CHECK(eval.changes == *result.train_changes);
    CHECK(eval.objective == doctest::Approx(*result.objective));
  }
  CHECK(evaluate_dataset(ds, std::nullopt).changes.xi == std::array<double, 6>{});

  CHECK(parse_normalization("dataset") == NormalizationScope::PerDataset);
  CHECK(to_string(NormalizationScope::PerAuction) == "auction");
  CHECK_THROWS_AS(parse_normalization("global"), ValidationError);
}

TEST_CASE("command line pipeline")
{
  auto const dir = scratch("cli");
  auto const d   = dir.string();
  REQUIRE(run("generate --n-auctions 40 --bid-params 0,0.3 --seed 5 --out " + d + "/data.csv") == 0);
  REQUIRE(fs::exists(dir / "data.csv"));
  CHECK(run("optimize --input " + d + "/data.csv --normalization dataset --theta1 -0.3 --grid-step 0.25 --out " + d +
            "/w.json") == 0);
  CHECK(run("evaluate --input " + d + "/data.csv --weights " + d + "/w.json --out " + d + "/eval") == 0);
  CHECK(fs::exists(dir / "eval" / "evaluation.json"));
  CHECK(fs::exists(dir / "eval" / "selections.csv"));
  CHECK(run("sweep --input " + d + "/data.csv --theta1-grid 0,-0.2 --folds 2 --grid-step 0.5 --out " + d +
            "/sw") == 0);
  CHECK(fs::exists(dir / "sw" / "sweep.csv"));
  CHECK(fs::exists(dir / "sw" / "summary.csv"));
  CHECK(fs::exists(dir / "sw" / "sweep.json"));

  // validation problems exit with 2
  CHECK(run("optimize --input " + d + "/data.csv --theta1 0.2") == 2);
  CHECK(run("optimize --input " + d + "/data.csv --grid-step 0.3") == 2);
  CHECK(run("generate --min-candidates 0 --out " + d + "/x.jsonl") == 2);
  CHECK(run("sweep --bogus") == 2);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "auction_id,advertiser_id,bid,ctr,memorability,saliency,relevance\na,x,1,1.5,0,0,0\n";
  }
  CHECK(run("optimize --input " + d + "/bad.csv") == 2);
  // a missing file is a runtime error
  CHECK(run("optimize --input " + d + "/nothing.jsonl") == 1);
  fs::remove_all(dir);
}
