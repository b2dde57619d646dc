// Command-line front end: dataset generation, weight optimization,
// threshold sweeps and evaluation of saved weights.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtbopt/dataset.hpp"
#include "rtbopt/error.hpp"
#include "rtbopt/harness.hpp"
#include "rtbopt/optimizer.hpp"

namespace {

using namespace rtbopt;
namespace fs = std::filesystem;

constexpr int kExitValidation = 2;
constexpr int kExitRuntime    = 1;

fs::path default_out_dir()
{
  char const *env = std::getenv("RTBOPT_OUT_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
}

fs::path resolve_file(std::string const &flag, std::string_view default_name)
{
  return flag.empty() ? default_out_dir() / default_name : fs::path(flag);
}

fs::path resolve_dir(std::string const &flag)
{
  return flag.empty() ? default_out_dir() : fs::path(flag);
}

void ensure_parent(fs::path const &file)
{
  if (file.has_parent_path())
  {
    fs::create_directories(file.parent_path());
  }
}

DataFormat format_for(std::string const &flag, fs::path const &path)
{
  if (flag.empty())
  {
    return format_from_path(path);
  }
  if (flag == "jsonl")
  {
    return DataFormat::Jsonl;
  }
  if (flag == "csv")
  {
    return DataFormat::Csv;
  }
  throw ValidationError("unknown format '" + flag + "'");
}

template <std::size_t N>
std::array<double, N> fixed(std::vector<double> const &values, std::string const &flag)
{
  if (values.size() != N)
  {
    throw ValidationError(flag + " expects " + std::to_string(N) + " comma-separated values");
  }
  std::array<double, N> out{};
  std::copy(values.begin(), values.end(), out.begin());
  return out;
}

void write_text(fs::path const &path, std::string const &text)
{
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out)
  {
    throw Error("cannot write '" + path.string() + "'");
  }
}

std::string read_text(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error("cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct InputFlags
{
  std::string input;
  std::string format;
  double      reserve       = 0.0;
  std::string normalization = "auction";

  void attach(CLI::App *cmd)
  {
    cmd->add_option("--input", input, "Dataset file (.jsonl or .csv)")->required();
    cmd->add_option("--format", format, "Input format: jsonl or csv (default: by extension)");
    cmd->add_option("--reserve", reserve, "Reserve price")->capture_default_str();
    cmd->add_option("--normalization", normalization, "Normalization scope: auction or dataset")
        ->capture_default_str();
  }

  std::vector<AuctionRecord> load() const
  {
    return load_dataset(input, format_for(format, input));
  }
};

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Two-stage RTB re-ranking: auction simulation and trade-off weight search"};
  app.require_subcommand(1);

  // generate
  GeneratorConfig          gen;
  std::string              gen_out;
  std::string              gen_format;
  std::string              bid_kind   = "lognormal";
  std::vector<double>      bid_params = {0.0, 1.0};
  std::vector<double>      mem_range  = {0.0, 1.0};
  std::vector<double>      rel_range  = {0.0, 1.0};
  std::vector<double>      sal_range  = {0.0, 1.0};
  auto *generate = app.add_subcommand("generate", "Write a seeded synthetic dataset");
  generate->add_option("--n-auctions", gen.n_auctions)->capture_default_str();
  generate->add_option("--min-candidates", gen.min_candidates)->capture_default_str();
  generate->add_option("--max-candidates", gen.max_candidates)->capture_default_str();
  generate->add_option("--bid-dist", bid_kind, "lognormal or uniform")->capture_default_str();
  generate->add_option("--bid-params", bid_params, "mu,sigma or lo,hi")->delimiter(',');
  generate->add_option("--ctr-alpha", gen.ctr_alpha)->capture_default_str();
  generate->add_option("--ctr-beta", gen.ctr_beta)->capture_default_str();
  generate->add_option("--memorability", mem_range, "lo,hi")->delimiter(',');
  generate->add_option("--relevance", rel_range, "lo,hi")->delimiter(',');
  generate->add_option("--saliency", sal_range, "lo,hi")->delimiter(',');
  generate->add_option("--rho", gen.rho, "Bid/ctr correlation")->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("--out", gen_out, "Output file (default: $RTBOPT_OUT_DIR/dataset.jsonl)");
  generate->add_option("--format", gen_format, "jsonl or csv (default: by extension)");

  // optimize
  InputFlags          opt_in;
  double              theta1 = 0.0;
  std::vector<double> opt_others(kMetricCount - 1, 0.0);
  double              opt_step    = 0.05;
  unsigned            opt_threads = 0;
  std::string         opt_out;
  auto *optimize = app.add_subcommand("optimize", "Find weights on one training set");
  opt_in.attach(optimize);
  optimize->add_option("--theta1", theta1, "Revenue loss threshold (<= 0)")->capture_default_str();
  optimize->add_option("--theta-others", opt_others, "Five minimum increase rates")->delimiter(',');
  optimize->add_option("--grid-step", opt_step)->capture_default_str();
  optimize->add_option("--threads", opt_threads, "0 = all cores")->capture_default_str();
  optimize->add_option("--out", opt_out, "Weights file (default: $RTBOPT_OUT_DIR/weights.json)");

  // sweep
  InputFlags          sw_in;
  SweepConfig         sweep_cfg;
  std::vector<double> sw_others(kMetricCount - 1, 0.0);
  std::vector<std::string> sw_formats = {"csv", "json"};
  std::string         sw_out;
  auto *sweep = app.add_subcommand("sweep", "Cross-validated theta1 sweep");
  sw_in.attach(sweep);
  sweep->add_option("--theta1-grid", sweep_cfg.theta1_grid, "Comma-separated theta1 values")->delimiter(',');
  sweep->add_option("--theta-others", sw_others, "Five minimum increase rates")->delimiter(',');
  sweep->add_option("--folds", sweep_cfg.folds)->capture_default_str();
  sweep->add_option("--grid-step", sweep_cfg.grid_step)->capture_default_str();
  sweep->add_option("--seed", sweep_cfg.seed)->capture_default_str();
  sweep->add_option("--threads", sweep_cfg.threads, "0 = all cores")->capture_default_str();
  sweep->add_option("--formats", sw_formats, "csv,json")->delimiter(',');
  sweep->add_option("--out", sw_out, "Output directory (default: $RTBOPT_OUT_DIR or .)");

  // evaluate
  InputFlags  ev_in;
  std::string ev_weights;
  std::string ev_out;
  auto *evaluate = app.add_subcommand("evaluate", "Apply saved weights to a dataset");
  evaluate->add_option("--input", ev_in.input)->required();
  evaluate->add_option("--format", ev_in.format);
  evaluate->add_option("--weights", ev_weights, "File written by `optimize`")->required();
  evaluate->add_option("--out", ev_out, "Output directory (default: $RTBOPT_OUT_DIR or .)");

  try
  {
    app.parse(argc, argv);
  }
  catch (CLI::ParseError const &e)
  {
    int const code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try
  {
    if (*generate)
    {
      if (bid_kind == "lognormal")
      {
        gen.bids.kind = BidDistribution::Kind::Lognormal;
      }
      else if (bid_kind == "uniform")
      {
        gen.bids.kind = BidDistribution::Kind::Uniform;
      }
      else
      {
        throw ValidationError("invalid generator config: bid_distribution must be lognormal or uniform");
      }
      auto const bp     = fixed<2>(bid_params, "--bid-params");
      gen.bids.p1       = bp[0];
      gen.bids.p2       = bp[1];
      auto const mem    = fixed<2>(mem_range, "--memorability");
      auto const rel    = fixed<2>(rel_range, "--relevance");
      auto const sal    = fixed<2>(sal_range, "--saliency");
      gen.memorability  = {mem[0], mem[1]};
      gen.relevance     = {rel[0], rel[1]};
      gen.saliency      = {sal[0], sal[1]};
      auto const path   = resolve_file(gen_out, "dataset.jsonl");
      auto const data   = generate_dataset(gen);
      ensure_parent(path);
      save_dataset(data, path, format_for(gen_format, path));
      std::cout << path.string() << ": " << data.size() << " auctions, fingerprint " << fingerprint(data) << '\n';
    }
    else if (*optimize)
    {
      auto const thresholds = TradeoffThresholds::make(theta1, fixed<kMetricCount - 1>(opt_others, "--theta-others"));
      auto const scope      = parse_normalization(opt_in.normalization);
      auto const data       = opt_in.load();
      auto const prepared   = prepare_dataset(data, opt_in.reserve, scope);
      auto const result     = optimize_weights(prepared, thresholds, opt_step, opt_threads);
      auto const path       = resolve_file(opt_out, "weights.json");
      write_text(path, result_json(result, thresholds, opt_step, scope, opt_in.reserve));
      std::cout << path.string() << ": "
                << (result.status == Status::Feasible ? "feasible" : "infeasible (baseline fallback)") << '\n';
    }
    else if (*sweep)
    {
      sweep_cfg.theta_others  = fixed<kMetricCount - 1>(sw_others, "--theta-others");
      sweep_cfg.reserve       = sw_in.reserve;
      sweep_cfg.normalization = parse_normalization(sw_in.normalization);
      std::set<ReportFormat> formats;
      for (auto const &f : sw_formats)
      {
        if (f == "csv")
        {
          formats.insert(ReportFormat::Csv);
        }
        else if (f == "json")
        {
          formats.insert(ReportFormat::Json);
        }
        else
        {
          throw ValidationError("unknown report format '" + f + "'");
        }
      }
      auto const data   = sw_in.load();
      auto const report = run_sweep(data, sweep_cfg);
      for (auto const &p : emit_report(report, resolve_dir(sw_out), formats))
      {
        std::cout << p.string() << '\n';
      }
    }
    else if (*evaluate)
    {
      auto const saved    = parse_result_json(read_text(ev_weights));
      auto const data     = ev_in.load();
      auto const prepared = prepare_dataset(data, saved.reserve, saved.normalization);
      auto const eval     = evaluate_dataset(prepared, saved.weights);
      auto const dir      = resolve_dir(ev_out);

      nlohmann::ordered_json j;
      j["fallback"]   = !saved.weights.has_value();
      j["n_auctions"] = eval.changes.n_auctions;
      j["objective"]  = eval.objective;
      j["metrics"]    = kMetricNames;
      j["xi"]         = eval.changes.xi;
      write_text(dir / "evaluation.json", j.dump(2) + "\n");

      std::ostringstream csv;
      csv << "auction_id,winner,baseline_winner,rank_score,payment\n";
      for (std::size_t z = 0; z < eval.proposed.size(); ++z)
      {
        auto const &p = eval.proposed[z];
        csv << p.auction_id << ',' << p.winner << ',' << eval.baseline[z].winner << ','
            << format_number(p.rank_score) << ',' << format_number(p.payment) << '\n';
      }
      write_text(dir / "selections.csv", csv.str());
      std::cout << (dir / "evaluation.json").string() << '\n' << (dir / "selections.csv").string() << '\n';
    }
  }
  catch (ValidationError const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
