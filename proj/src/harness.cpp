#include "rtbopt/harness.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rtbopt/error.hpp"

namespace rtbopt {

namespace {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Split s)
{
  return s == Split::Train ? "train" : "test";
}

std::string_view to_string(Status s)
{
  return s == Status::Feasible ? "feasible" : "infeasible";
}

std::string optional_number(std::optional<double> const &v)
{
  return v ? format_number(*v) : std::string{};
}

ojson optional_json(std::optional<double> const &v)
{
  return v ? ojson(*v) : ojson(nullptr);
}

ojson composition_json(std::optional<Composition> const &c)
{
  return c ? ojson(*c) : ojson(nullptr);
}

}  // namespace

std::vector<double> default_theta1_grid()
{
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i)
  {
    grid.push_back(i == 0 ? 0.0 : -static_cast<double>(i) / 20.0);
  }
  return grid;
}

std::string_view to_string(NormalizationScope scope)
{
  return scope == NormalizationScope::PerAuction ? "auction" : "dataset";
}

NormalizationScope parse_normalization(std::string_view text)
{
  if (text == "auction")
  {
    return NormalizationScope::PerAuction;
  }
  if (text == "dataset")
  {
    return NormalizationScope::PerDataset;
  }
  throw ValidationError("unknown normalization scope '" + std::string(text) + "'");
}

SweepReport run_sweep(std::span<AuctionRecord const> dataset, SweepConfig const &config)
{
  if (config.theta1_grid.empty())
  {
    throw ValidationError("theta1 grid is empty");
  }
  std::vector<TradeoffThresholds> thresholds;
  for (double const t : config.theta1_grid)
  {
    thresholds.push_back(TradeoffThresholds::make(t, config.theta_others));
  }
  grid_parts(config.grid_step);

  auto const prepared = prepare_dataset(dataset, config.reserve, config.normalization);
  auto const folds    = split_folds(prepared.size(), config.folds, config.seed);

  SweepReport report;
  report.metadata = SweepMetadata{config.seed,        config.grid_step,          config.folds,
                                  fingerprint(dataset), dataset.size(),           config.theta1_grid,
                                  config.theta_others, config.reserve,           config.normalization};
  std::size_t const n_theta = config.theta1_grid.size();
  report.rows.resize(n_theta * folds.size() * 2);

  for (std::size_t f = 0; f < folds.size(); ++f)
  {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < folds.size(); ++g)
    {
      if (g != f)
      {
        train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
      }
    }
    std::sort(train_idx.begin(), train_idx.end());
    auto test_idx = folds[f];
    std::sort(test_idx.begin(), test_idx.end());

    try
    {
      TrainingSet const train(prepared, train_idx);
      TrainingSet const test(prepared, test_idx);
      auto const        grid = evaluate_grid(train, config.grid_step, config.threads);

      for (std::size_t t = 0; t < n_theta; ++t)
      {
        auto const result  = select_optimum(grid, thresholds[t]);
        auto const outcome = score_fold(f, result, train, test);
        if (result.status == Status::Feasible && !satisfies(outcome.train_changes, thresholds[t]))
        {
          throw Error("optimizer returned weights violating the thresholds on the training set");
        }

        auto &train_row = report.rows[(t * folds.size() + f) * 2];
        auto &test_row  = report.rows[(t * folds.size() + f) * 2 + 1];
        for (auto *row : {&train_row, &test_row})
        {
          row->theta1      = config.theta1_grid[t];
          row->fold        = f;
          row->status      = result.status;
          row->composition = result.composition;
        }
        train_row.split     = Split::Train;
        train_row.objective = outcome.train_objective;
        train_row.xi        = outcome.train_changes.xi;
        test_row.split      = Split::Test;
        test_row.objective  = outcome.test_objective;
        test_row.xi         = outcome.test_changes.xi;
      }
    }
    catch (ValidationError const &e)
    {
      throw ValidationError("fold " + std::to_string(f) + ": " + e.what());
    }
    catch (Error const &e)
    {
      throw Error("fold " + std::to_string(f) + ": " + e.what());
    }
  }
  return report;
}

std::string sweep_csv(SweepReport const &report)
{
  std::ostringstream out;
  out << "theta1,fold,split,status,objective";
  for (auto const name : kMetricNames)
  {
    out << ",xi_" << name;
  }
  out << '\n';
  for (auto const &row : report.rows)
  {
    out << format_number(row.theta1) << ',' << row.fold << ',' << to_string(row.split) << ','
        << to_string(row.status) << ',' << optional_number(row.objective);
    for (double const xi : row.xi)
    {
      out << ',' << format_number(xi);
    }
    out << '\n';
  }
  return out.str();
}

std::string summary_csv(SweepReport const &report)
{
  std::ostringstream out;
  out << "theta1,split,folds,feasible_folds,mean_objective";
  for (auto const name : kMetricNames)
  {
    out << ",xi_" << name;
  }
  out << '\n';

  for (double const theta : report.metadata.theta1_grid)
  {
    for (auto const split : {Split::Train, Split::Test})
    {
      std::size_t                      n         = 0;
      std::size_t                      feasible  = 0;
      std::size_t                      with_obj  = 0;
      double                           obj_sum   = 0.0;
      std::array<double, kMetricCount> xi_sum{};
      for (auto const &row : report.rows)
      {
        if (row.theta1 != theta || row.split != split)
        {
          continue;
        }
        ++n;
        feasible += row.status == Status::Feasible ? 1 : 0;
        if (row.objective)
        {
          ++with_obj;
          obj_sum += *row.objective;
        }
        for (std::size_t k = 0; k < kMetricCount; ++k)
        {
          xi_sum[k] += row.xi[k];
        }
      }
      out << format_number(theta) << ',' << to_string(split) << ',' << n << ',' << feasible << ','
          << (with_obj ? format_number(obj_sum / static_cast<double>(with_obj)) : std::string{});
      for (double const s : xi_sum)
      {
        out << ',' << format_number(n ? s / static_cast<double>(n) : 0.0);
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string sweep_json(SweepReport const &report)
{
  auto const &m = report.metadata;
  ojson       j;
  j["metadata"] = {{"seed", m.seed},
                   {"grid_step", m.grid_step},
                   {"folds", m.folds},
                   {"dataset_fingerprint", m.dataset_fingerprint},
                   {"n_auctions", m.n_auctions},
                   {"theta1_grid", m.theta1_grid},
                   {"theta_others", m.theta_others},
                   {"reserve", m.reserve},
                   {"normalization", to_string(m.normalization)},
                   {"metrics", kMetricNames}};
  auto &rows = j["rows"];
  rows       = ojson::array();
  for (auto const &row : report.rows)
  {
    rows.push_back({{"theta1", row.theta1},
                    {"fold", row.fold},
                    {"split", to_string(row.split)},
                    {"status", to_string(row.status)},
                    {"objective", optional_json(row.objective)},
                    {"xi", row.xi},
                    {"composition", composition_json(row.composition)}});
  }
  return j.dump(2) + "\n";
}

namespace {

std::filesystem::path write_file(std::filesystem::path const &path, std::string const &content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out)
  {
    throw Error("cannot write '" + path.string() + "'");
  }
  return path;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(SweepReport const &report, std::filesystem::path const &out_dir,
                                               std::set<ReportFormat> const &formats)
{
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
  {
    throw Error("cannot create '" + out_dir.string() + "': " + ec.message());
  }
  std::vector<std::filesystem::path> paths;
  if (formats.contains(ReportFormat::Csv))
  {
    paths.push_back(write_file(out_dir / "sweep.csv", sweep_csv(report)));
    paths.push_back(write_file(out_dir / "summary.csv", summary_csv(report)));
  }
  if (formats.contains(ReportFormat::Json))
  {
    paths.push_back(write_file(out_dir / "sweep.json", sweep_json(report)));
  }
  return paths;
}

std::string result_json(OptimizationResult const &result, TradeoffThresholds const &thresholds, double grid_step,
                        NormalizationScope normalization, double reserve)
{
  ojson j;
  j["status"]        = to_string(result.status);
  j["grid_step"]     = grid_step;
  j["normalization"] = to_string(normalization);
  j["reserve"]       = reserve;
  j["thresholds"]    = thresholds.theta;
  j["metrics"]       = kMetricNames;
  j["composition"]   = composition_json(result.composition);
  j["weights"]       = result.weights ? ojson(result.weights->weights()) : ojson(nullptr);
  j["objective"]     = optional_json(result.objective);
  j["train_xi"]      = result.train_changes ? ojson(result.train_changes->xi) : ojson(nullptr);
  j["candidates_evaluated"] = result.candidates_evaluated;
  return j.dump(2) + "\n";
}

SavedWeights parse_result_json(std::string const &text)
{
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(text);
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ValidationError(std::string("weights file: ") + e.what());
  }

  SavedWeights saved;
  try
  {
    if (j.contains("normalization"))
    {
      saved.normalization = parse_normalization(j.at("normalization").get<std::string>());
    }
    if (j.contains("reserve"))
    {
      saved.reserve = j.at("reserve").get<double>();
    }
    if (j.value("status", std::string("feasible")) == "infeasible")
    {
      return saved;
    }
    auto const comp = j.find("composition");
    if (comp != j.end() && !comp->is_null() && j.contains("grid_step"))
    {
      saved.weights = WeightVector::from_composition(comp->get<Composition>(),
                                                     grid_parts(j.at("grid_step").get<double>()));
    }
    else
    {
      saved.weights = WeightVector::from_weights(j.at("weights").get<std::array<double, kMetricCount>>());
    }
  }
  catch (nlohmann::json::exception const &e)
  {
    throw ValidationError(std::string("weights file: ") + e.what());
  }
  return saved;
}

DatasetEvaluation evaluate_dataset(std::span<PreparedAuction const> dataset, std::optional<WeightVector> const &weights)
{
  DatasetEvaluation out;
  for (auto const &a : dataset)
  {
    out.proposed.push_back(select_with_fallback(weights, a));
    out.baseline.push_back(baseline_selection(a));
    out.objective += out.proposed.back().rank_score;
  }
  out.changes = change_report(out.proposed, out.baseline);
  return out;
}

}  // namespace rtbopt
