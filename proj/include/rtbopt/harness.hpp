#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rtbopt/dataset.hpp"
#include "rtbopt/numbers.hpp"
#include "rtbopt/optimizer.hpp"
#include "rtbopt/rerank.hpp"

namespace rtbopt {

/// 0, -0.05, ..., -0.50.
std::vector<double> default_theta1_grid();

struct SweepConfig
{
  std::vector<double>                  theta1_grid = default_theta1_grid();
  std::array<double, kMetricCount - 1> theta_others{};
  std::size_t                          folds     = 10;
  double                               grid_step = 0.05;
  std::uint64_t                        seed      = 42;
  double                               reserve   = 0.0;
  NormalizationScope                   normalization = NormalizationScope::PerAuction;
  unsigned                             threads       = 0;
};

enum class Split
{
  Train,
  Test,
};

struct SweepRow
{
  double                           theta1 = 0.0;
  std::size_t                      fold   = 0;
  Split                            split  = Split::Train;
  Status                           status = Status::Infeasible;
  std::optional<double>            objective;
  std::array<double, kMetricCount> xi{};
  std::optional<Composition>       composition;
};

struct SweepMetadata
{
  std::uint64_t                        seed      = 0;
  double                               grid_step = 0.0;
  std::size_t                          folds     = 0;
  std::string                          dataset_fingerprint;
  std::size_t                          n_auctions = 0;
  std::vector<double>                  theta1_grid;
  std::array<double, kMetricCount - 1> theta_others{};
  double                               reserve = 0.0;
  NormalizationScope                   normalization = NormalizationScope::PerAuction;
};

/// Rows are ordered by (theta1 grid index, fold, train before test).
struct SweepReport
{
  std::vector<SweepRow> rows;
  SweepMetadata         metadata;
};

/// Cross-validated threshold sweep. Each fold's grid is evaluated once and
/// reused for every theta1. Every feasible train row is re-checked against
/// its thresholds; a violation throws Error.
SweepReport run_sweep(std::span<AuctionRecord const> dataset, SweepConfig const &config);

enum class ReportFormat
{
  Csv,
  Json,
};

/// Writes sweep.csv and summary.csv (Csv) and sweep.json (Json) into
/// out_dir. Returns the written paths.
std::vector<std::filesystem::path> emit_report(SweepReport const &report, std::filesystem::path const &out_dir,
                                               std::set<ReportFormat> const &formats = {ReportFormat::Csv,
                                                                                        ReportFormat::Json});

std::string sweep_csv(SweepReport const &report);
std::string summary_csv(SweepReport const &report);
std::string sweep_json(SweepReport const &report);

/// Stored optimizer output, as written by `rtbopt optimize`.
std::string result_json(OptimizationResult const &result, TradeoffThresholds const &thresholds, double grid_step,
                        NormalizationScope normalization, double reserve);

struct SavedWeights
{
  std::optional<WeightVector> weights;
  NormalizationScope          normalization = NormalizationScope::PerAuction;
  double                      reserve       = 0.0;
};

SavedWeights parse_result_json(std::string const &text);

struct DatasetEvaluation
{
  std::vector<Selection> proposed;
  std::vector<Selection> baseline;
  ChangeReport           changes;
  double                 objective = 0.0;
};

/// Applies saved weights (or the baseline, when none) to a dataset.
DatasetEvaluation evaluate_dataset(std::span<PreparedAuction const> dataset,
                                   std::optional<WeightVector> const &weights);

std::string_view to_string(NormalizationScope scope);
NormalizationScope parse_normalization(std::string_view text);

}  // namespace rtbopt
