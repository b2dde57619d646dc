#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rtbopt/metrics.hpp"
#include "rtbopt/rerank.hpp"

namespace rtbopt {

/// theta[0] is the largest tolerated revenue loss rate (<= 0); theta[1..5]
/// are the minimum increase rates of the other metrics (>= 0).
struct TradeoffThresholds
{
  std::array<double, kMetricCount> theta{};

  static TradeoffThresholds make(double revenue_loss, std::array<double, kMetricCount - 1> const &others);

  /// Throws ValidationError on a sign violation or a non-finite value.
  void validate() const;
};

/// xi_k: aggregate relative change of metric k between the proposed and the
/// baseline selections.
struct ChangeReport
{
  std::array<double, kMetricCount> xi{};
  std::size_t                      n_auctions = 0;

  bool operator==(ChangeReport const &) const = default;
};

/// |xi_1| <= |theta_1| and xi_k >= theta_k for k = 2..6.
bool satisfies(ChangeReport const &changes, TradeoffThresholds const &thresholds);

/// sum_z (x_k(proposed) - x_k(baseline)) / sum_z x_k(baseline). Lists are
/// aligned by position and must carry matching auction ids.
double change_ratio(Metric k, std::span<Selection const> proposed, std::span<Selection const> baseline);

ChangeReport change_report(std::span<Selection const> proposed, std::span<Selection const> baseline);

/// Flattened read-only view of a set of prepared auctions, laid out for
/// repeated weight evaluation.
class TrainingSet
{
public:
  explicit TrainingSet(std::span<PreparedAuction const> auctions);
  TrainingSet(std::span<PreparedAuction const> auctions, std::span<std::size_t const> subset);

  struct Evaluation
  {
    double                           objective = 0.0;
    std::array<double, kMetricCount> change_sums{};
    bool                             deviates = false;
  };

  Evaluation evaluate(WeightVector const &w) const;

  /// Throws Error ("degenerate baseline metric <name>") when a baseline sum
  /// is zero.
  ChangeReport changes(Evaluation const &evaluation) const;

  /// Throws the same error as changes() if any baseline sum is zero.
  void require_nondegenerate() const;

  std::size_t size() const
  {
    return offsets_.empty() ? 0 : offsets_.size() - 1;
  }

  std::array<double, kMetricCount> const &baseline_sums() const
  {
    return baseline_sums_;
  }

private:
  void add(PreparedAuction const &auction);
  void finish();

  std::vector<std::size_t>         offsets_;
  std::vector<double>              metrics_;
  std::array<double, kMetricCount> baseline_sums_{};
};

struct FeasibilityCheck
{
  bool         feasible = false;
  ChangeReport changes;
};

FeasibilityCheck feasible(WeightVector const &w, std::span<PreparedAuction const> train,
                          TradeoffThresholds const &thresholds);

/// sum over auctions of the selected candidate's rank score.
double objective(WeightVector const &w, std::span<PreparedAuction const> train);

/// Number of grid intervals M for a step of 1/M. Throws ValidationError
/// ("invalid grid step") otherwise.
int grid_parts(double step);

/// Every composition of `parts` into `dims` non-negative integers, in
/// descending lexicographic order: (parts, 0, ..., 0) first.
std::vector<std::vector<int>> simplex_compositions(std::size_t dims, int parts);

/// simplex_compositions scaled by step.
std::vector<std::vector<double>> enumerate_simplex(std::size_t dims, double step);

using Composition = std::array<int, kMetricCount>;

struct GridPoint
{
  Composition  composition{};
  double       objective = 0.0;
  ChangeReport changes;
  bool         deviates = false;
};

/// Objective and changes of every grid point on one training set. Threshold
/// independent, so one evaluation serves a whole threshold sweep.
struct GridEvaluation
{
  int                    parts = 0;
  std::vector<GridPoint> points;
};

/// threads == 0 uses the hardware concurrency. The result does not depend
/// on the thread count.
GridEvaluation evaluate_grid(TrainingSet const &train, double step, unsigned threads = 0);

enum class Status
{
  Feasible,
  Infeasible,
};

struct OptimizationResult
{
  Status                      status = Status::Infeasible;
  std::optional<WeightVector> weights;
  std::optional<Composition>  composition;
  std::optional<double>       objective;
  std::optional<ChangeReport> train_changes;
  std::size_t                 candidates_evaluated = 0;

  bool operator==(OptimizationResult const &) const = default;
};

/// Scans the grid in enumeration order and keeps the first point with the
/// largest objective among those satisfying the thresholds. The program is
/// infeasible when no point satisfies them, or when some point would change
/// a selection but every satisfying point reproduces the baseline.
OptimizationResult select_optimum(GridEvaluation const &grid, TradeoffThresholds const &thresholds);

OptimizationResult optimize_weights(std::span<PreparedAuction const> train,
                                    TradeoffThresholds const &thresholds, double step,
                                    unsigned threads = 0);

/// Outcome of one held-out fold.
struct FoldOutcome
{
  std::size_t           fold = 0;
  OptimizationResult    result;
  ChangeReport          train_changes;
  ChangeReport          test_changes;
  std::optional<double> train_objective;
  std::optional<double> test_objective;
};

/// Applies an optimization result to a train/test pair. Infeasible results
/// fall back to the baseline: all changes are zero and no objective is set.
FoldOutcome score_fold(std::size_t fold, OptimizationResult const &result, TrainingSet const &train,
                       TrainingSet const &test);

std::vector<FoldOutcome> cross_validate(std::span<PreparedAuction const> dataset, std::size_t folds,
                                        TradeoffThresholds const &thresholds, double step,
                                        std::uint64_t seed, unsigned threads = 0);

}  // namespace rtbopt
