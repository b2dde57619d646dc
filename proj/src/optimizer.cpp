#include "rtbopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "rtbopt/dataset.hpp"
#include "rtbopt/error.hpp"

namespace rtbopt {

TradeoffThresholds TradeoffThresholds::make(double revenue_loss, std::array<double, kMetricCount - 1> const &others)
{
  TradeoffThresholds t;
  t.theta[0] = revenue_loss;
  std::copy(others.begin(), others.end(), t.theta.begin() + 1);
  t.validate();
  return t;
}

void TradeoffThresholds::validate() const
{
  for (double const v : theta)
  {
    if (!std::isfinite(v))
    {
      throw ValidationError("thresholds must be finite");
    }
  }
  if (theta[0] > 0.0)
  {
    throw ValidationError("revenue threshold must be <= 0");
  }
  for (std::size_t k = 1; k < kMetricCount; ++k)
  {
    if (theta[k] < 0.0)
    {
      throw ValidationError("threshold for " + std::string(kMetricNames[k]) + " must be >= 0");
    }
  }
}

bool satisfies(ChangeReport const &changes, TradeoffThresholds const &thresholds)
{
  if (!(std::abs(changes.xi[0]) <= std::abs(thresholds.theta[0])))
  {
    return false;
  }
  for (std::size_t k = 1; k < kMetricCount; ++k)
  {
    if (!(changes.xi[k] >= thresholds.theta[k]))
    {
      return false;
    }
  }
  return true;
}

namespace {

[[noreturn]] void degenerate(std::size_t k)
{
  throw Error("degenerate baseline metric " + std::string(kMetricNames[k]));
}

void check_aligned(std::span<Selection const> proposed, std::span<Selection const> baseline)
{
  if (proposed.empty() || proposed.size() != baseline.size())
  {
    throw ValidationError("selection lists must be non-empty and of equal length");
  }
  for (std::size_t z = 0; z < proposed.size(); ++z)
  {
    if (proposed[z].auction_id != baseline[z].auction_id)
    {
      throw ValidationError("selection lists are not aligned at auction '" + proposed[z].auction_id + "'");
    }
  }
}

}  // namespace

double change_ratio(Metric k, std::span<Selection const> proposed, std::span<Selection const> baseline)
{
  check_aligned(proposed, baseline);
  auto const m    = index_of(k);
  double     diff = 0.0;
  double     base = 0.0;
  for (std::size_t z = 0; z < proposed.size(); ++z)
  {
    diff += proposed[z].metric_vector[m] - baseline[z].metric_vector[m];
    base += baseline[z].metric_vector[m];
  }
  if (base == 0.0)
  {
    degenerate(m);
  }
  return diff / base;
}

ChangeReport change_report(std::span<Selection const> proposed, std::span<Selection const> baseline)
{
  ChangeReport report;
  report.n_auctions = proposed.size();
  for (auto const k : kAllMetrics)
  {
    report.xi[index_of(k)] = change_ratio(k, proposed, baseline);
  }
  return report;
}

TrainingSet::TrainingSet(std::span<PreparedAuction const> auctions)
{
  for (auto const &a : auctions)
  {
    add(a);
  }
  finish();
}

TrainingSet::TrainingSet(std::span<PreparedAuction const> auctions, std::span<std::size_t const> subset)
{
  for (auto const i : subset)
  {
    add(auctions[i]);
  }
  finish();
}

void TrainingSet::add(PreparedAuction const &auction)
{
  if (auction.size() == 0)
  {
    throw ValidationError("empty auction '" + auction.auction_id + "'");
  }
  if (offsets_.empty())
  {
    offsets_.push_back(0);
  }
  for (auto const &v : auction.metrics)
  {
    metrics_.insert(metrics_.end(), v.begin(), v.end());
  }
  offsets_.push_back(offsets_.back() + auction.size());
}

void TrainingSet::finish()
{
  if (size() == 0)
  {
    throw ValidationError("training set is empty");
  }
  baseline_sums_.fill(0.0);
  for (std::size_t z = 0; z + 1 < offsets_.size(); ++z)
  {
    double const *base = metrics_.data() + offsets_[z] * kMetricCount;
    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      baseline_sums_[k] += base[k];
    }
  }
}

TrainingSet::Evaluation TrainingSet::evaluate(WeightVector const &w) const
{
  Evaluation    e;
  double const *data = metrics_.data();
  for (std::size_t z = 0; z + 1 < offsets_.size(); ++z)
  {
    std::size_t const first = offsets_[z];
    std::size_t const last  = offsets_[z + 1];

    std::size_t best       = first;
    double      best_score = rank_score(w, std::span<double const, kMetricCount>(data + first * kMetricCount,
                                                                                 kMetricCount));
    for (std::size_t i = first + 1; i < last; ++i)
    {
      double const s = rank_score(w, std::span<double const, kMetricCount>(data + i * kMetricCount, kMetricCount));
      if (s > best_score)
      {
        best       = i;
        best_score = s;
      }
    }

    e.objective += best_score;
    double const *chosen = data + best * kMetricCount;
    double const *base   = data + first * kMetricCount;
    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      e.change_sums[k] += chosen[k] - base[k];
    }
    e.deviates = e.deviates || best != first;
  }
  return e;
}

void TrainingSet::require_nondegenerate() const
{
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    if (baseline_sums_[k] == 0.0)
    {
      degenerate(k);
    }
  }
}

ChangeReport TrainingSet::changes(Evaluation const &evaluation) const
{
  require_nondegenerate();
  ChangeReport report;
  report.n_auctions = size();
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    report.xi[k] = evaluation.change_sums[k] / baseline_sums_[k];
  }
  return report;
}

FeasibilityCheck feasible(WeightVector const &w, std::span<PreparedAuction const> train,
                          TradeoffThresholds const &thresholds)
{
  thresholds.validate();
  TrainingSet const set(train);
  auto const        changes = set.changes(set.evaluate(w));
  return {satisfies(changes, thresholds), changes};
}

double objective(WeightVector const &w, std::span<PreparedAuction const> train)
{
  return TrainingSet(train).evaluate(w).objective;
}

int grid_parts(double step)
{
  if (!std::isfinite(step) || step <= 0.0 || step > 1.0)
  {
    throw ValidationError("invalid grid step");
  }
  double const m     = 1.0 / step;
  double const parts = std::round(m);
  if (std::abs(parts - m) > 1e-9 * parts || parts > 1e6)
  {
    throw ValidationError("invalid grid step: 1/step must be an integer");
  }
  return static_cast<int>(parts);
}

std::vector<std::vector<int>> simplex_compositions(std::size_t dims, int parts)
{
  if (dims < 1 || parts < 1)
  {
    throw ValidationError("invalid grid step");
  }
  std::vector<std::vector<int>> out;
  std::vector<int>              c(dims, 0);
  c[0] = parts;
  while (true)
  {
    out.push_back(c);
    if (dims == 1)
    {
      break;
    }
    // Successor in descending lexicographic order: take one unit from the
    // rightmost non-zero part before the last and give it, together with
    // the last part, to the position right after it.
    std::size_t j = dims - 1;
    while (j > 0 && c[j - 1] == 0)
    {
      --j;
    }
    if (j == 0)
    {
      break;
    }
    --j;
    int const tail = c[dims - 1];
    c[dims - 1]    = 0;
    c[j] -= 1;
    c[j + 1] = tail + 1;
  }
  return out;
}

std::vector<std::vector<double>> enumerate_simplex(std::size_t dims, double step)
{
  int const                        parts = grid_parts(step);
  auto const                       comps = simplex_compositions(dims, parts);
  std::vector<std::vector<double>> out;
  out.reserve(comps.size());
  for (auto const &c : comps)
  {
    std::vector<double> w(dims);
    std::transform(c.begin(), c.end(), w.begin(), [&](int v) { return static_cast<double>(v) / parts; });
    out.push_back(std::move(w));
  }
  return out;
}

GridEvaluation evaluate_grid(TrainingSet const &train, double step, unsigned threads)
{
  train.require_nondegenerate();

  GridEvaluation grid;
  grid.parts       = grid_parts(step);
  auto const comps = simplex_compositions(kMetricCount, grid.parts);
  grid.points.resize(comps.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g)
    {
      GridPoint &p = grid.points[g];
      std::copy(comps[g].begin(), comps[g].end(), p.composition.begin());
      auto const w = WeightVector::from_composition(p.composition, grid.parts);
      auto const e = train.evaluate(w);
      p.objective  = e.objective;
      p.changes    = train.changes(e);
      p.deviates   = e.deviates;
    }
  };

  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n          = static_cast<unsigned>(std::min<std::size_t>(n, comps.size()));
  if (n <= 1)
  {
    work(0, comps.size());
    return grid;
  }
  std::vector<std::jthread> pool;
  std::size_t const         chunk = (comps.size() + n - 1) / n;
  for (std::size_t begin = 0; begin < comps.size(); begin += chunk)
  {
    pool.emplace_back(work, begin, std::min(comps.size(), begin + chunk));
  }
  pool.clear();
  return grid;
}

OptimizationResult select_optimum(GridEvaluation const &grid, TradeoffThresholds const &thresholds)
{
  thresholds.validate();

  OptimizationResult result;
  result.candidates_evaluated = grid.points.size();

  GridPoint const *best               = nullptr;
  bool             any_deviation      = false;
  bool             admissible_change  = false;
  for (auto const &p : grid.points)
  {
    any_deviation = any_deviation || p.deviates;
    if (!satisfies(p.changes, thresholds))
    {
      continue;
    }
    admissible_change = admissible_change || p.deviates;
    if (best == nullptr || p.objective > best->objective)
    {
      best = &p;
    }
  }

  // Thresholds that admit only the baseline selections leave nothing to
  // re-rank: report infeasible so callers fall back to the highest bid.
  if (best == nullptr || (any_deviation && !admissible_change))
  {
    return result;
  }
  result.status        = Status::Feasible;
  result.weights       = WeightVector::from_composition(best->composition, grid.parts);
  result.composition   = best->composition;
  result.objective     = best->objective;
  result.train_changes = best->changes;
  return result;
}

OptimizationResult optimize_weights(std::span<PreparedAuction const> train, TradeoffThresholds const &thresholds,
                                    double step, unsigned threads)
{
  thresholds.validate();
  TrainingSet const set(train);
  return select_optimum(evaluate_grid(set, step, threads), thresholds);
}

FoldOutcome score_fold(std::size_t fold, OptimizationResult const &result, TrainingSet const &train,
                       TrainingSet const &test)
{
  FoldOutcome out;
  out.fold                    = fold;
  out.result                  = result;
  out.train_changes.n_auctions = train.size();
  out.test_changes.n_auctions  = test.size();
  if (result.status == Status::Infeasible)
  {
    return out;
  }
  auto const on_train = train.evaluate(*result.weights);
  auto const on_test  = test.evaluate(*result.weights);
  out.train_changes   = train.changes(on_train);
  out.test_changes    = test.changes(on_test);
  out.train_objective = on_train.objective;
  out.test_objective  = on_test.objective;
  return out;
}

std::vector<FoldOutcome> cross_validate(std::span<PreparedAuction const> dataset, std::size_t folds,
                                        TradeoffThresholds const &thresholds, double step, std::uint64_t seed,
                                        unsigned threads)
{
  thresholds.validate();
  auto const               parts = split_folds(dataset.size(), folds, seed);
  std::vector<FoldOutcome> out;
  out.reserve(parts.size());
  for (std::size_t f = 0; f < parts.size(); ++f)
  {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < parts.size(); ++g)
    {
      if (g != f)
      {
        train_idx.insert(train_idx.end(), parts[g].begin(), parts[g].end());
      }
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::vector<std::size_t> test_idx = parts[f];
    std::sort(test_idx.begin(), test_idx.end());

    TrainingSet const train(dataset, train_idx);
    TrainingSet const test(dataset, test_idx);
    auto const        result = select_optimum(evaluate_grid(train, step, threads), thresholds);
    out.push_back(score_fold(f, result, train, test));
  }
  return out;
}

}  // namespace rtbopt
