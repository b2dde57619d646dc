#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rtbopt/records.hpp"

namespace rtbopt {

struct BidDistribution
{
  enum class Kind
  {
    Lognormal,  // (mu, sigma) of the underlying normal
    Uniform,    // (lo, hi)
  };

  Kind   kind = Kind::Lognormal;
  double p1   = 0.0;
  double p2   = 1.0;
};

struct UniformRange
{
  double lo = 0.0;
  double hi = 1.0;
};

struct GeneratorConfig
{
  std::size_t     n_auctions     = 5000;
  std::size_t     min_candidates = 3;
  std::size_t     max_candidates = 8;
  BidDistribution bids;
  double          ctr_alpha = 2.0;
  double          ctr_beta  = 8.0;
  UniformRange    memorability;
  UniformRange    relevance;
  UniformRange    saliency;
  /// Gaussian-copula correlation between bid and ctr.
  double          rho  = 0.0;
  std::uint64_t   seed = 42;

  /// Throws ValidationError "invalid generator config: <field> ..." on the
  /// first offending field.
  void validate() const;
};

std::vector<AuctionRecord> generate_dataset(GeneratorConfig const &cfg);

enum class DataFormat
{
  Jsonl,
  Csv,
};

/// By extension: .csv is CSV, anything else JSONL.
DataFormat format_from_path(std::filesystem::path const &path);

std::vector<AuctionRecord> read_jsonl(std::istream &in);
std::vector<AuctionRecord> read_csv(std::istream &in);
void write_jsonl(std::span<AuctionRecord const> dataset, std::ostream &out);
/// Throws ValidationError for text-pair relevance, which CSV cannot carry.
void write_csv(std::span<AuctionRecord const> dataset, std::ostream &out);

std::vector<AuctionRecord> load_dataset(std::filesystem::path const &path, DataFormat format);
void save_dataset(std::span<AuctionRecord const> dataset, std::filesystem::path const &path,
                  DataFormat format);

/// FNV-1a over the canonical JSONL text, as 16 hex digits.
std::string fingerprint(std::span<AuctionRecord const> dataset);

/// Seeded shuffle of 0..n-1 split into k contiguous folds; the first n % k
/// folds take one extra element.
std::vector<std::vector<std::size_t>> split_folds(std::size_t n, std::size_t k,
                                                  std::uint64_t seed);

}  // namespace rtbopt
