#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oracle.hpp"
#include "rtbopt/records.hpp"

namespace fixtures {

inline rtbopt::AuctionRecord auction(std::string id, std::initializer_list<std::pair<char const *, double>> bids)
{
  rtbopt::AuctionRecord a{std::move(id), {}};
  for (auto const &[who, amount] : bids)
  {
    rtbopt::Candidate c;
    c.advertiser_id = who;
    c.bid           = amount;
    a.candidates.push_back(c);
  }
  return a;
}

/// Bids (A,5), (B,3), (C,2).
inline rtbopt::AuctionRecord running_example()
{
  return auction("z1", {{"A", 5.0}, {"B", 3.0}, {"C", 2.0}});
}

inline rtbopt::AuctionRecord to_record(std::string id, oracle::Auction const &a)
{
  rtbopt::AuctionRecord r{std::move(id), {}};
  for (auto const &c : a)
  {
    rtbopt::Candidate rc;
    rc.advertiser_id    = c.id;
    rc.bid              = c.bid;
    rc.raw.memorability = c.memorability;
    rc.raw.ctr          = c.ctr;
    rc.raw.relevance    = c.relevance;
    rc.raw.saliency     = c.saliency;
    r.candidates.push_back(rc);
  }
  return r;
}

/// Small random auctions with bids drawn from a coarse lattice so that
/// ties occur regularly.
inline std::vector<oracle::Auction> random_instance(std::mt19937_64 &rng, std::size_t max_auctions,
                                                    std::size_t max_candidates)
{
  std::uniform_int_distribution<std::size_t> n_auctions(1, max_auctions);
  std::uniform_int_distribution<std::size_t> n_cands(1, max_candidates);
  std::uniform_int_distribution<int>         lattice(0, 8);
  std::uniform_real_distribution<double>     unit(0.0, 1.0);

  std::vector<oracle::Auction> out(n_auctions(rng));
  for (auto &a : out)
  {
    std::size_t const n = n_cands(rng);
    for (std::size_t i = 0; i < n; ++i)
    {
      oracle::Cand c;
      c.id           = std::string(1, static_cast<char>('A' + i));
      c.bid          = 0.5 * lattice(rng);
      c.memorability = unit(rng);
      c.ctr          = unit(rng);
      c.relevance    = unit(rng);
      c.saliency     = unit(rng);
      a.push_back(c);
    }
    std::shuffle(a.begin(), a.end(), rng);
  }
  return out;
}

inline std::vector<rtbopt::AuctionRecord> to_records(std::vector<oracle::Auction> const &instance)
{
  std::vector<rtbopt::AuctionRecord> out;
  for (std::size_t z = 0; z < instance.size(); ++z)
  {
    out.push_back(to_record("z" + std::to_string(z), instance[z]));
  }
  return out;
}

}  // namespace fixtures

namespace fixtures {

inline oracle::Auction to_oracle(rtbopt::AuctionRecord const &r)
{
  oracle::Auction a;
  for (auto const &c : r.candidates)
  {
    a.push_back({c.advertiser_id, c.bid, c.raw.memorability, c.raw.ctr, std::get<double>(c.raw.relevance),
                 c.raw.saliency});
  }
  return a;
}

}  // namespace fixtures
