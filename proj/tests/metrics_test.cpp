#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "rtbopt/auction.hpp"
#include "rtbopt/error.hpp"
#include "rtbopt/metrics.hpp"

using namespace rtbopt;

TEST_CASE("normalize_per_auction")
{
  CHECK(normalize_per_auction(std::vector<double>{2, 4, 6}) == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(normalize_per_auction(std::vector<double>{3, 3}) == std::vector<double>{0.5, 0.5});
  CHECK(normalize_per_auction(std::vector<double>{7}) == std::vector<double>{0.5});
  CHECK_THROWS_AS(normalize_per_auction(std::vector<double>{1.0, NAN}), ValidationError);
  CHECK_THROWS_AS(normalize_per_auction(std::vector<double>{INFINITY}), ValidationError);
  CHECK_THROWS_AS(normalize_per_auction(std::vector<double>{}), ValidationError);
}

TEST_CASE("tokenize lowercases and splits on punctuation")
{
  CHECK(tokenize("Red-Shoe, size 42!") == std::vector<std::string>{"red", "shoe", "size", "42"});
  CHECK(tokenize("  ").empty());
}

TEST_CASE("lexical_relevance")
{
  using V = std::vector<std::string>;
  CHECK(lexical_relevance(V{"red", "shoe"}, V{"red", "shoe"}) == doctest::Approx(1.0));
  CHECK(lexical_relevance(V{"red", "shoe"}, V{"blue", "car"}) == 0.0);
  // 1 / (sqrt(2) * sqrt(2))
  CHECK(lexical_relevance(V{"red", "shoe"}, V{"red", "car"}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lexical_relevance(V{"RED"}, V{"red"}) == doctest::Approx(1.0));
  CHECK(lexical_relevance(V{}, V{}) == 0.0);
  CHECK(lexical_relevance(V{"red"}, V{}) == 0.0);

  // tf vectors (2,1) and (1,0): 2 / sqrt(5)
  CHECK(lexical_relevance(V{"red", "red", "shoe"}, V{"red"}) == doctest::Approx(2.0 / std::sqrt(5.0)));
}

TEST_CASE("lexical_relevance is symmetric and reflexive")
{
  std::mt19937_64                    rng(11);
  std::vector<std::string> const     vocab = {"a", "b", "c", "d", "e", "f"};
  std::uniform_int_distribution<int> len(0, 6);
  std::uniform_int_distribution<int> word(0, 5);
  for (int t = 0; t < 500; ++t)
  {
    std::vector<std::string> x, y;
    for (int i = len(rng); i > 0; --i)
    {
      x.push_back(vocab[word(rng)]);
    }
    for (int i = len(rng); i > 0; --i)
    {
      y.push_back(vocab[word(rng)]);
    }
    double const xy = lexical_relevance(x, y);
    REQUIRE(xy == lexical_relevance(y, x));
    REQUIRE(xy >= 0.0);
    REQUIRE(xy <= 1.0);
    if (!x.empty())
    {
      REQUIRE(lexical_relevance(x, x) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("relevance_of scores text pairs")
{
  RawMetrics raw;
  raw.relevance = TextPair{"Red shoe", "red car"};
  CHECK(relevance_of(raw) == doctest::Approx(0.5));
  raw.relevance = 0.25;
  CHECK(relevance_of(raw) == 0.25);
}

TEST_CASE("assemble_metric_vectors")
{
  auto       a  = fixtures::running_example();
  auto const s1 = run_stage_one(a);
  auto const x  = assemble_metric_vectors(a, s1);
  CHECK(x.at("A")[0] == 1.0);
  CHECK(x.at("B")[0] == doctest::Approx(2.0 / 3.0));
  CHECK(x.at("C")[0] == 0.0);
  // utilities {2, 1, 2}
  CHECK(x.at("A")[1] == 1.0);
  CHECK(x.at("B")[1] == 0.0);
  CHECK(x.at("C")[1] == 1.0);

  SUBCASE("identical candidates are all 0.5")
  {
    auto       twin = fixtures::auction("z", {{"A", 2.0}, {"B", 2.0}});
    auto const v    = assemble_metric_vectors(twin, run_stage_one(twin));
    for (auto const &[id, vec] : v)
    {
      for (double const e : vec)
      {
        CHECK(e == 0.5);
      }
    }
  }

  SUBCASE("single candidate")
  {
    auto       one = fixtures::auction("z", {{"A", 2.0}});
    auto const v   = assemble_metric_vectors(one, run_stage_one(one));
    CHECK(v.at("A") == MetricVector{0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  }

  SUBCASE("stage one must cover every candidate")
  {
    auto partial = s1;
    partial.per_candidate.erase("B");
    CHECK_THROWS_AS(assemble_metric_vectors(a, partial), ValidationError);
  }

  SUBCASE("non-finite raw values name candidate and metric")
  {
    a.candidates[1].raw.saliency = NAN;
    CHECK_THROWS_WITH(assemble_metric_vectors(a, s1),
                      doctest::Contains("candidate 'B' in auction 'z1', metric saliency"));
  }
}

TEST_CASE("assembled vectors lie in [0,1], hit both ends, ignore candidate order")
{
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t)
  {
    auto       inst = fixtures::random_instance(rng, 1, 6);
    auto       rec  = fixtures::to_record("z", inst[0]);
    auto const x    = assemble_metric_vectors(rec, run_stage_one(rec));

    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      double lo = 1.0, hi = 0.0;
      for (auto const &[id, v] : x)
      {
        REQUIRE(v[k] >= 0.0);
        REQUIRE(v[k] <= 1.0);
        lo = std::min(lo, v[k]);
        hi = std::max(hi, v[k]);
      }
      REQUIRE(((lo == 0.0 && hi == 1.0) || (lo == 0.5 && hi == 0.5)));
    }

    auto reversed = rec;
    std::reverse(reversed.candidates.begin(), reversed.candidates.end());
    REQUIRE(assemble_metric_vectors(reversed, run_stage_one(reversed)) == x);
  }
}
