#include "oracle.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

std::vector<double> payments(Auction const &a, double reserve)
{
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    double p = reserve;
    for (std::size_t j = 0; j < a.size(); ++j)
    {
      if (j != i && a[j].bid <= a[i].bid && a[j].bid > p)
      {
        p = a[j].bid;
      }
    }
    out.push_back(p > a[i].bid ? a[i].bid : p);
  }
  return out;
}

std::vector<std::array<double, 6>> normalized(Auction const &a)
{
  auto const                         pay = payments(a);
  std::vector<std::array<double, 6>> raw;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    raw.push_back({pay[i], a[i].bid - pay[i], a[i].memorability, a[i].ctr, a[i].relevance, a[i].saliency});
  }
  for (int k = 0; k < 6; ++k)
  {
    double lo = raw[0][k];
    double hi = raw[0][k];
    for (auto const &r : raw)
    {
      lo = r[k] < lo ? r[k] : lo;
      hi = r[k] > hi ? r[k] : hi;
    }
    for (auto &r : raw)
    {
      r[k] = hi > lo ? (r[k] - lo) / (hi - lo) : 0.5;
    }
  }
  return raw;
}

std::size_t baseline(Auction const &a)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < a.size(); ++i)
  {
    if (a[i].bid > a[best].bid || (a[i].bid == a[best].bid && a[i].id < a[best].id))
    {
      best = i;
    }
  }
  return best;
}

std::size_t select(Auction const &a, std::vector<std::array<double, 6>> const &x, std::array<int, 6> const &parts,
                   int total)
{
  auto score = [&](std::size_t i) {
    double s = 0.0;
    for (int k = 0; k < 6; ++k)
    {
      s += parts[k] * x[i][k];
    }
    return s / total;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < a.size(); ++i)
  {
    double const si = score(i);
    double const sb = score(best);
    bool const   better =
        si > sb || (si == sb && (a[i].bid > a[best].bid || (a[i].bid == a[best].bid && a[i].id < a[best].id)));
    if (better)
    {
      best = i;
    }
  }
  return best;
}

std::vector<std::vector<std::array<double, 6>>> normalized_dataset(std::vector<Auction> const &train)
{
  std::vector<std::vector<std::array<double, 6>>> raw;
  for (auto const &a : train)
  {
    auto const                         pay = payments(a);
    std::vector<std::array<double, 6>> rows;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
      rows.push_back({pay[i], a[i].bid - pay[i], a[i].memorability, a[i].ctr, a[i].relevance, a[i].saliency});
    }
    raw.push_back(rows);
  }
  for (int k = 0; k < 6; ++k)
  {
    double lo = raw[0][0][k];
    double hi = raw[0][0][k];
    for (auto const &rows : raw)
    {
      for (auto const &r : rows)
      {
        lo = r[k] < lo ? r[k] : lo;
        hi = r[k] > hi ? r[k] : hi;
      }
    }
    for (auto &rows : raw)
    {
      for (auto &r : rows)
      {
        r[k] = hi > lo ? (r[k] - lo) / (hi - lo) : 0.5;
      }
    }
  }
  return raw;
}

Outcome optimum(std::vector<Auction> const &train, std::array<double, 6> const &theta, int total,
                bool per_dataset)
{
  std::vector<std::vector<std::array<double, 6>>> xs;
  if (per_dataset)
  {
    xs = normalized_dataset(train);
  }
  else
  {
    for (auto const &a : train)
    {
      xs.push_back(normalized(a));
    }
  }
  std::vector<std::size_t> base;
  std::array<double, 6>    base_sum{};
  for (std::size_t z = 0; z < train.size(); ++z)
  {
    base.push_back(baseline(train[z]));
    for (int k = 0; k < 6; ++k)
    {
      base_sum[k] += xs[z][base[z]][k];
    }
  }

  Outcome out;
  for (double const s : base_sum)
  {
    if (s == 0.0)
    {
      out.degenerate = true;
      return out;
    }
  }

  bool found = false, any_change = false, admissible_change = false;
  std::array<int, 6> c{};
  for (c[0] = total; c[0] >= 0; --c[0])
    for (c[1] = total - c[0]; c[1] >= 0; --c[1])
      for (c[2] = total - c[0] - c[1]; c[2] >= 0; --c[2])
        for (c[3] = total - c[0] - c[1] - c[2]; c[3] >= 0; --c[3])
          for (c[4] = total - c[0] - c[1] - c[2] - c[3]; c[4] >= 0; --c[4])
          {
            c[5] = total - c[0] - c[1] - c[2] - c[3] - c[4];

            double                objective = 0.0;
            std::array<double, 6> diff{};
            bool                  changed = false;
            for (std::size_t z = 0; z < train.size(); ++z)
            {
              auto const pick = select(train[z], xs[z], c, total);
              double     s    = 0.0;
              for (int k = 0; k < 6; ++k)
              {
                s += c[k] * xs[z][pick][k];
              }
              objective += s / total;
              for (int k = 0; k < 6; ++k)
              {
                diff[k] += xs[z][pick][k] - xs[z][base[z]][k];
              }
              changed = changed || pick != base[z];
            }
            std::array<double, 6> xi{};
            for (int k = 0; k < 6; ++k)
            {
              xi[k] = diff[k] / base_sum[k];
            }
            any_change = any_change || changed;

            bool ok = std::fabs(xi[0]) <= std::fabs(theta[0]);
            for (int k = 1; k < 6; ++k)
            {
              ok = ok && xi[k] >= theta[k];
            }
            if (!ok)
            {
              continue;
            }
            admissible_change = admissible_change || changed;
            if (!found || objective > out.objective)
            {
              found           = true;
              out.composition = c;
              out.objective   = objective;
              out.xi          = xi;
            }
          }
  out.feasible = found && (!any_change || admissible_change);
  return out;
}

unsigned long long compositions(int dims, int total)
{
  // C(n, r) with n = total + dims - 1, r = dims - 1.
  int const                                    n = total + dims - 1;
  std::vector<std::vector<unsigned long long>> pascal(n + 1);
  for (int i = 0; i <= n; ++i)
  {
    pascal[i].assign(i + 1, 1);
    for (int j = 1; j < i; ++j)
    {
      pascal[i][j] = pascal[i - 1][j - 1] + pascal[i - 1][j];
    }
  }
  return pascal[n][dims - 1];
}

}  // namespace oracle
