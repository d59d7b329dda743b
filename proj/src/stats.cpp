#include "semfuzz/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semfuzz/geom.h"

namespace semfuzz {

namespace {

void require_sizes(const std::vector<double>& a, const std::vector<double>& b, size_t min_size) {
  if (a.size() < min_size || b.size() < min_size) {
    throw ConfigError("samples need at least " + std::to_string(min_size) + " values each (got " +
                      std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  }
}

// Doubled midranks of the pooled sample (integers), a first then b.
std::vector<long long> doubled_ranks(const std::vector<double>& a, const std::vector<double>& b,
                                     std::vector<long long>* tie_sizes) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) { return pooled[i] < pooled[j]; });
  std::vector<long long> ranks(pooled.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // ranks i+1 .. j+1, doubled midrank = i + j + 2
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = static_cast<long long>(i + j + 2);
    if (tie_sizes) tie_sizes->push_back(static_cast<long long>(j - i + 1));
    i = j + 1;
  }
  return ranks;
}

// Twice the U statistic of a.
long long doubled_u(const std::vector<long long>& ranks, size_t na) {
  long long r = 0;
  for (size_t i = 0; i < na; ++i) r += ranks[i];
  const auto n = static_cast<long long>(na);
  return r - n * (n + 1);
}

}  // namespace

double vargha_delaney_a12(const std::vector<double>& a, const std::vector<double>& b) {
  require_sizes(a, b, 1);
  double wins = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) wins += 1.0;
      else if (x == y) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

MannWhitney mann_whitney_u_normal(const std::vector<double>& a, const std::vector<double>& b) {
  require_sizes(a, b, 3);
  std::vector<long long> ties;
  const auto ranks = doubled_ranks(a, b, &ties);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  MannWhitney r;
  r.u = 0.5 * static_cast<double>(doubled_u(ranks, a.size()));
  double tie_term = 0.0;
  for (long long t : ties) tie_term += static_cast<double>(t * t * t - t);
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) {
    r.p = 1.0;
    return r;
  }
  const double dev = std::max(0.0, std::abs(r.u - na * nb / 2.0) - 0.5);
  r.p = std::min(1.0, std::erfc(dev / std::sqrt(var) / std::sqrt(2.0)));
  return r;
}

MannWhitney mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  require_sizes(a, b, 3);
  if (a.size() * b.size() > static_cast<size_t>(kExactLimit)) return mann_whitney_u_normal(a, b);

  const auto ranks = doubled_ranks(a, b, nullptr);
  const size_t na = a.size();
  const long long max_sum = std::accumulate(ranks.begin(), ranks.end(), 0LL);
  // ways[k][s]: subsets of size k with doubled rank sum s.
  std::vector<std::vector<double>> ways(na + 1, std::vector<double>(static_cast<size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1.0;
  for (long long rk : ranks) {
    for (size_t k = na; k >= 1; --k) {
      for (long long s = max_sum; s >= rk; --s) ways[k][s] += ways[k - 1][s - rk];
    }
  }
  const auto n = static_cast<long long>(na);
  const long long nanb = n * static_cast<long long>(b.size());
  const long long obs = doubled_u(ranks, na);
  const long long obs_dev = std::llabs(obs - nanb);  // both sides doubled
  double total = 0.0, extreme = 0.0;
  for (long long s = 0; s <= max_sum; ++s) {
    const double w = ways[na][s];
    if (w == 0.0) continue;
    total += w;
    if (std::llabs(s - n * (n + 1) - nanb) >= obs_dev) extreme += w;
  }
  MannWhitney r;
  r.u = 0.5 * static_cast<double>(obs);
  r.p = std::min(1.0, extreme / total);
  r.exact = true;
  return r;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw ConfigError("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw ConfigError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace semfuzz
