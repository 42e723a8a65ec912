#include "ooclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ooclab/errors.hpp"

namespace ooclab {

std::string to_string(WilcoxonMethod method) {
  return method == WilcoxonMethod::exact ? "exact" : "normal_approx";
}

namespace detail {

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Ranks are 1-based; a tied run [i, j] shares the average rank.
    const double rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> exact_doubled_wplus_distribution(
    std::span<const long long> doubled_ranks) {
  long long total = 0;
  for (long long r : doubled_ranks) total += r;

  // counts[s] = number of sign assignments with doubled positive-rank sum s.
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(total) + 1, 0);
  counts[0] = 1;
  long long reach = 0;
  for (long long r : doubled_ranks) {
    for (long long s = reach; s >= 0; --s)
      if (counts[static_cast<std::size_t>(s)] != 0)
        counts[static_cast<std::size_t>(s + r)] +=
            counts[static_cast<std::size_t>(s)];
    reach += r;
  }

  const double denom =
      std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
  std::vector<double> dist(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s)
    dist[s] = static_cast<double>(counts[s]) / denom;
  return dist;
}

}  // namespace detail

WilcoxonResult wilcoxon_signed_rank(
    std::span<const std::pair<double, double>> pairs,
    std::size_t exact_cutoff) {
  if (pairs.empty()) throw InsufficientData("wilcoxon: no pairs");

  std::vector<double> abs_d;
  std::vector<bool> positive;
  for (const auto& [a, b] : pairs) {
    const double d = b - a;
    if (d == 0.0) continue;  // classic Wilcoxon: drop zero differences
    abs_d.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }

  WilcoxonResult result;
  result.n_input = pairs.size();
  result.n_effective = abs_d.size();
  if (abs_d.empty())
    throw DegenerateSample("wilcoxon: all differences are zero");

  const std::vector<double> ranks = detail::midranks(abs_d);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i)
    if (positive[i]) w_plus += ranks[i];
  result.w_plus = w_plus;

  const std::size_t n = abs_d.size();
  if (n <= exact_cutoff && n <= 62) {
    // Midranks are multiples of 1/2, so doubling makes them integers.
    std::vector<long long> doubled(n);
    for (std::size_t i = 0; i < n; ++i)
      doubled[i] = std::llround(2.0 * ranks[i]);
    const std::vector<double> dist =
        detail::exact_doubled_wplus_distribution(doubled);

    const long long w2 = std::llround(2.0 * w_plus);
    double p_low = 0.0, p_high = 0.0;
    for (long long s = 0; s < static_cast<long long>(dist.size()); ++s) {
      if (s <= w2) p_low += dist[static_cast<std::size_t>(s)];
      if (s >= w2) p_high += dist[static_cast<std::size_t>(s)];
    }
    result.p_two_sided = std::min(1.0, 2.0 * std::min(p_low, p_high));
    result.method = WilcoxonMethod::exact;
    return result;
  }

  const double nn = static_cast<double>(n);
  const double mu = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;

  // Tie correction: subtract (t^3 - t)/48 per tied group of size t.
  std::vector<double> sorted = abs_d;
  std::sort(sorted.begin(), sorted.end());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    var -= (t * t * t - t) / 48.0;
    i = j + 1;
  }

  const double sigma = std::sqrt(var);
  double z = 0.0;
  if (w_plus != mu) {
    const double sign = w_plus > mu ? 1.0 : -1.0;
    z = (w_plus - mu - 0.5 * sign) / sigma;  // continuity correction
  }
  result.p_two_sided = std::erfc(std::abs(z) / std::sqrt(2.0));
  result.method = WilcoxonMethod::normal_approx;
  return result;
}

}  // namespace ooclab
