#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ooclab/errors.hpp"
#include "ooclab/rng.hpp"
#include "ooclab/stats.hpp"

using namespace ooclab;

namespace {

// Brute-force oracle: enumerate every sign assignment of the nonzero
// differences and count how often the positive-rank sum falls at or beyond
// the observed one. Independent of the implementation under test.
struct OracleResult {
  double w_plus;
  double p_two_sided;
  std::size_t n_effective;
};

std::vector<double> oracle_midranks(const std::vector<double>& abs_d) {
  const std::size_t n = abs_d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return abs_d[a] < abs_d[b];
  });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k)
      ranks[order[k]] = 0.5 * static_cast<double>(i + j + 2);
    i = j + 1;
  }
  return ranks;
}

OracleResult oracle_wilcoxon(
    const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> abs_d;
  std::vector<bool> pos;
  for (const auto& [a, b] : pairs) {
    const double d = b - a;
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    pos.push_back(d > 0);
  }
  const std::size_t n = abs_d.size();
  REQUIRE(n >= 1);
  REQUIRE(n <= 20);

  const std::vector<double> ranks = oracle_midranks(abs_d);
  double w_obs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (pos[i]) w_obs += ranks[i];

  std::uint64_t count_le = 0, count_ge = 0;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (bits & (1ull << i)) w += ranks[i];
    if (w <= w_obs + 1e-12) ++count_le;
    if (w >= w_obs - 1e-12) ++count_ge;
  }
  const double p_lo = static_cast<double>(count_le) / static_cast<double>(total);
  const double p_hi = static_cast<double>(count_ge) / static_cast<double>(total);
  return {w_obs, std::min(1.0, 2.0 * std::min(p_lo, p_hi)), n};
}

std::vector<std::pair<double, double>> random_pairs(SplitMix64& rng,
                                                    std::size_t n,
                                                    bool with_ties) {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 0.0;
    double b;
    if (with_ties) {
      // Small integer differences in [-3, 3] force ties and zeros.
      b = static_cast<double>(static_cast<long long>(rng.next_u64() % 7)) -
          3.0;
    } else {
      b = rng.next_uniform() * 2.0 - 1.0;
      if (b == 0.0) b = 0.5;
    }
    pairs.emplace_back(a, b);
  }
  return pairs;
}

bool all_zero(const std::vector<std::pair<double, double>>& pairs) {
  for (const auto& [a, b] : pairs)
    if (b != a) return false;
  return true;
}

}  // namespace

TEST_CASE("five positive distinct differences: w=15, p=0.0625") {
  std::vector<std::pair<double, double>> pairs;
  for (int k = 1; k <= 5; ++k) pairs.emplace_back(0.0, k);
  const WilcoxonResult r = wilcoxon_signed_rank(pairs);
  CHECK(r.n_input == 5);
  CHECK(r.n_effective == 5);
  CHECK(r.w_plus == 15.0);
  CHECK(r.p_two_sided == 0.0625);  // 2 * (1/32), exact
  CHECK(r.method == WilcoxonMethod::exact);
}

TEST_CASE("degenerate and empty inputs") {
  std::vector<std::pair<double, double>> zeros = {{1.0, 1.0}, {2.0, 2.0}};
  CHECK_THROWS_AS(wilcoxon_signed_rank(zeros), DegenerateSample);
  CHECK_THROWS_AS(wilcoxon_signed_rank({}), InsufficientData);
}

TEST_CASE("negating differences mirrors w_plus and keeps p") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    auto pairs = random_pairs(rng, 3 + rng.next_u64() % 10, trial % 2 == 0);
    if (all_zero(pairs)) continue;
    const WilcoxonResult r = wilcoxon_signed_rank(pairs);

    auto flipped = pairs;
    for (auto& [a, b] : flipped) std::swap(a, b);
    const WilcoxonResult f = wilcoxon_signed_rank(flipped);

    const double n = static_cast<double>(r.n_effective);
    CHECK(f.w_plus == doctest::Approx(n * (n + 1) / 2 - r.w_plus));
    CHECK(f.p_two_sided == doctest::Approx(r.p_two_sided).epsilon(1e-12));
  }
}

TEST_CASE("p is invariant under positive scaling of differences") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto pairs = random_pairs(rng, 8, trial % 2 == 0);
    if (all_zero(pairs)) continue;
    const WilcoxonResult r = wilcoxon_signed_rank(pairs);
    auto scaled = pairs;
    for (auto& [a, b] : scaled) {
      a *= 37.5;
      b *= 37.5;
    }
    const WilcoxonResult s = wilcoxon_signed_rank(scaled);
    CHECK(s.w_plus == r.w_plus);
    CHECK(s.p_two_sided == r.p_two_sided);
  }
}

TEST_CASE("exact mode agrees with the enumeration oracle") {
  SplitMix64 rng(17);
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      auto pairs = random_pairs(rng, n, trial % 2 == 1);
      if (all_zero(pairs)) continue;
      const WilcoxonResult r = wilcoxon_signed_rank(pairs);
      const OracleResult o = oracle_wilcoxon(pairs);
      CHECK(r.n_effective == o.n_effective);
      CHECK(r.w_plus == doctest::Approx(o.w_plus).epsilon(1e-12));
      CHECK(r.p_two_sided ==
            doctest::Approx(o.p_two_sided).epsilon(1e-12));
    }
  }
}

TEST_CASE("normal approximation tracks the exact p at n=12") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    auto pairs = random_pairs(rng, 12, trial % 2 == 1);
    if (all_zero(pairs)) continue;
    const WilcoxonResult exact = wilcoxon_signed_rank(pairs);
    const WilcoxonResult approx =
        wilcoxon_signed_rank(pairs, /*exact_cutoff=*/0);
    CHECK(approx.method == WilcoxonMethod::normal_approx);
    CHECK(std::abs(approx.p_two_sided - exact.p_two_sided) < 0.015);
  }
}

TEST_CASE("exact null distribution sums to one") {
  SplitMix64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 15;
    std::vector<double> abs_d;
    for (std::size_t i = 0; i < n; ++i)
      abs_d.push_back(1.0 + static_cast<double>(rng.next_u64() % 4));
    const std::vector<double> ranks = detail::midranks(abs_d);
    std::vector<long long> doubled(n);
    for (std::size_t i = 0; i < n; ++i)
      doubled[i] = std::llround(2.0 * ranks[i]);
    const auto dist = detail::exact_doubled_wplus_distribution(doubled);
    double sum = 0.0;
    for (double p : dist) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("zeros are discarded, midranks handle ties") {
  // d = {0, +1, -1, +2}: zero dropped, |d| = {1,1,2} -> ranks {1.5,1.5,3}.
  std::vector<std::pair<double, double>> pairs = {
      {5.0, 5.0}, {0.0, 1.0}, {1.0, 0.0}, {0.0, 2.0}};
  const WilcoxonResult r = wilcoxon_signed_rank(pairs);
  CHECK(r.n_input == 4);
  CHECK(r.n_effective == 3);
  CHECK(r.w_plus == 4.5);
  const OracleResult o = oracle_wilcoxon(pairs);
  CHECK(r.p_two_sided == doctest::Approx(o.p_two_sided).epsilon(1e-12));
}
