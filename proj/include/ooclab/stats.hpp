#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ooclab {

enum class WilcoxonMethod { exact, normal_approx };

std::string to_string(WilcoxonMethod method);

struct WilcoxonResult {
  std::size_t n_input = 0;      // pairs supplied
  std::size_t n_effective = 0;  // pairs after zero-difference removal
  double w_plus = 0.0;          // sum of ranks of positive differences
  double p_two_sided = 1.0;
  WilcoxonMethod method = WilcoxonMethod::exact;
};

/// Paired Wilcoxon signed-rank test on (a, b) pairs with differences b - a.
/// Zero differences are discarded; |d| is ranked ascending with midranks for
/// ties. Exact mode (n_effective <= exact_cutoff) computes the full null
/// distribution of W+ by dynamic programming; otherwise the tie-corrected
/// normal approximation with continuity correction is used. Two-sided p is
/// twice the smaller tail, capped at 1.
///
/// Throws InsufficientData for no pairs, DegenerateSample when every
/// difference is zero.
WilcoxonResult wilcoxon_signed_rank(
    std::span<const std::pair<double, double>> pairs,
    std::size_t exact_cutoff = 20);

namespace detail {

/// Midranks of |values|, aligned with the input order.
std::vector<double> midranks(std::span<const double> values);

/// Null distribution of 2*W+ over all sign assignments of the given doubled
/// ranks: entry s is P(2*W+ = s). Sums to 1.
std::vector<double> exact_doubled_wplus_distribution(
    std::span<const long long> doubled_ranks);

}  // namespace detail

}  // namespace ooclab
