#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace softfacet {

/// Raised when every paired difference is zero.
class DegenerateDataError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct SignedRanks {
    /// Midranks of |d| for the nonzero differences, in input order.
    std::vector<double> ranks;
    /// Sign of each retained difference (true when positive).
    std::vector<bool> positive;
    /// Sizes of groups of tied |d| (groups of size one omitted).
    std::vector<std::size_t> tie_groups;
};

/// Drops zero differences and assigns averaged ranks to tied magnitudes.
[[nodiscard]] SignedRanks signed_ranks(std::span<const double> differences);

struct WilcoxonResult {
    /// Sum of ranks of negative differences (d = hard - soft).
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_nonzero = 0;
    bool exact = true;
};

/// P(W- <= observed) under the null, by exact convolution over the given
/// (possibly half-integer) ranks.
[[nodiscard]] double wilcoxon_exact_lower_p(std::span<const double> ranks, double statistic);

/// Normal approximation with tie and continuity correction.
[[nodiscard]] double wilcoxon_normal_lower_p(std::size_t n, std::span<const std::size_t> tie_groups, double statistic);

inline constexpr std::size_t kWilcoxonExactLimit = 25;

/// One-sided signed-rank test for the alternative "soft ranks are smaller".
/// Exact null distribution for at most 25 nonzero pairs, normal
/// approximation above. Throws DegenerateDataError when all differences are zero.
[[nodiscard]] WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> soft_hard_pairs);

/// Same test on precomputed differences d = hard - soft.
[[nodiscard]] WilcoxonResult wilcoxon_signed_rank_differences(std::span<const double> differences);

}  // namespace softfacet
