#include "softfacet/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "softfacet/special_functions.hpp"

namespace softfacet {

SignedRanks signed_ranks(std::span<const double> differences)
{
    std::vector<double> magnitudes;
    SignedRanks out;
    for (double d : differences) {
        if (std::isnan(d)) {
            throw std::invalid_argument("NaN difference");
        }
        if (d != 0.0) {
            magnitudes.push_back(std::fabs(d));
            out.positive.push_back(d > 0.0);
        }
    }
    const std::size_t n = magnitudes.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return magnitudes[a] < magnitudes[b];
    });
    out.ranks.assign(n, 0.0);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && magnitudes[order[j]] == magnitudes[order[i]]) {
            ++j;
        }
        // positions i..j-1 share the average of 1-based ranks i+1..j
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            out.ranks[order[k]] = midrank;
        }
        if (j - i > 1) {
            out.tie_groups.push_back(j - i);
        }
        i = j;
    }
    return out;
}

double wilcoxon_exact_lower_p(std::span<const double> ranks, double statistic)
{
    // Midranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<std::size_t> doubled;
    doubled.reserve(ranks.size());
    std::size_t total = 0;
    for (double r : ranks) {
        const auto d = static_cast<std::size_t>(std::lround(2.0 * r));
        doubled.push_back(d);
        total += d;
    }
    // mass[s]: probability that the negative ranks sum to s / 2
    std::vector<double> mass(total + 1, 0.0);
    std::vector<double> next(total + 1, 0.0);
    mass[0] = 1.0;
    for (std::size_t d : doubled) {
        for (std::size_t s = 0; s <= total; ++s) {
            next[s] = 0.5 * (mass[s] + (s >= d ? mass[s - d] : 0.0));
        }
        mass.swap(next);
    }
    const auto limit = static_cast<long long>(std::floor(2.0 * statistic + 1e-9));
    if (limit < 0) {
        return 0.0;
    }
    double p = 0.0;
    for (std::size_t s = 0; s <= std::min<std::size_t>(static_cast<std::size_t>(limit), total); ++s) {
        p += mass[s];
    }
    return std::min(p, 1.0);
}

double wilcoxon_normal_lower_p(std::size_t n, std::span<const std::size_t> tie_groups, double statistic)
{
    const auto nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
    for (std::size_t t : tie_groups) {
        const auto tt = static_cast<double>(t);
        variance -= (tt * tt * tt - tt) / 48.0;
    }
    if (!(variance > 0.0)) {
        return statistic >= mean ? 1.0 : 0.0;
    }
    const double z = (statistic - mean + 0.5) / std::sqrt(variance);
    return std::min(std_normal_cdf(z), 1.0);
}

WilcoxonResult wilcoxon_signed_rank_differences(std::span<const double> differences)
{
    const auto sr = signed_ranks(differences);
    if (sr.ranks.empty()) {
        throw DegenerateDataError("all paired differences are zero");
    }
    WilcoxonResult result;
    result.n_nonzero = sr.ranks.size();
    for (std::size_t i = 0; i < sr.ranks.size(); ++i) {
        if (!sr.positive[i]) {
            result.statistic += sr.ranks[i];
        }
    }
    result.exact = result.n_nonzero <= kWilcoxonExactLimit;
    result.p_value = result.exact ? wilcoxon_exact_lower_p(sr.ranks, result.statistic)
                                  : wilcoxon_normal_lower_p(result.n_nonzero, sr.tie_groups, result.statistic);
    return result;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> soft_hard_pairs)
{
    std::vector<double> differences;
    differences.reserve(soft_hard_pairs.size());
    for (const auto& [soft, hard] : soft_hard_pairs) {
        differences.push_back(hard - soft);
    }
    return wilcoxon_signed_rank_differences(differences);
}

}  // namespace softfacet
