#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "softfacet/reranker.hpp"
#include "softfacet/synthetic.hpp"
#include "softfacet/training.hpp"
#include "softfacet/wilcoxon.hpp"

namespace softfacet {

struct EvalRecord {
    std::string query;
    std::string session_id;
    std::size_t soft_rank = 1;
    std::size_t hard_rank = 1;
    bool filter_missed_purchase = false;
};

/// Rank charged to hard filtering: the purchase's filtered rank when it
/// survived, otherwise |filtered| plus its rank in the unfiltered list.
/// Throws std::invalid_argument when `purchased` is absent from `unfiltered`.
[[nodiscard]] std::size_t hard_rank_with_miss_penalty(const RankedList& filtered,
                                                      const RankedList& unfiltered,
                                                      const ItemId& purchased);

/// Items satisfying every filter, in prior order.
[[nodiscard]] RankedList hard_filter_sequence(const PriorPropensity& prior,
                                              std::span<const FacetFilter> filters,
                                              const Catalog& catalog);

/// Leave-one-session-out comparison for one query. Each fold trains on all
/// other sessions, replays the held-out session's filters, and records the
/// purchase's rank under soft re-ranking and under hard filtering.
/// Sessions without a purchase or without actions form no fold. Throws
/// std::invalid_argument when fewer than two sessions qualify or a purchase
/// is missing from the prior.
[[nodiscard]] std::vector<EvalRecord> loo_evaluate(const std::string& query,
                                                   std::span<const Session> sessions_for_query,
                                                   const PriorPropensity& prior,
                                                   const Catalog& catalog,
                                                   const TrainingConfig& config);

struct QueryResult {
    std::string query;
    std::size_t n_pairs = 0;
    std::size_t n_nonzero = 0;
    double wilcoxon_statistic = 0.0;
    double p_value = 1.0;
    bool exact = false;
    /// Every soft/hard difference was zero; p is reported as 1.
    bool degenerate = false;
    double mean_soft_rank = 0.0;
    double mean_hard_rank = 0.0;
    double median_soft_rank = 0.0;
    double median_hard_rank = 0.0;
    double miss_rate = 0.0;
};

[[nodiscard]] QueryResult summarize_query(const std::string& query, std::span<const EvalRecord> records);

struct BenchmarkReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::size_t sessions = 0;
    double noise_ratio = 0.0;
    double miss_rate = 0.0;
    std::vector<QueryResult> queries;
};

/// Builds the scenario, simulates `sessions_per_query` sessions per query,
/// and runs the leave-one-out comparison plus a Wilcoxon test on each of the
/// first `n_queries` queries.
[[nodiscard]] BenchmarkReport run_benchmark(const ScenarioConfig& scenario,
                                            std::size_t n_queries,
                                            std::size_t sessions_per_query,
                                            std::uint64_t seed,
                                            const TrainingConfig& config);

[[nodiscard]] nlohmann::json to_json(const QueryResult& result);
/// One JSON document per query, one per line.
void write_report_jsonl(std::ostream& out, const BenchmarkReport& report);
void write_report_table(std::ostream& out, const BenchmarkReport& report);

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

[[nodiscard]] std::vector<CheckOutcome> check_report(const BenchmarkReport& report, const CheckThresholds& thresholds);

}  // namespace softfacet
