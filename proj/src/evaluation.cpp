#include "softfacet/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace softfacet {

using nlohmann::json;

namespace {

double mean_of(const std::vector<double>& v)
{
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

double median_of(std::vector<double> v)
{
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

bool eligible(const Session& s)
{
    return !s.purchases.empty() && !s.actions.empty();
}

}  // namespace

std::size_t hard_rank_with_miss_penalty(const RankedList& filtered, const RankedList& unfiltered, const ItemId& purchased)
{
    const std::size_t unfiltered_rank = rank_of(unfiltered, purchased);
    if (unfiltered_rank == 0) {
        throw std::invalid_argument("purchased item " + purchased + " is not in the unfiltered list");
    }
    if (const std::size_t r = rank_of(filtered, purchased); r != 0) {
        return r;
    }
    return filtered.size() + unfiltered_rank;
}

RankedList hard_filter_sequence(const PriorPropensity& prior, std::span<const FacetFilter> filters, const Catalog& catalog)
{
    RankedList out;
    for (const auto& e : prior.entries()) {
        const Item& item = catalog.at(e.item_id);
        if (std::all_of(filters.begin(), filters.end(), [&](const FacetFilter& f) { return f.matches(item); })) {
            out.push_back({e.item_id, e.probability, true});
        }
    }
    return out;
}

std::vector<EvalRecord> loo_evaluate(const std::string& query,
                                     std::span<const Session> sessions_for_query,
                                     const PriorPropensity& prior,
                                     const Catalog& catalog,
                                     const TrainingConfig& config)
{
    const auto n_eligible = std::count_if(sessions_for_query.begin(), sessions_for_query.end(), eligible);
    if (n_eligible < 2) {
        throw std::invalid_argument("leave-one-out needs at least two purchasing sessions with filters for " + query);
    }
    const RankedList unfiltered = ranked_from_prior(prior);
    const auto start = BrowseSession::start("loo", query, prior);

    std::vector<EvalRecord> records;
    std::vector<Session> rest;
    rest.reserve(sessions_for_query.size());
    for (std::size_t held = 0; held < sessions_for_query.size(); ++held) {
        const Session& test = sessions_for_query[held];
        if (!eligible(test)) {
            continue;
        }
        rest.clear();
        for (std::size_t i = 0; i < sessions_for_query.size(); ++i) {
            if (i != held) {
                rest.push_back(sessions_for_query[i]);
            }
        }
        const TrainedModel model = train(catalog, rest, config);
        const auto soft = apply_filter_sequence(start, test.actions, catalog, model.likelihood(query), RankMode::soft);
        const auto filtered = hard_filter_sequence(prior, test.actions, catalog);

        for (const auto& purchased : test.purchases) {
            EvalRecord record;
            record.query = query;
            record.session_id = test.session_id;
            record.soft_rank = rank_of(soft.ranked, purchased);
            if (record.soft_rank == 0) {
                throw std::invalid_argument("purchased item " + purchased + " is not ranked for " + query);
            }
            record.hard_rank = hard_rank_with_miss_penalty(filtered, unfiltered, purchased);
            record.filter_missed_purchase = rank_of(filtered, purchased) == 0;
            records.push_back(std::move(record));
        }
    }
    return records;
}

QueryResult summarize_query(const std::string& query, std::span<const EvalRecord> records)
{
    QueryResult result;
    result.query = query;
    result.n_pairs = records.size();
    std::vector<double> soft;
    std::vector<double> hard;
    std::vector<double> differences;
    std::size_t missed = 0;
    for (const auto& r : records) {
        soft.push_back(static_cast<double>(r.soft_rank));
        hard.push_back(static_cast<double>(r.hard_rank));
        differences.push_back(static_cast<double>(r.hard_rank) - static_cast<double>(r.soft_rank));
        missed += r.filter_missed_purchase ? 1 : 0;
    }
    result.mean_soft_rank = mean_of(soft);
    result.mean_hard_rank = mean_of(hard);
    result.median_soft_rank = median_of(soft);
    result.median_hard_rank = median_of(hard);
    result.miss_rate = records.empty() ? 0.0 : static_cast<double>(missed) / static_cast<double>(records.size());
    try {
        const auto test = wilcoxon_signed_rank_differences(differences);
        result.wilcoxon_statistic = test.statistic;
        result.p_value = test.p_value;
        result.exact = test.exact;
        result.n_nonzero = test.n_nonzero;
    } catch (const DegenerateDataError&) {
        result.degenerate = true;
        result.p_value = 1.0;
    }
    return result;
}

BenchmarkReport run_benchmark(const ScenarioConfig& scenario_config,
                              std::size_t n_queries,
                              std::size_t sessions_per_query,
                              std::uint64_t seed,
                              const TrainingConfig& config)
{
    auto scenario_knobs = scenario_config;
    scenario_knobs.seed = seed;
    scenario_knobs.n_queries = n_queries;
    const auto scenario = build_scenario(scenario_knobs);
    const auto sessions = generate_synthetic_log(scenario, sessions_per_query, seed);

    BenchmarkReport report;
    report.scenario = scenario_config.name;
    report.seed = seed;
    report.sessions = sessions.size();
    report.noise_ratio = scenario.noise_ratio;
    report.miss_rate = measure_miss_rate(sessions, scenario.catalog);

    for (const auto& query : scenario.queries) {
        std::vector<Session> for_query;
        for (const auto& s : sessions) {
            if (s.query == query.query) {
                for_query.push_back(s);
            }
        }
        const auto prior = normalize_prior(query.scores);
        const auto records = loo_evaluate(query.query, for_query, prior, scenario.catalog, config);
        report.queries.push_back(summarize_query(query.query, records));
    }
    return report;
}

json to_json(const QueryResult& r)
{
    return {
        {"query", r.query},
        {"n_pairs", r.n_pairs},
        {"n_nonzero", r.n_nonzero},
        {"wilcoxon_statistic", r.wilcoxon_statistic},
        {"p_value", r.p_value},
        {"exact", r.exact},
        {"degenerate", r.degenerate},
        {"mean_soft_rank", r.mean_soft_rank},
        {"mean_hard_rank", r.mean_hard_rank},
        {"median_soft_rank", r.median_soft_rank},
        {"median_hard_rank", r.median_hard_rank},
        {"miss_rate", r.miss_rate},
    };
}

void write_report_jsonl(std::ostream& out, const BenchmarkReport& report)
{
    for (const auto& q : report.queries) {
        out << to_json(q).dump() << '\n';
    }
}

void write_report_table(std::ostream& out, const BenchmarkReport& report)
{
    char line[256];
    std::snprintf(line, sizeof line, "scenario %s  seed %llu  sessions %zu  noise/width %.4f  miss rate %.4f\n",
                  report.scenario.c_str(), static_cast<unsigned long long>(report.seed), report.sessions,
                  report.noise_ratio, report.miss_rate);
    out << line;
    std::snprintf(line, sizeof line, "%-10s %6s %9s %9s %7s %7s %6s %11s\n", "query", "pairs", "mean_soft",
                  "mean_hard", "med_s", "med_h", "miss", "p_value");
    out << line;
    for (const auto& q : report.queries) {
        std::snprintf(line, sizeof line, "%-10s %6zu %9.2f %9.2f %7.1f %7.1f %6.3f %11.3e\n", q.query.c_str(),
                      q.n_pairs, q.mean_soft_rank, q.mean_hard_rank, q.median_soft_rank, q.median_hard_rank,
                      q.miss_rate, q.p_value);
        out << line;
    }
}

std::vector<CheckOutcome> check_report(const BenchmarkReport& report, const CheckThresholds& t)
{
    std::vector<CheckOutcome> outcomes;
    char detail[160];
    if (t.miss_rate_target) {
        const bool ok = std::abs(report.miss_rate - *t.miss_rate_target) <= t.miss_rate_tolerance;
        std::snprintf(detail, sizeof detail, "measured %.4f, target %.2f +/- %.2f", report.miss_rate,
                      *t.miss_rate_target, t.miss_rate_tolerance);
        outcomes.push_back({"miss_rate", ok, detail});
    }
    if (t.p_threshold) {
        const auto significant = std::count_if(report.queries.begin(), report.queries.end(), [&](const QueryResult& q) {
            return !q.degenerate && q.p_value < *t.p_threshold;
        });
        std::snprintf(detail, sizeof detail, "%zu of %zu queries with p < %.0e (need %zu)",
                      static_cast<std::size_t>(significant), report.queries.size(), *t.p_threshold,
                      t.min_significant_queries);
        outcomes.push_back({"significance", static_cast<std::size_t>(significant) >= t.min_significant_queries, detail});
    }
    if (t.require_mean_improvement) {
        const auto better = std::count_if(report.queries.begin(), report.queries.end(),
                                          [](const QueryResult& q) { return q.mean_soft_rank < q.mean_hard_rank; });
        std::snprintf(detail, sizeof detail, "mean soft < mean hard on %zu of %zu queries",
                      static_cast<std::size_t>(better), report.queries.size());
        outcomes.push_back({"mean_improvement", static_cast<std::size_t>(better) == report.queries.size(), detail});
    }
    if (t.max_mean_regression) {
        double worst = -kInfinity;
        for (const auto& q : report.queries) {
            worst = std::max(worst, q.mean_soft_rank - q.mean_hard_rank);
        }
        std::snprintf(detail, sizeof detail, "worst mean(soft - hard) %.3f, allowed %.3f", worst,
                      *t.max_mean_regression);
        outcomes.push_back({"max_mean_regression", worst <= *t.max_mean_regression, detail});
    }
    return outcomes;
}

}  // namespace softfacet
