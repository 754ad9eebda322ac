// softfacet: train action models, simulate logs, run the soft-vs-hard
// evaluation, and serve interactive browsing sessions.

#include <chrono>
#include <csignal>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "softfacet/evaluation.hpp"
#include "softfacet/service.hpp"
#include "softfacet/session_log.hpp"
#include "softfacet/synthetic.hpp"
#include "softfacet/training.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsageError = 2;

using nlohmann::json;
using namespace softfacet;

httplib::Server* g_server = nullptr;

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

TrainingConfig load_training_config(const std::string& path)
{
    if (path.empty()) {
        return {};
    }
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    try {
        return training_config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

int run_train(const std::string& catalog_path,
              const std::string& log_path,
              const std::string& config_path,
              const std::string& out_path)
{
    const auto config = load_training_config(config_path);
    const auto catalog = read_catalog_file(catalog_path);
    LogRejects rejects;
    const auto sessions = read_session_log_file(log_path, catalog.brands(), &rejects);
    auto model = train(catalog, sessions, config);
    model.metadata().trained_at = utc_timestamp();
    save_model(model, out_path);

    const auto obs = extract_observations(sessions, catalog, config);
    std::size_t pairs = 0;
    for (const auto& [query, states] : model.states()) {
        pairs += states.size();
    }
    std::cout << "trained " << pairs << " (query, item) states from " << obs.purchasing_sessions
              << " purchasing sessions (" << obs.total_brand_observations() << " brand, "
              << obs.total_price_observations() << " price observations)\n";
    const std::size_t skipped = rejects.entries.size() + obs.unknown_items + obs.unknown_brands;
    if (skipped > 0) {
        std::cerr << "skipped " << skipped << " references (" << obs.unknown_items << " unknown items, "
                  << rejects.entries.size() + obs.unknown_brands << " unknown brands)\n";
        for (const auto& [line, message] : rejects.entries) {
            std::cerr << "  " << log_path << ": line " << line << ": " << message << '\n';
        }
    }
    std::cout << "wrote " << out_path << '\n';
    return kOk;
}

int run_evaluate(const std::string& scenario_path,
                 std::optional<std::uint64_t> seed,
                 bool check,
                 const std::string& out_path)
{
    const auto scenario = load_scenario_config(scenario_path);
    const auto used_seed = seed.value_or(scenario.seed);
    const auto report =
        run_benchmark(scenario, scenario.n_queries, scenario.sessions_per_query, used_seed, scenario.training);

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            throw DataError("cannot write " + out_path);
        }
        write_report_jsonl(out, report);
    }
    write_report_table(std::cout, report);
    if (!check) {
        return kOk;
    }
    bool all_passed = true;
    for (const auto& outcome : check_report(report, scenario.check)) {
        std::cout << (outcome.passed ? "PASS " : "FAIL ") << outcome.name << ": " << outcome.detail << '\n';
        all_passed = all_passed && outcome.passed;
    }
    return all_passed ? kOk : kCheckFailed;
}

int run_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_dir)
{
    auto config = load_scenario_config(scenario_path);
    if (seed) {
        config.seed = *seed;
    }
    const auto scenario = build_scenario(config);
    const auto sessions = generate_synthetic_log(scenario, config.sessions_per_query, config.seed);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    {
        std::ofstream out(dir / "catalog.jsonl");
        write_catalog(out, scenario.catalog);
    }
    {
        std::ofstream out(dir / "sessions.jsonl");
        write_session_log(out, sessions, scenario.catalog.brands());
    }
    {
        RelevanceTable relevance;
        for (const auto& q : scenario.queries) {
            relevance[q.query] = q.scores;
        }
        std::ofstream out(dir / "relevance.jsonl");
        write_relevance(out, relevance);
    }
    {
        std::ofstream out(dir / "training.json");
        out << to_json(config.training).dump(2) << '\n';
    }
    std::cout << "wrote " << scenario.catalog.size() << " items and " << sessions.size() << " sessions to "
              << out_dir << " (noise/width " << scenario.noise_ratio << ", miss rate "
              << measure_miss_rate(sessions, scenario.catalog) << ")\n";
    return kOk;
}

int run_serve(const std::string& config_path)
{
    const auto config = ServiceConfig::load(config_path);
    auto catalog = read_catalog_file(config.catalog_path);
    auto model = load_model(config.model_path);
    auto relevance = config.relevance_path.empty() ? RelevanceTable{} : read_relevance_file(config.relevance_path);
    BrowseService service(std::move(catalog), std::move(model), std::move(relevance), config);

    httplib::Server server;
    service.bind(server);
    g_server = &server;
    std::signal(SIGINT, [](int) {
        if (g_server != nullptr) {
            g_server->stop();
        }
    });
    std::signal(SIGTERM, [](int) {
        if (g_server != nullptr) {
            g_server->stop();
        }
    });
    std::cout << "listening on " << config.listen_host << ':' << config.listen_port << std::endl;
    if (!server.listen(config.listen_host, config.listen_port)) {
        std::cerr << "cannot listen on " << config.listen_host << ':' << config.listen_port << '\n';
        return kUsageError;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Soft faceted browsing: Bayesian re-ranking from facet-selection logs"};
    app.require_subcommand(1);

    std::string catalog_path;
    std::string log_path;
    std::string config_path;
    std::string out_path;
    auto* train_cmd = app.add_subcommand("train", "Train per-(query, item) action models from a session log");
    train_cmd->add_option("--catalog", catalog_path, "Catalog JSON lines")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--log", log_path, "Session log JSON lines")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--config", config_path, "Training config JSON")->check(CLI::ExistingFile);
    train_cmd->add_option("--out", out_path, "Model file to write")->required();

    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    bool check = false;
    std::string report_path;
    auto* eval_cmd = app.add_subcommand("evaluate", "Leave-one-out soft vs. hard comparison on a synthetic scenario");
    eval_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--seed", seed, "Override the scenario seed");
    eval_cmd->add_flag("--check", check, "Exit 1 unless the scenario's check thresholds hold");
    eval_cmd->add_option("--out", report_path, "Write per-query results as JSON lines");

    std::string sim_out;
    auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic catalog, relevance table and session log");
    sim_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--seed", seed, "Override the scenario seed");
    sim_cmd->add_option("--out", sim_out, "Output directory")->required();

    std::string serve_config;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the /v1 browsing API");
    serve_cmd->add_option("--config", serve_config, "Service config JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (*train_cmd) {
            return run_train(catalog_path, log_path, config_path, out_path);
        }
        if (*eval_cmd) {
            return run_evaluate(scenario_path, seed, check, report_path);
        }
        if (*sim_cmd) {
            return run_simulate(scenario_path, seed, sim_out);
        }
        if (*serve_cmd) {
            return run_serve(serve_config);
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}
