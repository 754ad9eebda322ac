#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = SOFTFACET_CLI;
const std::string kFixtures = SOFTFACET_FIXTURES;
const std::string kScenarios = SOFTFACET_SCENARIOS;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& args)
{
    const auto log = fs::temp_directory_path() / ("softfacet_cli_" + std::to_string(::getpid()) + ".log");
    const std::string command = "'" + kCli + "' " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(command.c_str());
    std::ifstream in(log);
    std::stringstream buffer;
    buffer << in.rdbuf();
    fs::remove(log);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, buffer.str()};
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() /
              ("softfacet_cli_test_" + std::to_string(::getpid()) + "_" +
               ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path dir;
};

TEST_F(CliTest, TrainWritesFixtureModel)
{
    const auto model_path = dir / "model.json";
    const auto r = run("train --catalog " + kFixtures + "/catalog.jsonl --log " + kFixtures +
                       "/sessions.jsonl --config " + kFixtures + "/training.json --out " + model_path.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("unknown brands"), std::string::npos) << r.output;

    std::ifstream in(model_path);
    const auto doc = json::parse(in);
    bool found = false;
    for (const auto& state : doc.at("queries").at("kettle")) {
        if (state.at("item_id") == "E") {
            found = true;
            EXPECT_EQ(state.at("nig"), (json{{"mu", 12.0}, {"kappa", 3.0}, {"alpha", 2.0}, {"beta", 5.0}}));
        }
    }
    EXPECT_TRUE(found);
    EXPECT_FALSE(doc.at("metadata").at("trained_at").get<std::string>().empty());
}

TEST_F(CliTest, UsageErrorsExitTwo)
{
    EXPECT_EQ(run("").exit_code, 2);
    EXPECT_EQ(run("frobnicate").exit_code, 2);
    EXPECT_EQ(run("train --catalog " + kFixtures + "/catalog.jsonl").exit_code, 2);
    EXPECT_EQ(run("evaluate --scenario " + (dir / "missing.json").string()).exit_code, 2);
    EXPECT_EQ(run("--help").exit_code, 0);
}

TEST_F(CliTest, DataErrorsCarryLineNumbers)
{
    const auto bad_log = dir / "bad.jsonl";
    std::ofstream(bad_log) << R"({"session_id":"a","query":"q","actions":[]})" << '\n'
                           << R"({"session_id":"b","query":"q","actions":[{"facet":"price","lo":"x"}]})" << '\n';
    const auto r = run("train --catalog " + kFixtures + "/catalog.jsonl --log " + bad_log.string() + " --out " +
                       (dir / "m.json").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
}

TEST_F(CliTest, SimulateThenTrain)
{
    const auto scenario = dir / "small.json";
    std::ofstream(scenario) << R"({"name": "small", "n_queries": 2, "items_per_query": 20, "n_brands": 4,
                                   "sessions_per_query": 30, "brand_action_prob": 0.5, "seed": 4})";
    const auto out = dir / "sim";
    auto r = run("simulate --scenario " + scenario.string() + " --seed 8 --out " + out.string());
    ASSERT_EQ(r.exit_code, 0) << r.output;
    for (const char* name : {"catalog.jsonl", "sessions.jsonl", "relevance.jsonl", "training.json"}) {
        EXPECT_TRUE(fs::exists(out / name)) << name;
    }
    r = run("train --catalog " + (out / "catalog.jsonl").string() + " --log " + (out / "sessions.jsonl").string() +
            " --config " + (out / "training.json").string() + " --out " + (dir / "model.json").string());
    EXPECT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("from 60 purchasing sessions"), std::string::npos) << r.output;
}

TEST_F(CliTest, EvaluateCheckFailsOnUnreachableThreshold)
{
    const auto scenario = dir / "strict.json";
    std::ofstream(scenario) << R"({"name": "strict", "n_queries": 2, "items_per_query": 20, "n_brands": 4,
                                   "sessions_per_query": 30, "seed": 4,
                                   "check": {"p_threshold": 1e-30, "min_significant_queries": 2}})";
    const auto report = dir / "report.jsonl";
    const auto r = run("evaluate --check --scenario " + scenario.string() + " --out " + report.string());
    EXPECT_EQ(r.exit_code, 1) << r.output;
    EXPECT_NE(r.output.find("FAIL"), std::string::npos);
    std::ifstream in(report);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        EXPECT_TRUE(json::parse(line).contains("p_value"));
        ++lines;
    }
    EXPECT_EQ(lines, 2u);
}

TEST_F(CliTest, EvaluateCalibratedScenarioPassesCheck)
{
    const auto r = run("evaluate --check --scenario " + kScenarios + "/calibrated.json");
    EXPECT_EQ(r.exit_code, 0) << r.output;
}

TEST_F(CliTest, EvaluateElectronicsScenarioPassesCheck)
{
    const auto r = run("evaluate --check --scenario " + kScenarios + "/electronics.json");
    EXPECT_EQ(r.exit_code, 0) << r.output;
}

TEST_F(CliTest, ServeAnswersSessionRequests)
{
    const auto model_path = dir / "model.json";
    ASSERT_EQ(run("train --catalog " + kFixtures + "/catalog.jsonl --log " + kFixtures + "/sessions.jsonl --config " +
                  kFixtures + "/training.json --out " + model_path.string())
                  .exit_code,
              0);
    const int port = 20000 + static_cast<int>(::getpid() % 20000);
    const auto config = dir / "service.json";
    std::ofstream(config) << json{{"listen", "127.0.0.1:" + std::to_string(port)},
                                  {"model", model_path.string()},
                                  {"catalog", kFixtures + "/catalog.jsonl"}}
                                 .dump();

    const pid_t child = ::fork();
    ASSERT_GE(child, 0);
    if (child == 0) {
        const auto log = (dir / "serve.log").string();
        if (std::freopen(log.c_str(), "w", stdout) == nullptr) {
            std::_Exit(126);
        }
        ::execl(kCli.c_str(), kCli.c_str(), "serve", "--config", config.c_str(), static_cast<char*>(nullptr));
        std::_Exit(127);
    }

    httplib::Client client("127.0.0.1", port);
    httplib::Result created;
    for (int attempt = 0; attempt < 100 && !created; ++attempt) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        created = client.Post("/v1/sessions", R"({"query": "kettle"})", "application/json");
    }
    ::kill(child, SIGTERM);
    int status = 0;
    ::waitpid(child, &status, 0);
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    EXPECT_EQ(json::parse(created->body).at("total"), 4);
    EXPECT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
}

}  // namespace
