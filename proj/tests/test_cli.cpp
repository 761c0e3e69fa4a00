#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/run.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               (std::string("tcval_cli_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        unsetenv("TCVAL_THREADS");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write_config(const json& config, const std::string& name = "config.json") {
        const fs::path path = dir_ / name;
        std::ofstream(path) << config.dump(2);
        return path.string();
    }

    std::string prefix(const std::string& name = "out") const { return (dir_ / name).string(); }

    int invoke(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        std::vector<const char*> argv{"tcval"};
        for (const auto& a : args) argv.push_back(a.c_str());
        return tcval::cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    std::vector<std::string> files() const {
        std::vector<std::string> names;
        for (const auto& e : fs::directory_iterator(dir_)) names.push_back(e.path().filename());
        std::sort(names.begin(), names.end());
        return names;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

json abm_variance(double alpha, std::size_t n_time) {
    return {{"model", {{"kind", "ABM"}, {"drift", 0.0}, {"diffusion", 1.0}}},
            {"payoff", {{"kind", "Linear"}, {"slope", 1.0}}},
            {"principle", {{"kind", "Variance"}, {"alpha", alpha}}},
            {"grid", {{"T", 1.0}, {"n_time", n_time}, {"n_space", 201}}}};
}

TEST_F(CliTest, CalibratePrintsQuotedDigits) {
    const auto cfg = write_config({{"calibrate", {{"q", 0.995}}}});
    ASSERT_EQ(invoke({"calibrate", "--config", cfg}), 0) << err_.str();
    EXPECT_EQ(out_.str(), "{\"q\":0.995,\"k\":2.58,\"l\":0.971}\n");
}

TEST_F(CliTest, CalibrateOutOfRangeIsDomainError) {
    const auto cfg = write_config({{"calibrate", {{"q", 0.4}}}});
    EXPECT_EQ(invoke({"calibrate", "--config", cfg}), 3);
}

TEST_F(CliTest, AllEnginesAgreeOnGaussianExample) {
    auto config = abm_variance(1.0, 512);
    config["engine"] = "all";
    const auto cfg = write_config(config);
    ASSERT_EQ(invoke({"price", "--config", cfg, "--out", prefix()}), 0) << err_.str();
    const json summary = json::parse(slurp(prefix() + "_summary.json"));
    for (const char* engine : {"lattice", "pde", "closedform"}) {
        EXPECT_NEAR(summary["prices"][engine].get<double>(), 0.5, 5e-3) << engine;
    }
    ASSERT_EQ(summary["agreement"].size(), 3u);
    for (const auto& row : summary["agreement"]) EXPECT_LT(row["sup_diff"].get<double>(), 5e-3);
    EXPECT_EQ(json::parse(out_.str()), summary);
}

// alpha = 0, f(y) = y: the lattice is exact where the drift keeps linear rows
// linear without time-stepping error (ABM, driftless GBM).
TEST_F(CliTest, RiskNeutralLinearLatticeMatchesClosedForm) {
    const std::vector<json> models{
        {{"kind", "ABM"}, {"drift", 0.3}, {"diffusion", 0.7}},
        {{"kind", "GBM"}, {"mu", 0.0}, {"sigma", 0.25}},
    };
    for (const auto& model : models) {
        json config = abm_variance(0.0, 100);
        config["model"] = model;
        config["grid"]["y_center"] = 1.0;
        config["engine"] = "all";
        const auto cfg = write_config(config);
        ASSERT_EQ(invoke({"price", "--config", cfg, "--out", prefix()}), 0) << err_.str();
        const json summary = json::parse(slurp(prefix() + "_summary.json"));
        for (const auto& row : summary["agreement"]) {
            if (row["engines"] == "lattice-closedform") {
                EXPECT_LT(row["sup_diff"].get<double>(), 1e-6) << model.dump();
            }
        }
    }
}

// For OU the lattice carries the Euler mean reversion exactly:
// theta + (y - theta)(1 - kappa dt)^n.
TEST_F(CliTest, RiskNeutralLinearOuLatticeIsDiscreteMeanReversion) {
    json config = abm_variance(0.0, 100);
    config["model"] = {{"kind", "OU"}, {"kappa", 1.0}, {"theta", 0.2}, {"diffusion", 0.5}};
    config["grid"]["y_center"] = 0.5;
    config["engine"] = "all";
    const auto cfg = write_config(config);
    ASSERT_EQ(invoke({"price", "--config", cfg, "--out", prefix()}), 0) << err_.str();
    const json summary = json::parse(slurp(prefix() + "_summary.json"));
    EXPECT_NEAR(summary["prices"]["lattice"].get<double>(), 0.2 + 0.3 * std::pow(0.99, 100), 1e-12);
    EXPECT_NEAR(summary["prices"]["closedform"].get<double>(), 0.2 + 0.3 * std::exp(-1.0), 1e-12);
}

TEST_F(CliTest, SurfaceCsvLayout) {
    const auto cfg = write_config(abm_variance(1.0, 4));
    ASSERT_EQ(invoke({"price", "--config", cfg, "--out", prefix()}), 0) << err_.str();
    const std::string csv = slurp(prefix() + "_lattice_surface.csv");
    EXPECT_EQ(csv.rfind("t,y,price\r\n", 0), 0u);
    std::size_t lines = 0;
    for (char c : csv) lines += c == '\n';
    EXPECT_EQ(lines, 1u + 5u * 201u);
    const json summary = json::parse(slurp(prefix() + "_summary.json"));
    EXPECT_EQ(summary["engine"], "lattice");
    EXPECT_NEAR(summary["price"].get<double>(), 0.5, 1e-12);
}

TEST_F(CliTest, IdenticalConfigsGiveByteIdenticalOutputs) {
    auto config = abm_variance(0.5, 64);
    config["payoff"] = {{"kind", "Call"}, {"strike", 0.0}};
    config["engine"] = "all";
    const auto cfg = write_config(config);
    fs::create_directories(dir_ / "a");
    fs::create_directories(dir_ / "b");
    ASSERT_EQ(invoke({"price", "--config", cfg, "--out", prefix("a/run"), "--threads", "1"}), 0);
    ASSERT_EQ(invoke({"price", "--config", cfg, "--out", prefix("b/run"), "--threads", "3"}), 0);
    for (const char* suffix : {"_summary.json", "_lattice_surface.csv", "_pde_surface.csv",
                               "_closedform_surface.csv"}) {
        EXPECT_EQ(slurp(prefix("a/run") + suffix), slurp(prefix("b/run") + suffix)) << suffix;
    }
}

TEST_F(CliTest, UnknownFieldIsConfigErrorWithPath) {
    auto config = abm_variance(1.0, 10);
    config["principle"]["beta"] = 0.1;
    const auto cfg = write_config(config);
    EXPECT_EQ(invoke({"price", "--config", cfg, "--out", prefix()}), 2);
    EXPECT_NE(err_.str().find("principle.beta"), std::string::npos) << err_.str();
    EXPECT_EQ(files(), std::vector<std::string>{"config.json"});
}

TEST_F(CliTest, InvalidValuesAreConfigErrors) {
    auto config = abm_variance(-1.0, 10);
    EXPECT_EQ(invoke({"price", "--config", write_config(config), "--out", prefix()}), 2);
    EXPECT_NE(err_.str().find("principle.alpha"), std::string::npos) << err_.str();

    config = abm_variance(1.0, 10);
    config["model"]["kind"] = "Heston";
    EXPECT_EQ(invoke({"price", "--config", write_config(config), "--out", prefix()}), 2);

    config = abm_variance(1.0, 10);
    config["engine"] = "montecarlo";
    EXPECT_EQ(invoke({"price", "--config", write_config(config), "--out", prefix()}), 2);

    EXPECT_EQ(invoke({"price", "--config", (dir_ / "missing.json").string()}), 2);
    std::ofstream(dir_ / "broken.json") << "{\"model\": ";
    EXPECT_EQ(invoke({"price", "--config", (dir_ / "broken.json").string()}), 2);
}

TEST_F(CliTest, CommandLineErrors) {
    EXPECT_EQ(invoke({}), 2);
    EXPECT_EQ(invoke({"price"}), 2);
    const auto cfg = write_config(abm_variance(1.0, 10));
    EXPECT_EQ(invoke({"frobnicate", "--config", cfg}), 2);
    EXPECT_EQ(invoke({"price", "--config", cfg, "--threads", "0"}), 2);
    EXPECT_EQ(invoke({"price", "--config", cfg, "--threads", "two"}), 2);
}

TEST_F(CliTest, ThreadsEnvironmentFallback) {
    const auto cfg = write_config(abm_variance(1.0, 10));
    setenv("TCVAL_THREADS", "lots", 1);
    EXPECT_EQ(invoke({"price", "--config", cfg, "--out", prefix()}), 2);
    EXPECT_NE(err_.str().find("TCVAL_THREADS"), std::string::npos);
    EXPECT_EQ(invoke({"price", "--config", cfg, "--out", prefix(), "--threads", "2"}), 0);
    setenv("TCVAL_THREADS", "2", 1);
    EXPECT_EQ(invoke({"price", "--config", cfg, "--out", prefix()}), 0);
}

TEST_F(CliTest, CostOfCapitalNeedsQuadrinomialTree) {
    auto config = abm_variance(1.0, 10);
    config["principle"] = {{"kind", "CostOfCapital"}, {"delta", 0.06}, {"q", 0.995}};
    config["tree"] = "binomial";
    EXPECT_EQ(invoke({"price", "--config", write_config(config), "--out", prefix()}), 2);
    config.erase("tree");
    EXPECT_EQ(invoke({"price", "--config", write_config(config), "--out", prefix()}), 0)
        << err_.str();
}

TEST_F(CliTest, DomainErrorLeavesNoFiles) {
    auto config = abm_variance(1.0, 10);
    config["payoff"] = {{"kind", "Call"}, {"strike", 0.0}, {"positive", true}};
    config["engine"] = "all";
    EXPECT_EQ(invoke({"price", "--config", write_config(config), "--out", prefix()}), 3);
    EXPECT_EQ(files(), std::vector<std::string>{"config.json"});

    config = abm_variance(1.0, 10);
    config["principle"] = {{"kind", "CurrentPriceBenchmark"}, {"gamma", 1.0}};
    config["engine"] = "pde";
    EXPECT_EQ(invoke({"price", "--config", write_config(config), "--out", prefix()}), 3);
    EXPECT_EQ(files(), std::vector<std::string>{"config.json"});
}

TEST_F(CliTest, ConvergeWritesReport) {
    auto config = abm_variance(0.0, 10);
    config["model"] = {{"kind", "OU"}, {"kappa", 1.0}, {"theta", 0.0}, {"diffusion", 1.0}};
    config["principle"] = {{"kind", "CostOfCapital"}, {"delta", 0.06}, {"q", 0.995}};
    config["converge"] = {{"id", "ou-coc"}, {"n_time", {32, 64, 128, 256}}};
    ASSERT_EQ(invoke({"converge", "--config", write_config(config), "--out", prefix()}), 0)
        << err_.str();
    const std::string csv = slurp(prefix() + "_converge.csv");
    EXPECT_EQ(csv.rfind("case_id,dt,error,fitted_order,reference\r\n", 0), 0u);
    const json report = json::parse(slurp(prefix() + "_converge.json"))["report"];
    EXPECT_EQ(report["status"], "Ok");
    EXPECT_NEAR(report["fitted_order"].get<double>(), 1.0, 0.2);

    config["converge"]["n_time"] = {32, 48, 96, 192};
    EXPECT_EQ(invoke({"converge", "--config", write_config(config), "--out", prefix("bad")}), 2);
}

TEST_F(CliTest, DavisWritesSurfacesAndCheck) {
    json config = abm_variance(0.0, 200);
    config["principle"] = {{"kind", "VarianceDiscounted"}, {"gamma", 1.0}, {"X0", 1.0}, {"r", 0.0}};
    config["davis"] = {{"perturbation", {{"kind", "Linear"}, {"slope", 1.0}}}};
    ASSERT_EQ(invoke({"davis", "--config", write_config(config), "--out", prefix()}), 0)
        << err_.str();
    const json summary = json::parse(slurp(prefix() + "_davis.json"));
    EXPECT_NEAR(summary["davis_price"].get<double>(), 1.0, 1e-8);
    EXPECT_NEAR(summary["base_price"].get<double>(), 0.5, 1e-6);
    EXPECT_EQ(slurp(prefix() + "_davis_check.csv").rfind("case_id,eps,gap,fitted_order\r\n", 0), 0u);
    EXPECT_TRUE(fs::exists(prefix() + "_base_surface.csv"));
    EXPECT_TRUE(fs::exists(prefix() + "_davis_surface.csv"));
}

TEST_F(CliTest, WriteAtomicReplacesWholeFile) {
    const fs::path target = dir_ / "target.txt";
    tcval::cli::write_atomic(target, "first version, rather long");
    tcval::cli::write_atomic(target, "second");
    EXPECT_EQ(slurp(target), "second");
    EXPECT_FALSE(fs::exists(dir_ / "target.txt.tmp"));
}

// The installed binary, as a separate process.
TEST_F(CliTest, BinaryExitCodes) {
    const auto cfg = write_config({{"calibrate", {{"q", 0.995}}}});
    const std::string bin = TCVAL_BINARY;
    auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status(bin + " calibrate --config " + cfg), 0);
    EXPECT_EQ(status(bin + " calibrate"), 2);
    EXPECT_EQ(status(bin + " price --config " + cfg), 2);
}

}  // namespace
