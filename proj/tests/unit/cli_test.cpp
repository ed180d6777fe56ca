#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pegrisk/app/commands.hpp"
#include "pegrisk/config.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("pegrisk_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    CliRun run(const std::string& args) {
        const auto out = dir_ / "stdout.txt";
        const auto err = dir_ / "stderr.txt";
        const std::string cmd = std::string("\"") + PEGRISK_CLI + "\" " + args + " > \"" + out.string() +
                                "\" 2> \"" + err.string() + "\"";
        const int status = std::system(cmd.c_str());
        CliRun r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
        fs::remove(out);
        fs::remove(err);
        return r;
    }

    void make_fixture(const std::string& extra = "") {
        const auto r = run("fixture --out-dir \"" + (dir_ / "data").string() + "\" " + extra);
        ASSERT_EQ(r.code, 0) << r.err;
    }

    fs::path dir_;
};

const char* kArtifacts[] = {"aligned.csv", "prob.csv", "features.csv", "table3.txt", "table3.csv",
                            "table4.txt",  "table4.csv", "figure1.vl.json", "figure2.vl.json", "manifest.txt"};

}  // namespace

TEST(ErrorLine, SingleLine) {
    EXPECT_EQ(pegrisk::app::format_error_line("io", "cannot open\nx.csv"), "error[io]: cannot open x.csv");
}

TEST_F(CliTest, DomainErrorFormat) {
    const auto r = run("prob --rho 1.2 --aligned nothing.csv");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error[domain]: ", 0), 0u) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, MissingFileNamesPath) {
    const auto r = run("align --spot \"" + (dir_ / "nope.csv").string() + "\" --futures x.csv");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error[io]: ", 0), 0u) << r.err;
    EXPECT_NE(r.err.find("nope.csv"), std::string::npos);
}

TEST_F(CliTest, UnknownConfigKey) {
    std::ofstream(dir_ / "bad.conf") << "rho = 0.7\nhorizn_days = 3\n";
    const auto r = run("prob --config \"" + (dir_ / "bad.conf").string() + "\"");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error[config]: ", 0), 0u) << r.err;
    EXPECT_NE(r.err.find("horizn_days"), std::string::npos);
}

TEST_F(CliTest, PipelineWritesEverythingDeterministically) {
    make_fixture();
    const auto conf = (dir_ / "data" / "fixture.conf").string();
    ASSERT_EQ(run("pipeline --config \"" + conf + "\" --out-dir \"" + (dir_ / "a").string() + "\"").code, 0);
    ASSERT_EQ(run("pipeline --config \"" + conf + "\" --out-dir \"" + (dir_ / "b").string() + "\"").code, 0);
    for (const char* name : kArtifacts) {
        ASSERT_TRUE(fs::exists(dir_ / "a" / name)) << name;
        if (std::string(name) == "manifest.txt") continue;  // records out_dir
        EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
    }
}

TEST_F(CliTest, ManifestReproducesRun) {
    make_fixture();
    const auto conf = (dir_ / "data" / "fixture.conf").string();
    ASSERT_EQ(run("pipeline --config \"" + conf + "\" --rho-source full-sample --out-dir \"" +
                  (dir_ / "a").string() + "\"")
                  .code,
              0);
    const auto again = run("pipeline --config \"" + (dir_ / "a" / "manifest.txt").string() + "\" --out-dir \"" +
                           (dir_ / "b").string() + "\"");
    ASSERT_EQ(again.code, 0) << again.err;
    for (const char* name : kArtifacts) {
        if (std::string(name) == "manifest.txt") continue;
        EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
    }
    auto strip = [](pegrisk::KeyValueConfig kv) {
        kv.set("out_dir", "");
        std::ostringstream os;
        kv.write(os);
        return os.str();
    };
    EXPECT_EQ(strip(pegrisk::KeyValueConfig::load(dir_ / "a" / "manifest.txt")),
              strip(pegrisk::KeyValueConfig::load(dir_ / "b" / "manifest.txt")));
}

TEST_F(CliTest, FailedPipelineLeavesNoArtifacts) {
    make_fixture();
    // A flat USDT series makes the USDT volatility column constant.
    {
        std::ofstream flat(dir_ / "flat.csv");
        flat << "timestamp,open,high,low,close,volume\n";
        std::ifstream spot(dir_ / "data" / "spot.csv");
        std::string line;
        std::getline(spot, line);
        while (std::getline(spot, line)) flat << line.substr(0, line.find(',')) << ",1,1,1,1,100\n";
    }
    const auto out = dir_ / "out";
    const auto r = run("pipeline --config \"" + (dir_ / "data" / "fixture.conf").string() + "\" --usdt \"" +
                       (dir_ / "flat.csv").string() + "\" --out-dir \"" + out.string() + "\"");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error[singular-design]: ", 0), 0u) << r.err;
    for (const char* name : kArtifacts) EXPECT_FALSE(fs::exists(out / name)) << name;
}

TEST_F(CliTest, SimulateReport) {
    const auto r = run("simulate --p-default 0.005 --delta0 0.001 --paths 20000 --seed 3 --threads 2");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("p_recovered="), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("within_3se="), std::string::npos) << r.out;
    const auto again = run("simulate --p-default 0.005 --delta0 0.001 --paths 20000 --seed 3 --threads 5");
    EXPECT_EQ(r.out, again.out);
}

TEST_F(CliTest, StageCommandsChain) {
    make_fixture();
    const auto data = dir_ / "data";
    const auto aligned = (dir_ / "aligned.csv").string();
    const auto features = (dir_ / "features.csv").string();
    ASSERT_EQ(run("align --spot \"" + (data / "spot.csv").string() + "\" --futures \"" +
                  (data / "futures.csv").string() + "\" --output \"" + aligned + "\"")
                  .code,
              0);
    const auto fit = run("fit --aligned \"" + aligned + "\"");
    ASSERT_EQ(fit.code, 0) << fit.err;
    EXPECT_NE(fit.out.find("rho_full_sample="), std::string::npos);
    ASSERT_EQ(run("features --aligned \"" + aligned + "\" --spot \"" + (data / "spot.csv").string() +
                  "\" --btc \"" + (data / "btc.csv").string() + "\" --output \"" + features + "\"")
                  .code,
              0);
    const auto reg = run("regress --features \"" + features + "\" --format csv");
    ASSERT_EQ(reg.code, 0) << reg.err;
    EXPECT_EQ(reg.out.rfind("column,term,", 0), 0u);
    const auto st = run("stats --aligned \"" + aligned + "\"");
    ASSERT_EQ(st.code, 0) << st.err;
    EXPECT_NE(st.out.find("basis_bps"), std::string::npos);
}
