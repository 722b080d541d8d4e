#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

using std::string;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    string output;
};

Result run_cli(const string& args, const string& env = "") {
    const string cmd = env + (env.empty() ? "" : " ") + string(NSCH_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path temp_dir(const string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nsch_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

long count_lines(const fs::path& p) {
    const string s = slurp(p);
    long n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

const string kConfigs = NSCH_CONFIG_DIR;

}  // namespace

TEST(Cli, CheckPassesOnDefaultConfig) {
    const Result r = run_cli("check --config " + kConfigs + "/default.cfg");
    EXPECT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("PASS"), string::npos);
    EXPECT_EQ(r.output.find("FAIL"), string::npos);
}

TEST(Cli, MissingTimeStepIsConfigError) {
    const fs::path dir = temp_dir("missing");
    std::ofstream(dir / "c.cfg") << "grid.nx = 8\ngrid.ny = 8\ntime.t_end = 0.1\n";
    const Result r = run_cli("run --config " + (dir / "c.cfg").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("time.dt"), string::npos) << r.output;
    fs::remove_all(dir);
}

TEST(Cli, StrictEnergyRunWithCflViolationStopsBeforeStepping) {
    const fs::path dir = temp_dir("cfl");
    const Result r = run_cli("run --config " + kConfigs + "/default.cfg --set solver.strict_energy=true --set time.dt=0.01 "
                             "--set time.t_end=0.02 --set init.velocity_magnitude=50 --set output.dir=" + dir.string());
    EXPECT_EQ(r.code, 2) << r.output;
    EXPECT_FALSE(fs::exists(dir / "diagnostics.csv"));
    fs::remove_all(dir);
}

TEST(Cli, UnknownKeyAndBadUsageAreConfigErrors) {
    EXPECT_EQ(run_cli("run --config " + kConfigs + "/default.cfg --set nope.key=1").code, 2);
    EXPECT_EQ(run_cli("frobnicate").code, 2);
    EXPECT_EQ(run_cli("run --config /nonexistent/file.cfg").code, 2);
}

TEST(Cli, RunWritesCsvAndSnapshots) {
    const fs::path dir = temp_dir("run");
    const Result r = run_cli("run --config " + kConfigs + "/default.cfg --set time.t_end=0.001 --set output.every=1000 "
                             "--set output.dir=" + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(count_lines(dir / "diagnostics.csv"), 1 + 11);
    EXPECT_TRUE(fs::exists(dir / "snapshot_00000000.bin"));
    EXPECT_TRUE(fs::exists(dir / "snapshot_00000010.bin"));
    long snapshots = 0;
    for (const auto& e : fs::directory_iterator(dir)) snapshots += e.path().extension() == ".bin";
    EXPECT_EQ(snapshots, 2);
    fs::remove_all(dir);
}

TEST(Cli, LongSpinodalRunHasOneRowPerStep) {
    const fs::path dir = temp_dir("long");
    const Result r = run_cli("run --config " + kConfigs + "/spinodal.cfg --set time.dt=1e-4 --set time.t_end=0.2 "
                             "--set output.dir=" + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(count_lines(dir / "diagnostics.csv"), 1 + 2001);
    fs::remove_all(dir);
}

TEST(Cli, EnvironmentOverridesOutputDirectory) {
    const fs::path dir = temp_dir("env");
    const Result r = run_cli("run --config " + kConfigs + "/default.cfg --set time.t_end=0.0002 --set output.dir=/nonexistent/x",
                             "NSCH_OUTPUT_DIR=" + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(dir / "diagnostics.csv"));
    fs::remove_all(dir);
}

TEST(Cli, RepeatedRunsGiveIdenticalCsv) {
    const fs::path a = temp_dir("det_a");
    const fs::path b = temp_dir("det_b");
    const string args = "run --config " + kConfigs + "/default.cfg --set time.t_end=0.002 --set output.dir=";
    ASSERT_EQ(run_cli(args + a.string()).code, 0);
    ASSERT_EQ(run_cli(args + b.string()).code, 0);
    EXPECT_EQ(slurp(a / "diagnostics.csv"), slurp(b / "diagnostics.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, StationaryWritesSnapshot) {
    const fs::path dir = temp_dir("stat");
    const Result r = run_cli("stationary --config " + kConfigs + "/default.cfg --set grid.ny=1 --set domain.Lx=8 "
                             "--set grid.nx=64 --set init.kind=tanh --set init.width=1 --set init.velocity=zero "
                             "--set output.dir=" + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_TRUE(fs::exists(dir / "stationary.bin"));
    fs::remove_all(dir);
}
