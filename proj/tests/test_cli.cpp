#include "cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

using symplectic::cli::cli_main;

namespace {

struct CliRun {
    int code;
    std::string out, err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(SAMPLES_DIR) + "/" + name; }

}  // namespace

TEST(Cli, ThetaEvalPrintsTheValueAtTheOrigin) {
    const CliRun r = run({"theta", "eval", "--n", "1", "--z", "0", "--omega", "i"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "1.0864348112");
}

TEST(Cli, ThetaEvalAcceptsComplexAndMatrixArguments) {
    const CliRun r = run({"theta", "eval", "--n", "2", "--z", "0.1+0.2i,-0.3i", "--omega", "1.2i,0.1,0.1,0.9i", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["results"]["value"].size(), 2u);
}

TEST(Cli, NovikovBound) {
    const CliRun r = run({"novikov", "bound", "--b", "1,2,1", "--q", "0,1,0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "6\n");
}

TEST(Cli, VerifySuitesPass) {
    for (const char* suite : {"algebra", "rep", "coherent"}) {
        const CliRun r = run({"verify", suite});
        EXPECT_EQ(r.code, 0) << suite << "\n" << r.out << r.err;
        EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    }
    EXPECT_NE(run({"verify", "algebra"}).out.find("PASS lie-table-n4"), std::string::npos);
}

TEST(Cli, UsageErrorsExitWithTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"bogus"}).code, 2);
    EXPECT_EQ(run({"verify"}).code, 2);
    EXPECT_EQ(run({"novikov", "bound", "--b", "1,2"}).code, 2);
    EXPECT_EQ(run({"novikov", "bound", "--b", "1,2", "--q", "0,0"}).code, 2);
    EXPECT_EQ(run({"theta", "eval", "--omega", "-1"}).code, 2);
    EXPECT_EQ(run({"theta", "eval", "--z", "abc"}).code, 2);
    EXPECT_EQ(run({"flow", "fixed-points", "--hamiltonian", "/nonexistent.json"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, FailedAssertionExitsWithOneAndNamesTheCheck) {
    const CliRun r = run({"flow", "fixed-points", "--hamiltonian", sample("zero.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("fixed-points-nondegenerate"), std::string::npos);
    const auto j = nlohmann::json::parse(run({"--json", "flow", "fixed-points", "--hamiltonian", sample("zero.json")}).out);
    EXPECT_EQ(j["first_failure"], "fixed-points-nondegenerate");
    EXPECT_FALSE(j["passed"].get<bool>());
}

TEST(Cli, JsonReportsAreByteIdenticalAcrossRuns) {
    const std::vector<std::string> args = {"--json", "--seed", "7", "verify", "coherent"};
    EXPECT_EQ(run(args).out, run(args).out);
    const std::vector<std::string> flow = {"--json", "flow", "coincidence", "--count", "1"};
    const CliRun a = run(flow), b = run(flow);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, GlobalFlagsAfterTheSubcommand) {
    const CliRun r = run({"frobenius", "spectral", "--grid", "24", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["config"]["grid"], 24);
    EXPECT_EQ(j["results"]["periods"].size(), 2u);
}

TEST(Cli, FrobeniusCommands) {
    EXPECT_EQ(run({"frobenius", "build"}).code, 0);
    EXPECT_EQ(run({"frobenius", "spectrum"}).code, 0);
    // a gap wider than the branch separation marks the whole circle as caustic
    const CliRun wide = run({"frobenius", "build", "--gap", "10"});
    EXPECT_EQ(wide.code, 1);
    EXPECT_NE(wide.err.find("caustic-free"), std::string::npos);
}

TEST(Cli, NovikovRhoOnSampleComplexes) {
    auto j = nlohmann::json::parse(
        run({"--json", "novikov", "rho", "--complex", sample("cancelling_pair.json"), "--chain", "x@0.5"}).out);
    EXPECT_EQ(j["results"]["rho"], 1.5);
    EXPECT_EQ(j["results"]["generator"], "y");
    j = nlohmann::json::parse(run({"--json", "novikov", "rho", "--complex", sample("twisted_circle.json"), "--chain", "v"}).out);
    EXPECT_EQ(j["results"]["rho"], "-inf");
    EXPECT_EQ(j["results"]["betti"], (std::vector<int>{0, 0}));
    EXPECT_EQ(run({"novikov", "rho", "--complex", sample("twisted_circle.json"), "--chain", "nope"}).code, 2);
}
