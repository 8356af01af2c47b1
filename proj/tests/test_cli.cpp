#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "ruitenburg/io.hpp"

using namespace ruitenburg;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    std::string cmd = std::string("'") + RUITENBURG_CLI + "' " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fixture(const std::string& name) { return std::string(RUITENBURG_FIXTURES) + "/" + name; }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST(Cli, IndexReports) {
    auto neg = cli("index '~x'");
    EXPECT_EQ(neg.code, 0);
    EXPECT_TRUE(contains(neg.out, "N=1, period=2")) << neg.out;
    auto id = cli("index x");
    EXPECT_EQ(id.code, 0);
    EXPECT_TRUE(contains(id.out, "N=1, period=1")) << id.out;
    auto imp = cli("index 'x -> y'");
    EXPECT_EQ(imp.code, 0);
    EXPECT_TRUE(contains(imp.out, "N=1, period=2")) << imp.out;
}

TEST(Cli, IndexJson) {
    auto r = cli("index '~x' --format json");
    ASSERT_EQ(r.code, 0);
    auto j = io::json::parse(r.out);
    EXPECT_EQ(j["index"], 1);
    EXPECT_EQ(j["period"], 2);
}

TEST(Cli, Prove) {
    auto ok = cli("prove 'x -> x'");
    EXPECT_EQ(ok.code, 0);
    EXPECT_TRUE(contains(ok.out, "provable"));
    auto path = (std::filesystem::temp_directory_path() / "ruitenburg_cli_cm.json").string();
    auto lem = cli("prove 'x | ~x' --out '" + path + "'");
    EXPECT_EQ(lem.code, 0);
    EXPECT_TRUE(contains(lem.out, "refuted")) << lem.out;
    auto m = io::loadModel(path);
    EXPECT_EQ(m.size(), 2u);
    EXPECT_FALSE(kripke::forces(m, syntax::parse("x | ~x")));
    std::filesystem::remove(path);
    EXPECT_EQ(cli("prove ''").code, 1);
    EXPECT_EQ(cli("prove 'x &'").code, 1);
}

TEST(Cli, Simulate) {
    auto one = cli("simulate '" + fixture("one_point_x.json") + "' '~x'");
    EXPECT_EQ(one.code, 0);
    EXPECT_TRUE(contains(one.out, "index=0, period=2")) << one.out;
    auto chain = cli("simulate '" + fixture("chain2_leaf_x.json") + "' '~x'");
    EXPECT_EQ(chain.code, 0);
    EXPECT_TRUE(contains(chain.out, "index=1, period=2")) << chain.out;
    auto bad = cli("simulate '" + fixture("non_rooted.json") + "' '~x'");
    EXPECT_EQ(bad.code, 1);
    EXPECT_TRUE(contains(bad.out, "points 0 and 1 are both maximal")) << bad.out;
}

TEST(Cli, SimulateJsonRoundTrips) {
    auto r = cli("simulate '" + fixture("chain2_leaf_x.json") + "' '~x' --format json");
    ASSERT_EQ(r.code, 0);
    auto t = io::traceFromJson(io::json::parse(r.out));
    EXPECT_EQ(t.index(), 1u);
    EXPECT_EQ(t.period(), 2u);
}

TEST(Cli, Corpus) {
    auto atoms = cli("corpus --connectives 0");
    EXPECT_EQ(atoms.code, 0);
    EXPECT_TRUE(contains(atoms.out, "N=1 period=1: 2")) << atoms.out;
    auto small = cli("corpus --connectives 2 --points 3");
    EXPECT_EQ(small.code, 0);
    EXPECT_TRUE(contains(small.out, "violations: 0")) << small.out;
}

TEST(Cli, Fixpoint) {
    auto lfp = cli("fixpoint --least 'y | x'");
    EXPECT_EQ(lfp.code, 0);
    EXPECT_TRUE(contains(lfp.out, "A(mu)<->mu: provable"));
    auto first = lfp.out.substr(0, lfp.out.find('\n'));
    EXPECT_TRUE(prover::equivIPC(syntax::parse(first), syntax::parse("y"))) << first;
    auto bot = cli("fixpoint --least x");
    EXPECT_EQ(bot.out.substr(0, bot.out.find('\n')), "false");
    EXPECT_EQ(cli("fixpoint --least 'x -> y'").code, 1);
    EXPECT_EQ(cli("fixpoint --least --greatest x").code, 1);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("frobnicate").code, 1);
    EXPECT_EQ(cli("index x --bogus").code, 1);
    EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, Deterministic) {
    auto a = cli("corpus --connectives 2 --sample 20 --seed 7");
    auto b = cli("corpus --connectives 2 --sample 20 --seed 7");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}
