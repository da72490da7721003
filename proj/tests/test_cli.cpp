#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "prodense/cli.hpp"
#include "support.hpp"

using namespace prodense;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "prodense_cli_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

// The i != j set on a 3 x 3 grid with targets (2, 2).
std::string off_diagonal_instance() {
    const auto path = temp_path("off_diagonal.json");
    const auto d = fixtures::off_diagonal(3);
    write_instance(Instance{1, {2, 2}, make_rational(2, 3), LevelFamily(d.shape(), {{2, d}})}, path);
    return path;
}

}  // namespace

TEST(CliBounds, GoldenOutputs) {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases{
        {{"bounds", "t", "--eps", "1/2", "--targets", "2"}, "88\n"},
        {{"bounds", "t", "--eps", "1", "--targets", "2"}, "12\n"},
        {{"bounds", "t", "--eps", "3/4", "--targets", "2"}, "80/3\n"},
        {{"bounds", "t", "--eps", "1/2", "--targets", "2,2"}, "2796288\n"},
        {{"bounds", "sigma", "--theta", "1/4", "--eps", "1/2", "--k", "2"}, "6\n"},
        {{"bounds", "q", "--theta", "1/4", "--eps", "1/2", "--r", "1", "--targets", "2"}, "1431656448\n"},
        {{"bounds", "v", "--delta", "1/2", "--targets", "2"}, "688\n"},
        {{"bounds", "v", "--delta", "1/2", "--targets", "2", "--no-prune"}, "688\n"},
        {{"bounds", "f", "--delta", "1/2", "--targets", "2"}, "688\n"},
        {{"bounds", "eps-prime", "--eps", "1/2", "--targets", "2,2"}, "1/64\n"},
        {{"bounds", "s", "--delta", "1/3"}, "3\n"},
        {{"bounds", "ackermann", "--n", "3", "--x", "3"}, "16\n"},
        {{"bounds", "ackermann", "--n", "2", "--x", "64"}, "18446744073709551616\n"},
        {{"bounds", "p-eps", "--eps", "1/3"}, "2\n"},
        {{"bounds", "p-eps", "--eps", "1/8", "--log-base", "natural"}, "3\n"},
        {{"bounds", "leq-tower", "--value", "1025", "--iterations", "1", "--x", "10"}, "false\n"},
    };
    for (const auto& [args, expected] : cases) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 0) << args[1] << ": " << r.err;
        EXPECT_EQ(r.out, expected) << args[1];
    }
    const auto j = run({"bounds", "t", "--eps", "1/2", "--targets", "2", "--format", "json"});
    EXPECT_EQ(j.out, "{\"quantity\":\"t\",\"value\":\"88\"}\n");
    const auto chain = run({"--format", "json", "bounds", "f", "--delta", "1/2", "--targets", "2,2"});
    EXPECT_EQ(chain.code, 0);
    const auto values = nlohmann::json::parse(chain.out)["value"];
    ASSERT_EQ(values.size(), 2u);
    EXPECT_EQ(values[1].get<std::string>(), to_string(f_chain(make_rational(1, 2), std::vector<std::uint64_t>{2, 2})[1]));
}

TEST(CliBounds, InvalidInput) {
    EXPECT_EQ(run({"bounds", "t", "--eps", "0.5", "--targets", "2"}).code, 3);
    EXPECT_EQ(run({"bounds", "t", "--eps", "1/0", "--targets", "2"}).code, 3);
    EXPECT_EQ(run({"bounds", "sigma", "--theta", "1/2", "--eps", "1/2"}).code, 3);
    EXPECT_EQ(run({"bounds", "nonsense"}).code, 3);
    EXPECT_EQ(run({"bounds", "t", "--targets", "2"}).code, 3);
    EXPECT_EQ(run({}).code, 3);
    EXPECT_EQ(run({"frobnicate"}).code, 3);
    EXPECT_EQ(run({"bounds", "ackermann", "--n", "4", "--x", "4"}).code, 4);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliScenario, GenerateExtractVerify) {
    const auto inst = temp_path("planted.json");
    const auto planted = temp_path("planted_witness.json");
    auto g = run({"gen", "--seed", "5", "--sizes", "6,6,6", "--targets", "2,2,2", "--levels", "2,3", "--planted",
                  "--noise", "1/3", "--out", inst, "--witness-out", planted});
    ASSERT_EQ(g.code, 0) << g.err;
    EXPECT_EQ(run({"verify", "--instance", inst, "--witness", planted}).code, 0);

    const auto found = temp_path("found.json");
    auto e = run({"extract", "--instance", inst, "--mode", "exhaustive", "--out", found});
    ASSERT_EQ(e.code, 0) << e.err;
    EXPECT_EQ(run({"verify", "--instance", inst, "--witness", found}).code, 0);

    auto p = run({"per-level", "--instance", inst, "--mode", "exhaustive", "--format", "json"});
    EXPECT_EQ(p.code, 0) << p.err;
    EXPECT_TRUE(nlohmann::json::parse(p.out).contains("3"));

    const auto common = temp_path("common.json");
    auto w = run({"witness", "--instance", inst, "--t", "2", "--out", common});
    ASSERT_EQ(w.code, 0) << w.err;
    EXPECT_EQ(run({"verify", "--instance", inst, "--witness", common}).code, 0);

    auto r = run({"rank", "--instance", inst, "--cap", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("rank: 2"), std::string::npos) << r.out;

    auto s = run({"split", "--instance", inst, "--cut", "1", "--theta", "1/8", "--format", "json"});
    EXPECT_EQ(s.code, 0) << s.err;
    const auto sj = nlohmann::json::parse(s.out);
    EXPECT_FALSE(sj["kept"].empty());

    auto o = run({"oracle", "--instance", inst});
    EXPECT_EQ(o.code, 0) << o.err;
    EXPECT_NE(o.out.find("agree"), std::string::npos);

    // A tampered witness fails verification.
    auto tampered = read_witness(planted);
    tampered.subsets[0] = {0, 1, 2};
    write_witness(tampered, found);
    EXPECT_EQ(run({"verify", "--instance", inst, "--witness", found}).code, 2);
}

TEST(CliScenario, NotFoundAndErrors) {
    const auto inst = off_diagonal_instance();
    EXPECT_EQ(run({"extract", "--instance", inst, "--mode", "exhaustive"}).code, 2);
    EXPECT_EQ(run({"extract", "--instance", inst, "--mode", "proof"}).code, 2);
    EXPECT_EQ(run({"oracle", "--instance", inst}).code, 2);
    EXPECT_EQ(run({"witness", "--instance", inst, "--t", "1"}).code, 2);
    EXPECT_EQ(run({"per-level", "--instance", inst}).code, 2);
    EXPECT_EQ(run({"extract", "--instance", temp_path("missing.json")}).code, 3);
    EXPECT_EQ(run({"extract", "--instance", inst, "--mode", "fast"}).code, 3);
    EXPECT_EQ(run({"extract", "--instance", inst, "--level", "1"}).code, 3);
    EXPECT_EQ(run({"--max-nodes", "1", "extract", "--instance", inst, "--mode", "exhaustive"}).code, 4);
    EXPECT_EQ(run({"--max-cells", "4", "extract", "--instance", inst}).code, 4);
    const auto bad = temp_path("bad.json");
    detail::write_file(bad, R"({"version":1,"k0":0,"sizes":[2],"targets":[2],"delta":"3/0","levels":[]})");
    const auto r = run({"extract", "--instance", bad});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("instance.delta"), std::string::npos) << r.err;
}

TEST(CliScenario, ReportAndThreads) {
    auto r = run({"report", "--delta", "1/2", "--targets", "2,2"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("A_2^(2)(40)"), std::string::npos) << r.out;
    auto j = run({"report", "--delta", "1/2", "--targets", "2", "--format", "json"});
    EXPECT_EQ(nlohmann::json::parse(j.out)["rows"][0]["f"], "688");
    EXPECT_EQ(run({"report", "--delta", "3/4", "--targets", "2"}).code, 3);

    const auto inst = temp_path("random.json");
    ASSERT_EQ(run({"gen", "--seed", "2", "--sizes", "4,4,4", "--delta", "1/2", "--levels", "1,2,3", "--out", inst}).code, 0);
    const auto one = run({"--threads", "1", "per-level", "--instance", inst, "--mode", "exhaustive", "--format", "json"});
    const auto four = run({"--threads", "4", "per-level", "--instance", inst, "--mode", "exhaustive", "--format", "json"});
    EXPECT_EQ(one.out, four.out);
    EXPECT_EQ(one.code, four.code);
}

TEST(CliProcess, BinaryExitCodes) {
    const std::string bin = PRODENSE_CLI_PATH;
    const auto out = temp_path("process_out.txt");
    int status = std::system((bin + " bounds t --eps 1/2 --targets 2 > " + out).c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0);
    EXPECT_EQ(detail::read_file(out), "88\n");
    status = std::system((bin + " extract --mode exhaustive --instance " + off_diagonal_instance() + " 2>/dev/null").c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 2);
}
