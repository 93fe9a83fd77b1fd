#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

// End-to-end checks through the installed command shape: every artifact a
// synthesizing command writes must re-verify, and identical seeds must give
// byte-identical reports.

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(SPECTRAL_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 512> buffer{};
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buffer.data(), buffer.size(), pipe)) result.output += buffer.data();
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::string tmp_path(const std::string& name) {
    return std::string("/tmp/spectral_cli_test_") + name;
}

}  // namespace

TEST_CASE("gen + analyze report the AND_2 statistics") {
    std::string bf = tmp_path("and2.bf");
    RunResult g = run("gen --kind and --n 2 --out " + bf);
    CHECK(g.exit_code == 0);
    RunResult a = run("analyze --in " + bf);
    CHECK(a.exit_code == 0);
    CHECK(contains(a.output, "A 2\n"));
    CHECK(contains(a.output, "SPAR 4\n"));
    CHECK(contains(a.output, "BIAS 1/2\n"));
    CHECK(contains(a.output, "TOP1 00 1/2\n"));
    CHECK(contains(a.output, "TOP2 01 1/2\n"));
}

TEST_CASE("synthesized artifacts re-verify from their files") {
    std::string bf = tmp_path("maj5.bf");
    REQUIRE(run("gen --kind majority --n 5 --out " + bf).exit_code == 0);

    for (std::string type : {"exact", "sparse"}) {
        std::string tree = tmp_path("maj5_" + type + ".pdt");
        RunResult s = run("synth " + type + " --in " + bf + " --out " + tree);
        CHECK(s.exit_code == 0);
        CHECK(contains(s.output, "BOUND_CHECK PASS"));
        RunResult v = run("verify --tree " + tree + " --in " + bf);
        CHECK(v.exit_code == 0);
        CHECK(contains(v.output, "RESULT EQUIVALENT"));
    }

    std::string ftree = tmp_path("maj5.fpdt");
    RunResult s = run("synth approx --in " + bf + " --eps 0.1 --out " + ftree);
    CHECK(s.exit_code == 0);
    RunResult v = run("verify --tree " + ftree + " --in " + bf + " --eps 0.1");
    CHECK(v.exit_code == 0);
    CHECK(contains(v.output, "RESULT PASS"));
}

TEST_CASE("learned trees re-verify and reports are seed-deterministic") {
    std::string bf = tmp_path("and6.bf");
    REQUIRE(run("gen --kind and --n 6 --out " + bf).exit_code == 0);
    std::string tree = tmp_path("and6_learned.pdt");
    std::string cmd = "learn --in " + bf + " --eps 0.1 --delta 0.05 --seed 11 --out " + tree;
    RunResult first = run(cmd);
    CHECK(first.exit_code == 0);
    CHECK(contains(first.output, "QUERIES "));
    RunResult v = run("verify --tree " + tree + " --in " + bf + " --eps 0.1");
    CHECK(v.exit_code == 0);

    RunResult second = run(cmd);
    CHECK(second.output == first.output);  // byte-identical for a fixed seed
}

TEST_CASE("p=3 tables flow through synth and verify") {
    std::string bf = tmp_path("f31.bf");
    std::ofstream(bf) << "BF p=3 n=1\n+1 -1 -1\n";
    std::string tree = tmp_path("f31.pdt");
    RunResult s = run("synth exact --in " + bf + " --out " + tree);
    CHECK(s.exit_code == 0);
    CHECK(contains(s.output, "SIZE 3"));
    RunResult v = run("verify --tree " + tree + " --in " + bf);
    CHECK(v.exit_code == 0);
    CHECK(contains(v.output, "RESULT EQUIVALENT"));
}

TEST_CASE("constant-subspace certificates come out of analyze") {
    std::string bf = tmp_path("or4.bf");
    REQUIRE(run("gen --kind or --n 4 --out " + bf).exit_code == 0);
    std::string cert = tmp_path("or4.subspace");
    RunResult a = run("analyze --in " + bf + " --subspace " + cert + " --mode accelerated");
    CHECK(a.exit_code == 0);
    CHECK(contains(a.output, "CODIM "));
    std::ifstream in(cert);
    std::string first_line;
    std::getline(in, first_line);
    CHECK(first_line.size() == 7);  // "<4 digits> <+1|-1>" per constraint line
}

TEST_CASE("exit codes distinguish usage, verification, and parse failures") {
    CHECK(run("synth bogus --in x --out y").exit_code == 2);
    CHECK(run("analyze").exit_code == 2);

    std::string bf = tmp_path("parity3.bf");
    REQUIRE(run("gen --kind parity --n 3 --mask 5 --out " + bf).exit_code == 0);
    std::string other = tmp_path("майority3.bf");
    REQUIRE(run("gen --kind majority --n 3 --out " + other).exit_code == 0);
    std::string tree = tmp_path("parity3.pdt");
    REQUIRE(run("synth exact --in " + bf + " --out " + tree).exit_code == 0);
    RunResult mismatch = run("verify --tree " + tree + " --in " + other);
    CHECK(mismatch.exit_code == 1);
    CHECK(contains(mismatch.output, "RESULT DIFFERENT"));

    std::string bad = tmp_path("bad.bf");
    std::ofstream(bad) << "BF p=2 n=2\n+1 nope +1 -1\n";
    RunResult parse = run("analyze --in " + bad);
    CHECK(parse.exit_code == 1);
    CHECK(contains(parse.output, "line 2"));

    CHECK(run("learn --in " + bf + " --out /tmp/x.pdt --ci").exit_code == 2);
}
