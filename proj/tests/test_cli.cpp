#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <string>

#ifndef QF_CLI_PATH
#define QF_CLI_PATH "qf"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(QF_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = pclose(p);
    r.exit_code = WEXITSTATUS(status);
    return r;
}

} // namespace

TEST_CASE("cli verdicts and exit codes") {
    SECTION("computed verdicts exit 0, even negative ones") {
        auto r = run("isotropic --form '{\"diag\":[1,1,1,1,1]}'");
        REQUIRE(r.exit_code == 0);
        auto j = nlohmann::json::parse(r.out);
        REQUIRE(j.at("result").at("isotropic") == false);
    }
    SECTION("input errors exit 1") {
        auto r = run("isotropic --form '{\"dim\":2,\"coeffs\":[\"1\"]}'");
        REQUIRE(r.exit_code == 1);
    }
    SECTION("unsupported operations exit 2") {
        // char-2 clifford invariant is out of scope
        auto r = run("invariants --form '{\"field\":{\"kind\":\"PrimeField\",\"params\":{\"p\":2}},"
                     "\"dim\":2,\"coeffs\":[\"1\",\"1\",\"1\"]}'");
        // discriminant works (Arf) but the clif path never runs for char 2;
        // use classify on an unsupported field shape instead
        auto r2 = run("witt --form '{\"field\":{\"kind\":\"RationalFunctions\",\"params\":"
                      "{\"base\":{\"kind\":\"Rationals\"},\"variable\":\"t\"}},\"diag\":[\"t\",\"1\"]}'");
        REQUIRE(r2.exit_code == 2);
        (void)r;
    }
}

TEST_CASE("cli reports are byte-identical across identical runs") {
    std::string args = "hyp-cert --form '{\"diag\":[1,1,1,7,1,1,1,7]}' --gamma 2 --seed 7";
    auto a = run(args);
    auto b = run(args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    // timings are excluded unless requested, so the default report is stable
    auto j = nlohmann::json::parse(a.out);
    REQUIRE_FALSE(j.contains("timings"));
    REQUIRE(j.at("seed") == 7);
}

TEST_CASE("cli certificate round trip through verify-cert") {
    auto gen = run("hyp-cert --form '{\"diag\":[1,1,1,7,1,1,1,7]}' --gamma 2");
    REQUIRE(gen.exit_code == 0);
    auto cert = nlohmann::json::parse(gen.out).at("result");
    cert.erase("verified");
    std::string cert_arg = cert.dump();
    // single-quote safe: the dump contains no single quotes
    auto ver = run("verify-cert --form '{\"diag\":[1,1,1,7,1,1,1,7]}' --gamma 2 --cert '" +
                   cert_arg + "'");
    REQUIRE(ver.exit_code == 0);
    auto j = nlohmann::json::parse(ver.out);
    REQUIRE(j.at("result").at("accept") == true);
}
