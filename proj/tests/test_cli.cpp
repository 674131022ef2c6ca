// Exercises the installed binary end to end: exit codes, file formats,
// byte-reproducibility of report bodies.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(SBM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(run("") == 2);
    CHECK(run("simulate") == 2);                          // no instance
    CHECK(run("frobnicate") == 2);                        // unknown command
    CHECK(run("simulate --gnb 2 1") == 2);                // wrong arity
    CHECK(run("formulas no-such-formula") == 2);
    CHECK(run("benchmark opt --instance /tmp/sbm_missing.json") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("capacity errors exit with 3") {
    CHECK(run("benchmark sopt --gnb 3 20 0.01") == 3);  // state space blowup
}

TEST_CASE("gen/simulate/benchmark round trip") {
    CHECK(run("gen --family gnb --n 2 --b 1 --p 0.5 --out /tmp/sbm_cli_inst.json") == 0);
    CHECK(run("benchmark opt --instance /tmp/sbm_cli_inst.json") == 0);
    CHECK(run("simulate --instance /tmp/sbm_cli_inst.json --trials 200 --seed 1 "
              "--out /tmp/sbm_cli_stats.csv --trace-out /tmp/sbm_cli_trace.csv") == 0);

    const std::string stats = slurp("/tmp/sbm_cli_stats.csv");
    CHECK(stats.find("policy,instance,trials,mean,var,ci95") != std::string::npos);
    CHECK(stats.find("# seed=1") != std::string::npos);
    CHECK(stats.find("# version=") != std::string::npos);
    CHECK(stats.find("# config=") != std::string::npos);

    const std::string trace = slurp("/tmp/sbm_cli_trace.csv");
    CHECK(trace.find("request_id,server_id,success,load_before") != std::string::npos);
    // 4 requests -> header lines + column row + 4 records
    int lines = 0;
    for (char c : trace) lines += c == '\n';
    CHECK(lines == 2 + 1 + 4);

    std::remove("/tmp/sbm_cli_inst.json");
    std::remove("/tmp/sbm_cli_stats.csv");
    std::remove("/tmp/sbm_cli_trace.csv");
}

TEST_CASE("reports are byte-identical across runs") {
    const std::string args =
        "convergence --n-list 2 3 --b 1 --p 0.2 --trials 300 --seed 9 --out ";
    CHECK(run(args + "/tmp/sbm_cli_conv_a.csv") == 0);
    CHECK(run(args + "/tmp/sbm_cli_conv_b.csv") == 0);
    const std::string a = slurp("/tmp/sbm_cli_conv_a.csv");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp("/tmp/sbm_cli_conv_b.csv"));
    std::remove("/tmp/sbm_cli_conv_a.csv");
    std::remove("/tmp/sbm_cli_conv_b.csv");
}

TEST_CASE("worker count does not change the report") {
    const std::string base =
        "simulate --gnb 2 2 0.25 --trials 500 --seed 3 --policy greedy --out ";
    CHECK(run(base + "/tmp/sbm_cli_w1.csv --workers 1") == 0);
    CHECK(run(base + "/tmp/sbm_cli_w4.csv --workers 4") == 0);
    CHECK(slurp("/tmp/sbm_cli_w1.csv") == slurp("/tmp/sbm_cli_w4.csv"));
    std::remove("/tmp/sbm_cli_w1.csv");
    std::remove("/tmp/sbm_cli_w4.csv");
}

TEST_CASE("dual-audit emits the summary headers") {
    CHECK(run("dual-audit --gnb 1 1 0.5 --trials 300 --out /tmp/sbm_cli_audit.csv") == 0);
    const std::string audit = slurp("/tmp/sbm_cli_audit.csv");
    CHECK(audit.find("# min_ratio=") != std::string::npos);
    CHECK(audit.find("# c_effective=") != std::string::npos);
    CHECK(audit.find("request,server,estimate,ci95,target,ratio") != std::string::npos);
    std::remove("/tmp/sbm_cli_audit.csv");
}

TEST_CASE("compare degrades gracefully when benchmarks refuse the size") {
    CHECK(run("compare --gnb 3 20 0.01 --trials 50 --out /tmp/sbm_cli_cmp.csv") == 0);
    const std::string cmp = slurp("/tmp/sbm_cli_cmp.csv");
    CHECK(cmp.find(",na,na,na,na,") != std::string::npos);  // columns empty, run completed
    CHECK(cmp.find("sbal,") != std::string::npos);
    CHECK(cmp.find("greedy,") != std::string::npos);
    std::remove("/tmp/sbm_cli_cmp.csv");
}

TEST_CASE("benchmark sidecars hold the solutions") {
    CHECK(run("gen --family gnb --n 1 --b 1 --p 0.5 --out /tmp/sbm_cli_tiny.json") == 0);
    CHECK(run("benchmark opt --instance /tmp/sbm_cli_tiny.json "
              "--solution-out /tmp/sbm_cli_lp.csv") == 0);
    const std::string lp = slurp("/tmp/sbm_cli_lp.csv");
    CHECK(lp.find("request,server,p,mass") != std::string::npos);
    CHECK(run("benchmark sopt --instance /tmp/sbm_cli_tiny.json "
              "--solution-out /tmp/sbm_cli_dp.csv") == 0);
    const std::string dp = slurp("/tmp/sbm_cli_dp.csv");
    CHECK(dp.find("t,state,action") != std::string::npos);
    std::remove("/tmp/sbm_cli_tiny.json");
    std::remove("/tmp/sbm_cli_lp.csv");
    std::remove("/tmp/sbm_cli_dp.csv");
}
