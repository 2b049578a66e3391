// Acceptance suite: one line per criterion, exit nonzero on any failure.
// Every tolerance is pinned here or inside the corresponding check.

#include <cstdio>
#include <cstdlib>

#include "degensim/verify.hpp"

using namespace degensim;

int main(int argc, char** argv) {
    const std::uint64_t seed =
        argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240501ull;

    struct Entry {
        const char* label;
        CheckResult (*fn)(std::uint64_t);
    };
    const Entry entries[] = {
        {"1  L1 contraction (worst ratio vs e^{Lt}, tol 1.05)",
         acceptance::l1_contraction},
        {"2  comparison principle (positive part within 1e-8 + 10 tau |u0|)",
         acceptance::comparison_principle},
        {"3  boundedness barrier (max u <= M0 + 1e-8, M0 < 1)",
         acceptance::barrier_boundedness},
        {"4  energy identity (residual halves with tau; C=4 estimate)",
         acceptance::energy_identity},
        {"5  chain rule (defect factor >= 1.4; exact initial energy)",
         acceptance::chain_rule},
        {"6  initial attainment (early deviation factor >= 1.4)",
         acceptance::initial_attainment},
        {"7  picard contraction (<= 10 sweeps, ratios <= 0.6, ranges)",
         acceptance::picard_contraction},
        {"8  barenblatt oracle (monotone L1, order >= 0.8)",
         acceptance::barenblatt_oracle},
        {"9  barrier elliptic oracle (max error <= 1e-3, v >= c2)",
         acceptance::barrier_oracle},
        {"10 conservation (relative drift <= 1e-9 over 100 steps)",
         acceptance::conservation},
    };

    VerificationReport report;
    bool all_pass = true;
    for (const Entry& e : entries) {
        CheckResult r;
        try {
            r = e.fn(seed);
        } catch (const std::exception& ex) {
            r.check = e.label;
            r.instance = std::string("exception: ") + ex.what();
            r.pass = false;
            r.margin = -1.0;
        }
        all_pass = all_pass && r.pass;
        std::printf("[%s] %-62s margin=%-10.4g %s (%.1fs)\n",
                    r.pass ? "PASS" : "FAIL", e.label, r.margin,
                    r.instance.c_str(), r.runtime_s);
        std::fflush(stdout);
        report.add(r);
    }
    report.write_csv("acceptance_report.csv");
    std::printf("%s\n", all_pass ? "ALL CRITERIA PASS" : "CRITERIA FAILED");
    return all_pass ? 0 : 1;
}
