#ifndef DEGENSIM_VERIFY_HPP
#define DEGENSIM_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "degensim/coupled_solver.hpp"
#include "degensim/scalar_solver.hpp"

namespace degensim {

/// One theorem-derived check: margin is measured/allowed, so values <= 1 pass.
struct CheckResult {
    std::string check;
    std::string instance;
    bool pass = false;
    double margin = 0.0;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
};

/// Collected results; each (check, instance) pair registers exactly once.
class VerificationReport {
public:
    void add(CheckResult r);
    bool all_pass() const;
    const std::vector<CheckResult>& entries() const { return entries_; }
    void write_csv(std::ostream& os) const;
    void write_csv(const std::string& path) const;

private:
    std::vector<CheckResult> entries_;
};

// ---------------------------------------------------------------------------
// Elementary checks on explicit instances.

/// Twin solves with identical reaction: asserts the L1 distance never exceeds
/// e^{Lt} times the initial distance by more than rel_tol (plus abs_tol).
CheckResult check_l1_contraction(const ScalarProblem& base, const Field& u0_a,
                                 const Field& u0_b, double rel_tol = 0.05,
                                 double abs_tol = 1e-12);

/// Ordered initial data stay ordered: positive part of (low - high) bounded
/// by abs_tol + rel_per_tau * tau * ||u0_high||_L1.
CheckResult check_comparison(const ScalarProblem& base, const Field& u0_low,
                             const Field& u0_high, double abs_tol = 1e-8,
                             double rel_per_tau = 10.0);

/// Residual of the discrete energy identity (relative energy at time n plus
/// the accumulated Dirichlet form balances the initial energy plus the
/// reaction work) stays within tol_fraction of the energy scale, and the
/// energy-estimate inequality with constant 4 holds.
CheckResult check_energy_identity(const ScalarProblem& problem,
                                  const SolutionTrace& trace,
                                  double tol_fraction = 0.05);

/// Largest energy-identity residual over the trace (the quantity whose
/// tau-halving behaviour the acceptance suite pins down).
double energy_identity_residual(const ScalarProblem& problem,
                                const SolutionTrace& trace);

/// Margin (measured/allowed) of the energy estimate with the pinned
/// constant 4; holds structurally for the implicit scheme.
double energy_estimate_margin(const ScalarProblem& problem,
                              const SolutionTrace& trace);

/// Per-step defect between the energy difference quotient and
/// <(u_n - u_{n-1})/tau, w_n - w^D>; also confirms the sign predicted by
/// convexity and the exact initial energy.
CheckResult check_chain_rule(const ScalarProblem& problem,
                             const SolutionTrace& trace,
                             double tol_fraction = 0.05);

double chain_rule_defect(const ScalarProblem& problem, const SolutionTrace& trace);

/// Early-window L1 deviation from u0 must shrink by at least `factor` when
/// tau is halved (the trace pair is solved internally).
CheckResult check_initial_attainment(const ScalarProblem& problem,
                                     double factor = 1.4, int stamps = 10);

/// Barrier boundedness: solves the auxiliary elliptic problem with
/// c1 = sup|f|, c2 = max(phi(1-theta), max|w^D|), sets
/// M0 = max(beta(K), -beta(-K)) and asserts max u <= M0 + 1e-8 over the whole
/// run (and M0 < 1 for a bounded interval).
struct BarrierCheck {
    CheckResult result;
    double c1 = 0.0, c2 = 0.0, K = 0.0, M0 = 0.0;
};
BarrierCheck check_barrier_bound(const ScalarProblem& problem, double theta);

/// Pure-Neumann conservation: |mass(t) - mass(0) - accumulated reaction mass|
/// within 10 * linear tolerance * steps.
CheckResult check_mass_balance(const ScalarProblem& problem,
                               const SolutionTrace& trace);

/// Backward Steklov average of a sampled time series: trapezoidal value of
/// (1/h) int_{t-h}^t, with the series frozen at its first value for t < 0.
std::vector<double> steklov_average(const std::vector<double>& stamps,
                                    const std::vector<double>& values, double h);

// ---------------------------------------------------------------------------
// Acceptance criteria (seeded, self-contained instances).

namespace acceptance {

CheckResult l1_contraction(std::uint64_t seed);      // porous_medium, biofilm scalar, porous_fischer twins
CheckResult comparison_principle(std::uint64_t seed);
CheckResult barrier_boundedness(std::uint64_t seed);
CheckResult energy_identity(std::uint64_t seed);     // tau-halving factor in [1.5, 2.5] + C=4 inequality
CheckResult chain_rule(std::uint64_t seed);          // defect factor >= 1.4, exact initial energy
CheckResult initial_attainment(std::uint64_t seed);
CheckResult picard_contraction(std::uint64_t seed);  // sweeps <= 10, ratios <= 0.6, ranges
CheckResult barenblatt_oracle(std::uint64_t seed);   // spatial order >= 0.8
CheckResult barrier_oracle(std::uint64_t seed);      // 1D closed form to 1e-3
CheckResult conservation(std::uint64_t seed);        // relative drift <= 1e-9 over 100 steps

} // namespace acceptance

/// Runs a named suite: "contraction", "energy", "barrier" or "all".
VerificationReport run_suite(const std::string& suite, std::uint64_t seed);

} // namespace degensim

#endif
