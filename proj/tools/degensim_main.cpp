#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "degensim/config.hpp"
#include "degensim/verify.hpp"

namespace fs = std::filesystem;
using namespace degensim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

std::string output_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("DEGENSIM_OUT"); env && *env) return env;
    return cfg.output_directory;
}

void emit_snapshots(const SolutionTrace& trace, const RunConfig& cfg,
                    const fs::path& dir) {
    if (cfg.snapshot_every <= 0) return;
    for (std::size_t n = 0; n < trace.u.size(); ++n) {
        if (!trace.has_field(n)) continue;
        if (n % cfg.snapshot_every != 0 && n + 1 != trace.u.size()) continue;
        write_snapshot_csv(trace.u[n],
                           (dir / ("snapshot_" + std::to_string(n) + ".csv")).string());
    }
}

int cmd_run(const std::string& config_path) {
    RunConfig cfg = parse_config(config_path);
    const fs::path dir = output_dir(cfg);
    fs::create_directories(dir);

    SolutionTrace trace;
    const int stride = cfg.snapshot_every > 0 ? cfg.snapshot_every : 0;
    if (cfg.coupled()) {
        CoupledProblem p = cfg.make_coupled_problem();
        trace = picard_solve(p, PicardConfig{}, nullptr, stride);
    } else {
        ScalarProblem p = cfg.make_scalar_problem();
        trace = solve_scalar(p, stride);
    }
    trace.write_trace_csv((dir / "trace.csv").string(), cfg.coupled());
    emit_snapshots(trace, cfg, dir);

    if (!trace.complete) {
        std::cerr << "solver failed at step " << trace.failed_step << ": "
                  << trace.failure << "\n";
        return kExitSolver;
    }
    std::cout << "run complete: " << trace.stamps.size() << " states, trace at "
              << (dir / "trace.csv").string() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    VerificationReport report = run_suite(suite, seed);
    const char* env = std::getenv("DEGENSIM_OUT");
    const fs::path dir = (env && *env) ? fs::path(env) : fs::path(".");
    fs::create_directories(dir);
    report.write_csv((dir / "verify_report.csv").string());
    for (const CheckResult& e : report.entries())
        std::printf("[%s] %-24s margin=%-10.4g %s (%.1fs)\n",
                    e.pass ? "PASS" : "FAIL", e.check.c_str(), e.margin,
                    e.instance.c_str(), e.runtime_s);
    return report.all_pass() ? kExitOk : kExitVerify;
}

int cmd_convergence(const std::string& config_path, int levels) {
    RunConfig cfg = parse_config(config_path);
    const fs::path dir = output_dir(cfg);
    fs::create_directories(dir);

    const std::vector<ConvergenceRow> rows = run_convergence_study(cfg, levels);

    std::string csv = levels > 1 ? "h,tau,l1_error,observed_order\n"
                                 : "h,tau,l1_error\n";
    char buf[160];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (levels > 1 && i > 0) {
            const double order = std::log2(
                rows[i - 1].l1_error / std::max(rows[i].l1_error, 1e-300));
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.5g\n", rows[i].h,
                          rows[i].tau, rows[i].l1_error, order);
        } else if (levels > 1) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,\n", rows[i].h,
                          rows[i].tau, rows[i].l1_error);
        } else {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", rows[i].h,
                          rows[i].tau, rows[i].l1_error);
        }
        csv += buf;
    }
    std::cout << csv;
    std::ofstream os((dir / "convergence.csv").string());
    os << csv;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"degensim: degenerate reaction-diffusion solver and verifier"};
    app.require_subcommand(1);

    std::string run_config, conv_config;
    std::string suite = "all";
    std::uint64_t seed = 1234;
    int levels = 3;

    CLI::App* run = app.add_subcommand("run", "solve a configured problem");
    run->add_option("config", run_config, "config file")->required();

    CLI::App* verify =
        app.add_subcommand("verify", "run the theorem-certification suite");
    verify->add_option("--suite", suite, "all|contraction|energy|barrier")
        ->check(CLI::IsMember({"all", "contraction", "energy", "barrier"}));
    verify->add_option("--seed", seed, "random seed");

    CLI::App* conv = app.add_subcommand("convergence", "refinement study");
    conv->add_option("config", conv_config, "config file")->required();
    conv->add_option("--levels", levels, "refinement levels")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config);
        if (verify->parsed()) return cmd_verify(suite, seed);
        if (conv->parsed()) return cmd_convergence(conv_config, levels);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const PicardDivergence& e) {
        std::cerr << "solver diverged: " << e.what() << "\n";
        return kExitSolver;
    } catch (const NewtonDivergence& e) {
        std::cerr << "solver diverged: " << e.what() << "\n";
        return kExitSolver;
    } catch (const LinearSolveError& e) {
        std::cerr << "linear solver failed: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
