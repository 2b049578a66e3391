#ifndef DEGENSIM_CONFIG_HPP
#define DEGENSIM_CONFIG_HPP

#include <string>
#include <vector>

#include "degensim/coupled_solver.hpp"
#include "degensim/scalar_solver.hpp"

namespace degensim {

/// Parsed and validated run configuration. The file format is flat
/// `[section]` / `key = value` text with `#` comments; unknown keys are
/// rejected and all errors are reported together.
struct RunConfig {
    // [domain]
    int dimension = 1;
    std::array<double, 2> length = {1.0, 1.0};
    std::array<int, 2> cells = {64, 1};

    // [phi]
    PhiSpec phi = PhiSpec::linear(1.0);

    // [reaction]  kind in {none, porous_fischer, biofilm, biofilm_scalar}
    std::string reaction_kind = "none";
    double K1 = 1.0, K2 = 1.0, K3 = 1.0, K4 = 1.0;
    double d1 = 1.0, d2 = 1.0;
    double L_override = -1.0;

    // [bc]
    std::vector<Face> dirichlet_u;
    std::vector<Face> dirichlet_v;
    double u_D = 0.0;
    double v_D = 1.0;

    // [ic]  preset in {constant, bumps, file, barenblatt}
    std::string ic_preset = "constant";
    double ic_value = 0.0;
    int ic_count = 3;
    double ic_radius = 0.1;
    double ic_height = 0.5;
    std::string ic_file;
    double ic_t0 = 0.1;
    double ic_C = 0.1;
    double v0_value = 1.0;

    // [time]
    double T = 1.0;
    double tau = 1e-2;
    int snapshot_every = 0;

    // [output]
    std::string output_directory = "out";

    bool coupled() const { return reaction_kind == "biofilm"; }

    ScalarProblem make_scalar_problem() const;
    CoupledProblem make_coupled_problem() const;
    Field make_initial_u(const std::shared_ptr<const Grid>& grid) const;
};

/// Parses and fully validates a config file. On any problem throws
/// ConfigError whose message lists every error found, one per line, each
/// naming the offending section.key.
RunConfig parse_config(const std::string& path);

/// Same, reading from a string (tests).
RunConfig parse_config_text(const std::string& text);

/// One row of a refinement study.
struct ConvergenceRow {
    double h;
    double tau;
    double l1_error;
};

/// Refinement study for a scalar config. Porous-medium (m = 2, 1D, no
/// reaction) configs with the barenblatt initial preset refine the grid
/// against the closed-form self-similar solution; anything else halves tau
/// at fixed grid against a tau/2 self-reference.
std::vector<ConvergenceRow> run_convergence_study(const RunConfig& cfg,
                                                  int levels);

} // namespace degensim

#endif
