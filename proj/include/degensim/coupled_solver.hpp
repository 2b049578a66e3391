#ifndef DEGENSIM_COUPLED_SOLVER_HPP
#define DEGENSIM_COUPLED_SOLVER_HPP

#include <memory>
#include <vector>

#include "degensim/scalar_solver.hpp"

namespace degensim {

/// Coupled problem
///   u_t = diffusion_u * div(grad phi(u)) + f(., u, v)
///   v_t = diffusion_v * Lap v + g(., u, v)
/// with separate Dirichlet parts for u (Gamma_1, data w^D = phi(u^D)) and
/// v (Gamma_2, data v^D). The v-equation is semilinear (identity phi).
struct CoupledProblem {
    std::shared_ptr<const Grid> grid;
    BoundaryMap bc_u;
    BoundaryMap bc_v;
    std::shared_ptr<const PhiEvaluator> phi;
    ReactionSpec reaction;  // coupled spec
    Field dirichlet_w;      // w^D for u
    Field dirichlet_v;      // v^D
    Field initial_u;        // u0 in [0,1)
    Field initial_v;        // v0 in [0,1]
    double horizon = 1.0;
    double step = 1e-2;
    double diffusion_u = 1.0;
    double diffusion_v = 1.0;
    NewtonConfig newton;
    LinearSolveConfig linear;

    void validate() const;
    int step_count() const;
};

struct PicardConfig {
    double safety = 0.5;        // contraction budget L dT e^{L dT} <= safety
    double tolerance = 1e-8;    // sup-in-time L1 distance between sweeps
    int max_sweeps = 60;
};

/// Largest dT with L dT e^{L dT} <= safety; the whole horizon when L = 0.
double choose_subinterval(double lipschitz, double safety, double horizon);

/// Per-window iteration record.
struct WindowLog {
    int first_step = 0;   // global index of the first step in the window
    int steps = 0;
    int sweeps = 0;
    std::vector<double> distances;  // sweep distances d_k
    double last_ratio = 0.0;        // d_k / d_{k-1} of the final sweep
    std::vector<double> start_u;    // state pasted in from the previous window
};

/// Solves v_t = diffusion_v Lap v + g(., u_frozen, v) over a window given the
/// frozen u values at each target stamp. States are indexed 0..steps with
/// entry 0 the window's initial state.
std::vector<std::vector<double>> half_step_solve_v(
    const CoupledProblem& p, const std::vector<std::vector<double>>& u_frozen,
    const std::vector<double>& v_start, double t_start, int steps);

/// Solves the degenerate u-equation given frozen v values; returns the w
/// states (Kirchhoff variable) alongside the u states.
struct UHalfStep {
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> w;
    std::vector<int> newton_iters;
};
UHalfStep half_step_solve_u(const CoupledProblem& p,
                            const std::vector<std::vector<double>>& v_frozen,
                            const std::vector<double>& w_start, double t_start,
                            int steps);

/// Picard/Banach decoupling: partitions [0,T] into contraction windows,
/// alternates the two half-solves until the sup-in-time L1 distance between
/// successive u iterates drops below tolerance, then pastes the windows.
SolutionTrace picard_solve(const CoupledProblem& problem,
                           const PicardConfig& cfg = {},
                           std::vector<WindowLog>* window_logs = nullptr,
                           int field_stride = 1);

} // namespace degensim

#endif
