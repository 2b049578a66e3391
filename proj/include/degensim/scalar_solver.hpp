#ifndef DEGENSIM_SCALAR_SOLVER_HPP
#define DEGENSIM_SCALAR_SOLVER_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "degensim/geometry.hpp"
#include "degensim/linalg.hpp"
#include "degensim/nonlinearity.hpp"
#include "degensim/reactions.hpp"

namespace degensim {

struct NewtonConfig {
    double tol = 1e-9;        // infinity-norm residual target
    int max_iterations = 50;
    int max_halvings = 30;
    int polish_iterations = 4;  // best-effort extra steps past tol
};

/// Scalar problem u_t = diffusion * div(grad phi(u)) + f(.,u) in the
/// Kirchhoff variable w = phi(u), with Dirichlet data w^D on the tagged
/// faces and zero flux elsewhere.
struct ScalarProblem {
    std::shared_ptr<const Grid> grid;
    BoundaryMap bc;
    std::shared_ptr<const PhiEvaluator> phi;
    ReactionSpec reaction;
    Field dirichlet_w;  // w^D = phi(u^D), nodal samples
    Field initial_u;    // u0, values in I with finite energy
    double horizon = 1.0;
    double step = 1e-2;
    double diffusion = 1.0;
    NewtonConfig newton;
    LinearSolveConfig linear;

    void validate() const;
    int step_count() const;
};

struct StepDiagnostics {
    double t = 0.0;
    double l1_u = 0.0, l2_u = 0.0, linf_u = 0.0;
    double min_u = 0.0, max_u = 0.0;
    double energy_rel = 0.0;            // sum Phi(u; u^D) vol
    double dirichlet_integral = 0.0;    // accumulated tau * sum (Aw-g)(w-w^D) vol
    double grad_w_sq = 0.0;             // face-sum |grad_h w|^2 at this step
    double reaction_work_acc = 0.0;     // accumulated tau * sum f (w-w^D) vol
    double f_l2_sq_acc = 0.0;           // accumulated tau * sum f^2 vol
    double w_gap_l2_sq_acc = 0.0;       // accumulated tau * sum (w-w^D)^2 vol
    double boundary_flux = 0.0;         // outward Dirichlet-face flux
    double mass = 0.0;                  // sum u vol
    double reaction_mass_acc = 0.0;     // accumulated tau * sum f vol
    int newton_iters = 0;
    // Coupled-run extensions.
    double l1_v = 0.0, linf_v = 0.0;
    int picard_sweeps = 0;
    double picard_last_ratio = 0.0;
};

/// Time-indexed fields plus per-step diagnostics. Fields are stored every
/// `field_stride` steps (stride 1 keeps everything; the verification harness
/// relies on that default). Skipped slots hold empty fields.
struct SolutionTrace {
    std::vector<double> stamps;
    std::vector<Field> u;
    std::vector<Field> w;
    std::vector<Field> v;  // coupled runs only
    std::vector<StepDiagnostics> diag;
    bool complete = true;
    int failed_step = -1;
    std::string failure;

    bool has_field(std::size_t n) const { return n < u.size() && !u[n].values.empty(); }
    void write_trace_csv(const std::string& path, bool coupled) const;
};

/// Nodal reaction closure used by the stepping core: value and u-derivative
/// at (node index, time, u).
struct NodalReaction {
    std::function<double(std::size_t, double, double)> value;
    std::function<double(std::size_t, double, double)> deriv;
};

/// Negative discrete Laplacian -Lap_h with ghost-value Dirichlet elimination:
/// interior faces carry the usual flux stencil, Neumann faces drop out,
/// Dirichlet faces contribute 2/h^2 to the diagonal.
SparseMatrix assemble_operator(const Grid& grid, const BoundaryMap& bc);

/// Affine load of the ghost elimination: g_i = sum over Dirichlet faces of
/// cell i of 2 w^D_i / h^2.
std::vector<double> dirichlet_load(const Grid& grid, const BoundaryMap& bc,
                                   const Field& dirichlet_w);

/// Face-sum Dirichlet energy |grad_h w|^2 (half-cell distance at Dirichlet
/// faces, zero contribution across Neumann faces).
double dirichlet_energy(const Grid& grid, const BoundaryMap& bc,
                        const std::vector<double>& w, const Field& dirichlet_w);

/// Total outward flux through Dirichlet faces of -diffusion * Lap_h w.
double boundary_flux_total(const Grid& grid, const BoundaryMap& bc,
                           const std::vector<double>& w, const Field& dirichlet_w,
                           double diffusion);

/// One backward-Euler step of beta(w)_t = diffusion * Lap_h w + f via damped
/// Newton: solves beta(w) - beta(w_prev) + tau diffusion (-Lap_h w) =
/// tau f(., t_next, beta(w)) and returns w with residual <= cfg.tol.
std::vector<double> implicit_step_w(const SparseMatrix& op,
                                    const std::vector<double>& load,
                                    const PhiEvaluator& phi, double diffusion,
                                    double tau, double t_next,
                                    const NodalReaction& reaction,
                                    const std::vector<double>& w_prev,
                                    const NewtonConfig& ncfg,
                                    const LinearSolveConfig& lcfg,
                                    int* newton_iters = nullptr);

/// Spec-level wrapper of the stepping core for the problem's own reaction.
Field implicit_step(const Field& w_prev, double t_next, const ScalarProblem& problem);

/// Full time loop. On Newton failure the step is retried once as two tau/2
/// substeps; if that fails too the trace is returned partial with the
/// failing step recorded.
SolutionTrace solve_scalar(const ScalarProblem& problem, int field_stride = 1);

/// Mixed elliptic barrier problem -Lap v = c1, v = c2 on the Dirichlet part,
/// zero flux elsewhere. Gamma must be nonempty.
struct BarrierSolution {
    Field v;
    double max_v = 0.0;
};
BarrierSolution solve_barrier(const Grid& grid, const BoundaryMap& bc, double c1,
                              double c2,
                              const LinearSolveConfig& lcfg = {});

/// M0 = max(beta(K), -beta(-K)), the sup bound of the barrier argument.
double sup_bound_M0(const PhiEvaluator& phi, double K);

/// beta'(w) = 1 / phi'(beta(w)), guarded against the degenerate point where
/// phi' vanishes (capped) so the Newton diagonal stays finite.
double beta_prime_guarded(const PhiEvaluator& phi, double u_of_w);

} // namespace degensim

#endif
