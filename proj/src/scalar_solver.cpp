#include "degensim/scalar_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>

namespace degensim {
namespace {

constexpr double kPhiPrimeFloor = 1e-13;  // beta' cap = 1/floor

double inf_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

} // namespace

double beta_prime_guarded(const PhiEvaluator& phi, double u_of_w) {
    const double dphi = phi.phi_prime(u_of_w);
    return 1.0 / std::max(dphi, kPhiPrimeFloor);
}

SparseMatrix assemble_operator(const Grid& grid, const BoundaryMap& bc) {
    const int nx = grid.cells[0];
    const int ny = grid.dimension == 2 ? grid.cells[1] : 1;
    const double ax = 1.0 / (grid.h[0] * grid.h[0]);
    const double ay = grid.dimension == 2 ? 1.0 / (grid.h[1] * grid.h[1]) : 0.0;

    std::vector<std::tuple<std::size_t, std::size_t, double>> trip;
    trip.reserve(static_cast<std::size_t>(nx) * ny * 5);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = grid.index(ix, iy);
            double diag = 0.0;
            if (ix > 0) {
                trip.emplace_back(i, grid.index(ix - 1, iy), -ax);
                diag += ax;
            } else if (bc.is_dirichlet(Face::Left)) {
                diag += 2.0 * ax;
            }
            if (ix < nx - 1) {
                trip.emplace_back(i, grid.index(ix + 1, iy), -ax);
                diag += ax;
            } else if (bc.is_dirichlet(Face::Right)) {
                diag += 2.0 * ax;
            }
            if (grid.dimension == 2) {
                if (iy > 0) {
                    trip.emplace_back(i, grid.index(ix, iy - 1), -ay);
                    diag += ay;
                } else if (bc.is_dirichlet(Face::Bottom)) {
                    diag += 2.0 * ay;
                }
                if (iy < ny - 1) {
                    trip.emplace_back(i, grid.index(ix, iy + 1), -ay);
                    diag += ay;
                } else if (bc.is_dirichlet(Face::Top)) {
                    diag += 2.0 * ay;
                }
            }
            trip.emplace_back(i, i, diag);
        }
    return SparseMatrix::from_triplets(grid.node_count(), std::move(trip));
}

std::vector<double> dirichlet_load(const Grid& grid, const BoundaryMap& bc,
                                   const Field& dirichlet_w) {
    const int nx = grid.cells[0];
    const int ny = grid.dimension == 2 ? grid.cells[1] : 1;
    const double ax = 1.0 / (grid.h[0] * grid.h[0]);
    const double ay = grid.dimension == 2 ? 1.0 / (grid.h[1] * grid.h[1]) : 0.0;
    std::vector<double> g(grid.node_count(), 0.0);
    if (bc.pure_neumann()) return g;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = grid.index(ix, iy);
            const double wd = dirichlet_w[i];
            if (ix == 0 && bc.is_dirichlet(Face::Left)) g[i] += 2.0 * ax * wd;
            if (ix == nx - 1 && bc.is_dirichlet(Face::Right)) g[i] += 2.0 * ax * wd;
            if (grid.dimension == 2) {
                if (iy == 0 && bc.is_dirichlet(Face::Bottom)) g[i] += 2.0 * ay * wd;
                if (iy == ny - 1 && bc.is_dirichlet(Face::Top)) g[i] += 2.0 * ay * wd;
            }
        }
    return g;
}

double dirichlet_energy(const Grid& grid, const BoundaryMap& bc,
                        const std::vector<double>& w, const Field& dirichlet_w) {
    const int nx = grid.cells[0];
    const int ny = grid.dimension == 2 ? grid.cells[1] : 1;
    const double vol = grid.cell_volume();
    double total = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = grid.index(ix, iy);
            if (ix < nx - 1) {
                const double d = (w[grid.index(ix + 1, iy)] - w[i]) / grid.h[0];
                total += d * d * vol;
            }
            if (grid.dimension == 2 && iy < ny - 1) {
                const double d = (w[grid.index(ix, iy + 1)] - w[i]) / grid.h[1];
                total += d * d * vol;
            }
            // Dirichlet faces: value imposed at the face, half-cell distance.
            auto dir_face = [&](bool at_face, Face f, double h) {
                if (!at_face || !bc.is_dirichlet(f)) return;
                const double d = (w[i] - dirichlet_w[i]) / (0.5 * h);
                total += d * d * 0.5 * vol;
            };
            dir_face(ix == 0, Face::Left, grid.h[0]);
            dir_face(ix == nx - 1, Face::Right, grid.h[0]);
            if (grid.dimension == 2) {
                dir_face(iy == 0, Face::Bottom, grid.h[1]);
                dir_face(iy == ny - 1, Face::Top, grid.h[1]);
            }
        }
    return total;
}

double boundary_flux_total(const Grid& grid, const BoundaryMap& bc,
                           const std::vector<double>& w, const Field& dirichlet_w,
                           double diffusion) {
    if (bc.pure_neumann()) return 0.0;
    const int nx = grid.cells[0];
    const int ny = grid.dimension == 2 ? grid.cells[1] : 1;
    double total = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t i = grid.index(ix, iy);
            auto dir_face = [&](bool at_face, Face f, double h, double area) {
                if (!at_face || !bc.is_dirichlet(f)) return;
                total += diffusion * 2.0 * (w[i] - dirichlet_w[i]) / h * area;
            };
            const double area_x = grid.dimension == 2 ? grid.h[1] : 1.0;
            const double area_y = grid.h[0];
            dir_face(ix == 0, Face::Left, grid.h[0], area_x);
            dir_face(ix == nx - 1, Face::Right, grid.h[0], area_x);
            if (grid.dimension == 2) {
                dir_face(iy == 0, Face::Bottom, grid.h[1], area_y);
                dir_face(iy == ny - 1, Face::Top, grid.h[1], area_y);
            }
        }
    return total;
}

void ScalarProblem::validate() const {
    if (!grid) throw ConfigError("problem has no grid");
    if (!phi) throw ConfigError("problem has no nonlinearity");
    if (initial_u.size() != grid->node_count())
        throw ConfigError("initial field size does not match the grid");
    if (!initial_u.all_finite()) throw ConfigError("initial data not finite");
    if (!dirichlet_w.values.empty() && !dirichlet_w.all_finite())
        throw ConfigError("Dirichlet data not finite");
    const PhiSpec& s = phi->spec();
    double energy = 0.0;
    for (double u0 : initial_u.values) {
        if (u0 <= s.lo || u0 >= s.hi)
            throw ConfigError("initial data leaves the admissible interval I");
        energy += phi->primitive(u0);
    }
    if (!std::isfinite(energy))
        throw ConfigError("initial data has infinite energy");
    if (!(horizon > 0.0) || !(step > 0.0))
        throw ConfigError("horizon and step must be positive");
    const double ratio = horizon / step;
    if (std::abs(ratio - std::round(ratio)) > 1e-8 * std::max(1.0, ratio))
        throw ConfigError("horizon must be an integer multiple of the step");
    if (!(diffusion > 0.0)) throw ConfigError("diffusion must be positive");
}

int ScalarProblem::step_count() const {
    return static_cast<int>(std::round(horizon / step));
}

std::vector<double> implicit_step_w(const SparseMatrix& op,
                                    const std::vector<double>& load,
                                    const PhiEvaluator& phi, double diffusion,
                                    double tau, double t_next,
                                    const NodalReaction& reaction,
                                    const std::vector<double>& w_prev,
                                    const NewtonConfig& ncfg,
                                    const LinearSolveConfig& lcfg,
                                    int* newton_iters) {
    const std::size_t n = w_prev.size();
    for (double v : w_prev)
        if (!std::isfinite(v))
            throw DomainError("implicit step: previous state is not finite");

    std::vector<double> beta_prev(n);
    for (std::size_t i = 0; i < n; ++i) beta_prev[i] = phi.phi_inverse(w_prev[i]);

    std::vector<double> w = w_prev, u(n), Aw(n), res(n);
    const bool tridiag = op.is_tridiagonal();

    auto residual = [&](const std::vector<double>& wk, std::vector<double>& out,
                        std::vector<double>& uk) {
        op.multiply_into(wk, Aw);
        for (std::size_t i = 0; i < n; ++i) {
            uk[i] = phi.phi_inverse(wk[i]);
            const double f = reaction.value(i, t_next, uk[i]);
            out[i] = uk[i] - beta_prev[i] + tau * diffusion * (Aw[i] - load[i]) -
                     tau * f;
        }
    };

    residual(w, res, u);
    double rnorm = inf_norm(res);
    const double polish_floor = 1e-14 * (1.0 + inf_norm(beta_prev));

    int iters = 0;
    std::vector<double> w_try(n), res_try(n), u_try(n);
    bool reached_tol = rnorm <= ncfg.tol;

    // Phase 1: iterate to tolerance (errors past the budget). Phase 2:
    // best-effort polish toward machine precision; mass bookkeeping gets the
    // extra digits and quadratic convergence makes them nearly free.
    int polish_left = ncfg.polish_iterations;
    while (true) {
        if (!reached_tol && rnorm <= ncfg.tol) reached_tol = true;
        if (reached_tol && (rnorm <= polish_floor || polish_left == 0)) break;
        if (!reached_tol && iters >= ncfg.max_iterations)
            throw NewtonDivergence("Newton iteration budget exhausted", rnorm);

        // Jacobian diag(beta'(w) (1 - tau f_u)) + tau diffusion op, with
        // negative diagonal contributions clamped away to preserve SPD.
        std::vector<double> diag(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double bp = beta_prime_guarded(phi, u[i]);
            const double fu = reaction.deriv(i, t_next, u[i]);
            diag[i] = std::max(0.0, bp * (1.0 - tau * fu));
        }
        const SparseMatrix jmat = op.scaled_with_diagonal(tau * diffusion, diag);

        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -res[i];
        std::vector<double> delta;
        try {
            delta = tridiag ? tridiagonal_solve(jmat, rhs) : cg_solve(jmat, rhs, lcfg);
        } catch (const ConvergenceError& e) {
            if (reached_tol) break;  // polish only; keep the converged iterate
            throw LinearSolveError(std::string("Newton linear solve failed: ") +
                                       e.what(),
                                   e.final_residual);
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= ncfg.max_halvings; ++halving) {
            for (std::size_t i = 0; i < n; ++i) w_try[i] = w[i] + lambda * delta[i];
            residual(w_try, res_try, u_try);
            const double rtry = inf_norm(res_try);
            if (rtry < rnorm) {
                w.swap(w_try);
                res.swap(res_try);
                u.swap(u_try);
                rnorm = rtry;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        ++iters;
        if (!accepted) {
            if (reached_tol) break;
            throw NewtonDivergence("Newton damping exhausted without descent", rnorm);
        }
        if (reached_tol) --polish_left;
    }

    if (newton_iters) *newton_iters = iters;
    return w;
}

Field implicit_step(const Field& w_prev, double t_next, const ScalarProblem& p) {
    const SparseMatrix op = assemble_operator(*p.grid, p.bc);
    Field wd = p.dirichlet_w;
    if (wd.values.empty()) wd = Field(p.grid, 0.0, FieldRole::W);
    const std::vector<double> load = dirichlet_load(*p.grid, p.bc, wd);
    NodalReaction rc{
        [&p](std::size_t i, double t, double u) {
            const Grid& g = *p.grid;
            return eval_scalar(p.reaction, g.x_of(i), t, u);
        },
        [&p](std::size_t i, double t, double u) {
            const Grid& g = *p.grid;
            return scalar_df_du(p.reaction, g.x_of(i), t, u);
        }};
    Field out(p.grid, 0.0, FieldRole::W);
    out.values = implicit_step_w(op, load, *p.phi, p.diffusion, p.step,
                                 t_next, rc, w_prev.values, p.newton, p.linear);
    return out;
}

namespace {

StepDiagnostics make_diagnostics(const ScalarProblem& p, const SparseMatrix& op,
                                 const std::vector<double>& load, const Field& wd,
                                 const std::vector<double>& u_of_wd,
                                 const std::vector<double>& w,
                                 const std::vector<double>& u, double t,
                                 const StepDiagnostics* prev, double tau,
                                 int newton_iters) {
    const Grid& g = *p.grid;
    const double vol = g.cell_volume();
    StepDiagnostics d;
    d.t = t;
    d.newton_iters = newton_iters;
    d.l1_u = discrete_norm(g, u, NormKind::L1);
    d.l2_u = discrete_norm(g, u, NormKind::L2);
    d.linf_u = discrete_norm(g, u, NormKind::Linf);
    d.min_u = *std::min_element(u.begin(), u.end());
    d.max_u = *std::max_element(u.begin(), u.end());

    double energy = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        energy += p.phi->energy_primitive(u[i], u_of_wd[i]);
        mass += u[i];
    }
    d.energy_rel = energy * vol;
    d.mass = mass * vol;
    d.grad_w_sq = dirichlet_energy(g, p.bc, w, wd);
    d.boundary_flux = boundary_flux_total(g, p.bc, w, wd, p.diffusion);

    if (prev) {
        std::vector<double> Aw = op.multiply(w);
        double a_form = 0.0, fwork = 0.0, f2 = 0.0, gap2 = 0.0, fmass = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double gap = w[i] - wd[i];
            const double f = eval_scalar(p.reaction, g.x_of(i), t, u[i]);
            a_form += (Aw[i] - load[i]) * gap;
            fwork += f * gap;
            f2 += f * f;
            gap2 += gap * gap;
            fmass += f;
        }
        d.dirichlet_integral =
            prev->dirichlet_integral + tau * p.diffusion * a_form * vol;
        d.reaction_work_acc = prev->reaction_work_acc + tau * fwork * vol;
        d.f_l2_sq_acc = prev->f_l2_sq_acc + tau * f2 * vol;
        d.w_gap_l2_sq_acc = prev->w_gap_l2_sq_acc + tau * gap2 * vol;
        d.reaction_mass_acc = prev->reaction_mass_acc + tau * fmass * vol;
    }
    return d;
}

} // namespace

SolutionTrace solve_scalar(const ScalarProblem& p, int field_stride) {
    p.validate();
    const Grid& g = *p.grid;
    if (p.bc.pure_neumann() && !p.bc.verification_only)
        throw ConfigError("pure-Neumann map allowed only in verification mode");

    const SparseMatrix op = assemble_operator(g, p.bc);
    Field wd = p.dirichlet_w;
    if (wd.values.empty()) wd = Field(p.grid, 0.0, FieldRole::W);
    const std::vector<double> load = dirichlet_load(g, p.bc, wd);

    std::vector<double> u_of_wd(g.node_count());
    for (std::size_t i = 0; i < u_of_wd.size(); ++i)
        u_of_wd[i] = p.phi->phi_inverse(wd[i]);

    NodalReaction rc{
        [&p, &g](std::size_t i, double t, double u) {
            return eval_scalar(p.reaction, g.x_of(i), t, u);
        },
        [&p, &g](std::size_t i, double t, double u) {
            return scalar_df_du(p.reaction, g.x_of(i), t, u);
        }};

    const int steps = p.step_count();
    SolutionTrace trace;
    trace.stamps.reserve(steps + 1);
    trace.diag.reserve(steps + 1);

    // w0 = phi(u0) imposed nodally, endpoint-clamped.
    std::vector<double> w(g.node_count()), u(g.node_count());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double u0 = p.phi->clamp_to_domain(p.initial_u[i]);
        w[i] = p.phi->phi(u0);
        u[i] = u0;
    }

    auto push_state = [&](int n, const StepDiagnostics& d) {
        trace.stamps.push_back(d.t);
        trace.diag.push_back(d);
        const bool keep = field_stride > 0 && (n % field_stride == 0);
        Field fu(p.grid, 0.0, FieldRole::U), fw(p.grid, 0.0, FieldRole::W);
        if (keep || n == steps) {
            fu.values = u;
            fw.values = w;
        } else {
            fu.values.clear();
            fw.values.clear();
        }
        trace.u.push_back(std::move(fu));
        trace.w.push_back(std::move(fw));
    };

    push_state(0, make_diagnostics(p, op, load, wd, u_of_wd, w, u, 0.0, nullptr,
                                   p.step, 0));

    for (int n = 1; n <= steps; ++n) {
        const double t = n * p.step;
        int iters = 0;
        std::vector<double> w_next;
        try {
            w_next = implicit_step_w(op, load, *p.phi, p.diffusion, p.step, t,
                                     rc, w, p.newton, p.linear, &iters);
        } catch (const std::runtime_error& first_failure) {
            // One tau/2 retry: two half steps, then give up with a partial trace.
            try {
                int it1 = 0, it2 = 0;
                std::vector<double> w_half =
                    implicit_step_w(op, load, *p.phi, p.diffusion, 0.5 * p.step,
                                    t - 0.5 * p.step, rc, w, p.newton, p.linear,
                                    &it1);
                w_next = implicit_step_w(op, load, *p.phi, p.diffusion,
                                         0.5 * p.step, t, rc, w_half, p.newton,
                                         p.linear, &it2);
                iters = it1 + it2;
            } catch (const std::runtime_error& second_failure) {
                trace.complete = false;
                trace.failed_step = n;
                trace.failure = std::string(first_failure.what()) +
                                "; tau/2 retry: " + second_failure.what();
                return trace;
            }
        }
        w = std::move(w_next);
        for (std::size_t i = 0; i < w.size(); ++i) u[i] = p.phi->phi_inverse(w[i]);
        push_state(n, make_diagnostics(p, op, load, wd, u_of_wd, w, u, t,
                                       &trace.diag.back(), p.step, iters));
    }
    return trace;
}

BarrierSolution solve_barrier(const Grid& grid, const BoundaryMap& bc, double c1,
                              double c2, const LinearSolveConfig& lcfg) {
    if (bc.pure_neumann())
        throw ConfigError("barrier problem requires a nonempty Dirichlet part");
    if (!(c1 >= 0.0)) throw DomainError("barrier requires c1 >= 0");

    auto gptr = std::make_shared<Grid>(grid);
    const SparseMatrix op = assemble_operator(grid, bc);
    Field wd(gptr, c2, FieldRole::Auxiliary);
    std::vector<double> rhs = dirichlet_load(grid, bc, wd);
    for (double& r : rhs) r += c1;

    std::vector<double> v;
    try {
        v = op.is_tridiagonal() ? tridiagonal_solve(op, rhs) : cg_solve(op, rhs, lcfg);
    } catch (const ConvergenceError& e) {
        throw LinearSolveError(std::string("barrier solve failed: ") + e.what(),
                               e.final_residual);
    }
    BarrierSolution out;
    out.v = Field(gptr, 0.0, FieldRole::Auxiliary);
    out.v.values = v;
    out.max_v = *std::max_element(v.begin(), v.end());
    return out;
}

double sup_bound_M0(const PhiEvaluator& phi, double K) {
    if (!(K >= 0.0)) throw DomainError("sup_bound_M0 requires K >= 0");
    return std::max(phi.phi_inverse(K), -phi.phi_inverse(-K));
}

void SolutionTrace::write_trace_csv(const std::string& path, bool coupled) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open trace file: " + path);
    os << "step,t,l1_u,l2_u,linf_u,min_u,max_u,energy_rel,dirichlet_integral,"
          "newton_iters";
    if (coupled) os << ",l1_v,linf_v,picard_sweeps,picard_last_ratio";
    os << "\n";
    char buf[512];
    for (std::size_t n = 0; n < diag.size(); ++n) {
        const StepDiagnostics& d = diag[n];
        std::snprintf(buf, sizeof(buf),
                      "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d", n,
                      d.t, d.l1_u, d.l2_u, d.linf_u, d.min_u, d.max_u,
                      d.energy_rel, d.dirichlet_integral, d.newton_iters);
        os << buf;
        if (coupled) {
            std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%d,%.17g", d.l1_v,
                          d.linf_v, d.picard_sweeps, d.picard_last_ratio);
            os << buf;
        }
        os << "\n";
    }
}

} // namespace degensim
