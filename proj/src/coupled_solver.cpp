#include "degensim/coupled_solver.hpp"

#include <algorithm>
#include <cmath>

namespace degensim {
namespace {

const std::shared_ptr<const PhiEvaluator>& identity_phi() {
    static const auto eval =
        std::make_shared<const PhiEvaluator>(PhiSpec::linear(1.0));
    return eval;
}

double l1_distance(const Grid& g, const std::vector<double>& a,
                   const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s * g.cell_volume();
}

} // namespace

void CoupledProblem::validate() const {
    if (!grid) throw ConfigError("problem has no grid");
    if (!phi) throw ConfigError("problem has no nonlinearity");
    if (!reaction.coupled && reaction.kind != ReactionSpec::Kind::None &&
        reaction.kind != ReactionSpec::Kind::Custom)
        throw ConfigError("coupled problem requires a coupled reaction spec");
    const std::size_t n = grid->node_count();
    if (initial_u.size() != n || initial_v.size() != n)
        throw ConfigError("initial field size does not match the grid");
    for (double u0 : initial_u.values)
        if (!(u0 >= 0.0) || u0 >= 1.0)
            throw ConfigError("u0 must take values in [0,1)");
    for (double v0 : initial_v.values)
        if (!(v0 >= 0.0) || v0 > 1.0)
            throw ConfigError("v0 must take values in [0,1]");
    if (!(horizon > 0.0) || !(step > 0.0))
        throw ConfigError("horizon and step must be positive");
    const double ratio = horizon / step;
    if (std::abs(ratio - std::round(ratio)) > 1e-8 * std::max(1.0, ratio))
        throw ConfigError("horizon must be an integer multiple of the step");
}

int CoupledProblem::step_count() const {
    return static_cast<int>(std::round(horizon / step));
}

double choose_subinterval(double lipschitz, double safety, double horizon) {
    if (!(safety > 0.0 && safety < 1.0))
        throw ConfigError("picard safety must lie in (0,1)");
    if (lipschitz <= 0.0) return horizon;
    // Solve x e^x = safety by bisection; dT = x / L. x e^x is increasing, a
    // root exists in (0, 1) for safety < 1 < e.
    double lo = 0.0, hi = 1.0;
    while (hi * std::exp(hi) < safety) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid * std::exp(mid) < safety)
            lo = mid;
        else
            hi = mid;
    }
    return std::min(horizon, 0.5 * (lo + hi) / lipschitz);
}

std::vector<std::vector<double>> half_step_solve_v(
    const CoupledProblem& p, const std::vector<std::vector<double>>& u_frozen,
    const std::vector<double>& v_start, double t_start, int steps) {
    if (static_cast<int>(u_frozen.size()) < steps + 1)
        throw DimensionError("frozen u trace does not cover the window");
    const Grid& g = *p.grid;
    const SparseMatrix op = assemble_operator(g, p.bc_v);
    Field vd = p.dirichlet_v;
    if (vd.values.empty()) vd = Field(p.grid, 0.0, FieldRole::V);
    const std::vector<double> load = dirichlet_load(g, p.bc_v, vd);

    std::vector<std::vector<double>> v;
    v.reserve(steps + 1);
    v.push_back(v_start);
    for (int j = 1; j <= steps; ++j) {
        const double t = t_start + j * p.step;
        const std::vector<double>& uj = u_frozen[j];
        NodalReaction rc{
            [&p, &uj](std::size_t i, double tt, double vv) {
                (void)tt;
                return eval_coupled(p.reaction, 0, 0, uj[i], vv).second;
            },
            [&p, &uj](std::size_t i, double tt, double vv) {
                (void)tt;
                return coupled_dg_dv(p.reaction, uj[i], vv);
            }};
        v.push_back(implicit_step_w(op, load, *identity_phi(), p.diffusion_v,
                                    p.step, t, rc, v.back(), p.newton, p.linear));
    }
    return v;
}

UHalfStep half_step_solve_u(const CoupledProblem& p,
                            const std::vector<std::vector<double>>& v_frozen,
                            const std::vector<double>& w_start, double t_start,
                            int steps) {
    if (static_cast<int>(v_frozen.size()) < steps + 1)
        throw DimensionError("frozen v trace does not cover the window");
    const Grid& g = *p.grid;
    const SparseMatrix op = assemble_operator(g, p.bc_u);
    Field wd = p.dirichlet_w;
    if (wd.values.empty()) wd = Field(p.grid, 0.0, FieldRole::W);
    const std::vector<double> load = dirichlet_load(g, p.bc_u, wd);

    UHalfStep out;
    out.w.reserve(steps + 1);
    out.u.reserve(steps + 1);
    out.w.push_back(w_start);
    {
        std::vector<double> u0(w_start.size());
        for (std::size_t i = 0; i < u0.size(); ++i)
            u0[i] = p.phi->phi_inverse(w_start[i]);
        out.u.push_back(std::move(u0));
    }
    for (int j = 1; j <= steps; ++j) {
        const double t = t_start + j * p.step;
        const std::vector<double>& vj = v_frozen[j];
        NodalReaction rc{
            [&p, &vj](std::size_t i, double tt, double uu) {
                (void)tt;
                return eval_coupled(p.reaction, 0, 0, uu, vj[i]).first;
            },
            [&p, &vj](std::size_t i, double tt, double uu) {
                (void)tt;
                return coupled_df_du(p.reaction, uu, vj[i]);
            }};
        int iters = 0;
        out.w.push_back(implicit_step_w(op, load, *p.phi, p.diffusion_u,
                                        p.step, t, rc, out.w.back(), p.newton,
                                        p.linear, &iters));
        out.newton_iters.push_back(iters);
        std::vector<double> uj(out.w.back().size());
        for (std::size_t i = 0; i < uj.size(); ++i)
            uj[i] = p.phi->phi_inverse(out.w.back()[i]);
        out.u.push_back(std::move(uj));
    }
    return out;
}

SolutionTrace picard_solve(const CoupledProblem& p, const PicardConfig& cfg,
                           std::vector<WindowLog>* window_logs,
                           int field_stride) {
    p.validate();
    const Grid& g = *p.grid;
    const double vol = g.cell_volume();
    const double L = lipschitz_bound(p.reaction);
    const double dT = choose_subinterval(L, cfg.safety, p.horizon);
    const int total_steps = p.step_count();
    const int window_steps =
        std::max(1, static_cast<int>(std::floor(dT / p.step + 1e-9)));

    Field wd = p.dirichlet_w;
    if (wd.values.empty()) wd = Field(p.grid, 0.0, FieldRole::W);
    const SparseMatrix op_u = assemble_operator(g, p.bc_u);
    const std::vector<double> load_u = dirichlet_load(g, p.bc_u, wd);
    std::vector<double> u_of_wd(g.node_count());
    for (std::size_t i = 0; i < u_of_wd.size(); ++i)
        u_of_wd[i] = p.phi->phi_inverse(wd[i]);

    std::vector<double> w_cur(g.node_count()), u_cur(g.node_count());
    for (std::size_t i = 0; i < w_cur.size(); ++i) {
        const double u0 = p.phi->clamp_to_domain(std::max(p.initial_u[i], 0.0));
        w_cur[i] = p.phi->phi(u0);
        u_cur[i] = u0;
    }
    std::vector<double> v_cur = p.initial_v.values;

    SolutionTrace trace;
    auto push_state = [&](int n, const StepDiagnostics& d) {
        trace.stamps.push_back(d.t);
        trace.diag.push_back(d);
        const bool keep =
            (field_stride > 0 && n % field_stride == 0) || n == total_steps;
        Field fu(p.grid, 0.0, FieldRole::U), fw(p.grid, 0.0, FieldRole::W),
            fv(p.grid, 0.0, FieldRole::V);
        if (keep) {
            fu.values = u_cur;
            fw.values = w_cur;
            fv.values = v_cur;
        } else {
            fu.values.clear();
            fw.values.clear();
            fv.values.clear();
        }
        trace.u.push_back(std::move(fu));
        trace.w.push_back(std::move(fw));
        trace.v.push_back(std::move(fv));
    };

    auto diagnostics = [&](double t, int sweeps, double ratio, int newton_iters,
                           const StepDiagnostics* prev) {
        StepDiagnostics d;
        d.t = t;
        d.newton_iters = newton_iters;
        d.picard_sweeps = sweeps;
        d.picard_last_ratio = ratio;
        d.l1_u = discrete_norm(g, u_cur, NormKind::L1);
        d.l2_u = discrete_norm(g, u_cur, NormKind::L2);
        d.linf_u = discrete_norm(g, u_cur, NormKind::Linf);
        d.min_u = *std::min_element(u_cur.begin(), u_cur.end());
        d.max_u = *std::max_element(u_cur.begin(), u_cur.end());
        d.l1_v = discrete_norm(g, v_cur, NormKind::L1);
        d.linf_v = discrete_norm(g, v_cur, NormKind::Linf);
        double energy = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < u_cur.size(); ++i) {
            energy += p.phi->energy_primitive(u_cur[i], u_of_wd[i]);
            mass += u_cur[i];
        }
        d.energy_rel = energy * vol;
        d.mass = mass * vol;
        d.grad_w_sq = dirichlet_energy(g, p.bc_u, w_cur, wd);
        d.boundary_flux = boundary_flux_total(g, p.bc_u, w_cur, wd, p.diffusion_u);
        if (prev) {
            std::vector<double> Aw = op_u.multiply(w_cur);
            double a_form = 0.0, fwork = 0.0, f2 = 0.0, gap2 = 0.0, fmass = 0.0;
            for (std::size_t i = 0; i < u_cur.size(); ++i) {
                const double gap = w_cur[i] - wd[i];
                const double f =
                    eval_coupled(p.reaction, 0, 0, u_cur[i], v_cur[i]).first;
                a_form += (Aw[i] - load_u[i]) * gap;
                fwork += f * gap;
                f2 += f * f;
                gap2 += gap * gap;
                fmass += f;
            }
            d.dirichlet_integral =
                prev->dirichlet_integral + p.step * p.diffusion_u * a_form * vol;
            d.reaction_work_acc = prev->reaction_work_acc + p.step * fwork * vol;
            d.f_l2_sq_acc = prev->f_l2_sq_acc + p.step * f2 * vol;
            d.w_gap_l2_sq_acc = prev->w_gap_l2_sq_acc + p.step * gap2 * vol;
            d.reaction_mass_acc = prev->reaction_mass_acc + p.step * fmass * vol;
        }
        return d;
    };

    push_state(0, diagnostics(0.0, 0, 0.0, 0, nullptr));

    int start = 0;
    while (start < total_steps) {
        const int K = std::min(window_steps, total_steps - start);
        const double t0 = start * p.step;

        // Initial Picard guess: u frozen at the window's initial value.
        std::vector<std::vector<double>> u_iter(K + 1, u_cur);
        std::vector<std::vector<double>> v_states;
        UHalfStep uhalf;

        WindowLog log;
        log.first_step = start;
        log.steps = K;
        log.start_u = u_cur;

        int stall = 0;
        bool converged = false;
        while (log.sweeps < cfg.max_sweeps) {
            v_states = half_step_solve_v(p, u_iter, v_cur, t0, K);
            uhalf = half_step_solve_u(p, v_states, w_cur, t0, K);
            double d = 0.0;
            for (int j = 1; j <= K; ++j)
                d = std::max(d, l1_distance(g, uhalf.u[j], u_iter[j]));
            ++log.sweeps;
            if (!log.distances.empty() && log.distances.back() > 0.0)
                log.last_ratio = d / log.distances.back();
            log.distances.push_back(d);
            u_iter = uhalf.u;
            if (d <= cfg.tolerance) {
                converged = true;
                break;
            }
            if (log.distances.size() >= 2 &&
                d >= log.distances[log.distances.size() - 2]) {
                if (++stall >= 3)
                    throw PicardDivergence(
                        "picard sweeps stopped contracting", d);
            } else {
                stall = 0;
            }
        }
        if (!converged)
            throw PicardDivergence("picard sweep budget exhausted",
                                   log.distances.empty() ? -1.0
                                                         : log.distances.back());

        // Commit the window: u solves its equation against the committed v
        // exactly (Newton tolerance); v carries an O(L tol) reaction defect
        // from the last freeze, inside the fixed-point tolerance.
        for (int j = 1; j <= K; ++j) {
            w_cur = uhalf.w[j];
            u_cur = uhalf.u[j];
            v_cur = v_states[j];
            const int n = start + j;
            push_state(n, diagnostics(n * p.step, log.sweeps, log.last_ratio,
                                      uhalf.newton_iters[j - 1],
                                      &trace.diag.back()));
        }
        if (window_logs) window_logs->push_back(log);
        start += K;
    }
    return trace;
}

} // namespace degensim
