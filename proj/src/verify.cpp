#include "degensim/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace degensim {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

std::shared_ptr<const Grid> grid_1d(int n, double length = 1.0) {
    return std::make_shared<const Grid>(build_grid(1, {{length, n}}));
}

std::shared_ptr<const Grid> grid_2d(int n, double length = 1.0) {
    return std::make_shared<const Grid>(build_grid(2, {{length, n}, {length, n}}));
}

/// Wide interior quartic bump: low curvature of w = phi(u), support away
/// from the walls, so the first implicit steps are already in the resolved
/// regime at the tau values the refinement checks use.
Field gentle_bump(const std::shared_ptr<const Grid>& grid, double height,
                  double radius, double center) {
    const Grid& g = *grid;
    Field f(grid, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = (g.x_of(i) - center * g.length[0]) / radius;
        if (d * d < 1.0) f[i] = height * (1.0 - d * d) * (1.0 - d * d);
    }
    return f;
}

/// Sum of smooth compactly supported bumps, capped at `cap`.
Field random_bumps(const std::shared_ptr<const Grid>& grid, std::mt19937_64& rng,
                   int count, double cap) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const Grid& g = *grid;
    Field f(grid, 0.0, FieldRole::U);
    for (int k = 0; k < count; ++k) {
        const double cx = uni(rng) * g.length[0];
        const double cy = g.dimension == 2 ? uni(rng) * g.length[1] : 0.0;
        const double r = (0.08 + 0.12 * uni(rng)) * g.length[0];
        const double h = cap * (0.3 + 0.7 * uni(rng));
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double dx = g.x_of(i) - cx;
            const double dy = g.dimension == 2 ? g.y_of(i) - cy : 0.0;
            const double q = 1.0 - (dx * dx + dy * dy) / (r * r);
            if (q > 0.0) f[i] += h * q * q;
        }
    }
    for (double& v : f.values) v = std::min(v, cap);
    return f;
}

ScalarProblem porous_medium_neumann_1d(int n, double T, double tau) {
    ScalarProblem p;
    p.grid = grid_1d(n);
    p.bc = tag_boundary(*p.grid, {});
    p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::porous_medium(2.0));
    p.reaction = ReactionSpec::none();
    p.initial_u = Field(p.grid, 0.0, FieldRole::U);
    p.horizon = T;
    p.step = tau;
    return p;
}

ScalarProblem biofilm_scalar_1d(int n, double T, double tau) {
    ScalarProblem p;
    p.grid = grid_1d(n);
    p.bc = tag_boundary(*p.grid, {Face::Right});
    p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::singular_power(1.0, 1.0));
    p.reaction = ReactionSpec::biofilm_scalar(1.0, 1.0, 1.0, 1.0);
    p.dirichlet_w = Field(p.grid, 0.0, FieldRole::W);  // phi(u^D) = 0
    p.initial_u = Field(p.grid, 0.0, FieldRole::U);
    p.horizon = T;
    p.step = tau;
    return p;
}

ScalarProblem porous_fischer_neumann_2d(int n, double T, double tau) {
    ScalarProblem p;
    p.grid = grid_2d(n);
    p.bc = tag_boundary(*p.grid, {});
    p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::porous_medium(2.0));
    p.reaction = ReactionSpec::porous_fischer();
    p.initial_u = Field(p.grid, 0.0, FieldRole::U);
    p.horizon = T;
    p.step = tau;
    return p;
}

CheckResult timed(const std::string& check, const std::string& instance,
                  std::uint64_t seed, Clock::time_point t0, bool pass,
                  double margin) {
    CheckResult r;
    r.check = check;
    r.instance = instance;
    r.seed = seed;
    r.pass = pass;
    r.margin = margin;
    r.runtime_s = seconds_since(t0);
    return r;
}

} // namespace

void VerificationReport::add(CheckResult r) {
    for (const CheckResult& e : entries_)
        if (e.check == r.check && e.instance == r.instance)
            throw ConfigError("check registered twice: " + r.check + "/" +
                              r.instance);
    entries_.push_back(std::move(r));
}

bool VerificationReport::all_pass() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const CheckResult& e) { return e.pass; });
}

void VerificationReport::write_csv(std::ostream& os) const {
    os << "check,instance,status,margin,seed,runtime_s\n";
    char buf[128];
    for (const CheckResult& e : entries_) {
        std::string instance = e.instance;
        for (char& c : instance)
            if (c == ',' || c == '\n') c = ';';
        std::snprintf(buf, sizeof(buf), ",%s,%.17g,%llu,%.3f\n",
                      e.pass ? "pass" : "fail", e.margin,
                      static_cast<unsigned long long>(e.seed), e.runtime_s);
        os << e.check << "," << instance << buf;
    }
}

void VerificationReport::write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open report file: " + path);
    write_csv(os);
}

CheckResult check_l1_contraction(const ScalarProblem& base, const Field& u0_a,
                                 const Field& u0_b, double rel_tol,
                                 double abs_tol) {
    const auto t0 = Clock::now();
    ScalarProblem pa = base, pb = base;
    pa.initial_u = u0_a;
    pb.initial_u = u0_b;
    const SolutionTrace ta = solve_scalar(pa);
    const SolutionTrace tb = solve_scalar(pb);
    const double L = lipschitz_bound(base.reaction);

    const Grid& g = *base.grid;
    double d0 = 0.0;
    for (std::size_t i = 0; i < ta.u[0].size(); ++i)
        d0 += std::abs(ta.u[0][i] - tb.u[0][i]);
    d0 *= g.cell_volume();

    double worst = 0.0;
    for (std::size_t n = 1; n < ta.stamps.size(); ++n) {
        double dn = 0.0;
        for (std::size_t i = 0; i < ta.u[n].size(); ++i)
            dn += std::abs(ta.u[n][i] - tb.u[n][i]);
        dn *= g.cell_volume();
        const double bound =
            std::exp(L * ta.stamps[n]) * d0 * (1.0 + rel_tol) + abs_tol;
        worst = std::max(worst, dn / bound);
    }
    return timed("l1_contraction", base.reaction.name(), 0, t0, worst <= 1.0,
                 worst);
}

CheckResult check_comparison(const ScalarProblem& base, const Field& u0_low,
                             const Field& u0_high, double abs_tol,
                             double rel_per_tau) {
    const auto t0 = Clock::now();
    ScalarProblem pl = base, ph = base;
    pl.initial_u = u0_low;
    ph.initial_u = u0_high;
    const SolutionTrace tl = solve_scalar(pl);
    const SolutionTrace th = solve_scalar(ph);
    const double allowed =
        abs_tol + rel_per_tau * base.step * discrete_norm(u0_high, NormKind::L1);
    double worst = 0.0;
    for (std::size_t n = 0; n < tl.stamps.size(); ++n)
        worst = std::max(worst, positive_part_l1(tl.u[n], th.u[n]) / allowed);
    return timed("comparison", base.reaction.name(), 0, t0, worst <= 1.0, worst);
}

double energy_identity_residual(const ScalarProblem& problem,
                                const SolutionTrace& trace) {
    (void)problem;
    const double e0 = trace.diag[0].energy_rel;
    double worst = 0.0;
    for (const StepDiagnostics& d : trace.diag)
        worst = std::max(worst, std::abs(d.energy_rel + d.dirichlet_integral -
                                         e0 - d.reaction_work_acc));
    return worst;
}

double energy_estimate_margin(const ScalarProblem& problem,
                              const SolutionTrace& trace) {
    const double e0 = trace.diag[0].energy_rel;
    double max_e = 0.0, grad_acc = 0.0;
    for (std::size_t n = 0; n < trace.diag.size(); ++n) {
        max_e = std::max(max_e, trace.diag[n].energy_rel);
        if (n >= 1) grad_acc += problem.step * trace.diag[n].grad_w_sq;
    }
    const StepDiagnostics& last = trace.diag.back();
    // The Dirichlet data's own gradient enters through its interior-face
    // energy.
    Field wd = problem.dirichlet_w;
    if (wd.values.empty()) wd = Field(problem.grid, 0.0, FieldRole::W);
    const BoundaryMap all_neumann = tag_boundary(*problem.grid, {});
    const double grad_wd_sq =
        dirichlet_energy(*problem.grid, all_neumann, wd.values, wd);
    const double lhs = max_e + grad_acc;
    const double rhs =
        4.0 * (e0 + std::sqrt(grad_wd_sq * problem.horizon) +
               std::sqrt(std::max(0.0, last.f_l2_sq_acc)) *
                   std::sqrt(std::max(0.0, last.w_gap_l2_sq_acc)));
    return lhs / (rhs + 1e-9 * (e0 + max_e) + 1e-300);
}

CheckResult check_energy_identity(const ScalarProblem& problem,
                                  const SolutionTrace& trace,
                                  double tol_fraction) {
    const auto t0 = Clock::now();
    const double e0 = trace.diag[0].energy_rel;
    double max_e = 0.0;
    for (const StepDiagnostics& d : trace.diag)
        max_e = std::max(max_e, d.energy_rel);
    const StepDiagnostics& last = trace.diag.back();
    const double scale = e0 + max_e + std::abs(last.dirichlet_integral) +
                         std::abs(last.reaction_work_acc) + 1e-12;
    const double residual = energy_identity_residual(problem, trace);
    const double m_identity = residual / (tol_fraction * scale);
    const double margin =
        std::max(m_identity, energy_estimate_margin(problem, trace));
    return timed("energy_identity", problem.reaction.name(), 0, t0, margin <= 1.0,
                 margin);
}

double chain_rule_defect(const ScalarProblem& problem, const SolutionTrace& trace) {
    const Grid& g = *problem.grid;
    const double vol = g.cell_volume();
    Field wd = problem.dirichlet_w;
    if (wd.values.empty()) wd = Field(problem.grid, 0.0, FieldRole::W);
    double worst = 0.0;
    for (std::size_t n = 1; n < trace.stamps.size(); ++n) {
        const double tau = trace.stamps[n] - trace.stamps[n - 1];
        const double lhs =
            (trace.diag[n].energy_rel - trace.diag[n - 1].energy_rel) / tau;
        double pair = 0.0;
        for (std::size_t i = 0; i < trace.u[n].size(); ++i)
            pair += (trace.u[n][i] - trace.u[n - 1][i]) *
                    (trace.w[n][i] - wd[i]);
        pair *= vol / tau;
        worst = std::max(worst, std::abs(lhs - pair));
    }
    return worst;
}

CheckResult check_chain_rule(const ScalarProblem& problem,
                             const SolutionTrace& trace, double tol_fraction) {
    const auto t0 = Clock::now();
    const Grid& g = *problem.grid;
    const double vol = g.cell_volume();
    Field wd = problem.dirichlet_w;
    if (wd.values.empty()) wd = Field(problem.grid, 0.0, FieldRole::W);

    // Convexity makes the energy difference quotient a lower bound of the
    // pairing; the signed defect must stay one-sided up to round-off.
    double scale = 1e-12, defect = 0.0, signed_excess = 0.0;
    for (std::size_t n = 1; n < trace.stamps.size(); ++n) {
        const double tau = trace.stamps[n] - trace.stamps[n - 1];
        const double lhs =
            (trace.diag[n].energy_rel - trace.diag[n - 1].energy_rel) / tau;
        double pair = 0.0;
        for (std::size_t i = 0; i < trace.u[n].size(); ++i)
            pair += (trace.u[n][i] - trace.u[n - 1][i]) * (trace.w[n][i] - wd[i]);
        pair *= vol / tau;
        scale = std::max(scale, max_abs(lhs, pair));
        defect = std::max(defect, std::abs(lhs - pair));
        signed_excess = std::max(signed_excess, lhs - pair);
    }

    // Initial energy attained exactly: recompute with the identical summation.
    std::vector<double> u_of_wd(g.node_count());
    for (std::size_t i = 0; i < u_of_wd.size(); ++i)
        u_of_wd[i] = problem.phi->phi_inverse(wd[i]);
    double e0 = 0.0;
    for (std::size_t i = 0; i < trace.u[0].size(); ++i)
        e0 += problem.phi->energy_primitive(trace.u[0][i], u_of_wd[i]);
    e0 *= vol;
    const bool e0_exact = (e0 == trace.diag[0].energy_rel);

    const double m_defect = defect / (tol_fraction * scale);
    const double m_sign = signed_excess / (1e-8 * scale);
    const double margin = std::max({m_defect, m_sign, e0_exact ? 0.0 : 2.0});
    return timed("chain_rule", problem.reaction.name(), 0, t0, margin <= 1.0,
                 margin);
}

CheckResult check_initial_attainment(const ScalarProblem& problem, double factor,
                                     int stamps) {
    const auto t0 = Clock::now();
    auto early_deviation = [&](const ScalarProblem& p) {
        const SolutionTrace tr = solve_scalar(p);
        double dev = 0.0;
        const int upto = std::min<int>(stamps, tr.stamps.size() - 1);
        for (int n = 1; n <= upto; ++n) {
            double d = 0.0;
            for (std::size_t i = 0; i < tr.u[n].size(); ++i)
                d += std::abs(tr.u[n][i] - tr.u[0][i]);
            dev = std::max(dev, d * p.grid->cell_volume());
        }
        return dev;
    };
    ScalarProblem half = problem;
    half.step = 0.5 * problem.step;
    const double dev1 = early_deviation(problem);
    const double dev2 = early_deviation(half);
    double margin;
    if (dev1 <= 1e-14) {
        margin = 0.0;  // stationary data: deviation identically zero
    } else {
        margin = factor / (dev1 / std::max(dev2, 1e-300));
    }
    return timed("initial_attainment", problem.reaction.name(), 0, t0,
                 margin <= 1.0, margin);
}

BarrierCheck check_barrier_bound(const ScalarProblem& problem, double theta) {
    const auto t0 = Clock::now();
    BarrierCheck out;
    const PhiEvaluator& phi = *problem.phi;
    // beta(v) is a supersolution when diffusion * (-Lap v) >= sup|f|
    out.c1 = sup_abs_scalar(problem.reaction) / problem.diffusion;
    double wd_max = 0.0;
    for (double w : problem.dirichlet_w.values)
        wd_max = std::max(wd_max, std::abs(w));
    out.c2 = std::max(phi.phi(1.0 - theta), wd_max);
    const BarrierSolution bar =
        solve_barrier(*problem.grid, problem.bc, out.c1, out.c2, problem.linear);
    out.K = bar.max_v;
    out.M0 = sup_bound_M0(phi, out.K);

    double v_min = *std::min_element(bar.v.values.begin(), bar.v.values.end());
    const SolutionTrace trace = solve_scalar(problem);
    double max_u = 0.0;
    for (const StepDiagnostics& d : trace.diag) max_u = std::max(max_u, d.max_u);

    const bool singular_ok = !phi.spec().bounded() || out.M0 < 1.0;
    const bool barrier_ok = v_min >= out.c2 - 1e-8;
    const double margin = max_u / (out.M0 + 1e-8);
    out.result = timed("barrier_bound", problem.reaction.name(), 0, t0,
                       margin <= 1.0 && singular_ok && barrier_ok,
                       singular_ok && barrier_ok ? margin : 2.0);
    return out;
}

CheckResult check_mass_balance(const ScalarProblem& problem,
                               const SolutionTrace& trace) {
    const auto t0 = Clock::now();
    if (!problem.bc.pure_neumann())
        throw ConfigError("mass-balance check requires a pure-Neumann problem");
    const double mass0 = trace.diag[0].mass;
    double drift = 0.0;
    for (const StepDiagnostics& d : trace.diag)
        drift = std::max(drift,
                         std::abs(d.mass - mass0 - d.reaction_mass_acc));
    const double steps = static_cast<double>(trace.stamps.size() - 1);
    const double allowed = 10.0 * problem.linear.rel_tol * std::max(steps, 1.0);
    const double margin = drift / allowed;
    return timed("mass_balance", problem.reaction.name(), 0, t0, margin <= 1.0,
                 margin);
}

std::vector<double> steklov_average(const std::vector<double>& stamps,
                                    const std::vector<double>& values, double h) {
    if (stamps.size() != values.size())
        throw DimensionError("steklov series size mismatch");
    if (!(h > 0.0)) throw DomainError("steklov window must be positive");
    if (stamps.empty()) return {};

    // Piecewise-linear interpolant, frozen at the first value for t < t_0.
    auto sample = [&](double t) -> double {
        if (t <= stamps.front()) return values.front();
        if (t >= stamps.back()) return values.back();
        const auto it = std::upper_bound(stamps.begin(), stamps.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - stamps.begin());
        const double t1 = stamps[k - 1], t2 = stamps[k];
        const double a = (t - t1) / (t2 - t1);
        return (1.0 - a) * values[k - 1] + a * values[k];
    };
    // Exact integral of the interpolant over [a,b] via trapezoids split at
    // the sample points.
    auto integrate = [&](double a, double b) -> double {
        double total = 0.0;
        double t = a;
        while (t < b - 1e-300) {
            const auto it = std::upper_bound(stamps.begin(), stamps.end(),
                                             t + 1e-15 * std::max(1.0, std::abs(t)));
            double t_next = (it == stamps.end()) ? b : std::min(*it, b);
            if (t_next <= t) t_next = b;
            total += 0.5 * (sample(t) + sample(t_next)) * (t_next - t);
            t = t_next;
        }
        return total;
    };

    std::vector<double> out(stamps.size());
    for (std::size_t k = 0; k < stamps.size(); ++k)
        out[k] = integrate(stamps[k] - h, stamps[k]) / h;
    return out;
}

// ---------------------------------------------------------------------------
// Acceptance criteria.

namespace acceptance {
namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

CheckResult l1_contraction(std::uint64_t seed) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::string worst_instance;
    const int instances = 20;
    const double rel_tol = 0.05, abs_tol = 1e-12;

    struct Preset {
        std::string name;
        std::function<ScalarProblem()> make;
        double cap;
    };
    const std::vector<Preset> presets = {
        {"porous_medium_1d",
         [] { return porous_medium_neumann_1d(64, 0.5, 1e-3); }, 0.8},
        {"biofilm_scalar_1d", [] { return biofilm_scalar_1d(64, 0.5, 1e-3); },
         0.85},
        {"porous_fischer_2d",
         [] { return porous_fischer_neumann_2d(32, 0.5, 1e-3); }, 0.9},
    };
    for (const Preset& preset : presets) {
        for (int k = 0; k < instances; ++k) {
            std::mt19937_64 rng(seed + 1000003ull * k +
                                std::hash<std::string>{}(preset.name));
            ScalarProblem p = preset.make();
            const Field a = random_bumps(p.grid, rng, 3, preset.cap);
            const Field b = random_bumps(p.grid, rng, 3, preset.cap);
            CheckResult r = check_l1_contraction(p, a, b, rel_tol, abs_tol);
            if (r.margin > worst) {
                worst = r.margin;
                worst_instance = preset.name + "#" + std::to_string(k);
            }
        }
    }
    return timed("acc1_l1_contraction",
                 "3 presets x 20 twins, worst " + worst_instance, seed, t0,
                 worst <= 1.0, worst);
}

CheckResult comparison_principle(std::uint64_t seed) {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        std::mt19937_64 rng(seed + 7919ull * (k + 1));
        ScalarProblem p = porous_medium_neumann_1d(64, 0.5, 1e-3);
        if (k % 2 == 1) p.reaction = ReactionSpec::porous_fischer();
        Field high = random_bumps(p.grid, rng, 3, 0.9);
        Field low = high;
        std::uniform_real_distribution<double> uni(0.3, 1.0);
        for (double& v : low.values) v *= uni(rng);
        CheckResult r = check_comparison(p, low, high, 1e-8, 10.0);
        worst = std::max(worst, r.margin);
    }
    return timed("acc2_comparison", "20 ordered pairs (pm/pf 1d)", seed, t0,
                 worst <= 1.0, worst);
}

CheckResult barrier_boundedness(std::uint64_t seed) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    const double theta = 0.1;
    ScalarProblem p = biofilm_scalar_1d(64, 0.5, 1e-3);
    Field u0 = random_bumps(p.grid, rng, 3, 0.9);
    u0[0] = 0.9;  // touch the barrier's initial bound
    p.initial_u = u0;

    BarrierCheck bc = check_barrier_bound(p, theta);
    // Closed-form cross-check: on [0,1] with the Dirichlet part at x = 1 the
    // barrier maximum is c2 + c1/2, so M0 = beta(phi(0.9) + sup|f|/2).
    const double M0_exact =
        p.phi->phi_inverse(p.phi->phi(0.9) + sup_abs_scalar(p.reaction) / 2.0);
    const bool closed_form_ok = std::abs(bc.M0 - M0_exact) <= 1e-3;
    const bool m0_ok = bc.M0 < 1.0;

    const bool pass = bc.result.pass && closed_form_ok && m0_ok;
    const double margin = pass ? bc.result.margin : 2.0;
    return timed("acc3_barrier_bound",
                 "biofilm scalar 1d theta=0.1 M0=" + fmt(bc.M0), seed, t0, pass,
                 margin);
}

CheckResult energy_identity(std::uint64_t seed) {
    const auto t0 = Clock::now();
    // Part 1: residual halves with tau on the linear Dirichlet test.
    auto linear_problem = [&](double tau) {
        ScalarProblem p;
        p.grid = grid_1d(128);
        p.bc = tag_boundary(*p.grid, {Face::Left, Face::Right});
        p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::linear(1.0));
        p.reaction = ReactionSpec::none();
        p.dirichlet_w = Field(p.grid, 0.0, FieldRole::W);
        Field u0(p.grid, 0.0, FieldRole::U);
        for (std::size_t i = 0; i < u0.size(); ++i)
            u0[i] = std::sin(M_PI * p.grid->x_of(i));
        p.initial_u = u0;
        p.horizon = 0.1;
        p.step = tau;
        return p;
    };
    std::vector<double> residuals;
    for (double tau : {1e-2, 5e-3, 2.5e-3}) {
        ScalarProblem p = linear_problem(tau);
        residuals.push_back(energy_identity_residual(p, solve_scalar(p)));
    }
    double factor_margin = 0.0;
    for (int i = 0; i + 1 < static_cast<int>(residuals.size()); ++i) {
        const double f = residuals[i] / std::max(residuals[i + 1], 1e-300);
        factor_margin = std::max(factor_margin, std::max(1.5 / f, f / 2.5));
    }

    // Part 2: the C=4 estimate on seeded preset runs (it holds structurally,
    // whatever the data), plus the full identity check on resolved
    // gentle-bump instances of each preset family.
    double preset_margin = 0.0;
    {
        std::mt19937_64 rng(seed);
        ScalarProblem pm = porous_medium_neumann_1d(64, 0.2, 1e-3);
        ScalarProblem bf = biofilm_scalar_1d(64, 0.2, 1e-3);
        ScalarProblem pf = porous_medium_neumann_1d(64, 0.2, 1e-3);
        pf.reaction = ReactionSpec::porous_fischer();
        for (ScalarProblem* p : {&pm, &bf, &pf}) {
            p->initial_u = random_bumps(p->grid, rng, 3, 0.8);
            preset_margin = std::max(
                preset_margin, energy_estimate_margin(*p, solve_scalar(*p)));
            p->initial_u = gentle_bump(p->grid, 0.45, 0.3, 0.4);
            preset_margin = std::max(
                preset_margin, check_energy_identity(*p, solve_scalar(*p)).margin);
        }
    }
    const double margin = std::max(factor_margin, preset_margin);
    return timed("acc4_energy_identity",
                 "linear tau-halving " + fmt(residuals[0] / residuals[1]) + "," +
                     fmt(residuals[1] / residuals[2]) + "; presets",
                 seed, t0, margin <= 1.0, margin);
}

CheckResult chain_rule(std::uint64_t seed) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    double margin = 0.0;
    std::string note;

    auto run_pair = [&](ScalarProblem p, const std::string& name) {
        const SolutionTrace tr1 = solve_scalar(p);
        margin = std::max(margin, check_chain_rule(p, tr1).margin);
        ScalarProblem ph = p;
        ph.step = 0.5 * p.step;
        const SolutionTrace tr2 = solve_scalar(ph);
        const double d1 = chain_rule_defect(p, tr1);
        const double d2 = chain_rule_defect(ph, tr2);
        const double f = d1 / std::max(d2, 1e-300);
        margin = std::max(margin, 1.4 / f);
        note += name + " factor " + fmt(f) + "; ";
    };

    {
        ScalarProblem p;
        p.grid = grid_1d(64);
        p.bc = tag_boundary(*p.grid, {Face::Left, Face::Right});
        p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::linear(1.0));
        p.reaction = ReactionSpec::none();
        p.dirichlet_w = Field(p.grid, 0.0, FieldRole::W);
        Field u0(p.grid, 0.0, FieldRole::U);
        for (std::size_t i = 0; i < u0.size(); ++i)
            u0[i] = std::sin(M_PI * p.grid->x_of(i));
        p.initial_u = u0;
        p.horizon = 0.1;
        p.step = 2e-3;
        run_pair(p, "linear");
    }
    {
        ScalarProblem p = porous_medium_neumann_1d(64, 0.1, 1e-3);
        p.initial_u = gentle_bump(p.grid, 0.45, 0.3, 0.5);
        run_pair(p, "porous_medium");
    }
    (void)rng;
    return timed("acc5_chain_rule", note, seed, t0, margin <= 1.0, margin);
}

CheckResult initial_attainment(std::uint64_t seed) {
    const auto t0 = Clock::now();
    double margin = 0.0;
    {
        ScalarProblem p = porous_medium_neumann_1d(64, 0.1, 1e-3);
        p.initial_u = gentle_bump(p.grid, 0.45, 0.3, 0.5);
        margin = std::max(margin, check_initial_attainment(p, 1.4, 10).margin);
    }
    {
        ScalarProblem p = porous_medium_neumann_1d(64, 0.1, 1e-3);
        p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::porous_medium(3.0));
        p.initial_u = gentle_bump(p.grid, 0.6, 0.35, 0.45);
        margin = std::max(margin, check_initial_attainment(p, 1.4, 10).margin);
    }
    return timed("acc6_initial_attainment", "degenerate bumps (m=2, m=3)", seed,
                 t0, margin <= 1.0, margin);
}

CheckResult picard_contraction(std::uint64_t seed) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    double margin = 0.0;
    std::string note;

    auto run_one = [&](int dim, int n, double T, const std::string& name) {
        CoupledProblem p;
        p.grid = dim == 1 ? grid_1d(n) : grid_2d(n);
        const Face top = dim == 1 ? Face::Right : Face::Top;
        p.bc_u = tag_boundary(*p.grid, {top});
        p.bc_v = tag_boundary(*p.grid, {top});
        p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::singular_power(1, 1));
        p.reaction = ReactionSpec::biofilm(1, 1, 1, 1);
        p.dirichlet_w = Field(p.grid, 0.0, FieldRole::W);
        p.dirichlet_v = Field(p.grid, 1.0, FieldRole::V);
        // biomass pockets on the substratum: near x = 0 (1D), y = 0 (2D),
        // seeded heights, never an empty instance
        std::uniform_real_distribution<double> hgt(0.25, 0.5);
        Field u0(p.grid, 0.0, FieldRole::U);
        for (int k = 0; k < 3; ++k) {
            const double r = 0.1 + 0.03 * k;
            const double h = hgt(rng);
            const double cx = dim == 1 ? 0.12 * (k + 1) : 0.25 * (k + 1);
            for (std::size_t i = 0; i < u0.size(); ++i) {
                const double dx = p.grid->x_of(i) - cx;
                const double dy = dim == 2 ? p.grid->y_of(i) : 0.0;
                const double q = 1.0 - (dx * dx + dy * dy) / (r * r);
                if (q > 0.0) u0[i] = std::min(0.6, u0[i] + h * q * q);
            }
        }
        p.initial_u = u0;
        if (discrete_norm(u0, NormKind::L1) <= 0.0)
            throw ConfigError("picard instance degenerated to zero biomass");
        p.initial_v = Field(p.grid, 1.0, FieldRole::V);
        p.horizon = T;
        p.step = 1e-3;

        std::vector<WindowLog> logs;
        const SolutionTrace tr = picard_solve(p, PicardConfig{}, &logs);

        int max_sweeps = 0;
        double max_ratio = 0.0;
        for (const WindowLog& wl : logs) {
            max_sweeps = std::max(max_sweeps, wl.sweeps);
            for (std::size_t k = 1; k < wl.distances.size(); ++k)
                if (wl.distances[k - 1] >= 10.0 * PicardConfig{}.tolerance)
                    max_ratio =
                        std::max(max_ratio, wl.distances[k] / wl.distances[k - 1]);
        }
        double min_u = 0.0, max_u = 0.0, min_v = 0.0, max_v = 0.0;
        for (const StepDiagnostics& d : tr.diag) {
            min_u = std::min(min_u, d.min_u);
            max_u = std::max(max_u, d.max_u);
        }
        for (const Field& fv : tr.v)
            if (!fv.values.empty())
                for (double v : fv.values) {
                    min_v = std::min(min_v, v);
                    max_v = std::max(max_v, v);
                }
        double m = max_sweeps / 10.0;
        m = std::max(m, max_ratio / 0.6);
        m = std::max(m, -min_u / 1e-8);
        m = std::max(m, max_u >= 1.0 ? 2.0 : 0.0);  // structural: u < 1
        m = std::max(m, -min_v / 1e-8);
        m = std::max(m, (max_v - 1.0) / 1e-8);
        margin = std::max(margin, m);
        note += name + " sweeps<=" + std::to_string(max_sweeps) + " ratio<=" +
                fmt(max_ratio) + "; ";
    };
    run_one(1, 64, 0.5, "1d64");
    run_one(2, 32, 0.25, "2d32");
    return timed("acc7_picard", note, seed, t0, margin <= 1.0, margin);
}

CheckResult barenblatt_oracle(std::uint64_t) {
    const auto t0 = Clock::now();
    const double t_off = 0.1, C = 0.1, xc = 1.5, length = 3.0, T = 0.25;
    auto exact = [&](double x, double t) {
        const double tt = t + t_off;
        const double val =
            C - (x - xc) * (x - xc) / (12.0 * std::pow(tt, 2.0 / 3.0));
        return val > 0.0 ? std::pow(tt, -1.0 / 3.0) * val : 0.0;
    };
    std::vector<double> errors;
    for (int n : {100, 200, 400}) {
        ScalarProblem p;
        p.grid = grid_1d(n, length);
        p.bc = tag_boundary(*p.grid, {});
        p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::porous_medium(2.0));
        p.reaction = ReactionSpec::none();
        Field u0(p.grid, 0.0, FieldRole::U);
        for (std::size_t i = 0; i < u0.size(); ++i)
            u0[i] = exact(p.grid->x_of(i), 0.0);
        p.initial_u = u0;
        p.horizon = T;
        p.step = 1e-4;
        const SolutionTrace tr = solve_scalar(p, 0);  // final field only
        const Field& uT = tr.u.back();
        double err = 0.0;
        for (std::size_t i = 0; i < uT.size(); ++i)
            err += std::abs(uT[i] - exact(p.grid->x_of(i), T));
        errors.push_back(err * p.grid->cell_volume());
    }
    const bool monotone = errors[0] > errors[1] && errors[1] > errors[2];
    const double order1 = std::log2(errors[0] / errors[1]);
    const double order2 = std::log2(errors[1] / errors[2]);
    const double min_order = std::min(order1, order2);
    const double margin = monotone ? 0.8 / min_order : 2.0;
    return timed("acc8_barenblatt",
                 "L1 " + fmt(errors[0]) + "/" + fmt(errors[1]) + "/" +
                     fmt(errors[2]) + " order " + fmt(min_order),
                 0, t0, monotone && min_order >= 0.8, margin);
}

CheckResult barrier_oracle(std::uint64_t) {
    const auto t0 = Clock::now();
    const double c1 = 1.0, c2 = 0.5;
    auto g = grid_1d(100);
    const BoundaryMap bc = tag_boundary(*g, {Face::Right});
    const BarrierSolution bar = solve_barrier(*g, bc, c1, c2);
    double max_err = 0.0, min_v = 1e300;
    for (std::size_t i = 0; i < bar.v.size(); ++i) {
        const double x = g->x_of(i);
        const double exact = c2 + c1 * (1.0 - x * x) / 2.0;
        max_err = std::max(max_err, std::abs(bar.v[i] - exact));
        min_v = std::min(min_v, bar.v[i]);
    }
    const bool pass = max_err <= 1e-3 && min_v >= c2 - 1e-10;
    return timed("acc9_barrier_oracle", "max err " + fmt(max_err), 0, t0, pass,
                 max_err / 1e-3);
}

CheckResult conservation(std::uint64_t seed) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(seed);
    ScalarProblem p = porous_medium_neumann_1d(64, 0.1, 1e-3);  // 100 steps
    p.initial_u = random_bumps(p.grid, rng, 3, 0.8);
    const SolutionTrace tr = solve_scalar(p);
    const double mass0 = tr.diag[0].mass;
    double drift = 0.0;
    for (const StepDiagnostics& d : tr.diag)
        drift = std::max(drift, std::abs(d.mass - mass0));
    const double rel = drift / std::abs(mass0);
    return timed("acc10_conservation", "relative drift " + fmt(rel), seed, t0,
                 rel <= 1e-9, rel / 1e-9);
}

} // namespace acceptance

VerificationReport run_suite(const std::string& suite, std::uint64_t seed) {
    VerificationReport report;
    const bool all = suite == "all";
    if (all || suite == "contraction") {
        report.add(acceptance::l1_contraction(seed));
        report.add(acceptance::comparison_principle(seed));
    }
    if (all || suite == "energy") {
        report.add(acceptance::energy_identity(seed));
        report.add(acceptance::chain_rule(seed));
        report.add(acceptance::initial_attainment(seed));
    }
    if (all || suite == "barrier") {
        report.add(acceptance::barrier_boundedness(seed));
        report.add(acceptance::barrier_oracle(seed));
    }
    if (all) {
        report.add(acceptance::picard_contraction(seed));
        report.add(acceptance::barenblatt_oracle(seed));
        report.add(acceptance::conservation(seed));
    }
    if (report.entries().empty())
        throw ConfigError("unknown verification suite: " + suite);
    return report;
}

} // namespace degensim
