#include <doctest.h>

#include <cmath>
#include <random>

#include "degensim/scalar_solver.hpp"

using namespace degensim;

namespace {

std::shared_ptr<const Grid> grid1d(int n, double length = 1.0) {
    return std::make_shared<const Grid>(build_grid(1, {{length, n}}));
}

ScalarProblem base_problem(std::shared_ptr<const Grid> g, PhiSpec phi,
                           ReactionSpec reaction, BoundaryMap bc) {
    ScalarProblem p;
    p.grid = std::move(g);
    p.bc = bc;
    p.phi = std::make_shared<const PhiEvaluator>(phi);
    p.reaction = std::move(reaction);
    p.initial_u = Field(p.grid, 0.0, FieldRole::U);
    return p;
}

} // namespace

TEST_CASE("operator row sums vanish for pure Neumann") {
    const Grid g = build_grid(1, {{1.0, 4}});
    const SparseMatrix A = assemble_operator(g, tag_boundary(g, {}));
    for (std::size_t r = 0; r < A.size(); ++r) {
        double sum = 0.0;
        for (std::size_t k = A.row_offsets()[r]; k < A.row_offsets()[r + 1]; ++k)
            sum += A.values()[k];
        CHECK(sum == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("operator interior row is (-1, 2, -1)/h^2") {
    const Grid g = build_grid(1, {{1.0, 4}});  // h = 0.25
    const SparseMatrix A = assemble_operator(g, tag_boundary(g, {}));
    // row 1: columns 0,1,2
    const auto& ro = A.row_offsets();
    const auto& ci = A.col_indices();
    const auto& va = A.values();
    REQUIRE(ro[2] - ro[1] == 3);
    for (std::size_t k = ro[1]; k < ro[2]; ++k) {
        if (ci[k] == 0) CHECK(va[k] == doctest::Approx(-16.0));
        if (ci[k] == 1) CHECK(va[k] == doctest::Approx(32.0));
        if (ci[k] == 2) CHECK(va[k] == doctest::Approx(-16.0));
    }
}

TEST_CASE("ghost elimination at a Dirichlet face against the dense oracle") {
    const Grid g = build_grid(1, {{1.0, 4}});
    const double inv_h2 = 16.0;
    const BoundaryMap bc = tag_boundary(g, {Face::Right});
    const SparseMatrix A = assemble_operator(g, bc);
    // ghost value 2 w^D - w_cell turns the last row into
    // (-1/h^2) w_{n-2} + (3/h^2) w_{n-1}, load 2 w^D/h^2
    CHECK(A.diagonal(3) == doctest::Approx(3.0 * inv_h2));
    const auto& ro = A.row_offsets();
    const auto& ci = A.col_indices();
    const auto& va = A.values();
    for (std::size_t k = ro[3]; k < ro[4]; ++k)
        if (ci[k] == 2) CHECK(va[k] == doctest::Approx(-inv_h2));

    auto gp = grid1d(4);
    Field wd(gp, 0.75, FieldRole::W);
    const std::vector<double> load = dirichlet_load(g, bc, wd);
    CHECK(load[3] == doctest::Approx(2.0 * 0.75 * inv_h2));
    CHECK(load[0] == 0.0);
}

TEST_CASE("summation by parts ties the operator to the face energy") {
    // sum_i (A w - g)_i (w_i - w^D) vol equals the face-sum Dirichlet energy
    // for constant Dirichlet data, anisotropic spacings included
    const Grid g = build_grid(2, {{1.5, 6}, {0.7, 5}});
    const BoundaryMap bc = tag_boundary(g, {Face::Top, Face::Left});
    auto gp = std::make_shared<const Grid>(g);
    Field wd(gp, 0.3, FieldRole::W);
    const SparseMatrix A = assemble_operator(g, bc);
    const std::vector<double> load = dirichlet_load(g, bc, wd);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> w(g.node_count());
    for (double& v : w) v = uni(rng);

    const std::vector<double> Aw = A.multiply(w);
    double form = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        form += (Aw[i] - load[i]) * (w[i] - 0.3);
    form *= g.cell_volume();
    CHECK(form == doctest::Approx(dirichlet_energy(g, bc, w, wd)).epsilon(1e-11));
}

TEST_CASE("implicit step keeps constants steady") {
    auto g = grid1d(8);
    ScalarProblem p = base_problem(g, PhiSpec::porous_medium(2.0),
                                   ReactionSpec::none(), tag_boundary(*g, {}));
    p.step = 1e-2;
    Field w_prev(g, 0.4, FieldRole::W);
    const Field w = implicit_step(w_prev, p.step, p);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(w[i] == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("implicit step matches the exact backward-Euler eigen decay") {
    const int n = 16;
    auto g = grid1d(n);
    ScalarProblem p =
        base_problem(g, PhiSpec::linear(1.0), ReactionSpec::none(),
                     tag_boundary(*g, {Face::Left, Face::Right}));
    p.dirichlet_w = Field(g, 0.0, FieldRole::W);
    p.step = 1e-2;
    Field w_prev(g, 0.0, FieldRole::W);
    for (std::size_t i = 0; i < w_prev.size(); ++i)
        w_prev[i] = std::sin(M_PI * g->x_of(i));
    const double h = g->h[0];
    const double lambda = (2.0 - 2.0 * std::cos(M_PI * h)) / (h * h);
    const Field w = implicit_step(w_prev, p.step, p);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(w[i] ==
              doctest::Approx(w_prev[i] / (1.0 + p.step * lambda)).epsilon(1e-11));
}

TEST_CASE("implicit step rejects non-finite states") {
    auto g = grid1d(4);
    ScalarProblem p = base_problem(g, PhiSpec::linear(1.0), ReactionSpec::none(),
                                   tag_boundary(*g, {}));
    p.step = 1e-2;
    Field w_prev(g, 0.0, FieldRole::W);
    w_prev[2] = std::nan("");
    CHECK_THROWS_AS(implicit_step(w_prev, p.step, p), DomainError);
}

TEST_CASE("constant initial data stays constant under pure Neumann") {
    auto g = grid1d(16);
    ScalarProblem p = base_problem(g, PhiSpec::porous_medium(2.0),
                                   ReactionSpec::none(), tag_boundary(*g, {}));
    p.initial_u = Field(g, 0.37, FieldRole::U);
    p.horizon = 0.05;
    p.step = 1e-2;
    const SolutionTrace tr = solve_scalar(p);
    REQUIRE(tr.complete);
    for (const StepDiagnostics& d : tr.diag) {
        CHECK(d.min_u == doctest::Approx(0.37).epsilon(1e-12));
        CHECK(d.max_u == doctest::Approx(0.37).epsilon(1e-12));
    }
}

TEST_CASE("zero is an equilibrium of the scalar biofilm equation") {
    auto g = grid1d(16);
    ScalarProblem p =
        base_problem(g, PhiSpec::singular_power(1.0, 1.0),
                     ReactionSpec::biofilm_scalar(1, 1, 1, 1),
                     tag_boundary(*g, {Face::Right}));
    p.dirichlet_w = Field(g, 0.0, FieldRole::W);
    p.initial_u = Field(g, 0.0, FieldRole::U);
    p.horizon = 0.05;
    p.step = 1e-2;
    const SolutionTrace tr = solve_scalar(p);
    REQUIRE(tr.complete);
    CHECK(tr.diag.back().linf_u <= 1e-12);
}

TEST_CASE("porous medium tracks the Barenblatt profile") {
    const double t0 = 0.1, C = 0.1, length = 3.0, T = 0.1;
    auto exact = [&](double x, double t) {
        const double tt = t + t0;
        const double val =
            C - (x - 1.5) * (x - 1.5) / (12.0 * std::pow(tt, 2.0 / 3.0));
        return val > 0.0 ? std::pow(tt, -1.0 / 3.0) * val : 0.0;
    };
    double prev_err = 0.0;
    for (int n : {100, 200}) {
        auto g = grid1d(n, length);
        ScalarProblem p = base_problem(g, PhiSpec::porous_medium(2.0),
                                       ReactionSpec::none(), tag_boundary(*g, {}));
        Field u0(g, 0.0, FieldRole::U);
        for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = exact(g->x_of(i), 0.0);
        p.initial_u = u0;
        p.horizon = T;
        p.step = 2e-4;
        const SolutionTrace tr = solve_scalar(p, 0);
        double err = 0.0;
        for (std::size_t i = 0; i < tr.u.back().size(); ++i)
            err += std::abs(tr.u.back()[i] - exact(g->x_of(i), T));
        err *= g->cell_volume();
        CHECK(err < 2e-3);
        if (prev_err > 0.0) CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("pure Neumann conservation without reaction") {
    std::mt19937_64 rng(21);
    auto g = grid1d(32);
    ScalarProblem p = base_problem(g, PhiSpec::porous_medium(2.0),
                                   ReactionSpec::none(), tag_boundary(*g, {}));
    Field u0(g, 0.0, FieldRole::U);
    std::uniform_real_distribution<double> uni(0.0, 0.8);
    for (double& v : u0.values) v = uni(rng);
    p.initial_u = u0;
    p.horizon = 0.05;
    p.step = 1e-3;
    const SolutionTrace tr = solve_scalar(p);
    REQUIRE(tr.complete);
    const double m0 = tr.diag[0].mass;
    for (const StepDiagnostics& d : tr.diag)
        CHECK(std::abs(d.mass - m0) <= 1e-11 * std::abs(m0));
}

TEST_CASE("discrete comparison: ordered data stay ordered") {
    std::mt19937_64 rng(31);
    auto g = grid1d(32);
    std::uniform_real_distribution<double> uni(0.0, 0.8);
    ScalarProblem p = base_problem(g, PhiSpec::porous_medium(2.0),
                                   ReactionSpec::porous_fischer(),
                                   tag_boundary(*g, {}));
    Field hi(g, 0.0, FieldRole::U), lo_f(g, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < hi.size(); ++i) {
        hi[i] = uni(rng);
        lo_f[i] = hi[i] * 0.6;
    }
    ScalarProblem ph = p, pl = p;
    ph.initial_u = hi;
    pl.initial_u = lo_f;
    ph.horizon = pl.horizon = 0.05;
    ph.step = pl.step = 1e-3;
    const SolutionTrace th = solve_scalar(ph);
    const SolutionTrace tl = solve_scalar(pl);
    for (std::size_t n = 0; n < th.stamps.size(); ++n)
        CHECK(positive_part_l1(tl.u[n], th.u[n]) <= 1e-8);
}

TEST_CASE("discrete steady states are fixed points of the step") {
    // linear phi, f = 0, Dirichlet both ends: the discrete harmonic profile
    // A w = g is stationary
    auto g = grid1d(12);
    const BoundaryMap bc = tag_boundary(*g, {Face::Left, Face::Right});
    ScalarProblem p =
        base_problem(g, PhiSpec::linear(1.0), ReactionSpec::none(), bc);
    p.dirichlet_w = Field(g, 0.5, FieldRole::W);
    p.step = 0.1;
    const SparseMatrix A = assemble_operator(*g, bc);
    const std::vector<double> load = dirichlet_load(*g, bc, p.dirichlet_w);
    const std::vector<double> w_star = tridiagonal_solve(A, load);
    Field w_prev(g, 0.0, FieldRole::W);
    w_prev.values = w_star;
    const Field w = implicit_step(w_prev, p.step, p);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(w[i] == doctest::Approx(w_star[i]).epsilon(1e-10));
}

TEST_CASE("non-integer exponents run through the quadrature path") {
    auto g = grid1d(16);
    ScalarProblem p = base_problem(g, PhiSpec::singular_power(1.5, 0.5),
                                   ReactionSpec::none(), tag_boundary(*g, {}));
    Field u0(g, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < u0.size(); ++i) {
        const double d = (g->x_of(i) - 0.5) / 0.3;
        if (d * d < 1) u0[i] = 0.5 * (1 - d * d);
    }
    p.initial_u = u0;
    p.horizon = 5e-3;
    p.step = 1e-3;
    const SolutionTrace tr = solve_scalar(p);
    REQUIRE(tr.complete);
    const double m0 = tr.diag[0].mass;
    for (const StepDiagnostics& d : tr.diag) {
        CHECK(d.max_u < 1.0);
        CHECK(d.min_u > -1.0);
        CHECK(std::abs(d.mass - m0) <= 1e-8 * std::abs(m0));
    }
}

TEST_CASE("range safety: singular runs stay strictly below 1") {
    auto g = grid1d(24);
    ScalarProblem p =
        base_problem(g, PhiSpec::singular_power(1.0, 1.0),
                     ReactionSpec::biofilm_scalar(0.0, 0.0, 4.0, 0.5),
                     tag_boundary(*g, {Face::Right}));
    p.dirichlet_w = Field(g, 0.0, FieldRole::W);
    Field u0(g, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < u0.size(); ++i)
        u0[i] = (g->x_of(i) < 0.5) ? 1.0 - 1e-6 : 0.0;  // touching the endpoint
    p.initial_u = u0;
    p.horizon = 0.02;
    p.step = 1e-3;
    const SolutionTrace tr = solve_scalar(p);
    REQUIRE(tr.complete);
    for (const StepDiagnostics& d : tr.diag) CHECK(d.max_u < 1.0);
}

TEST_CASE("newton failure aborts with a partial trace and the failing step") {
    // stiff reaction at tau = 10: the clamped Jacobian degenerates to the
    // singular pure-Neumann operator and the step cannot complete
    auto g = grid1d(8);
    ScalarProblem p = base_problem(g, PhiSpec::porous_medium(2.0),
                                   ReactionSpec::porous_fischer(),
                                   tag_boundary(*g, {}));
    p.initial_u = Field(g, 0.1, FieldRole::U);
    p.horizon = 20.0;
    p.step = 10.0;
    const SolutionTrace tr = solve_scalar(p);
    CHECK(!tr.complete);
    CHECK(tr.failed_step == 1);
    CHECK(!tr.failure.empty());
    CHECK(tr.stamps.size() == 1);  // only the initial state
}

TEST_CASE("barrier problem reproduces the closed form") {
    const Grid g = build_grid(1, {{1.0, 4}});
    const BoundaryMap bc = tag_boundary(g, {Face::Right});
    const BarrierSolution bar = solve_barrier(g, bc, 1.0, 0.0);
    // v(x) = (1 - x^2)/2; cell-centered scheme is O(h^2)
    CHECK(bar.v[0] == doctest::Approx(0.4921875).epsilon(0.05));
    for (std::size_t i = 0; i < bar.v.size(); ++i) {
        const double x = g.x_of(i);
        CHECK(std::abs(bar.v[i] - 0.5 * (1.0 - x * x)) < 0.02);
    }
    CHECK(bar.max_v == doctest::Approx(bar.v[0]));

    const BarrierSolution flat = solve_barrier(g, bc, 0.0, 0.7);
    for (std::size_t i = 0; i < flat.v.size(); ++i)
        CHECK(flat.v[i] == doctest::Approx(0.7).epsilon(1e-12));

    CHECK_THROWS_AS(solve_barrier(g, tag_boundary(g, {}), 1.0, 0.0), ConfigError);
}

TEST_CASE("sup bound M0") {
    PhiEvaluator lin(PhiSpec::linear(1.0));
    CHECK(sup_bound_M0(lin, 0.5) == doctest::Approx(0.5));
    CHECK(sup_bound_M0(lin, 0.0) == doctest::Approx(0.0));

    PhiEvaluator sp(PhiSpec::singular_power(1.0, 1.0));
    // bisection oracle on -z - ln(1-z) = 0.5
    double lo = 0.0, hi = 1.0 - 1e-16;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (-mid - std::log(1.0 - mid) < 0.5 ? lo : hi) = mid;
    }
    CHECK(sup_bound_M0(sp, 0.5) == doctest::Approx(lo).epsilon(1e-8));
    CHECK_THROWS_AS(sup_bound_M0(sp, -1.0), DomainError);
}

TEST_CASE("solver reruns are bit-identical") {
    std::mt19937_64 rng(77);
    auto g = grid1d(24);
    ScalarProblem p =
        base_problem(g, PhiSpec::singular_power(1.0, 1.0),
                     ReactionSpec::biofilm_scalar(1, 1, 1, 1),
                     tag_boundary(*g, {Face::Right}));
    p.dirichlet_w = Field(g, 0.0, FieldRole::W);
    Field u0(g, 0.0, FieldRole::U);
    std::uniform_real_distribution<double> uni(0.0, 0.7);
    for (double& v : u0.values) v = uni(rng);
    p.initial_u = u0;
    p.horizon = 0.02;
    p.step = 1e-3;
    const SolutionTrace a = solve_scalar(p);
    const SolutionTrace b = solve_scalar(p);
    REQUIRE(a.u.size() == b.u.size());
    for (std::size_t n = 0; n < a.u.size(); ++n)
        CHECK(a.u[n].values == b.u[n].values);
}
