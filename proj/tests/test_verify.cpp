#include <doctest.h>

#include <cmath>
#include <sstream>

#include "degensim/verify.hpp"

using namespace degensim;

namespace {

std::shared_ptr<const Grid> grid1d(int n) {
    return std::make_shared<const Grid>(build_grid(1, {{1.0, n}}));
}

ScalarProblem neumann_pm(int n) {
    ScalarProblem p;
    p.grid = grid1d(n);
    p.bc = tag_boundary(*p.grid, {});
    p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::porous_medium(2.0));
    p.reaction = ReactionSpec::none();
    p.initial_u = Field(p.grid, 0.0, FieldRole::U);
    p.horizon = 0.02;
    p.step = 1e-3;
    return p;
}

} // namespace

TEST_CASE("steklov average of a constant is the constant") {
    std::vector<double> stamps, values;
    for (int k = 0; k <= 50; ++k) {
        stamps.push_back(0.02 * k);
        values.push_back(5.0);
    }
    const auto avg = steklov_average(stamps, values, 0.13);
    for (double v : avg) CHECK(v == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("steklov average of a ramp is the shifted ramp") {
    std::vector<double> stamps, values;
    for (int k = 0; k <= 100; ++k) {
        stamps.push_back(0.01 * k);
        values.push_back(0.01 * k);
    }
    const double h = 0.2;
    const auto avg = steklov_average(stamps, values, h);
    for (std::size_t k = 0; k < stamps.size(); ++k) {
        const double t = stamps[k];
        if (t >= h) {
            CHECK(avg[k] == doctest::Approx(t - 0.5 * h).epsilon(1e-10));
        } else {
            // frozen extension below t = 0 contributes zero
            CHECK(avg[k] == doctest::Approx(t * t / (2.0 * h)).epsilon(1e-10));
        }
    }
}

TEST_CASE("steklov average converges to the sample as h -> 0") {
    std::vector<double> stamps, values;
    for (int k = 0; k <= 400; ++k) {
        stamps.push_back(k / 400.0);
        values.push_back(std::sin(3.0 * k / 400.0));
    }
    const std::size_t probe = 250;
    double prev_err = 1e300;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const auto avg = steklov_average(stamps, values, h);
        const double err = std::abs(avg[probe] - values[probe]);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.02);
}

TEST_CASE("steklov average commutes with time shifts") {
    std::vector<double> stamps, shifted, values;
    for (int k = 0; k <= 60; ++k) {
        stamps.push_back(0.05 * k);
        shifted.push_back(0.05 * k + 3.7);
        values.push_back(std::cos(0.3 * k));
    }
    const auto a = steklov_average(stamps, values, 0.17);
    const auto b = steklov_average(shifted, values, 0.17);
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
}

TEST_CASE("report registers every check exactly once") {
    VerificationReport rep;
    rep.add({"a", "x", true, 0.1, 0, 0.0});
    rep.add({"a", "y", true, 0.1, 0, 0.0});
    CHECK_THROWS_AS(rep.add({"a", "x", false, 0.2, 0, 0.0}), ConfigError);
    CHECK(rep.all_pass());
    rep.add({"b", "x", false, 2.0, 0, 0.0});
    CHECK(!rep.all_pass());

    std::ostringstream os;
    rep.write_csv(os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "check,instance,status,margin,seed,runtime_s");
    int rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("identical twins contract trivially") {
    ScalarProblem p = neumann_pm(16);
    Field u0(p.grid, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < u0.size(); ++i)
        u0[i] = 0.5 * std::exp(-8.0 * p.grid->x_of(i));
    const CheckResult r = check_l1_contraction(p, u0, u0);
    CHECK(r.pass);
    CHECK(r.margin <= 1e-6);
}

TEST_CASE("comparison with equal data passes") {
    ScalarProblem p = neumann_pm(16);
    Field u0(p.grid, 0.3, FieldRole::U);
    const CheckResult r = check_comparison(p, u0, u0);
    CHECK(r.pass);
}

TEST_CASE("zero stays below a bump when f(.,0) = 0") {
    ScalarProblem p = neumann_pm(32);
    p.reaction = ReactionSpec::porous_fischer();
    Field zero(p.grid, 0.0, FieldRole::U);
    Field bump(p.grid, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < bump.size(); ++i) {
        const double d = (p.grid->x_of(i) - 0.5) / 0.25;
        if (d * d < 1) bump[i] = 0.6 * (1 - d * d) * (1 - d * d);
    }
    const CheckResult r = check_comparison(p, zero, bump);
    CHECK(r.pass);
    // zero is an exact equilibrium, so the positive part is machine-level
    CHECK(r.margin <= 1e-6);
}

TEST_CASE("stationary traces satisfy the energy identity and chain rule") {
    ScalarProblem p = neumann_pm(16);
    p.initial_u = Field(p.grid, 0.25, FieldRole::U);
    const SolutionTrace tr = solve_scalar(p);
    CHECK(energy_identity_residual(p, tr) <= 1e-12);
    const CheckResult e = check_energy_identity(p, tr);
    CHECK(e.pass);
    const CheckResult c = check_chain_rule(p, tr);
    CHECK(c.pass);
    CHECK(chain_rule_defect(p, tr) <= 1e-10);
}

TEST_CASE("stationary data attain the initial datum trivially") {
    ScalarProblem p = neumann_pm(16);
    p.initial_u = Field(p.grid, 0.4, FieldRole::U);
    const CheckResult r = check_initial_attainment(p);
    CHECK(r.pass);
    CHECK(r.margin == 0.0);
}

TEST_CASE("mass balance with a constant source grows exactly") {
    ScalarProblem p = neumann_pm(16);
    ReactionSpec one;
    one.kind = ReactionSpec::Kind::Custom;
    one.custom_f = [](double, double) { return 1.0; };
    one.box_u_lo = -10.0;
    one.box_u_hi = 10.0;
    p.reaction = one;
    p.initial_u = Field(p.grid, 0.1, FieldRole::U);
    const SolutionTrace tr = solve_scalar(p);
    const CheckResult r = check_mass_balance(p, tr);
    CHECK(r.pass);
    // mass(t) = mass(0) + t |Omega|
    const StepDiagnostics& last = tr.diag.back();
    CHECK(last.mass - tr.diag[0].mass ==
          doctest::Approx(last.t * 1.0).epsilon(1e-10));
    // single short step: drift vanishingly small
    ScalarProblem tiny = neumann_pm(16);
    tiny.initial_u = Field(tiny.grid, 0.1, FieldRole::U);
    tiny.horizon = tiny.step = 1e-3;
    const SolutionTrace tr1 = solve_scalar(tiny);
    CHECK(std::abs(tr1.diag.back().mass - tr1.diag[0].mass) <= 1e-13);
}

TEST_CASE("mass balance requires pure Neumann") {
    ScalarProblem p = neumann_pm(16);
    p.bc = tag_boundary(*p.grid, {Face::Right});
    p.dirichlet_w = Field(p.grid, 0.0, FieldRole::W);
    p.initial_u = Field(p.grid, 0.2, FieldRole::U);
    const SolutionTrace tr = solve_scalar(p);
    CHECK_THROWS_AS(check_mass_balance(p, tr), ConfigError);
}

TEST_CASE("barrier check on a trivial instance") {
    // f = 0, u0 <= 1-theta, w^D = 0 <= phi(1-theta): the barrier is the
    // constant phi(1-theta) and M0 = 1-theta bounds the run
    ScalarProblem p;
    p.grid = grid1d(16);
    p.bc = tag_boundary(*p.grid, {Face::Right});
    p.phi = std::make_shared<const PhiEvaluator>(PhiSpec::singular_power(1, 1));
    p.reaction = ReactionSpec::none();
    p.dirichlet_w = Field(p.grid, 0.0, FieldRole::W);
    Field u0(p.grid, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < u0.size(); ++i)
        u0[i] = 0.9 * std::exp(-4.0 * p.grid->x_of(i));
    p.initial_u = u0;
    p.horizon = 0.02;
    p.step = 1e-3;
    const BarrierCheck bc = check_barrier_bound(p, 0.1);
    CHECK(bc.result.pass);
    CHECK(bc.c1 == 0.0);
    CHECK(bc.K == doctest::Approx(bc.c2));
    CHECK(bc.M0 == doctest::Approx(0.9).epsilon(1e-8));
    CHECK(bc.M0 < 1.0);
}

TEST_CASE("suite selection") {
    CHECK_THROWS_AS(run_suite("bogus", 1), ConfigError);
}
