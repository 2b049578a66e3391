#include <doctest.h>

#include <cmath>

#include "degensim/config.hpp"

using namespace degensim;

namespace {

const char* kMinimal = R"(
[domain]
dimension = 1
length = 1
cells = 16

[time]
T = 0.1
tau = 0.01
)";

const char* kBiofilm2d = R"(
# biofilm showcase: nutrients enter through the top
[domain]
dimension = 2
length = 1,1
cells = 16,16

[phi]
kind = singular_power
a = 1
b = 1

[reaction]
kind = biofilm
K1 = 1
K2 = 1
K3 = 1
K4 = 1
d1 = 1
d2 = 1e-2

[bc]
dirichlet_u = top
u_D = 0
dirichlet_v = top
v_D = 1

[ic]
preset = bumps
count = 3
radius = 0.15
height = 0.5

[time]
T = 0.05
tau = 1e-2
snapshot_every = 2

[output]
directory = out_biofilm
)";

} // namespace

TEST_CASE("minimal config fills defaults") {
    const RunConfig cfg = parse_config_text(kMinimal);
    CHECK(cfg.dimension == 1);
    CHECK(cfg.cells[0] == 16);
    CHECK(cfg.phi.kind == PhiSpec::Kind::Linear);
    CHECK(cfg.reaction_kind == "none");
    CHECK(!cfg.coupled());
    CHECK(cfg.ic_preset == "constant");
    CHECK(cfg.output_directory == "out");
    const ScalarProblem p = cfg.make_scalar_problem();
    CHECK(p.grid->node_count() == 16);
    CHECK(p.bc.pure_neumann());
}

TEST_CASE("bad cell count names the key") {
    const char* text = R"(
[domain]
dimension = 1
length = 1
cells = 0

[time]
T = 0.1
tau = 0.01
)";
    try {
        parse_config_text(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("domain.cells") != std::string::npos);
    }
}

TEST_CASE("biofilm preset config matches the boundary setup") {
    const RunConfig cfg = parse_config_text(kBiofilm2d);
    CHECK(cfg.coupled());
    CHECK(cfg.d2 == doctest::Approx(1e-2));
    const CoupledProblem p = cfg.make_coupled_problem();
    CHECK(p.bc_u.is_dirichlet(Face::Top));
    CHECK(!p.bc_u.is_dirichlet(Face::Bottom));
    CHECK(!p.bc_u.is_dirichlet(Face::Left));
    CHECK(!p.bc_u.is_dirichlet(Face::Right));
    CHECK(p.bc_v.is_dirichlet(Face::Top));
    CHECK(p.diffusion_u == doctest::Approx(1e-2));
    CHECK(p.diffusion_v == doctest::Approx(1.0));
    // pockets of biomass sit on the bottom boundary
    double bottom_mass = 0.0, top_mass = 0.0;
    for (std::size_t i = 0; i < p.initial_u.size(); ++i) {
        if (p.grid->y_of(i) < 0.2) bottom_mass += p.initial_u[i];
        if (p.grid->y_of(i) > 0.8) top_mass += p.initial_u[i];
    }
    CHECK(bottom_mass > 0.0);
    CHECK(top_mass == 0.0);
    for (double v : p.initial_v.values) CHECK(v == 1.0);
}

TEST_CASE("all errors are reported together") {
    const char* text = R"(
[domain]
dimension = 3
length = -1
cells = 1

[phi]
kind = mystery

[time]
T = -2
tau = 0.01

[nonsense]
key = 1
)";
    try {
        parse_config_text(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("domain.dimension") != std::string::npos);
        CHECK(msg.find("domain.length") != std::string::npos);
        CHECK(msg.find("domain.cells") != std::string::npos);
        CHECK(msg.find("phi.kind") != std::string::npos);
        CHECK(msg.find("time.T") != std::string::npos);
        CHECK(msg.find("nonsense.key") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected") {
    const std::string text = std::string(kMinimal) + "\n[domain]\n";
    CHECK_THROWS_AS(parse_config_text(std::string(kMinimal) +
                                      "\n[extra]\nfoo = 1\n"),
                    ConfigError);
}

TEST_CASE("horizon must be a multiple of the step") {
    const char* text = R"(
[domain]
dimension = 1
length = 1
cells = 8

[time]
T = 0.105
tau = 0.01
)";
    CHECK_THROWS_AS(parse_config_text(text), ConfigError);
}

TEST_CASE("barenblatt preset samples the self-similar profile") {
    const char* text = R"(
[domain]
dimension = 1
length = 3
cells = 64

[phi]
kind = porous_medium
m = 2

[ic]
preset = barenblatt
t0 = 0.1
C = 0.1

[time]
T = 0.1
tau = 1e-3
)";
    const RunConfig cfg = parse_config_text(text);
    const ScalarProblem p = cfg.make_scalar_problem();
    // peak at the center, compact support
    const double peak = *std::max_element(p.initial_u.values.begin(),
                                          p.initial_u.values.end());
    CHECK(peak == doctest::Approx(std::pow(0.1, -1.0 / 3.0) * 0.1).epsilon(1e-3));
    CHECK(p.initial_u[0] == 0.0);
    CHECK(p.initial_u[63] == 0.0);
}

TEST_CASE("convergence study: linear heat carries first order in tau") {
    const char* text = R"(
[domain]
dimension = 1
length = 1
cells = 128

[phi]
kind = linear

[bc]
dirichlet_u = left,right
u_D = 0

[ic]
preset = bumps
count = 1
radius = 0.3
height = 0.8

[time]
T = 0.1
tau = 1e-2
)";
    const RunConfig cfg = parse_config_text(text);
    const auto rows = run_convergence_study(cfg, 3);
    REQUIRE(rows.size() == 3);
    for (int i = 1; i < 3; ++i) {
        CHECK(rows[i].l1_error < rows[i - 1].l1_error);
        const double order = std::log2(rows[i - 1].l1_error / rows[i].l1_error);
        CHECK(order >= 0.9);
        CHECK(order <= 1.2);  // backward Euler is first order, no more
    }
    // a single level produces a single row
    CHECK(run_convergence_study(cfg, 1).size() == 1);
}

TEST_CASE("convergence study: barenblatt errors shrink under grid refinement") {
    const char* text = R"(
[domain]
dimension = 1
length = 3
cells = 50

[phi]
kind = porous_medium
m = 2

[ic]
preset = barenblatt
t0 = 0.1
C = 0.1

[time]
T = 0.1
tau = 2e-4
)";
    const RunConfig cfg = parse_config_text(text);
    const auto rows = run_convergence_study(cfg, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].l1_error < rows[0].l1_error);
    CHECK(rows[1].h == doctest::Approx(rows[0].h / 2.0));
}

TEST_CASE("coupled config requires a Dirichlet part for v") {
    std::string text = kBiofilm2d;
    const auto pos = text.find("dirichlet_v = top");
    text.replace(pos, std::string("dirichlet_v = top").size(),
                 "dirichlet_v = none");
    CHECK_THROWS_AS(parse_config_text(text), ConfigError);
}

TEST_CASE("initial data round-trips through a snapshot file") {
    auto g = std::make_shared<const Grid>(build_grid(1, {{1.0, 16}}));
    Field f(g, 0.0, FieldRole::U);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = 0.1 + 0.05 * std::sin(7.0 * i);
    const std::string path = "ic_roundtrip.csv";
    write_snapshot_csv(f, path);

    const std::string text = std::string(R"(
[domain]
dimension = 1
length = 1
cells = 16

[ic]
preset = file
file = )") + path + R"(

[time]
T = 0.1
tau = 0.01
)";
    const RunConfig cfg = parse_config_text(text);
    const ScalarProblem p = cfg.make_scalar_problem();
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(p.initial_u[i] == f[i]);  // 17 digits round-trip exactly

    // row-count mismatch is rejected
    RunConfig bad = cfg;
    bad.cells[0] = 32;
    CHECK_THROWS_AS(bad.make_scalar_problem(), ConfigError);
    std::remove(path.c_str());
}
