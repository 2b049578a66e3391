#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "degensim/geometry.hpp"

using namespace degensim;

TEST_CASE("build_grid 1d cell centers") {
    const Grid g = build_grid(1, {{1.0, 4}});
    CHECK(g.h[0] == doctest::Approx(0.25));
    CHECK(g.node_count() == 4);
    CHECK(g.x_of(0) == doctest::Approx(0.125));
    CHECK(g.x_of(1) == doctest::Approx(0.375));
    CHECK(g.x_of(2) == doctest::Approx(0.625));
    CHECK(g.x_of(3) == doctest::Approx(0.875));
}

TEST_CASE("build_grid 2d") {
    const Grid g = build_grid(2, {{1.0, 2}, {1.0, 2}});
    CHECK(g.node_count() == 4);
    CHECK(g.h[0] == doctest::Approx(0.5));
    CHECK(g.h[1] == doctest::Approx(0.5));
    CHECK(g.cell_volume() == doctest::Approx(0.25));
}

TEST_CASE("build_grid rejects degenerate extents") {
    CHECK_THROWS_AS(build_grid(1, {{0.0, 4}}), ConfigError);
    CHECK_THROWS_AS(build_grid(1, {{1.0, 1}}), ConfigError);
    CHECK_THROWS_AS(build_grid(3, {{1.0, 4}}), ConfigError);
}

TEST_CASE("boundary tagging") {
    const Grid g2 = build_grid(2, {{1.0, 4}, {2.0, 4}});
    const BoundaryMap top = tag_boundary(g2, {Face::Top});
    CHECK(top.is_dirichlet(Face::Top));
    CHECK(!top.is_dirichlet(Face::Bottom));
    CHECK(!top.is_dirichlet(Face::Left));
    CHECK(!top.is_dirichlet(Face::Right));
    CHECK(top.dirichlet_measure == doctest::Approx(1.0));
    CHECK(!top.verification_only);

    const Grid g1 = build_grid(1, {{1.0, 4}});
    const BoundaryMap pure = tag_boundary(g1, {});
    CHECK(pure.pure_neumann());
    CHECK(pure.verification_only);

    const BoundaryMap right = tag_boundary(g1, {Face::Right});
    CHECK(right.is_dirichlet(Face::Right));
    CHECK(!right.is_dirichlet(Face::Left));
    CHECK(right.dirichlet_measure == doctest::Approx(1.0));
}

TEST_CASE("inconsistent double tagging rejected") {
    const Grid g = build_grid(2, {{1.0, 4}, {1.0, 4}});
    CHECK_THROWS_AS(tag_boundary(g, {Face::Top}, {Face::Top}), ConfigError);
    const Grid g1 = build_grid(1, {{1.0, 4}});
    CHECK_THROWS_AS(tag_boundary(g1, {Face::Top}), ConfigError);
}

TEST_CASE("every boundary face carries exactly one tag") {
    const Grid g = build_grid(2, {{1.0, 4}, {1.0, 4}});
    const BoundaryMap bm = tag_boundary(g, {Face::Top, Face::Left});
    int dirichlet = 0, neumann = 0;
    for (int f = 0; f < bm.face_count(); ++f)
        (bm.tags[f] == BcTag::Dirichlet ? dirichlet : neumann)++;
    CHECK(dirichlet + neumann == 4);
    CHECK(dirichlet == 2);
}

TEST_CASE("discrete norms") {
    auto g = std::make_shared<const Grid>(build_grid(1, {{1.0, 4}}));
    Field ones(g, 1.0);
    CHECK(discrete_norm(ones, NormKind::L1) == doctest::Approx(1.0));

    auto g2 = std::make_shared<const Grid>(build_grid(1, {{1.0, 2}}));
    Field f(g2, 0.0);
    f[0] = 3.0;
    f[1] = 4.0;
    CHECK(discrete_norm(f, NormKind::L2) ==
          doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    f[0] = -2.0;
    f[1] = 5.0;
    CHECK(discrete_norm(f, NormKind::Linf) == doctest::Approx(5.0));
}

TEST_CASE("norm ordering (discrete Hoelder)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    auto g = std::make_shared<const Grid>(build_grid(2, {{1.5, 8}, {0.5, 6}}));
    const double vol_omega = g->domain_volume();
    for (int k = 0; k < 50; ++k) {
        Field f(g, 0.0);
        for (double& v : f.values) v = uni(rng);
        const double l1 = discrete_norm(f, NormKind::L1);
        const double l2 = discrete_norm(f, NormKind::L2);
        const double li = discrete_norm(f, NormKind::Linf);
        CHECK(l1 <= std::sqrt(vol_omega) * l2 + 1e-12);
        CHECK(l2 <= std::sqrt(vol_omega) * li + 1e-12);
    }
}

TEST_CASE("positive part norm") {
    auto g = std::make_shared<const Grid>(build_grid(1, {{1.0, 2}}));
    Field a(g, 0.0), b(g, 0.0);
    a[0] = 1.0;
    a[1] = -3.0;
    b[0] = 0.5;
    b[1] = 0.0;
    CHECK(positive_part_l1(a, b) == doctest::Approx(0.25));
}

TEST_CASE("snapshot csv format") {
    auto g = std::make_shared<const Grid>(build_grid(1, {{1.0, 2}}));
    Field f(g, 0.0);
    f[0] = 1.0 / 3.0;
    f[1] = 2.0;
    std::ostringstream os;
    write_snapshot_csv(f, os);
    CHECK(os.str() ==
          "x,value\n0.25,0.33333333333333331\n0.75,2\n");

    auto g2 = std::make_shared<const Grid>(build_grid(2, {{1.0, 2}, {1.0, 2}}));
    Field f2(g2, 7.0);
    std::ostringstream os2;
    write_snapshot_csv(f2, os2);
    std::istringstream is(os2.str());
    std::string header;
    std::getline(is, header);
    CHECK(header == "x,y,value");
    int rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}
