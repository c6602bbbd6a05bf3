#include "mwd/fields.hpp"

#include <doctest.h>

#include <cmath>

using namespace mwd;

TEST_CASE("single atom potential")
{
    double const c6 = 8.0, q = 0.39;
    PotentialField const f = PotentialField::single_atom(c6, q);
    Eigen::Vector3d const p(1.0, -2.0, 3.5);
    double const r2 = p.squaredNorm();
    CHECK(f.u_vdw(p) == doctest::Approx(-c6 / (r2 * r2 * r2)).epsilon(1e-13));
    // induced dipole in the field of a point charge
    CHECK(f.u_electrostatic(p) == doctest::Approx(-0.5 * helium_alpha0 * q * q / (r2 * r2)).epsilon(1e-13));
    CHECK(f.u_total(p) == doctest::Approx(f.u_vdw(p) + f.u_electrostatic(p)));

    FieldOptions off;
    off.electrostatic = false;
    CHECK(f.with_options(off).u_total(p) == doctest::Approx(f.u_vdw(p)));
}

TEST_CASE("gradient matches finite differences")
{
    std::vector<FieldAtom> atoms(3);
    atoms[0].position = {0, 0, 0};
    atoms[0].c6 = 30;
    atoms[0].charge = 0.3;
    atoms[1].position = {2.7, 0, 0};
    atoms[1].c6 = 10;
    atoms[1].charge = -0.3;
    atoms[1].anisotropy = Eigen::Vector3d(1.2, 1.2, 0.6).asDiagonal();
    atoms[2].position = {1.3, 2.4, 0};
    atoms[2].c6 = 20;
    PotentialField const f(atoms);
    Eigen::Vector3d const p(0.7, 0.9, 3.1);
    Eigen::Vector3d const g = f.grad_u(p);
    double const h = 1e-5;
    for (int a = 0; a < 3; ++a)
    {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[a] = h;
        double const fd = (f.u_total(p + e) - f.u_total(p - e)) / (2 * h);
        CHECK(g[a] == doctest::Approx(fd).epsilon(1e-6));
    }
    FieldSample const s = f.sample(p);
    CHECK(s.total == doctest::Approx(f.u_total(p)));
    CHECK((s.gradient - g).norm() < 1e-14 * g.norm());
}

TEST_CASE("ring restriction")
{
    std::vector<FieldAtom> atoms(4);
    for (int i = 0; i < 4; ++i)
    {
        atoms[i].position = {3.0 * i, 0, 0};
        atoms[i].c6 = 10;
        atoms[i].ring_index = i;
    }
    PotentialField const f(atoms);
    CHECK(f.restricted(1).atoms().size() == 2);
    CHECK(f.restricted(-1).atoms().empty());
    Eigen::Vector3d const p(0, 0, 3);
    CHECK(f.restricted(3).u_vdw(p) == doctest::Approx(f.u_vdw(p)));
    CHECK(std::abs(f.restricted(0).u_vdw(p)) < std::abs(f.u_vdw(p)));
}

TEST_CASE("scans")
{
    PotentialField const f = PotentialField::single_atom(5, 0);
    auto const line = line_scan(f, {0, 0, 3}, {0, 0, 9}, 4);
    REQUIRE(line.size() == 4);
    CHECK(line[1].position.z() == doctest::Approx(5.0));
    CHECK(line.back().position.z() == doctest::Approx(9.0));
    CHECK(line[0].value.vdw < line[3].value.vdw);
    auto const plane = plane_scan(f, {-1, -1, 3}, {2, 0, 0}, {0, 2, 0}, 3, 5);
    CHECK(plane.size() == 15);
    CHECK_THROWS(line_scan(f, {0, 0, 3}, {0, 0, 9}, 1));
}
