#include "mwd/lattice.hpp"
#include "mwd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace mwd;

namespace
{
Eigen::Vector2d rotate(Eigen::Vector2d const& p, double deg)
{
    double const t = deg * std::numbers::pi / 180;
    return {std::cos(t) * p.x() - std::sin(t) * p.y(), std::sin(t) * p.x() + std::cos(t) * p.y()};
}
}  // namespace

TEST_CASE("lattice constants")
{
    CHECK(units::bohr_to_angstrom(lattice::bond_length()) == doctest::Approx(1.446).epsilon(1e-12));
    CHECK(lattice::lattice_constant() == doctest::Approx(std::sqrt(3.0) * lattice::bond_length()));
    CHECK(lattice::a1().norm() == doctest::Approx(lattice::lattice_constant()));
    CHECK(lattice::a2().norm() == doctest::Approx(lattice::lattice_constant()));
    CHECK(lattice::n_offset().norm() == doctest::Approx(lattice::bond_length()));
}

TEST_CASE("pristine rhombus")
{
    MembraneModel const m = build_pristine(lattice::default_side_length());
    REQUIRE(m.cells() == 16);
    CHECK(m.size() == 2 * 16 * 16);
    int nb = 0;
    double dmin = 1e300;
    for (auto const& a : m.atoms())
    {
        nb += a.species == Species::B;
        dmin = std::min(dmin, a.position.head<2>().norm());
        CHECK(a.position.z() == 0.0);
    }
    CHECK(nb == 16 * 16);
    // origin on a hollow site: every atom at least one bond away
    CHECK(dmin == doctest::Approx(lattice::bond_length()).epsilon(1e-9));

    auto const bonds = m.bonds();
    int interior = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        CHECK(bonds[i].size() <= 3);
        for (auto j : bonds[i])
        {
            CHECK(m[i].species != m[j].species);
            CHECK((m[i].position - m[j].position).norm() == doctest::Approx(lattice::bond_length()).epsilon(1e-9));
        }
        interior += bonds[i].size() == 3;
    }
    CHECK(interior > int(m.size()) / 2);
    CHECK(m.in_region(Eigen::Vector2d(0, 0)));
    CHECK_FALSE(m.in_region(Eigen::Vector2d(1e4, 0)));
}

TEST_CASE("builtin holes")
{
    MembraneModel const pristine = build_pristine(lattice::default_side_length());
    for (auto const& name : builtin_hole_names())
    {
        CAPTURE(name);
        HoleSpec const spec = builtin_hole(name);
        CHECK(spec.contains(Eigen::Vector2d(0, 0)));
        MembraneModel const m = carve_hole(pristine, spec);
        REQUIRE(m.removed().size() > 0);
        CHECK(m.size() + m.removed().size() == pristine.size());

        int rb = 0;
        for (auto const& a : m.removed())
            rb += a.species == Species::B ? 1 : -1;
        CHECK(rb == 0);

        double q = 0;
        bool has_ring0 = false;
        auto const bonds = m.bonds();
        for (std::size_t i = 0; i < m.size(); ++i)
        {
            q += m[i].charge;
            CHECK(m[i].ring_index >= 0);
            CHECK_FALSE(spec.contains(m[i].position.head<2>()));
            has_ring0 |= m[i].ring_index == 0;
            // bonded neighbours differ by at most one ring
            for (auto j : bonds[i])
                CHECK(std::abs(m[i].ring_index - m[j].ring_index) <= 1);
            if (m[i].ring_index == 0)
                CHECK(std::abs(m[i].charge) == doctest::Approx(0.39));
        }
        CHECK(has_ring0);
        CHECK(std::abs(q) < 1e-9);
    }
    CHECK_THROWS(builtin_hole("square"));
}

TEST_CASE("snowflake removal set is three-fold symmetric")
{
    MembraneModel const m = carve_hole(build_pristine(lattice::default_side_length()), builtin_hole("snowflake"));
    auto const removed = m.removed();
    for (auto const& a : removed)
    {
        Eigen::Vector2d const p = rotate(a.position.head<2>(), 120);
        bool found = false;
        for (auto const& b : removed)
            found |= b.species == a.species && (b.position.head<2>() - p).norm() < 1e-6;
        CHECK(found);
    }
}

TEST_CASE("signed distance")
{
    HoleSpec const c = builtin_hole("circle10");
    auto const& shape = std::get<CircleShape>(c.shape);
    CHECK(c.signed_distance(Eigen::Vector2d(0, 0)) == doctest::Approx(-shape.radius));
    CHECK(c.signed_distance(Eigen::Vector2d(shape.radius + 1, 0)) == doctest::Approx(1.0));
    HoleSpec const e = builtin_hole("ellipse");
    auto const& es = std::get<EllipseShape>(e.shape);
    CHECK(e.contains(Eigen::Vector2d(0.99 * es.semi_a, 0)));
    CHECK_FALSE(e.contains(Eigen::Vector2d(0, 1.01 * es.semi_b)));
}

TEST_CASE("charge profile")
{
    ChargeProfile p;
    CHECK(p.charge(Species::B, 0) == doctest::Approx(0.39));
    CHECK(p.charge(Species::N, 0) == doctest::Approx(-0.39));
    CHECK(p.charge(Species::B, 5) == doctest::Approx(0.20));
    p.edge_b = -1;
    CHECK_THROWS(p.validate());
}

TEST_CASE("geometry file round trip")
{
    MembraneModel const m = carve_hole(build_pristine(lattice::default_side_length()), builtin_hole("ellipse"));
    std::stringstream ss;
    write_geometry(ss, m);
    MembraneModel const r = read_geometry(ss);
    REQUIRE(r.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        CHECK(r[i].species == m[i].species);
        CHECK(r[i].position == m[i].position);
        CHECK(r[i].charge == m[i].charge);
        CHECK(r[i].hirshfeld_alpha == m[i].hirshfeld_alpha);
        CHECK(r[i].ring_index == m[i].ring_index);
    }
    CHECK(r.side_length() == m.side_length());

    std::istringstream bad("3 1 1\nB 0 0\n");
    CHECK_THROWS(read_geometry(bad));
}
