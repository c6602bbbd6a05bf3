#include "mwd/reduction_classical.hpp"
#include "mwd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mwd;

namespace
{
TrajectoryConfig vdw_only(double v, double c6)
{
    TrajectoryConfig c;
    c.velocity_mps = v;
    c.c6_b = c6;
    c.c6_n = c6;
    c.charge = 0.0;
    c.field.electrostatic = false;
    c.bisection_tol = 1e-6;
    return c;
}
}  // namespace

TEST_CASE("free flight")
{
    PotentialField const none = PotentialField::single_atom(0.0, 0.0);
    TrajectoryConfig cfg;
    cfg.velocity_mps = 2000;
    TrajectoryResult const r = propagate_trajectory(none, 5.0, 1.0, cfg);
    CHECK_FALSE(r.collided);
    CHECK(r.min_distance == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(propagate_trajectory(none, 0.5, 1.0, cfg).collided);
}

TEST_CASE("energy is conserved on a deflected path")
{
    PotentialField const f = PotentialField::single_atom(40.0, 0.3);
    TrajectoryConfig cfg;
    cfg.velocity_mps = 2000;
    TrajectoryResult const r = propagate_trajectory(f, 9.0, 3.0, cfg);
    CHECK_FALSE(r.collided);
    CHECK(r.min_distance < 9.0);
    CHECK(r.energy_error < 1e-8);
}

TEST_CASE("fast regime: periapsis condition")
{
    // monotone effective potential: b^2 = R^2 (1 - U(R) / E)
    double const c6 = 60.0, v = 20000;
    TrajectoryConfig const cfg = vdw_only(v, c6);
    double const R = cfg.vdw_radius_b;
    double const e = 0.5 * units::helium_mass_me * std::pow(units::mps_to_au(v), 2);
    double const expect = R * std::sqrt(1 + c6 / (std::pow(R, 6) * e));
    CHECK(delta_r_classical(Species::B, v, cfg) == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("slow regime: orbiting capture radius")
{
    // barrier of E b^2 / r^2 - C6 / r^6 at r*^6 = 2 C6 / E, b = sqrt(3/2) r*
    double const c6 = 60.0, v = 2000;
    TrajectoryConfig const cfg = vdw_only(v, c6);
    double const e = 0.5 * units::helium_mass_me * std::pow(units::mps_to_au(v), 2);
    double const rstar = std::pow(2 * c6 / e, 1.0 / 6.0);
    REQUIRE(rstar > cfg.vdw_radius_b);
    CHECK(delta_r_classical(Species::B, v, cfg) == doctest::Approx(std::sqrt(1.5) * rstar).epsilon(1e-4));
}

TEST_CASE("defaults: ordering")
{
    double const b2 = delta_r_classical(Species::B, 2000), b20 = delta_r_classical(Species::B, 20000);
    double const n2 = delta_r_classical(Species::N, 2000), n20 = delta_r_classical(Species::N, 20000);
    CHECK(b2 > b20);
    CHECK(n2 > n20);
    CHECK(b2 > n2);
    CHECK(b20 > n20);
    TrajectoryConfig const cfg;
    CHECK(b20 > cfg.vdw_radius_b);
    CHECK(n20 > cfg.vdw_radius_n);
}

TEST_CASE("config validation")
{
    TrajectoryConfig c;
    c.velocity_mps = -1;
    CHECK_THROWS(c.validate());
    CHECK_THROWS(delta_r_classical(Species::B, 0.0));
}

TEST_CASE("classical CSV")
{
    std::ostringstream os;
    write_classical_csv(os, {{Species::B, 2000, units::angstrom_to_bohr(2.5)}});
    CHECK(os.str().rfind("species,velocity_mps,delta_r_classical_angstrom\n", 0) == 0);
    CHECK(os.str().find("B,2000,2.5") != std::string::npos);
}
