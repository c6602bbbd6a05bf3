#include "mwd/qprop.hpp"
#include "mwd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mwd;

namespace
{
GridSpec small_grid(int nr, int nz, double half_angstrom)
{
    GridSpec g;
    g.n_r = nr;
    g.n_z = nz;
    g.r_max = units::angstrom_to_bohr(half_angstrom);
    g.z_min = -g.r_max;
    g.z_max = g.r_max;
    return g;
}

PropagationConfig packet(double sigma_angstrom)
{
    PropagationConfig c;
    c.sigma_r = c.sigma_z = units::angstrom_to_bohr(sigma_angstrom);
    return c;
}
}  // namespace

TEST_CASE("reduction radius from the surviving norm")
{
    // Gaussian density: a cylinder of radius R keeps exp(-R^2 / 2 sigma^2)
    double const s = 15.0, r = 4.0;
    CHECK(delta_r_quantum(std::exp(-r * r / (2 * s * s)), s) == doctest::Approx(r).epsilon(1e-12));
    CHECK(delta_r_quantum(1.0, s) == 0.0);
    CHECK_THROWS(delta_r_quantum(0.0, s));
}

TEST_CASE("initial packet")
{
    GridSpec const g = small_grid(128, 256, 20);
    WavePacketGrid const p = initial_packet(packet(2.0), g);
    double const s = units::angstrom_to_bohr(2.0);
    CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::sqrt(p.variance_z()) == doctest::Approx(s).epsilon(1e-3));
    CHECK(std::sqrt(p.variance_r()) == doctest::Approx(s).epsilon(1e-3));
    CHECK(p.boundary_ratio() < 1e-6);
    CHECK_THROWS(initial_packet(packet(8.0), g));
}

TEST_CASE("Crank-Nicolson step")
{
    GridSpec const g = small_grid(48, 96, 16);
    WavePacketGrid psi = initial_packet(packet(2.0), g);
    CrankNicolson cn(g, 50.0);
    std::vector<double> const none;
    for (int n = 0; n < 50; ++n)
        cn.step(psi, none);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));

    // a uniform potential only rotates the state
    WavePacketGrid a = initial_packet(packet(2.0), g), b = a;
    cn.step(a, none);
    cn.step(b, std::vector<double>(std::size_t(g.n_r) * g.n_z, 1e-5));
    CHECK(std::arg(a.overlap(b)) == doctest::Approx(-1e-5 * 50.0).epsilon(1e-9));
    CHECK(std::abs(a.overlap(b)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(cn.step(a, std::vector<double>(3, 0.0)));
}

TEST_CASE("collision potential")
{
    double const c6 = 20, qa = 0.2, rc = 2.0;
    CHECK(collision_potential(3.0, c6, qa, rc) == doctest::Approx(-c6 / std::pow(3.0, 6) - 0.5 * qa / 81.0));
    CHECK(collision_potential(0.5, c6, qa, rc) == collision_potential(rc, c6, qa, rc));
}

TEST_CASE("grid file round trip")
{
    GridSpec const g = small_grid(16, 32, 16);
    WavePacketGrid const p = initial_packet(packet(2.0), g);
    std::stringstream ss;
    write_mwgrid(ss, p, 12.5);
    CHECK(ss.str().rfind("MWGRID1", 0) == 0);
    double t = 0;
    WavePacketGrid const r = read_mwgrid(ss, &t);
    CHECK(t == 12.5);
    CHECK(r.n_r() == 16);
    CHECK(r.data() == p.data());
    std::istringstream bad("MWGRID2");
    CHECK_THROWS(read_mwgrid(bad));
}

TEST_CASE("collision without the potential removes a geometric core")
{
    PropagationConfig c = packet(3.0);
    c.velocity_mps = 20000;
    c.potential = false;
    c.timestep_divisor = 8;
    c.grid = small_grid(64, 128, 24);
    CollisionResult const r = propagate_collision(Species::N, c);
    CHECK(r.n_final < 1.0);
    double const dr = delta_r_quantum(r.n_final, c.sigma_r);
    CHECK(dr == doctest::Approx(c.vdw_radius_n).epsilon(0.1));
}

TEST_CASE("propagation config validation")
{
    PropagationConfig c;
    c.timestep_divisor = 0;
    CHECK_THROWS(c.validate());
}
