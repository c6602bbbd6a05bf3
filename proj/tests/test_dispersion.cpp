#include "mwd/dispersion.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace mwd;

TEST_CASE("pair quantities")
{
    // xi = 4 C6 / (3 alpha^2)
    CHECK(characteristic_frequency(2.0, 3.0) == doctest::Approx(4.0 * 3.0 / (3.0 * 4.0)));
    CHECK(dynamic_alpha(5.0, 0.4, 0.0) == doctest::Approx(5.0));
    CHECK(dynamic_alpha(5.0, 0.4, 0.4) == doctest::Approx(2.5));
    // homonuclear London: 3/4 xi alpha^2
    CHECK(c6_pair(2.0, 0.8, 2.0, 0.8) == doctest::Approx(0.75 * 0.8 * 4.0));
    CHECK(c6_pair(1.0, 0.3, 7.0, 1.1) == doctest::Approx(c6_pair(7.0, 1.1, 1.0, 0.3)));
}

TEST_CASE("quadrature agrees with the London closed form")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> a(0.1, 100.0), x(0.01, 5.0);
    for (int n = 0; n < 50; ++n)
    {
        double const a1 = a(rng), x1 = x(rng), a2 = a(rng), x2 = x(rng);
        CHECK(c6_quadrature(a1, x1, a2, x2) == doctest::Approx(c6_pair(a1, x1, a2, x2)).epsilon(1e-8));
    }
}

TEST_CASE("chain truncation")
{
    double const a = 4.7;
    double const e1 = truncation_error(a, a, 1), e2 = truncation_error(a, a, 2), e4 = truncation_error(a, a, 4);
    CHECK(e1 > e2);
    CHECK(e2 > e4);
    CHECK(e2 < 0.01);
    // sum_j>=N (1+j)^-6 / zeta(6) for r = a
    double const z6 = std::pow(std::acos(-1.0), 6) / 945.0;
    double tail = 0;
    for (int j = 3; j < 100000; ++j)
        tail += std::pow(1.0 + j, -6);
    CHECK(e2 == doctest::Approx(tail / z6).epsilon(1e-6));
}

TEST_CASE("smeared dipole tensor has the bare far field")
{
    Eigen::Vector3d const r(13.0, -7.0, 4.0);
    double const d = r.norm();
    Eigen::Matrix3d const bare = (3 * r * r.transpose() / (d * d) - Eigen::Matrix3d::Identity()) / (d * d * d);
    Eigen::Matrix3d const t = smeared_dipole_tensor(r, 0.8);
    CHECK((t - bare).norm() < 1e-10 * bare.norm());
    // finite at the origin and isotropic there
    Eigen::Matrix3d const t0 = smeared_dipole_tensor(Eigen::Vector3d::Zero(), 1.0);
    CHECK(std::isfinite(t0(0, 0)));
    CHECK(t0(0, 0) == doctest::Approx(t0(2, 2)));
    // continuous across the series switch
    Eigen::Vector3d const u = Eigen::Vector3d(1, 2, 2) / 3.0;
    Eigen::Matrix3d const below = smeared_dipole_tensor(0.04999 * u, 1.0);
    Eigen::Matrix3d const above = smeared_dipole_tensor(0.05001 * u, 1.0);
    CHECK((below - above).norm() < 1e-3 * below.norm());
    Eigen::Matrix3d const mid = smeared_dipole_tensor(0.05 * u, 1.0);
    CHECK((smeared_dipole_tensor(0.0499999999 * u, 1.0) - mid).norm() < 1e-8 * mid.norm());
}

TEST_CASE("pristine sheet reproduces the target polarisabilities")
{
    DampingParams const d;
    PristineBaseline const b = pristine_baseline(lattice::default_hirshfeld_alpha(Species::B),
                                                 lattice::default_hirshfeld_alpha(Species::N),
                                                 default_screening_cutoff(), d);
    CHECK(b.scalar(Species::B) == doctest::Approx(pristine_alpha_b).epsilon(1e-8));
    CHECK(b.scalar(Species::N) == doctest::Approx(pristine_alpha_n).epsilon(1e-8));
    // in-plane response exceeds the out-of-plane one
    CHECK(b.alpha_b(0, 0) > b.alpha_b(2, 2));
    CHECK(b.alpha_b(0, 0) == doctest::Approx(b.alpha_b(1, 1)).epsilon(1e-10));
}

TEST_CASE("screening of the intact sheet has no ripple")
{
    MembraneModel const m = build_pristine(8 * lattice::lattice_constant());
    ScreeningOptions o;
    DispersionTable const t = screen_polarisabilities(m, o);
    REQUIRE(t.size() == m.size());
    for (auto const& e : t.entries)
        CHECK(std::abs(e.ripple_percent) < 1e-3);

    ScreeningOptions direct = o;
    direct.damping.solver = ScreeningSolver::direct;
    DispersionTable const td = screen_polarisabilities(m, direct);
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(td[i].alpha_scalar == doctest::Approx(t[i].alpha_scalar).epsilon(1e-8));

    ScreeningOptions stuck = o;
    stuck.damping.max_iterations = 1;
    CHECK_THROWS_AS(screen_polarisabilities(m, stuck), ConvergenceError);
}

TEST_CASE("hole edge is enhanced")
{
    MembraneModel const m = carve_hole(build_pristine(lattice::default_side_length()), builtin_hole("circle10"));
    DispersionTable const t = screen_polarisabilities(m);
    double edge = 0, far = 0;
    int ne = 0, nf = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        CHECK(t[i].c6_he > 0);
        CHECK(t[i].anisotropy.trace() == doctest::Approx(3.0));
        if (m[i].ring_index == 0)
            edge += t[i].ripple_percent, ++ne;
        if (m[i].ring_index >= 6)
            far += std::abs(t[i].ripple_percent), ++nf;
    }
    CHECK(edge / ne > 5.0);
    CHECK(far / nf < edge / ne / 5);
}

TEST_CASE("dispersion table CSV round trip")
{
    MembraneModel const m = build_pristine(4 * lattice::lattice_constant());
    DispersionTable const t = baseline_table(m);
    std::stringstream ss;
    write_dispersion_csv(ss, t);
    DispersionTable const r = read_dispersion_csv(ss);
    REQUIRE(r.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        CHECK(r[i].alpha_scalar == t[i].alpha_scalar);
        CHECK(r[i].c6_he == t[i].c6_he);
        CHECK(r[i].alpha_tensor == t[i].alpha_tensor);
    }
}

TEST_CASE("free atom data file")
{
    std::istringstream in("# symbol alpha c6\nB 21.0 99.5\nN 7.4 24.2\nHe 1.38 1.42\n");
    FreeAtomData const d = FreeAtomData::read(in);
    CHECK(d.boron.alpha == 21.0);
    CHECK(d.helium.c6 == 1.42);
    std::istringstream bad("X 1 2\n");
    CHECK_THROWS(FreeAtomData::read(bad));
}
