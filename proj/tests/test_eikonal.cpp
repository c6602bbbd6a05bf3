#include "mwd/eikonal.hpp"
#include "mwd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace mwd;

namespace
{
kernels::AtomBlock one_atom(double c6, double q)
{
    kernels::AtomBlock b;
    double const d[6] = {1, 1, 1, 0, 0, 0};
    b.push(0, 0, 0, c6, d, q);
    b.finalize();
    return b;
}
}  // namespace

TEST_CASE("numeric phase of one atom")
{
    double const c6 = 12.0, vm = 2000, v = units::mps_to_au(vm);
    FieldOptions o;
    o.electrostatic = false;
    PotentialField const f = PotentialField::single_atom(c6, 0, o);
    for (double b : {3.0, 7.5, 20.0})
    {
        // int dz / (b^2 + z^2)^3 = 3 pi / (8 b^5)
        double const expect = 3 * std::numbers::pi * c6 / (8 * v * std::pow(b, 5));
        CHECK(phase_numeric(f, vm, {b, 0}) == doctest::Approx(expect).epsilon(1e-8));
        CHECK(phase_numeric(f, vm, {0, b}) == doctest::Approx(expect).epsilon(1e-8));
    }
}

TEST_CASE("closed form against the numeric path")
{
    double const c6 = 12.0, vm = 20000;
    FieldOptions o;
    o.electrostatic = false;
    PotentialField const f = PotentialField::single_atom(c6, 0, o);
    kernels::AtomBlock const a = one_atom(c6, 0);
    PhaseOptions one;
    one.zz_coefficient = 1.0;
    PhaseOptions three;
    for (double b : {3.0, 11.0})
    {
        double const num = phase_numeric(f, vm, {b, 0});
        CHECK(phase_vdw_closedform(a, vm, {b, 0}, one) == doctest::Approx(num).epsilon(1e-8));
        CHECK(phase_vdw_closedform(a, vm, {b, 0}, three) / num == doctest::Approx(14.0 / 12.0).epsilon(1e-8));
    }
}

TEST_CASE("electrostatic phase of a dipole pair")
{
    std::vector<FieldAtom> atoms(2);
    atoms[0].position = {0, 0, 0};
    atoms[0].charge = 0.39;
    atoms[1].position = {2.7, 0, 0};
    atoms[1].charge = -0.39;
    FieldOptions o;
    o.vdw = false;
    PotentialField const f(atoms, o);
    kernels::AtomBlock b;
    double const d[6] = {1, 1, 1, 0, 0, 0};
    b.push(0, 0, 0, 0, d, 0.39);
    b.push(2.7, 0, 0, 0, d, -0.39);
    b.finalize();
    for (Eigen::Vector2d p : {Eigen::Vector2d(-4, 1), Eigen::Vector2d(1.3, 5)})
        CHECK(phase_electrostatic(b, 2000, p) == doctest::Approx(phase_numeric(f, 2000, p)).epsilon(1e-8));
}

TEST_CASE("transmission masks")
{
    MembraneModel const m = carve_hole(build_pristine(lattice::default_side_length()), builtin_hole("circle10"));
    Window const w = default_window(m, 128, 128);
    TransmissionMask const open = transmission_mask(m, 3.2, 3.2, w);
    TransmissionMask const shut = transmission_mask(m, 40.0, 40.0, w);
    CHECK(open.report.open_pixels > 0);
    CHECK(shut.report.open_pixels == 0);
    CHECK(open.report.open_area == doctest::Approx(open.report.open_pixels * w.pixel_area()));
    CHECK(open.report.nominal_area_cells > open.report.open_area);
    // small radii open the hollow sites of the intact lattice too
    CHECK(transmission_mask(m, 1.0, 1.0, w).report.open_area > open.report.nominal_area_cells);
    CHECK(transmitted(m, 3.2, 3.2, {0, 0}));
    CHECK_FALSE(transmitted(m, 3.2, 3.2, {1e4, 0}));
    // a larger radius never opens pixels
    TransmissionMask const mid = transmission_mask(m, 4.0, 4.0, w);
    for (std::size_t n = 0; n < mid.open.size(); ++n)
        if (mid.open[n])
            CHECK(open.open[n]);
}

TEST_CASE("phase maps")
{
    MembraneModel const m = carve_hole(build_pristine(lattice::default_side_length()), builtin_hole("circle10"));
    DispersionTable const t = baseline_table(m);
    Window const w = default_window(m, 48, 48);
    double const r = units::angstrom_to_bohr(1.9);
    PhaseMap const num = build_phase_map(m, t, 20000, r, r, w, PhaseMethod::numeric);
    PhaseOptions one;
    one.zz_coefficient = 1.0;
    PhaseMap const cf = build_phase_map(m, t, 20000, r, r, w, PhaseMethod::closedform, one);
    REQUIRE(num.mask.report.open_pixels > 0);
    for (std::size_t n = 0; n < num.phase.size(); ++n)
    {
        CHECK(std::isnan(num.phase[n]) == !num.mask.open[n]);
        if (num.mask.open[n])
        {
            CHECK(num.phase[n] > 0);
            CHECK(cf.phase[n] == doctest::Approx(num.phase[n]).epsilon(1e-6));
        }
    }
    CHECK(num.lambda_db_m == doctest::Approx(units::de_broglie_wavelength(units::helium_mass_kg, 20000)));

    std::stringstream ss;
    write_phase_csv(ss, num);
    PhaseMap const back = read_phase_csv(ss);
    REQUIRE(back.phase.size() == num.phase.size());
    for (std::size_t n = 0; n < num.phase.size(); ++n)
        if (num.mask.open[n])
            CHECK(back.phase[n] == num.phase[n]);
    CHECK(back.mask.report.open_pixels == num.mask.report.open_pixels);

    std::ostringstream pgm;
    write_phase_pgm(pgm, num);
    CHECK(pgm.str().rfind("P5\n48 48\n65535\n", 0) == 0);
    CHECK(pgm.str().size() == std::string("P5\n48 48\n65535\n").size() + 48 * 48 * 2);
}

TEST_CASE("phase method names")
{
    CHECK(parse_phase_method("numeric") == PhaseMethod::numeric);
    CHECK(to_string(PhaseMethod::closedform) == "closedform");
    CHECK_THROWS(parse_phase_method("exact"));
}
