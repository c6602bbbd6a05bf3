#include "mwd/units.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace mwd::units;

TEST_CASE("length conversions")
{
    CHECK(convert(1.0, Unit::angstrom, Unit::bohr) == doctest::Approx(1.0 / 0.529177210903).epsilon(1e-14));
    CHECK(convert(1.0, Unit::nanometre, Unit::angstrom) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(convert(convert(3.7, Unit::picometre, Unit::bohr), Unit::bohr, Unit::picometre)
          == doctest::Approx(3.7).epsilon(1e-14));
    CHECK(angstrom_to_bohr(1.0) == doctest::Approx(convert(1.0, Unit::angstrom, Unit::bohr)).epsilon(1e-15));
}

TEST_CASE("energy, c6 and velocity conversions")
{
    CHECK(convert(1.0, Unit::hartree, Unit::electron_volt) == doctest::Approx(27.211386245988).epsilon(1e-11));
    // C6: Ha bohr^6 -> J m^6
    double const j_m6 = hartree_j * std::pow(bohr_m, 6);
    CHECK(convert(1.0, Unit::hartree_bohr6, Unit::joule_metre6) == doctest::Approx(j_m6).epsilon(1e-13));
    CHECK(convert(2000.0, Unit::metre_per_second, Unit::au_velocity) == doctest::Approx(mps_to_au(2000.0)));
    CHECK(convert(1.0, Unit::au_time, Unit::second) == doctest::Approx(au_time_s).epsilon(1e-14));
}

TEST_CASE("dimension mismatch throws")
{
    CHECK_THROWS_AS(convert(1.0, Unit::bohr, Unit::hartree), std::invalid_argument);
    CHECK_THROWS_AS(convert(1.0, Unit::second, Unit::coulomb), std::invalid_argument);
}

TEST_CASE("unit symbols")
{
    CHECK(parse_unit("A") == Unit::angstrom);
    CHECK(parse_unit("bohr") == Unit::bohr);
    CHECK(parse_unit("m/s") == Unit::metre_per_second);
    CHECK(parse_unit("Ha") == Unit::hartree);
    CHECK_THROWS(parse_unit("furlong"));
}

TEST_CASE("de Broglie wavelength")
{
    double const m = 7294.300 * 9.1093837015e-31;
    CHECK(de_broglie_wavelength(m, 2000) == doctest::Approx(6.62607015e-34 / (m * 2000)).epsilon(1e-14));
    // about 0.5 A at 2000 m/s, 0.05 A at 20000 m/s
    CHECK(de_broglie_wavelength(helium_mass_kg, 2000) == doctest::Approx(0.4985e-10).epsilon(2e-3));
    CHECK(de_broglie_wavelength(helium_mass_kg, 20000) == doctest::Approx(0.04985e-10).epsilon(2e-3));
    CHECK_THROWS_AS(de_broglie_wavelength(helium_mass_kg, 0), std::domain_error);
    CHECK_THROWS_AS(de_broglie_wavelength(-1, 10), std::domain_error);
}
