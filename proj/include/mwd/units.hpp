#pragma once

#include <string_view>

// Physical constants and unit conversions. Everything inside the library is
// expressed in Hartree atomic units (hbar = m_e = e = 4*pi*eps0 = 1); SI only
// appears at input/output boundaries.
namespace mwd::units
{

// CODATA 2018
inline constexpr double bohr_m = 5.29177210903e-11;
inline constexpr double hartree_j = 4.3597447222071e-18;
inline constexpr double electron_mass_kg = 9.1093837015e-31;
inline constexpr double elementary_charge_c = 1.602176634e-19;
inline constexpr double planck_js = 6.62607015e-34;
inline constexpr double hbar_js = 1.054571817e-34;
inline constexpr double au_velocity_mps = 2.18769126364e6;
inline constexpr double au_time_s = 2.4188843265857e-17;
inline constexpr double electron_volt_j = 1.602176634e-19;
inline constexpr double angstrom_m = 1e-10;
inline constexpr double pi = 3.14159265358979323846;

//! 4He atomic mass in electron masses.
inline constexpr double helium_mass_me = 7294.300;
inline constexpr double helium_mass_kg = helium_mass_me * electron_mass_kg;

inline constexpr double angstrom_bohr = angstrom_m / bohr_m;

enum class Unit
{
    // length
    bohr,
    angstrom,
    nanometre,
    picometre,
    metre,
    // energy
    hartree,
    joule,
    electron_volt,
    // C6 coefficient
    hartree_bohr6,
    joule_metre6,
    // polarisability volume alpha/(4 pi eps0)
    bohr3,
    angstrom3,
    metre3,
    // velocity
    au_velocity,
    metre_per_second,
    // charge
    elementary_charge,
    coulomb,
    // time
    au_time,
    second,
};

enum class Dimension
{
    length,
    energy,
    c6,
    polarisability,
    velocity,
    charge,
    time,
};

Dimension dimension_of(Unit u);

//! Size of one `u` expressed in the atomic unit of its dimension.
double atomic_units_per(Unit u);

//! Multiplicative conversion; throws std::invalid_argument across dimensions.
double convert(double value, Unit from, Unit to);

//! Parse a unit symbol such as "bohr", "A", "m/s", "Ha"; throws on unknown.
Unit parse_unit(std::string_view symbol);

//! h / (m v) in metres; throws std::domain_error on non-positive input.
double de_broglie_wavelength(double mass_kg, double velocity_mps);

inline constexpr double angstrom_to_bohr(double a) { return a * angstrom_bohr; }
inline constexpr double bohr_to_angstrom(double b) { return b / angstrom_bohr; }
inline constexpr double mps_to_au(double v) { return v / au_velocity_mps; }

}  // namespace mwd::units
